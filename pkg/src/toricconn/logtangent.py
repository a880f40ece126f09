"""Infinitesimal torus action in the logarithmic frame, and the unimodularity checks.

The Lie algebra of the torus is identified with Q^n through the standard
cocharacter basis ``e_1..e_n``. The fundamental field of ``e_j`` acts on a
character by ``chi^m -> <m, e_j> chi^m``, so in chart ``sigma`` it is
``sum_i <m_i, e_j> x_i d/dx_i``: column ``j`` of the dual basis matrix,
read in the log frame ``{x_i d/dx_i}``.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import DimensionMismatch, Lemma1Failure
from .exact.lattice import int_det
from .exact.laurent import LaurentPoly
from .fan import Atlas


@dataclass(frozen=True)
class BetaMatrix:
    cone: int
    matrix: Tuple[Tuple[int, ...], ...]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.matrix)

    @property
    def det(self) -> int:
        return int_det(self.matrix)


class LogVectorField:
    """Vector field ``sum_i a_i x_i d/dx_i`` on a chart.

    ``log_part[i]`` keeps the terms of ``a_i`` with no negative power of
    ``x_i``; ``non_log_part[i]`` keeps the rest. A field is tangent to every
    boundary divisor ``{x_i = 0}`` of the chart exactly when the non-log part
    vanishes and it is regular.
    """

    __slots__ = ("n", "log_part", "non_log_part")

    def __init__(self, coefficients: Sequence[LaurentPoly]):
        n = len(coefficients)
        for c in coefficients:
            if c.nvars != n:
                raise DimensionMismatch("field coefficients must live in the chart ring")
        self.n = n
        self.log_part = tuple(c.filter(lambda e, i=i: e[i] >= 0) for i, c in enumerate(coefficients))
        self.non_log_part = tuple(c.filter(lambda e, i=i: e[i] < 0) for i, c in enumerate(coefficients))

    @classmethod
    def constant(cls, values: Sequence[int]) -> "LogVectorField":
        n = len(values)
        return cls([LaurentPoly.constant(n, v) for v in values])

    def coefficients(self) -> Tuple[LaurentPoly, ...]:
        return tuple(a + b for a, b in zip(self.log_part, self.non_log_part))

    def is_logarithmic(self) -> bool:
        return all(p.is_zero() for p in self.non_log_part)

    def __eq__(self, other):
        if not isinstance(other, LogVectorField):
            return NotImplemented
        return self.log_part == other.log_part and self.non_log_part == other.non_log_part

    def __repr__(self):
        return f"LogVectorField({[str(c) for c in self.coefficients()]})"


def beta_matrix(atlas: Atlas, cone: int) -> BetaMatrix:
    chart = atlas.charts[cone]
    # entry (i, j) = <m_i, e_j>
    return BetaMatrix(cone, chart.dual_basis)


def beta_field(atlas: Atlas, cone: int, j: int) -> LogVectorField:
    return LogVectorField.constant(beta_matrix(atlas, cone).column(j))


def transport_log_field(atlas: Atlas, field: LogVectorField, source: int, target: int) -> LogVectorField:
    """Rewrite a field given in the log frame of ``source`` into that of ``target``.

    Since ``x^(t)_k = prod_i (x^(s)_i)^T[i][k]``, the log frame obeys
    ``x^(s)_i d/dx^(s)_i = sum_k T[i][k] x^(t)_k d/dx^(t)_k``, so coefficients
    transform by ``T`` transposed, after rewriting them into target coordinates.
    """
    if field.n != atlas.n:
        raise DimensionMismatch(f"field has {field.n} coordinates, chart has {atlas.n}")
    t = atlas.transitions[(source, target)].exponent_matrix
    coeffs = [atlas.rewrite(c, source, target) for c in field.coefficients()]
    n = atlas.n
    out = []
    for k in range(n):
        acc = LaurentPoly.zero(n)
        for i in range(n):
            if t[i][k]:
                acc = acc + coeffs[i] * t[i][k]
        out.append(acc)
    return LogVectorField(out)


@dataclass
class Lemma1Report:
    determinants: dict
    transported_pairs: int
    logarithmic_columns: int

    def to_json(self) -> dict:
        return {
            "determinants": {str(k): v for k, v in sorted(self.determinants.items())},
            "transported_pairs": self.transported_pairs,
            "logarithmic_columns": self.logarithmic_columns,
        }


def check_lemma1(atlas: Atlas, transport: bool = True) -> Lemma1Report:
    """Chart-local form of the isomorphism between the trivial Lie-algebra bundle and the log tangent bundle.

    For every cone: ``|det beta| == 1`` and each column is a field with zero
    non-log part. With ``transport``, additionally check that each column
    transported to every other chart is that chart's column (a global frame).
    """
    dets = {}
    columns = 0
    for k in atlas.cone_indices():
        beta = beta_matrix(atlas, k)
        d = beta.det
        dets[k] = d
        if abs(d) != 1:
            raise Lemma1Failure(f"cone {k}: det beta = {d}, not a unit")
        for j in range(atlas.n):
            if not beta_field(atlas, k, j).is_logarithmic():
                raise Lemma1Failure(f"cone {k}: beta column {j} has a non-log part")
            columns += 1
    pairs = 0
    if transport:
        for s, t in atlas.pairs():
            for j in range(atlas.n):
                moved = transport_log_field(atlas, beta_field(atlas, s, j), s, t)
                expected = beta_field(atlas, t, j)
                if moved != expected:
                    raise Lemma1Failure(
                        f"pair ({s}, {t}): column {j} transports to {moved}, expected {expected}"
                    )
                if not moved.is_logarithmic():
                    raise Lemma1Failure(f"pair ({s}, {t}): transported column {j} left the log tangent bundle")
            pairs += 1
    return Lemma1Report(dets, pairs, columns)


