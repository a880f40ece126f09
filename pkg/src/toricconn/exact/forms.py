"""Matrix-valued logarithmic differential forms on a chart with coordinates x_1..x_n.

Conventions, fixed here and inherited everywhere downstream:

* ``theta_i`` denotes ``dx_i / x_i``. A 1-form is stored through its
  coefficients ``F_i`` on ``theta_i`` in the Laurent ring; ``log_part[i]`` holds
  the terms of ``F_i`` with no positive power of ``x_i`` and ``hol_part[i]``
  holds ``(F_i - log_part[i]) / x_i``, the coefficient on ``dx_i``.
* ``d(f theta_i) = sum_j (x_j df/dx_j) theta_j ^ theta_i``.
* 2-forms are stored on ``theta_i ^ theta_j`` with ``i < j``; the
  coefficient of ``a ^ b`` there is ``A_i B_j - A_j B_i`` (matrix products, order
  kept), so ``a ^ a`` has coefficient ``[A_i, A_j]``.
"""

from typing import Dict, Sequence, Tuple

from ..errors import DimensionMismatch
from .laurent import LaurentMatrix


def _split_log(coeff: LaurentMatrix, i: int) -> Tuple[LaurentMatrix, LaurentMatrix]:
    n = coeff.nvars
    shift = [0] * n
    shift[i] = -1
    log = coeff.map(lambda p: p.filter(lambda e: e[i] <= 0))
    hol = coeff.map(lambda p: p.filter(lambda e: e[i] >= 1).shift(shift))
    return log, hol


class LogOneForm:
    """``sum_i log_part[i] dx_i/x_i + hol_part[i] dx_i`` with matrix coefficients.

    The constructor normalizes, so two forms are equal iff they are the same
    form in the Laurent ring.
    """

    __slots__ = ("n", "log_part", "hol_part")

    def __init__(self, log_part: Sequence[LaurentMatrix], hol_part: Sequence[LaurentMatrix] = None):
        n = len(log_part)
        if n == 0:
            raise DimensionMismatch("a 1-form needs at least one coordinate")
        if hol_part is None:
            hol_part = [LaurentMatrix.zeros(log_part[0].nvars, *log_part[0].shape)] * n
        if len(hol_part) != n:
            raise DimensionMismatch("log and holomorphic parts differ in length")
        shape = log_part[0].shape
        for m in list(log_part) + list(hol_part):
            if m.shape != shape or m.nvars != n:
                raise DimensionMismatch("1-form coefficients must share shape and live in the chart ring")
        logs, hols = [], []
        for i in range(n):
            total = _total(log_part[i], hol_part[i], i)
            lp, hp = _split_log(total, i)
            logs.append(lp)
            hols.append(hp)
        self.n = n
        self.log_part = tuple(logs)
        self.hol_part = tuple(hols)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[LaurentMatrix]) -> "LogOneForm":
        """Build from the coefficients on ``dx_i/x_i``."""
        return cls(list(coeffs))

    @classmethod
    def zero(cls, n: int, size: int) -> "LogOneForm":
        return cls([LaurentMatrix.zeros(n, size)] * n)

    @property
    def shape(self):
        return self.log_part[0].shape

    def coefficients(self) -> Tuple[LaurentMatrix, ...]:
        """Coefficients ``F_i`` on ``dx_i/x_i``."""
        return tuple(_total(self.log_part[i], self.hol_part[i], i) for i in range(self.n))

    def normalize(self) -> "LogOneForm":
        return LogOneForm(self.log_part, self.hol_part)

    def residue(self, i: int) -> LaurentMatrix:
        """``log_part[i]`` restricted to ``x_i = 0``."""
        return self.log_part[i].map(lambda p: p.at_zero(i))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.log_part + self.hol_part)

    def __eq__(self, other):
        if not isinstance(other, LogOneForm):
            return NotImplemented
        return self.log_part == other.log_part and self.hol_part == other.hol_part

    def __hash__(self):
        return hash((self.log_part, self.hol_part))

    def __add__(self, other):
        _check(self, other)
        return LogOneForm.from_coefficients([a + b for a, b in zip(self.coefficients(), other.coefficients())])

    def __sub__(self, other):
        _check(self, other)
        return LogOneForm.from_coefficients([a - b for a, b in zip(self.coefficients(), other.coefficients())])

    def conjugate(self, left: LaurentMatrix, right: LaurentMatrix) -> "LogOneForm":
        """Coefficientwise ``left @ F_i @ right``."""
        return LogOneForm.from_coefficients([left @ c @ right for c in self.coefficients()])

    def first_difference(self, other: "LogOneForm"):
        for kind, mine, theirs in (("log", self.log_part, other.log_part), ("hol", self.hol_part, other.hol_part)):
            for i, (a, b) in enumerate(zip(mine, theirs)):
                diff = a.first_difference(b)
                if diff is not None:
                    return (kind, i) + diff
        return None

    def __repr__(self):
        return f"LogOneForm(log={[m.to_strings() for m in self.log_part]}, hol={[m.to_strings() for m in self.hol_part]})"


def _total(log: LaurentMatrix, hol: LaurentMatrix, i: int) -> LaurentMatrix:
    shift = [0] * log.nvars
    shift[i] = 1
    return log + hol.map(lambda p: p.shift(shift))


def _check(a: LogOneForm, b: LogOneForm):
    if a.n != b.n:
        raise DimensionMismatch(f"chart dimensions {a.n} and {b.n} differ")
    if a.shape != b.shape:
        raise DimensionMismatch(f"matrix shapes {a.shape} and {b.shape} differ")


KINDS = ("log-log", "log-hol", "hol-log", "hol-hol")


class LogTwoForm:
    """2-form stored on pairs ``i < j``.

    ``components[(i, j)]`` is a 4-tuple of matrices, the coefficients of
    ``theta_i^theta_j``, ``theta_i^dx_j``, ``dx_i^theta_j`` and
    ``dx_i^dx_j`` in that order (see :data:`KINDS`). Only nonzero pairs are kept.
    """

    __slots__ = ("n", "size", "components")

    def __init__(self, n: int, size: Tuple[int, int], totals: Dict[Tuple[int, int], LaurentMatrix]):
        comps = {}
        for (i, j), m in totals.items():
            if not i < j:
                raise ValueError("2-form components must be keyed by i < j")
            if m.is_zero():
                continue
            comps[(i, j)] = _split_pair(m, i, j)
        self.n = n
        self.size = size
        self.components = comps

    @classmethod
    def zero(cls, n: int, size) -> "LogTwoForm":
        return cls(n, size, {})

    def totals(self) -> Dict[Tuple[int, int], LaurentMatrix]:
        """Coefficients on ``theta_i ^ theta_j``."""
        out = {}
        for (i, j), (ll, lh, hl, hh) in self.components.items():
            nv = ll.nvars
            ei = [0] * nv
            ei[i] = 1
            ej = [0] * nv
            ej[j] = 1
            eij = [0] * nv
            eij[i] = eij[j] = 1
            out[(i, j)] = (
                ll
                + lh.map(lambda p: p.shift(ej))
                + hl.map(lambda p: p.shift(ei))
                + hh.map(lambda p: p.shift(eij))
            )
        return out

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        if not isinstance(other, LogTwoForm):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def __add__(self, other):
        if self.n != other.n or self.size != other.size:
            raise DimensionMismatch("2-forms on different charts or matrix sizes")
        a, b = self.totals(), other.totals()
        out = dict(a)
        for k, m in b.items():
            out[k] = out[k] + m if k in out else m
        return LogTwoForm(self.n, self.size, out)

    def first_nonzero(self):
        """``(pair, kind, i, j, entry)`` of the first nonzero coefficient entry."""
        for pair in sorted(self.components):
            for kind, m in zip(KINDS, self.components[pair]):
                zero = LaurentMatrix.zeros(m.nvars, *m.shape)
                diff = m.first_difference(zero)
                if diff is not None:
                    return pair, kind, diff[0], diff[1], diff[2]
        return None

    def __repr__(self):
        body = {k: [m.to_strings() for m in v] for k, v in sorted(self.components.items())}
        return f"LogTwoForm({body})"


def _split_pair(m: LaurentMatrix, i: int, j: int):
    def part(hi: bool, hj: bool):
        shift = [0] * m.nvars
        shift[i] = -1 if hi else 0
        shift[j] = -1 if hj else 0

        def keep(e):
            return (e[i] >= 1) == hi and (e[j] >= 1) == hj

        return m.map(lambda p: p.filter(keep).shift(shift))

    return (part(False, False), part(False, True), part(True, False), part(True, True))


def total_derivative(f: LaurentMatrix) -> LogOneForm:
    """``df = sum_i (x_i df/dx_i) dx_i/x_i`` for a matrix of functions."""
    return LogOneForm.from_coefficients([f.euler(i) for i in range(f.nvars)])


def exterior_derivative(a: LogOneForm) -> LogTwoForm:
    coeffs = a.coefficients()
    totals = {}
    for i in range(a.n):
        for j in range(i + 1, a.n):
            totals[(i, j)] = coeffs[j].euler(i) - coeffs[i].euler(j)
    return LogTwoForm(a.n, a.shape, totals)


def wedge(a: LogOneForm, b: LogOneForm) -> LogTwoForm:
    if a.n != b.n:
        raise DimensionMismatch(f"chart dimensions {a.n} and {b.n} differ")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply coefficients {a.shape} by {b.shape}")
    ca, cb = a.coefficients(), b.coefficients()
    totals = {}
    for i in range(a.n):
        for j in range(i + 1, a.n):
            totals[(i, j)] = ca[i] @ cb[j] - ca[j] @ cb[i]
    return LogTwoForm(a.n, (a.shape[0], b.shape[1]), totals)
