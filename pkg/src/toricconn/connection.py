"""The canonical logarithmic connection of an equivariant bundle, and its checks.

Frame convention: ``nabla s_a = sum_b s_b A[b][a]`` (columns act on frame
labels). Under ``s^tau = s^sigma g`` this gives the gauge law

    A^tau = g^-1 A^sigma g + g^-1 dg,

checked with ``A^tau`` rewritten into ``sigma`` coordinates.

On chart ``sigma`` the canonical connection is diagonal in the equivariant
frame ``s_a = chi^{-u_a} e_a``::

    A^sigma = SIGN * diag_a( sum_i <u_a, v_i> dx_i/x_i ),   SIGN = -1.

The sign was pinned once by the flat-frame oracle on O(1) over P^1: the
torus-orbit sections ``e_a = chi^{u_a} s_a`` must be flat, which holds for
``SIGN = -1`` and fails for ``+1`` (the test suite re-runs both).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .errors import (
    ChartDisagreement,
    CurvatureNonzero,
    FlatFrameFailure,
    GaugeMismatch,
    ResidueMismatch,
)
from .exact.forms import LogOneForm, LogTwoForm, exterior_derivative, wedge
from .exact.lattice import solve_integer
from .exact.laurent import LaurentMatrix, LaurentPoly
from .exact.rational import format_rational
from .fan import Atlas, divisor_chart_index
from .klyachko import Cocycle, ConeDecomposition, KlyachkoData, determinant_divisor

CONNECTION_SIGN = -1


@dataclass
class LogConnection:
    forms: Dict[int, LogOneForm]
    sign: int = CONNECTION_SIGN

    def __getitem__(self, cone: int) -> LogOneForm:
        return self.forms[cone]

    def cones(self) -> List[int]:
        return sorted(self.forms)


def canonical_connection(
    decompositions: Sequence[ConeDecomposition], atlas: Atlas, sign: int = CONNECTION_SIGN
) -> LogConnection:
    n = atlas.n
    forms = {}
    for d in decompositions:
        chart = atlas.charts[d.cone]
        pairings = [chart.character_exponent(u) for u in d.weights]
        coeffs = [
            LaurentMatrix.diagonal(n, [LaurentPoly.constant(n, sign * p[i]) for p in pairings]) for i in range(n)
        ]
        forms[d.cone] = LogOneForm.from_coefficients(coeffs)
    return LogConnection(forms, sign)


def rewrite_form(form: LogOneForm, src: int, dst: int, atlas: Atlas) -> LogOneForm:
    """Express a 1-form given in chart ``src`` in the coordinates of chart ``dst``.

    ``x^(src)_k = prod_i (x^(dst)_i)^T[i][k]`` with ``T`` the ``(dst, src)``
    exponent matrix, so ``dx^(src)_k / x^(src)_k = sum_i T[i][k] dx^(dst)_i / x^(dst)_i``.
    """
    t = atlas.transitions[(dst, src)].exponent_matrix
    coeffs = [atlas.rewrite_matrix(c, src, dst) for c in form.coefficients()]
    n = atlas.n
    out = []
    for i in range(n):
        acc = LaurentMatrix.zeros(n, *form.shape)
        for k in range(n):
            if t[i][k]:
                acc = acc + coeffs[k].scale(t[i][k])
        out.append(acc)
    return LogOneForm.from_coefficients(out)


def gauge_transform(form: LogOneForm, g: LaurentMatrix) -> LogOneForm:
    """``g^-1 A g + g^-1 dg``."""
    ginv = g.inverse()
    coeffs = [ginv @ c @ g + ginv @ g.euler(i) for i, c in enumerate(form.coefficients())]
    return LogOneForm.from_coefficients(coeffs)


@dataclass
class GaugeReport:
    pairs: List[Tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "pairs_checked": len(self.pairs),
            "distinct_pairs": sum(1 for s, t in self.pairs if s != t),
        }


def _form_difference(a: LogOneForm, b: LogOneForm) -> str:
    diff = a.first_difference(b)
    if diff is None:
        return "no difference"
    kind, i, r, c, x, y = diff
    return f"{kind} part of dx_{i + 1}, entry ({r}, {c}): {x} != {y}"


def check_gauge_law(conn: LogConnection, cocycle: Cocycle, atlas: Atlas) -> GaugeReport:
    checked = []
    for s, t in atlas.pairs():
        lhs = rewrite_form(conn[t], t, s, atlas)
        rhs = gauge_transform(conn[s], cocycle[(s, t)])
        if lhs != rhs:
            raise GaugeMismatch(f"pair ({s}, {t}): A^{t} rewritten != g^-1 A^{s} g + g^-1 dg; {_form_difference(lhs, rhs)}")
        checked.append((s, t))
    return GaugeReport(checked)


def curvature(conn: LogConnection) -> Dict[int, LogTwoForm]:
    """``F = dA + A ^ A`` on every chart."""
    out = {}
    for k in conn.cones():
        a = conn[k]
        out[k] = exterior_derivative(a) + wedge(a, a)
    return out


def check_integrability(conn: LogConnection) -> Dict[int, LogTwoForm]:
    curv = curvature(conn)
    for k, f in sorted(curv.items()):
        if not f.is_zero():
            pair, kind, r, c, entry = f.first_nonzero()
            raise CurvatureNonzero(
                f"chart {k}: curvature component ({pair[0] + 1}, {pair[1] + 1}) [{kind}] entry ({r}, {c}) = {entry}"
            )
    return curv


@dataclass
class FlatFrameReport:
    charts: List[int]
    sections: int

    def to_json(self) -> dict:
        return {"charts": self.charts, "sections": self.sections}


def flat_frame_check(
    conn: LogConnection, decompositions: Sequence[ConeDecomposition], atlas: Atlas
) -> FlatFrameReport:
    """Check that the torus-orbit frame ``f_a = chi^{u_a} s_a`` is flat on every chart.

    ``nabla(phi s_a) = sum_b s_b (delta_ab d phi + phi A[b][a])``, evaluated in
    the Laurent ring of the chart, i.e. on the open orbit.
    """
    n = atlas.n
    sections = 0
    for d in decompositions:
        chart = atlas.charts[d.cone]
        coeffs = conn[d.cone].coefficients()
        for a, u in enumerate(d.weights):
            phi = chart.character(u)
            for i in range(n):
                for b in range(len(d.weights)):
                    term = phi * coeffs[i][b, a]
                    if a == b:
                        term = term + phi.euler(i)
                    if not term.is_zero():
                        raise FlatFrameFailure(
                            f"chart {d.cone}: frame section {a} is not flat; component {b} on dx_{i + 1}/x_{i + 1} is {term}"
                        )
            sections += 1
    return FlatFrameReport([d.cone for d in decompositions], sections)


# -- residues ------------------------------------------------------------------------


def charpoly(m: Sequence[Sequence[Fraction]]) -> Tuple[Fraction, ...]:
    """Characteristic polynomial coefficients, leading first (Faddeev-LeVerrier)."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k) / k
        prev = [[mk[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        mk = [[sum(a[i][l] * prev[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(mk[i][i] for i in range(n)) / k)
    return tuple(coeffs)


def _divisors(k: int) -> List[int]:
    k = abs(k)
    return [d for d in range(1, k + 1) if k % d == 0]


def rational_roots(coeffs: Sequence[Fraction]) -> List[Fraction]:
    """Rational roots with multiplicity; empty list for missing ones."""
    coeffs = list(coeffs)
    roots = []
    while len(coeffs) > 1 and coeffs[-1] == 0:
        roots.append(Fraction(0))
        coeffs.pop()
    if len(coeffs) == 1:
        return sorted(roots)
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    candidates = sorted(
        {Fraction(s * p, q) for p in _divisors(ints[-1]) for q in _divisors(ints[0]) for s in (1, -1)}
    )
    for x in candidates:
        while len(coeffs) > 1:
            # synthetic division by (X - x)
            quotient = [coeffs[0]]
            for c in coeffs[1:]:
                quotient.append(c + quotient[-1] * x)
            if quotient[-1] != 0:
                break
            coeffs = quotient[:-1]
            roots.append(x)
    return sorted(roots)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass
class ResidueSpectrum:
    """Per ray: eigenvalues (ascending, with multiplicity) of the residue along ``D_ray``."""

    eigenvalues: Dict[int, Tuple[Fraction, ...]]
    charts: Dict[int, List[int]]

    def trace(self, ray: int) -> Fraction:
        return sum(self.eigenvalues[ray], Fraction(0))

    def to_json(self) -> dict:
        return {
            str(k): {"eigenvalues": [format_rational(x) for x in v], "charts": self.charts[k]}
            for k, v in sorted(self.eigenvalues.items())
        }


def residues(conn: LogConnection, atlas: Atlas) -> ResidueSpectrum:
    fan = atlas.fan
    eig = {}
    charts = {}
    for ray in range(len(fan.rays)):
        seen = None
        charts[ray] = []
        for cone in fan.cones_containing(ray):
            i = divisor_chart_index(fan, ray, cone)
            log = conn[cone].log_part[i]
            if any(e[i] < 0 for row in log.entries() for p in row for e, _ in p.terms):
                raise ResidueMismatch(f"ray {ray}, chart {cone}: pole of order > 1 along the divisor")
            res = conn[cone].residue(i)
            if not res.is_constant():
                raise ResidueMismatch(f"ray {ray}, chart {cone}: residue {res.to_strings()} is not constant")
            poly = charpoly(res.constant_values())
            if seen is None:
                seen = (cone, poly)
            elif poly != seen[1]:
                raise ChartDisagreement(
                    f"ray {ray}: residue characteristic polynomials differ between charts {seen[0]} and {cone}"
                )
            charts[ray].append(cone)
        roots = rational_roots(seen[1])
        if len(roots) != len(seen[1]) - 1:
            raise ResidueMismatch(f"ray {ray}: residue has non-rational eigenvalues")
        eig[ray] = tuple(roots)
    return ResidueSpectrum(eig, charts)


def check_residue_jumps(spectrum: ResidueSpectrum, data: KlyachkoData, sign: int = CONNECTION_SIGN) -> None:
    for ray, values in sorted(spectrum.eigenvalues.items()):
        expected = tuple(sorted(Fraction(sign * j) for j in data.jump_multiset(ray)))
        if values != expected:
            raise ResidueMismatch(
                f"ray {ray}: residue eigenvalues {[str(x) for x in values]} != signed jumps {[str(x) for x in expected]}"
            )


@dataclass
class ChernReport:
    traces: List[Fraction]
    determinant_divisor: List[int]
    principal_witness: List[int]

    def to_json(self) -> dict:
        return {
            "residue_traces": [format_rational(x) for x in self.traces],
            "determinant_divisor": self.determinant_divisor,
            "principal_witness": self.principal_witness,
        }


def check_first_chern(
    spectrum: ResidueSpectrum,
    decompositions: Sequence[ConeDecomposition],
    atlas: Atlas,
    sign: int = CONNECTION_SIGN,
) -> ChernReport:
    """``sum_rho tr(Res_rho) D_rho`` and ``sign * det E`` must agree as divisor classes.

    Two torus-invariant divisors are linearly equivalent iff their difference is
    ``div(chi^m) = sum_rho <m, v_rho> D_rho`` for an integer ``m``.
    """
    fan = atlas.fan
    traces = [spectrum.trace(k) for k in range(len(fan.rays))]
    det_div = determinant_divisor(decompositions, fan)
    diff = [t - sign * a for t, a in zip(traces, det_div)]
    if any(x.denominator != 1 for x in diff):
        raise ResidueMismatch(f"residue traces {[str(t) for t in traces]} are not integral")
    witness = solve_integer([list(v) for v in fan.rays], [int(x) for x in diff])
    if witness is None:
        raise ResidueMismatch(
            f"residue divisor {[str(t) for t in traces]} is not linearly equivalent to {sign} * det divisor {det_div}"
        )
    return ChernReport(traces, det_div, witness)


# -- export -----------------------------------------------------------------------------


def _poly_terms(p: LaurentPoly):
    return [[list(e), format_rational(c)] for e, c in p.terms]


def export_connection(conn: LogConnection) -> dict:
    out = {"sign": conn.sign, "charts": {}}
    for k in conn.cones():
        form = conn[k]
        chart = {"log": [], "hol": []}
        for m in form.log_part:
            if m.is_constant():
                chart["log"].append([[format_rational(x) for x in row] for row in m.constant_values()])
            else:
                chart["log"].append([[_poly_terms(p) for p in row] for row in m.entries()])
        for m in form.hol_part:
            chart["hol"].append([[_poly_terms(p) for p in row] for row in m.entries()])
        out["charts"][str(k)] = chart
    return out
