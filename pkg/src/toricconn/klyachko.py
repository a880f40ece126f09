"""Torus-equivariant vector bundles from per-ray filtrations.

Conventions (shared with :mod:`toricconn.connection`):

* ``E^rho(i)`` is the span of all listed vectors whose jump is ``>= i``.
* A cone decomposition assigns each frame vector ``e_a`` a character ``u_a``
  with ``<u_a, v_rho> = `` the jump of ``e_a`` at every ray ``rho`` of the cone.
* The local equivariant frame on chart ``sigma`` is ``s_a = chi^{-u_a} e_a``,
  where ``e_a`` is regarded as a section constant along torus orbits. For a
  line bundle with jumps ``a_rho`` this is the bundle ``O(sum_rho a_rho D_rho)``.
* Transitions satisfy ``s^tau_b = sum_a s^sigma_a g[a][b]``, hence
  ``g[a][b] = C[a][b] chi^{u_a(sigma) - u_b(tau)}`` with ``C`` the change of
  basis from the ``tau`` eigenbasis to the ``sigma`` eigenbasis, and
  ``g_{sigma upsilon} = g_{sigma tau} g_{tau upsilon}``.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from . import exact
from .errors import CocycleFailure, IncompatibleFiltrations, NoCoboundary, NotSplit, ParseError
from .exact import linalg
from .exact.laurent import LaurentMatrix, LaurentPoly
from .exact.rational import format_rational, parse_int, parse_rational
from .fan import Atlas, Fan

Vector = Tuple[Fraction, ...]


@dataclass(frozen=True)
class KlyachkoData:
    """Per-ray decreasing filtrations of ``Q^rank``.

    ``filtrations[ray]`` is a tuple of ``(jump, vectors)`` pairs with strictly
    decreasing jumps.
    """

    rank: int
    filtrations: Mapping[int, Tuple[Tuple[int, Tuple[Vector, ...]], ...]]
    name: str = ""

    def __post_init__(self):
        if self.rank < 1:
            raise ParseError("bundle rank must be positive")
        clean = {}
        for ray, steps in self.filtrations.items():
            steps = tuple((int(j), tuple(linalg.as_vector(v) for v in vecs)) for j, vecs in steps)
            if not steps:
                raise ParseError(f"ray {ray}: empty filtration")
            jumps = [j for j, _ in steps]
            if any(a <= b for a, b in zip(jumps, jumps[1:])):
                raise ParseError(f"ray {ray}: jumps {jumps} are not strictly decreasing")
            for j, vecs in steps:
                if any(len(v) != self.rank for v in vecs):
                    raise ParseError(f"ray {ray}, jump {j}: vector length differs from rank {self.rank}")
            clean[int(ray)] = steps
        object.__setattr__(self, "filtrations", clean)
        for ray in clean:
            dims = [len(self.subspace(ray, j)) for j in self.jumps(ray)]
            if any(a >= b for a, b in zip(dims, dims[1:])):
                raise ParseError(f"ray {ray}: spans {dims} are not strictly decreasing across jumps")
            if dims[-1] != self.rank:
                raise ParseError(f"ray {ray}: the lowest step spans dimension {dims[-1]}, not {self.rank}")

    def jumps(self, ray: int) -> List[int]:
        """Listed jumps, decreasing."""
        return [j for j, _ in self.filtrations[ray]]

    def subspace(self, ray: int, i: int) -> Tuple[Vector, ...]:
        vecs = [v for j, vs in self.filtrations[ray] if j >= i for v in vs]
        return linalg.rref(vecs, self.rank)

    def jump_multiset(self, ray: int) -> List[int]:
        """Each jump ``i`` repeated ``dim E(i) - dim E(i+1)`` times, ascending."""
        out = []
        for j in self.jumps(ray):
            out += [j] * (len(self.subspace(ray, j)) - len(self.subspace(ray, j + 1)))
        return sorted(out)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "filtrations": {
                str(ray): [
                    {"jump": j, "vectors": [[format_rational(x) for x in v] for v in vecs]} for j, vecs in steps
                ]
                for ray, steps in sorted(self.filtrations.items())
            },
        }


def bundle_from_json(obj, fan: Fan, name: str = "") -> KlyachkoData:
    """Parse the filtration format or the rank-1 ``cartier`` shorthand."""
    if not isinstance(obj, dict):
        raise ParseError("bundle JSON must be an object")
    if "cartier" in obj:
        cartier = obj["cartier"]
        if not isinstance(cartier, dict):
            raise ParseError("cartier data must map cone indices to weight vectors")
        weights = {}
        for key, u in cartier.items():
            cone = _parse_index(key, len(fan.cones), "cone")
            if not isinstance(u, list) or len(u) != fan.rank:
                raise ParseError(f"cartier weight for cone {cone} must have length {fan.rank}")
            weights[cone] = tuple(parse_int(x) for x in u)
        return from_cartier(fan, weights, name=name)
    if "rank" not in obj or "filtrations" not in obj:
        raise ParseError("bundle JSON needs 'rank' and 'filtrations' (or 'cartier')")
    rank = parse_int(obj["rank"])
    raw = obj["filtrations"]
    if not isinstance(raw, dict):
        raise ParseError("filtrations must map ray indices to step lists")
    filtrations = {}
    for key, steps in raw.items():
        ray = _parse_index(key, len(fan.rays), "ray")
        if not isinstance(steps, list):
            raise ParseError(f"ray {ray}: steps must be a list")
        parsed = []
        for step in steps:
            if not isinstance(step, dict) or set(step) != {"jump", "vectors"}:
                raise ParseError(f"ray {ray}: each step needs exactly 'jump' and 'vectors'")
            vecs = step["vectors"]
            if not isinstance(vecs, list) or not all(isinstance(v, list) for v in vecs):
                raise ParseError(f"ray {ray}: vectors must be a list of lists")
            parsed.append((parse_int(step["jump"]), tuple(tuple(parse_rational(x) for x in v) for v in vecs)))
        filtrations[ray] = tuple(parsed)
    return KlyachkoData(rank, filtrations, name=name)


def _parse_index(key, bound: int, what: str) -> int:
    try:
        k = int(key)
    except (TypeError, ValueError):
        raise ParseError(f"{what} index {key!r} is not an integer") from None
    if str(k) != str(key).strip() or not 0 <= k < bound:
        raise ParseError(f"{what} index {key!r} out of range")
    return k


# -- standard bundles ------------------------------------------------------------


def _standard_basis(r: int) -> Tuple[Vector, ...]:
    return tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r))


def line_bundle(fan: Fan, jumps: Sequence[int], name: str = "") -> KlyachkoData:
    """``O(sum_rho jumps[rho] D_rho)`` as rank-1 filtration data."""
    if len(jumps) != len(fan.rays):
        raise ParseError(f"need one jump per ray ({len(fan.rays)}), got {len(jumps)}")
    return KlyachkoData(1, {k: ((int(a), ((Fraction(1),),)),) for k, a in enumerate(jumps)}, name=name)


def from_cartier(fan: Fan, weights: Mapping[int, Sequence[int]], name: str = "") -> KlyachkoData:
    """Line bundle whose local weight on cone ``sigma`` is ``weights[sigma]``."""
    missing = set(range(len(fan.cones))) - set(weights)
    if missing:
        raise ParseError(f"cartier data missing cones {sorted(missing)}")
    jumps = {}
    for cone, u in sorted(weights.items()):
        for ray in fan.cones[cone]:
            a = sum(x * y for x, y in zip(u, fan.rays[ray]))
            if jumps.setdefault(ray, a) != a:
                raise IncompatibleFiltrations(
                    f"cartier weights disagree on ray {ray}: {jumps[ray]} vs {a} from cone {cone}"
                )
    return line_bundle(fan, [jumps[k] for k in range(len(fan.rays))], name=name)


def trivial_bundle(fan: Fan, rank: int = 1, name: str = "") -> KlyachkoData:
    return KlyachkoData(rank, {k: ((0, _standard_basis(rank)),) for k in range(len(fan.rays))}, name=name)


def tangent_bundle(fan: Fan, name: str = "") -> KlyachkoData:
    """Jump 1 on the line through the ray generator, jump 0 on everything."""
    n = fan.rank
    filtrations = {}
    for k, v in enumerate(fan.rays):
        steps = [(1, (tuple(Fraction(x) for x in v),))]
        if n > 1:
            steps.append((0, _standard_basis(n)))
        filtrations[k] = tuple(steps)
    return KlyachkoData(n, filtrations, name=name)


def direct_sum(*summands: KlyachkoData, name: str = "") -> KlyachkoData:
    rank = sum(s.rank for s in summands)
    rays = set(summands[0].filtrations)
    if any(set(s.filtrations) != rays for s in summands):
        raise ParseError("summands are defined on different ray sets")
    filtrations = {}
    for ray in sorted(rays):
        by_jump: Dict[int, List[Vector]] = {}
        offset = 0
        for s in summands:
            for j, vecs in s.filtrations[ray]:
                for v in vecs:
                    full = [Fraction(0)] * rank
                    full[offset:offset + s.rank] = v
                    by_jump.setdefault(j, []).append(tuple(full))
            offset += s.rank
        filtrations[ray] = tuple((j, tuple(by_jump[j])) for j in sorted(by_jump, reverse=True))
    return KlyachkoData(rank, filtrations, name=name)


# -- cone decompositions -----------------------------------------------------------


@dataclass(frozen=True)
class ConeDecomposition:
    """Equivariant frame on one chart: ordered ``(weight, vector)`` pairs."""

    cone: int
    frame: Tuple[Tuple[Tuple[int, ...], Vector], ...]

    @property
    def weights(self) -> List[Tuple[int, ...]]:
        return [u for u, _ in self.frame]

    @property
    def vectors(self) -> List[Vector]:
        return [v for _, v in self.frame]

    @property
    def parts(self) -> List[Tuple[Tuple[int, ...], List[Vector]]]:
        """Frame vectors grouped by weight, in order of first appearance."""
        groups: Dict[Tuple[int, ...], List[Vector]] = {}
        for u, v in self.frame:
            groups.setdefault(u, []).append(v)
        return list(groups.items())

    def to_json(self) -> dict:
        return {
            "cone": self.cone,
            "weights": [list(u) for u in self.weights],
            "vectors": [[format_rational(x) for x in v] for v in self.vectors],
        }


def _pivot(v: Vector) -> int:
    return next(i for i, x in enumerate(v) if x != 0)


def solve_decomposition(data: KlyachkoData, atlas: Atlas, cone: int) -> ConeDecomposition:
    """Split ``Q^r`` into character eigenspaces compatible with every ray of ``cone``.

    Candidate jump tuples come from the product of the rays' jump sets. They
    are processed from the top of the partial order down; each contributes a
    complement of the span of strictly larger candidates inside its own
    intersection space. The result is verified against every filtration step,
    so a greedy choice can never yield an unsound answer.
    """
    fan = atlas.fan
    chart = atlas.charts[cone]
    rays = fan.cones[cone]
    missing = [r for r in rays if r not in data.filtrations]
    if missing:
        raise ParseError(f"bundle has no filtration for ray(s) {missing}")
    r = data.rank
    jumpsets = [data.jumps(ray) for ray in rays]
    spaces = {}
    for c in itertools.product(*jumpsets):
        s = tuple(linalg.as_vector(v) for v in _standard_basis(r))
        for ray, i in zip(rays, c):
            s = linalg.intersect(s, data.subspace(ray, i), r)
            if not s:
                break
        spaces[c] = s
    order = sorted(spaces, key=lambda c: (-sum(c), tuple(-x for x in c)))
    frame = []
    for c in order:
        s = spaces[c]
        if not s:
            continue
        above = [spaces[d] for d in spaces if d != c and all(x >= y for x, y in zip(d, c))]
        w = linalg.span_sum(*above, width=r)
        u = tuple(sum(c[j] * chart.dual_basis[j][k] for j in range(len(c))) for k in range(fan.rank))
        for v in linalg.complement(s, w, r):
            frame.append((u, v))
    frame.sort(key=lambda uv: _pivot(uv[1]))
    _verify_decomposition(data, atlas, cone, frame)
    return ConeDecomposition(cone, tuple(frame))


def _verify_decomposition(data, atlas, cone, frame):
    fan = atlas.fan
    r = data.rank
    vectors = [v for _, v in frame]
    if len(vectors) != r or linalg.rank(vectors) != r:
        raise IncompatibleFiltrations(
            f"cone {cone}: eigenspaces span {linalg.rank(vectors) if vectors else 0} of {r} dimensions"
            f" with {len(vectors)} vectors; filtrations are not compatible"
        )
    for pos, ray in enumerate(fan.cones[cone]):
        jumps = data.jumps(ray)
        for i in range(min(jumps) - 1, max(jumps) + 2):
            pairing = [
                v for u, v in frame if sum(u[k] * fan.rays[ray][k] for k in range(fan.rank)) >= i
            ]
            if linalg.rref(pairing, r) != data.subspace(ray, i):
                raise IncompatibleFiltrations(
                    f"cone {cone}: ray {ray} step {i} is not reconstructed by the eigenspace decomposition"
                )


def solve_all(data: KlyachkoData, atlas: Atlas) -> List[ConeDecomposition]:
    return [solve_decomposition(data, atlas, k) for k in atlas.cone_indices()]


# -- cocycles -------------------------------------------------------------------------


@dataclass
class Cocycle:
    """Transition matrices ``g[(sigma, tau)]`` in ``sigma`` chart coordinates.

    With ``torus_vars`` set, entries live in ``Q[x^{+-1}, t^{+-1}]`` with the
    ``n`` chart variables first and the ``n`` torus variables after them.
    """

    n: int
    rank: int
    matrices: Dict[Tuple[int, int], LaurentMatrix]
    torus_vars: bool = False

    @property
    def nvars(self) -> int:
        return 2 * self.n if self.torus_vars else self.n

    def __getitem__(self, pair) -> LaurentMatrix:
        return self.matrices[pair]

    def cones(self) -> List[int]:
        return sorted({s for s, _ in self.matrices})

    def rewrite(self, m: LaurentMatrix, src: int, dst: int, atlas: Atlas) -> LaurentMatrix:
        images = atlas.transitions[(dst, src)].images()
        if self.torus_vars:
            images = [p.embed(self.nvars) for p in images] + [
                LaurentPoly.variable(self.nvars, self.n + k) for k in range(self.n)
            ]
        return m.substitute(images)

    def is_diagonal(self) -> bool:
        return all(m.is_diagonal() for m in self.matrices.values())

    def to_json(self) -> dict:
        return {f"{s},{t}": m.to_strings(_names(self.n, self.torus_vars)) for (s, t), m in sorted(self.matrices.items())}


def _names(n: int, torus: bool):
    names = [f"x{i + 1}" for i in range(n)]
    if torus:
        names += [f"t{i + 1}" for i in range(n)]
    return names


def build_cocycle(decompositions: Sequence[ConeDecomposition], atlas: Atlas) -> Cocycle:
    n = atlas.n
    r = len(decompositions[0].frame)
    frames = {d.cone: d for d in decompositions}
    inverses = {k: linalg.inverse(_columns(d.vectors)) for k, d in frames.items()}
    matrices = {}
    for s, t in atlas.pairs():
        ds, dt = frames[s], frames[t]
        change = _matmul(inverses[s], _columns(dt.vectors))
        chart = atlas.charts[s]
        rows = []
        for a in range(r):
            row = []
            for b in range(r):
                diff = [x - y for x, y in zip(ds.weights[a], dt.weights[b])]
                row.append(chart.character(diff, change[a][b]) if change[a][b] else LaurentPoly.zero(n))
            rows.append(row)
        matrices[(s, t)] = LaurentMatrix(n, rows)
    return Cocycle(n, r, matrices)


def _columns(vectors: Sequence[Vector]) -> List[List[Fraction]]:
    r = len(vectors)
    return [[vectors[j][i] for j in range(r)] for i in range(r)]


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


@dataclass
class CocycleReport:
    pairs: int
    triples: int
    determinant_units: bool = True

    def to_json(self) -> dict:
        return {"pairs": self.pairs, "triples": self.triples, "determinant_units": self.determinant_units}


def _describe(m: LaurentMatrix, other: LaurentMatrix, names) -> str:
    diff = m.first_difference(other)
    if diff is None:
        return "no difference"
    i, j, a, b = diff
    return f"entry ({i}, {j}): {a.to_string(names)} != {b.to_string(names)}"


def check_cocycle(c: Cocycle, atlas: Atlas) -> CocycleReport:
    """Exact identity, inverse-pair and triple identities plus unit determinants."""
    names = _names(c.n, c.torus_vars)
    ident = LaurentMatrix.identity(c.nvars, c.rank)
    cones = c.cones()
    for s in cones:
        if c[(s, s)] != ident:
            raise CocycleFailure(f"g({s},{s}) is not the identity: {_describe(c[(s, s)], ident, names)}")
    pairs = 0
    for s in cones:
        for t in cones:
            prod = c[(s, t)] @ c.rewrite(c[(t, s)], t, s, atlas)
            if prod != ident:
                raise CocycleFailure(
                    f"triple ({s}, {t}, {s}): g_st g_ts != g_ss = 1 at pair ({s}, {t}), {_describe(prod, ident, names)}"
                )
            if not c[(s, t)].det().is_unit():
                raise CocycleFailure(f"pair ({s}, {t}): det g_st = {c[(s, t)].det().to_string(names)} is not a unit")
            pairs += 1
    triples = 0
    for s in cones:
        for t in cones:
            for u in cones:
                prod = c[(s, t)] @ c.rewrite(c[(t, u)], t, s, atlas)
                if prod != c[(s, u)]:
                    raise CocycleFailure(
                        f"triple ({s}, {t}, {u}): g_st g_tu != g_su at pair ({s}, {t}), "
                        + _describe(prod, c[(s, u)], names)
                    )
                triples += 1
    return CocycleReport(pairs, triples)


def corrupt_cocycle(c: Cocycle, pair: Tuple[int, int], factor: LaurentPoly) -> Cocycle:
    """Multiply one transition matrix by ``factor``; used for negative controls."""
    matrices = dict(c.matrices)
    matrices[pair] = matrices[pair].map(lambda p: p * factor)
    return Cocycle(c.n, c.rank, matrices, c.torus_vars)


# -- torus pullback and the split-rank coboundary solve ------------------------------------


def pullback_by_torus(c: Cocycle, atlas: Atlas) -> Cocycle:
    """Substitute ``x_i -> chi^{m_i}(t) x_i`` chart by chart, with symbolic ``t``."""
    if c.torus_vars:
        raise ValueError("cocycle is already a pullback")
    n = c.n
    matrices = {}
    for (s, t), m in c.matrices.items():
        chart = atlas.charts[s]
        images = []
        for i in range(n):
            exp = [0] * (2 * n)
            exp[i] = 1
            exp[n:] = chart.dual_basis[i]
            images.append(LaurentPoly.monomial(exp))
        matrices[(s, t)] = m.substitute(images)
    return Cocycle(n, c.rank, matrices, torus_vars=True)


@dataclass
class CoboundaryWitness:
    """Per-cone diagonal units ``lambda_sigma(t)`` with ``pulled = lambda_s g lambda_t^-1``."""

    n: int
    scalings: Dict[int, LaurentMatrix]

    def exponents(self) -> Dict[int, List[Tuple[int, ...]]]:
        out = {}
        for k, m in self.scalings.items():
            out[k] = [m[a, a].leading()[0][self.n:] for a in range(m.rows)]
        return out

    def to_json(self) -> dict:
        names = _names(self.n, True)
        return {str(k): [m[a, a].to_string(names) for a in range(m.rows)] for k, m in sorted(self.scalings.items())}


def solve_coboundary_split(original: Cocycle, pulled: Cocycle) -> CoboundaryWitness:
    """Find ``lambda_sigma(t)`` exhibiting the pullback as isomorphic to the original.

    Exponents are found by an integer solve (Smith normal form) of
    ``w_sigma - w_tau = w_{sigma tau}``; the identity is then re-verified exactly.
    """
    if original.torus_vars or not pulled.torus_vars:
        raise ValueError("expected (original, pulled) cocycles in that order")
    for label, c in (("original", original), ("pulled", pulled)):
        for pair, m in sorted(c.matrices.items()):
            if not m.is_diagonal():
                raise NotSplit(f"{label} transition {pair} is not diagonal; only split cocycles are decided")
    n, r, nv = original.n, original.rank, pulled.nvars
    cones = original.cones()
    index = {k: pos for pos, k in enumerate(cones)}
    pairs = [(s, t) for s in cones for t in cones if s != t]
    scal: Dict[int, List[LaurentPoly]] = {k: [] for k in cones}
    for a in range(r):
        ratios = {}
        for s, t in pairs:
            g = original[(s, t)][a, a].embed(nv)
            if not g.is_unit():
                raise NotSplit(f"diagonal entry {a} of g({s},{t}) is not a unit")
            ratio = pulled[(s, t)][a, a] * g.inverse()
            if not ratio.is_unit() or any(ratio.leading()[0][:n]):
                raise NoCoboundary(
                    f"pair ({s}, {t}), entry {a}: pullback ratio {ratio.to_string(_names(n, True))} is not a character of t"
                )
            ratios[(s, t)] = ratio.leading()
        rows, rhs = [], []
        for s, t in pairs:
            exp = ratios[(s, t)][0][n:]
            for k in range(n):
                row = [0] * (len(cones) * n)
                row[index[s] * n + k] += 1
                row[index[t] * n + k] -= 1
                rows.append(row)
                rhs.append(exp[k])
        sol = exact.solve_integer(rows, rhs) if rows else [0] * (len(cones) * n)
        if sol is None:
            raise NoCoboundary(f"entry {a}: the t-exponents of the pullback ratios are not a coboundary")
        base = cones[0]
        for k in cones:
            coeff = Fraction(1) if k == base else ratios[(k, base)][1]
            exp = [0] * n + sol[index[k] * n:(index[k] + 1) * n]
            scal[k].append(LaurentPoly.monomial(exp, coeff))
    scalings = {k: LaurentMatrix.diagonal(nv, v) for k, v in scal.items()}
    for s, t in [(s, t) for s in cones for t in cones]:
        lhs = scalings[s] @ original[(s, t)].embed(nv) @ scalings[t].inverse()
        if lhs != pulled[(s, t)]:
            raise NoCoboundary(f"pair ({s}, {t}): lambda_s g lambda_t^-1 does not reproduce the pullback")
    return CoboundaryWitness(n, scalings)


# -- determinant line ---------------------------------------------------------------------


def determinant_weights(decompositions: Sequence[ConeDecomposition]) -> Dict[int, Tuple[int, ...]]:
    """Cartier weights of ``det E``: the sum of frame weights on each cone."""
    out = {}
    for d in decompositions:
        n = len(d.weights[0])
        out[d.cone] = tuple(sum(u[k] for u in d.weights) for k in range(n))
    return out


def determinant_divisor(decompositions: Sequence[ConeDecomposition], fan: Fan) -> List[int]:
    """Coefficients ``a_rho`` with ``det E = O(sum a_rho D_rho)``."""
    weights = determinant_weights(decompositions)
    out = []
    for ray, v in enumerate(fan.rays):
        cone = fan.cones_containing(ray)[0]
        out.append(sum(x * y for x, y in zip(weights[cone], v)))
    return out
