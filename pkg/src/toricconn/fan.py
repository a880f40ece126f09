"""Smooth complete fans, their affine charts and monomial chart transitions.

Chart ``sigma`` has coordinates ``x_i = chi^{m_i}`` where the rows ``m_i`` of the
dual basis satisfy ``<m_i, v_j> = delta_ij`` for the rays ``v_j`` of ``sigma``,
taken in the order the cone lists them. A character ``u`` restricts to the
monomial with exponent vector ``(<u, v_1>, ..., <u, v_n>)`` in that chart.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import (
    FanError,
    IncompleteFan,
    NonPrimitiveRay,
    NonSmoothCone,
    ParseError,
    RayNotInCone,
)
from .exact.lattice import int_det, matmul, transpose, unimodular_inverse
from .exact.laurent import LaurentMatrix, LaurentPoly
from .exact.rational import parse_int

IntVec = Tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: Tuple[IntVec, ...]
    cones: Tuple[Tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "cones", tuple(tuple(int(i) for i in c) for c in self.cones))

    def ray_matrix(self, cone: int) -> List[List[int]]:
        """Columns are the ray generators of the cone, in cone order."""
        return transpose([self.rays[i] for i in self.cones[cone]])

    def cones_containing(self, ray: int) -> List[int]:
        return [k for k, c in enumerate(self.cones) if ray in c]

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}


def fan_from_json(obj, name: str = "") -> Fan:
    """Parse ``{"rank": n, "rays": [[ints]], "cones": [[ray indices]]}``."""
    if not isinstance(obj, dict):
        raise ParseError("fan JSON must be an object")
    missing = {"rank", "rays", "cones"} - obj.keys()
    if missing:
        raise ParseError(f"fan JSON missing keys: {sorted(missing)}")
    rank = parse_int(obj["rank"])
    if not isinstance(obj["rays"], list) or not isinstance(obj["cones"], list):
        raise ParseError("rays and cones must be lists")
    rays = []
    for r in obj["rays"]:
        if not isinstance(r, list):
            raise ParseError(f"ray {r!r} is not a list")
        rays.append(tuple(parse_int(x) for x in r))
    cones = []
    for c in obj["cones"]:
        if not isinstance(c, list):
            raise ParseError(f"cone {c!r} is not a list")
        cones.append(tuple(parse_int(x) for x in c))
    name = obj.get("name", name)
    if not isinstance(name, str):
        raise ParseError("fan name must be a string")
    return Fan(rank, tuple(rays), tuple(cones), name=name)


@dataclass
class ValidationReport:
    primitive: Dict[int, bool]
    determinants: Dict[int, int]
    complete: bool
    facets_checked: int
    directions_checked: int
    simple_normal_crossing: str = "derived: smooth fan, boundary divisor is simple normal crossing"

    @property
    def ok(self) -> bool:
        return all(self.primitive.values()) and all(abs(d) == 1 for d in self.determinants.values()) and self.complete

    def to_json(self) -> dict:
        return {
            "primitive": {str(k): v for k, v in sorted(self.primitive.items())},
            "determinants": {str(k): v for k, v in sorted(self.determinants.items())},
            "complete": self.complete,
            "facets_checked": self.facets_checked,
            "directions_checked": self.directions_checked,
            "simple_normal_crossing": self.simple_normal_crossing,
        }


def _check_structure(f: Fan):
    n = f.rank
    if n < 1:
        raise FanError("rank must be positive")
    if not f.rays or not f.cones:
        raise FanError("a fan needs rays and maximal cones")
    for k, r in enumerate(f.rays):
        if len(r) != n:
            raise FanError(f"ray {k} has length {len(r)}, expected {n}")
    seen = {}
    for k, r in enumerate(f.rays):
        if r in seen:
            raise FanError(f"ray {k} duplicates ray {seen[r]}")
        seen[r] = k
    seen_cones = set()
    for k, c in enumerate(f.cones):
        if len(c) != n:
            raise FanError(f"cone {k} has {len(c)} rays; maximal cones of a simplicial fan of rank {n} need {n}")
        if len(set(c)) != n:
            raise FanError(f"cone {k} repeats a ray")
        if any(not 0 <= i < len(f.rays) for i in c):
            raise FanError(f"cone {k} refers to a missing ray")
        key = frozenset(c)
        if key in seen_cones:
            raise FanError(f"cone {k} is listed twice")
        seen_cones.add(key)


def _directions(n: int):
    span = 2 if n <= 3 else 1
    for v in itertools.product(range(-span, span + 1), repeat=n):
        if any(v):
            yield v
    for k in range(1, 5):
        yield tuple((7 * k * (i + 1) + 3 * i * i) % 11 - 5 for i in range(n))


def _check_completeness(f: Fan, duals) -> Tuple[int, int]:
    n = f.rank
    facets: Dict[frozenset, List[int]] = {}
    for k, c in enumerate(f.cones):
        for sub in itertools.combinations(c, n - 1):
            facets.setdefault(frozenset(sub), []).append(k)
    for facet, owners in sorted(facets.items(), key=lambda kv: sorted(kv[0])):
        if len(owners) != 2:
            raise IncompleteFan(
                f"facet spanned by rays {sorted(facet)} lies in {len(owners)} maximal cone(s) {owners}, expected 2"
            )
    # adjacency graph through shared facets
    reached = {0}
    frontier = [0]
    while frontier:
        k = frontier.pop()
        for owners in facets.values():
            if k in owners:
                for o in owners:
                    if o not in reached:
                        reached.add(o)
                        frontier.append(o)
    if len(reached) != len(f.cones):
        missing = sorted(set(range(len(f.cones))) - reached)
        raise IncompleteFan(f"maximal cones {missing} are not connected to cone 0 through shared facets")
    count = 0
    for w in _directions(n):
        count += 1
        coords = [[sum(row[j] * w[j] for j in range(n)) for row in m] for m in duals]
        inside = [k for k, c in enumerate(coords) if all(x >= 0 for x in c)]
        interior = [k for k, c in enumerate(coords) if all(x > 0 for x in c)]
        if not inside:
            raise IncompleteFan(f"direction {list(w)} lies in no maximal cone")
        if interior and len(inside) > 1:
            raise IncompleteFan(
                f"direction {list(w)} is interior to cone {interior[0]} but also lies in cones {inside}"
            )
    return len(facets), count


def validate_fan(f: Fan) -> ValidationReport:
    """Check primitivity, smoothness and completeness; raise on the first failure."""
    _check_structure(f)
    primitive = {}
    for k, r in enumerate(f.rays):
        g = math.gcd(*r)
        primitive[k] = g == 1
        if g != 1:
            raise NonPrimitiveRay(f"ray {k} {list(r)} is not primitive (gcd {g})")
    dets = {}
    for k in range(len(f.cones)):
        d = int_det(f.ray_matrix(k))
        dets[k] = d
        if abs(d) != 1:
            raise NonSmoothCone(f"cone {k} {list(f.cones[k])} has determinant {d}, expected +-1")
    duals = [unimodular_inverse(f.ray_matrix(k)) for k in range(len(f.cones))]
    nfacets, ndirs = _check_completeness(f, duals)
    return ValidationReport(primitive, dets, True, nfacets, ndirs)


@dataclass(frozen=True)
class Chart:
    cone: int
    rays: Tuple[int, ...]
    ray_matrix: Tuple[IntVec, ...]
    dual_basis: Tuple[IntVec, ...]

    @property
    def n(self) -> int:
        return len(self.rays)

    def character_exponent(self, u: Sequence[int]) -> IntVec:
        """Exponent vector of ``chi^u`` in this chart: ``(<u, v_i>)_i``."""
        return tuple(sum(u[k] * self.ray_matrix[k][i] for k in range(self.n)) for i in range(self.n))

    def character(self, u: Sequence[int], coeff=1) -> LaurentPoly:
        return LaurentPoly.monomial(self.character_exponent(u), coeff)


@dataclass(frozen=True)
class TransitionMap:
    """``x^(target)_j = prod_i (x^(source)_i) ** exponent_matrix[i][j]``."""

    source: int
    target: int
    exponent_matrix: Tuple[IntVec, ...]

    def images(self) -> List[LaurentPoly]:
        """Target coordinates as monomials in source coordinates."""
        n = len(self.exponent_matrix)
        return [LaurentPoly.monomial([self.exponent_matrix[i][j] for i in range(n)]) for j in range(n)]


@dataclass
class Atlas:
    fan: Fan
    charts: List[Chart]
    transitions: Dict[Tuple[int, int], TransitionMap] = field(repr=False)

    @property
    def n(self) -> int:
        return self.fan.rank

    def cone_indices(self) -> range:
        return range(len(self.charts))

    def pairs(self):
        return [(s, t) for s in self.cone_indices() for t in self.cone_indices()]

    def rewrite(self, p: LaurentPoly, src: int, dst: int) -> LaurentPoly:
        """Express a function written in chart ``src`` coordinates in chart ``dst`` coordinates."""
        return p.substitute(self.transitions[(dst, src)].images())

    def rewrite_matrix(self, m: LaurentMatrix, src: int, dst: int) -> LaurentMatrix:
        images = self.transitions[(dst, src)].images()
        return m.substitute(images)


def build_atlas(f: Fan, validate: bool = True) -> Atlas:
    if validate:
        validate_fan(f)
    charts = []
    for k, cone in enumerate(f.cones):
        vmat = f.ray_matrix(k)
        mmat = unimodular_inverse(vmat)
        charts.append(
            Chart(k, tuple(cone), tuple(tuple(r) for r in vmat), tuple(tuple(r) for r in mmat))
        )
    transitions = {}
    for s, cs in enumerate(charts):
        for t, ct in enumerate(charts):
            # T[i][j] = <m_j^(t), v_i^(s)> = (M_t V_s)^T
            prod = transpose(matmul(ct.dual_basis, cs.ray_matrix))
            transitions[(s, t)] = TransitionMap(s, t, tuple(tuple(r) for r in prod))
    return Atlas(f, charts, transitions)


def divisor_chart_index(f: Fan, ray: int, cone: int) -> int:
    """Coordinate index ``i`` with ``D_ray = {x_i = 0}`` in the chart of ``cone``."""
    c = f.cones[cone]
    if ray not in c:
        raise RayNotInCone(f"ray {ray} is not a ray of cone {cone} {list(c)}")
    return c.index(ray)
