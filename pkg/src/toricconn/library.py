"""Built-in fans and bundles.

The main library covers Picard rank 1 through 3 surfaces plus P^1. The
``controls`` entries are deliberately broken inputs used as negative controls;
they are listed separately and never counted as library bundles.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from . import klyachko as kl
from .errors import ParseError
from .fan import Fan


def _hirzebruch(a: int) -> Fan:
    return Fan(2, ((1, 0), (0, 1), (-1, a), (0, -1)), ((0, 1), (1, 2), (2, 3), (3, 0)), name=f"f{a}")


FANS: Dict[str, Fan] = {
    "p1": Fan(1, ((1,), (-1,)), ((0,), (1,)), name="p1"),
    "p2": Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2), (2, 0)), name="p2"),
    "p1xp1": Fan(2, ((1, 0), (0, 1), (-1, 0), (0, -1)), ((0, 1), (1, 2), (2, 3), (3, 0)), name="p1xp1"),
    "f1": _hirzebruch(1),
    "f2": _hirzebruch(2),
    "f3": _hirzebruch(3),
    "blowup_p2": Fan(2, ((1, 0), (1, 1), (0, 1), (-1, -1)), ((0, 1), (1, 2), (2, 3), (3, 0)), name="blowup_p2"),
}

CONTROL_FANS: Dict[str, Fan] = {
    "p3": Fan(
        3,
        ((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)),
        ((0, 1, 2), (1, 2, 3), (2, 3, 0), (3, 0, 1)),
        name="p3",
    ),
    "p2_nonsmooth": Fan(2, ((1, 0), (1, 2), (-1, -1)), ((0, 1), (1, 2), (2, 0)), name="p2_nonsmooth"),
}


@dataclass(frozen=True)
class BundleFixture:
    fan: str
    name: str
    build: Callable[[Fan], kl.KlyachkoData]
    split: bool
    controls: dict = field(default_factory=dict)
    expected_error: Optional[str] = None

    @property
    def key(self) -> str:
        return f"{self.fan}/{self.name}"


def _line(*jumps):
    return lambda f: kl.line_bundle(f, jumps)


def _sum(*jump_lists):
    return lambda f: kl.direct_sum(*(kl.line_bundle(f, j) for j in jump_lists))


def _incompatible_p3(f: Fan) -> kl.KlyachkoData:
    # three distinct lines in Q^2 on the three rays of cone 0: no common adapted basis
    lines = {0: (1, 0), 1: (0, 1), 2: (1, 1)}
    filtrations = {}
    for ray in range(len(f.rays)):
        steps = []
        if ray in lines:
            steps.append((1, (lines[ray],)))
        steps.append((0, ((1, 0), (0, 1))))
        filtrations[ray] = tuple(steps)
    return kl.KlyachkoData(2, filtrations)


def _library() -> List[BundleFixture]:
    out = []
    for k in range(-2, 3):
        out.append(BundleFixture("p1", f"O({k})", _line(0, k), True))
    out.append(BundleFixture("p1", "tangent", kl.tangent_bundle, True))
    out += [
        BundleFixture("p2", "O(-1)", _line(0, 0, -1), True),
        BundleFixture("p2", "O(1)", _line(0, 0, 1), True),
        BundleFixture("p2", "O(2)", _line(0, 0, 2), True),
        BundleFixture("p2", "tangent", kl.tangent_bundle, False),
        BundleFixture("p2", "O(1)+O(-1)", _sum((0, 0, 1), (0, 0, -1)), True),
        BundleFixture("p2", "trivial2", lambda f: kl.trivial_bundle(f, 2), True),
        BundleFixture("p1xp1", "O(1,0)", _line(0, 0, 1, 0), True),
        BundleFixture("p1xp1", "O(0,1)", _line(0, 0, 0, 1), True),
        BundleFixture("p1xp1", "O(1,-1)", _line(0, 0, 1, -1), True),
        BundleFixture("p1xp1", "O(2,3)", _line(0, 0, 2, 3), True),
        BundleFixture("p1xp1", "O(1,0)+O(0,-1)", _sum((0, 0, 1, 0), (0, 0, 0, -1)), True),
        BundleFixture("p1xp1", "tangent", kl.tangent_bundle, True),
    ]
    for a in (1, 2, 3):
        out += [
            BundleFixture(f"f{a}", "O(D2)", _line(0, 0, 1, 0), True),
            BundleFixture(f"f{a}", "O(D3)", _line(0, 0, 0, 1), True),
            BundleFixture(f"f{a}", "O(D2-D3)", _line(0, 0, 1, -1), True),
            BundleFixture(f"f{a}", "tangent", kl.tangent_bundle, False),
        ]
    out += [
        BundleFixture("blowup_p2", "O(E)", _line(0, 1, 0, 0), True),
        BundleFixture("blowup_p2", "O(H)", _line(0, 0, 0, 1), True),
        BundleFixture("blowup_p2", "tangent", kl.tangent_bundle, False),
    ]
    return out


def _controls() -> List[BundleFixture]:
    return [
        BundleFixture(
            "p1",
            "corrupted-cocycle",
            _line(0, 1),
            True,
            controls={"corrupt_cocycle": {"pair": [0, 1], "factor": "2"}},
            expected_error="CocycleFailure",
        ),
        BundleFixture(
            "p2",
            "perturbed-weight",
            kl.tangent_bundle,
            False,
            controls={"perturb_weight": {"cone": 1, "index": 0, "delta": [1, 0]}},
            expected_error="FlatFrameFailure",
        ),
        BundleFixture("p3", "incompatible", _incompatible_p3, False, expected_error="IncompatibleFiltrations"),
        BundleFixture("p2_nonsmooth", "trivial", lambda f: kl.trivial_bundle(f, 1), True, expected_error="NonSmoothCone"),
    ]


LIBRARY: List[BundleFixture] = _library()
CONTROLS: List[BundleFixture] = _controls()


def get_fan(name: str) -> Fan:
    if name in FANS:
        return FANS[name]
    if name in CONTROL_FANS:
        return CONTROL_FANS[name]
    raise ParseError(f"unknown built-in fan {name!r}; try --list-builtins")


def get_bundle(name: str, fan: Optional[str] = None) -> BundleFixture:
    """Look up ``fan/name``, or ``name`` relative to the given fan."""
    if "/" not in name and fan is not None:
        name = f"{fan}/{name}"
    for fx in LIBRARY + CONTROLS:
        if fx.key == name:
            return fx
    raise ParseError(f"unknown built-in bundle {name!r}; try --list-builtins")


def build(fixture: BundleFixture) -> kl.KlyachkoData:
    f = get_fan(fixture.fan)
    data = fixture.build(f)
    return kl.KlyachkoData(data.rank, data.filtrations, name=fixture.key)


def listing() -> dict:
    return {
        "fans": sorted(FANS),
        "control_fans": sorted(CONTROL_FANS),
        "bundles": [fx.key for fx in LIBRARY],
        "controls": [fx.key for fx in CONTROLS],
    }
