"""End-to-end verification of one bundle on one fan."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional

from . import connection as conn_mod
from . import klyachko as kl
from .errors import NotSplit, ParseError, ToricError
from .exact.laurent import LaurentPoly
from .exact.rational import parse_int, parse_rational
from .fan import Fan, build_atlas, validate_fan
from .logtangent import check_lemma1

CHECK_GROUPS = ("lemma1", "cocycle", "connection", "prop3")


@dataclass
class PipelineOptions:
    checks: FrozenSet[str] = frozenset(CHECK_GROUPS)
    controls: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    fan: str
    bundle: str
    checks: Dict[str, dict]
    failures: List[ToricError]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return self.failures[0].exit_code if self.failures else 0

    def to_json(self) -> dict:
        return {
            "fan": self.fan,
            "bundle": self.bundle,
            "checks": self.checks,
            "verdict": "pass" if self.passed else "fail",
            "exit_code": self.exit_code,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"fan {self.fan}  bundle {self.bundle}"]
        for name, res in self.checks.items():
            status = res["status"].upper()
            line = f"  [{status:7}] {name}"
            if "summary" in res:
                line += f": {res['summary']}"
            if res["status"] == "fail":
                line += f": {res['error']}: {res['message']}"
            if res["status"] == "skipped":
                line += f": {res['reason']}"
            lines.append(line)
        lines.append(f"verdict: {'PASS' if self.passed else 'FAIL'} (exit {self.exit_code})")
        return "\n".join(lines) + "\n"


def parse_controls(obj) -> dict:
    """Validate the negative-control directives a bundle file may carry."""
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ParseError("controls must be an object")
    out = {}
    for key, spec in obj.items():
        if key == "corrupt_cocycle":
            pair = spec.get("pair") if isinstance(spec, dict) else None
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError("corrupt_cocycle needs a two-element 'pair'")
            out[key] = {"pair": [parse_int(pair[0]), parse_int(pair[1])], "factor": parse_rational(spec.get("factor", 2))}
        elif key == "perturb_weight":
            if not isinstance(spec, dict) or not isinstance(spec.get("delta"), list):
                raise ParseError("perturb_weight needs 'cone', 'index' and a 'delta' list")
            out[key] = {
                "cone": parse_int(spec.get("cone")),
                "index": parse_int(spec.get("index")),
                "delta": [parse_int(x) for x in spec["delta"]],
            }
        else:
            raise ParseError(f"unknown control {key!r}")
    return out


def _perturb(decompositions, spec) -> List[kl.ConeDecomposition]:
    out = []
    for d in decompositions:
        if d.cone != spec["cone"]:
            out.append(d)
            continue
        frame = list(d.frame)
        u, v = frame[spec["index"]]
        frame[spec["index"]] = (tuple(a + b for a, b in zip(u, spec["delta"])), v)
        out.append(kl.ConeDecomposition(d.cone, tuple(frame)))
    return out


def _distinct(atlas) -> int:
    k = len(atlas.charts)
    return k * (k - 1)


class _Runner:
    def __init__(self):
        self.checks: Dict[str, dict] = {}
        self.failures: List[ToricError] = []

    def run(self, name: str, fn: Callable[[], Optional[dict]]) -> bool:
        try:
            detail = fn() or {}
        except NotSplit as e:
            self.checks[name] = {"status": "skipped", "reason": str(e)}
            return False
        except ToricError as e:
            self.checks[name] = {
                "status": "fail",
                "error": type(e).__name__,
                "message": str(e),
                "exit_code": e.exit_code,
            }
            self.failures.append(e)
            return False
        self.checks[name] = {"status": "pass", **detail}
        return True


def run_pipeline(fan: Fan, data: kl.KlyachkoData, options: PipelineOptions = None) -> VerificationReport:
    """validate fan, atlas, Lemma-1 checks, decompositions, cocycle, connection checks, split-rank pullback."""
    options = options or PipelineOptions()
    unknown = set(options.checks) - set(CHECK_GROUPS)
    if unknown:
        raise ParseError(f"unknown check group(s) {sorted(unknown)}; choose from {list(CHECK_GROUPS)}")
    controls = options.controls
    r = _Runner()
    state = {}

    def fan_stage():
        rep = validate_fan(fan)
        state["atlas"] = build_atlas(fan, validate=False)
        return {"summary": f"{len(fan.rays)} rays, {len(fan.cones)} smooth maximal cones, complete", **rep.to_json()}

    if not r.run("fan", fan_stage):
        return VerificationReport(fan.name, data.name, r.checks, r.failures)
    atlas = state["atlas"]

    if "lemma1" in options.checks:
        def lemma1_stage():
            rep = check_lemma1(atlas)
            return {"summary": f"|det beta| = 1 on {len(rep.determinants)} cones, columns transport over {_distinct(atlas)} chart pairs", **rep.to_json()}

        r.run("lemma1", lemma1_stage)

    def decomposition_stage():
        state["decomps"] = kl.solve_all(data, atlas)
        return {
            "summary": f"rank {data.rank} on {len(state['decomps'])} cones",
            "cones": [d.to_json() for d in state["decomps"]],
        }

    if not r.run("decomposition", decomposition_stage):
        return VerificationReport(fan.name, data.name, r.checks, r.failures)
    decomps = state["decomps"]

    cocycle = kl.build_cocycle(decomps, atlas)
    if "corrupt_cocycle" in controls:
        spec = controls["corrupt_cocycle"]
        cocycle = kl.corrupt_cocycle(
            cocycle, tuple(spec["pair"]), LaurentPoly.constant(atlas.n, Fraction(spec["factor"]))
        )

    if "cocycle" in options.checks:
        def cocycle_stage():
            rep = kl.check_cocycle(cocycle, atlas)
            return {"summary": f"{_distinct(atlas)} chart pairs, {rep.triples} triples exact", **rep.to_json()}

        r.run("cocycle", cocycle_stage)

    if "connection" in options.checks:
        conn_decomps = _perturb(decomps, controls["perturb_weight"]) if "perturb_weight" in controls else decomps
        conn = conn_mod.canonical_connection(conn_decomps, atlas)

        def gauge_stage():
            rep = conn_mod.check_gauge_law(conn, cocycle, atlas)
            return {"summary": f"{rep.to_json()['distinct_pairs']} ordered chart pairs exact", **rep.to_json()}

        def curvature_stage():
            curv = conn_mod.check_integrability(conn)
            return {"summary": f"F = 0 on {len(curv)} charts", "charts": sorted(curv)}

        def flat_stage():
            rep = conn_mod.flat_frame_check(conn, decomps, atlas)
            return {"summary": f"{rep.sections} frame sections flat on {len(rep.charts)} charts", **rep.to_json()}

        def residue_stage():
            spec = conn_mod.residues(conn, atlas)
            conn_mod.check_residue_jumps(spec, data, conn.sign)
            state["spectrum"] = spec
            return {"summary": f"{len(spec.eigenvalues)} divisors, chart independent, match signed jumps", "rays": spec.to_json()}

        def chern_stage():
            if "spectrum" not in state:
                raise conn_mod.ResidueMismatch("residue spectrum unavailable")
            rep = conn_mod.check_first_chern(state["spectrum"], decomps, atlas, conn.sign)
            return {"summary": "sum tr(Res) D = sign * det E as classes", **rep.to_json()}

        r.run("gauge", gauge_stage)
        r.run("curvature", curvature_stage)
        r.run("flat_frame", flat_stage)
        r.run("residues", residue_stage)
        r.run("first_chern", chern_stage)
        r.checks["export"] = {"status": "pass", "connection": conn_mod.export_connection(conn)}

    if "prop3" in options.checks:
        def prop3_stage():
            if not cocycle.is_diagonal():
                raise NotSplit("cocycle is not diagonal; split-rank check does not apply")
            pulled = kl.pullback_by_torus(cocycle, atlas)
            witness = kl.solve_coboundary_split(cocycle, pulled)
            return {"summary": "pullback isomorphic to original via per-cone t-monomials", "scalings": witness.to_json()}

        r.run("prop3", prop3_stage)

    return VerificationReport(fan.name, data.name, r.checks, r.failures)
