"""Command line front end: ``toricconn verify --fan ... --bundle ...``."""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import library
from .errors import ParseError, ToricError
from .fan import Fan, fan_from_json
from .klyachko import KlyachkoData, bundle_from_json
from .pipeline import CHECK_GROUPS, PipelineOptions, parse_controls, run_pipeline

BUILTIN = "builtin:"


def _reject_float(text):
    raise ParseError(f"non-exact number {text!r}; use an integer or a \"p/q\" string")


def load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: malformed JSON: {e}") from None


def resolve_fan(source: str) -> Fan:
    if source.startswith(BUILTIN):
        return library.get_fan(source[len(BUILTIN):])
    return fan_from_json(load_json(source), name=Path(source).stem)


def resolve_bundle(source: str, fan: Fan) -> Tuple[KlyachkoData, dict]:
    if source.startswith(BUILTIN):
        fx = library.get_bundle(source[len(BUILTIN):], fan=fan.name)
        if fx.fan != fan.name:
            raise ParseError(f"built-in bundle {fx.key} belongs to fan {fx.fan}, not {fan.name}")
        data = fx.build(fan)
        return KlyachkoData(data.rank, data.filtrations, name=fx.key), parse_controls(fx.controls)
    obj = load_json(source)
    if not isinstance(obj, dict):
        raise ParseError("bundle JSON must be an object")
    controls = parse_controls(obj.get("controls"))
    name = obj.get("name", Path(source).stem)
    if not isinstance(name, str):
        raise ParseError("bundle name must be a string")
    body = {k: v for k, v in obj.items() if k not in ("controls", "name")}
    return bundle_from_json(body, fan, name=name), controls


def parse_checks(text: Optional[str]) -> frozenset:
    if text is None:
        return frozenset(CHECK_GROUPS)
    groups = frozenset(g.strip() for g in text.split(",") if g.strip())
    bad = groups - set(CHECK_GROUPS)
    if bad or not groups:
        raise ParseError(f"--checks takes a comma list from {','.join(CHECK_GROUPS)}; got {text!r}")
    return groups


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricconn", description="Exact checks for canonical log connections on toric bundles.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the verification pipeline on one fan and bundle")
    v.add_argument("--fan", help="fan JSON path or builtin:NAME")
    v.add_argument("--bundle", help="bundle JSON path or builtin:NAME (NAME may be FAN/BUNDLE)")
    v.add_argument("--report", help="write the JSON report to this path")
    v.add_argument("--checks", help=f"comma list from {','.join(CHECK_GROUPS)} (default: all)")
    v.add_argument("--list-builtins", action="store_true", help="print built-in fans and bundles and exit")
    return p


def _verify(args, out) -> int:
    if args.list_builtins:
        listing = library.listing()
        out.write("fans: " + ", ".join(listing["fans"]) + "\n")
        out.write("control fans: " + ", ".join(listing["control_fans"]) + "\n")
        out.write("bundles:\n" + "".join(f"  {k}\n" for k in listing["bundles"]))
        out.write("negative controls:\n" + "".join(f"  {k}\n" for k in listing["controls"]))
        return 0
    if not args.bundle:
        raise ParseError("--bundle is required")
    fan_source = args.fan
    if fan_source is None:
        # builtin:FAN/BUNDLE names its own fan
        if args.bundle.startswith(BUILTIN) and "/" in args.bundle:
            fan_source = BUILTIN + args.bundle[len(BUILTIN):].split("/", 1)[0]
        else:
            raise ParseError("--fan is required")
    checks = parse_checks(args.checks)
    fan = resolve_fan(fan_source)
    data, controls = resolve_bundle(args.bundle, fan)
    report = run_pipeline(fan, data, PipelineOptions(checks=checks, controls=controls))
    out.write(report.to_text())
    if args.report:
        Path(args.report).write_text(report.dumps(), encoding="utf-8")
    return report.exit_code


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _verify(args, out)
    except ToricError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
