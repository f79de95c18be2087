"""Command-line entry point: ``cubeflow <command> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .cochains import IntCochain, cup
from .complex import CubicalComplex, build_torus_grid
from .experiments import CONFIGURATIONS
from .flow import flow_cochain
from .geometric import GeoCochain, GeometryError, intersect_cochain
from .products import ProductConfig, threshold_sweep
from .snf import cohomology


def _write_json(data, out: str | None) -> None:
    text = json.dumps(data, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load_geo(cx: CubicalComplex, path: str) -> GeoCochain:
    W = GeoCochain.load(cx, path)
    problems = W.validate_transverse()
    if problems:
        raise GeometryError(f"{path} is not transverse: " + "; ".join(problems))
    return W


def cmd_complex(args) -> int:
    if args.kind != "torus":
        raise SystemExit(f"unknown complex kind {args.kind!r}")
    dims = [int(k) for k in args.dims.split(",")]
    _write_json(build_torus_grid(dims).to_json(), args.output)
    return 0


def cmd_cup(args) -> int:
    cx = CubicalComplex.load(args.complex)
    a = IntCochain.load(cx, args.a)
    b = IntCochain.load(cx, args.b)
    _write_json(cup(a, b).to_json(), args.output)
    return 0


def cmd_cohomology(args) -> int:
    cx = CubicalComplex.load(args.complex)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["degree", "betti", "torsion"])
    for g in cohomology(cx):
        w.writerow([g.degree, g.betti, " ".join(map(str, g.torsion))])
    return 0


def cmd_intersect(args) -> int:
    cx = CubicalComplex.load(args.complex)
    _write_json(intersect_cochain(_load_geo(cx, args.w)).to_json(), args.output)
    return 0


def cmd_flow(args) -> int:
    cx = CubicalComplex.load(args.complex)
    Wt = flow_cochain(_load_geo(cx, args.w), args.t)
    _write_json(Wt.to_json(args.samples), args.output)
    return 0


def _report(rep, out: str | None) -> int:
    if out:
        path = Path(out)
        if path.suffix == ".json":
            rep.write_json(path)
        else:
            rep.write_csv(path)
            rep.write_json(path.with_suffix(".json"))
    for c in rep.checks:
        state = "fail: " + c.failure if c.failure else ("equal" if c.all_equal else "differs")
        print(f"t={c.t:g}: {state}")
    if rep.T_found is None:
        print("no threshold found on the grid")
        return 1
    print(f"T_found={rep.T_found:g} (stable over {len(rep.stability)} further samples)")
    return 0


def cmd_verify_main(args) -> int:
    cx = CubicalComplex.load(args.complex)
    W, V = _load_geo(cx, args.w), _load_geo(cx, args.v)
    cfg = ProductConfig(t_grid=ProductConfig.parse_grid(args.t_grid), workers=args.workers)
    return _report(threshold_sweep(W, V, cfg), args.out)


def cmd_demo(args) -> int:
    conf = CONFIGURATIONS[args.name]()
    if args.save:
        d = Path(args.save)
        d.mkdir(parents=True, exist_ok=True)
        conf.complex.save(d / "complex.json")
        conf.W.save(d / "W.json")
        conf.V.save(d / "V.json")
    print(f"{conf.name}: cI(W) = {intersect_cochain(conf.W).values}, cI(V) = {intersect_cochain(conf.V).values}")
    cfg = ProductConfig(t_grid=ProductConfig.parse_grid(args.t_grid), workers=args.workers)
    return _report(threshold_sweep(conf.W, conf.V, cfg), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubeflow", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("complex", help="build a cubical complex")
    c.add_argument("kind", choices=["torus"])
    c.add_argument("--dims", required=True, help="comma-separated subdivisions, e.g. 3,3")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_complex)

    c = sub.add_parser("cup", help="cup product of two cochains")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--complex", required=True)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cup)

    c = sub.add_parser("cohomology", help="integral cohomology as CSV")
    c.add_argument("complex")
    c.set_defaults(func=cmd_cohomology)

    c = sub.add_parser("intersect", help="intersection cochain of a geometric cochain")
    c.add_argument("w")
    c.add_argument("--complex", required=True)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_intersect)

    c = sub.add_parser("flow", help="sample the flowed carrier of a geometric cochain")
    c.add_argument("w")
    c.add_argument("--t", type=float, required=True)
    c.add_argument("--complex", required=True)
    c.add_argument("--samples", type=int, default=5)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_flow)

    c = sub.add_parser("verify-main", help="sweep t comparing flowed products with cup products")
    c.add_argument("--complex", required=True)
    c.add_argument("--w", required=True)
    c.add_argument("--v", required=True)
    c.add_argument("--t-grid", default="0:10:1")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out")
    c.set_defaults(func=cmd_verify_main)

    c = sub.add_parser("demo", help="run a shipped configuration")
    c.add_argument("name", choices=sorted(CONFIGURATIONS))
    c.add_argument("--t-grid", default="0:10:1")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--save", help="directory to write the complex and cochains to")
    c.add_argument("--out")
    c.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, ValueError, OSError) as exc:
        print(f"cubeflow: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
