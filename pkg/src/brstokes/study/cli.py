"""Command-line driver: ``brstokes {converge,robustness,infsup,mesh-info}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..mesh import build_shishkin_mesh, build_uniform_mesh, export_mesh, shishkin_transition
from ..reconstruction import ReconstructionVariant
from .convergence import StudyConfig, run_convergence
from .diagnostics import check_pressure_robustness, estimate_inf_sup
from .report import csv_text, write_study

VARIANT_CHOICES = ("br", "br-rt", "br-bdm")


def _floats(text):
    return [float(s) for s in text.split(",") if s.strip()]


def _ints(text):
    return [int(s) for s in text.split(",") if s.strip()]


def _variants(text):
    out = []
    for s in text.split(","):
        s = s.strip()
        if s not in VARIANT_CHOICES:
            raise argparse.ArgumentTypeError(f"variant must be one of {VARIANT_CHOICES}, got {s!r}")
        out.append(ReconstructionVariant.parse(s))
    return out


def _mesh(family, n, epsilon):
    if family == "uniform":
        return build_uniform_mesh(n)
    return build_shishkin_mesh(n, n, shishkin_transition(epsilon))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=1e-4, help="boundary layer parameter")
    common.add_argument("--nu", type=_floats, default=[1e-4], help="viscosity (comma list for robustness)")
    common.add_argument("--variant", type=_variants, default=[ReconstructionVariant.BDM1],
                        help="br, br-rt or br-bdm (comma list allowed)")
    common.add_argument("--mesh", choices=("uniform", "shishkin"), default="shishkin")
    common.add_argument("--levels", type=_ints, default=[8, 16, 32, 64], help="comma-separated n values")
    common.add_argument("--quad-degree", type=int, default=6, help="load quadrature degree")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="brstokes", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    conv = sub.add_parser("converge", parents=[common], help="run a convergence study")
    conv.add_argument("--case", choices=("boundary-layer", "smooth"), default="boundary-layer")
    conv.add_argument("--workers", type=int, default=1, help="solve levels in parallel processes")
    sub.add_parser("robustness", parents=[common], help="gradient-load robustness check")
    sub.add_parser("infsup", parents=[common], help="estimate the discrete inf-sup constant")
    sub.add_parser("mesh-info", parents=[common], help="print mesh statistics")
    return parser


def cmd_converge(args):
    results = {}
    base = None
    for variant in args.variant:
        config = StudyConfig(epsilon=args.epsilon, nu=args.nu[0], variant=variant,
                             mesh_family=args.mesh, levels=args.levels, quad_degree=args.quad_degree,
                             case=args.case, out=None, workers=args.workers)
        base = base or config
        records = run_convergence(config, write=False)
        results[variant.label] = records
        print(f"# {variant.label}")
        sys.stdout.write(csv_text(records))
    if args.out:
        write_study(args.out, results, replace(base, out=str(args.out)))
    return 0


def cmd_robustness(args):
    status = 0
    for variant in args.variant:
        for n in args.levels:
            mesh = _mesh(args.mesh, n, args.epsilon)
            rep = check_pressure_robustness(args.nu, variant, mesh, args.quad_degree)
            for e in rep.entries:
                print(f"{variant.label:7s} n={n:<4d} nu={e.nu:<8g} |u_h|_1h={e.velocity_h1:.3e}")
            verdict = "robust" if rep.robust else "not robust"
            print(f"{variant.label:7s} n={n:<4d} -> {verdict}")
            if not rep.passed:
                status = 1
    return status


def cmd_infsup(args):
    for n in args.levels:
        mesh = _mesh(args.mesh, n, args.epsilon)
        beta = estimate_inf_sup(mesh)
        text = "n/a" if beta is None else f"{beta:.6f}"
        print(f"{args.mesh} n={n:<4d} aspect_ratio={mesh.aspect_ratio:<10.4g} beta={text}")
    return 0


def cmd_mesh_info(args):
    for n in args.levels:
        mesh = _mesh(args.mesh, n, args.epsilon)
        print(f"{args.mesh} n={n}: vertices={mesh.n_vertices} triangles={mesh.n_triangles} "
              f"facets={mesh.n_facets} h_max={mesh.h_max:.6g} aspect_ratio={mesh.aspect_ratio:.6g}")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"mesh-{args.mesh}-{n}.txt").write_text(export_mesh(mesh))
    return 0


COMMANDS = {"converge": cmd_converge, "robustness": cmd_robustness, "infsup": cmd_infsup,
            "mesh-info": cmd_mesh_info}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
