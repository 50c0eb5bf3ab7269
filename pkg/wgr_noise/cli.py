"""
Command-line front end: mode profiles, single solves, noise budgets, scans and validation.

Exit status: 0 success, 1 configuration error, 2 validation failure, 3 partial scan failure.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import msgspec

from wgr_noise.common import configure_logging, load_environment
from wgr_noise.config import RefinementConfig, ScanConfig, scan_config_from_dict
from wgr_noise.constants import EXIT_CONFIG_ERROR
from wgr_noise.constants import EXIT_OK
from wgr_noise.constants import EXIT_PARTIAL_FAILURE
from wgr_noise.constants import EXIT_VALIDATION_FAILURE
from wgr_noise.elastostatics.loads import bb_surface_load
from wgr_noise.elastostatics.loads import eo_volumetric_load
from wgr_noise.elastostatics.loads import uniform_pressure_load
from wgr_noise.elastostatics.export import export_mesh
from wgr_noise.elastostatics.mesh import build_mesh
from wgr_noise.elastostatics.solver import StaticSolver, set_threads, solve_static
from wgr_noise.errors import ConfigError, WgrNoiseError
from wgr_noise.materials import properties_at, resolve_material
from wgr_noise.modes import minor_radius
from wgr_noise.parsing.config import MAP_EO_MODE, load_config_dict
from wgr_noise.scan import ScanRunner, emit_figure_data, geometry_of, mode_for, run_scan
from wgr_noise.validation import validate

LOADS = ("bb", "eo", "pressure")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--material", help="bundled material name or material file")
    common.add_argument("--config", type=Path, help="scan configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--refine", type=int, help="refinement level")
    common.add_argument("--eo-mode", choices=sorted(MAP_EO_MODE), help="EO combination mode")
    common.add_argument("--gamma", type=float, help="thermorefractive geometry factor")
    common.add_argument("--threads", type=int, help="assembly threads")
    common.add_argument("--log-level", help="logging level (default INFO)")

    geometry = argparse.ArgumentParser(add_help=False)
    geometry.add_argument("--shape", choices=["sphere", "disk"], default="sphere")
    geometry.add_argument("-R", "--radius", type=float, help="major radius (m)")
    geometry.add_argument("-S", "--curvature", type=float, help="disk rim radius (m)")
    geometry.add_argument("--thickness", type=float, help="disk thickness (m)")
    geometry.add_argument(
        "--supplied",
        action="store_true",
        help="use the tabulated mode of this geometry instead of the estimate",
    )

    parser = argparse.ArgumentParser(
        prog="wgr-noise",
        description="Thermal-noise floor of crystalline whispering-gallery resonators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mode", parents=[common, geometry], help="print the fundamental mode")

    strain = sub.add_parser("strain", parents=[common, geometry], help="one elastostatic solve")
    strain.add_argument("--load", choices=LOADS, default="bb")
    strain.add_argument("--amplitude", type=float, help="load amplitude (Pa or N m^-3)")
    strain.add_argument("--export", type=Path, help="write mesh and displacement here")

    budget = sub.add_parser("budget", parents=[common, geometry], help="single noise budget")
    budget.add_argument("-T", "--temperature", type=float, default=5.5, help="temperature (K)")
    budget.add_argument("--tau", type=float, default=1.0, help="averaging time (s)")

    sub.add_parser("scan", parents=[common], help="scan a configuration to CSV")
    sub.add_parser("figdata", parents=[common], help="write plot series of a configuration")
    check = sub.add_parser("validate", parents=[common], help="run the oracle checks")
    check.add_argument("--no-fem", action="store_true", help="skip finite-element checks")
    return parser


def resolve_config(args: argparse.Namespace, env: dict[str, str | None]) -> ScanConfig:
    """
    Scan configuration from ``--config`` (if any), a geometry given on the command line, the
    environment and the flags, in increasing precedence.
    """
    data: dict[str, Any] = load_config_dict(args.config) if args.config else {}
    if getattr(args, "radius", None) is not None:
        entry = {
            "shape": args.shape,
            "R": args.radius,
            "S": args.curvature,
            "thickness": args.thickness,
        }
        data["geometries"] = [{k: v for k, v in entry.items() if v is not None}]
        if args.supplied:
            data["mode_source"] = "supplied"
    if getattr(args, "temperature", None) is not None:
        data["temperatures"] = [args.temperature]
        data["taus"] = [args.tau]
    data.setdefault("temperatures", [5.5])

    material = args.material or env.get("material")
    if material:
        data["material"] = material
    threads = args.threads or env.get("threads")
    if threads:
        data["threads"] = int(threads)
    if args.out:
        data["out_dir"] = args.out
    if args.eo_mode:
        data["eo_mode"] = MAP_EO_MODE[args.eo_mode].value
    if args.gamma is not None:
        data["gamma"] = args.gamma
    if args.refine is not None:
        data["refinement"] = {**data.get("refinement", {}), "level": args.refine}
    return scan_config_from_dict(data)


def _print(obj: Any) -> None:
    print(msgspec.json.format(msgspec.json.encode(obj).decode(), indent=2))


def cmd_mode(config: ScanConfig) -> int:
    table = resolve_material(config.material)
    n = properties_at(table, config.temperatures[0], config.allow_extrapolation).n
    profile = mode_for(config.geometries[0], config, n)
    _print({"mode": profile, "summary": minor_radius(profile)._asdict()})
    return EXIT_OK


def cmd_strain(config: ScanConfig, args: argparse.Namespace) -> int:
    runner = ScanRunner(config)
    entry = config.geometries[0]
    profile = mode_for(entry, config, runner.reference.n)
    if args.load == "bb":
        load = bb_surface_load(profile, args.amplitude or config.pressure_amplitude)
    elif args.load == "eo":
        load = eo_volumetric_load(profile, args.amplitude or config.eo_amplitude)
    else:
        load = uniform_pressure_load(args.amplitude or config.pressure_amplitude)
    set_threads(config.threads)
    mesh = build_mesh(geometry_of(entry), profile, config.refinement)
    result = solve_static(mesh, runner.moduli, load)
    if args.export:
        export_mesh(mesh, args.export, StaticSolver(mesh, runner.moduli).solve(load).u)
    _print(result)
    return EXIT_OK


def cmd_budget(config: ScanConfig) -> int:
    rows = ScanRunner(config).run()
    _print(rows)
    return EXIT_OK if all(r.status == "ok" for r in rows) else EXIT_PARTIAL_FAILURE


def cmd_scan(config: ScanConfig) -> int:
    rows, csv = run_scan(config)
    print(csv)
    return EXIT_OK if all(r.status == "ok" for r in rows) else EXIT_PARTIAL_FAILURE


def cmd_figdata(config: ScanConfig) -> int:
    for path in emit_figure_data(config):
        print(path)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, env: dict[str, str | None]) -> int:
    table = resolve_material(args.material or env.get("material") or "caf2")
    refinement = RefinementConfig(level=args.refine) if args.refine is not None else None
    threads = args.threads or env.get("threads")
    set_threads(int(threads) if threads else None)
    report = validate(table, refinement, fem=not args.no_fem)
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILURE


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    env = load_environment()
    configure_logging(args.log_level or env.get("log_level"))
    try:
        if args.command == "validate":
            return cmd_validate(args, env)
        if args.command in ("scan", "figdata") and args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        config = resolve_config(args, env)
        if args.command == "mode":
            return cmd_mode(config)
        if args.command == "strain":
            return cmd_strain(config, args)
        if args.command == "budget":
            return cmd_budget(config)
        if args.command == "scan":
            return cmd_scan(config)
        return cmd_figdata(config)
    except WgrNoiseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
