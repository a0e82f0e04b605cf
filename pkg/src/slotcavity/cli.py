"""Command-line front end.

Exit codes: 0 success, 2 bad configuration or input, 3 numerical failure.
Failures print one JSON object ``{"error": ..., "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import NM, RunConfig, grid_values, load_config
from .dbr import FabryPerot, LayerStack, airy_q_oracle, fp_quality, quarter_wave_stack, reflectivity_spectrum, stack_reflectivity
from .errors import ConfigError, NumericalError, SlotCavityError
from .export import dump_json, field_csv, mode_summary, save_bundle, spectrum_csv
from .modesolver import normalize_power
from .pipeline import fundamental_mode
from .qed import build_report
from .slab import SlabSpec, slab_mode_count, slab_neff
from .sweep import SweepSpec, sweep_rod, sweep_slot

log = logging.getLogger("slotcavity")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class _KeyValueFormatter(logging.Formatter):
    def format(self, record):
        msg = record.getMessage().replace('"', "'")
        return f'level={record.levelname} logger={record.name} msg="{msg}"'


def _setup_logging(quiet: bool):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_KeyValueFormatter())
    root = logging.getLogger("slotcavity")
    root.handlers[:] = [handler]
    root.setLevel(logging.WARNING if quiet else logging.INFO)
    root.propagate = False


def _out_dir(args, cfg: RunConfig) -> Path:
    if args.out_dir:
        d = Path(args.out_dir)
    elif cfg.out_dir is not None:
        d = cfg.out_dir if cfg.out_dir.is_absolute() or cfg.path is None else cfg.path.parent / cfg.out_dir
    else:
        d = Path("out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _formats(args, cfg: RunConfig) -> tuple[str, ...]:
    return (args.format,) if args.format else cfg.formats


def _workers(args) -> Optional[int]:
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        return args.threads
    return None  # falls back to SLOTCAVITY_THREADS


def _write(path: Path, text: str):
    path.write_text(text)
    log.info("wrote %s", path)


def _mode(cfg: RunConfig):
    spec = cfg.require_geometry()
    settings = cfg.solver if cfg.full_domain else None
    return spec, fundamental_mode(spec, cfg.mesh_options, settings, full_domain=cfg.full_domain)


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    spec, mode = _mode(cfg)
    mode = normalize_power(mode, cfg.power)
    out = _out_dir(args, cfg)
    fmts = _formats(args, cfg)
    if "csv" in fmts:
        _write(out / "fields.csv", field_csv(mode))
    if "json" in fmts:
        _write(out / "mode.json", dump_json(mode_summary(mode)))
    if args.bundle:
        save_bundle(mode, out / "mode.npz")
    print(f"n_eff = {mode.n_eff:.8f}")
    return EXIT_OK


DESIGN_COLUMNS = [
    "rod_material",
    "slot_material",
    "bridge_height_nm",
    "rod_size_nm",
    "Ex_r0_V_per_m",
    "E_photon_x_r0_MV_per_m",
]


def _design_row(spec, report) -> str:
    bridge = "N/A" if spec.bridge_height is None else f"{spec.bridge_height / NM:g}"
    size = f"{spec.rod_width / NM:g} x {spec.rod_height / NM:g}"
    vals = [
        spec.rod_material.name,
        spec.slot_material.name,
        bridge,
        size,
        f"{report.Ex_r0_at_power:.1f}",
        f"{report.E_photon_r0 / 1e6:.2f}",
    ]
    return ",".join(vals)


def cmd_report(args) -> int:
    cfg = load_config(args.config)
    emitter = cfg.emitter()
    emitter.require_parameters()
    spec, mode = _mode(cfg)
    qs = cfg.q_values or [None]
    reports = [build_report(mode, spec, emitter, q, cfg.cavity_length, cfg.power) for q in qs]
    out = _out_dir(args, cfg)
    fmts = _formats(args, cfg)
    if "csv" in fmts:
        _write(out / "design.csv", ",".join(DESIGN_COLUMNS) + "\n" + _design_row(spec, reports[0]) + "\n")
    if "json" in fmts:
        _write(out / "report.json", dump_json({"emitter": emitter.name, "reports": [r.to_dict() for r in reports]}))
    r = reports[0]
    print(
        f"n_eff = {r.n_eff:.6f}  V = {r.V_normalized:.4f} (lambda/n_dia)^3  "
        f"E_x(r0) = {r.Ex_r0_at_power:.2f} V/m  per-photon E_x = {r.E_photon_r0 / 1e6:.3f} MV/m  "
        f"g = {r.g_r0 / 1e9:.1f}e9 rad/s"
    )
    for rep in reports:
        if rep.Q is not None:
            print(
                f"Q = {rep.Q:g}: kappa = {rep.kappa:.3e} rad/s  C = {rep.C:.3e}  "
                f"Purcell = {rep.purcell:.3e}  efficiency = {rep.efficiency:.6f}  "
                f"strong coupling = {rep.strong_coupling}"
            )
    return EXIT_OK


def rod_sweep_spec(cfg: RunConfig) -> SweepSpec:
    """The rod sweep described by a config's [geometry] and [sweep] sections."""
    base = cfg.require_geometry()
    sw = cfg.section("sweep")
    if "rod_width_nm" not in sw or "rod_height_nm" not in sw:
        raise ConfigError("[sweep] rod sweep needs rod_width_nm and rod_height_nm")
    try:
        return SweepSpec(
            base,
            grid_values(sw["rod_width_nm"], "rod_width_nm"),
            grid_values(sw["rod_height_nm"], "rod_height_nm"),
            grid_values(sw["slot_width_nm"], "slot_width_nm") if "slot_width_nm" in sw else (),
            objective=sw.get("objective", "Ex_at_r0"),
            power=cfg.power,
            single_mode_constraint=sw.get("single_mode", False),
            refine=sw.get("refine", False),
            emitter=cfg.emitter(),
            mesh_options=cfg.mesh_options,
            label=sw.get("label", f"{base.rod_material.name}-{base.slot_material.name}"),
        )
    except ValueError as exc:
        raise ConfigError(f"[sweep]: {exc}") from exc


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    base = cfg.require_geometry()
    sw = cfg.section("sweep")
    kind = sw.get("kind", "rod")
    label = sw.get("label", f"{base.rod_material.name}-{base.slot_material.name}")
    emitter = cfg.emitter()
    out = _out_dir(args, cfg)
    fmts = _formats(args, cfg)
    workers = _workers(args)
    fraction = float(sw.get("robustness_fraction", 0.5))
    if kind == "rod":
        spec = rod_sweep_spec(cfg)
        result = sweep_rod(spec, workers, journal=out / "sweep.journal.jsonl", resume=args.resume)
        results = [result]
        summaries = [result.summary(fraction)]
    elif kind == "slot":
        if "slot_width_nm" not in sw:
            raise ConfigError("[sweep] slot sweep needs slot_width_nm")
        results = sweep_slot(
            [base],
            grid_values(sw["slot_width_nm"], "slot_width_nm"),
            [label],
            emitter,
            cfg.power,
            cfg.mesh_options,
            workers,
        )
        summaries = [r.summary(fraction) for r in results]
    else:
        raise ConfigError(f"[sweep] kind must be 'rod' or 'slot', got {kind!r}")
    if "csv" in fmts:
        _write(out / "sweep.csv", "".join(r.to_csv() for r in results))
    if "json" in fmts:
        _write(out / "sweep_summary.json", dump_json(summaries if len(summaries) > 1 else summaries[0]))
    for s in summaries:
        if s["argmax"] is None:
            print(f"{s['design']}: no successful cell")
        else:
            w_s, w_r, h = s["argmax"]
            print(f"{s['design']}: best w_S = {w_s:g} nm, w_R x h = {w_r:g} x {h:g} nm, {s['objective']} = {s['max_value']:.6g}")
    return EXIT_OK


def _stack(cfg: RunConfig) -> tuple[LayerStack, float]:
    d = cfg.section("dbr")
    n0, ns = float(d.get("n0", 1.0)), float(d.get("ns", 1.0))
    lam0 = float(d.get("design_wavelength_nm", 637.0)) * NM
    try:
        if "layers" in d:
            layers = tuple((float(n), float(t) * NM) for n, t in d["layers"])
            return LayerStack(n0, layers, ns), lam0
        for key in ("n_high", "n_low", "periods"):
            if key not in d:
                raise ConfigError(f"[dbr] needs 'layers' or n_high, n_low and periods (missing {key})")
        return quarter_wave_stack(d["n_high"], d["n_low"], d["periods"], lam0, n0, ns), lam0
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[dbr]: {exc}") from exc


def cmd_dbr(args) -> int:
    cfg = load_config(args.config)
    if "dbr" not in cfg.raw:
        raise ConfigError("config has no [dbr] section")
    d = cfg.section("dbr")
    stack, lam0 = _stack(cfg)
    scan = d.get("scan_nm", {"start": lam0 / NM - 100, "stop": lam0 / NM + 100, "step": 1})
    lams = grid_values(scan, "scan_nm")
    rows = reflectivity_spectrum(stack, lams)
    r0, t0 = stack_reflectivity(stack, lam0)
    summary = {"design_wavelength_m": lam0, "R": r0, "T": t0, "layers": len(stack.layers)}
    if "cavity_length_nm" in d:
        fp = FabryPerot(r0, r0, d["cavity_length_nm"] * NM, float(d.get("n_eff", 1.0)))
        f, q = fp_quality(fp, lam0)
        summary["fabry_perot"] = {
            "finesse": f,
            "order": fp.order(lam0),
            "Q": q,
            "Q_airy": airy_q_oracle(fp, lam0, lambda lam: stack_reflectivity(stack, lam)[0]),
        }
    out = _out_dir(args, cfg)
    fmts = _formats(args, cfg)
    if "csv" in fmts:
        _write(out / "spectrum.csv", spectrum_csv(rows))
    if "json" in fmts:
        _write(out / "dbr.json", dump_json(summary))
    print(f"R({lam0 / NM:g} nm) = {r0:.10f}")
    if "fabry_perot" in summary:
        fp_s = summary["fabry_perot"]
        print(f"finesse = {fp_s['finesse']:.2f}  Q = {fp_s['Q']:.1f}  Q_airy = {fp_s['Q_airy']:.1f}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        spec = SlabSpec(args.n_core, args.n_clad, args.thickness_nm * NM, args.wavelength_nm * NM, args.polarization)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.count:
        print(slab_mode_count(spec))
    else:
        print(f"{slab_neff(spec, args.mode_index):.12f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", "-q", action="store_true", help="only log warnings and errors")

    run = argparse.ArgumentParser(add_help=False, parents=[common])
    run.add_argument("config_pos", nargs="?", metavar="CONFIG", help="TOML run configuration")
    run.add_argument("--config", "-c", help="TOML run configuration")
    run.add_argument("--out-dir", "-o", help="output directory (overrides [output] dir)")
    run.add_argument("--format", choices=("csv", "json"), help="write only this output format")
    run.add_argument(
        "--threads",
        type=int,
        help="worker processes for sweeps (default: $SLOTCAVITY_THREADS or 1)",
    )

    parser = argparse.ArgumentParser(prog="slotcavity", description="Slot-waveguide cavity mode and QED calculator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[run], help="solve the fundamental quasi-TE mode and export fields")
    p.add_argument("--bundle", action="store_true", help="also write mode.npz")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("report", parents=[run], help="cavity-QED figures of merit")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", parents=[run], help="rod or slot dimension sweep")
    p.add_argument("--resume", action="store_true", help="continue from the journal in the output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dbr", parents=[run], help="Bragg mirror spectrum and Fabry-Perot Q")
    p.set_defaults(func=cmd_dbr)

    p = sub.add_parser("oracle", parents=[common], help="analytic symmetric-slab effective index")
    p.add_argument("--n-core", type=float, required=True)
    p.add_argument("--n-clad", type=float, required=True)
    p.add_argument("--thickness-nm", type=float, required=True)
    p.add_argument("--wavelength-nm", type=float, default=637.0)
    p.add_argument("--polarization", choices=("TE", "TM"), default="TE")
    p.add_argument("--mode-index", type=int, default=0)
    p.add_argument("--count", action="store_true", help="print the number of guided modes instead")
    p.set_defaults(func=cmd_oracle)
    return parser


def _error(kind: str, exc: BaseException):
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.quiet)
    if hasattr(args, "config_pos"):
        if args.config and args.config_pos:
            parser.error("give the config either positionally or with --config, not both")
        args.config = args.config or args.config_pos
        if not args.config:
            parser.error("a config file is required")
    try:
        return args.func(args)
    except NumericalError as exc:
        _error("numerical", exc)
        return EXIT_NUMERIC
    except (SlotCavityError, ValueError) as exc:
        _error("config", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
