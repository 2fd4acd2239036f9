"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
instability, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace

from . import bench as B
from . import metrics as M
from .config import Config, parse_config
from .decomp import decompose
from .errors import ConfigError, InstabilityError, VerificationError, WaveStencilError
from .grid import Extents, resolve_precision, save_snapshot
from .kernels import ALL_VARIANTS, KernelConfig, propagate, verify_suite
from .scenario import Scenario

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_VERIFY = 0, 1, 2, 3
VERIFY_TOL = {"double": (1e-12, 1e-11), "single": (1e-4, float("inf"))}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _load(args) -> Config:
    cfg = parse_config(args.config) if args.config else Config()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.workers is not None:
        over["workers"] = args.workers
    if args.precision is not None:
        over["precision"] = resolve_precision(args.precision)
    if args.csv is not None:
        over["csv"] = args.csv
    if args.out is not None:
        over["out_dir"] = args.out
    if getattr(args, "variant", None):
        over["variant"] = args.variant
    return replace(cfg, **over).validate() if over else cfg


def _out_path(cfg: Config, name: str) -> str:
    if os.path.isabs(name) or os.path.dirname(name):
        return name
    return os.path.join(cfg.out_dir, name)


# --- subcommands -------------------------------------------------------------------


def cmd_run(args) -> int:
    cfg = _load(args)
    domain, medium, coeffs, tp, src = cfg.build()
    kcfg = cfg.kernel_config()
    os.makedirs(cfg.out_dir, exist_ok=True)
    written = []

    def snap(step, u):
        path = os.path.join(cfg.out_dir, f"snap_{step:06d}.wvf")
        save_snapshot(u, step, path)
        written.append(path)

    interval = cfg.snapshot_interval

    def on_step(step, u):
        if (interval and step % interval == 0) or step == tp.steps:
            snap(step, u)

    if tp.steps == 0:
        from .physics import new_wavefields

        snap(0, new_wavefields(domain, kcfg.precision)[1])
    else:
        try:
            propagate(kcfg, domain, medium, coeffs, tp, src, on_step=on_step)
        except InstabilityError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_UNSTABLE
    print(f"{kcfg.name}: {tp.steps} steps, dt={tp.dt:.6g} s, {len(written)} snapshot(s) in {cfg.out_dir}")
    return EXIT_OK


def _verify_scenario(args, cfg: Config | None) -> Scenario:
    if cfg is not None and args.config:
        return Scenario(cfg.extents, cfg.pml_width, cfg.steps, seed=cfg.seed, h=cfg.h,
                        vmin=cfg.vmin, vmax=cfg.vmax, eta_max=cfg.eta_max)
    seed = args.seed if args.seed is not None else 0
    return Scenario.cube(48, 4, 50, seed=seed)


def cmd_verify(args) -> int:
    cfg = _load(args)
    names = args.variants.split(",") if args.variants else [v.value for v in ALL_VARIANTS]
    configs = [
        KernelConfig.from_name(n.strip(), workers=cfg.workers, precision=cfg.precision,
                               scratch_budget=cfg.scratch_budget).validate()
        for n in names
    ]
    scenario = _verify_scenario(args, cfg)
    corrupt = KernelConfig.from_name(args.corrupt).name if args.corrupt else None
    try:
        reports = verify_suite(configs, scenario, corrupt=corrupt)
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    l2_tol, linf_tol = VERIFY_TOL[cfg.precision]
    ok = True
    print(f"{'variant':<22} {'precision':<9} {'rel_L2':>12} {'rel_Linf':>12}  status")
    for r in reports:
        good = r.within(l2_tol, linf_tol)
        ok &= good
        print(f"{r.variant:<22} {r.precision:<9} {r.rel_l2:12.3e} {r.rel_linf:12.3e}  {'ok' if good else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(args) -> int:
    cfg = _load(args)
    if args.steps is not None or args.extents is not None:
        cfg = replace(
            cfg,
            bench_steps=args.steps if args.steps is not None else cfg.bench_steps,
            bench_extents=Extents(*args.extents) if args.extents else cfg.bench_extents,
            bench_pml_width=args.width if args.width is not None else cfg.bench_pml_width,
        ).validate()
    names = args.variants.split(",") if args.variants else list(cfg.bench_variants)
    configs = [cfg.kernel_config(n.strip()) for n in names]
    profile = M.MachineProfile.load(args.profile) if args.profile else None
    scenario = Scenario(cfg.bench_extents, cfg.bench_pml_width, cfg.bench_steps, seed=cfg.seed, h=cfg.h)
    plan = B.BenchPlan(scenario, configs, repeats=cfg.repeats, warmup_runs=cfg.warmup,
                       verify_first=cfg.verify_first and not args.no_verify, profile=profile)
    try:
        records = B.run_bench(plan)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    path = _out_path(cfg, cfg.csv)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    B.write_csv(records, path)
    baseline = cfg.baseline if any(r.variant == cfg.baseline for r in records) else records[0].variant
    print(f"{'variant':<22} {'mean_s':>10} {'gflops':>8} {'speedup':>8}  (vs {baseline})")
    gf = {r.variant: r.gflops for r in records}
    for name, mean, sp in B.compare(records, baseline):
        print(f"{name:<22} {mean:10.4f} {gf[name]:8.3f} {sp:8.3f}")
    print(f"results written to {path}")
    return EXIT_OK


def cmd_machine(args) -> int:
    cfg = _load(args)
    sizes = M.DEFAULT_BW_SIZES if not args.quick else tuple(1 << k for k in range(12, 25, 2))
    profile = M.characterize(args.duration, cfg.workers, sizes)
    path = args.profile or _out_path(cfg, cfg.profile)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    profile.save(path)
    sys.stdout.write(profile.dumps())
    print(f"profile written to {path}")
    return EXIT_OK


def cmd_roofline(args) -> int:
    cfg = _load(args)
    profile_path = args.profile or _out_path(cfg, cfg.profile)
    if not os.path.exists(profile_path):
        raise ConfigError(f"machine profile not found: {profile_path} (run the machine command first)")
    profile = M.MachineProfile.load(profile_path)
    rows = B.read_csv(args.csv if args.csv else _out_path(cfg, cfg.csv))
    level = args.level
    ai_key = "ai_mem" if level == "MEM" else "ai_near"
    points = []
    for row in rows:
        prec = resolve_precision(row["precision"])
        ai = float(row[ai_key])
        att = M.roofline_attainable(ai, profile, prec)[level].attainable
        points.append(M.RooflinePoint(row["variant"], ai, float(row["gflops"]), att, level))
    svg = args.svg or os.path.join(cfg.out_dir, "roofline.svg")
    os.makedirs(os.path.dirname(svg) or ".", exist_ok=True)
    M.plot_roofline(points, profile, svg, precision=resolve_precision(rows[0]["precision"]),
                    title=f"Roofline ({level})")
    for p in points:
        print(f"{p.label:<22} ai={p.ai:8.4f} gflops={p.gflops:9.3f} attainable={p.attainable:9.3f} {p.achieved_pct:6.1f}%")
    print(f"roofline written to {svg}")
    return EXIT_OK


def cmd_decomp(args) -> int:
    cfg = _load(args)
    extents = Extents(*args.extents) if args.extents else cfg.extents
    w = args.width if args.width is not None else cfg.pml_width
    regions = decompose(extents, w)
    header = ["kind", "x0", "y0", "z0", "nx", "ny", "nz", "volume"]
    rows = [[r.kind.value, *r.lo, *r.extents, r.volume] for r in regions]
    if not args.all:
        rows = [row for row in rows if row[-1] > 0]
    if args.format == "csv":
        wr = csv.writer(sys.stdout, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)
    else:
        widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
        for row in [header, *rows]:
            print("  ".join(str(x).rjust(wd) for x, wd in zip(row, widths)))
        print(f"total volume {sum(row[-1] for row in rows)} of {extents.volume}")
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(header)
            wr.writerows(rows)
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def _add_globals(p, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="PATH", default=d, help="TOML configuration file")
    p.add_argument("--seed", type=int, default=d, help="random seed for media and sources")
    p.add_argument("--workers", type=int, default=d, help="worker threads")
    p.add_argument("--precision", choices=("f32", "f64"), default=d)
    p.add_argument("--csv", metavar="PATH", default=d, help="results / table CSV path")
    p.add_argument("--out", metavar="DIR", default=d, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavestencil", description="High-order acoustic stencil kernels and benchmarks.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="propagate a configured scenario and write snapshots")
    _add_globals(p, suppress=True)
    p.add_argument("--variant", help="kernel variant, e.g. gmem_8x8x8")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="compare kernel variants against the reference sweep")
    _add_globals(p, suppress=True)
    p.add_argument("--variants", help="comma-separated variant names (default: all)")
    p.add_argument("--corrupt", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time variants and write the results CSV")
    _add_globals(p, suppress=True)
    p.add_argument("--variants", help="comma-separated variant names")
    p.add_argument("--extents", type=int, nargs=3, metavar=("NX", "NY", "NZ"))
    p.add_argument("--width", type=int, help="PML width")
    p.add_argument("--steps", type=int)
    p.add_argument("--profile", metavar="PATH", help="machine profile for roofline columns")
    p.add_argument("--no-verify", action="store_true", help="skip the oracle check before timing")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("machine", help="measure peak FLOP rate and bandwidth levels")
    _add_globals(p, suppress=True)
    p.add_argument("--duration", type=float, default=1.0, help="seconds per peak measurement")
    p.add_argument("--profile", metavar="PATH", help="output profile path")
    p.add_argument("--quick", action="store_true", help="smaller working-set sweep (4 KiB .. 16 MiB)")
    p.set_defaults(func=cmd_machine)

    p = sub.add_parser("roofline", help="plot results against a machine profile (SVG)")
    _add_globals(p, suppress=True)
    p.add_argument("--profile", metavar="PATH")
    p.add_argument("--svg", metavar="PATH", help="output SVG path")
    p.add_argument("--level", choices=M.LEVELS, default="MEM")
    p.set_defaults(func=cmd_roofline)

    p = sub.add_parser("decomp", help="print the seven-region decomposition")
    _add_globals(p, suppress=True)
    p.add_argument("--extents", type=int, nargs=3, metavar=("NX", "NY", "NZ"))
    p.add_argument("--width", type=int, help="PML width")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--all", action="store_true", help="include empty regions")
    p.set_defaults(func=cmd_decomp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except WaveStencilError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
