"""Timing harness: warmup plus repeated full propagations per variant."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InstabilityError, VerificationError
from .grid import resolve_precision
from .kernels.driver import Stepper, verify
from .kernels.variants import KernelConfig
from .metrics import MachineProfile, flop_model, measure, roofline_attainable
from .physics import check_source, inject_source, new_wavefields
from .scenario import Scenario

CSV_COLUMNS = (
    "variant", "Dx", "Dy", "Dz", "precision", "workers",
    "mean_s", "stddev_s", "gflops", "ai_mem", "pct_mem", "ai_near", "pct_near",
)
_SHORT = {"single": "f32", "double": "f64"}
VERIFY_TOL = {"double": 1e-12, "single": 1e-4}


@dataclass
class BenchPlan:
    scenario: Scenario
    configs: list[KernelConfig]
    repeats: int = 5
    warmup_runs: int = 1
    verify_first: bool = False
    verify_steps: int = 10
    profile: MachineProfile | None = None

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.warmup_runs < 0:
            raise ConfigError(f"warmup_runs must be >= 0, got {self.warmup_runs}")
        if self.scenario.steps < 1:
            raise ConfigError(f"benchmark scenario needs steps >= 1, got {self.scenario.steps}")
        if not self.configs:
            raise ConfigError("benchmark plan has no variants")
        for cfg in self.configs:
            cfg.validate()


@dataclass
class BenchRecord:
    variant: str
    tile: tuple[int, int, int]
    precision: str
    workers: int
    timings: list[float]
    warmup_runs: int
    flops: int
    ai: dict[str, float]
    attainable: dict[str, float] = field(default_factory=dict)

    @property
    def mean_s(self) -> float:
        return statistics.fmean(self.timings)

    @property
    def stddev_s(self) -> float:
        return statistics.stdev(self.timings) if len(self.timings) > 1 else 0.0

    @property
    def gflops(self) -> float:
        return self.flops / self.mean_s / 1e9

    def pct(self, level: str) -> float | None:
        a = self.attainable.get(level)
        return 100.0 * self.gflops / a if a else None

    def row(self) -> dict:
        def opt(x):
            return "" if x is None else f"{x:.6g}"

        dx, dy, dz = self.tile
        return {
            "variant": self.variant, "Dx": dx, "Dy": dy, "Dz": dz,
            "precision": _SHORT[self.precision], "workers": self.workers,
            "mean_s": f"{self.mean_s:.6g}", "stddev_s": f"{self.stddev_s:.6g}",
            "gflops": f"{self.gflops:.6g}",
            "ai_mem": f"{self.ai['mem']:.6g}", "pct_mem": opt(self.pct("MEM")),
            "ai_near": f"{self.ai['near']:.6g}", "pct_near": opt(self.pct("L-near")),
        }


def _timed_run(stepper: Stepper, fields, scenario_parts, clock) -> float:
    domain, medium, coeffs, tp, src = scenario_parts
    uprev, ucur = fields
    uprev.data[:] = 0
    ucur.data[:] = 0
    t0 = clock()
    for step in range(tp.steps):
        stepper.step(uprev, ucur)
        uprev, ucur = ucur, uprev
        inject_source(ucur, src, medium, tp.dt, step)
    el = clock() - t0
    if not np.isfinite(ucur.interior).all():
        raise InstabilityError(tp.steps, f"benchmark run of {stepper.config.name}")
    return el


def run_bench(plan: BenchPlan, *, clock=time.perf_counter, on_run=None) -> list[BenchRecord]:
    """Time every configuration of ``plan``.

    ``on_run(name, kind)`` is called before each execution with ``kind`` in
    ``{"warmup", "timed"}``.
    """
    parts = plan.scenario.build()
    domain, medium, coeffs, tp, src = parts
    check_source(domain, src, tp.steps)
    ext, w = domain.extents, domain.pml_width
    if plan.verify_first:
        vs = Scenario(**{**plan.scenario.__dict__, "steps": min(plan.verify_steps, plan.scenario.steps)})
        for cfg in plan.configs:
            rep = verify(cfg, vs)
            if not rep.within(VERIFY_TOL[cfg.precision]):
                raise VerificationError(
                    f"variant {cfg.name} failed verification: rel_L2 {rep.rel_l2:.3e}"
                )
    records = []
    for cfg in plan.configs:
        m = measure(cfg, ext, w, domain.h)
        ai = {"near": m.ai_near, "mem": m.ai_mem}
        attainable = {}
        if plan.profile is not None:
            att_near = roofline_attainable(ai["near"], plan.profile, cfg.precision)
            att_mem = roofline_attainable(ai["mem"], plan.profile, cfg.precision)
            for label in att_near:
                src_ai = att_mem if label == "MEM" else att_near
                attainable[label] = src_ai[label].attainable
        fields = new_wavefields(domain, cfg.precision)
        timings = []
        with Stepper(cfg, domain, medium, coeffs, tp.dt) as stepper:
            for _ in range(plan.warmup_runs):
                if on_run:
                    on_run(cfg.name, "warmup")
                _timed_run(stepper, fields, parts, clock)
            for _ in range(plan.repeats):
                if on_run:
                    on_run(cfg.name, "timed")
                timings.append(_timed_run(stepper, fields, parts, clock))
        records.append(BenchRecord(
            cfg.name, cfg.tile_dims, resolve_precision(cfg.precision), cfg.workers, timings,
            plan.warmup_runs, flop_model(ext, w, tp.steps, cfg.variant), ai, attainable,
        ))
    return records


def compare(records: list[BenchRecord], baseline: str) -> list[tuple[str, float, float]]:
    """``(variant, mean_s, speedup vs baseline)`` sorted fastest first."""
    base = [r for r in records if r.variant == baseline]
    if not base:
        raise ConfigError(f"baseline variant {baseline!r} not among the records")
    b = base[0].mean_s
    rows = [(r.variant, r.mean_s, b / r.mean_s) for r in records]
    return sorted(rows, key=lambda r: (r[1], r[0]))


def write_csv(records: list[BenchRecord], path) -> None:
    with open(path, "w", newline="") as f:
        wr = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        wr.writeheader()
        for r in records:
            wr.writerow(r.row())


def read_csv(path) -> list[dict]:
    with open(path, newline="") as f:
        rd = csv.DictReader(f)
        if rd.fieldnames is None:
            raise ConfigError(f"{path}: empty results file")
        missing = set(CSV_COLUMNS) - set(rd.fieldnames)
        if missing:
            raise ConfigError(f"{path}: missing columns {sorted(missing)}")
        rows = list(rd)
    if not rows:
        raise ConfigError(f"{path}: no result rows")
    return rows
