"""TOML run configuration with strict keys and aggregated validation.

Schema (every section and key is optional)::

    seed = 0

    [geometry]
    extents = [64, 64, 64]      # or a single integer for a cube
    pml_width = 8
    h = 10.0

    [medium]
    kind = "homogeneous"        # "homogeneous" | "layered" | "random"
    velocity = 3000.0           # homogeneous
    layers = [[0, 1500.0], [32, 3000.0]]   # layered: (z_top, V) pairs
    vmin = 1500.0               # random
    vmax = 4500.0
    eta_max = 100.0

    [time]
    dt = "auto"                 # or seconds; auto = 0.4 h / Vmax
    steps = 100

    [source]
    location = [32, 32, 32]     # default: domain center
    f_peak = "auto"             # or Hz; auto = Vmin / (10 h)
    t0 = "auto"                 # or seconds; auto = 1 / f_peak
    amplitude = 1.0

    [kernel]
    variant = "gmem_8x8x8"
    workers = 1
    precision = "f64"
    scratch_budget = 524288

    [output]
    snapshot_interval = 0       # 0 writes only the final snapshot
    dir = "out"
    csv = "results.csv"
    profile = "machine_profile.txt"

    [bench]
    extents = [256, 256, 256]
    pml_width = 16
    steps = 100
    variants = ["gmem_8x8x8", "st_reg_fixed_16x16"]
    repeats = 5
    warmup = 1
    verify_first = true
    baseline = "gmem_8x8x8"
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .grid import Extents, resolve_precision
from .kernels.variants import ALL_VARIANTS, KernelConfig
from .physics import (
    Domain,
    Medium,
    SourceTerm,
    TimeParams,
    cfl_limit,
    constant_field,
    default_dt,
    eta_profile,
    layered_velocity,
    make_coeffs_order8,
    random_velocity,
    ricker,
)

_SCHEMA = {
    "seed": None,
    "geometry": {"extents", "pml_width", "h"},
    "medium": {"kind", "velocity", "layers", "vmin", "vmax", "eta_max"},
    "time": {"dt", "steps"},
    "source": {"location", "f_peak", "t0", "amplitude"},
    "kernel": {"variant", "workers", "precision", "scratch_budget"},
    "output": {"snapshot_interval", "dir", "csv", "profile"},
    "bench": {"extents", "pml_width", "steps", "variants", "repeats", "warmup", "verify_first", "baseline"},
}

DEFAULT_BENCH_VARIANTS = tuple(v.value for v in ALL_VARIANTS)


@dataclass
class Config:
    seed: int = 0
    extents: Extents = field(default_factory=lambda: Extents.cube(64))
    pml_width: int = 8
    h: float = 10.0
    medium_kind: str = "homogeneous"
    velocity: float = 3000.0
    layers: list = field(default_factory=list)
    vmin: float = 1500.0
    vmax: float = 4500.0
    eta_max: float = 100.0
    dt: float | str = "auto"
    steps: int = 100
    location: tuple[int, int, int] | None = None
    f_peak: float | str = "auto"
    t0: float | str = "auto"
    amplitude: float = 1.0
    variant: str = "gmem_8x8x8"
    workers: int = 1
    precision: str = "double"
    scratch_budget: int = 512 * 1024
    snapshot_interval: int = 0
    out_dir: str = "out"
    csv: str = "results.csv"
    profile: str = "machine_profile.txt"
    bench_extents: Extents = field(default_factory=lambda: Extents.cube(256))
    bench_pml_width: int = 16
    bench_steps: int = 100
    bench_variants: tuple = DEFAULT_BENCH_VARIANTS
    repeats: int = 5
    warmup: int = 1
    verify_first: bool = True
    baseline: str = "gmem_8x8x8"

    # --- derived objects ---

    def kernel_config(self, variant: str | None = None, instrument: bool = False) -> KernelConfig:
        return KernelConfig.from_name(
            variant or self.variant, workers=self.workers, precision=self.precision,
            instrument=instrument, scratch_budget=self.scratch_budget,
        ).validate()

    def domain(self) -> Domain:
        return Domain(self.extents, self.pml_width, self.h)

    def build_medium(self) -> Medium:
        e = self.extents
        if self.medium_kind == "homogeneous":
            vel = constant_field(e, self.velocity)
        elif self.medium_kind == "layered":
            vel = layered_velocity(e, [tuple(x) for x in self.layers])
        else:
            vel = random_velocity(e, np.random.default_rng(self.seed), self.vmin, self.vmax)
        return Medium(vel, eta_profile(e, self.pml_width, self.eta_max))

    def resolved_dt(self, medium: Medium) -> float:
        return default_dt(self.h, medium.vmax) if self.dt == "auto" else float(self.dt)

    def source_location(self) -> tuple[int, int, int]:
        if self.location is not None:
            return tuple(self.location)
        return tuple(n // 2 for n in self.extents.as_tuple())

    def build(self):
        """``(domain, medium, coeffs, time, src)`` ready for propagation."""
        domain = self.domain()
        medium = self.build_medium()
        medium.validate(domain)
        dt = self.resolved_dt(medium)
        f = medium.vmin / (10.0 * self.h) if self.f_peak == "auto" else float(self.f_peak)
        t0 = 1.0 / f if self.t0 == "auto" else float(self.t0)
        wavelet = self.amplitude * ricker(f, t0, dt, max(self.steps, 1))
        return domain, medium, make_coeffs_order8(self.h), TimeParams(dt, self.steps), SourceTerm(self.source_location(), wavelet)

    def bench_config(self) -> "Config":
        return replace(self, extents=self.bench_extents, pml_width=self.bench_pml_width,
                       steps=self.bench_steps, location=None)

    # --- validation ---

    def validate(self) -> "Config":
        errs = []

        def check(path, fn):
            try:
                fn()
            except (ConfigError, ValueError, TypeError) as exc:
                errs.append(f"{path}: {exc}")

        check("geometry.pml_width", lambda: Domain(self.extents, self.pml_width, self.h))
        check("kernel.variant", lambda: self.kernel_config())
        check("kernel.precision", lambda: resolve_precision(self.precision))
        if self.medium_kind not in ("homogeneous", "layered", "random"):
            errs.append(f"medium.kind: unknown kind {self.medium_kind!r}")
        if self.medium_kind == "layered" and not self.layers:
            errs.append("medium.layers: layered medium needs at least one layer")
        if self.eta_max < 0:
            errs.append("medium.eta_max: must be non-negative")
        if self.steps < 0:
            errs.append("time.steps: must be non-negative")
        if self.snapshot_interval < 0:
            errs.append("output.snapshot_interval: must be non-negative")
        if self.repeats < 1:
            errs.append("bench.repeats: must be >= 1")
        if self.warmup < 0:
            errs.append("bench.warmup: must be >= 0")
        if self.bench_steps < 1:
            errs.append("bench.steps: must be >= 1")
        for v in self.bench_variants:
            check(f"bench.variants[{v}]", lambda v=v: self.kernel_config(v))
        check("bench.pml_width", lambda: Domain(self.bench_extents, self.bench_pml_width, self.h))
        if not errs:
            try:
                dom = self.domain()
                medium = self.build_medium()
                medium.validate(dom)
                dt = self.resolved_dt(medium)
                lim = cfl_limit(self.h, medium.vmax)
                if not 0 < dt <= lim:
                    errs.append(f"time.dt: {dt:.4g} s violates the stability limit {lim:.4g} s")
                loc = self.source_location()
                if not dom.inner.contains(*loc):
                    errs.append(f"source.location: {loc} is not inside the inner region (PML width {self.pml_width})")
                if self.f_peak != "auto" and not float(self.f_peak) > 0:
                    errs.append("source.f_peak: must be positive")
            except (ConfigError, ValueError) as exc:
                errs.append(str(exc))
        if errs:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(errs))
        return self


def _extents(v, path):
    if isinstance(v, int):
        return Extents.cube(v)
    if isinstance(v, list) and len(v) == 3 and all(isinstance(x, int) for x in v):
        return Extents(*v)
    raise ConfigError(f"{path}: expected an integer or [nx, ny, nz], got {v!r}")


def _auto_or_number(v, path):
    if v == "auto" or (isinstance(v, (int, float)) and not isinstance(v, bool)):
        return v
    raise ConfigError(f"{path}: expected \"auto\" or a number, got {v!r}")


def from_dict(data: dict) -> Config:
    """Build and validate a :class:`Config`; unknown keys are errors."""
    errs = []
    for key, val in data.items():
        if key not in _SCHEMA:
            errs.append(f"{key}: unknown section")
        elif _SCHEMA[key] is not None:
            if not isinstance(val, dict):
                errs.append(f"{key}: expected a table")
                continue
            for sub in val:
                if sub not in _SCHEMA[key]:
                    errs.append(f"{key}.{sub}: unknown key")
    if errs:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errs))

    cfg = Config()
    g = data.get("geometry", {})
    m = data.get("medium", {})
    t = data.get("time", {})
    s = data.get("source", {})
    k = data.get("kernel", {})
    o = data.get("output", {})
    b = data.get("bench", {})
    try:
        if "seed" in data:
            cfg.seed = int(data["seed"])
        if "extents" in g:
            cfg.extents = _extents(g["extents"], "geometry.extents")
        cfg.pml_width = int(g.get("pml_width", cfg.pml_width))
        cfg.h = float(g.get("h", cfg.h))
        cfg.medium_kind = str(m.get("kind", cfg.medium_kind))
        cfg.velocity = float(m.get("velocity", cfg.velocity))
        cfg.layers = list(m.get("layers", cfg.layers))
        cfg.vmin = float(m.get("vmin", cfg.vmin))
        cfg.vmax = float(m.get("vmax", cfg.vmax))
        cfg.eta_max = float(m.get("eta_max", cfg.eta_max))
        cfg.dt = _auto_or_number(t.get("dt", cfg.dt), "time.dt")
        cfg.steps = int(t.get("steps", cfg.steps))
        if "location" in s:
            loc = s["location"]
            if not (isinstance(loc, list) and len(loc) == 3):
                raise ConfigError(f"source.location: expected [i, j, k], got {loc!r}")
            cfg.location = tuple(int(x) for x in loc)
        cfg.f_peak = _auto_or_number(s.get("f_peak", cfg.f_peak), "source.f_peak")
        cfg.t0 = _auto_or_number(s.get("t0", cfg.t0), "source.t0")
        cfg.amplitude = float(s.get("amplitude", cfg.amplitude))
        cfg.variant = str(k.get("variant", cfg.variant))
        cfg.workers = int(k.get("workers", cfg.workers))
        cfg.precision = resolve_precision(k.get("precision", cfg.precision))
        cfg.scratch_budget = int(k.get("scratch_budget", cfg.scratch_budget))
        cfg.snapshot_interval = int(o.get("snapshot_interval", cfg.snapshot_interval))
        cfg.out_dir = str(o.get("dir", cfg.out_dir))
        cfg.csv = str(o.get("csv", cfg.csv))
        cfg.profile = str(o.get("profile", cfg.profile))
        if "extents" in b:
            cfg.bench_extents = _extents(b["extents"], "bench.extents")
        cfg.bench_pml_width = int(b.get("pml_width", cfg.bench_pml_width))
        cfg.bench_steps = int(b.get("steps", cfg.bench_steps))
        if "variants" in b:
            cfg.bench_variants = tuple(str(v) for v in b["variants"])
        cfg.repeats = int(b.get("repeats", cfg.repeats))
        cfg.warmup = int(b.get("warmup", cfg.warmup))
        cfg.verify_first = bool(b.get("verify_first", cfg.verify_first))
        cfg.baseline = str(b.get("baseline", cfg.baseline))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return cfg.validate()


def parse_config(path) -> Config:
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return from_dict(data)
