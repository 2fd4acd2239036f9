"""FLOP and byte accounting, machine characterization and roofline arithmetic.

Two arithmetic intensities are reported per run:

* ``near``: FLOPs over every access the kernel issues (grid and scratch),
  i.e. what the nearest cache level serves.
* ``mem``: FLOPs over compulsory main-memory traffic, one read of each input
  field and one write of the output per cell and step.
"""

from __future__ import annotations

import math
import statistics
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .counters import CounterReport
from .decomp import decompose
from .errors import ConfigError, WaveStencilError
from .grid import Extents, dtype_of, resolve_precision
from .physics import (
    FLOPS_INNER,
    FLOPS_INNER_SEMI,
    FLOPS_PML,
    FLOPS_PML_SEMI,
    FLOPS_SOURCE,
)

LEVELS = ("L-near", "L-mid", "MEM")
# compulsory words per cell-step: u, u_prev, V reads + u_next write; PML adds eta
MEM_WORDS_INNER = 4
MEM_WORDS_PML = 5


class UndefinedAIError(WaveStencilError, ZeroDivisionError):
    """Arithmetic intensity requested for zero bytes moved."""


# --- analytic model -------------------------------------------------------------


def region_volumes(extents: Extents, w: int) -> tuple[int, int]:
    """``(inner cells, PML cells)`` of the extended domain."""
    regions = decompose(extents, w)
    inner = regions[0].volume
    return inner, extents.volume - inner


def flops_per_cell(variant=None) -> tuple[int, int]:
    """``(inner, PML)`` FLOPs per cell-step for a kernel variant.

    Only the semi-stencil changes the count: its split z-axis sums cost four
    extra additions.
    """
    from .kernels.variants import VariantId

    if variant is VariantId.SEMI:
        return FLOPS_INNER_SEMI, FLOPS_PML_SEMI
    return FLOPS_INNER, FLOPS_PML


def flop_model(extents: Extents, w: int, T: int, variant=None, source: bool = True) -> int:
    """Predicted FLOPs for ``T`` steps, including the per-step source injection."""
    if T < 0:
        raise ConfigError(f"step count must be non-negative, got {T}")
    inner, pml = region_volumes(extents, w)
    fi, fp = flops_per_cell(variant)
    return T * (fi * inner + fp * pml + (FLOPS_SOURCE if source else 0))


def mem_bytes_model(extents: Extents, w: int, T: int, word: int) -> int:
    inner, pml = region_volumes(extents, w)
    return T * word * (MEM_WORDS_INNER * inner + MEM_WORDS_PML * pml)


def arithmetic_intensity(flops: float, nbytes: float) -> float:
    if not nbytes > 0:
        raise UndefinedAIError(f"arithmetic intensity undefined for {nbytes} bytes")
    return flops / nbytes


# --- counters -------------------------------------------------------------------


@dataclass(frozen=True)
class Measurement:
    """Counters of one instrumented step with byte totals at the two levels."""

    counters: CounterReport
    word_size: int
    mem_bytes: int

    @property
    def flops(self) -> int:
        return self.counters.flops

    @property
    def near_bytes(self) -> int:
        c = self.counters
        return (c.global_loads + c.global_stores + c.scratch_accesses) * self.word_size

    @property
    def global_bytes(self) -> int:
        c = self.counters
        return (c.global_loads + c.global_stores) * self.word_size

    @property
    def ai_near(self) -> float:
        return arithmetic_intensity(self.flops, self.near_bytes)

    @property
    def ai_mem(self) -> float:
        return arithmetic_intensity(self.flops, self.mem_bytes)

    def scaled(self, T: int) -> "Measurement":
        return Measurement(self.counters.scaled(T), self.word_size, self.mem_bytes * T)


def measure(config, extents: Extents, w: int, h: float = 10.0) -> Measurement:
    """Instrumented single step of ``config`` (counts do not depend on field values)."""
    from .kernels.driver import StepState, run_step
    from .kernels.variants import KernelConfig
    from .physics import Domain, Medium, constant_field, eta_profile, make_coeffs_order8

    cfg = KernelConfig(
        config.variant, config.tiling3, config.tiling2, config.workers, config.precision,
        True, config.scratch_budget,
    )
    domain = Domain(extents, w, h)
    medium = Medium(constant_field(extents, 1.0), eta_profile(extents, w, 1.0))
    prev, cur = (constant_field(extents, 0.0, precision=cfg.precision) for _ in range(2))
    state = StepState(prev, cur, medium, make_coeffs_order8(h), 1e-4, w, h)
    rep = run_step(cfg, state)
    rep = rep + CounterReport(u_loads=1, v_loads=1, stores=1, flops=FLOPS_SOURCE)
    return Measurement(rep, cfg.word_size, mem_bytes_model(extents, w, 1, cfg.word_size))


def model_ai(config, extents: Extents, w: int) -> dict[str, float]:
    m = measure(config, extents, w)
    return {"near": m.ai_near, "mem": m.ai_mem}


# --- machine profile and roofline ------------------------------------------------


@dataclass
class MachineProfile:
    """Peak GFLOP/s per precision and bandwidth levels (bytes/s) from nearest cache to memory."""

    peak_gflops: dict[str, float]
    bandwidths: list[tuple[str, float]] = field(default_factory=list)

    def validate(self) -> "MachineProfile":
        if not self.peak_gflops:
            raise ConfigError("machine profile has no peak compute rate")
        for p, v in self.peak_gflops.items():
            resolve_precision(p)
            if not v > 0:
                raise ConfigError(f"peak_gflops for {p} must be positive, got {v}")
        if not self.bandwidths:
            raise ConfigError("machine profile has no bandwidth levels")
        last = math.inf
        for label, bw in self.bandwidths:
            if not bw > 0:
                raise ConfigError(f"bandwidth {label} must be positive, got {bw}")
            if bw > last:
                raise ConfigError(f"bandwidth levels must be non-increasing toward memory ({label})")
            last = bw
        return self

    def peak(self, precision) -> float:
        p = resolve_precision(precision)
        if p not in self.peak_gflops:
            raise ConfigError(f"machine profile has no peak for {p} precision")
        return self.peak_gflops[p]

    def bandwidth(self, label: str) -> float:
        for name, bw in self.bandwidths:
            if name == label:
                return bw
        raise ConfigError(f"machine profile has no bandwidth level {label!r}")

    def dumps(self) -> str:
        short = {"single": "f32", "double": "f64"}
        lines = [f"peak_gflops_{short[resolve_precision(p)]}={v:.6g}" for p, v in sorted(self.peak_gflops.items())]
        lines += [f"bw_{label}={bw:.6g}" for label, bw in self.bandwidths]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "MachineProfile":
        peaks: dict[str, float] = {}
        bws: list[tuple[str, float]] = []
        for n, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ConfigError(f"machine profile line {n}: expected key=value")
            key = key.strip()
            try:
                x = float(val)
            except ValueError:
                raise ConfigError(f"machine profile line {n}: {val.strip()!r} is not a number") from None
            if key.startswith("peak_gflops_"):
                peaks[resolve_precision(key[len("peak_gflops_"):])] = x
            elif key.startswith("bw_"):
                bws.append((key[3:], x))
            else:
                raise ConfigError(f"machine profile line {n}: unknown key {key!r}")
        return cls(peaks, bws).validate()

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.validate().dumps())

    @classmethod
    def load(cls, path) -> "MachineProfile":
        with open(path) as f:
            return cls.loads(f.read())


@dataclass(frozen=True)
class Ceiling:
    label: str
    attainable: float  # GFLOP/s
    binding: str  # "memory" or "compute"


def roofline_attainable(ai: float, profile: MachineProfile, precision="double") -> dict[str, Ceiling]:
    """Per-level ``min(peak, ai * bandwidth)`` with the binding resource."""
    peak = profile.peak(precision)
    out = {}
    for label, bw in profile.bandwidths:
        mem = ai * bw / 1e9
        out[label] = Ceiling(label, min(peak, mem), "memory" if mem < peak else "compute")
    return out


def achieved_pct(gflops: float, attainable: float) -> float:
    if not attainable > 0:
        raise UndefinedAIError("attainable performance must be positive")
    return 100.0 * gflops / attainable


@dataclass(frozen=True)
class RooflinePoint:
    label: str
    ai: float
    gflops: float
    attainable: float
    level: str = "MEM"

    @property
    def achieved_pct(self) -> float:
        return achieved_pct(self.gflops, self.attainable)


def plot_roofline(points: list[RooflinePoint], profile: MachineProfile, path, precision="double",
                  title: str = "Roofline") -> None:
    """Log-log roofline: one ceiling per bandwidth level, the compute roof, labeled points."""
    if not points:
        raise ConfigError("no records to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    peak = profile.peak(precision)
    ais = [p.ai for p in points if p.ai > 0]
    lo = min([0.01] + [a / 4 for a in ais])
    hi = max([100.0] + [a * 4 for a in ais])
    x = np.logspace(math.log10(lo), math.log10(hi), 400)
    with plt.rc_context({"svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(8, 6))
        for label, bw in profile.bandwidths:
            ax.loglog(x, np.minimum(peak, x * bw / 1e9), "--", label=f"{label} {bw / 1e9:.1f} GB/s")
        ax.loglog(x, np.full_like(x, peak), "-", color="k", label=f"peak {peak:.1f} GFLOP/s")
        for p in points:
            ax.scatter([p.ai], [p.gflops], s=40)
            ax.annotate(f"{p.label} {p.achieved_pct:.1f}%", (p.ai, p.gflops),
                        textcoords="offset points", xytext=(5, 5), fontsize=8)
        ax.set_xlabel("Arithmetic intensity (FLOP/byte)")
        ax.set_ylabel("Performance (GFLOP/s)")
        ax.set_title(title)
        ax.grid(True, which="both", ls=":", lw=0.5)
        ax.legend(fontsize=8, loc="lower right")
        fig.savefig(path, format="svg")
        plt.close(fig)


# --- micro-benchmarks -------------------------------------------------------------

UNROLL_DEPTHS = (2, 4, 8, 16)
_FMA_ELEMS = 2048  # in-cache working array


def _make_fma_kernel(depth):
    @njit(nogil=True, fastmath=True)
    def kernel(data, alpha, reps):
        n = data.shape[0]
        for _ in range(reps):
            for i in range(n):
                b = data[i]
                for _d in range(depth):
                    b = b * alpha + alpha
                data[i] = b
        return data[0]

    return kernel


_FMA_KERNELS = {d: _make_fma_kernel(d) for d in UNROLL_DEPTHS}


@njit(nogil=True)
def _scale_sweep(x, alpha, reps):
    n = x.shape[0]
    for _ in range(reps):
        for i in range(n):
            x[i] = alpha * x[i]
    return x[0]


def _timed_loop(fn, args_for_worker, workers: int, duration: float):
    """Run ``fn`` repeatedly on every worker for about ``duration`` seconds.

    Returns the number of completed calls and elapsed seconds per worker.
    """
    barrier = threading.Barrier(workers)

    def body(wid):
        args = args_for_worker(wid)
        fn(*args)  # compile and warm the cache
        barrier.wait()
        calls = 0
        t0 = time.perf_counter()
        while True:
            fn(*args)
            calls += 1
            el = time.perf_counter() - t0
            if el >= duration:
                return calls, el

    if workers == 1:
        return [body(0)]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(body, range(workers)))


def _calibrate(fn, args, target: float = 0.01) -> int:
    """Smallest power-of-two repeat count whose call lasts at least ``target`` seconds."""
    fn(*args[:-1], 1)  # compile outside the timed calls
    reps = 1
    while True:
        t0 = time.perf_counter()
        fn(*args[:-1], reps)
        if time.perf_counter() - t0 >= target or reps >= 1 << 24:
            return reps
        reps *= 2


def bench_peak_flops(duration: float = 0.5, workers: int = 1, precision="double") -> float:
    """Sustained GFLOP/s of a multiply-add chain on in-cache data, best over unroll depths."""
    if duration < 0.1:
        raise ConfigError(f"duration must be at least 0.1 s, got {duration}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    dtype = dtype_of(precision)
    alpha = dtype.type(0.5)
    best = 0.0
    per_depth = duration / len(UNROLL_DEPTHS)
    for depth, kern in _FMA_KERNELS.items():
        data = np.full(_FMA_ELEMS, 1.0, dtype=dtype)
        reps = _calibrate(kern, (data, alpha, 1))
        flops_per_call = 2 * depth * _FMA_ELEMS * reps
        for _ in range(3):
            res = _timed_loop(kern, lambda wid: (np.full(_FMA_ELEMS, 1.0, dtype=dtype), alpha, reps), workers, per_depth / 3)
            best = max(best, sum(calls * flops_per_call / el for calls, el in res) / 1e9)
    return best


DEFAULT_BW_SIZES = tuple(1 << k for k in range(12, 29))  # 4 KiB .. 256 MiB


def bench_bandwidth(sizes=DEFAULT_BW_SIZES, workers: int = 1, duration: float = 0.05,
                    precision="double") -> list[tuple[int, float]]:
    """Read-multiply-write sweep rate (bytes/s) per working-set size in bytes (per worker)."""
    sizes = sorted(int(s) for s in sizes)
    if not sizes:
        raise ConfigError("no working-set sizes given")
    if sizes[0] < 4096:
        raise ConfigError(f"working-set sizes must be >= 4 KiB, got {sizes[0]}")
    if sizes[-1] < 1000 * sizes[0]:
        raise ConfigError("working-set sizes must span at least 3 decades")
    dtype = dtype_of(precision)
    alpha = dtype.type(1.0)
    out = []
    for size in sizes:
        n = max(1, size // dtype.itemsize)
        x = np.ones(n, dtype=dtype)
        reps = _calibrate(_scale_sweep, (x, alpha, 1), target=duration / 10)
        moved = 2 * n * dtype.itemsize * reps
        best = 0.0
        for _ in range(3):
            res = _timed_loop(_scale_sweep, lambda wid: (np.ones(n, dtype=dtype), alpha, reps), workers, duration / 3)
            best = max(best, sum(calls * moved / el for calls, el in res))
        out.append((size, best))
    return out


def detect_plateaus(samples: list[tuple[int, float]]) -> list[tuple[str, float]]:
    """Collapse a bandwidth sweep into the ``L-near``, ``L-mid`` and ``MEM`` levels.

    Each decade of working-set size contributes the median of its rates; the
    first decade is L-near, the middle one L-mid and the last MEM.  A running
    minimum keeps the levels non-increasing toward memory.
    """
    decades: dict[int, list[float]] = {}
    for size, rate in samples:
        decades.setdefault(int(math.floor(math.log10(size))), []).append(rate)
    keys = sorted(decades)
    if len(keys) < 3:
        raise ConfigError("bandwidth samples must span at least 3 size decades")
    meds = [statistics.median(decades[k]) for k in keys]
    picks = [meds[0], meds[len(meds) // 2], meds[-1]]
    levels = []
    last = math.inf
    for label, bw in zip(LEVELS, picks):
        last = min(last, bw)
        levels.append((label, last))
    return levels


def characterize(duration: float = 1.0, workers: int = 1, sizes=DEFAULT_BW_SIZES) -> MachineProfile:
    """Measure both precisions' peaks and the bandwidth levels."""
    peaks = {p: bench_peak_flops(duration, workers, p) for p in ("single", "double")}
    bw = bench_bandwidth(sizes, workers, duration=max(0.02, duration / len(sizes)))
    return MachineProfile(peaks, detect_plateaus(bw)).validate()
