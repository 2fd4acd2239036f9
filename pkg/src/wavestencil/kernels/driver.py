"""Region dispatch, the worker pool and the variant time loop."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass

import numpy as np

from .. import counters as C
from ..counters import CounterReport
from ..decomp import Region, cached_tiles
from ..errors import InstabilityError
from ..grid import Grid3, dtype_of, max_abs
from ..physics import (
    Domain,
    Medium,
    SourceTerm,
    StencilCoeffs,
    TimeParams,
    check_source,
    inject_source,
    kernel_params,
    new_wavefields,
    reference_propagate,
    reference_sweep,
)
from ..scenario import Scenario
from . import _compiled as K
from .variants import KernelConfig, VariantId


@dataclass
class StepState:
    u_prev: Grid3
    u_cur: Grid3
    medium: Medium
    coeffs: StencilCoeffs
    dt: float
    pml_width: int
    h: float = 10.0


def _chunks(tiles: np.ndarray, parts: int) -> list[np.ndarray]:
    if len(tiles) == 0:
        return []
    return [c for c in np.array_split(tiles, min(parts, len(tiles))) if len(c)]


class Stepper:
    """Prepared per-step work for one variant on one domain.

    Each region becomes one dispatch; its tiles are split into contiguous
    chunks, one per worker, and every chunk owns a row of the counter array so
    no counter is shared between threads.
    """

    def __init__(self, config: KernelConfig, domain: Domain, medium: Medium, coeffs: StencilCoeffs,
                 dt: float, regions: list[Region] | None = None):
        self.config = config.validate()
        self.domain = domain
        dtype = dtype_of(config.precision)
        self.dtype = dtype
        self.c = coeffs.as_array(dtype)
        self.prm = kernel_params(dt, domain.h, dtype)
        self.vel = medium.velocity.array.astype(dtype, copy=False)
        self.eta = medium.eta.array.astype(dtype, copy=False)
        self.regions = domain.regions() if regions is None else list(regions)
        self.dispatches = self._plan()
        njobs = sum(len(d) for d in self.dispatches)
        self.cnt = C.new_counter_array(max(njobs, 1))
        self._pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None

    def _plan(self):
        cfg = self.config
        v = cfg.variant
        pad = self.domain.pad
        if v is VariantId.REFERENCE:
            inner = self.domain.inner
            ilo = np.array([a + pad for a in inner.lo], dtype=np.int64)
            ihi = np.array([a + pad for a in inner.hi], dtype=np.int64)
            n = np.array(self.domain.extents.as_tuple(), dtype=np.int64)
            return [[(reference_sweep, (ilo, ihi, pad, n))]]
        out = []
        for region in self.regions:
            pml = region.kind.is_pml
            tiling = cfg.tiling2 if v.streaming else cfg.tiling3
            tiles = cached_tiles(region, tiling, pad)
            if v is VariantId.GLOBAL3D:
                fn, extra = K.gmem_tiles, (pml,)
            elif v is VariantId.CACHED3D_U:
                fn, extra = K.smem_u_tiles, (pml,)
            elif v in (VariantId.PML_ETA3, VariantId.PML_ETA1):
                if pml:
                    fn, extra = K.eta_tiles, (v is VariantId.PML_ETA1, cfg.tiling3.Dx)
                else:
                    fn, extra = K.gmem_tiles, (False,)
            elif v is VariantId.SEMI:
                fn, extra = K.semi_tiles, (pml,)
            elif v is VariantId.STREAM_PLANES:
                fn, extra = K.st_planes_cols, (pml,)
            elif v is VariantId.STREAM_SHIFT:
                fn, extra = K.st_shift_cols, (pml,)
            else:
                fn, extra = K.st_fixed_cols, (pml,)
            jobs = [(fn, (chunk, *extra)) for chunk in _chunks(tiles, cfg.workers)]
            if jobs:
                out.append(jobs)
        return out

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def step(self, u_prev: Grid3, u_cur: Grid3) -> CounterReport | None:
        """Write ``u_next`` into ``u_prev``; returns this step's counters when instrumented."""
        inst = self.config.instrument
        if inst:
            self.cnt[:] = 0
        up, uc = u_prev.array, u_cur.array
        head = (self.vel, self.eta, self.c, self.prm)
        row = 0
        futures = []
        for jobs in self.dispatches:
            for fn, extra in jobs:
                args = (up, uc, *head, *extra, self.cnt[row], inst)
                if self._pool is None:
                    fn(*args)
                else:
                    futures.append(self._pool.submit(fn, *args))
                row += 1
        if futures:
            wait(futures)
            for f in futures:
                f.result()
        return CounterReport.from_array(self.cnt) if inst else None


def run_step(config: KernelConfig, state: StepState, regions: list[Region] | None = None) -> CounterReport | None:
    """One time step of ``config.variant``; ``u_next`` lands in ``state.u_prev``.

    ``regions`` restricts the dispatches to a subset of the seven regions
    (ignored by the reference sweep, which always covers the whole domain).
    """
    domain = Domain(state.u_cur.extents, state.pml_width, state.h, state.u_cur.pad)
    with Stepper(config, domain, state.medium, state.coeffs, state.dt, regions) as s:
        return s.step(state.u_prev, state.u_cur)


def propagate(config: KernelConfig, domain: Domain, medium: Medium, coeffs: StencilCoeffs,
              time: TimeParams, src: SourceTerm, *, check_interval: int = 10,
              counters: np.ndarray | None = None, on_step=None) -> tuple[Grid3, Grid3]:
    """Variant counterpart of :func:`reference_propagate`; returns ``(u_cur, u_prev)``.

    When ``config.instrument`` is set and ``counters`` is given, per-step
    counters (including source injection) are summed into it.
    """
    check_source(domain, src, time.steps)
    uprev, ucur = new_wavefields(domain, config.precision)
    inst = config.instrument and counters is not None
    src_cnt = np.zeros(C.NCOUNTERS, dtype=np.int64) if inst else None
    with Stepper(config, domain, medium, coeffs, time.dt) as stepper:
        for step in range(time.steps):
            rep = stepper.step(uprev, ucur)
            uprev, ucur = ucur, uprev
            inject_source(ucur, src, medium, time.dt, step, src_cnt)
            if inst:
                counters += rep.to_array()
            if check_interval and ((step + 1) % check_interval == 0 or step + 1 == time.steps):
                if not np.isfinite(max_abs(ucur)):
                    raise InstabilityError(step + 1)
            if on_step is not None:
                on_step(step + 1, ucur)
    if inst:
        counters += src_cnt
    return ucur, uprev


@dataclass(frozen=True)
class VerifyReport:
    variant: str
    precision: str
    rel_l2: float
    rel_linf: float

    def within(self, l2_tol: float, linf_tol: float = float("inf")) -> bool:
        return self.rel_l2 <= l2_tol and self.rel_linf <= linf_tol


def relative_errors(a: Grid3, ref: Grid3) -> tuple[float, float]:
    """Relative L2 and L-infinity norms of ``a - ref`` over non-padding cells."""
    x = np.asarray(a.interior, dtype=np.float64)
    r = np.asarray(ref.interior, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(r))):
        raise InstabilityError(-1, "non-finite values in compared wavefields")
    d = x - r
    n2 = float(np.linalg.norm(r.ravel()))
    ninf = float(np.max(np.abs(r))) if r.size else 0.0
    e2 = float(np.linalg.norm(d.ravel()))
    einf = float(np.max(np.abs(d))) if d.size else 0.0
    return (e2 / n2 if n2 else e2), (einf / ninf if ninf else einf)


def _corrupt(step: int, u: Grid3) -> None:
    # negative control: nudge one interior cell every step
    c = tuple(n // 2 for n in u.extents.as_tuple())
    u[c] = u[c] + u.dtype.type(1e-3)


def verify(config: KernelConfig, scenario: Scenario, *, reference: Grid3 | None = None,
           corrupt: bool = False) -> VerifyReport:
    """Propagate ``scenario`` with ``config`` and with the reference sweep; compare final fields.

    Pass a precomputed ``reference`` final field to skip the oracle run.
    """
    domain, medium, coeffs, time, src = scenario.build()
    if reference is None:
        reference = reference_propagate(domain, medium, coeffs, time, src, precision=config.precision)[0]
    u, _ = propagate(config, domain, medium, coeffs, time, src, on_step=_corrupt if corrupt else None)
    l2, linf = relative_errors(u, reference)
    return VerifyReport(config.name, config.precision, l2, linf)


def verify_suite(configs: list[KernelConfig], scenario: Scenario, *, corrupt: str | None = None) -> list[VerifyReport]:
    """Verify several configurations, running the oracle once per precision.

    ``corrupt`` names a variant (``config.name``) to perturb, as a negative control.
    """
    domain, medium, coeffs, time, src = scenario.build()
    refs: dict[str, Grid3] = {}
    out = []
    for cfg in configs:
        if cfg.precision not in refs:
            refs[cfg.precision] = reference_propagate(domain, medium, coeffs, time, src, precision=cfg.precision)[0]
        out.append(verify(cfg, scenario, reference=refs[cfg.precision], corrupt=(corrupt == cfg.name)))
    return out
