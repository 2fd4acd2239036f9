"""Acoustic isotropic update with a damping layer, and the reference propagator.

The update advanced every step is::

    inner:  u+ = 2u - u- + dt^2 V^2 L(u)
    PML:    u+ = [2u - (1 - eta dt) u- + dt^2 V^2 (L(u) + dt grad(eta).grad(u))] / (1 + eta dt)

where ``L`` is the 25-point, 8th-order Laplacian and the gradients are
2-point central differences.  The cell-level functions in this module are
numba-compiled and shared by every kernel variant, so all variants evaluate
the same expressions in the same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from . import counters as C
from .counters import CELLS, ETA_LOADS, FLOPS, PREV_LOADS, STORES, U_LOADS, V_LOADS
from .decomp import RADIUS, Box, Region, RegionKind, decompose
from .errors import ConfigError, InstabilityError
from .grid import Extents, Grid3, alloc, dtype_of, max_abs

# Standard 8th-order central second-derivative weights (center, m = 1..4).
ORDER8_WEIGHTS = (
    Fraction(-205, 72),
    Fraction(8, 5),
    Fraction(-1, 5),
    Fraction(8, 315),
    Fraction(-1, 560),
)

# FLOPs per cell, counted from the expressions below.
# Laplacian: 1 center mul + 12 x (pair add, mul, accumulate add).
FLOPS_LAPLACIAN = 1 + 12 * 3
# Semi-stencil Laplacian: z pairs are split into 8 separate mul + add terms.
FLOPS_LAPLACIAN_SEMI = 1 + 8 * 3 + 8 * 2
# forward phase: center, x and y pairs, lower z half; backward phase: upper z half
FLOPS_SEMI_FORWARD = 1 + 8 * 3 + 4 * 2
FLOPS_SEMI_BACKWARD = 4 * 2
# u+u, -u_prev, v*v, dt2*, *lap, +
FLOPS_INNER_UPDATE = 6
# gradient: 3 x (sub, sub, mul) + 2 adds + scale mul
FLOPS_PML_GRADIENT = 3 * 3 + 2 + 1
# lap+g, v*v, dt2*, *(lap+g), u+u, eta*dt, 1-ed, *u_prev, -, +, 1+ed, /
FLOPS_PML_UPDATE = 12
FLOPS_INNER = FLOPS_LAPLACIAN + FLOPS_INNER_UPDATE
FLOPS_PML = FLOPS_LAPLACIAN + FLOPS_PML_GRADIENT + FLOPS_PML_UPDATE
FLOPS_INNER_SEMI = FLOPS_LAPLACIAN_SEMI + FLOPS_INNER_UPDATE
FLOPS_PML_SEMI = FLOPS_LAPLACIAN_SEMI + FLOPS_PML_GRADIENT + FLOPS_PML_UPDATE
# v*v, dt2*, *w, +
FLOPS_SOURCE = 4

# index of entries in the packed parameter array handed to kernels
P_DT2, P_DT, P_GSCALE, P_ONE = 0, 1, 2, 3


@dataclass(frozen=True)
class StencilCoeffs:
    c_xyz: float
    c_x: tuple[float, float, float, float]
    c_y: tuple[float, float, float, float]
    c_z: tuple[float, float, float, float]

    def as_array(self, dtype=np.float64) -> np.ndarray:
        """Pack as ``[c_xyz, c_x1..4, c_y1..4, c_z1..4]``."""
        return np.array([self.c_xyz, *self.c_x, *self.c_y, *self.c_z], dtype=dtype)

    def residual(self) -> float:
        """``c_xyz + 2*sum(all axis weights)``; zero for a consistent Laplacian."""
        return self.c_xyz + 2.0 * (sum(self.c_x) + sum(self.c_y) + sum(self.c_z))


def make_coeffs_order8(h: float) -> StencilCoeffs:
    if not h > 0:
        raise ConfigError(f"grid spacing must be positive, got {h}")
    h2 = h * h
    axis = tuple(float(wt) / h2 for wt in ORDER8_WEIGHTS[1:])
    center = float(3 * ORDER8_WEIGHTS[0]) / h2
    return StencilCoeffs(center, axis, axis, axis)


@dataclass(frozen=True)
class Domain:
    extents: Extents
    pml_width: int
    h: float = 10.0
    pad: int = RADIUS

    def __post_init__(self):
        if self.pad < RADIUS:
            raise ConfigError(f"pad {self.pad} smaller than stencil radius {RADIUS}")
        if not self.h > 0:
            raise ConfigError(f"grid spacing must be positive, got {self.h}")
        decompose(self.extents, self.pml_width)  # validates the width

    def regions(self) -> list[Region]:
        return decompose(self.extents, self.pml_width)

    @property
    def inner(self) -> Region:
        return self.regions()[0]


@dataclass(frozen=True)
class TimeParams:
    dt: float
    steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise ConfigError(f"steps must be non-negative, got {self.steps}")


@dataclass
class SourceTerm:
    location: tuple[int, int, int]
    wavelet: np.ndarray


@dataclass
class Medium:
    velocity: Grid3
    eta: Grid3

    def validate(self, domain: Domain) -> None:
        for name, g in (("velocity", self.velocity), ("eta", self.eta)):
            if g.extents != domain.extents or g.pad != domain.pad:
                raise ConfigError(f"{name} grid shape does not match the domain")
        if np.any(self.velocity.interior <= 0):
            raise ConfigError("velocity must be positive everywhere")
        if np.any(self.eta.interior < 0):
            raise ConfigError("eta must be non-negative")
        inner = domain.inner
        (i0, j0, k0), (i1, j1, k1) = inner.lo, inner.hi
        if np.any(self.eta.interior[k0:k1, j0:j1, i0:i1] != 0):
            raise ConfigError("eta must vanish in the inner region")

    @property
    def vmax(self) -> float:
        return float(self.velocity.interior.max())

    @property
    def vmin(self) -> float:
        return float(self.velocity.interior.min())


def default_dt(h: float, vmax: float) -> float:
    return 0.4 * h / vmax


def cfl_limit(h: float, vmax: float) -> float:
    """Leapfrog bound ``dt <= 2 / (V sqrt(lambda_max))`` for the 3D order-8 Laplacian."""
    w = [float(x) for x in ORDER8_WEIGHTS]
    # largest symbol magnitude per axis, attained at the Nyquist wavenumber
    per_axis = abs(w[0] + 2 * sum(wm * (-1) ** m for m, wm in enumerate(w[1:], start=1)))
    return 2.0 * h / (vmax * math.sqrt(3 * per_axis))


def ricker(f_peak: float, t0: float, dt: float, T: int) -> np.ndarray:
    if not f_peak > 0:
        raise ConfigError(f"f_peak must be positive, got {f_peak}")
    t = np.arange(T, dtype=np.float64) * dt - t0
    a = (np.pi * f_peak * t) ** 2
    return (1.0 - 2.0 * a) * np.exp(-a)


def auto_f_peak(vmin: float, h: float, points_per_wavelength: float = 10.0) -> float:
    return vmin / (points_per_wavelength * h)


def eta_profile(extents: Extents, w: int, eta_max: float, pad: int = RADIUS, precision="double") -> Grid3:
    """Quadratic damping ``eta_max * (d / w)^2``, ``d`` the Chebyshev cell distance to the inner region."""
    g = alloc(extents, pad, precision)
    if w == 0:
        return g
    dists = []
    for n in (extents.nx, extents.ny, extents.nz):
        idx = np.arange(n)
        dists.append(np.maximum(np.maximum(w - idx, 0), np.maximum(idx - (n - 1 - w), 0)))
    dx, dy, dz = dists
    d = np.maximum(np.maximum(dz[:, None, None], dy[None, :, None]), dx[None, None, :])
    g.interior[...] = eta_max * (d / w) ** 2
    return g


def constant_field(extents: Extents, value: float, pad: int = RADIUS, precision="double") -> Grid3:
    g = alloc(extents, pad, precision)
    g.interior[...] = value
    return g


def layered_velocity(extents: Extents, layers, pad: int = RADIUS, precision="double") -> Grid3:
    """``layers`` is a sequence of ``(z_top, velocity)``; each layer extends down to the next."""
    layers = sorted(layers)
    if not layers or layers[0][0] != 0:
        raise ConfigError("the first velocity layer must start at z = 0")
    g = alloc(extents, pad, precision)
    bounds = [z for z, _ in layers[1:]] + [extents.nz]
    for (z0, v), z1 in zip(layers, bounds):
        g.interior[z0:z1] = v
    return g


def random_velocity(
    extents: Extents, rng: np.random.Generator, vmin: float, vmax: float, pad: int = RADIUS, precision="double"
) -> Grid3:
    g = alloc(extents, pad, precision)
    g.interior[...] = rng.uniform(vmin, vmax, size=g.interior.shape)
    return g


def kernel_params(dt: float, h: float, dtype) -> np.ndarray:
    return np.array([dt * dt, dt, dt / (4.0 * h * h), 1.0], dtype=dtype)


# --- cell-level primitives -------------------------------------------------


@njit(inline="always")
def lap25(u, k, j, i, c):
    acc = c[0] * u[k, j, i]
    for m in range(1, 5):
        acc += c[m] * (u[k, j, i + m] + u[k, j, i - m])
    for m in range(1, 5):
        acc += c[4 + m] * (u[k, j + m, i] + u[k, j - m, i])
    for m in range(1, 5):
        acc += c[8 + m] * (u[k + m, j, i] + u[k - m, j, i])
    return acc


@njit(inline="always")
def inner_value(ucur, uprev, v, lap, prm):
    return (ucur + ucur - uprev) + (prm[0] * (v * v)) * lap


@njit(inline="always")
def grad_terms(exp_, exm, uxp, uxm, eyp, eym, uyp, uym, ezp, ezm, uzp, uzm, prm):
    gx = (exp_ - exm) * (uxp - uxm)
    gy = (eyp - eym) * (uyp - uym)
    gz = (ezp - ezm) * (uzp - uzm)
    return (gx + gy + gz) * prm[2]


@njit(inline="always")
def pml_grad(e, ek, ej, ei, u, uk, uj, ui, prm):
    """Damping gradient term; ``(ek, ej, ei)`` / ``(uk, uj, ui)`` index the same cell in two arrays."""
    return grad_terms(
        e[ek, ej, ei + 1], e[ek, ej, ei - 1], u[uk, uj, ui + 1], u[uk, uj, ui - 1],
        e[ek, ej + 1, ei], e[ek, ej - 1, ei], u[uk, uj + 1, ui], u[uk, uj - 1, ui],
        e[ek + 1, ej, ei], e[ek - 1, ej, ei], u[uk + 1, uj, ui], u[uk - 1, uj, ui],
        prm,
    )


@njit(inline="always")
def pml_value(ucur, uprev, v, eta, lap, g, prm):
    ed = eta * prm[1]
    one = prm[3]
    return ((ucur + ucur - (one - ed) * uprev) + (prm[0] * (v * v)) * (lap + g)) / (one + ed)


@njit(nogil=True, cache=True)
def inner_box(up, uc, vel, c, prm, z0, z1, y0, y1, x0, x1):
    for k in range(z0, z1):
        for j in range(y0, y1):
            for i in range(x0, x1):
                lap = lap25(uc, k, j, i, c)
                up[k, j, i] = inner_value(uc[k, j, i], up[k, j, i], vel[k, j, i], lap, prm)


@njit(nogil=True, cache=True)
def pml_box(up, uc, vel, eta, c, prm, z0, z1, y0, y1, x0, x1):
    for k in range(z0, z1):
        for j in range(y0, y1):
            for i in range(x0, x1):
                lap = lap25(uc, k, j, i, c)
                g = pml_grad(eta, k, j, i, uc, k, j, i, prm)
                up[k, j, i] = pml_value(uc[k, j, i], up[k, j, i], vel[k, j, i], eta[k, j, i], lap, g, prm)


@njit(nogil=True, cache=True)
def reference_sweep(up, uc, vel, eta, c, prm, ilo, ihi, pad, n, cnt, inst):
    """One time step over the whole extended domain with a per-cell region test."""
    for k in range(pad, pad + n[2]):
        for j in range(pad, pad + n[1]):
            for i in range(pad, pad + n[0]):
                inside = (
                    ilo[0] <= i < ihi[0] and ilo[1] <= j < ihi[1] and ilo[2] <= k < ihi[2]
                )
                lap = lap25(uc, k, j, i, c)
                if inside:
                    up[k, j, i] = inner_value(uc[k, j, i], up[k, j, i], vel[k, j, i], lap, prm)
                else:
                    g = pml_grad(eta, k, j, i, uc, k, j, i, prm)
                    up[k, j, i] = pml_value(
                        uc[k, j, i], up[k, j, i], vel[k, j, i], eta[k, j, i], lap, g, prm
                    )
                if inst:
                    cnt[U_LOADS] += 25
                    cnt[PREV_LOADS] += 1
                    cnt[V_LOADS] += 1
                    cnt[STORES] += 1
                    cnt[CELLS] += 1
                    if inside:
                        cnt[FLOPS] += FLOPS_INNER
                    else:
                        cnt[ETA_LOADS] += 7
                        cnt[FLOPS] += FLOPS_PML


# --- grid-level operations -------------------------------------------------


def _box_bounds(cells: Box, pad: int):
    (i0, j0, k0), (i1, j1, k1) = cells.lo, cells.hi
    return k0 + pad, k1 + pad, j0 + pad, j1 + pad, i0 + pad, i1 + pad


def laplacian25(u: Grid3, c: StencilCoeffs, p: tuple[int, int, int]) -> float:
    i, j, k = p
    pad = u.pad
    if pad < RADIUS:
        raise ConfigError("laplacian25 needs pad >= 4")
    return float(lap25(u.array, k + pad, j + pad, i + pad, c.as_array(u.dtype)))


def step_inner(u_prev: Grid3, u_cur: Grid3, medium: Medium, c: StencilCoeffs, dt: float, cells: Box, h: float = 10.0):
    """Overwrite ``u_prev`` with the next inner-region state over ``cells``."""
    dtype = u_cur.dtype
    inner_box(
        u_prev.array, u_cur.array, medium.velocity.array, c.as_array(dtype), kernel_params(dt, h, dtype),
        *_box_bounds(cells, u_cur.pad),
    )


def step_pml(u_prev: Grid3, u_cur: Grid3, medium: Medium, c: StencilCoeffs, dt: float, cells: Box, h: float = 10.0):
    """Overwrite ``u_prev`` with the next damped state over ``cells``."""
    dtype = u_cur.dtype
    pml_box(
        u_prev.array, u_cur.array, medium.velocity.array, medium.eta.array, c.as_array(dtype),
        kernel_params(dt, h, dtype), *_box_bounds(cells, u_cur.pad),
    )


def inject_source(u: Grid3, src: SourceTerm, medium: Medium, dt: float, n: int, cnt=None) -> None:
    if not 0 <= n < len(src.wavelet):
        raise IndexError(f"source step {n} outside wavelet of length {len(src.wavelet)}")
    t = u.dtype.type
    v = t(medium.velocity[src.location])
    u[src.location] = u[src.location] + (t(dt * dt) * (v * v)) * t(src.wavelet[n])
    if cnt is not None:
        cnt[C.U_LOADS] += 1
        cnt[C.V_LOADS] += 1
        cnt[C.STORES] += 1
        cnt[C.FLOPS] += FLOPS_SOURCE


def check_source(domain: Domain, src: SourceTerm, steps: int) -> None:
    inner = domain.inner
    if not inner.contains(*src.location):
        raise ConfigError(f"source location {src.location} is not inside the inner region")
    if len(src.wavelet) < steps:
        raise ConfigError(f"wavelet has {len(src.wavelet)} samples, need {steps}")


def new_wavefields(domain: Domain, precision) -> tuple[Grid3, Grid3]:
    return alloc(domain.extents, domain.pad, precision), alloc(domain.extents, domain.pad, precision)


def reference_propagate(
    domain: Domain,
    medium: Medium,
    coeffs: StencilCoeffs,
    time: TimeParams,
    src: SourceTerm,
    *,
    precision=None,
    check_interval: int = 10,
    counters: np.ndarray | None = None,
    on_step=None,
) -> tuple[Grid3, Grid3]:
    """Run the time loop with the single-sweep oracle; returns ``(u_cur, u_prev)``.

    ``on_step(n, u_cur)`` is called after each completed step ``n`` (1-based).
    """
    precision = precision or medium.velocity.precision
    dtype = dtype_of(precision)
    check_source(domain, src, time.steps)
    uprev, ucur = new_wavefields(domain, precision)
    inner = domain.inner
    pad = domain.pad
    ilo = np.array([a + pad for a in inner.lo], dtype=np.int64)
    ihi = np.array([a + pad for a in inner.hi], dtype=np.int64)
    n = np.array(domain.extents.as_tuple(), dtype=np.int64)
    c = coeffs.as_array(dtype)
    prm = kernel_params(time.dt, domain.h, dtype)
    vel = medium.velocity.array.astype(dtype, copy=False)
    eta = medium.eta.array.astype(dtype, copy=False)
    inst = counters is not None
    cnt = counters if inst else np.zeros(C.NCOUNTERS, dtype=np.int64)
    for step in range(time.steps):
        reference_sweep(uprev.array, ucur.array, vel, eta, c, prm, ilo, ihi, pad, n, cnt, inst)
        uprev, ucur = ucur, uprev
        inject_source(ucur, src, medium, time.dt, step, cnt if inst else None)
        if check_interval and ((step + 1) % check_interval == 0 or step + 1 == time.steps):
            if not np.isfinite(max_abs(ucur)):
                raise InstabilityError(step + 1)
        if on_step is not None:
            on_step(step + 1, ucur)
    return ucur, uprev
