"""Seeded test/benchmark scenarios: geometry, medium, time step and source."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import RADIUS
from .errors import ConfigError
from .grid import Extents
from .physics import (
    Domain,
    Medium,
    SourceTerm,
    StencilCoeffs,
    TimeParams,
    auto_f_peak,
    constant_field,
    default_dt,
    eta_profile,
    make_coeffs_order8,
    random_velocity,
    ricker,
)


@dataclass(frozen=True)
class Scenario:
    """A reproducible propagation setup.

    ``medium`` is ``"random"`` (uniform in ``[vmin, vmax]``) or ``"homogeneous"``
    (``vmax`` everywhere).  ``source`` defaults to a seeded random inner cell,
    or to the domain center when ``centered`` is set.
    """

    extents: Extents
    w: int
    steps: int
    seed: int = 0
    h: float = 10.0
    vmin: float = 1500.0
    vmax: float = 4500.0
    eta_max: float = 100.0
    medium: str = "random"
    source: tuple[int, int, int] | None = None
    centered: bool = False
    amplitude: float = 1.0

    @classmethod
    def cube(cls, n: int, w: int, steps: int, **kw) -> "Scenario":
        return cls(Extents.cube(n), w, steps, **kw)

    def build(self):
        """Return ``(domain, medium, coeffs, time, src)`` in double precision."""
        if self.medium not in ("random", "homogeneous"):
            raise ConfigError(f"unknown scenario medium {self.medium!r}")
        rng = np.random.default_rng(self.seed)
        domain = Domain(self.extents, self.w, self.h, RADIUS)
        if self.medium == "random":
            vel = random_velocity(self.extents, rng, self.vmin, self.vmax)
        else:
            vel = constant_field(self.extents, self.vmax)
        eta = eta_profile(self.extents, self.w, self.eta_max)
        medium = Medium(vel, eta)
        medium.validate(domain)
        inner = domain.inner
        if self.source is not None:
            loc = tuple(self.source)
        elif self.centered:
            loc = tuple(n // 2 for n in self.extents.as_tuple())
        else:
            loc = tuple(int(rng.integers(lo, hi)) for lo, hi in zip(inner.lo, inner.hi))
        dt = default_dt(self.h, medium.vmax)
        f_peak = auto_f_peak(medium.vmin, self.h)
        wavelet = self.amplitude * ricker(f_peak, 1.0 / f_peak, dt, max(self.steps, 1))
        coeffs: StencilCoeffs = make_coeffs_order8(self.h)
        return domain, medium, coeffs, TimeParams(dt, self.steps), SourceTerm(loc, wavelet)
