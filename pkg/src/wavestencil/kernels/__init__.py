"""Interchangeable time-step kernels: one code shape per variant."""

from ._compiled import slot
from .driver import (
    StepState,
    Stepper,
    VerifyReport,
    propagate,
    relative_errors,
    run_step,
    verify,
    verify_suite,
)
from .variants import (
    ALL_VARIANTS,
    DEFAULT_SCRATCH_BUDGET,
    DEFAULT_TILING2,
    DEFAULT_TILING3,
    KernelConfig,
    VariantId,
    default_suite,
    parse_variant,
)

__all__ = [
    "ALL_VARIANTS",
    "DEFAULT_SCRATCH_BUDGET",
    "DEFAULT_TILING2",
    "DEFAULT_TILING3",
    "KernelConfig",
    "StepState",
    "Stepper",
    "VariantId",
    "VerifyReport",
    "default_suite",
    "parse_variant",
    "propagate",
    "relative_errors",
    "run_step",
    "slot",
    "verify",
    "verify_suite",
]
