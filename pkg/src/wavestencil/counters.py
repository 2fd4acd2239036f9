"""Access and FLOP counter layout shared by every kernel.

Kernels receive a small int64 array and bump slots by index; the slots are
turned into a :class:`CounterReport` after a step.  ``SEMI_*`` slots are a
second view of traffic already counted in the global/scratch slots.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

U_LOADS = 0  # u^n reads feeding arithmetic directly from the grid
PREV_LOADS = 1  # u^{n-1} reads
V_LOADS = 2
ETA_LOADS = 3
U_FILL = 4  # u^n grid reads copied into scratch or a register window
ETA_FILL = 5
STORES = 6  # u^{n+1} grid writes
SCRATCH_LOADS = 7
SCRATCH_STORES = 8
FLOPS = 9
CELLS = 10
SEMI_LOADS = 11  # semi-axis window reads during two-phase sweep steps
SEMI_STORES = 12  # partial + final stores during two-phase sweep steps
SEMI_FILL_LOADS = 13  # same, for pipeline fill/drain steps
SEMI_FILL_STORES = 14
NCOUNTERS = 15


def new_counter_array(n: int = 1) -> np.ndarray:
    return np.zeros((n, NCOUNTERS), dtype=np.int64)


@dataclass
class CounterReport:
    u_loads: int = 0
    prev_loads: int = 0
    v_loads: int = 0
    eta_loads: int = 0
    u_fill: int = 0
    eta_fill: int = 0
    stores: int = 0
    scratch_loads: int = 0
    scratch_stores: int = 0
    flops: int = 0
    cells: int = 0
    semi_loads: int = 0
    semi_stores: int = 0
    semi_fill_loads: int = 0
    semi_fill_stores: int = 0

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "CounterReport":
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim == 2:
            arr = arr.sum(axis=0)
        return cls(*(int(x) for x in arr))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.int64)

    def __add__(self, other: "CounterReport") -> "CounterReport":
        return CounterReport.from_array(self.to_array() + other.to_array())

    def scaled(self, factor: int) -> "CounterReport":
        return CounterReport.from_array(self.to_array() * int(factor))

    @property
    def global_loads(self) -> int:
        return (
            self.u_loads + self.prev_loads + self.v_loads + self.eta_loads + self.u_fill + self.eta_fill
        )

    @property
    def global_stores(self) -> int:
        return self.stores

    @property
    def scratch_accesses(self) -> int:
        return self.scratch_loads + self.scratch_stores

    def per_cell(self, name: str) -> float:
        return getattr(self, name) / self.cells if self.cells else 0.0


def merge(reports) -> CounterReport:
    total = CounterReport()
    for r in reports:
        total = total + r
    return total
