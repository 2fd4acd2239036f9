"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section at the end of the pytest run.
"""

import time

import numpy as np

from wavestencil.bench import CSV_COLUMNS, BenchPlan, read_csv, run_bench, write_csv
from wavestencil.cli import main
from wavestencil.counters import NCOUNTERS, CounterReport
from wavestencil.decomp import Box, Region, RegionKind, decompose, eta_halo_map, eta_halo_map_3pass, halo_cells
from wavestencil.grid import Extents, max_abs
from wavestencil.kernels import (
    ALL_VARIANTS,
    KernelConfig,
    StepState,
    VariantId,
    propagate,
    relative_errors,
    run_step,
    slot,
    verify_suite,
)
from wavestencil.metrics import achieved_pct, arithmetic_intensity, flop_model, flops_per_cell
from wavestencil.physics import new_wavefields
from wavestencil.scenario import Scenario


def test_c01_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    sc = Scenario.cube(48, 4, 50, seed=0)
    double = verify_suite([KernelConfig(v) for v in ALL_VARIANTS], sc)
    single = verify_suite([KernelConfig(v, precision="single") for v in ALL_VARIANTS], sc)
    el = time.perf_counter() - t0
    bad = [r.variant for r in double if not r.within(1e-12, 1e-11)]
    bad += [r.variant + "/f32" for r in single if not r.within(1e-4)]
    worst_d = max(r.rel_l2 for r in double)
    worst_s = max(r.rel_l2 for r in single)
    criterion(1, not bad and el < 60.0,
              f"9 variants x 2 precisions, worst rel_L2 f64 {worst_d:.2e} f32 {worst_s:.2e}, {el:.1f} s"
              + (f", failing {bad}" if bad else ""))


def _membership_ok(extents, w):
    nx, ny, nz = extents.as_tuple()
    cnt = np.zeros((nz, ny, nx), dtype=np.int32)
    for r in decompose(extents, w):
        (i0, j0, k0), (i1, j1, k1) = r.lo, r.hi
        cnt[k0:k1, j0:j1, i0:i1] += 1
    return bool(np.all(cnt == 1))


def test_c02_decomposition_partition(criterion):
    rng = np.random.default_rng(2)
    failures = 0
    for _ in range(200):
        e = Extents(*(int(x) for x in rng.integers(1, 41, size=3)))
        w = int(rng.integers(0, (min(e.as_tuple()) - 1) // 2 + 1))
        failures += not _membership_ok(e, w)
    vols = [r.volume for r in decompose(Extents.cube(12), 2)]
    table = (vols[0], vols[1] + vols[2], vols[3] + vols[4], vols[5] + vols[6]) == (512, 576, 384, 256)
    criterion(2, failures == 0 and table and sum(vols) == 1728,
              f"200 random (extents, w): {failures} failures; 12^3/w=2 volumes {vols}")


def test_c03_halo_map_bijection(criterion):
    details = []
    ok = True
    for nt in (4, 8, 16):
        one = [eta_halo_map(z, x, y, nt) for z in range(8) for x in range(nt) for y in range(nt)]
        one = [e.global_ for e in one if e is not None]
        three = [eta_halo_map_3pass(a, s, u, v, nt).global_
                 for a in range(3) for s in range(2) for u in range(nt) for v in range(nt)]
        ref = set(halo_cells(Box((0, 0, 0), (nt, nt, nt)), 1))
        good = (len(one) == len(set(one)) == 6 * nt * nt and len(three) == len(set(three)) == 6 * nt * nt
                and set(one) == set(three) == ref)
        ok &= good
        details.append(f"nt={nt}:{len(set(one))}")
    criterion(3, ok, "one-conditional and per-axis maps equal the face set, " + " ".join(details))


def _tile_counters(name):
    dom, med, c, tp, _ = Scenario.cube(24, 4, 1).build()
    up, uc = new_wavefields(dom, "double")
    uc.interior[...] = 1.0
    tile = Region((8, 8, 8), (8, 8, 8), RegionKind.INNER)
    return run_step(KernelConfig.from_name(name, instrument=True), StepState(up, uc, med, c, tp.dt, 4), [tile])


def test_c04_load_store_counters(criterion):
    g = _tile_counters("gmem_8x8x8")
    s = _tile_counters("semi_8x8x8")
    u_per_cell = g.u_loads / g.cells
    ratio_ok = s.semi_loads * 2 == s.semi_stores * 5
    criterion(4, u_per_cell == 25 and ratio_ok,
              f"gmem u-loads/cell {u_per_cell:g}; semi axis loads:stores {s.semi_loads}:{s.semi_stores}")


def test_c05_streaming_equivalence(criterion):
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(14, 26))
        w = int(rng.integers(2, 5))
        sc = Scenario(Extents(n, int(rng.integers(14, 26)), int(rng.integers(14, 26))), w, 15, seed=seed)
        parts = sc.build()
        outs = [propagate(KernelConfig(v), *parts)[0]
                for v in (VariantId.STREAM_PLANES, VariantId.STREAM_SHIFT, VariantId.STREAM_FIXED)]
        for a in range(3):
            for b in range(a + 1, 3):
                worst = max(worst, relative_errors(outs[a], outs[b])[1])
    slots_ok = (slot(0, 4), slot(1, 4), slot(9, 4)) == (8, 0, 8)
    criterion(5, worst <= 1e-14 and slots_ok, f"10 scenarios, worst pairwise rel_Linf {worst:.2e}; slot() examples exact")


def test_c06_flop_model_consistency(criterion):
    sc = Scenario.cube(20, 3, 5)
    dom, med, c, tp, src = sc.build()
    mismatches = []
    for v in ALL_VARIANTS:
        cnt = np.zeros(NCOUNTERS, dtype=np.int64)
        propagate(KernelConfig(v, instrument=True), dom, med, c, tp, src, counters=cnt)
        if CounterReport.from_array(cnt).flops != flop_model(dom.extents, 3, 5, v):
            mismatches.append(v.value)
    inner = flops_per_cell()[0]
    aggregate = 4.453e13 / 1e12
    in_band = 35 <= inner <= 55 and abs(inner - aggregate) / aggregate <= 0.25
    criterion(6, not mismatches and in_band,
              f"model == counters for {9 - len(mismatches)}/9 variants; inner {inner} FLOP/cell-step vs aggregate {aggregate:.2f}")


def test_c07_roofline_arithmetic(criterion):
    ai = arithmetic_intensity(4.453e13, 7.26e11 * 32)
    pct = achieved_pct(770.0, 1498.0)
    criterion(7, abs(ai - 1.92) <= 0.01 and abs(pct - 51.4) <= 0.2, f"AI {ai:.4f}, achieved {pct:.2f}%")


def test_c08_stability_and_symmetry(criterion):
    sc = Scenario.cube(49, 4, 500, medium="homogeneous", centered=True)
    dom, med, c, tp, src = sc.build()
    u, _ = propagate(KernelConfig(VariantId.GLOBAL3D), dom, med, c, tp, src)
    a = u.interior
    peak = max_abs(u)
    sym = max(float(np.abs(a - np.flip(a, axis=ax)).max()) for ax in range(3)) / peak
    criterion(8, np.isfinite(peak) and sym <= 1e-12,
              f"49^3, 500 steps at dt={tp.dt:.3g}: max|u| {peak:.3e}, reflection error {sym:.2e}")


def test_c09_protocol_fidelity(criterion, tmp_path):
    configs = [KernelConfig(v) for v in ALL_VARIANTS if v is not VariantId.REFERENCE]
    plan = BenchPlan(Scenario.cube(128, 8, 50), configs)
    runs = []
    t0 = time.perf_counter()
    recs = run_bench(plan, on_run=lambda n, k: runs.append((n, k)))
    el = time.perf_counter() - t0
    path = tmp_path / "bench.csv"
    write_csv(recs, path)
    rows = read_csv(path)
    protocol = all([k for n, k in runs if n == cfg.name] == ["warmup"] + ["timed"] * 5 for cfg in configs)
    complete = len(rows) == len(configs) >= 6 and all(all(r[c] != "" for c in CSV_COLUMNS if not c.startswith("pct")) for r in rows)
    fastest = min(recs, key=lambda r: r.mean_s)
    criterion(9, protocol and complete and el < 300.0,
              f"{len(rows)} variants x (1 warmup + 5 timed) at 128^3/50 steps in {el:.0f} s; fastest {fastest.variant} (reported only)")


RUN_CFG = """
seed = 11
[geometry]
extents = [22, 20, 18]
pml_width = 3
[medium]
kind = "random"
[time]
steps = 12
[kernel]
variant = "{variant}"
workers = {workers}
[output]
snapshot_interval = 4
dir = "{out}"
"""


def test_c10_determinism(criterion, tmp_path, capsys):
    digests = {}
    for v in ALL_VARIANTS:
        for workers in (1, 2, 3):
            for rep in range(2):
                out = tmp_path / f"{v.value}_{workers}_{rep}"
                cfg = tmp_path / f"{v.value}_{workers}_{rep}.toml"
                cfg.write_text(RUN_CFG.format(variant=v.value, workers=workers, out=out))
                assert main(["run", "--config", str(cfg)]) == 0
                digests[(v, workers, rep)] = tuple(p.read_bytes() for p in sorted(out.glob("*.wvf")))
    capsys.readouterr()
    runs_equal = all(digests[(v, w, 0)] == digests[(v, w, 1)] for v, w, _ in digests)
    # per variant, every worker count gives the same bytes (variants may differ in the last bits)
    workers_equal = all(digests[(v, w, 0)] == digests[(v, 1, 0)] for v, w, _ in digests)
    nfiles = len(next(iter(digests.values())))
    criterion(10, runs_equal and workers_equal and nfiles == 3,
              f"{len(digests)} runs ({len(ALL_VARIANTS)} variants x workers 1,2,3 x 2): snapshots bit-identical per variant")
