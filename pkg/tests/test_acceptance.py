"""Acceptance suite: one test per criterion, each printing a pass line with
its measured values and enforcing the stated tolerance and time budget."""

import random
import time

import pytest

from ggpu import data_text, shipped_tech_params
from ggpu.analysis import derated_speedup, load_benchmarks, raw_speedup
from ggpu.design import GGpuConfig, block_count_law, build_reference_design
from ggpu.docio import read_table1
from ggpu.planner import Spec, optimize_to_target
from ggpu.simt import (
    KernelWorkload,
    SimParams,
    bandwidth_lower_bound,
    build_sim_params,
    build_workload,
    compute_lower_bound,
    scaling_sweep,
    simulate,
)
from ggpu.tech import area_growth_summary, calibrate, design_memory_area, estimate_ppa
from ggpu.timing import build_timing_graph, critical_path
from ggpu.transforms import replay, split_memory_bits, split_memory_words


@pytest.fixture(scope="module")
def tech():
    return shipped_tech_params()


@pytest.fixture(scope="module")
def table1():
    return read_table1(data_text("table1.tsv"))


def test_criterion_1_block_count_law(table1):
    t0 = time.perf_counter()
    published = {(r.cus, r.variant): r.memory for r in table1}
    for (cus, variant), expected in published.items():
        d = build_reference_design(cus, variant)
        assert len(d.memories) == expected == block_count_law(cus, variant)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\nPASS criterion 1: block-count law exact on all 12 configurations ({elapsed:.2f}s)")


def test_criterion_2_ppa_linear_scaling(table1):
    t0 = time.perf_counter()
    subset = [r for r in table1 if r.cus in (1, 8)]
    params, _ = calibrate(subset)
    checks = []
    for cus, want_area, want_dyn in ((2, 7.45, 3.63), (4, 13.84, 6.88)):
        e = estimate_ppa(build_reference_design(cus), params, 500)
        area_err = abs(e.total_area_mm2 - want_area) / want_area
        dyn_err = abs(e.dynamic_w - want_dyn) / want_dyn
        assert area_err < 0.02, f"{cus}-CU area error {area_err:.3%}"
        assert dyn_err < 0.02, f"{cus}-CU dynamic error {dyn_err:.3%}"
        checks.append(f"{cus}CU area {area_err:.2%} dyn {dyn_err:.2%}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\nPASS criterion 2: 1/8-CU fit predicts 2/4-CU within 2% ({'; '.join(checks)}) ({elapsed:.2f}s)")


def test_criterion_3_frequency_ladder(tech):
    t0 = time.perf_counter()
    cus = 2
    base = build_reference_design(cus)
    f_base = 1000.0 / critical_path(build_timing_graph(base, tech)).total_delay_ns
    assert abs(f_base - 500.0) / 500.0 < 0.01

    r590 = optimize_to_target(base, tech, Spec(cus, 590))
    assert r590.feasible and r590.achieved_fmax_mhz >= 590
    delta_590 = len(r590.design.memories) - len(base.memories)
    assert delta_590 == 7 + 10 * cus  # +10 per CU, +7 shared

    r667 = optimize_to_target(r590.design, tech, Spec(cus, 667))
    assert r667.feasible and r667.achieved_fmax_mhz >= 667
    delta_667 = len(r667.design.memories) - len(r590.design.memories)
    assert delta_667 == 3  # +0 per CU, +3 shared

    assert len(r667.design.memories) == block_count_law(cus, "v667")
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    print(
        f"\nPASS criterion 3: baseline {f_base:.1f} MHz; +{delta_590} blocks to "
        f"{r590.achieved_fmax_mhz:.0f} MHz, +{delta_667} to {r667.achieved_fmax_mhz:.0f} MHz ({elapsed:.2f}s)"
    )


def test_criterion_4_wire_delay_cap(tech):
    t0 = time.perf_counter()
    r1 = optimize_to_target(build_reference_design(1), tech, Spec(1, 667, wire_model=True))
    assert r1.feasible and r1.achieved_fmax_mhz >= 667
    r8 = optimize_to_target(build_reference_design(8), tech, Spec(8, 667, wire_model=True))
    assert not r8.feasible
    assert 590.0 <= r8.achieved_fmax_mhz <= 610.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(
        f"\nPASS criterion 4: wire-on 1-CU {r1.achieved_fmax_mhz:.0f} MHz, "
        f"8-CU capped at {r8.achieved_fmax_mhz:.1f} MHz ({elapsed:.2f}s)"
    )


def test_criterion_5_speedup_matrix():
    t0 = time.perf_counter()
    records = {r.kernel: r for r in load_benchmarks(data_text("benchmarks.tsv"))}

    assert raw_speedup(records["mat_mul"], 8) == pytest.approx(230.9, abs=0.05)
    assert raw_speedup(records["div_int"], 1) == pytest.approx(1.22, abs=0.05)
    assert raw_speedup(records["copy"], 8) == pytest.approx(206.5, abs=0.05)

    d1 = derated_speedup(records["mat_mul"], 1, 6.5, 1.0)
    d8 = derated_speedup(records["mat_mul"], 8, 41.0, 1.0)
    assert d1 == pytest.approx(10.4, abs=0.05)
    assert abs(d1 - 10.2) / 10.2 < 0.05  # published prose value
    assert d8 == pytest.approx(5.6, abs=0.05)
    assert abs(d8 - 5.7) / 5.7 < 0.05

    computed_max = raw_speedup(records["mat_mul"], 8)
    assert abs(computed_max - 223.0) / 223.0 < 0.10  # documented discrepancy
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(
        f"\nPASS criterion 5: raw max {computed_max:.1f}x (223x headline within 10%), "
        f"derated {d1:.1f}x / {d8:.1f}x ({elapsed:.2f}s)"
    )


def test_criterion_6_area_increase_summary(table1):
    t0 = time.perf_counter()
    g = area_growth_summary(table1)
    assert abs(g.avg_growth_590_pct - 10.0) <= 1.0  # published "average of 10%"
    assert abs(g.avg_growth_667_pct - 2.0) <= 1.0  # published "and 2%"
    assert g.avg_growth_590_pct == pytest.approx(9.3, abs=0.1)
    assert g.avg_growth_667_pct == pytest.approx(1.2, abs=0.1)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(
        f"\nPASS criterion 6: area growth {g.avg_growth_590_pct:.2f}% (500->590) and "
        f"{g.avg_growth_667_pct:.2f}% (590->667) within +/-1pt of 10%/2% ({elapsed:.2f}s)"
    )


def test_criterion_7_simulator_properties():
    t0 = time.perf_counter()

    # determinism under fixed seed
    w = KernelWorkload("det", 1024, 12, 0.4, 0.6, 256, 25)
    sp = SimParams(channels=2, miss_latency=50)
    cfg = GGpuConfig(4, data_channels=2)
    assert simulate(w, cfg, sp, 7) == simulate(w, cfg, sp, 7)

    # 1000 randomized workloads: conservation exact, bounds never violated
    rng = random.Random(20260808)
    for i in range(1000):
        n = rng.randint(1, 2048)
        instr = rng.randint(1, 16)
        cus = rng.randint(1, 8)
        channels = rng.randint(1, 4)
        wl = KernelWorkload(
            f"r{i}", n, instr, rng.random(), rng.random(), 64 * rng.randint(1, 8),
            rng.randint(0, 40),
        )
        spr = SimParams(
            channels=channels,
            channel_throughput=rng.choice([0.25, 0.5, 1.0, 2.0]),
            miss_latency=rng.randint(1, 60),
            pipeline_depth=rng.randint(1, 8),
            alu_latency=rng.randint(1, 4),
        )
        c = GGpuConfig(cus, data_channels=channels)
        r = simulate(wl, c, spr, rng.randint(0, 10_000))
        assert r.work_item_instructions == n * instr
        lb = wl.serial_prologue_cycles + max(
            compute_lower_bound(wl, c, spr), bandwidth_lower_bound(wl, c, spr)
        )
        assert r.cycles >= lb - 1e-9

    # contention-free scaling
    wc = build_workload(data_text("kernels/compute_bound.kv"))
    res = scaling_sweep(wc, [1, 2, 4, 8], SimParams())
    ratios = [r1.cycles / r2.cycles for (_, r1), (_, r2) in zip(res, res[1:])]
    assert all(r >= 1.9 for r in ratios)

    # shipped non-monotone fixture
    wx = build_workload(data_text("kernels/xcorr_like.kv"))
    spx = build_sim_params(data_text("kernels/xcorr_like_sim.kv"))
    resx = dict((c, r.cycles) for c, r in scaling_sweep(wx, [4, 8], spx))
    assert resx[8] > resx[4]

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(
        f"\nPASS criterion 7: determinism, conservation and bounds on 1000 workloads; "
        f"scaling {min(ratios):.2f}x/doubling; xcorr-like {resx[4]} -> {resx[8]} cycles ({elapsed:.2f}s)"
    )


def test_criterion_8_transform_algebra(tech):
    t0 = time.perf_counter()
    rng = random.Random(31415)
    base_pool = [build_reference_design(c) for c in (1, 2)]

    def legal_axes(spec):
        axes = []
        if spec.words % 2 == 0 and spec.words // 2 >= 16:
            axes.append("words")
        if spec.word_bits % 2 == 0 and spec.word_bits // 2 >= 2:
            axes.append("bits")
        return axes

    checked_commute = 0
    for i in range(500):
        d0 = base_pool[rng.randrange(len(base_pool))]
        d = d0
        capacity = sum(m.spec.capacity_bits for m in d.memories)
        for _ in range(rng.randint(1, 3)):
            m = d.memories[rng.randrange(len(d.memories))]
            axes = legal_axes(m.spec)
            if not axes:
                continue
            axis = rng.choice(axes)
            fan = 2
            before_area = design_memory_area(d, tech)
            before_count = len(d.memories)
            d = (split_memory_words if axis == "words" else split_memory_bits)(d, m.id, fan)
            # area delta exactly (fan-1)*a0; block count delta fan-1
            assert design_memory_area(d, tech) - before_area == pytest.approx(
                (fan - 1) * tech.a0, rel=1e-9, abs=1e-12
            )
            assert len(d.memories) == before_count + fan - 1
        # capacity conservation exact (integer identity)
        assert sum(m.spec.capacity_bits for m in d.memories) == capacity
        # replay determinism
        assert replay(d0, d.transform_log) == d

        # disjoint transforms commute
        if i % 5 == 0:
            mems = [m for m in d0.memories if legal_axes(m.spec)]
            a, b = rng.sample(mems, 2)
            ta = (split_memory_words if "words" in legal_axes(a.spec) else split_memory_bits)
            tb = (split_memory_bits if "bits" in legal_axes(b.spec) else split_memory_words)
            ab = tb(ta(d0, a.id, 2), b.id, 2)
            ba = ta(tb(d0, b.id, 2), a.id, 2)
            assert ab.memories == ba.memories
            assert ab.nets == ba.nets
            assert ab.groups == ba.groups
            checked_commute += 1

    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    print(
        f"\nPASS criterion 8: 500 randomized designs (capacity, area delta, replay; "
        f"{checked_commute} commute pairs) ({elapsed:.2f}s)"
    )
