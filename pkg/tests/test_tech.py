import math

import pytest

from ggpu.design import MemBlockSpec, build_reference_design
from ggpu.errors import CalibrationError, RangeError, StateError
from ggpu.tech import (
    AggregateRow,
    TechParams,
    area_growth_summary,
    calibrate,
    estimate_ppa,
    mem_area,
    mem_delay,
    mem_power,
)


def test_delay_minimum_point(tech):
    # smallest macro of the family: t0 + tb*2
    d = mem_delay(MemBlockSpec(16, 2), tech)
    assert d == pytest.approx(tech.t0 + 2 * tech.tb, rel=1e-12)


def test_delay_monotone_in_words_and_bits(tech):
    for w, b in [(16, 2), (512, 32), (2048, 64), (32768, 144)]:
        base = mem_delay(MemBlockSpec(w, b), tech)
        assert mem_delay(MemBlockSpec(2 * w, b), tech) > base
        if b % 2 == 0 and b < 144:
            assert mem_delay(MemBlockSpec(w, b + 2), tech) > base


def test_delay_out_of_range(tech):
    with pytest.raises(RangeError):
        mem_delay(MemBlockSpec(8, 32), tech)
    with pytest.raises(RangeError):
        mem_delay(MemBlockSpec(1024, 200), tech)


def test_words_split_delay_identity(tech):
    # post-split bank delay: t0 + tw*log2(w/(16k)) + tb*b + mux_step*log2(k)
    for k in (2, 4):
        pre = mem_delay(MemBlockSpec(4096, 32), tech)
        post = mem_delay(MemBlockSpec(4096 // k, 32), tech) + tech.mux_step * math.log2(k)
        assert pre - post == pytest.approx(
            (tech.tw - tech.mux_step) * math.log2(k), rel=1e-9
        )
        # reduction requires tw*log2(k) > mux_step*ceil(log2(k)); holds for
        # the shipped params
        assert post < pre


def test_split_superadditivity(tech):
    one = mem_area(MemBlockSpec(2048, 32), tech)
    two = 2 * mem_area(MemBlockSpec(1024, 32), tech)
    assert two - one == pytest.approx(tech.a0, rel=1e-9)
    assert two > one


def test_mean_block_area_matches_published(tech, baseline_1cu):
    total = sum(mem_area(m.spec, tech) for m in baseline_1cu.memories)
    assert total / 51 == pytest.approx(2.68 / 51, rel=0.01)


def test_mem_power_zero_access_rate(tech):
    leak, dyn = mem_power(MemBlockSpec(1024, 32), 0.0, tech)
    assert dyn == 0.0
    assert leak > 0.0
    with pytest.raises(RangeError):
        mem_power(MemBlockSpec(1024, 32), 1.5, tech)


def test_uncalibrated_params_raise():
    with pytest.raises(StateError):
        mem_delay(MemBlockSpec(1024, 32), TechParams())
    with pytest.raises(StateError):
        estimate_ppa(build_reference_design(1), TechParams(t0=0.05), 500)


def test_calibration_fit_slopes(table1_rows):
    _, report = calibrate(table1_rows)
    assert report.area_slope_per_cu == pytest.approx(3.19, abs=0.01)
    assert report.area_intercept == pytest.approx(1.00, abs=0.01)
    assert report.dynamic_slope_per_cu == pytest.approx(1.62, abs=0.01)


def test_calibration_block_law_gate(table1_rows):
    bad = [AggregateRow(**{**table1_rows[0].__dict__, "memory": 50})] + table1_rows[1:]
    with pytest.raises(CalibrationError):
        calibrate(bad)


def test_calibration_rejects_off_ladder_rows(table1_rows):
    bad = [AggregateRow(**{**table1_rows[0].__dict__, "freq_mhz": 450})]
    with pytest.raises(CalibrationError):
        calibrate(bad)


def test_estimate_matches_anchor_rows(tech):
    e1 = estimate_ppa(build_reference_design(1), tech, 500)
    assert e1.total_area_mm2 == pytest.approx(4.19, rel=0.001)
    assert e1.dynamic_w == pytest.approx(1.97, rel=0.001)
    assert e1.memory_count == 51
    e8 = estimate_ppa(build_reference_design(8), tech, 500)
    assert e8.total_area_mm2 == pytest.approx(26.51, rel=0.001)


def test_estimate_frequency_scaling(tech, baseline_1cu):
    a = estimate_ppa(baseline_1cu, tech, 500)
    b = estimate_ppa(baseline_1cu, tech, 1000)
    assert a.total_area_mm2 == b.total_area_mm2
    assert b.dynamic_w == pytest.approx(2 * a.dynamic_w, rel=1e-12)


def test_estimate_invariants(tech, baseline_2cu):
    e = estimate_ppa(baseline_2cu, tech, 590)
    assert e.total_w == pytest.approx(e.leakage_mw / 1000 + e.dynamic_w, rel=1e-12)
    assert e.memory_area_mm2 <= e.total_area_mm2


def test_estimate_affine_in_cu_count(tech):
    es = [estimate_ppa(build_reference_design(c), tech, 500).total_area_mm2 for c in (1, 2, 4, 8)]
    slope1 = es[1] - es[0]
    assert es[2] - es[1] == pytest.approx(2 * slope1, rel=1e-9)
    assert es[3] - es[2] == pytest.approx(4 * slope1, rel=1e-9)


def test_calibration_idempotence(tech, table1_rows):
    # rows produced by the estimator itself recover the coefficients
    synth = []
    for r in table1_rows:
        d = build_reference_design(r.cus, r.variant)
        e = estimate_ppa(d, tech, r.freq_mhz)
        synth.append(
            AggregateRow(
                cus=r.cus,
                freq_mhz=r.freq_mhz,
                total_area_mm2=e.total_area_mm2,
                memory_area_mm2=e.memory_area_mm2,
                ff=e.ff_count,
                comb=e.comb_count,
                memory=e.memory_count,
                leakage_mw=e.leakage_mw,
                dynamic_w=e.dynamic_w,
                total_w=e.total_w,
            )
        )
    p2, _ = calibrate(synth)
    for name in ("a0", "abit", "leak_blk", "leak_ff", "leak_comb", "edyn_blk", "edyn_ff", "edyn_comb", "ff_area", "logic_area"):
        got = getattr(p2, name)
        want = getattr(tech, name)
        assert got == pytest.approx(want, rel=1e-6), name


def test_area_growth_summary_fixture(table1_rows):
    g = area_growth_summary(table1_rows)
    assert g.avg_growth_590_pct == pytest.approx(9.355, abs=0.05)
    assert g.avg_growth_667_pct == pytest.approx(1.162, abs=0.05)


def test_estimator_reproduction_growth_documented(tech, table1_rows):
    # companion check: the estimator's own reproduction overshoots the
    # 500->590 growth slightly (~9.5%) and undershoots 590->667 (~0.9%)
    # because split area deltas are exactly a0 while the published 667 rows
    # grew from synthesis upsizing; the acceptance band applies to the
    # reproduced characteristics table, not to this reproduction.
    synth = []
    for r in table1_rows:
        e = estimate_ppa(build_reference_design(r.cus, r.variant), tech, r.freq_mhz)
        synth.append(
            AggregateRow(
                r.cus, r.freq_mhz, e.total_area_mm2, e.memory_area_mm2,
                e.ff_count, e.comb_count, e.memory_count,
                e.leakage_mw, e.dynamic_w, e.total_w,
            )
        )
    g = area_growth_summary(synth)
    assert g.avg_growth_590_pct == pytest.approx(9.5, abs=0.5)
    assert g.avg_growth_667_pct == pytest.approx(0.9, abs=0.3)
