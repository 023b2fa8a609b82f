import random

import pytest

from ggpu.design import (
    Design,
    GGpuConfig,
    LogicStage,
    MemBlockInstance,
    MemBlockSpec,
    Transform,
    build_reference_design,
    canonical_transforms,
    make_net,
    mem_node,
    reg_node,
    stage_node,
)
from ggpu.errors import LegalityError, RangeError, ReplayError, UnknownIdError
from ggpu.tech import design_memory_area, mem_delay
from ggpu.timing import build_timing_graph, critical_path, fmax
from ggpu.transforms import (
    apply_transform,
    insert_pipeline,
    replay,
    split_memory_bits,
    split_memory_words,
)


def _one_mem_design(words, bits):
    cfg = GGpuConfig(num_cus=1)
    mem = MemBlockInstance("shared.m0", MemBlockSpec(words, bits), "mem_controller")
    st = LogicStage("mc.read", "mem_controller", 0.2)
    nets = (
        make_net(mem_node("shared.m0"), stage_node("mc.read"), bits),
        make_net(stage_node("mc.read"), reg_node("mc.q"), bits),
    )
    return Design(cfg, (mem,), (st,), nets).evolve()


def test_words_split_structure_and_capacity():
    d = split_memory_words(_one_mem_design(4096, 128), "shared.m0", 2)
    banks = [m for m in d.memories if m.logical_parent == "shared.m0"]
    assert len(banks) == 2
    assert all(m.spec == MemBlockSpec(2048, 128) for m in banks)
    assert sum(m.spec.capacity_bits for m in banks) == 4096 * 128 == 524288
    assert d.mux_levels("shared.m0/b0") == 1
    assert [t.kind for t in d.transform_log] == ["split_words"]


def test_words_split_read_delay_change(tech):
    d0 = _one_mem_design(4096, 32)
    d1 = split_memory_words(d0, "shared.m0", 2)
    pre = mem_delay(d0.memory("shared.m0").spec, tech)
    post = mem_delay(d1.memory("shared.m0/b0").spec, tech) + tech.mux_step * 1
    assert post - pre == pytest.approx(-(tech.tw - tech.mux_step), rel=1e-9)
    assert post < pre


def test_words_split_below_floor_rejected():
    with pytest.raises(RangeError):
        split_memory_words(_one_mem_design(256, 32), "shared.m0", 32)


def test_bits_split_structure_and_delay(tech):
    d = split_memory_bits(_one_mem_design(512, 64), "shared.m0", 2)
    banks = [m for m in d.memories if m.logical_parent == "shared.m0"]
    assert all(m.spec == MemBlockSpec(512, 32) for m in banks)
    drop = mem_delay(MemBlockSpec(512, 64), tech) - mem_delay(MemBlockSpec(512, 32), tech)
    assert drop == pytest.approx(tech.tb * 32, rel=1e-9)
    assert d.mux_levels("shared.m0/b0") == 0


def test_bits_split_area_increase_is_a0(tech):
    d0 = _one_mem_design(512, 64)
    d1 = split_memory_bits(d0, "shared.m0", 2)
    delta = design_memory_area(d1, tech) - design_memory_area(d0, tech)
    assert delta == pytest.approx(tech.a0, rel=1e-12)


def test_bits_split_indivisible_rejected():
    with pytest.raises(RangeError):
        split_memory_bits(_one_mem_design(512, 6), "shared.m0", 4)


def test_split_unknown_memory():
    with pytest.raises(UnknownIdError):
        split_memory_words(_one_mem_design(512, 32), "shared.nope", 2)


def test_split_non_power_of_two_fan():
    with pytest.raises(RangeError):
        split_memory_words(_one_mem_design(512, 32), "shared.m0", 3)


def _two_stage_design(d1, d2):
    cfg = GGpuConfig(num_cus=1)
    stages = (
        LogicStage("mc.front", "mem_controller", d1),
        LogicStage("mc.back", "mem_controller", d2),
    )
    nets = (
        make_net(reg_node("mc.in"), stage_node("mc.front"), 16),
        make_net(stage_node("mc.front"), stage_node("mc.back"), 16),
        make_net(stage_node("mc.back"), reg_node("mc.out"), 16),
    )
    return Design(cfg, (), stages, nets).evolve()


def test_pipeline_cut_splits_path(tech):
    d = _two_stage_design(1.1, 0.9)
    g = build_timing_graph(d, tech)
    assert critical_path(g).total_delay_ns == pytest.approx(2.0)
    d2 = insert_pipeline(d, "mc.front->mc.back")
    g2 = build_timing_graph(d2, tech)
    assert critical_path(g2).total_delay_ns == pytest.approx(1.1)
    assert d2.ff_count - d.ff_count == 16
    assert len(d2.pipeline_regs) == 1


def test_pipeline_noncritical_arc_leaves_fmax(tech, baseline_1cu):
    f0 = fmax(build_timing_graph(baseline_1cu, tech))
    d2 = insert_pipeline(baseline_1cu, "top.axi_ingress->mc.cache_refill")
    assert fmax(build_timing_graph(d2, tech)) == pytest.approx(f0, rel=1e-12)


def test_pipeline_illegal_on_memory_arc(baseline_1cu):
    with pytest.raises(LegalityError):
        insert_pipeline(baseline_1cu, "shared.cache_data0->mc.cache_ret0")


def test_pipeline_illegal_on_reg_stage_arc(baseline_1cu):
    with pytest.raises(LegalityError):
        insert_pipeline(baseline_1cu, "mc.cache_out0->cu0.lsu_align")


def test_canonical_v590_adds_257_ff():
    base = build_reference_design(1)
    v590 = replay(base, canonical_transforms(1, "v590"))
    assert v590.ff_count - base.ff_count == 257


def test_replay_empty_log_is_identity(baseline_1cu):
    assert replay(baseline_1cu, ()) == baseline_1cu


def test_replay_canonical_matches_published_counts():
    base = build_reference_design(2)
    assert len(replay(base, canonical_transforms(2, "v590")).memories) == 120
    assert len(replay(base, canonical_transforms(2, "v667")).memories) == 123


def test_replay_consumed_id_fails(baseline_1cu):
    log = (
        Transform("split_bits", "shared.rtm0", 2, 0),
        Transform("split_bits", "shared.rtm0", 2, 1),
    )
    with pytest.raises(ReplayError) as exc:
        replay(baseline_1cu, log)
    assert exc.value.sequence_no == 1


def test_disjoint_transforms_commute(baseline_1cu):
    a = Transform("split_bits", "shared.cache_data0", 2)
    b = Transform("split_words", "cu0.imem1", 2)
    ab = apply_transform(apply_transform(baseline_1cu, a), b)
    ba = apply_transform(apply_transform(baseline_1cu, b), a)
    # identical up to id ordering (storage is id-sorted) and log order
    assert ab.memories == ba.memories
    assert ab.nets == ba.nets
    assert ab.groups == ba.groups


def test_randomized_transform_algebra(tech):
    rng = random.Random(11)
    base = build_reference_design(1)
    for _ in range(60):
        d = base
        capacity = sum(m.spec.capacity_bits for m in d.memories)
        for _ in range(rng.randint(1, 4)):
            mems = [m for m in d.memories]
            m = mems[rng.randrange(len(mems))]
            axis_pool = []
            if m.spec.words % 2 == 0 and m.spec.words // 2 >= 16:
                axis_pool.append("words")
            if m.spec.word_bits % 2 == 0 and m.spec.word_bits // 2 >= 2:
                axis_pool.append("bits")
            if not axis_pool:
                continue
            axis = rng.choice(axis_pool)
            before = design_memory_area(d, tech)
            n_before = len(d.memories)
            fan = rng.choice([2, 2, 4])
            try:
                if axis == "words":
                    d = split_memory_words(d, m.id, fan)
                else:
                    d = split_memory_bits(d, m.id, fan)
            except RangeError:
                continue
            assert len(d.memories) == n_before + fan - 1
            assert design_memory_area(d, tech) - before == pytest.approx(
                (fan - 1) * tech.a0, rel=1e-9
            )
        assert sum(m.spec.capacity_bits for m in d.memories) == capacity
        assert replay(base, d.transform_log) == d
