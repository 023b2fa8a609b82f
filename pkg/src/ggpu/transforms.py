"""Memory-division and pipeline-insertion rewrites.

Both transforms are pure: they take a Design and return a new Design with
the step appended to the transform log.  Splits only support power-of-two
fans (bank selection is then a plain MSB slice / bit slice).
"""

from __future__ import annotations

from .design import (
    Design,
    GroupMeta,
    MemBlockInstance,
    MemBlockSpec,
    Net,
    PipelineReg,
    SplitMeta,
    Transform,
    make_net,
    mem_node,
    node_kind,
    reg_node,
)
from .errors import LegalityError, RangeError, ReplayError, UnknownIdError

Transform = Transform  # re-exported; the log lives inside Design


def _check_fan(fan: int) -> None:
    if fan < 2 or fan & (fan - 1) != 0:
        raise RangeError(f"fan must be a power of two >= 2, got {fan}")


def _split(d: Design, mem_id: str, fan: int, axis: str) -> Design:
    _check_fan(fan)
    inst = d.memory(mem_id)  # raises UnknownIdError
    spec = inst.spec
    if axis == "words":
        if spec.words % fan != 0 or spec.words // fan < 16:
            raise RangeError(
                f"words split of {mem_id} ({spec.words} words) by {fan} "
                f"drops below the 16-word floor"
            )
        bank_spec = MemBlockSpec(spec.words // fan, spec.word_bits, spec.ports)
    else:
        if spec.word_bits % fan != 0:
            raise RangeError(
                f"bits split of {mem_id} ({spec.word_bits} bits) by {fan} does not divide evenly"
            )
        if spec.word_bits // fan < 2:
            raise RangeError(
                f"bits split of {mem_id} ({spec.word_bits} bits) by {fan} drops below the 2-bit floor"
            )
        bank_spec = MemBlockSpec(spec.words, spec.word_bits // fan, spec.ports)

    banks = tuple(
        MemBlockInstance(
            id=f"{mem_id}/b{i}",
            spec=bank_spec,
            partition=inst.partition,
            logical_parent=mem_id,
            split_meta=SplitMeta(axis=axis, fan=fan, bank_index=i),
        )
        for i in range(fan)
    )
    group = GroupMeta(
        parent_id=mem_id,
        axis=axis,
        fan=fan,
        parent_words=spec.words,
        parent_word_bits=spec.word_bits,
        parent_partition=inst.partition,
        parent_logical_parent=inst.logical_parent,
        parent_bank_index=inst.split_meta.bank_index if inst.split_meta else None,
    )

    # rewire: every net touching the parent is replicated per bank
    old_node = mem_node(mem_id)
    nets: list[Net] = []
    for n in d.nets:
        if n.src == old_node:
            width = bank_spec.word_bits if axis == "bits" else n.width
            for b in banks:
                nets.append(make_net(mem_node(b.id), n.dst, width))
        elif n.dst == old_node:
            for b in banks:
                nets.append(make_net(n.src, mem_node(b.id), n.width))
        else:
            nets.append(n)

    memories = tuple(m for m in d.memories if m.id != mem_id) + banks
    log = d.transform_log + (
        Transform(f"split_{axis}", mem_id, fan, len(d.transform_log)),
    )
    return d.evolve(
        memories=memories, nets=tuple(nets), groups=d.groups + (group,), transform_log=log
    )


def split_memory_words(d: Design, mem_id: str, fan: int) -> Design:
    """Divide a block by address MSBs into `fan` banks of words/fan.  The
    read path gains mux_step*log2(fan) of select delay (charged via the
    bank's accumulated mux levels); capacity is conserved exactly."""
    return _split(d, mem_id, fan, "words")


def split_memory_bits(d: Design, mem_id: str, fan: int) -> Design:
    """Divide a block into `fan` slices of word_bits/fan.  Outputs are
    concatenated, so no mux delay is charged; capacity is conserved."""
    return _split(d, mem_id, fan, "bits")


def legal_pipeline_net(d: Design, net: Net) -> bool:
    """A register may only be inserted at a stage boundary: both endpoints
    of the arc must be logic stages (memory ports and registers are
    sequential endpoints already)."""
    return node_kind(net.src) == "stage" and node_kind(net.dst) == "stage"


def insert_pipeline(d: Design, net_id: str) -> Design:
    """Cut a stage-to-stage arc with a register.  Downstream latency on the
    path grows by one cycle and the FF census by the arc's bus width."""
    net = d.net(net_id)  # raises UnknownIdError
    if not legal_pipeline_net(d, net):
        raise LegalityError(
            f"net '{net_id}' is not a stage boundary; pipeline registers "
            f"may only cut stage-to-stage arcs"
        )
    pipe_id = f"pipe[{net_id}]"
    nets = tuple(n for n in d.nets if n.id != net_id) + (
        make_net(net.src, reg_node(pipe_id), net.width),
        make_net(reg_node(pipe_id), net.dst, net.width),
    )
    log = d.transform_log + (Transform("pipeline", net_id, None, len(d.transform_log)),)
    return d.evolve(
        nets=nets,
        pipeline_regs=d.pipeline_regs + (PipelineReg(pipe_id, net_id, net.width),),
        transform_log=log,
    )


def apply_transform(d: Design, t: Transform) -> Design:
    if t.kind == "split_words":
        return split_memory_words(d, t.target, t.fan or 2)
    if t.kind == "split_bits":
        return split_memory_bits(d, t.target, t.fan or 2)
    if t.kind == "pipeline":
        return insert_pipeline(d, t.target)
    raise LegalityError(f"unknown transform kind '{t.kind}'")


def replay(d0: Design, log) -> Design:
    """Apply a transform log in order.  Deterministic: replaying the log of
    a produced design reconstructs it exactly."""
    d = d0
    for i, t in enumerate(log):
        try:
            d = apply_transform(d, t)
        except (UnknownIdError, RangeError, LegalityError) as e:
            raise ReplayError(t.sequence_no if t.sequence_no else i, str(e)) from e
    return d
