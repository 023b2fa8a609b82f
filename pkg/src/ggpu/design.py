"""Architectural configuration and structural design model.

A Design is an immutable value: memories, lumped logic stages and the nets
connecting them between sequential endpoints.  The reference generator
produces the same design for a given (CU count, variant) pair every time;
all mutation elsewhere in the package is functional (a new Design is
returned).

Node references inside nets use a `kind:id` prefix:

    mem:shared.cache_data0     memory read/write port
    stage:cu0.alu_ex           lumped combinational stage
    reg:mc.cache_out0          register bank / sequential endpoint
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

from .errors import ConfigError, StructuralError, UnknownIdError

VARIANTS = ("baseline", "v590", "v667")

PARTITION_MC = "mem_controller"
PARTITION_TOP = "top"

# Cell census of the reference RTL, anchored to the published 1-CU and 8-CU
# synthesis results.  FF/comb columns are not affine in CU count in the
# published data (synthesis noise), so only these anchors are exact.
FF_SHARED = 15161
FF_PER_CU = 104617
COMB_SHARED = 44050
COMB_PER_CU = 83776
COMB_PER_SPLIT = 64

# Share of the shared-logic cell budget living in the top partition (AXI
# ingress/egress); the rest sits in the memory controller.
TOP_LOGIC_FRACTION = 0.10

AXI_NET_WIDTH = 257  # 256-bit refill beat + valid


def mem_node(mem_id: str) -> str:
    return f"mem:{mem_id}"


def stage_node(stage_id: str) -> str:
    return f"stage:{stage_id}"


def reg_node(reg_id: str) -> str:
    return f"reg:{reg_id}"


def node_kind(node: str) -> str:
    return node.split(":", 1)[0]


def node_id(node: str) -> str:
    return node.split(":", 1)[1]


@dataclass(frozen=True)
class GGpuConfig:
    """Top-level architectural parameters."""

    num_cus: int
    pes_per_cu: int = 8
    wf_size: int = 64
    max_workitems_per_cu: int = 512
    data_channels: int = 1
    control_channels: int = 1

    def __post_init__(self):
        if not 1 <= self.num_cus <= 8:
            raise ConfigError(f"num_cus must be in 1..8, got {self.num_cus}")
        if self.pes_per_cu != 8:
            raise ConfigError("pes_per_cu is fixed at 8")
        if self.wf_size <= 0 or self.max_workitems_per_cu % self.wf_size != 0:
            raise ConfigError("wf_size must divide max_workitems_per_cu")
        if self.wf_size * (self.max_workitems_per_cu // self.wf_size) != 512:
            raise ConfigError("per-CU work-item capacity must be exactly 512")
        if not 1 <= self.data_channels <= 4:
            raise ConfigError(f"data_channels must be in 1..4, got {self.data_channels}")
        if self.control_channels != 1:
            raise ConfigError("control_channels is fixed at 1")

    @property
    def wavefronts_per_cu(self) -> int:
        return self.max_workitems_per_cu // self.wf_size


@dataclass(frozen=True)
class MemBlockSpec:
    """SRAM macro parameters.  The compiler family covers 16..65536 words
    and 2..144 bits; range violations are reported by validate_design."""

    words: int
    word_bits: int
    ports: str = "dual"

    @property
    def capacity_bits(self) -> int:
        return self.words * self.word_bits

    def in_range(self) -> bool:
        return 16 <= self.words <= 65536 and 2 <= self.word_bits <= 144


@dataclass(frozen=True)
class SplitMeta:
    axis: str  # "words" | "bits"
    fan: int
    bank_index: int


@dataclass(frozen=True)
class MemBlockInstance:
    id: str
    spec: MemBlockSpec
    partition: str
    logical_parent: str | None = None
    split_meta: SplitMeta | None = None


@dataclass(frozen=True)
class GroupMeta:
    """Record of one applied split: the (now removed) parent block and how
    it was divided.  Together these form the split tree of a design."""

    parent_id: str
    axis: str
    fan: int
    parent_words: int
    parent_word_bits: int
    parent_partition: str
    parent_logical_parent: str | None = None
    parent_bank_index: int | None = None

    @property
    def parent_capacity_bits(self) -> int:
        return self.parent_words * self.parent_word_bits


@dataclass(frozen=True)
class LogicStage:
    id: str
    partition: str
    delay_ns: float


@dataclass(frozen=True)
class Net:
    """Directed arc between two nodes (see module docstring for node refs)."""

    id: str
    src: str
    dst: str
    width: int = 1


@dataclass(frozen=True)
class PipelineReg:
    id: str
    host_net: str
    width: int


@dataclass(frozen=True)
class Transform:
    """One rewrite step: split_words(mem, fan), split_bits(mem, fan) or
    pipeline(net)."""

    kind: str
    target: str
    fan: int | None = None
    sequence_no: int = 0


def make_net(src: str, dst: str, width: int) -> Net:
    return Net(id=f"{node_id(src)}->{node_id(dst)}", src=src, dst=dst, width=width)


@dataclass(frozen=True)
class Design:
    config: GGpuConfig
    memories: tuple[MemBlockInstance, ...]
    stages: tuple[LogicStage, ...]
    nets: tuple[Net, ...]
    groups: tuple[GroupMeta, ...] = ()
    pipeline_regs: tuple[PipelineReg, ...] = ()
    transform_log: tuple[Transform, ...] = ()

    # -- lookups (index maps are built lazily; instances are immutable) ---

    @cached_property
    def _mem_by_id(self) -> dict[str, MemBlockInstance]:
        return {m.id: m for m in self.memories}

    @cached_property
    def _stage_by_id(self) -> dict[str, LogicStage]:
        return {s.id: s for s in self.stages}

    @cached_property
    def _net_by_id(self) -> dict[str, Net]:
        return {n.id: n for n in self.nets}

    @cached_property
    def _group_by_id(self) -> dict[str, GroupMeta]:
        return {g.parent_id: g for g in self.groups}

    def memory(self, mem_id: str) -> MemBlockInstance:
        try:
            return self._mem_by_id[mem_id]
        except KeyError:
            raise UnknownIdError(f"no memory '{mem_id}'") from None

    def stage(self, stage_id: str) -> LogicStage:
        try:
            return self._stage_by_id[stage_id]
        except KeyError:
            raise UnknownIdError(f"no stage '{stage_id}'") from None

    def net(self, net_id: str) -> Net:
        try:
            return self._net_by_id[net_id]
        except KeyError:
            raise UnknownIdError(f"no net '{net_id}'") from None

    def has_memory(self, mem_id: str) -> bool:
        return mem_id in self._mem_by_id

    def group(self, parent_id: str) -> GroupMeta | None:
        return self._group_by_id.get(parent_id)

    def mux_levels(self, mem_id: str) -> int:
        """Accumulated MSB-mux levels on the read path of one bank: every
        words-split on the ancestry chain contributes log2(fan)."""
        inst = self.memory(mem_id)
        levels = 0
        parent = inst.logical_parent
        while parent is not None:
            g = self.group(parent)
            if g is None:
                break
            if g.axis == "words":
                levels += int(math.log2(g.fan))
            parent = g.parent_logical_parent
        return levels

    # -- derived census --------------------------------------------------

    @property
    def ff_count(self) -> int:
        pipes = sum(p.width for p in self.pipeline_regs)
        return FF_SHARED + FF_PER_CU * self.config.num_cus + pipes

    @property
    def comb_count(self) -> int:
        splits = sum(g.fan - 1 for g in self.groups)
        return COMB_SHARED + COMB_PER_CU * self.config.num_cus + COMB_PER_SPLIT * splits

    def partitions(self) -> tuple[str, ...]:
        cus = tuple(f"cu{k}" for k in range(self.config.num_cus))
        return (PARTITION_MC, PARTITION_TOP) + cus

    # -- normalized functional update -------------------------------------

    def evolve(self, **kw) -> "Design":
        d = replace(self, **kw)
        return replace(
            d,
            memories=tuple(sorted(d.memories, key=lambda m: m.id)),
            stages=tuple(sorted(d.stages, key=lambda s: s.id)),
            nets=tuple(sorted(d.nets, key=lambda n: n.id)),
            groups=tuple(sorted(d.groups, key=lambda g: g.parent_id)),
            pipeline_regs=tuple(sorted(d.pipeline_regs, key=lambda p: p.id)),
        )


# ---------------------------------------------------------------------------
# Reference inventory
# ---------------------------------------------------------------------------

# Shared blocks (memory controller partition). Per block: (count, words,
# bits, read stage prefix, stage delays, capture reg prefix, out width).
# Stage delays are reference-RTL constants co-solved with the shipped
# technology calibration; the small stagger on the cache return stages
# reflects the bank steering depth per way.
_SHARED_MEMS = (
    ("shared.cache_data", 4, 1024, 128, "mc.cache_ret", (0.170, 0.165, 0.160, 0.155), "mc.cache_out", 128),
    ("shared.cache_tag", 2, 2048, 40, "mc.tag_cmp", (0.960, 0.960), "mc.tag_hit", 8),
    ("shared.rtm", 1, 2048, 32, "mc.rtm_dec", (1.090,), "mc.rtm_q", 32),
    ("shared.dmover", 2, 1024, 64, "mc.axi_tx", (0.480, 0.460), "mc.axi_buf", 64),
)

# Per-CU blocks: (suffix, count, words, bits, stage suffix, delay, shared
# stage?, reg suffix, out width).  regfile/scratch banks share one read
# stage; the two instruction memories have one decode stage each.
_CU_MEMS = (
    ("regfile", 32, 1024, 36, "operand_rd", 0.810, True, "ex_in", 72),
    ("scratch", 8, 512, 32, "lsu_local", 1.0965, True, "lsu_local_q", 32),
    ("imem", 2, 4096, 32, "idecode", 1.008, False, "ibuf", 32),
)

_ALU_DELAY = 1.485
_LSU_ALIGN_DELAY = 0.300
_AXI_INGRESS_DELAY = 1.410
_CACHE_REFILL_DELAY = 0.350

BASELINE_SHARED_BLOCKS = 9
BASELINE_CU_BLOCKS = 42

# (shared, per_cu) block-count law per variant.
BLOCK_LAW = {"baseline": (9, 42), "v590": (16, 52), "v667": (19, 52)}


def block_count_law(cus: int, variant: str) -> int:
    shared, per_cu = BLOCK_LAW[variant]
    return shared + per_cu * cus


def _baseline_structure(cus: int) -> Design:
    config = GGpuConfig(num_cus=cus)
    memories: list[MemBlockInstance] = []
    stages: list[LogicStage] = []
    nets: list[Net] = []

    # shared memory subsystem
    for prefix, count, words, bits, st_prefix, delays, reg_prefix, out_w in _SHARED_MEMS:
        for i in range(count):
            mem_id = f"{prefix}{i}"
            st_id = f"{st_prefix}{i}" if count > 1 else st_prefix
            rq_id = f"{reg_prefix}{i}" if count > 1 else reg_prefix
            memories.append(MemBlockInstance(mem_id, MemBlockSpec(words, bits), PARTITION_MC))
            stages.append(LogicStage(st_id, PARTITION_MC, delays[i]))
            nets.append(make_net(mem_node(mem_id), stage_node(st_id), bits))
            nets.append(make_net(stage_node(st_id), reg_node(rq_id), out_w))

    # AXI ingress chain: the single top<->controller crossing
    stages.append(LogicStage("top.axi_ingress", PARTITION_TOP, _AXI_INGRESS_DELAY))
    stages.append(LogicStage("mc.cache_refill", PARTITION_MC, _CACHE_REFILL_DELAY))
    nets.append(make_net(reg_node("top.axi_in"), stage_node("top.axi_ingress"), AXI_NET_WIDTH))
    nets.append(make_net(stage_node("top.axi_ingress"), stage_node("mc.cache_refill"), AXI_NET_WIDTH))
    nets.append(make_net(stage_node("mc.cache_refill"), reg_node("mc.refill_q"), AXI_NET_WIDTH))

    # compute units
    for k in range(cus):
        part = f"cu{k}"
        for suffix, count, words, bits, st_suffix, delay, shared_stage, reg_suffix, out_w in _CU_MEMS:
            if shared_stage:
                st_id = f"{part}.{st_suffix}"
                stages.append(LogicStage(st_id, part, delay))
                nets.append(make_net(stage_node(st_id), reg_node(f"{part}.{reg_suffix}"), out_w))
                for i in range(count):
                    mem_id = f"{part}.{suffix}{i}"
                    memories.append(MemBlockInstance(mem_id, MemBlockSpec(words, bits), part))
                    nets.append(make_net(mem_node(mem_id), stage_node(st_id), bits))
            else:
                for i in range(count):
                    mem_id = f"{part}.{suffix}{i}"
                    st_id = f"{part}.{st_suffix}{i}"
                    memories.append(MemBlockInstance(mem_id, MemBlockSpec(words, bits), part))
                    stages.append(LogicStage(st_id, part, delay))
                    nets.append(make_net(mem_node(mem_id), stage_node(st_id), bits))
                    nets.append(make_net(stage_node(st_id), reg_node(f"{part}.{reg_suffix}{i}"), out_w))

        # execute pipeline
        stages.append(LogicStage(f"{part}.alu_ex", part, _ALU_DELAY))
        nets.append(make_net(reg_node(f"{part}.ex_in"), stage_node(f"{part}.alu_ex"), 72))
        nets.append(make_net(stage_node(f"{part}.alu_ex"), reg_node(f"{part}.ex_out"), 36))

        # cache return leg: registered at the controller boundary, then the
        # long wire into the CU's alignment stage.  reg->stage and
        # stage->reg arcs are not pipeline cut sites.
        align = f"{part}.lsu_align"
        stages.append(LogicStage(align, part, _LSU_ALIGN_DELAY))
        for i in range(4):
            nets.append(make_net(reg_node(f"mc.cache_out{i}"), stage_node(align), 128))
        nets.append(make_net(stage_node(align), reg_node(f"{part}.lsu_q"), 128))

    return Design(
        config=config,
        memories=tuple(memories),
        stages=tuple(stages),
        nets=tuple(nets),
    ).evolve()


def canonical_transforms(cus: int, variant: str) -> tuple[Transform, ...]:
    """The canonical optimization schedule for a variant, in the order the
    planner discovers it (descending critical-path levels, ties by id)."""
    if variant == "baseline":
        return ()
    steps: list[Transform] = []

    def split(target):
        steps.append(Transform("split_bits", target, 2, len(steps)))

    for i in range(4):
        split(f"shared.cache_data{i}")
    steps.append(Transform("pipeline", "top.axi_ingress->mc.cache_refill", None, len(steps)))
    split("shared.rtm0")
    split("shared.cache_tag0")
    split("shared.cache_tag1")
    for k in range(cus):
        split(f"cu{k}.imem0")
        split(f"cu{k}.imem1")
    for k in range(cus):
        for i in range(8):
            split(f"cu{k}.scratch{i}")
    if variant == "v667":
        split("shared.rtm0/b0")
        split("shared.rtm0/b1")
        split("shared.dmover0")
    return tuple(steps)


def build_reference_design(cus: int, variant: str = "baseline") -> Design:
    """Generate the reference design for a CU count and optimization
    variant.  Raises ConfigError for out-of-range inputs."""
    if variant not in VARIANTS:
        raise ConfigError(f"unknown variant '{variant}' (expected one of {VARIANTS})")
    base = _baseline_structure(cus)  # validates cus via GGpuConfig
    if variant == "baseline":
        return base
    from . import transforms  # deferred: transforms operates on designs

    return transforms.replay(base, canonical_transforms(cus, variant))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # range | ports | partition | group | net | dag | duplicate
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "design valid"
        return "\n".join(f"[{v.kind}] {v.subject}: {v.message}" for v in self.violations)


def validate_design(d: Design) -> ValidationReport:
    """Check every structural invariant; returns a report listing all
    violations (empty report iff the design is valid)."""
    out: list[Violation] = []
    parts = set(d.partitions())

    seen: set[str] = set()
    for m in d.memories:
        if m.id in seen:
            out.append(Violation("duplicate", m.id, "duplicate memory id"))
        seen.add(m.id)
        if not 16 <= m.spec.words <= 65536:
            out.append(Violation("range", m.id, f"words={m.spec.words} outside 16..65536"))
        if not 2 <= m.spec.word_bits <= 144:
            out.append(Violation("range", m.id, f"word_bits={m.spec.word_bits} outside 2..144"))
        if m.spec.ports != "dual":
            out.append(Violation("ports", m.id, f"ports={m.spec.ports}, reference designs require dual"))
        if m.partition not in parts:
            out.append(Violation("partition", m.id, f"unknown partition '{m.partition}'"))
    for s in d.stages:
        if s.id in seen:
            out.append(Violation("duplicate", s.id, "duplicate stage id"))
        seen.add(s.id)
        if s.delay_ns < 0:
            out.append(Violation("range", s.id, f"negative stage delay {s.delay_ns}"))
        if s.partition not in parts:
            out.append(Violation("partition", s.id, f"unknown partition '{s.partition}'"))

    # split groups: contiguous bank indices, identical specs, capacity law
    by_parent: dict[str, list[MemBlockInstance]] = {}
    for m in d.memories:
        if m.logical_parent is not None:
            by_parent.setdefault(m.logical_parent, []).append(m)
    child_groups: dict[str, list[GroupMeta]] = {}
    for g in d.groups:
        if g.parent_logical_parent is not None:
            child_groups.setdefault(g.parent_logical_parent, []).append(g)
    for g in d.groups:
        leaves = by_parent.get(g.parent_id, [])
        subs = child_groups.get(g.parent_id, [])
        indices = sorted(
            [m.split_meta.bank_index for m in leaves if m.split_meta is not None]
            + [sg.parent_bank_index for sg in subs if sg.parent_bank_index is not None]
        )
        if indices != list(range(g.fan)):
            out.append(
                Violation("group", g.parent_id, f"bank indices {indices} not contiguous 0..{g.fan - 1}")
            )
        specs = {m.spec for m in leaves}
        if len(specs) > 1:
            out.append(Violation("group", g.parent_id, "banks with differing specs"))
        cap = sum(m.spec.capacity_bits for m in leaves) + sum(sg.parent_capacity_bits for sg in subs)
        if cap != g.parent_capacity_bits:
            out.append(
                Violation(
                    "group",
                    g.parent_id,
                    f"bank capacity {cap} != parent capacity {g.parent_capacity_bits}",
                )
            )
    for parent_id in by_parent:
        if d.group(parent_id) is None:
            out.append(Violation("group", parent_id, "banks reference a parent with no group record"))

    # nets reference known nodes
    mem_ids = {m.id for m in d.memories}
    stage_ids = {s.id for s in d.stages}
    for n in d.nets:
        for node in (n.src, n.dst):
            kind = node_kind(node)
            ident = node_id(node)
            if kind == "mem" and ident not in mem_ids:
                out.append(Violation("net", n.id, f"references unknown memory '{ident}'"))
            elif kind == "stage" and ident not in stage_ids:
                out.append(Violation("net", n.id, f"references unknown stage '{ident}'"))
            elif kind not in ("mem", "stage", "reg"):
                out.append(Violation("net", n.id, f"unknown node kind '{kind}'"))

    # combinational cycles: only stage->stage arcs propagate
    adj: dict[str, list[str]] = {}
    for n in d.nets:
        if node_kind(n.src) == "stage" and node_kind(n.dst) == "stage":
            adj.setdefault(node_id(n.src), []).append(node_id(n.dst))
    state: dict[str, int] = {}

    def dfs(u: str) -> bool:
        state[u] = 1
        for v in adj.get(u, ()):
            if state.get(v, 0) == 1:
                return True
            if state.get(v, 0) == 0 and dfs(v):
                return True
        state[u] = 2
        return False

    for s in d.stages:
        if state.get(s.id, 0) == 0 and dfs(s.id):
            out.append(Violation("dag", s.id, "combinational cycle through this stage"))
            break

    return ValidationReport(tuple(out))


def assert_acyclic(d: Design) -> None:
    """Cheap standalone cycle check over stage-to-stage arcs (registers and
    memory ports are sequential endpoints and break combinational loops)."""
    adj: dict[str, list[str]] = {}
    for n in d.nets:
        if node_kind(n.src) == "stage" and node_kind(n.dst) == "stage":
            adj.setdefault(node_id(n.src), []).append(node_id(n.dst))
    state: dict[str, int] = {}
    for root in adj:
        if state.get(root, 0):
            continue
        stack = [(root, iter(adj.get(root, ())))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for v in it:
                if state.get(v, 0) == 1:
                    raise StructuralError(f"combinational cycle through stage '{v}'")
                if state.get(v, 0) == 0:
                    state[v] = 1
                    stack.append((v, iter(adj.get(v, ()))))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()
