"""Cycle-approximate discrete-event performance model of SIMT execution.

Workgroups are dispatched round-robin over compute units; each wavefront
instruction occupies its CU's SIMD issue port for wf_size/pes_per_cu = 8
cycles; global-memory misses queue on the shared data channels.  Wavefronts
are in-order (the next instruction issues after the previous one retires),
so latency hiding comes from round-robin scheduling across resident
wavefronts.  Event ties resolve by ascending (time, cu, wf); identical
inputs and seed give bit-identical results regardless of host threading.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .design import GGpuConfig
from .errors import ConfigError, RangeError

WF_SIZE = 64
ISSUE_CYCLES = 8  # 64 work-items over 8 PEs


@dataclass(frozen=True)
class KernelWorkload:
    name: str
    work_items: int
    instr_per_item: int
    mem_fraction: float
    hit_rate: float
    wg_size: int
    serial_prologue_cycles: int = 0

    def __post_init__(self):
        if self.work_items <= 0:
            raise RangeError("work_items must be positive")
        if self.instr_per_item <= 0:
            raise RangeError("instr_per_item must be positive")
        for fname in ("mem_fraction", "hit_rate"):
            v = getattr(self, fname)
            if not 0.0 <= v <= 1.0:
                raise RangeError(f"{fname} must be in [0, 1], got {v}")
        if self.wg_size > 512:
            raise ConfigError(f"wg_size {self.wg_size} exceeds the 512 work-item CU capacity")
        if self.wg_size <= 0 or self.wg_size % WF_SIZE != 0:
            raise ConfigError(f"wg_size must be a positive multiple of {WF_SIZE}")
        if self.serial_prologue_cycles < 0:
            raise RangeError("serial_prologue_cycles must be >= 0")


@dataclass(frozen=True)
class SimParams:
    alu_latency: int = 1
    pipeline_depth: int = 4
    hit_latency: int = 2
    miss_latency: int = 40
    channels: int = 1
    channel_throughput: float = 1.0
    wf_issue: str = "round_robin"
    # shared direct-mapped cache pressure: effective hit rate drops by this
    # much per additional active CU
    cache_pressure_per_cu: float = 0.0
    # channel turnaround cost when consecutive grants serve different CUs
    channel_switch_penalty: int = 0

    def __post_init__(self):
        if self.alu_latency < 1 or self.hit_latency < 1 or self.miss_latency < 1:
            raise RangeError("latencies must be >= 1 cycle")
        if self.pipeline_depth < 1:
            raise RangeError("pipeline_depth must be >= 1")
        if not 1 <= self.channels <= 4:
            raise RangeError(f"channels must be in 1..4, got {self.channels}")
        if self.channel_throughput <= 0:
            raise RangeError("channel_throughput must be positive")
        if self.wf_issue != "round_robin":
            raise RangeError(f"unknown issue policy '{self.wf_issue}'")
        if self.cache_pressure_per_cu < 0 or self.channel_switch_penalty < 0:
            raise RangeError("contention parameters must be >= 0")


@dataclass(frozen=True)
class SimResult:
    cycles: int
    per_cu_busy: tuple[float, ...]
    channel_occupancy: tuple[float, ...]
    wf_stall_cycles: int
    work_item_instructions: int
    mem_requests: int
    miss_requests: int


def _bresenham_slots(n: int, fraction: float) -> list[bool]:
    """Evenly spaced boolean pattern with exactly floor(n*fraction + 0.5)
    True entries (deterministic, independent of the seed)."""
    count = int(math.floor(n * fraction + 0.5))
    if count <= 0:
        return [False] * n
    if count >= n:
        return [True] * n
    out = [False] * n
    acc = 0
    for i in range(n):
        acc += count
        if acc >= n:
            acc -= n
            out[i] = True
    return out


class _Wavefront:
    __slots__ = ("wf_id", "cu", "active_items", "mem_slots", "miss_slots", "next_instr", "ready_at")

    def __init__(self, wf_id, cu, active_items, mem_slots, miss_slots):
        self.wf_id = wf_id
        self.cu = cu
        self.active_items = active_items
        self.mem_slots = mem_slots
        self.miss_slots = miss_slots
        self.next_instr = 0
        self.ready_at = 0


def simulate(w: KernelWorkload, cfg: GGpuConfig, sp: SimParams, seed: int = 0) -> SimResult:
    """Run one kernel to completion and return cycle counts and utilization."""
    if sp.channels > cfg.data_channels and cfg.data_channels < sp.channels:
        # channel count is bounded by the configuration
        raise RangeError(
            f"sim uses {sp.channels} channels but the configuration has {cfg.data_channels}"
        )
    num_cus = cfg.num_cus
    rng = random.Random(seed)

    total_wfs = math.ceil(w.work_items / WF_SIZE)
    wfs_per_wg = w.wg_size // WF_SIZE
    num_wgs = math.ceil(total_wfs / wfs_per_wg)
    slots_per_cu = cfg.max_workitems_per_cu // WF_SIZE

    hit_eff = max(0.0, w.hit_rate - sp.cache_pressure_per_cu * (num_cus - 1))
    mem_per_wf = _bresenham_slots(w.instr_per_item, w.mem_fraction)
    n_mem = sum(mem_per_wf)

    wavefronts: list[_Wavefront] = []
    for wf_id in range(total_wfs):
        wg = wf_id // wfs_per_wg
        cu = wg % num_cus
        remaining = w.work_items - wf_id * WF_SIZE
        active = min(WF_SIZE, remaining)
        miss_pattern = _bresenham_slots(n_mem, 1.0 - hit_eff)
        rng.shuffle(miss_pattern)
        wavefronts.append(_Wavefront(wf_id, cu, active, mem_per_wf, miss_pattern))

    # per-CU state
    port_free = [0] * num_cus
    resident: list[list[int]] = [[] for _ in range(num_cus)]
    pending_wgs: list[list[int]] = [[] for _ in range(num_cus)]
    for wg in range(num_wgs):
        pending_wgs[wg % num_cus].append(wg)
    rr_next = [0] * num_cus
    busy = [0] * num_cus

    # channel state
    chan_free = [0.0] * sp.channels
    chan_busy = [0.0] * sp.channels
    chan_last_cu = [-1] * sp.channels
    next_chan = 0
    service = 1.0 / sp.channel_throughput

    executed = 0
    mem_requests = 0
    miss_requests = 0
    stall = 0
    makespan = 0

    def admit(cu: int, now: int):
        while pending_wgs[cu] and len(resident[cu]) + wfs_per_wg <= slots_per_cu:
            wg = pending_wgs[cu].pop(0)
            first = wg * wfs_per_wg
            for wf_id in range(first, min(first + wfs_per_wg, total_wfs)):
                wf = wavefronts[wf_id]
                wf.ready_at = now
                resident[cu].append(wf_id)

    for cu in range(num_cus):
        admit(cu, 0)

    active_cus = {cu for cu in range(num_cus) if resident[cu]}
    while active_cus:
        # pick the CU with the earliest next issue; ties by cu id
        best = None
        for cu in sorted(active_cus):
            ready_times = [wavefronts[i].ready_at for i in resident[cu]]
            t = max(port_free[cu], min(ready_times))
            if best is None or t < best[0]:
                best = (t, cu)
        t_issue, cu = best

        # round-robin among wavefronts ready at the issue time
        res = resident[cu]
        ready = [i for i in res if wavefronts[i].ready_at <= t_issue]
        start = rr_next[cu] % len(res)
        chosen = None
        for off in range(len(res)):
            cand = res[(start + off) % len(res)]
            if cand in ready:
                chosen = cand
                rr_next[cu] = (res.index(cand) + 1) % len(res)
                break
        wf = wavefronts[chosen]
        stall += t_issue - wf.ready_at

        i = wf.next_instr
        issue_end = t_issue + ISSUE_CYCLES
        busy[cu] += ISSUE_CYCLES
        port_free[cu] = issue_end
        executed += wf.active_items

        if wf.mem_slots[i]:
            mem_requests += 1
            mem_idx = sum(1 for j in range(i) if wf.mem_slots[j])
            if wf.miss_slots[mem_idx]:
                miss_requests += 1
                ch = next_chan
                next_chan = (next_chan + 1) % sp.channels
                begin = max(issue_end, chan_free[ch])
                cost = service
                if chan_last_cu[ch] not in (-1, cu):
                    cost += sp.channel_switch_penalty
                chan_free[ch] = begin + cost
                chan_busy[ch] += cost
                chan_last_cu[ch] = cu
                retire = int(math.ceil(chan_free[ch])) + sp.miss_latency
            else:
                retire = issue_end + sp.hit_latency
        else:
            retire = issue_end + sp.pipeline_depth + sp.alu_latency - 1

        makespan = max(makespan, retire)
        wf.next_instr += 1
        if wf.next_instr >= w.instr_per_item:
            res.remove(chosen)
            rr_next[cu] = 0 if not res else rr_next[cu] % len(res)
            admit(cu, retire)
            if not res and not pending_wgs[cu]:
                active_cus.discard(cu)
        else:
            wf.ready_at = retire

    cycles = w.serial_prologue_cycles + makespan
    denom = max(1, makespan)
    return SimResult(
        cycles=cycles,
        per_cu_busy=tuple(b / denom for b in busy),
        channel_occupancy=tuple(b / denom for b in chan_busy),
        wf_stall_cycles=stall,
        work_item_instructions=executed,
        mem_requests=mem_requests,
        miss_requests=miss_requests,
    )


def compute_lower_bound(w: KernelWorkload, cfg: GGpuConfig, sp: SimParams) -> float:
    wfs = math.ceil(w.work_items / WF_SIZE)
    return math.ceil(wfs / cfg.num_cus) * w.instr_per_item * ISSUE_CYCLES


def bandwidth_lower_bound(w: KernelWorkload, cfg: GGpuConfig, sp: SimParams) -> float:
    """Miss requests cannot drain faster than the aggregate channel rate."""
    hit_eff = max(0.0, w.hit_rate - sp.cache_pressure_per_cu * (cfg.num_cus - 1))
    mem_per_wf = sum(_bresenham_slots(w.instr_per_item, w.mem_fraction))
    n_mem = math.ceil(w.work_items / WF_SIZE) * mem_per_wf
    misses = math.ceil(w.work_items / WF_SIZE) * sum(_bresenham_slots(mem_per_wf, 1.0 - hit_eff))
    return misses / (sp.channels * sp.channel_throughput)


def scaling_sweep(
    w: KernelWorkload, cu_list: list[int], sp: SimParams, seed: int = 0
) -> list[tuple[int, SimResult]]:
    """One simulate() per CU count with a shared seed, ordered by CU count."""
    out = []
    for cus in sorted(cu_list):
        cfg = GGpuConfig(num_cus=cus, data_channels=min(4, max(1, sp.channels)))
        out.append((cus, simulate(w, cfg, sp, seed)))
    return out


def sweep_table(results: list[tuple[int, SimResult]]) -> str:
    lines = ["cus\tcycles\tbusy\toccupancy"]
    for cus, r in results:
        busy = sum(r.per_cu_busy) / len(r.per_cu_busy)
        occ = sum(r.channel_occupancy) / len(r.channel_occupancy)
        lines.append(f"{cus}\t{r.cycles}\t{busy:.4f}\t{occ:.4f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Workload descriptor documents
# ---------------------------------------------------------------------------


def build_workload(text: str) -> KernelWorkload:
    """Parse and validate a workload descriptor document."""
    from .docio import parse_document

    sections = parse_document(text, "workload")
    for sec in sections:
        if sec.name == "workload":
            return KernelWorkload(
                name=sec.get("name", str),
                work_items=sec.get("work_items", int),
                instr_per_item=sec.get("instr_per_item", int),
                mem_fraction=sec.get("mem_fraction", float),
                hit_rate=sec.get("hit_rate", float),
                wg_size=sec.get("wg_size", int),
                serial_prologue_cycles=sec.get("serial_prologue_cycles", int, 0),
            )
    from .errors import ParseError

    raise ParseError("document has no [workload] section")


def build_sim_params(text: str) -> SimParams:
    from .docio import parse_document

    sections = parse_document(text, "sim-params")
    for sec in sections:
        if sec.name == "sim-params":
            return SimParams(
                alu_latency=sec.get("alu_latency", int, 1),
                pipeline_depth=sec.get("pipeline_depth", int, 4),
                hit_latency=sec.get("hit_latency", int, 2),
                miss_latency=sec.get("miss_latency", int, 40),
                channels=sec.get("channels", int, 1),
                channel_throughput=sec.get("channel_throughput", float, 1.0),
                wf_issue=sec.get("wf_issue", str, "round_robin"),
                cache_pressure_per_cu=sec.get("cache_pressure_per_cu", float, 0.0),
                channel_switch_penalty=sec.get("channel_switch_penalty", int, 0),
            )
    from .errors import ParseError

    raise ParseError("document has no [sim-params] section")
