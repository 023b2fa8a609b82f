"""Planning flow: intake spec, estimate, iterate split/pipeline transforms
until the frequency target holds, enumerate candidate configurations and
check results against the spec caps.

One optimize iteration clears the current critical-path level: sibling
banks of a split group share identical path delays, so several transforms
may be needed before the critical path strictly decreases.  Progress is
asserted per iteration; a level that cannot be lowered ends the run with
feasible=False and the best design found so far.
"""

from __future__ import annotations

from dataclasses import dataclass

from .design import Design, Transform, build_reference_design, node_kind
from .errors import ConfigError, RangeError
from .tech import PpaEstimate, TechParams, estimate_ppa
from .timing import (
    Floorplan,
    TimingGraph,
    build_timing_graph,
    critical_path,
    layout_floorplan,
    path_edges,
)
from . import transforms

_EPS = 1e-9
TRANSFORM_CAP = 10_000


@dataclass(frozen=True)
class Spec:
    num_cus: int
    target_freq_mhz: float
    max_area_mm2: float | None = None
    max_power_w: float | None = None
    wire_model: bool = False

    def __post_init__(self):
        if self.target_freq_mhz <= 0:
            raise ConfigError("target frequency must be positive")
        if not 1 <= self.num_cus <= 8:
            raise ConfigError(f"num_cus must be in 1..8, got {self.num_cus}")


@dataclass(frozen=True)
class Recommendation:
    current_fmax_mhz: float
    bottleneck: str | None  # memory id or net id on the critical path
    action: Transform | None
    predicted_fmax_mhz: float
    feasible: bool
    reason: str


@dataclass(frozen=True)
class PlanResult:
    achieved_fmax_mhz: float
    transform_log: tuple[Transform, ...]
    ppa: PpaEstimate
    feasible: bool
    iterations: int
    design: Design


def _graph(
    d: Design,
    p: TechParams,
    fp: Floorplan | None,
    overrides: dict[str, float] | None,
) -> TimingGraph:
    g = build_timing_graph(d, p, fp)
    if not overrides:
        return g
    for mem_id in overrides:
        d.memory(mem_id)  # raises UnknownIdError for stale references
    edges = tuple(
        e if not (node_kind(e.src) == "mem" and e.src.split(":", 1)[1] in overrides)
        else type(e)(e.src, e.dst, overrides[e.src.split(":", 1)[1]], e.net_id)
        for e in g.edges
    )
    return TimingGraph(nodes=g.nodes, edges=edges)


def _fmax_of(d, p, fp, overrides) -> float:
    return 1000.0 / critical_path(_graph(d, p, fp, overrides)).total_delay_ns


def _candidate_splits(d: Design, mem_id: str) -> list[Transform]:
    spec = d.memory(mem_id).spec
    out = []
    if spec.words % 2 == 0 and spec.words // 2 >= 16:
        out.append(Transform("split_words", mem_id, 2))
    if spec.word_bits % 2 == 0 and spec.word_bits // 2 >= 2:
        out.append(Transform("split_bits", mem_id, 2))
    return out


def recommend_next(
    d: Design,
    p: TechParams,
    measured_delays: dict[str, float] | None = None,
    fp: Floorplan | None = None,
    target_mhz: float | None = None,
) -> Recommendation:
    """The designer-facing map step: locate the bottleneck and propose one
    transform.  measured_delays replace the model access delays for the
    listed memories.  The predicted frequency is an exact recomputation on
    the transformed design, never an estimate."""
    if measured_delays:
        for mem_id, val in measured_delays.items():
            if val <= 0:
                raise RangeError(f"measured delay for '{mem_id}' must be positive")
    g = _graph(d, p, fp, measured_delays)
    cp = critical_path(g)
    current = 1000.0 / cp.total_delay_ns

    if target_mhz is not None and current >= target_mhz - _EPS:
        return Recommendation(current, None, None, current, True, "target already met")

    def predicted(action: Transform) -> float:
        nxt = transforms.apply_transform(d, action)
        # a split consumes its target: the measured delay of the old block
        # no longer applies to the new banks
        live = (
            {k: v for k, v in measured_delays.items() if nxt.has_memory(k)}
            if measured_delays
            else None
        )
        return _fmax_of(nxt, p, fp, live)

    if cp.contains_memory:
        mem_id = cp.memory_ids[0]
        candidates = _candidate_splits(d, mem_id)
        if candidates:
            # larger read-path reduction per unit added area; both axes add
            # the same fixed block area a0, so compare the reduction of the
            # path through this memory.  Ties go to the words split.
            spec = d.memory(mem_id).spec
            scored = []
            for t in candidates:
                if t.kind == "split_words":
                    reduction = p.tw - p.mux_step
                else:
                    reduction = p.tb * spec.word_bits / 2
                scored.append((reduction, t.kind == "split_words", t))
            scored.sort(key=lambda s: (s[0], s[1]), reverse=True)
            _, _, best = scored[0]
            return Recommendation(
                current, mem_id, best, predicted(best), True, "split bottleneck memory"
            )

    legal = [
        e for e in path_edges(g, cp)
        if node_kind(e.src) == "stage" and node_kind(e.dst) == "stage"
    ]
    if legal:
        legal.sort(key=lambda e: (-e.delay_ns, e.net_id))
        action = Transform("pipeline", legal[0].net_id, None)
        return Recommendation(
            current,
            legal[0].net_id,
            action,
            predicted(action),
            True,
            "pipeline longest critical arc",
        )

    bottleneck = cp.memory_ids[0] if cp.contains_memory else cp.nodes[0].split(":", 1)[1]
    return Recommendation(
        current,
        bottleneck,
        None,
        current,
        False,
        "critical path has no splittable memory and no legal pipeline cut",
    )


def optimize_to_target(d: Design, p: TechParams, spec: Spec) -> PlanResult:
    """Iteratively split the critical-path memory (or pipeline the critical
    arc) until 1000/CP meets the target.  Deterministic; the floorplan used
    by the wire model is frozen at entry."""
    p.require()
    fp = layout_floorplan(d, p) if spec.wire_model else None
    target_period = 1000.0 / spec.target_freq_mhz

    cur = d
    applied = 0
    iterations = 0
    cp = critical_path(_graph(cur, p, fp, None))
    feasible = True
    reason = ""

    while cp.total_delay_ns > target_period + _EPS:
        level = cp.total_delay_ns
        # clear the current level; several equal-delay paths may bind
        while cp.total_delay_ns >= level - _EPS:
            rec = recommend_next(cur, p, fp=fp)
            if rec.action is None:
                feasible = False
                reason = rec.reason
                break
            if applied >= TRANSFORM_CAP:
                feasible = False
                reason = "transform cap reached"
                break
            nxt = transforms.apply_transform(cur, rec.action)
            applied += 1
            cp_next = critical_path(_graph(nxt, p, fp, None))
            if cp_next.total_delay_ns > level + _EPS:
                feasible = False
                reason = "no transform lowers the critical path"
                break
            cur = nxt
            cp = cp_next
        if not feasible:
            break
        iterations += 1

    achieved = 1000.0 / cp.total_delay_ns
    feasible = feasible and achieved >= spec.target_freq_mhz - _EPS
    eval_freq = spec.target_freq_mhz if feasible else achieved
    ppa = estimate_ppa(cur, p, eval_freq, fmax_mhz=achieved)
    return PlanResult(
        achieved_fmax_mhz=achieved,
        transform_log=cur.transform_log[len(d.transform_log):],
        ppa=ppa,
        feasible=feasible,
        iterations=iterations,
        design=cur,
    )


def enumerate_candidates(
    cu_list: list[int],
    freq_list: list[float],
    p: TechParams,
    wire_model: bool = False,
) -> list[PlanResult]:
    """Evaluate the Cartesian product of CU counts and frequency targets.
    Output order is fixed: ascending CU count, then frequency."""
    results = []
    for cus in sorted(cu_list):
        base = build_reference_design(cus)
        for f in sorted(freq_list):
            results.append(
                optimize_to_target(base, p, Spec(num_cus=cus, target_freq_mhz=f, wire_model=wire_model))
            )
    return results


@dataclass(frozen=True)
class FeasibilityVerdict:
    ok: bool
    violations: tuple[str, ...]


def check_spec(r: PlanResult, spec: Spec) -> FeasibilityVerdict:
    """Post-evaluation check that the achieved PPA sits inside the caps."""
    violations = []
    if r.achieved_fmax_mhz < spec.target_freq_mhz - _EPS:
        violations.append(
            f"fmax {r.achieved_fmax_mhz:.1f} MHz below target {spec.target_freq_mhz:.1f} MHz"
        )
    if spec.max_area_mm2 is not None and r.ppa.total_area_mm2 > spec.max_area_mm2:
        violations.append(
            f"max_area_mm2: {r.ppa.total_area_mm2:.2f} exceeds cap {spec.max_area_mm2:.2f}"
        )
    if spec.max_power_w is not None and r.ppa.total_w > spec.max_power_w:
        violations.append(
            f"max_power_w: {r.ppa.total_w:.2f} exceeds cap {spec.max_power_w:.2f}"
        )
    return FeasibilityVerdict(ok=not violations, violations=tuple(violations))


def summary_table(results: list[PlanResult], targets: list[tuple[int, float]] | None = None) -> str:
    """Human-readable summary mirroring the published characteristics
    columns, one row per evaluated candidate."""
    header = (
        f"{'cu':>3} {'target':>7} {'fmax':>8} {'feas':>5} {'area':>8} {'mem_area':>9} "
        f"{'#ff':>8} {'#comb':>8} {'#mem':>5} {'leak_mw':>8} {'dyn_w':>7} {'total_w':>8}"
    )
    lines = [header]
    for i, r in enumerate(results):
        cu = r.design.config.num_cus
        tgt = targets[i][1] if targets else r.ppa.fmax_mhz
        lines.append(
            f"{cu:>3} {tgt:>7.0f} {r.achieved_fmax_mhz:>8.1f} {str(r.feasible):>5} "
            f"{r.ppa.total_area_mm2:>8.2f} {r.ppa.memory_area_mm2:>9.2f} "
            f"{r.ppa.ff_count:>8} {r.ppa.comb_count:>8} {r.ppa.memory_count:>5} "
            f"{r.ppa.leakage_mw:>8.2f} {r.ppa.dynamic_w:>7.2f} {r.ppa.total_w:>8.2f}"
        )
    return "\n".join(lines) + "\n"
