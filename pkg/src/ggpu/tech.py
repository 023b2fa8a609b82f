"""Parametric delay/area/power models for memory macros and logic, the
first-order PPA estimator, and calibration against published aggregates.

Model forms:

    delay(w, b)  = t0 + tw*log2(w/16) + tb*b          [ns]
    area(w, b)   = a0 + abit*w*b                      [mm^2]
    leakage      = leak_blk*mem_area + leak_ff*#ff + leak_comb*#comb   [mW]
    dynamic      = f_mhz*(edyn_blk*#mem + edyn_ff*#ff + edyn_comb*#comb) [W]

The strictly positive fixed area a0 encodes the observation that two blocks
of size MxN are larger and more power-hungry than one block of 2MxN; the
delay form is logarithmic in words (decoder depth) and linear in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from . import geometry
from .design import (
    BLOCK_LAW,
    COMB_PER_CU,
    COMB_PER_SPLIT,
    COMB_SHARED,
    FF_PER_CU,
    FF_SHARED,
    PARTITION_MC,
    PARTITION_TOP,
    TOP_LOGIC_FRACTION,
    Design,
    MemBlockInstance,
    MemBlockSpec,
    block_count_law,
    build_reference_design,
)
from .errors import CalibrationError, RangeError, StateError

LADDER_FREQS = (500, 590, 667)
_VARIANT_BY_FREQ = {500: "baseline", 590: "v590", 667: "v667"}

# Wire calibration target: the published 8-CU layout tops out at 600 MHz.
WIRE_CAP_TARGET_MHZ = 600.0
AXI_PIPE_WIDTH = 257


@dataclass(frozen=True)
class TechParams:
    t0: float | None = None  # base access delay, ns
    tw: float | None = None  # delay per doubling of word count, ns
    tb: float | None = None  # delay per data bit, ns
    mux_step: float | None = None  # delay per MSB-mux level, ns
    a0: float | None = None  # fixed area per block, mm^2
    abit: float | None = None  # area per bit, mm^2
    leak_blk: float | None = None  # mW per mm^2 of memory
    leak_ff: float | None = None  # mW per flop
    leak_comb: float | None = None  # mW per comb cell
    edyn_blk: float | None = None  # W per block per MHz
    edyn_ff: float | None = None  # W per flop per MHz
    edyn_comb: float | None = None  # W per comb cell per MHz
    kappa: float | None = None  # wire delay, ns per mm
    logic_area: float | None = None  # mm^2 per comb cell
    ff_area: float | None = None  # mm^2 per flop

    def require(self) -> "TechParams":
        missing = [f.name for f in fields(self) if getattr(self, f.name) is None]
        if missing:
            raise StateError(f"uncalibrated tech params: {', '.join(missing)} unset")
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise StateError(f"negative coefficient {f.name}")
        return self

    @property
    def calibrated(self) -> bool:
        return all(getattr(self, f.name) is not None for f in fields(self))


def solve_delay_ladder() -> dict[str, float]:
    """Delay coefficients solving the frequency-ladder constraints of the
    reference design (baseline critical path 2.000 ns, one fan-2 bits split
    per scheduled block crossing the 590/667 period thresholds)."""
    return {"t0": 0.05, "tw": 0.03, "tb": 0.0125, "mux_step": 0.005}


def _check_spec(spec: MemBlockSpec) -> None:
    if not spec.in_range():
        raise RangeError(
            f"memory spec {spec.words}x{spec.word_bits} outside the "
            f"16..65536 x 2..144 macro family"
        )


def mem_delay(spec: MemBlockSpec, p: TechParams) -> float:
    """Read access delay in ns; strictly increasing in words and bits."""
    p.require()
    _check_spec(spec)
    return p.t0 + p.tw * math.log2(spec.words / 16) + p.tb * spec.word_bits


def mem_access_delay(d: Design, inst: MemBlockInstance, p: TechParams) -> float:
    """Access delay of one instance including accumulated MSB-mux levels
    from words splits on its ancestry."""
    return mem_delay(inst.spec, p) + p.mux_step * d.mux_levels(inst.id)


def mem_area(spec: MemBlockSpec, p: TechParams) -> float:
    p.require()
    _check_spec(spec)
    return p.a0 + p.abit * spec.capacity_bits


def mem_power(spec: MemBlockSpec, access_rate: float, p: TechParams, freq_mhz: float = 500.0) -> tuple[float, float]:
    """(leakage mW, dynamic W) for one block at the given access rate."""
    p.require()
    _check_spec(spec)
    if not 0.0 <= access_rate <= 1.0:
        raise RangeError(f"access_rate must be in [0, 1], got {access_rate}")
    if freq_mhz <= 0:
        raise RangeError("frequency must be positive")
    leak = p.leak_blk * mem_area(spec, p)
    dyn = p.edyn_blk * access_rate * freq_mhz
    return leak, dyn


@dataclass(frozen=True)
class PpaEstimate:
    total_area_mm2: float
    memory_area_mm2: float
    ff_count: int
    comb_count: int
    memory_count: int
    leakage_mw: float
    dynamic_w: float
    total_w: float
    fmax_mhz: float


def design_memory_area(d: Design, p: TechParams) -> float:
    # factored form a0*n + abit*sum(cap): keeps split deltas exactly a0
    caps = sum(m.spec.capacity_bits for m in d.memories)
    return p.a0 * len(d.memories) + p.abit * caps


def estimate_ppa(d: Design, p: TechParams, freq_mhz: float, fmax_mhz: float | None = None) -> PpaEstimate:
    """First-order PPA of a design at an operating frequency.  Deterministic
    sum of per-block contributions plus the FF/comb census."""
    p.require()
    if freq_mhz <= 0:
        raise RangeError("frequency must be positive")
    m_area = design_memory_area(d, p)
    ff = d.ff_count
    comb = d.comb_count
    total_area = m_area + p.ff_area * ff + p.logic_area * comb
    leak = p.leak_blk * m_area + p.leak_ff * ff + p.leak_comb * comb
    dyn = freq_mhz * (p.edyn_blk * len(d.memories) + p.edyn_ff * ff + p.edyn_comb * comb)
    return PpaEstimate(
        total_area_mm2=total_area,
        memory_area_mm2=m_area,
        ff_count=ff,
        comb_count=comb,
        memory_count=len(d.memories),
        leakage_mw=leak,
        dynamic_w=dyn,
        total_w=leak / 1000.0 + dyn,
        fmax_mhz=fmax_mhz if fmax_mhz is not None else freq_mhz,
    )


def partition_areas(d: Design, p: TechParams) -> dict[str, float]:
    """Utilized area per partition divided by its placement density; feeds
    the floorplan."""
    p.require()
    mem_by_part: dict[str, float] = {}
    for m in d.memories:
        mem_by_part[m.partition] = mem_by_part.get(m.partition, 0.0) + mem_area(m.spec, p)
    shared_logic = p.ff_area * FF_SHARED + p.logic_area * COMB_SHARED
    pipe_by_part: dict[str, float] = {}
    for pr in d.pipeline_regs:
        src = pr.host_net.split("->", 1)[0]
        part = next((s.partition for s in d.stages if s.id == src), PARTITION_MC)
        pipe_by_part[part] = pipe_by_part.get(part, 0.0) + p.ff_area * pr.width

    areas: dict[str, float] = {}
    cu_logic = p.ff_area * FF_PER_CU + p.logic_area * COMB_PER_CU
    for k in range(d.config.num_cus):
        part = f"cu{k}"
        used = mem_by_part.get(part, 0.0) + cu_logic + pipe_by_part.get(part, 0.0)
        areas[part] = used / geometry.CU_DENSITY
    mc_used = (
        mem_by_part.get(PARTITION_MC, 0.0)
        + shared_logic * (1 - TOP_LOGIC_FRACTION)
        + pipe_by_part.get(PARTITION_MC, 0.0)
    )
    areas[PARTITION_MC] = mc_used / geometry.MC_DENSITY
    top_used = shared_logic * TOP_LOGIC_FRACTION + pipe_by_part.get(PARTITION_TOP, 0.0)
    areas[PARTITION_TOP] = top_used / geometry.TOP_DENSITY
    return areas


# ---------------------------------------------------------------------------
# Table-1 style aggregate rows and calibration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AggregateRow:
    cus: int
    freq_mhz: int
    total_area_mm2: float
    memory_area_mm2: float
    ff: int
    comb: int
    memory: int
    leakage_mw: float
    dynamic_w: float
    total_w: float

    @property
    def variant(self) -> str:
        return _VARIANT_BY_FREQ[self.freq_mhz]


@dataclass(frozen=True)
class CalibrationReport:
    area_slope_per_cu: float
    area_intercept: float
    dynamic_slope_per_cu: float
    residuals: tuple[tuple[str, float, float], ...]  # (label, actual, predicted)

    def max_rel_error(self) -> float:
        return max(abs(pr - ac) / abs(ac) for _, ac, pr in self.residuals)


def _model_census(cus: int, variant: str) -> tuple[int, int, int]:
    """(#memory, #ff, #comb) of the reference design for a ladder point."""
    n_mem = block_count_law(cus, variant)
    splits = n_mem - block_count_law(cus, "baseline")
    pipe = AXI_PIPE_WIDTH if variant != "baseline" else 0
    ff = FF_SHARED + FF_PER_CU * cus + pipe
    comb = COMB_SHARED + COMB_PER_CU * cus + COMB_PER_SPLIT * splits
    return n_mem, ff, comb


def _solve3(a, b):
    """Gaussian elimination for a 3x3 system."""
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for i in range(3):
        piv = max(range(i, 3), key=lambda r: abs(m[r][i]))
        m[i], m[piv] = m[piv], m[i]
        if abs(m[i][i]) < 1e-30:
            raise CalibrationError("singular calibration system")
        for r in range(3):
            if r != i:
                f = m[r][i] / m[i][i]
                m[r] = [x - f * y for x, y in zip(m[r], m[i])]
    return tuple(m[i][3] / m[i][i] for i in range(3))


def calibrate(rows: list[AggregateRow]) -> tuple[TechParams, CalibrationReport]:
    """Fit TechParams against published per-configuration aggregates.

    The block-count law is verified first (hard failure on violation); the
    area and power coefficients are then solved in closed form against the
    1-CU/8-CU anchors, and the wire coefficient against the known 8-CU
    layout frequency cap.
    """
    if not rows:
        raise CalibrationError("no calibration rows")
    for r in rows:
        if r.freq_mhz not in _VARIANT_BY_FREQ:
            raise CalibrationError(f"row at {r.freq_mhz} MHz is not on the 500/590/667 ladder")
        expected = block_count_law(r.cus, r.variant)
        if r.memory != expected:
            raise CalibrationError(
                f"{r.cus}-CU @{r.freq_mhz} MHz reports {r.memory} memory blocks, "
                f"inconsistent with the reference inventory ({expected})"
            )

    by_key = {(r.cus, r.freq_mhz): r for r in rows}

    def need(cus, freq):
        row = by_key.get((cus, freq))
        if row is None:
            raise CalibrationError(f"calibration requires the {cus}-CU @{freq} MHz row")
        return row

    r1 = need(1, 500)
    r8 = need(8, 500)
    r_delta = by_key.get((8, 590)) or by_key.get((1, 590)) or by_key.get((8, 667))
    if r_delta is None:
        raise CalibrationError("calibration requires at least one optimized-variant row")

    d1 = build_reference_design(1)
    d8 = build_reference_design(8)
    cap1 = sum(m.spec.capacity_bits for m in d1.memories)
    cap8 = sum(m.spec.capacity_bits for m in d8.memories)
    cap_cu = (cap8 - cap1) / 7
    cap_sh = cap1 - cap_cu

    # memory area: counts and capacities are both affine in CU count, so the
    # slope/intercept of the published memory-area column pin (a0, abit).
    slope = (r8.memory_area_mm2 - r1.memory_area_mm2) / 7
    intercept = r1.memory_area_mm2 - slope
    shared_n, cu_n = BLOCK_LAW["baseline"]
    det = cu_n * cap_sh - shared_n * cap_cu
    a0 = (slope * cap_sh - intercept * cap_cu) / det
    abit = (slope - cu_n * a0) / cap_cu
    if a0 <= 0 or abit <= 0:
        raise CalibrationError("area fit produced non-positive coefficients")

    # logic area from the total-minus-memory column
    logic1 = r1.total_area_mm2 - r1.memory_area_mm2
    logic8 = r8.total_area_mm2 - r8.memory_area_mm2
    l_slope = (logic8 - logic1) / 7
    l_int = logic1 - l_slope
    det2 = FF_PER_CU * COMB_SHARED - COMB_PER_CU * FF_SHARED
    ff_area = (l_slope * COMB_SHARED - l_int * COMB_PER_CU) / det2
    logic_area = (FF_PER_CU * l_int - FF_SHARED * l_slope) / det2

    def census(row: AggregateRow):
        return _model_census(row.cus, row.variant)

    def model_mem_area(row: AggregateRow) -> float:
        n, _, _ = census(row)
        cap = cap_sh + row.cus * cap_cu  # splits conserve capacity
        return a0 * n + abit * cap

    # leakage: leak_blk on block area plus per-cell terms
    anchor_rows = (r1, r8, r_delta)
    a_leak = []
    b_leak = []
    for r in anchor_rows:
        _, ff, comb = census(r)
        a_leak.append((model_mem_area(r), ff, comb))
        b_leak.append(r.leakage_mw)
    leak_blk, leak_ff, leak_comb = _solve3(a_leak, b_leak)

    # dynamic: per-block, per-flop, per-cell energy coefficients; the
    # reference frequency of each row is its own synthesis frequency.
    a_dyn = []
    b_dyn = []
    for r in anchor_rows:
        n, ff, comb = census(r)
        a_dyn.append((r.freq_mhz * n, r.freq_mhz * ff, r.freq_mhz * comb))
        b_dyn.append(r.dynamic_w)
    edyn_blk, edyn_ff, edyn_comb = _solve3(a_dyn, b_dyn)

    for name, val in (
        ("leak_blk", leak_blk), ("leak_ff", leak_ff), ("leak_comb", leak_comb),
        ("edyn_blk", edyn_blk), ("edyn_ff", edyn_ff), ("edyn_comb", edyn_comb),
    ):
        if val <= 0:
            raise CalibrationError(f"power fit produced non-positive {name}")

    params = TechParams(
        **solve_delay_ladder(),
        a0=a0,
        abit=abit,
        leak_blk=leak_blk,
        leak_ff=leak_ff,
        leak_comb=leak_comb,
        edyn_blk=edyn_blk,
        edyn_ff=edyn_ff,
        edyn_comb=edyn_comb,
        kappa=0.0,
        logic_area=logic_area,
        ff_area=ff_area,
    )

    # wire coefficient: solve the known 8-CU layout cap against the
    # baseline 8-CU floorplan (return-leg period = 1000 / cap target).
    areas = partition_areas(d8, params)
    rects = geometry.place_partitions(
        areas[PARTITION_MC], areas["cu0"], areas[PARTITION_TOP], 8
    )
    d_max = max(
        geometry.manhattan(rects[PARTITION_MC], rects[f"cu{k}"]) for k in range(8)
    )
    align_delay = next(s.delay_ns for s in d8.stages if s.id.endswith("lsu_align"))
    kappa = (1000.0 / WIRE_CAP_TARGET_MHZ - align_delay) / d_max
    params = TechParams(**{**params.__dict__, "kappa": kappa})

    # residual report over everything provided
    residuals: list[tuple[str, float, float]] = []
    for r in sorted(rows, key=lambda r: (r.cus, r.freq_mhz)):
        n, ff, comb = census(r)
        marea = model_mem_area(r)
        total = marea + ff_area * ff + logic_area * comb
        leak = leak_blk * marea + leak_ff * ff + leak_comb * comb
        dyn = r.freq_mhz * (edyn_blk * n + edyn_ff * ff + edyn_comb * comb)
        label = f"{r.cus}@{r.freq_mhz}"
        residuals.append((f"{label} total_area", r.total_area_mm2, total))
        residuals.append((f"{label} memory_area", r.memory_area_mm2, marea))
        residuals.append((f"{label} leakage", r.leakage_mw, leak))
        residuals.append((f"{label} dynamic", r.dynamic_w, dyn))

    total_slope = (r8.total_area_mm2 - r1.total_area_mm2) / 7
    dyn_slope = (r8.dynamic_w - r1.dynamic_w) / 7
    report = CalibrationReport(
        area_slope_per_cu=total_slope,
        area_intercept=r1.total_area_mm2 - total_slope,
        dynamic_slope_per_cu=dyn_slope,
        residuals=tuple(residuals),
    )
    return params, report


# ---------------------------------------------------------------------------
# Area-increase summary (the published-table growth report)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AreaGrowthSummary:
    avg_growth_590_pct: float
    avg_growth_667_pct: float
    per_cu_590: tuple[tuple[int, float], ...]
    per_cu_667: tuple[tuple[int, float], ...]


def area_growth_summary(rows: list[AggregateRow]) -> AreaGrowthSummary:
    """Average total-area growth across CU counts for the 500->590 and
    590->667 steps of a reproduced characteristics table."""
    by_key = {(r.cus, r.freq_mhz): r for r in rows}
    cus = sorted({r.cus for r in rows})
    g590 = []
    g667 = []
    for c in cus:
        try:
            base = by_key[(c, 500)]
            mid = by_key[(c, 590)]
            top = by_key[(c, 667)]
        except KeyError as e:
            raise CalibrationError(f"growth summary needs all three variants for {c} CUs") from e
        g590.append((c, (mid.total_area_mm2 / base.total_area_mm2 - 1) * 100))
        g667.append((c, (top.total_area_mm2 / mid.total_area_mm2 - 1) * 100))
    return AreaGrowthSummary(
        avg_growth_590_pct=sum(v for _, v in g590) / len(g590),
        avg_growth_667_pct=sum(v for _, v in g667) / len(g667),
        per_cu_590=tuple(g590),
        per_cu_667=tuple(g667),
    )
