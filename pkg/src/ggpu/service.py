"""HTTP service exposing planner, timing, transform and analysis operations
to the explorer UI.

Sessions are in-memory: one current design plus an undo stack (depth 64)
and the measured-delay overrides for the map workflow.  Mutations within a
session are serialized by a per-session lock; distinct sessions proceed in
parallel.  Every mutating response carries the new fmax and PPA so clients
never recompute physics locally.
"""

from __future__ import annotations

import itertools
import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import data_text, shipped_tech_params
from .analysis import RISCV_AREA_MM2, load_benchmarks, speedup_report
from .design import Design, Transform, build_reference_design, validate_design
from .docio import read_design, read_table1, write_design
from .errors import GgpuError, LegalityError, ParseError, RangeError, UnknownIdError
from .planner import Spec, optimize_to_target, recommend_next
from .tech import estimate_ppa
from .timing import build_timing_graph, critical_path, layout_floorplan, timing_report
from . import transforms

UNDO_DEPTH = 64

app = FastAPI(title="ggpu-planner", version="0.1.0")


# ---------------------------------------------------------------------------
# wire models
# ---------------------------------------------------------------------------


class CreateSessionRequest(BaseModel):
    cus: int | None = Field(default=None, ge=1, le=8)
    variant: str = "baseline"
    design_doc: str | None = None


class PpaBody(BaseModel):
    total_area_mm2: float
    memory_area_mm2: float
    ff_count: int
    comb_count: int
    memory_count: int
    leakage_mw: float
    dynamic_w: float
    total_w: float
    fmax_mhz: float


class CriticalPathBody(BaseModel):
    nodes: list[str]
    total_delay_ns: float
    contains_memory: bool
    memory_ids: list[str]


class SessionState(BaseModel):
    session_id: str
    fmax_mhz: float
    ppa: PpaBody
    critical_path: CriticalPathBody
    undo_depth: int
    memory_count: int
    design_doc: str


class TransformRequest(BaseModel):
    kind: str  # split_words | split_bits | pipeline
    target: str
    fan: int | None = None


class PlanRequest(BaseModel):
    target_mhz: float = Field(gt=0)
    wire_model: bool = False


class PlanBody(BaseModel):
    achieved_fmax_mhz: float
    feasible: bool
    iterations: int
    transforms_applied: int
    state: SessionState


class RecommendationBody(BaseModel):
    current_fmax_mhz: float
    bottleneck: str | None
    action_kind: str | None
    action_target: str | None
    action_fan: int | None
    predicted_fmax_mhz: float
    feasible: bool
    reason: str


class MeasuredDelaysRequest(BaseModel):
    delays: dict[str, float]


class MemoryActionBody(BaseModel):
    mem_id: str
    words: int
    word_bits: int
    partition: str
    on_critical_path: bool
    can_split_words: bool
    can_split_bits: bool
    split_words_reason: str
    split_bits_reason: str


class NetActionBody(BaseModel):
    net_id: str
    can_pipeline: bool


class ActionsBody(BaseModel):
    memories: list[MemoryActionBody]
    nets: list[NetActionBody]


class FloorplanRect(BaseModel):
    partition: str
    x: float
    y: float
    w: float
    h: float


class SpeedupCellBody(BaseModel):
    kernel: str
    cus: int
    raw: float
    derated: float


class BenchmarkBody(BaseModel):
    kernel: str
    input_riscv: int
    input_ggpu: int
    cycles_riscv_k: float
    cycles_ggpu_k: dict[int, float]


# ---------------------------------------------------------------------------
# session store
# ---------------------------------------------------------------------------


class _Session:
    def __init__(self, sid: str, design: Design):
        self.id = sid
        self.stack: list[Design] = [design]
        self.overrides: dict[str, float] = {}
        self.lock = threading.Lock()

    @property
    def design(self) -> Design:
        return self.stack[-1]

    def push(self, d: Design):
        self.stack.append(d)
        while len(self.stack) > UNDO_DEPTH + 1:
            self.stack.pop(0)


_sessions: dict[str, _Session] = {}
_store_lock = threading.Lock()
_ids = itertools.count(1)
_params = None


def _tech():
    global _params
    if _params is None:
        _params = shipped_tech_params()
    return _params


def reset_state():
    """Test hook: drop all sessions."""
    with _store_lock:
        _sessions.clear()


def _session(sid: str) -> _Session:
    s = _sessions.get(sid)
    if s is None:
        raise HTTPException(status_code=404, detail=f"unknown session '{sid}'")
    return s


def _state(s: _Session) -> SessionState:
    d = s.design
    p = _tech()
    g = build_timing_graph(d, p)
    cp = critical_path(g)
    fmax = 1000.0 / cp.total_delay_ns
    ppa = estimate_ppa(d, p, fmax, fmax_mhz=fmax)
    return SessionState(
        session_id=s.id,
        fmax_mhz=fmax,
        ppa=PpaBody(**ppa.__dict__),
        critical_path=CriticalPathBody(
            nodes=list(cp.nodes),
            total_delay_ns=cp.total_delay_ns,
            contains_memory=cp.contains_memory,
            memory_ids=list(cp.memory_ids),
        ),
        undo_depth=len(s.stack) - 1,
        memory_count=len(d.memories),
        design_doc=write_design(d),
    )


# ---------------------------------------------------------------------------
# endpoints
# ---------------------------------------------------------------------------


@app.post("/sessions", response_model=SessionState)
def create_session(req: CreateSessionRequest):
    if (req.cus is None) == (req.design_doc is None):
        raise HTTPException(status_code=400, detail="provide exactly one of cus or design_doc")
    try:
        if req.design_doc is not None:
            design = read_design(req.design_doc)
            rep = validate_design(design)
            if not rep.ok:
                raise HTTPException(status_code=400, detail=str(rep))
        else:
            design = build_reference_design(req.cus, req.variant)
    except ParseError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    except GgpuError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    with _store_lock:
        sid = f"s{next(_ids)}"
        s = _Session(sid, design)
        _sessions[sid] = s
    return _state(s)


@app.get("/sessions/{sid}", response_model=SessionState)
def get_session(sid: str):
    return _state(_session(sid))


@app.get("/sessions/{sid}/design")
def get_design(sid: str):
    return {"design_doc": write_design(_session(sid).design)}


@app.get("/sessions/{sid}/timing")
def get_timing(sid: str):
    s = _session(sid)
    g = build_timing_graph(s.design, _tech())
    return {"report": timing_report(g)}


@app.get("/sessions/{sid}/critical-path", response_model=CriticalPathBody)
def get_critical_path(sid: str):
    return _state(_session(sid)).critical_path


@app.get("/sessions/{sid}/ppa", response_model=PpaBody)
def get_ppa(sid: str):
    return _state(_session(sid)).ppa


@app.get("/sessions/{sid}/floorplan")
def get_floorplan(sid: str):
    s = _session(sid)
    fp = layout_floorplan(s.design, _tech())
    return {
        "rects": [
            FloorplanRect(partition=name, x=r.x, y=r.y, w=r.w, h=r.h)
            for name, r in sorted(fp.rects.items())
        ]
    }


@app.get("/sessions/{sid}/actions", response_model=ActionsBody)
def get_actions(sid: str):
    s = _session(sid)
    d = s.design
    cp = critical_path(build_timing_graph(d, _tech()))
    on_cp = set(cp.memory_ids)
    mems = []
    for m in d.memories:
        w_ok = m.spec.words % 2 == 0 and m.spec.words // 2 >= 16
        b_ok = m.spec.word_bits % 2 == 0 and m.spec.word_bits // 2 >= 2
        mems.append(
            MemoryActionBody(
                mem_id=m.id,
                words=m.spec.words,
                word_bits=m.spec.word_bits,
                partition=m.partition,
                on_critical_path=m.id in on_cp,
                can_split_words=w_ok,
                can_split_bits=b_ok,
                split_words_reason="" if w_ok else "at the 16-word floor",
                split_bits_reason="" if b_ok else "at the 2-bit floor or indivisible",
            )
        )
    nets = [
        NetActionBody(net_id=n.id, can_pipeline=transforms.legal_pipeline_net(d, n))
        for n in d.nets
    ]
    return ActionsBody(memories=mems, nets=nets)


@app.post("/sessions/{sid}/transform", response_model=SessionState)
def post_transform(sid: str, req: TransformRequest):
    s = _session(sid)
    with s.lock:
        try:
            nxt = transforms.apply_transform(
                s.design, Transform(req.kind, req.target, req.fan, len(s.design.transform_log))
            )
        except (LegalityError, RangeError) as e:
            raise HTTPException(status_code=409, detail=str(e)) from e
        except UnknownIdError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        s.push(nxt)
        return _state(s)


@app.post("/sessions/{sid}/undo", response_model=SessionState)
def post_undo(sid: str):
    s = _session(sid)
    with s.lock:
        if len(s.stack) < 2:
            raise HTTPException(status_code=409, detail="nothing to undo")
        s.stack.pop()
        return _state(s)


@app.post("/sessions/{sid}/plan", response_model=PlanBody)
def post_plan(sid: str, req: PlanRequest):
    s = _session(sid)
    with s.lock:
        try:
            result = optimize_to_target(
                s.design,
                _tech(),
                Spec(
                    num_cus=s.design.config.num_cus,
                    target_freq_mhz=req.target_mhz,
                    wire_model=req.wire_model,
                ),
            )
        except GgpuError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        s.push(result.design)
        return PlanBody(
            achieved_fmax_mhz=result.achieved_fmax_mhz,
            feasible=result.feasible,
            iterations=result.iterations,
            transforms_applied=len(result.transform_log),
            state=_state(s),
        )


@app.get("/sessions/{sid}/recommendation", response_model=RecommendationBody)
def get_recommendation(sid: str, target_mhz: float | None = None):
    s = _session(sid)
    try:
        rec = recommend_next(
            s.design, _tech(), measured_delays=s.overrides or None, target_mhz=target_mhz
        )
    except UnknownIdError as e:
        raise HTTPException(status_code=409, detail=str(e)) from e
    return RecommendationBody(
        current_fmax_mhz=rec.current_fmax_mhz,
        bottleneck=rec.bottleneck,
        action_kind=rec.action.kind if rec.action else None,
        action_target=rec.action.target if rec.action else None,
        action_fan=rec.action.fan if rec.action else None,
        predicted_fmax_mhz=rec.predicted_fmax_mhz,
        feasible=rec.feasible,
        reason=rec.reason,
    )


@app.put("/sessions/{sid}/measured-delays", response_model=RecommendationBody)
def put_measured_delays(sid: str, req: MeasuredDelaysRequest):
    s = _session(sid)
    with s.lock:
        for mem_id, val in req.delays.items():
            if val <= 0:
                raise HTTPException(
                    status_code=400, detail=f"measured delay for '{mem_id}' must be positive"
                )
            if not s.design.has_memory(mem_id):
                raise HTTPException(status_code=404, detail=f"unknown memory '{mem_id}'")
        s.overrides = dict(req.delays)
    return get_recommendation(sid)


@app.delete("/sessions/{sid}/measured-delays", response_model=RecommendationBody)
def clear_measured_delays(sid: str):
    s = _session(sid)
    with s.lock:
        s.overrides = {}
    return get_recommendation(sid)


@app.get("/benchmarks")
def get_benchmarks():
    records = load_benchmarks(data_text("benchmarks.tsv"))
    return {
        "records": [
            BenchmarkBody(
                kernel=r.kernel,
                input_riscv=r.input_riscv,
                input_ggpu=r.input_ggpu,
                cycles_riscv_k=r.cycles_riscv_k,
                cycles_ggpu_k=r.cycles_ggpu_k,
            )
            for r in records
        ]
    }


@app.get("/speedups")
def get_speedups(area_riscv: float = RISCV_AREA_MM2):
    records = load_benchmarks(data_text("benchmarks.tsv"))
    rows = read_table1(data_text("table1.tsv"))
    areas = {r.cus: r.total_area_mm2 for r in rows if r.freq_mhz == 667}
    try:
        report = speedup_report(records, areas, area_riscv)
    except GgpuError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return {
        "area_ratio_by_cu": report.area_ratio_by_cu,
        "cells": [SpeedupCellBody(**c.__dict__) for c in report.cells],
        "max_raw": SpeedupCellBody(**report.max_raw.__dict__),
        "min_raw": SpeedupCellBody(**report.min_raw.__dict__),
    }
