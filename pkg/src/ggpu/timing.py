"""Static timing: delay-annotated graph, critical path, fmax, floorplan.

Edge delay convention: each arc carries the delay contributed by its source
node (memory access including accumulated mux levels, or the stage's lumped
delay; registers contribute zero) plus, when a floorplan is supplied, the
wire delay kappa * Manhattan distance between the endpoint partitions.
Setup and clock-tree overheads are folded into these edge delays, so
fmax = 1000 / critical-path delay exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import geometry
from .design import PARTITION_MC, PARTITION_TOP, Design, assert_acyclic, node_id, node_kind
from .errors import StateError
from .tech import TechParams, mem_access_delay, partition_areas


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    delay_ns: float
    net_id: str


@dataclass(frozen=True)
class TimingGraph:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def successors(self) -> dict[str, list[Edge]]:
        out: dict[str, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e.src, []).append(e)
        return out


@dataclass(frozen=True)
class CriticalPath:
    nodes: tuple[str, ...]
    total_delay_ns: float
    contains_memory: bool
    memory_ids: tuple[str, ...]


@dataclass(frozen=True)
class Floorplan:
    rects: dict[str, geometry.Rect]
    cu_density: float = geometry.CU_DENSITY
    mc_density: float = geometry.MC_DENSITY
    top_density: float = geometry.TOP_DENSITY

    def distance(self, a: str, b: str) -> float:
        return geometry.manhattan(self.rects[a], self.rects[b])


def layout_floorplan(d: Design, p: TechParams) -> Floorplan:
    """Place partition rectangles: cloned CU blocks stacked around the
    central controller, I/O strip at the bottom.  Deterministic."""
    areas = partition_areas(d, p)
    try:
        rects = geometry.place_partitions(
            areas[PARTITION_MC], areas["cu0"], areas[PARTITION_TOP], d.config.num_cus
        )
    except ValueError as e:
        raise StateError(str(e)) from e
    return Floorplan(rects=rects)


def node_partition(d: Design, node: str) -> str:
    kind = node_kind(node)
    ident = node_id(node)
    if kind == "mem":
        return d.memory(ident).partition
    if kind == "stage":
        return d.stage(ident).partition
    # registers: derive from the id prefix; pipeline registers sit in the
    # partition of the stage whose output they cut
    if ident.startswith("pipe["):
        host = ident[5:-1]
        src_id = host.split("->", 1)[0]
        return d.stage(src_id).partition
    prefix = ident.split(".", 1)[0]
    if prefix == "mc":
        return PARTITION_MC
    if prefix == "top":
        return PARTITION_TOP
    return prefix  # cu0..cu7


def build_timing_graph(d: Design, p: TechParams, fp: Floorplan | None = None) -> TimingGraph:
    """Annotate every net with its source delay (+ wire delay between
    partition centroids when a floorplan is given)."""
    p.require()
    assert_acyclic(d)  # StructuralError on combinational cycles

    mem_delay_by_id = {m.id: mem_access_delay(d, m, p) for m in d.memories}
    stage_delay_by_id = {s.id: s.delay_ns for s in d.stages}
    part_cache: dict[str, str] = {}

    def part(node: str) -> str:
        if node not in part_cache:
            part_cache[node] = node_partition(d, node)
        return part_cache[node]

    nodes: set[str] = set()
    edges: list[Edge] = []
    for n in d.nets:
        kind = node_kind(n.src)
        ident = node_id(n.src)
        if kind == "mem":
            delay = mem_delay_by_id[ident]
        elif kind == "stage":
            delay = stage_delay_by_id[ident]
        else:
            delay = 0.0
        if fp is not None and p.kappa:
            sp, dp_ = part(n.src), part(n.dst)
            if sp != dp_:
                delay += p.kappa * fp.distance(sp, dp_)
        nodes.add(n.src)
        nodes.add(n.dst)
        edges.append(Edge(n.src, n.dst, delay, n.id))
    return TimingGraph(nodes=tuple(sorted(nodes)), edges=tuple(edges))


def _is_endpoint(node: str) -> bool:
    return node_kind(node) in ("reg", "mem")


def critical_path(g: TimingGraph) -> CriticalPath:
    """Longest endpoint-to-endpoint path.  Ties are broken toward the
    lexicographically smallest node-id sequence, so results are fully
    deterministic."""
    if not g.edges:
        raise StateError("empty timing graph")
    succ = g.successors()

    # best suffix starting AT a node (path continues until it lands on a
    # register or memory port)
    memo: dict[str, tuple[float, tuple[str, ...]]] = {}

    def suffix(node: str) -> tuple[float, tuple[str, ...]]:
        if node in memo:
            return memo[node]
        best: tuple[float, tuple[str, ...]] | None = None
        for e in succ.get(node, ()):
            if _is_endpoint(e.dst):
                cand = (e.delay_ns, (node, e.dst))
            else:
                d_rest, p_rest = suffix(e.dst)
                cand = (e.delay_ns + d_rest, (node,) + p_rest)
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
                best = cand
        if best is None:
            best = (float("-inf"), (node,))
        memo[node] = best
        return best

    launches = [n for n in g.nodes if _is_endpoint(n) and n in succ]
    best: tuple[float, tuple[str, ...]] | None = None
    for n in sorted(launches):
        cand = suffix(n)
        if cand[0] == float("-inf"):
            continue
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
    if best is None:
        raise StateError("timing graph has no endpoint-to-endpoint path")
    delay, path = best
    mem_ids = tuple(node_id(n) for n in path if node_kind(n) == "mem")
    return CriticalPath(
        nodes=path,
        total_delay_ns=delay,
        contains_memory=bool(mem_ids),
        memory_ids=mem_ids,
    )


def fmax(g: TimingGraph) -> float:
    """Maximum operating frequency in MHz: 1000 / critical-path ns."""
    cp = critical_path(g)
    if cp.total_delay_ns <= 0:
        raise StateError("non-positive critical path delay")
    return 1000.0 / cp.total_delay_ns


def path_edges(g: TimingGraph, cp: CriticalPath) -> list[Edge]:
    by_pair = {(e.src, e.dst): e for e in g.edges}
    return [by_pair[(a, b)] for a, b in zip(cp.nodes, cp.nodes[1:])]


def timing_report(g: TimingGraph, cp: CriticalPath | None = None) -> str:
    """Delimited critical-path listing consumed by the CLI map and the UI."""
    if cp is None:
        cp = critical_path(g)
    lines = ["from\tto\tdelay_ns"]
    for e in path_edges(g, cp):
        lines.append(f"{e.src}\t{e.dst}\t{e.delay_ns!r}")
    lines.append(f"# total\t{cp.total_delay_ns!r}")
    lines.append(f"# fmax_mhz\t{1000.0 / cp.total_delay_ns!r}")
    lines.append(f"# contains_memory\t{str(cp.contains_memory).lower()}")
    return "\n".join(lines) + "\n"
