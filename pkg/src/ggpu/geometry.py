"""Pure floorplan geometry: partition rectangles and centroid distances.

No package imports here; callers supply partition areas.  The controller
sits in the middle, CU partitions are cloned rectangles stacked on two
flanking columns (closest rows filled first), and the top partition is the
I/O strip below the core.
"""

from __future__ import annotations

from dataclasses import dataclass

CU_DENSITY = 0.70
MC_DENSITY = 0.70
TOP_DENSITY = 0.30


@dataclass(frozen=True)
class Rect:
    x: float  # lower-left corner
    y: float
    w: float
    h: float

    @property
    def cx(self) -> float:
        return self.x + self.w / 2

    @property
    def cy(self) -> float:
        return self.y + self.h / 2

    @property
    def area(self) -> float:
        return self.w * self.h


def manhattan(a: Rect, b: Rect) -> float:
    return abs(a.cx - b.cx) + abs(a.cy - b.cy)


def _row_offsets(rows: int) -> list[float]:
    """Row center offsets in CU-height units, ordered closest-first."""
    raw = [r - (rows - 1) / 2 for r in range(rows)]
    return sorted(raw, key=lambda v: (abs(v), v))


def place_partitions(mc_area: float, cu_area: float, top_area: float, num_cus: int) -> dict[str, Rect]:
    """Deterministic placement.  Returns rectangles keyed by partition name
    ('mem_controller', 'top', 'cu0'..).  All input areas are the utilized
    silicon divided by the partition density."""
    if mc_area <= 0 or cu_area <= 0 or top_area <= 0:
        raise ValueError("degenerate partition area")
    mc_side = mc_area ** 0.5
    cu_side = cu_area ** 0.5

    rects: dict[str, Rect] = {}
    rects["mem_controller"] = Rect(-mc_side / 2, -mc_side / 2, mc_side, mc_side)

    rows = (num_cus + 1) // 2
    offsets = _row_offsets(rows)
    for k in range(num_cus):
        off = offsets[k // 2] * cu_side
        if k % 2 == 0:
            x = -mc_side / 2 - cu_side  # left column
        else:
            x = mc_side / 2  # right column
        rects[f"cu{k}"] = Rect(x, off - cu_side / 2, cu_side, cu_side)

    xs = [r.x for r in rects.values()] + [r.x + r.w for r in rects.values()]
    ys = [r.y for r in rects.values()] + [r.y + r.h for r in rects.values()]
    core_w = max(xs) - min(xs)
    strip_h = top_area / core_w
    rects["top"] = Rect(min(xs), min(ys) - strip_h, core_w, strip_h)
    return rects
