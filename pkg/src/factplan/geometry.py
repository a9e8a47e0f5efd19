"""Planar geometric primitives.

Everything here is exact closed-form arithmetic (no sampling, no
tolerances): point/segment/rectangle distances, the minimum separation
of two linearly moving points, and convex-polygon utilities used for
the cone regions. Batched variants operate on numpy arrays and are the
planner's hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        if not (self.xmin <= self.xmax and self.ymin <= self.ymax):
            raise ValueError(f"degenerate rect bounds: {self}")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def corners(self) -> np.ndarray:
        return np.array(
            [
                [self.xmin, self.ymin],
                [self.xmax, self.ymin],
                [self.xmax, self.ymax],
                [self.xmin, self.ymax],
            ]
        )

    def grid_points(self, k: int = 5) -> np.ndarray:
        """k x k lattice over the closed rect, corners included."""
        xs = np.linspace(self.xmin, self.xmax, k)
        ys = np.linspace(self.ymin, self.ymax, k)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])


def point_rect_distance(x: float, y: float, rect: Rect) -> float:
    """Euclidean distance from a point to a closed rect (0 inside)."""
    dx = max(rect.xmin - x, 0.0, x - rect.xmax)
    dy = max(rect.ymin - y, 0.0, y - rect.ymax)
    return math.hypot(dx, dy)


def points_rects_distance(points: np.ndarray, rects: np.ndarray) -> np.ndarray:
    """Distances from points (m,2) to rects (o,4) as (m,o)."""
    x = points[:, 0:1]
    y = points[:, 1:2]
    dx = np.maximum(rects[None, :, 0] - x, 0.0)
    dx = np.maximum(dx, x - rects[None, :, 2])
    dy = np.maximum(rects[None, :, 1] - y, 0.0)
    dy = np.maximum(dy, y - rects[None, :, 3])
    return np.hypot(dx, dy)


def _point_to_segments(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from points p (...,2) to segments [a,b] (...,2), broadcast."""
    ab = b - a
    ap = p - a
    den = (ab * ab).sum(axis=-1)
    num = (ap * ab).sum(axis=-1)
    t = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    d = p - closest
    return np.sqrt((d * d).sum(axis=-1))


def _cross2(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def segments_to_segments_distance(
    p0: np.ndarray, p1: np.ndarray, q0: np.ndarray, q1: np.ndarray
) -> np.ndarray:
    """Min distance between segments [p0,p1] (m,2) and [q0,q1] (e,2) as (m,e).

    Touching cases fall out of the endpoint distances; a strict interior
    crossing is detected with orientation signs and forced to zero. The
    all-collinear degenerate case is covered by the endpoint distances,
    which is why the crossing test uses strict inequalities.
    """
    P0 = p0[:, None, :]
    P1 = np.broadcast_to(p1, p0.shape)[:, None, :]
    Q0 = q0[None, :, :]
    Q1 = q1[None, :, :]

    d = np.minimum(
        np.minimum(_point_to_segments(Q0, P0, P1), _point_to_segments(Q1, P0, P1)),
        np.minimum(_point_to_segments(P0, Q0, Q1), _point_to_segments(P1, Q0, Q1)),
    )

    d1 = P1 - P0
    d2 = Q1 - Q0
    c1 = _cross2(d1, Q0 - P0)
    c2 = _cross2(d1, Q1 - P0)
    c3 = _cross2(d2, P0 - Q0)
    c4 = _cross2(d2, P1 - Q0)
    crossing = (c1 * c2 < 0.0) & (c3 * c4 < 0.0)
    return np.where(crossing, 0.0, d)


def segment_segment_distance(
    p0: tuple[float, float],
    p1: tuple[float, float],
    q0: tuple[float, float],
    q1: tuple[float, float],
) -> float:
    out = segments_to_segments_distance(
        np.array([p0], float),
        np.array(p1, float),
        np.array([q0], float),
        np.array([q1], float),
    )
    return float(out[0, 0])


def segments_rects_clearance(
    p0: np.ndarray, p1: np.ndarray, rects: np.ndarray
) -> np.ndarray:
    """Min distance from segments [p0_i, p1] (m,2) to each rect (o,4) as (m,o).

    0 when the segment touches or enters the rect. A segment strictly
    inside has both endpoints inside; a segment that enters crosses a
    boundary edge, so edge distances catch every other contact.
    """
    m = p0.shape[0]
    o = rects.shape[0]
    if m == 0 or o == 0:
        return np.zeros((m, o))

    # rect boundary as 4*o segments
    x0, y0, x1, y1 = rects[:, 0], rects[:, 1], rects[:, 2], rects[:, 3]
    ca = np.column_stack([x0, y0])
    cb = np.column_stack([x1, y0])
    cc = np.column_stack([x1, y1])
    cd = np.column_stack([x0, y1])
    e0 = np.concatenate([ca, cb, cc, cd], axis=0)
    e1 = np.concatenate([cb, cc, cd, ca], axis=0)

    d = segments_to_segments_distance(p0, p1, e0, e1)  # (m, 4o)
    d = d.reshape(m, 4, o).min(axis=1)

    inside0 = (
        (p0[:, 0:1] >= rects[None, :, 0])
        & (p0[:, 0:1] <= rects[None, :, 2])
        & (p0[:, 1:2] >= rects[None, :, 1])
        & (p0[:, 1:2] <= rects[None, :, 3])
    )
    p1b = np.broadcast_to(p1, (1, 2))
    inside1 = (
        (p1b[:, 0:1] >= rects[None, :, 0])
        & (p1b[:, 0:1] <= rects[None, :, 2])
        & (p1b[:, 1:2] >= rects[None, :, 1])
        & (p1b[:, 1:2] <= rects[None, :, 3])
    )
    d = np.where(inside0 | inside1, 0.0, d)
    return d


def segment_rect_distance(
    p0: tuple[float, float], p1: tuple[float, float], rect: Rect
) -> float:
    arr = np.array([[rect.xmin, rect.ymin, rect.xmax, rect.ymax]])
    out = segments_rects_clearance(np.array([p0], float), np.array(p1, float), arr)
    return float(out[0, 0])


def moving_points_min_sepsq(
    a0: np.ndarray, a1: np.ndarray, b0: np.ndarray, b1: np.ndarray
) -> np.ndarray:
    """Squared min separation of two points moving linearly over tau in [0,1].

    The squared separation is a convex quadratic in tau; evaluated at the
    clamped vertex and both endpoints.
    """
    dp = np.asarray(a0, float) - b0
    dv = (a1 - a0) - (b1 - b0)
    qa = (dv * dv).sum(axis=-1)
    qb = (dp * dv).sum(axis=-1)
    qc = (dp * dp).sum(axis=-1)
    t = np.where(qa > 0.0, -qb / np.where(qa > 0.0, qa, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    at_vertex = qc + t * (2.0 * qb + t * qa)
    at_end = qc + 2.0 * qb + qa
    out = np.minimum(np.minimum(qc, at_end), at_vertex)
    return np.maximum(out, 0.0)


def moving_points_min_separation(
    a0: tuple[float, float],
    a1: tuple[float, float],
    b0: tuple[float, float],
    b1: tuple[float, float],
) -> float:
    v = moving_points_min_sepsq(
        np.array(a0, float), np.array(a1, float), np.array(b0, float), np.array(b1, float)
    )
    return float(math.sqrt(float(v)))


# --- convex polygon utilities (cone regions) ---------------------------------


def clip_polygon_halfplane(poly: np.ndarray, n: tuple[float, float], c: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon to the halfplane n.x <= c."""
    if len(poly) == 0:
        return poly
    nx, ny = n
    out: list[np.ndarray] = []
    k = len(poly)
    vals = poly[:, 0] * nx + poly[:, 1] * ny
    for i in range(k):
        cur, nxt = poly[i], poly[(i + 1) % k]
        vc, vn = vals[i], vals[(i + 1) % k]
        if vc <= c:
            out.append(cur)
        if (vc <= c) != (vn <= c):
            t = (c - vc) / (vn - vc)
            out.append(cur + t * (nxt - cur))
    return np.array(out) if out else np.empty((0, 2))


def clip_polygon_to_unit_box(poly: np.ndarray) -> np.ndarray:
    poly = clip_polygon_halfplane(poly, (-1.0, 0.0), 0.0)
    poly = clip_polygon_halfplane(poly, (1.0, 0.0), 1.0)
    poly = clip_polygon_halfplane(poly, (0.0, -1.0), 0.0)
    poly = clip_polygon_halfplane(poly, (0.0, 1.0), 1.0)
    return poly


def sector_polygon(
    apex: tuple[float, float], axis_angle: float, half_angle: float, reach: float = 4.0
) -> np.ndarray:
    """Polygon equal to an angular sector intersected with the unit box.

    The fan is truncated at `reach`, far enough that the chord between
    consecutive fan points stays outside the box, so the clipped polygon
    is exactly sector-intersect-box.
    """
    steps = max(2, int(math.ceil(2.0 * half_angle / (math.pi / 6.0))))
    angles = np.linspace(axis_angle - half_angle, axis_angle + half_angle, steps + 1)
    pts = [np.array(apex, float)]
    for a in angles:
        pts.append(np.array([apex[0] + reach * math.cos(a), apex[1] + reach * math.sin(a)]))
    return clip_polygon_to_unit_box(np.array(pts))


def _project_span(poly: np.ndarray, axis: np.ndarray) -> tuple[float, float]:
    vals = poly @ axis
    return float(vals.min()), float(vals.max())


def convex_polygons_overlap(p: np.ndarray, q: np.ndarray) -> bool:
    """Separating-axis test for two convex polygons (closed sets)."""
    if len(p) == 0 or len(q) == 0:
        return False
    for poly in (p, q):
        k = len(poly)
        if k < 2:
            continue
        for i in range(k):
            edge = poly[(i + 1) % k] - poly[i]
            norm = math.hypot(edge[0], edge[1])
            if norm == 0.0:
                continue
            axis = np.array([-edge[1], edge[0]]) / norm
            lo1, hi1 = _project_span(p, axis)
            lo2, hi2 = _project_span(q, axis)
            if hi1 < lo2 or hi2 < lo1:
                return False
    if len(p) < 3 and len(q) < 3:
        # two points/segments: overlap only if distance is 0, handled by caller
        return _edge_min_distance(p, q) == 0.0
    return True


def _edge_min_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Min vertex-to-edge distance between two polygons (no overlap check)."""

    def edges(poly: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if len(poly) == 1:
            return poly, poly
        return poly, np.roll(poly, -1, axis=0)

    pa, pb = edges(p)
    qa, qb = edges(q)
    # vertex-of-p to edges-of-q and vice versa
    best = math.inf
    pe = _point_to_segments(p[:, None, :], qa[None, :, :], qb[None, :, :])
    best = min(best, float(pe.min()))
    qe = _point_to_segments(q[:, None, :], pa[None, :, :], pb[None, :, :])
    best = min(best, float(qe.min()))
    return best


def convex_polygon_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Exact distance between two convex polygons (0 when they overlap)."""
    if len(p) == 0 or len(q) == 0:
        return math.inf
    if len(p) >= 3 or len(q) >= 3:
        if convex_polygons_overlap(p, q):
            return 0.0
    return _edge_min_distance(p, q)
