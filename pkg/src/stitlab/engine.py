"""Event-driven simulation of the cell-division tessellation process.

A window polytope carries an exponential clock with rate equal to its
hyperplane hit rate; when it rings, a hyperplane from the normalized
hitting law splits the cell, and the two children evolve independently by
the same rule.  The simulation keeps a complete birth-time-marked ledger
of the cut faces ("maximal polytopes"), tracks internal vertices on them
in dimension 2, and supports restriction, iteration (nesting), rescaling,
line sections and minus-sampled extraction of typical segments.

The scheduler uses a single competing-exponential clock over all live
cells, which is equivalent to independent per-cell lifetimes by
memorylessness and keeps replay deterministic: the event log alone
reconstructs the state exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadInnerWindow,
    DegenerateCut,
    EngineError,
    InsufficientFresh,
    InvalidWindow,
    MaxCellsExceeded,
    NonPositiveFactor,
    NotContained,
    SegmentOutsideWindow,
    WindowMismatch,
)
from .geometry import (
    EPS_GEOM,
    ConvexPolytope,
    Face3,
    Hyperplane,
    Polygon,
    Polyhedron,
    Segment,
    point_on_segment_interior,
    split_polytope,
)
from .measure import HyperplaneMeasure

_MAX_EVENT_RESAMPLE = 64


@dataclass(frozen=True)
class CellRecord:
    """A cell of the evolving tessellation, marked with its birth time."""

    id: int
    polytope: ConvexPolytope
    birth_time: float


@dataclass(frozen=True)
class InternalVertex:
    point: tuple
    time: float


@dataclass
class MaximalPolytopeRecord:
    """Cut face created by one split, marked with its birth time.

    The face keeps its identity (and full extent) even when later splits
    subdivide the adjacent cells.  ``internal_vertices`` collects the
    endpoints of later chords that land in the relative interior of the
    face; it is maintained in dimension 2 only.  ``endpoint_sources``
    records, for d=2 run outputs, what each chord endpoint landed on
    (-1 for the window boundary, else the hosting ledger face id).
    """

    id: int
    face: Segment | Face3
    host_hyperplane: Hyperplane
    birth_time: float
    parent_cell_id: int
    internal_vertices: list[InternalVertex] = field(default_factory=list)
    endpoint_sources: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SplitEvent:
    time: float
    cell_id: int
    hyperplane: Hyperplane
    child_plus_id: int
    child_minus_id: int
    face_id: int


@dataclass
class SummaryStatistics:
    cell_count: int
    total_face_measure: float
    chord_counts: tuple[int, ...]


class TessellationState:
    """Window, live cells, face ledger and the ordered split-event log.

    States produced by :func:`run_local_stit` are replayable: feeding the
    event log back through :func:`replay` reproduces cells, ledger and
    internal vertices exactly.  Derived states (restricted, iterated,
    rescaled) are geometric views and carry no event log.
    """

    def __init__(self, window: ConvexPolytope, dim: int):
        self.window = window
        self.dim = dim
        self.time = 0.0
        self.cells: dict[int, CellRecord] = {}
        self.live_ids: list[int] = []
        self.ledger: list[MaximalPolytopeRecord] = []
        self.events: list[SplitEvent] = []
        self.split_time: dict[int, float] = {}
        self._next_cell_id = 0
        self._boundary_tol = EPS_GEOM * window.diameter
        # d=2 fast path: endpoint buffers of all ledger segments
        self._fa = np.empty((64, 2))
        self._fb = np.empty((64, 2))
        self._flen = np.empty(64)
        if dim == 2:
            wv = window.vertices
            self._win_a = wv
            self._win_e = np.roll(wv, -1, axis=0) - wv
            self._win_L2 = (self._win_e ** 2).sum(axis=1)

    def _face_arrays(self):
        n = len(self.ledger)
        return self._fa[:n], self._fb[:n], self._flen[:n]

    def _push_face_arrays(self, seg: Segment) -> None:
        n = len(self.ledger)
        if n >= self._fa.shape[0]:
            cap = 2 * self._fa.shape[0]
            for name in ("_fa", "_fb"):
                buf = np.empty((cap, 2))
                buf[:n] = getattr(self, name)[:n]
                setattr(self, name, buf)
            buf = np.empty(cap)
            buf[:n] = self._flen[:n]
            self._flen = buf
        self._fa[n] = seg.a
        self._fb[n] = seg.b
        self._flen[n] = seg.length

    # -- construction helpers ------------------------------------------------

    def _add_cell(self, polytope: ConvexPolytope, birth: float) -> int:
        cid = self._next_cell_id
        self._next_cell_id += 1
        self.cells[cid] = CellRecord(cid, polytope, birth)
        self.live_ids.append(cid)
        return cid

    def _add_cell_at(self, polytope: ConvexPolytope, birth: float, slot: int) -> int:
        cid = self._next_cell_id
        self._next_cell_id += 1
        self.cells[cid] = CellRecord(cid, polytope, birth)
        self.live_ids[slot] = cid
        return cid

    def add_ledger_record(self, rec: MaximalPolytopeRecord) -> None:
        if self.dim == 2:
            self._push_face_arrays(rec.face)
        self.ledger.append(rec)

    # -- views ----------------------------------------------------------------

    def live_cells(self) -> list[CellRecord]:
        return [self.cells[i] for i in self.live_ids]

    def cells_at(self, s: float) -> list[CellRecord]:
        """Cells extant at time ``s`` (valid for replayable run outputs)."""
        out = []
        for rec in self.cells.values():
            death = self.split_time.get(rec.id, math.inf)
            if rec.birth_time <= s < death:
                out.append(rec)
        return out

    def tiling_defect(self) -> float:
        """Relative defect of the live-cell volumes against the window volume."""
        total = sum(rec.polytope.volume for rec in self.live_cells())
        return abs(total - self.window.volume) / self.window.volume

    def points_on_window_boundary(self, pts: np.ndarray, tol: float | None = None
                                  ) -> np.ndarray:
        """Boolean mask: which of the (N, 2) points lie on the window boundary."""
        tol = self._boundary_tol if tol is None else tol
        rel = pts[:, None, :] - self._win_a[None, :, :]
        t = (rel * self._win_e[None, :, :]).sum(axis=2) / self._win_L2[None, :]
        t = np.clip(t, 0.0, 1.0)
        near = rel - t[:, :, None] * self._win_e[None, :, :]
        dist2 = (near ** 2).sum(axis=2).min(axis=1)
        return dist2 <= tol * tol

    def point_on_window_boundary(self, x, tol: float | None = None) -> bool:
        tol = self._boundary_tol if tol is None else tol
        if self.dim == 2:
            return bool(self.points_on_window_boundary(
                np.asarray(x, dtype=float)[None, :], tol)[0])
        return self.window.distance_to_boundary(x) <= tol

    def face_is_clipped(self, rec: MaximalPolytopeRecord) -> bool:
        """True if the face has been cut short by the window boundary."""
        if rec.endpoint_sources is not None:
            return -1 in rec.endpoint_sources
        if self.dim == 2:
            return bool(self.points_on_window_boundary(rec.face.vertices).any())
        return any(self.window.distance_to_boundary(v) <= self._boundary_tol
                   for v in rec.face.vertices)


def _validate_window(window, measure: HyperplaneMeasure) -> int:
    if isinstance(window, Polygon):
        dim = 2
    elif isinstance(window, Polyhedron):
        dim = 3
    else:
        raise InvalidWindow("window must be a Polygon or Polyhedron")
    if measure.dim != dim:
        raise InvalidWindow("measure dimension does not match the window")
    if window.volume <= 0:
        raise InvalidWindow("window has empty interior")
    return dim


def run_local_stit(
    window: ConvexPolytope,
    measure: HyperplaneMeasure,
    t_end: float,
    rng: np.random.Generator,
    *,
    max_cells: int = 10_000_000,
    max_splits: int | None = None,
) -> TessellationState:
    """Run the division process in ``window`` up to time ``t_end``.

    The next event time is exponential with the sum of the live cells' hit
    rates; the dividing cell is chosen proportionally to its rate and the
    hyperplane from its hitting law.  Every split appends one ledger record
    born at the event time.  In d=2, each chord endpoint falling in the
    relative interior of an earlier face is recorded as an internal vertex
    of that face; endpoints on the window boundary are not recorded.

    ``max_splits`` stops the run after that many events (the state time is
    then the last event time); it exists for first-jump studies.
    """
    if t_end < 0:
        raise EngineError("t_end must be nonnegative")
    dim = _validate_window(window, measure)
    state = TessellationState(window, dim)
    state._add_cell(window, 0.0)
    # d=2: per-cell edge provenance (window boundary or hosting face id),
    # so chord-endpoint attribution is an O(1) lookup instead of a search.
    edge_labels: dict[int, list[int]] = {0: [-1] * len(window.vertices)} if dim == 2 else {}

    rates = np.empty(64)
    rates[0] = measure.hit_rate(window)
    n_live = 1
    t = 0.0
    while True:
        if max_splits is not None and len(state.events) >= max_splits:
            state.time = t
            return state
        cumulative = np.cumsum(rates[:n_live])
        total = float(cumulative[-1])
        dt = rng.exponential(1.0 / total)
        if t + dt > t_end:
            state.time = t_end
            return state
        t += dt
        # choose the dividing cell proportionally to its hit rate
        u = rng.random() * total
        idx = min(int(np.searchsorted(cumulative, u)), n_live - 1)
        cell = state.cells[state.live_ids[idx]]

        face_id = len(state.ledger)
        for attempt in range(_MAX_EVENT_RESAMPLE):
            h = measure.sample_hitting(cell.polytope, rng)
            try:
                if dim == 2:
                    plus, plab, minus, mlab, face, sources = _split_polygon_labeled(
                        cell.polytope, edge_labels[cell.id], h, face_id)
                else:
                    plus, minus, face = split_polytope(cell.polytope, h)
                    sources = None
            except (DegenerateCut, NoIntersection):
                continue
            break
        else:
            raise EngineError("could not realize an admissible split")

        if dim == 2:
            for src, point in sources:
                if src >= 0:
                    state.ledger[src].internal_vertices.append(
                        InternalVertex(tuple(point), t))
        state.add_ledger_record(MaximalPolytopeRecord(
            id=face_id, face=face, host_hyperplane=h,
            birth_time=t, parent_cell_id=cell.id,
            endpoint_sources=tuple(src for src, _ in sources) if sources else None))
        state.split_time[cell.id] = t

        # replace the parent slot with one child, append the other
        plus_id = state._add_cell_at(plus, t, idx)
        minus_id = state._add_cell(minus, t)
        if dim == 2:
            del edge_labels[cell.id]
            edge_labels[plus_id] = plab
            edge_labels[minus_id] = mlab
        rates[idx] = measure.hit_rate(plus)
        if n_live >= rates.shape[0]:
            grown = np.empty(2 * rates.shape[0])
            grown[:n_live] = rates[:n_live]
            rates = grown
        rates[n_live] = measure.hit_rate(minus)
        n_live += 1
        state.events.append(SplitEvent(t, cell.id, h, plus_id, minus_id, face_id))
        if n_live > max_cells:
            raise MaxCellsExceeded(f"cell count exceeded {max_cells}")


def _split_polygon_labeled(poly: Polygon, labels: list[int], h: Hyperplane,
                           new_face_id: int):
    """Split a polygon while carrying per-edge provenance labels.

    ``labels[i]`` is the source of edge (v[i], v[i+1]): -1 for the window
    boundary, otherwise the id of the hosting ledger face.  Returns
    (plus, plus_labels, minus, minus_labels, chord, endpoint_sources)
    where endpoint_sources lists (label, point) for the chord endpoints.
    Cuts within tolerance of a vertex are rejected for resampling, so each
    side has at least one strict vertex and exactly two crossings exist.
    """
    v = poly.vertices
    s = h.signed_distance(v)
    tol = EPS_GEOM * poly.diameter
    if s.max() <= tol or s.min() >= -tol:
        raise NoIntersection("hyperplane misses the polygon interior")
    if np.abs(s).min() < tol:
        raise DegenerateCut("cut grazes a polygon vertex")
    n = len(v)

    def walk(sign: float):
        pts: list[np.ndarray] = []
        labs: list[int] = []
        sources: list[tuple[int, np.ndarray]] = []
        for i in range(n):
            j = (i + 1) % n
            si, sj = sign * s[i], sign * s[j]
            if si > 0:
                pts.append(v[i])
                labs.append(labels[i])
            if (si > 0) != (sj > 0):
                x = v[i] + (si / (si - sj)) * (v[j] - v[i])
                pts.append(x)
                if si > 0:
                    labs.append(new_face_id)       # chord edge starts here
                else:
                    labs.append(labels[i])         # remainder of edge i
                sources.append((labels[i], x))
        return Polygon(np.array(pts), validate=False), labs, sources

    plus, plab, src = walk(1.0)
    minus, mlab, _ = walk(-1.0)
    chord = Segment(src[0][1], src[1][1])
    return plus, plab, minus, mlab, chord, src


def replay(window: ConvexPolytope, events: list[SplitEvent], dim: int,
           t_end: float | None = None) -> TessellationState:
    """Rebuild a state deterministically from its event log."""
    state = TessellationState(window, dim)
    state._add_cell(window, 0.0)
    edge_labels: dict[int, list[int]] = {0: [-1] * len(window.vertices)} if dim == 2 else {}
    for ev in events:
        cell = state.cells[ev.cell_id]
        sources = None
        if dim == 2:
            plus, plab, minus, mlab, face, src = _split_polygon_labeled(
                cell.polytope, edge_labels[cell.id], ev.hyperplane, ev.face_id)
            for label, point in src:
                if label >= 0:
                    state.ledger[label].internal_vertices.append(
                        InternalVertex(tuple(point), ev.time))
            sources = tuple(label for label, _ in src)
        else:
            plus, minus, face = split_polytope(cell.polytope, ev.hyperplane)
        state.add_ledger_record(MaximalPolytopeRecord(
            id=ev.face_id, face=face, host_hyperplane=ev.hyperplane,
            birth_time=ev.time, parent_cell_id=ev.cell_id,
            endpoint_sources=sources))
        state.split_time[ev.cell_id] = ev.time
        slot = state.live_ids.index(ev.cell_id)
        pid = state._add_cell_at(plus, ev.time, slot)
        mid = state._add_cell(minus, ev.time)
        if dim == 2:
            del edge_labels[ev.cell_id]
            edge_labels[pid] = plab
            edge_labels[mid] = mlab
        if (pid, mid) != (ev.child_plus_id, ev.child_minus_id):
            raise EngineError("replay produced inconsistent cell ids")
        state.time = ev.time
    if t_end is not None:
        state.time = t_end
    return state


# ---------------------------------------------------------------------------
# Line sections
# ---------------------------------------------------------------------------

def line_section(state: TessellationState, a, b) -> list[np.ndarray]:
    """Intersection points of segment [a, b] with the union of ledger faces.

    Points are deduplicated within the geometric tolerance.  Raises
    ``SegmentOutsideWindow`` when an endpoint leaves the window.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tol = state._boundary_tol
    if not (state.window.contains_point(a, tol) and state.window.contains_point(b, tol)):
        raise SegmentOutsideWindow("probe segment leaves the window")
    points: list[np.ndarray] = []
    if state.dim == 2:
        A, B, _ = state._face_arrays()
        if len(A) == 0:
            return []
        d = b - a
        e = B - A
        denom = d[0] * e[:, 1] - d[1] * e[:, 0]
        w = A - a
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / denom
            u = (w[:, 0] * d[1] - w[:, 1] * d[0]) / denom
        ok = (np.abs(denom) > 1e-15) & (t >= -1e-12) & (t <= 1 + 1e-12) \
            & (u >= -1e-12) & (u <= 1 + 1e-12)
        points = [a + ti * d for ti in t[ok]]
    else:
        for rec in state.ledger:
            x = rec.face.segment_intersection(a, b, tol)
            if x is not None:
                points.append(x)
    out: list[np.ndarray] = []
    for x in points:
        if all(np.linalg.norm(x - y) > tol for y in out):
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# Restriction, iteration, rescaling
# ---------------------------------------------------------------------------

def _clip_cell(polytope: ConvexPolytope, region: ConvexPolytope):
    """Full-dimensional intersection with a convex region, or None."""
    lo_r, hi_r = region.bbox()
    lo_z, hi_z = polytope.bbox()
    if (lo_z > hi_r).any() or (hi_z < lo_r).any():
        return None
    out = polytope
    for normal, offset in (region.edge_halfplanes() if region.dim == 2
                           else region.facet_halfspaces()):
        out = out.clip_halfspace(normal, offset, keep=-1)
        if out is None:
            return None
    return out


def _clip_face(face, region: ConvexPolytope):
    if isinstance(face, Segment):
        return face.clip_to_polygon(region)
    return face.clip_to_polyhedron(region)


def _contains_polytope(outer: ConvexPolytope, inner: ConvexPolytope, tol: float) -> bool:
    return all(outer.contains_point(v, tol) for v in inner.vertices)


def restrict(state: TessellationState, wprime: ConvexPolytope) -> TessellationState:
    """Restriction of the tessellation to a sub-window.

    Cells and ledger faces are clipped to ``wprime``; faces with empty
    intersection are dropped, as are internal vertices outside the
    sub-window.  The result is a derived view without an event log.
    """
    tol = state._boundary_tol
    if not _contains_polytope(state.window, wprime, tol):
        raise NotContained("sub-window is not contained in the window")
    out = TessellationState(wprime, state.dim)
    out.time = state.time
    for rec in state.live_cells():
        clipped = _clip_cell(rec.polytope, wprime)
        if clipped is not None:
            out._add_cell(clipped, rec.birth_time)
    for rec in state.ledger:
        face = _clip_face(rec.face, wprime)
        if face is None:
            continue
        keep = [iv for iv in rec.internal_vertices
                if wprime.contains_point(np.asarray(iv.point), tol)]
        out.add_ledger_record(MaximalPolytopeRecord(
            id=len(out.ledger), face=face, host_hyperplane=rec.host_hyperplane,
            birth_time=rec.birth_time, parent_cell_id=-1,
            internal_vertices=keep))
    return out


def iterate(state: TessellationState, fresh: list[TessellationState]) -> TessellationState:
    """Nest fresh tessellations into the cells of ``state``.

    Cell ``i`` of ``state`` is replaced by the restriction of ``fresh[i]``
    to it.  All inputs must share the window.  Ledger faces of ``state``
    are retained; faces of ``fresh[i]`` are clipped to cell ``i`` and their
    birth times shifted by the state time (composition in time).  Internal
    vertices are not re-attributed across the host/fresh boundary; use the
    result for geometric statistics.
    """
    live = state.live_cells()
    if len(fresh) < len(live):
        raise InsufficientFresh(f"need {len(live)} fresh states, got {len(fresh)}")
    tol = state._boundary_tol
    for f in fresh[:len(live)]:
        if f.dim != state.dim or not (
                _contains_polytope(state.window, f.window, tol)
                and _contains_polytope(f.window, state.window, tol)):
            raise WindowMismatch("fresh states must share the host window")
    out = TessellationState(state.window, state.dim)
    offset = state.time
    horizon = 0.0
    for rec in state.ledger:
        out.add_ledger_record(MaximalPolytopeRecord(
            id=len(out.ledger), face=rec.face, host_hyperplane=rec.host_hyperplane,
            birth_time=rec.birth_time, parent_cell_id=-1,
            internal_vertices=list(rec.internal_vertices)))
    for host, f in zip(live, fresh):
        horizon = max(horizon, f.time)
        for cell in f.live_cells():
            clipped = _clip_cell(cell.polytope, host.polytope)
            if clipped is not None:
                out._add_cell(clipped, offset + cell.birth_time)
        for rec in f.ledger:
            face = _clip_face(rec.face, host.polytope)
            if face is None:
                continue
            out.add_ledger_record(MaximalPolytopeRecord(
                id=len(out.ledger), face=face, host_hyperplane=rec.host_hyperplane,
                birth_time=offset + rec.birth_time, parent_cell_id=-1))
    out.time = offset + horizon
    return out


def rescale(state: TessellationState, c: float) -> TessellationState:
    """Dilation of all geometry by ``c`` about the origin; times unchanged."""
    if not c > 0:
        raise NonPositiveFactor("scale factor must be positive")
    out = TessellationState(state.window.scaled(c), state.dim)
    out.time = state.time
    id_map = {}
    for cid in sorted(state.cells):
        rec = state.cells[cid]
        new = CellRecord(cid, rec.polytope.scaled(c), rec.birth_time)
        out.cells[cid] = new
        id_map[cid] = new
    out.live_ids = list(state.live_ids)
    out._next_cell_id = state._next_cell_id
    out.split_time = dict(state.split_time)
    for rec in state.ledger:
        out.add_ledger_record(MaximalPolytopeRecord(
            id=rec.id, face=rec.face.scaled(c), host_hyperplane=rec.host_hyperplane.scaled(c),
            birth_time=rec.birth_time, parent_cell_id=rec.parent_cell_id,
            internal_vertices=[InternalVertex(tuple(np.asarray(iv.point) * c), iv.time)
                               for iv in rec.internal_vertices],
            endpoint_sources=rec.endpoint_sources))
    for ev in state.events:
        out.events.append(SplitEvent(ev.time, ev.cell_id, ev.hyperplane.scaled(c),
                                     ev.child_plus_id, ev.child_minus_id, ev.face_id))
    return out


# ---------------------------------------------------------------------------
# Extraction and summaries
# ---------------------------------------------------------------------------

def extract_typical_segments_2d(state: TessellationState, inner: Polygon
                                ) -> list[tuple[float, float, int]]:
    """Minus-sampled typical segments: (birth_time, length, internal count).

    Returns every ledger segment whose midpoint lies in ``inner`` and whose
    endpoints avoid the window boundary (i.e. the face is not clipped).
    ``inner`` must sit strictly inside the window.
    """
    if state.dim != 2:
        raise EngineError("typical-segment extraction is d=2 only")
    tol = state._boundary_tol
    if not _contains_polytope(state.window, inner, tol):
        raise BadInnerWindow("inner window must be contained in the window")
    if min(state.window.distance_to_boundary(v) for v in inner.vertices) <= tol:
        raise BadInnerWindow("inner window needs a positive margin")
    if not state.ledger:
        return []
    A, B, _ = state._face_arrays()
    mid = 0.5 * (A + B)
    in_inner = np.ones(len(A), dtype=bool)
    for normal, offset in inner.edge_halfplanes():
        in_inner &= mid @ normal - offset <= tol
    clipped = (state.points_on_window_boundary(A)
               | state.points_on_window_boundary(B))
    out = []
    for i in np.nonzero(in_inner & ~clipped)[0]:
        rec = state.ledger[i]
        out.append((rec.birth_time, rec.face.length, len(rec.internal_vertices)))
    return out


def segment_midpoint_intensity(state: TessellationState) -> float:
    """Unbiased minus-sampling estimate of maximal-segment midpoints per
    unit area (d=2).

    Each unclipped ledger segment is weighted by the reciprocal area of
    the erosion of the window by the segment (the translates keeping the
    segment inside the window), the standard Horvitz-Thompson correction.
    Segments longer than the window are never observable and are not
    represented; their intensity mass is negligible at the scales used.
    """
    if state.dim != 2:
        raise EngineError("midpoint intensity estimation is d=2 only")
    w = state.window
    total = 0.0
    for rec in state.ledger:
        if state.face_is_clipped(rec):
            continue
        v = rec.face.b - rec.face.a
        eroded = _clip_cell(w, w.translated(-v))
        if eroded is None:
            continue
        total += 1.0 / eroded.volume
    return total


def summary_statistics(state: TessellationState, region: ConvexPolytope,
                       probes: tuple = ()) -> SummaryStatistics:
    """Cell count, clipped face measure and probe chord counts in a region."""
    tol = state._boundary_tol
    if not _contains_polytope(state.window, region, tol):
        raise NotContained("region must be contained in the window")
    count = sum(1 for rec in state.live_cells()
                if region.contains_point(rec.polytope.centroid, tol))
    total = 0.0
    for rec in state.ledger:
        face = _clip_face(rec.face, region)
        if face is not None:
            total += face.measure
    chords = tuple(len(line_section(state, a, b)) for a, b in probes)
    return SummaryStatistics(count, total, chords)
