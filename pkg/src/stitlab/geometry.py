"""Convex geometry in dimensions 2 and 3: hyperplanes, polytopes, splitting.

Provides the primitives the cell-division engine is built on:

- ``Hyperplane``: canonical direction-plus-offset representation.
- ``Polygon`` (d=2) and ``Polyhedron`` (d=3): bounded convex cells with
  width, containment, half-space clipping and splitting.
- ``Segment`` and ``Face3``: the (d-1)-dimensional cut faces.
- Module-level operations ``split_polytope``, ``width`` and
  ``point_on_segment_interior``.

All tolerances are relative to the polytope diameter (``EPS_GEOM``).
Degenerate cuts (a hyperplane within tolerance of a vertex) are rejected
with ``DegenerateCut``; the caller resamples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateCut, EmptyPolytope, GeometryError, NoIntersection, ZeroLength

EPS_UNIT = 1e-12   # unit-norm tolerance for hyperplane normals
EPS_GEOM = 1e-9    # geometric tolerance, relative to the diameter


def _as_point(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# Hyperplane
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Affine hyperplane ``{x : <x, normal> = offset}`` with a canonical normal.

    The canonical representative has its last nonzero normal component
    positive (upper half-sphere; ties broken by scanning coordinates from
    last to first), so each geometric hyperplane has exactly one encoding.
    Use :meth:`from_normal_offset` to construct; it normalizes and orients.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise GeometryError("hyperplane normal must be a unit vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @staticmethod
    def from_normal_offset(normal, offset: float) -> "Hyperplane":
        n = _as_point(normal)
        norm = np.linalg.norm(n)
        if norm <= EPS_UNIT:
            raise GeometryError("zero normal vector")
        n = n / norm
        c = float(offset) / norm
        if _needs_flip(n):
            n, c = -n, -c
        return Hyperplane(n, c)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def signed_distance(self, points) -> np.ndarray:
        """Signed distance(s) of point(s) to the hyperplane, along the normal."""
        pts = _as_point(points)
        return pts @ self.normal - self.offset

    def canonical(self) -> "Hyperplane":
        return Hyperplane.from_normal_offset(self.normal, self.offset)

    def is_canonical(self) -> bool:
        return not _needs_flip(self.normal)

    def scaled(self, c: float) -> "Hyperplane":
        """The image of the hyperplane under dilation by ``c`` about the origin."""
        return Hyperplane(self.normal, self.offset * c)

    def __repr__(self):
        return f"Hyperplane(normal={self.normal.tolist()}, offset={self.offset})"


def _needs_flip(n: np.ndarray) -> bool:
    for c in reversed(n):
        if abs(c) > EPS_UNIT:
            return c < 0.0
    return False


# ---------------------------------------------------------------------------
# Segment
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Segment:
    """Line segment between two points; the cut-face type in dimension 2."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _as_point(self.a))
        object.__setattr__(self, "b", _as_point(self.b))

    @property
    def dim(self) -> int:
        return 1

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.a, self.b])

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    @property
    def midpoint(self) -> np.ndarray:
        """Midpoint, which is also the circumcenter of the segment."""
        return 0.5 * (self.a + self.b)

    # A segment's (d-1)-measure is its length; ``centroid``/``measure``
    # mirror the Face3 interface so faces can be handled uniformly.
    @property
    def measure(self) -> float:
        return self.length

    @property
    def centroid(self) -> np.ndarray:
        return self.midpoint

    @property
    def diameter(self) -> float:
        return self.length

    def direction(self) -> np.ndarray:
        d = self.b - self.a
        n = np.linalg.norm(d)
        if n <= 0.0:
            raise ZeroLength("segment has zero length")
        return d / n

    def point_at(self, t: float) -> np.ndarray:
        return self.a + t * (self.b - self.a)

    def scaled(self, c: float) -> "Segment":
        return Segment(self.a * c, self.b * c)

    def clip_to_polygon(self, poly: "Polygon") -> "Segment | None":
        """Intersection with a convex polygon, or None if empty/degenerate."""
        lo, hi = 0.0, 1.0
        d = self.b - self.a
        for normal, offset in poly.edge_halfplanes():
            # keep <x, normal> <= offset
            denom = float(d @ normal)
            num = offset - float(self.a @ normal)
            if abs(denom) < 1e-15:
                if num < -poly._tol():
                    return None
                continue
            t = num / denom
            if denom > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
            if lo >= hi:
                return None
        if (hi - lo) * self.length <= EPS_GEOM * max(poly.diameter, self.length):
            return None
        return Segment(self.point_at(lo), self.point_at(hi))


def point_on_segment_interior(x, s: Segment, tol: float) -> bool:
    """True iff ``x`` lies on the relative interior of ``s`` within ``tol``.

    The point must be within ``tol`` of the supporting line and its
    projection parameter must lie in ``(tol/len, 1 - tol/len)``.
    Raises ``ZeroLength`` for zero-length segments.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    length = s.length
    if length <= 0.0:
        raise ZeroLength("segment has zero length")
    x = _as_point(x)
    d = (s.b - s.a) / length
    rel = x - s.a
    t = float(rel @ d)
    perp = rel - t * d
    if float(np.linalg.norm(perp)) > tol:
        return False
    tp = tol / length
    return tp < t / length < 1.0 - tp


# ---------------------------------------------------------------------------
# Convex polytopes
# ---------------------------------------------------------------------------

class ConvexPolytope:
    """Shared interface of full-dimensional convex cells (d=2 and d=3)."""

    dim: int

    @property
    def vertices(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def centroid(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    def width(self, u) -> float:
        """Support-function difference max<x,u> - min<x,u> over the vertices."""
        proj = self.vertices @ _as_point(u)
        return float(proj.max() - proj.min())

    def contains_point(self, x, tol: float | None = None) -> bool:
        raise NotImplementedError

    def clip_halfspace(self, normal, offset: float, keep: int):
        raise NotImplementedError

    def split(self, h: Hyperplane):
        raise NotImplementedError

    def translated(self, v):
        raise NotImplementedError

    def scaled(self, c: float):
        raise NotImplementedError

    def _tol(self) -> float:
        return EPS_GEOM * self.diameter


def _diameter(points: np.ndarray) -> float:
    # Max pairwise distance; vertex counts stay small so O(n^2) is fine.
    diff = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=2)).max())


class Polygon(ConvexPolytope):
    """Bounded convex polygon with counterclockwise-ordered vertices."""

    dim = 2

    def __init__(self, vertices, validate: bool = True):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("polygon needs at least 3 planar vertices")
        if validate:
            v = _ccw_hull(v)
            if v.shape[0] < 3:
                raise GeometryError("degenerate polygon")
        self._v = v
        area2 = _shoelace2(v)
        if area2 <= 0:
            raise GeometryError("polygon vertices must be in CCW order")
        self._area = 0.5 * area2
        self._centroid: np.ndarray | None = None
        self._diam: float | None = None

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def volume(self) -> float:
        return self._area

    @property
    def area(self) -> float:
        return self._area

    @property
    def perimeter(self) -> float:
        d = np.diff(np.vstack([self._v, self._v[:1]]), axis=0)
        return float(np.sqrt((d * d).sum(axis=1)).sum())

    @property
    def centroid(self) -> np.ndarray:
        if self._centroid is None:
            self._centroid = _polygon_centroid(self._v, self._area)
        return self._centroid

    @property
    def diameter(self) -> float:
        if self._diam is None:
            self._diam = _diameter(self._v)
        return self._diam

    def edges(self) -> Iterable[tuple[np.ndarray, np.ndarray]]:
        n = len(self._v)
        for i in range(n):
            yield self._v[i], self._v[(i + 1) % n]

    def edge_halfplanes(self) -> Iterable[tuple[np.ndarray, float]]:
        """Outward (normal, offset) pairs; interior satisfies <x,n> <= offset."""
        for a, b in self.edges():
            e = b - a
            normal = np.array([e[1], -e[0]])  # outward for CCW order
            norm = np.linalg.norm(normal)
            if norm <= 0:
                continue
            normal = normal / norm
            yield normal, float(a @ normal)

    def contains_point(self, x, tol: float | None = None) -> bool:
        tol = self._tol() if tol is None else tol
        x = _as_point(x)
        for normal, offset in self.edge_halfplanes():
            if float(x @ normal) - offset > tol:
                return False
        return True

    def distance_to_boundary(self, x) -> float:
        """Distance from a point to the polygon boundary."""
        x = _as_point(x)
        best = math.inf
        for a, b in self.edges():
            best = min(best, _point_segment_distance(x, a, b))
        return best

    def clip_halfspace(self, normal, offset: float, keep: int) -> "Polygon | None":
        """Clip to ``keep * (<x, normal> - offset) >= 0``; None if empty."""
        normal = _as_point(normal)
        s = (self._v @ normal - offset) * float(keep)
        tol = self._tol()
        if s.min() >= -tol:
            return self
        if s.max() <= tol:
            return None
        out = _walk_clip(self._v, s, tol)
        return _polygon_from_walk(out, self.diameter)

    def split(self, h: Hyperplane) -> tuple["Polygon", "Polygon", Segment]:
        s = h.signed_distance(self._v)
        tol = self._tol()
        if s.max() <= tol or s.min() >= -tol:
            raise NoIntersection("hyperplane misses the polygon interior")
        plus = _polygon_from_walk(_walk_clip(self._v, s, tol), self.diameter)
        minus = _polygon_from_walk(_walk_clip(self._v, -s, tol), self.diameter)
        # chord endpoints: strict edge crossings plus vertices on the plane
        pts = _crossing_points(self._v, s, tol)
        pts.extend(self._v[i] for i in range(len(self._v)) if abs(s[i]) <= tol)
        pts = _dedupe_points(pts, tol)
        if plus is None or minus is None or len(pts) != 2:
            raise DegenerateCut("cut face below tolerance")
        face = Segment(pts[0], pts[1])
        if face.length < tol:
            raise DegenerateCut("cut face below tolerance")
        return plus, minus, face

    def translated(self, v) -> "Polygon":
        return Polygon(self._v + _as_point(v), validate=False)

    def scaled(self, c: float) -> "Polygon":
        return Polygon(self._v * float(c), validate=False)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self._v.min(axis=0), self._v.max(axis=0)


def rectangle(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    """Axis-aligned rectangle [x0,x1] x [y0,y1]."""
    if not (x1 > x0 and y1 > y0):
        raise GeometryError("rectangle needs positive extents")
    return Polygon([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], validate=False)


def _shoelace2(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    out = float(x[:-1] @ y[1:] - x[1:] @ y[:-1])
    return out + float(x[-1] * y[0] - x[0] * y[-1])


def _polygon_centroid(v: np.ndarray, area: float) -> np.ndarray:
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    cx = float(((x + xn) * cross).sum()) / (6.0 * area)
    cy = float(((y + yn) * cross).sum()) / (6.0 * area)
    return np.array([cx, cy])


def _ccw_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull in CCW order (monotone chain), dropping collinear points."""
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > 1e-14:
            keep.append(i)
    pts = pts[keep]
    if len(pts) < 3:
        return pts

    def half(seq):
        hull = []
        for p in seq:
            while len(hull) >= 2 and np.cross(hull[-1] - hull[-2], p - hull[-2]) <= 0:
                hull.pop()
            hull.append(p)
        return hull

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _point_segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    L2 = float(d @ d)
    if L2 <= 0:
        return float(np.linalg.norm(x - a))
    t = float((x - a) @ d) / L2
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(x - (a + t * d)))


def _walk_clip(v: np.ndarray, s: np.ndarray, tol: float) -> list[np.ndarray]:
    """Vertices of the polygon part with s >= 0 (edge-walk clipping)."""
    out: list[np.ndarray] = []
    n = len(v)
    for i in range(n):
        j = (i + 1) % n
        si, sj = s[i], s[j]
        if si >= -tol:
            out.append(v[i])
        if (si > tol and sj < -tol) or (si < -tol and sj > tol):
            t = si / (si - sj)
            out.append(v[i] + t * (v[j] - v[i]))
    return out

def _polygon_from_walk(pts: list[np.ndarray], parent_diam: float) -> Polygon | None:
    if len(pts) < 3:
        return None
    arr = np.array(pts)
    # drop consecutive duplicates within tolerance
    keep = [0]
    for i in range(1, len(arr)):
        if np.linalg.norm(arr[i] - arr[keep[-1]]) > EPS_GEOM * parent_diam:
            keep.append(i)
    if len(keep) >= 2 and np.linalg.norm(arr[keep[-1]] - arr[keep[0]]) <= EPS_GEOM * parent_diam:
        keep.pop()
    arr = arr[keep]
    if len(arr) < 3 or 0.5 * _shoelace2(arr) <= (EPS_GEOM * parent_diam) ** 2:
        return None
    return Polygon(arr, validate=False)


def _crossing_points(v: np.ndarray, s: np.ndarray, tol: float) -> list[np.ndarray]:
    pts = []
    n = len(v)
    for i in range(n):
        j = (i + 1) % n
        si, sj = s[i], s[j]
        if (si > tol and sj < -tol) or (si < -tol and sj > tol):
            t = si / (si - sj)
            pts.append(v[i] + t * (v[j] - v[i]))
    return pts


def _dedupe_points(pts: list[np.ndarray], tol: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > tol for q in out):
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# d = 3
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Face3:
    """Planar convex polygon embedded in R^3; the cut-face type in dimension 3."""

    verts: np.ndarray            # (m, 3), cyclically ordered
    plane: Hyperplane

    def __post_init__(self):
        object.__setattr__(self, "verts", np.asarray(self.verts, dtype=float))

    @property
    def dim(self) -> int:
        return 2

    @property
    def vertices(self) -> np.ndarray:
        return self.verts

    @property
    def measure(self) -> float:
        """Area of the planar polygon."""
        v = self.verts
        total = np.zeros(3)
        for i in range(1, len(v) - 1):
            total += np.cross(v[i] - v[0], v[i + 1] - v[0])
        return 0.5 * float(np.linalg.norm(total))

    @property
    def centroid(self) -> np.ndarray:
        v = self.verts
        acc = np.zeros(3)
        area = 0.0
        for i in range(1, len(v) - 1):
            a = 0.5 * float(np.linalg.norm(np.cross(v[i] - v[0], v[i + 1] - v[0])))
            acc += a * (v[0] + v[i] + v[i + 1]) / 3.0
            area += a
        if area <= 0:
            return v.mean(axis=0)
        return acc / area

    @property
    def diameter(self) -> float:
        return _diameter(self.verts)

    def scaled(self, c: float) -> "Face3":
        return Face3(self.verts * c, self.plane.scaled(c))

    def contains_point(self, x, tol: float) -> bool:
        """Point-in-face test for a point already known to be near the plane."""
        x = _as_point(x)
        if abs(float(self.plane.signed_distance(x))) > tol:
            return False
        n = self.plane.normal
        v = self.verts
        m = len(v)
        sign = 0.0
        for i in range(m):
            edge = v[(i + 1) % m] - v[i]
            c = float(np.cross(edge, x - v[i]) @ n)
            if abs(c) <= tol * max(1.0, self.diameter):
                continue
            if sign == 0.0:
                sign = math.copysign(1.0, c)
            elif math.copysign(1.0, c) != sign:
                return False
        return True

    def clip_to_polyhedron(self, poly: "Polyhedron") -> "Face3 | None":
        verts = self.verts
        tol = max(poly._tol(), EPS_GEOM * max(self.diameter, 1e-300))
        for normal, offset in poly.facet_halfspaces():
            s = -(verts @ normal - offset)  # keep <x,n> <= offset
            if s.min() >= -tol:
                continue
            if s.max() <= tol:
                return None
            kept = _walk_clip(verts, s, tol)
            if len(kept) < 3:
                return None
            verts = np.array(kept)
        face = Face3(verts, self.plane)
        if face.measure <= (EPS_GEOM * poly.diameter) ** 2:
            return None
        return face

    def segment_intersection(self, a: np.ndarray, b: np.ndarray, tol: float):
        """Crossing point of segment [a, b] with the face, or None."""
        sa = float(self.plane.signed_distance(a))
        sb = float(self.plane.signed_distance(b))
        if (sa > tol and sb > tol) or (sa < -tol and sb < -tol):
            return None
        denom = sa - sb
        if abs(denom) <= tol:
            return None  # probe parallel to face plane: no transversal crossing
        t = sa / denom
        if t < 0.0 or t > 1.0:
            return None
        x = a + t * (b - a)
        return x if self.contains_point(x, tol) else None


class Polyhedron(ConvexPolytope):
    """Bounded convex polyhedron given by vertices and facet vertex cycles."""

    dim = 3

    def __init__(self, vertices, faces: Sequence[Sequence[int]]):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 4:
            raise GeometryError("polyhedron needs at least 4 vertices in R^3")
        if len(faces) < 4:
            raise GeometryError("polyhedron needs at least 4 facets")
        self._v = v
        self._faces = [list(f) for f in faces]
        self._diameter = _diameter(v)
        ref = v.mean(axis=0)
        vol = 0.0
        cent = np.zeros(3)
        normals = []
        offsets = []
        for f in self._faces:
            pts = v[f]
            fn = np.zeros(3)
            for i in range(1, len(f) - 1):
                fn += np.cross(pts[i] - pts[0], pts[i + 1] - pts[0])
            nrm = np.linalg.norm(fn)
            if nrm <= 0:
                raise GeometryError("degenerate facet")
            fn = fn / nrm
            off = float(pts[0] @ fn)
            if float(ref @ fn) > off:    # orient outward
                fn, off = -fn, -off
            normals.append(fn)
            offsets.append(off)
            fvol = 0.0
            fcent = np.zeros(3)
            for i in range(1, len(f) - 1):
                tet = abs(float(np.dot(np.cross(pts[i] - ref, pts[i + 1] - ref), pts[0] - ref))) / 6.0
                fvol += tet
                fcent += tet * (ref + pts[0] + pts[i] + pts[i + 1]) / 4.0
            vol += fvol
            cent += fcent
        if vol <= 0:
            raise GeometryError("polyhedron has zero volume")
        self._volume = vol
        self._centroid = cent / vol
        self._normals = np.array(normals)
        self._offsets = np.array(offsets)

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def faces(self) -> list[list[int]]:
        return self._faces

    @property
    def volume(self) -> float:
        return self._volume

    @property
    def centroid(self) -> np.ndarray:
        return self._centroid

    @property
    def diameter(self) -> float:
        return self._diameter

    def facet_halfspaces(self) -> Iterable[tuple[np.ndarray, float]]:
        """Outward (normal, offset) pairs; interior satisfies <x,n> <= offset."""
        for n, c in zip(self._normals, self._offsets):
            yield n, float(c)

    def contains_point(self, x, tol: float | None = None) -> bool:
        tol = self._tol() if tol is None else tol
        x = _as_point(x)
        return bool(((self._normals @ x - self._offsets) <= tol).all())

    def distance_to_boundary(self, x) -> float:
        """Distance to the boundary for an interior point (facet-plane distance)."""
        x = _as_point(x)
        return float(np.abs(self._normals @ x - self._offsets).min())

    def edges(self) -> list[tuple[int, int]]:
        seen = set()
        for f in self._faces:
            m = len(f)
            for i in range(m):
                e = (min(f[i], f[(i + 1) % m]), max(f[i], f[(i + 1) % m]))
                seen.add(e)
        return sorted(seen)

    def mean_width(self) -> float:
        """Mean width: sum of edge length x exterior dihedral angle over 4*pi."""
        edge_faces: dict[tuple[int, int], list[int]] = {}
        for k, f in enumerate(self._faces):
            m = len(f)
            for i in range(m):
                e = (min(f[i], f[(i + 1) % m]), max(f[i], f[(i + 1) % m]))
                edge_faces.setdefault(e, []).append(k)
        total = 0.0
        for (i, j), fk in edge_faces.items():
            if len(fk) != 2:
                raise GeometryError("non-manifold edge in polyhedron")
            n1, n2 = self._normals[fk[0]], self._normals[fk[1]]
            ang = math.acos(max(-1.0, min(1.0, float(n1 @ n2))))
            total += float(np.linalg.norm(self._v[j] - self._v[i])) * ang
        return total / (4.0 * math.pi)

    def clip_halfspace(self, normal, offset: float, keep: int) -> "Polyhedron | None":
        normal = _as_point(normal)
        s = (self._v @ normal - offset) * float(keep)
        tol = self._tol()
        if s.min() >= -tol:
            return self
        if s.max() <= tol:
            return None
        return self._clip(s, tol, Hyperplane.from_normal_offset(normal * keep, offset * keep))[0]

    def split(self, h: Hyperplane) -> tuple["Polyhedron", "Polyhedron", Face3]:
        s = h.signed_distance(self._v)
        tol = self._tol()
        if s.max() <= tol or s.min() >= -tol:
            raise NoIntersection("hyperplane misses the polyhedron interior")
        plus, face_p = self._clip(s, tol, h)
        minus, face_m = self._clip(-s, tol, h)
        if plus is None or minus is None or face_p is None:
            raise DegenerateCut("cut face below tolerance")
        if face_p.measure < (tol * self._diameter):
            raise DegenerateCut("cut face below tolerance")
        return plus, minus, face_p

    def _clip(self, s: np.ndarray, tol: float, h: Hyperplane):
        """Part of the polyhedron with s >= 0 plus the cut face (or None)."""
        crossings: dict[tuple[int, int], np.ndarray] = {}
        new_faces: list[list[np.ndarray]] = []
        cut_points: list[np.ndarray] = []

        def crossing(i: int, j: int) -> np.ndarray:
            key = (min(i, j), max(i, j))
            if key not in crossings:
                t = s[i] / (s[i] - s[j])
                crossings[key] = self._v[i] + t * (self._v[j] - self._v[i])
            return crossings[key]

        for f in self._faces:
            m = len(f)
            out: list[np.ndarray] = []
            for idx in range(m):
                i, j = f[idx], f[(idx + 1) % m]
                if s[i] >= -tol:
                    out.append(self._v[i])
                if (s[i] > tol and s[j] < -tol) or (s[i] < -tol and s[j] > tol):
                    out.append(crossing(i, j))
            if len(out) >= 3:
                new_faces.append(out)
        cut_points = list(crossings.values())
        cut_points.extend(self._v[i] for i in range(len(self._v)) if abs(s[i]) <= tol)
        cut_points = _dedupe_points(cut_points, tol)
        cut_face = None
        if len(cut_points) >= 3:
            ordered = _order_planar_cycle(np.array(cut_points), h.normal)
            cut_face = Face3(ordered, h)
            new_faces.append([p for p in ordered])
        poly = _polyhedron_from_face_lists(new_faces, self._diameter)
        return poly, cut_face

    def translated(self, v) -> "Polyhedron":
        return Polyhedron(self._v + _as_point(v), self._faces)

    def scaled(self, c: float) -> "Polyhedron":
        return Polyhedron(self._v * float(c), self._faces)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self._v.min(axis=0), self._v.max(axis=0)


def box(x0, y0, z0, x1, y1, z1) -> Polyhedron:
    """Axis-aligned box [x0,x1] x [y0,y1] x [z0,z1]."""
    if not (x1 > x0 and y1 > y0 and z1 > z0):
        raise GeometryError("box needs positive extents")
    v = np.array([
        [x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0],
        [x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1],
    ], dtype=float)
    faces = [
        [0, 1, 2, 3], [4, 5, 6, 7], [0, 1, 5, 4],
        [2, 3, 7, 6], [1, 2, 6, 5], [0, 3, 7, 4],
    ]
    return Polyhedron(v, faces)


def _order_planar_cycle(points: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Order coplanar points of a convex cycle by angle around their mean."""
    c = points.mean(axis=0)
    ref = points[0] - c
    ref = ref / max(np.linalg.norm(ref), 1e-300)
    e2 = np.cross(normal, ref)
    ang = np.arctan2((points - c) @ e2, (points - c) @ ref)
    return points[np.argsort(ang)]


def _polyhedron_from_face_lists(face_pts: list[list[np.ndarray]], parent_diam: float) -> Polyhedron | None:
    tol = EPS_GEOM * parent_diam
    verts: list[np.ndarray] = []

    def vid(p: np.ndarray) -> int:
        for k, q in enumerate(verts):
            if np.linalg.norm(p - q) <= tol:
                return k
        verts.append(p)
        return len(verts) - 1

    faces = []
    for pts in face_pts:
        idx = []
        for p in pts:
            k = vid(p)
            if not idx or (k != idx[-1] and k != idx[0]):
                idx.append(k)
        if len(idx) >= 3:
            faces.append(idx)
    if len(verts) < 4 or len(faces) < 4:
        return None
    try:
        poly = Polyhedron(np.array(verts), faces)
    except GeometryError:
        return None
    if poly.volume <= (tol * parent_diam) * parent_diam:
        return None
    return poly


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def split_polytope(z: ConvexPolytope, h: Hyperplane):
    """Split a cell by a hyperplane into (plus, minus, cut face).

    ``plus`` is the part with ``<x, normal> >= offset`` for the stored
    normal; the face labels never flip under canonicalization of ``h``.
    Raises ``NoIntersection`` or ``DegenerateCut`` on inadmissible cuts.
    """
    if z.dim != h.dim:
        raise GeometryError("dimension mismatch between polytope and hyperplane")
    return z.split(h)


def width(z, u) -> float:
    """Width of a vertex-represented convex body in direction ``u``."""
    verts = np.asarray(z.vertices, dtype=float)
    if verts.size == 0:
        raise EmptyPolytope("empty polytope")
    proj = verts @ _as_point(u)
    return float(proj.max() - proj.min())
