"""Translation-invariant hyperplane measures: hit rates and hitting laws.

A measure is specified by its directional distribution on canonical unit
normals (discrete atoms, or isotropic on the half-sphere for d in {2, 3})
together with Lebesgue offsets along each normal.  ``hit_rate`` integrates
the width of a body over directions; ``sample_hitting`` draws a hyperplane
from the normalized law restricted to hyperplanes hitting the body
(direction size-biased by width, offset uniform on the projection
interval).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCut, EmptyPolytope, GeometryError, NoIntersection
from .geometry import (
    EPS_GEOM,
    ConvexPolytope,
    Hyperplane,
    Polygon,
    Polyhedron,
    Segment,
    _needs_flip,
)

_MAX_RESAMPLE = 1000


class DirectionalDistribution:
    """Probability distribution over canonical unit normals."""

    dim: int

    def mean_projected_width(self, z) -> float:
        """Integral of width(z, n) over the distribution of normals."""
        raise NotImplementedError

    def sample_size_biased(self, z, rng: np.random.Generator) -> np.ndarray:
        """Normal drawn with probability proportional to width(z, n)."""
        raise NotImplementedError


class DiscreteDirections(DirectionalDistribution):
    """Finitely many normal directions with positive weights summing to one.

    The normals must not all be orthogonal to a common line (d=2: at least
    two distinct directions; d=3: normals spanning R^3), which guarantees
    that all cells of the induced division process stay bounded.
    """

    def __init__(self, atoms):
        normals = []
        weights = []
        for direction, w in atoms:
            n = np.asarray(direction, dtype=float)
            norm = np.linalg.norm(n)
            if norm <= 0:
                raise GeometryError("zero direction in discrete measure")
            n = n / norm
            if _needs_flip(n):
                n = -n
            normals.append(n)
            weights.append(float(w))
        self.normals = np.array(normals)
        self.weights = np.array(weights)
        self.dim = self.normals.shape[1]
        if (self.weights <= 0).any():
            raise ValueError("weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if self.dim == 2:
            distinct = {tuple(np.round(n, 12)) for n in self.normals}
            if len(distinct) < 2:
                raise ValueError("need at least 2 distinct directions in d=2")
        elif self.dim == 3:
            if np.linalg.matrix_rank(self.normals, tol=1e-9) < 3:
                raise ValueError("normals must span R^3")
        else:
            raise ValueError("only d=2 and d=3 are supported")

    def mean_projected_width(self, z) -> float:
        verts = np.asarray(z.vertices, dtype=float)
        proj = verts @ self.normals.T
        widths = proj.max(axis=0) - proj.min(axis=0)
        return float(self.weights @ widths)

    def sample_size_biased(self, z, rng: np.random.Generator) -> np.ndarray:
        verts = np.asarray(z.vertices, dtype=float)
        proj = verts @ self.normals.T
        widths = proj.max(axis=0) - proj.min(axis=0)
        p = np.cumsum(self.weights * widths)
        if p[-1] <= 0:
            raise EmptyPolytope("body has zero width in every atom direction")
        i = min(int(np.searchsorted(p, rng.random() * p[-1])), len(p) - 1)
        return self.normals[i]


class IsotropicDirections(DirectionalDistribution):
    """Uniform distribution over the half-sphere of normals (d=2 or d=3)."""

    def __init__(self, dim: int):
        if dim not in (2, 3):
            raise ValueError("isotropic directions support d=2 and d=3 only")
        self.dim = dim

    def mean_projected_width(self, z) -> float:
        # Exact mean widths: Cauchy's formula in the plane, the
        # edge/exterior-angle formula in space; L * E|<u,n>| for segments.
        if isinstance(z, Segment):
            return z.length * (2.0 / math.pi if self.dim == 2 else 0.5)
        if self.dim == 2:
            return z.perimeter / math.pi
        if isinstance(z, Polyhedron):
            return z.mean_width()
        raise EmptyPolytope("unsupported body for isotropic mean width")

    def sample_size_biased(self, z, rng: np.random.Generator) -> np.ndarray:
        # Acceptance-rejection with the diameter as envelope: width <= diam.
        verts = np.asarray(z.vertices, dtype=float)
        diam = z.diameter
        if diam <= 0:
            raise EmptyPolytope("degenerate body")
        while True:
            n = rng.standard_normal(self.dim)
            norm = np.linalg.norm(n)
            if norm < 1e-12:
                continue
            n = n / norm
            if _needs_flip(n):
                n = -n
            proj = verts @ n
            if rng.random() * diam <= proj.max() - proj.min():
                return n


@dataclass(frozen=True)
class HyperplaneMeasure:
    """Directional distribution plus Lebesgue offsets; hit rates and sampling."""

    directional: DirectionalDistribution

    @property
    def dim(self) -> int:
        return self.directional.dim

    def hit_rate(self, z) -> float:
        """Measure of the set of hyperplanes hitting ``z``.

        Accepts full-dimensional cells as well as segments (so the rate of
        a unit segment in direction u, the line-hit intensity, is exposed
        through the same call).  Strictly positive for nondegenerate input,
        translation invariant, and linear under dilation.
        """
        if isinstance(z, Segment):
            if z.length <= 0:
                raise EmptyPolytope("zero-length segment")
            return self.directional.mean_projected_width(z)
        if not isinstance(z, ConvexPolytope):
            raise EmptyPolytope("unsupported body")
        if z.volume <= 0:
            raise EmptyPolytope("polytope has empty interior")
        return self.directional.mean_projected_width(z)

    def sample_hitting(self, z: ConvexPolytope, rng: np.random.Generator) -> Hyperplane:
        """Hyperplane from the normalized hitting law of ``z``.

        Directions are size-biased by the width of ``z``; the offset is then
        uniform on the projection interval.  Draws grazing a vertex within
        tolerance (inadmissible for splitting) are resampled.
        """
        if not isinstance(z, ConvexPolytope) or z.volume <= 0:
            raise EmptyPolytope("sampling requires a full-dimensional cell")
        verts = z.vertices
        tol = EPS_GEOM * z.diameter
        for _ in range(_MAX_RESAMPLE):
            n = self.directional.sample_size_biased(z, rng)
            proj = verts @ n
            lo, hi = proj.min(), proj.max()
            c = rng.uniform(lo, hi)
            # admissible iff the cut clears every vertex by the tolerance
            if np.abs(proj - c).min() < tol:
                continue
            if c - lo < tol or hi - c < tol:
                continue
            return Hyperplane(n, c)
        raise DegenerateCut("could not draw an admissible hyperplane")


def axis_parallel_measure(dim: int, weights=None) -> HyperplaneMeasure:
    """Atoms on the coordinate directions (equal weights by default)."""
    if weights is None:
        weights = [1.0 / dim] * dim
    eye = np.eye(dim)
    return HyperplaneMeasure(DiscreteDirections(list(zip(eye, weights))))


def isotropic_measure(dim: int) -> HyperplaneMeasure:
    return HyperplaneMeasure(IsotropicDirections(dim))


def measure_from_config(spec: dict, dim: int) -> HyperplaneMeasure:
    """Build a measure from a config block.

    ``{"type": "isotropic"}`` or
    ``{"type": "discrete", "atoms": [[[nx, ny(, nz)], weight], ...]}``.
    """
    kind = spec.get("type")
    if kind == "isotropic":
        return isotropic_measure(dim)
    if kind == "discrete":
        atoms = [(np.asarray(a[0], dtype=float), float(a[1])) for a in spec["atoms"]]
        for direction, _ in atoms:
            if direction.shape != (dim,):
                raise ValueError(f"atom direction has wrong dimension: {direction}")
        return HyperplaneMeasure(DiscreteDirections(atoms))
    raise ValueError(f"unknown measure type: {kind!r}")
