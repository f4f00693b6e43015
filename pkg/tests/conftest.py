import numpy as np

from stitlab.geometry import Polygon


def random_convex_polygon(rng, n_points=8, scale=1.0) -> Polygon:
    pts = rng.standard_normal((n_points, 2)) * scale
    return Polygon(pts, validate=True)
