import math

import numpy as np
import pytest
from scipy import integrate, stats

from conftest import random_convex_polygon
from stitlab.errors import EmptyPolytope
from stitlab.geometry import Segment, box, rectangle
from stitlab.measure import (
    DiscreteDirections,
    HyperplaneMeasure,
    IsotropicDirections,
    axis_parallel_measure,
    isotropic_measure,
    measure_from_config,
)


def isotropic_width_quadrature(poly):
    # independent oracle: integrate the support width over the half-circle
    def w(theta):
        u = np.array([math.cos(theta), math.sin(theta)])
        proj = poly.vertices @ u
        return proj.max() - proj.min()

    val, _ = integrate.quad(w, 0.0, math.pi, limit=200)
    return val / math.pi


class TestHitRate:
    def test_axis_parallel_square(self):
        assert axis_parallel_measure(2).hit_rate(rectangle(0, 0, 1, 1)) == pytest.approx(1.0)

    def test_axis_parallel_rectangle(self):
        assert axis_parallel_measure(2).hit_rate(rectangle(0, 0, 2, 1)) == pytest.approx(1.5)

    def test_isotropic_square_cauchy(self):
        got = isotropic_measure(2).hit_rate(rectangle(0, 0, 1, 1))
        assert got == pytest.approx(4.0 / math.pi, abs=1e-12)

    def test_isotropic_matches_quadrature_oracle(self):
        rng = np.random.default_rng(11)
        iso = isotropic_measure(2)
        for _ in range(20):
            poly = random_convex_polygon(rng)
            assert iso.hit_rate(poly) == pytest.approx(
                isotropic_width_quadrature(poly), abs=1e-8)

    def test_unit_segment_rates(self):
        seg = Segment([0.0, 0.0], [1.0, 0.0])
        assert axis_parallel_measure(2).hit_rate(seg) == pytest.approx(0.5)
        assert isotropic_measure(2).hit_rate(seg) == pytest.approx(2.0 / math.pi)
        seg3 = Segment([0, 0, 0], [1, 0, 0])
        assert isotropic_measure(3).hit_rate(seg3) == pytest.approx(0.5)

    def test_isotropic_3d_cube(self):
        assert isotropic_measure(3).hit_rate(box(0, 0, 0, 1, 1, 1)) == pytest.approx(1.5)

    def test_translation_invariance_exact(self):
        sq = rectangle(0, 0, 1, 1)
        moved = sq.translated([12.3, -4.56])
        for m in (axis_parallel_measure(2), isotropic_measure(2)):
            assert m.hit_rate(sq) == m.hit_rate(moved)

    def test_dilation_linearity(self):
        sq = rectangle(0, 0, 1, 1)
        for m in (axis_parallel_measure(2), isotropic_measure(2)):
            base = m.hit_rate(sq)
            for c in (0.25, 3.0, 17.5):
                assert m.hit_rate(sq.scaled(c)) == pytest.approx(c * base, rel=1e-12)

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyPolytope):
            axis_parallel_measure(2).hit_rate(Segment([0, 0], [0, 0]))


class TestSampling:
    def test_square_direction_split_chi2(self):
        # equal widths: each axis direction with probability 1/2
        m = axis_parallel_measure(2)
        sq = rectangle(0, 0, 1, 1)
        rng = np.random.default_rng(1)
        n = 100_000
        vertical = sum(abs(m.sample_hitting(sq, rng).normal[0]) > 0.5 for _ in range(n))
        _, p = stats.chisquare([vertical, n - vertical])
        assert p >= 0.001

    def test_rectangle_size_bias(self):
        # x-extent 2 vs y-extent 1: normal e1 with probability 2/3
        m = axis_parallel_measure(2)
        rect = rectangle(0, 0, 2, 1)
        rng = np.random.default_rng(2)
        n = 100_000
        e1 = sum(abs(m.sample_hitting(rect, rng).normal[0]) > 0.5 for _ in range(n))
        _, p = stats.chisquare([e1, n - e1], f_exp=[2 * n / 3, n / 3])
        assert p >= 0.001

    def test_offsets_uniform_on_projection(self):
        m = axis_parallel_measure(2)
        sq = rectangle(0, 0, 1, 1)
        rng = np.random.default_rng(3)
        offsets = [m.sample_hitting(sq, rng).offset for _ in range(20_000)]
        assert stats.kstest(offsets, stats.uniform(0, 1).cdf).pvalue >= 0.001

    def test_sampled_hyperplane_hits_cell(self):
        rng = np.random.default_rng(4)
        sq = rectangle(3, 7, 5, 9)
        for m in (axis_parallel_measure(2), isotropic_measure(2)):
            for _ in range(500):
                h = m.sample_hitting(sq, rng)
                d = h.signed_distance(sq.vertices)
                assert d.max() > 0 > d.min()

    def test_isotropic_direction_marginal_matches_quadrature(self):
        # width-biased angle density for the unit square: (|cos|+|sin|)/4
        iso = isotropic_measure(2)
        sq = rectangle(0, 0, 1, 1)
        rng = np.random.default_rng(5)
        angles = []
        for _ in range(40_000):
            n = iso.sample_hitting(sq, rng).normal
            angles.append(math.atan2(n[1], n[0]) % math.pi)

        def cdf(theta):
            val, _ = integrate.quad(
                lambda a: (abs(math.cos(a)) + abs(math.sin(a))) / 4.0, 0.0, theta)
            return val

        grid = np.linspace(0.01, math.pi - 0.01, 40)
        emp = np.searchsorted(np.sort(angles), grid) / len(angles)
        ana = np.array([cdf(g) for g in grid])
        assert np.abs(emp - ana).max() < 0.01

    def test_isotropic_3d_sampling_runs(self):
        iso = isotropic_measure(3)
        c = box(0, 0, 0, 1, 1, 1)
        rng = np.random.default_rng(6)
        for _ in range(200):
            h = iso.sample_hitting(c, rng)
            d = h.signed_distance(c.vertices)
            assert d.max() > 0 > d.min()


class TestValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            DiscreteDirections([([1, 0], 0.6), ([0, 1], 0.6)])

    def test_weights_positive(self):
        with pytest.raises(ValueError):
            DiscreteDirections([([1, 0], 1.5), ([0, 1], -0.5)])

    def test_two_distinct_directions_needed_2d(self):
        with pytest.raises(ValueError):
            DiscreteDirections([([1, 0], 0.5), ([-1, 0], 0.5)])

    def test_normals_must_span_3d(self):
        with pytest.raises(ValueError):
            DiscreteDirections([([1, 0, 0], 0.5), ([0, 1, 0], 0.5)])

    def test_normals_canonicalized(self):
        d = DiscreteDirections([([0, -1], 0.5), ([1, 0], 0.5)])
        assert (d.normals[:, -1] >= 0).all() or (d.normals[d.normals[:, -1] == 0, 0] > 0).all()

    def test_isotropic_dim_guard(self):
        with pytest.raises(ValueError):
            IsotropicDirections(4)

    def test_config_parsing(self):
        m = measure_from_config({"type": "isotropic"}, 2)
        assert isinstance(m, HyperplaneMeasure)
        m2 = measure_from_config(
            {"type": "discrete", "atoms": [[[1, 0], 0.5], [[0, 1], 0.5]]}, 2)
        assert m2.hit_rate(rectangle(0, 0, 1, 1)) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            measure_from_config({"type": "nope"}, 2)
        with pytest.raises(ValueError):
            measure_from_config({"type": "discrete", "atoms": [[[1, 0, 0], 1.0]]}, 2)
