"""Direct sampler of the typical (optionally length-weighted) maximal segment.

Works in any dimension d >= 2 without simulating a window.  The sampler
realizes the distributional decomposition of the typical maximal segment
at horizon t with weight index j in {0, 1}:

- last birth time  s_{d-1} = t * U^(1/(d-j))  (inverse CDF of the marginal
  density (d-j) s^(d-j-1) / t^(d-j));
- earlier birth times i.i.d. uniform on (0, s_{d-1}), sorted (uniform on
  the ordered simplex, independent of j);
- segment length L ~ Exp(rate s_{d-1}) for j=0, and its length-biased
  version Gamma(2, rate s_{d-1}) for j=1;
- internal-vertex count N ~ Poisson(L * a(s)) with
  a(s) = d*t - 2 s_{d-1} - sum of the earlier birth times.

Lengths are reported in units where the line-hit intensity along the
segment direction equals one; that factor cancels from the law of N, which
is therefore free of the driving measure, and the whole construction is
invariant under the horizon (samples at horizon t are t times samples at
horizon 1, with N unchanged in law).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension


@dataclass(frozen=True)
class PalmSegmentSample:
    """One draw of the typical weighted maximal segment."""

    birth_times: tuple[float, ...]   # ordered, length d-1
    length: float
    internal_vertices: int
    weight_index: int
    dimension: int
    horizon: float


def _check(d: int, j: int, t: float) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d}")
    if j not in (0, 1):
        raise BadDimension(f"weight index must be 0 or 1, got {j}")
    if not t > 0:
        raise ValueError("horizon t must be positive")


def sample_birth_times_batch(d: int, j: int, t: float, n: int,
                             rng: np.random.Generator) -> np.ndarray:
    """(n, d-1) array of ordered birth-time tuples."""
    _check(d, j, t)
    last = t * rng.random(n) ** (1.0 / (d - j))
    if d == 2:
        return last[:, None]
    earlier = np.sort(rng.random((n, d - 2)), axis=1) * last[:, None]
    return np.hstack([earlier, last[:, None]])


def sample_birth_times(d: int, j: int, t: float, rng: np.random.Generator
                       ) -> tuple[float, ...]:
    """One ordered tuple (s_1 < ... < s_{d-1}) of birth times."""
    return tuple(sample_birth_times_batch(d, j, t, 1, rng)[0])


def sample_batch(d: int, j: int, t: float, n: int, rng: np.random.Generator
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized draws: (birth-time matrix, lengths, internal counts)."""
    s = sample_birth_times_batch(d, j, t, n, rng)
    last = s[:, -1]
    if j == 0:
        length = rng.exponential(1.0 / last)
    else:
        length = rng.gamma(2.0, 1.0 / last)
    a = d * t - 2.0 * last - s[:, :-1].sum(axis=1)
    a = np.maximum(a, 0.0)
    counts = rng.poisson(length * a)
    return s, length, counts


def sample_typical_segment(d: int, j: int, t: float, rng: np.random.Generator
                           ) -> PalmSegmentSample:
    s, length, counts = sample_batch(d, j, t, 1, rng)
    return PalmSegmentSample(
        birth_times=tuple(float(x) for x in s[0]),
        length=float(length[0]),
        internal_vertices=int(counts[0]),
        weight_index=j, dimension=d, horizon=t)


def write_csv(fh, d: int, s: np.ndarray, length: np.ndarray, counts: np.ndarray) -> None:
    """Write a sample batch as CSV rows (s_1..s_{d-1}, length, count)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f"s{i + 1}" for i in range(d - 1)] + ["length", "internal_vertices"])
    for row_s, L, N in zip(s, length, counts):
        writer.writerow([repr(float(x)) for x in row_s] + [repr(float(L)), int(N)])
