"""stitlab: a laboratory for iteration-stable random tessellations.

Simulates the Markovian cell-division process in planar and spatial
windows, samples the typical (weighted) maximal segment directly,
evaluates the associated distributional formulas numerically, and
statistically verifies the identities tying them together.
"""

from .analytics import (
    DistributionSpec,
    QuadratureSettings,
    birth_time_density,
    intensity_scaling,
    last_birth_cdf,
    mean_internal_vertices,
    p1j,
    p1j_table,
)
from .engine import (
    CellRecord,
    MaximalPolytopeRecord,
    TessellationState,
    extract_typical_segments_2d,
    iterate,
    line_section,
    replay,
    rescale,
    restrict,
    run_local_stit,
    segment_midpoint_intensity,
    summary_statistics,
)
from .geometry import (
    ConvexPolytope,
    Face3,
    Hyperplane,
    Polygon,
    Polyhedron,
    Segment,
    box,
    point_on_segment_interior,
    rectangle,
    split_polytope,
    width,
)
from .measure import (
    DirectionalDistribution,
    DiscreteDirections,
    HyperplaneMeasure,
    IsotropicDirections,
    axis_parallel_measure,
    isotropic_measure,
    measure_from_config,
)
from .palm import (
    PalmSegmentSample,
    sample_batch,
    sample_birth_times,
    sample_typical_segment,
)
from .streams import stream, substreams

__version__ = "0.1.0"
