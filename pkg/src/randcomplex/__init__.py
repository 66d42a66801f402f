"""Random geometric simplicial complexes on Poisson point samples."""
from .complexes import (
    Flavor,
    GeometricComplex,
    SearchCapExceeded,
    SimplicialComplex,
    build_complex,
    cech_complex,
    combinatorially_equivalent,
    rips_complex,
    skeleton,
)
from .detection import (
    OccurrenceKind,
    OccurrenceReport,
    connected_components,
    crossing_component,
    find_isolated_occurrences,
    find_pendant_occurrences,
)
from .genericity import certify, genericity_margin, is_representation, make_generic, verify_generic
from .geometry import (
    PointSet,
    bottleneck_set_distance,
    hausdorff_distance,
    meb_radius,
    minimal_enclosing_ball,
)
from .homology import Field, TruncatedComplexError, betti_numbers, euler_characteristic
from .poisson import Box, PoissonConfig, SamplingMode, sample

__version__ = "0.1.0"
