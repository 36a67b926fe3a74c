"""Exact certificates for dynamic comparison on rotations and odometers."""

from .scalars import ExactScalar, golden_theta
from .systems import CircleRotation, TorusRotation, Odometer, apply, min_orbit_gap
from .regions import (
    Region,
    CylinderRegion,
    BoxRegion,
    BoundaryReport,
    measure,
    measure_gap,
    translate_region,
    region_algebra,
    small_nbhd,
    inner_approx,
    outer_approx,
)
from .plfun import (
    PLFunction,
    CylinderFunction,
    SupportReport,
    bump,
    pl_combine,
    translate_fn,
    birkhoff_sum,
    global_extrema,
    integral,
    partition_of_unity,
)
from .towers import (
    RokhlinTower,
    first_return,
    build_tower,
    refine_tower,
    disjoint_base,
)
from .smallness import (
    SmallnessCertificate,
    ThinCover,
    LeftoverCover,
    distinct_sums_card,
    smallness_constant,
    union_smallness_bound,
    thin_cover,
    closed_thin_cover,
    leftover_cover,
    tsbp_separate,
    tsbp_point_nbhd,
    regular_inner_approx,
    regular_outer_approx,
)
from .comparison import (
    BirkhoffCertificate,
    ComparisonWitness,
    MatchingTable,
    VerificationReport,
    birkhoff_certificate,
    verify_certificate,
    simplify_inputs,
    column_counts,
    column_matching,
    dynamic_comparison,
    clopen_comparison,
    verify_witness,
)
from .specfile import SpecFile, parse_specfile, load_specfile
from .certfile import (
    CertificateFile,
    make_certfile,
    emit_certfile,
    parse_certfile,
    write_certfile,
    load_certfile,
)

__all__ = [
    "ExactScalar",
    "golden_theta",
    "CircleRotation",
    "TorusRotation",
    "Odometer",
    "apply",
    "min_orbit_gap",
    "Region",
    "CylinderRegion",
    "BoxRegion",
    "BoundaryReport",
    "measure",
    "measure_gap",
    "translate_region",
    "region_algebra",
    "small_nbhd",
    "inner_approx",
    "outer_approx",
    "PLFunction",
    "CylinderFunction",
    "SupportReport",
    "bump",
    "pl_combine",
    "translate_fn",
    "birkhoff_sum",
    "global_extrema",
    "integral",
    "partition_of_unity",
    "RokhlinTower",
    "first_return",
    "build_tower",
    "refine_tower",
    "disjoint_base",
    "SmallnessCertificate",
    "ThinCover",
    "LeftoverCover",
    "distinct_sums_card",
    "smallness_constant",
    "union_smallness_bound",
    "thin_cover",
    "closed_thin_cover",
    "leftover_cover",
    "tsbp_separate",
    "tsbp_point_nbhd",
    "regular_inner_approx",
    "regular_outer_approx",
    "BirkhoffCertificate",
    "ComparisonWitness",
    "MatchingTable",
    "VerificationReport",
    "birkhoff_certificate",
    "verify_certificate",
    "simplify_inputs",
    "column_counts",
    "column_matching",
    "dynamic_comparison",
    "clopen_comparison",
    "verify_witness",
    "SpecFile",
    "parse_specfile",
    "load_specfile",
    "CertificateFile",
    "make_certfile",
    "emit_certfile",
    "parse_certfile",
    "write_certfile",
    "load_certfile",
]
