"""Numerical laboratory for equidistribution phenomena on complex projective spaces.

Subpackages cover: invariant sampling and test functions on P^k
(:mod:`eqlab.projective`), exact/floating homogeneous polynomial algebra
(:mod:`eqlab.poly`, :mod:`eqlab.solve`), random section ensembles and zero
discrepancy (:mod:`eqlab.sections`), rational map dynamics and equilibrium
measures (:mod:`eqlab.dynamics`), regular plane automorphisms
(:mod:`eqlab.henon`), quasi-plurisubharmonic audits (:mod:`eqlab.potential`),
and the experiment CLI (:mod:`eqlab.cli`).
"""

__version__ = "0.1.0"

from .projective import (
    ProjectivePoint,
    TestFunction,
    EmpiricalMeasure,
    chordal_distance,
    sample_point_fs,
    sample_point_real,
    sphere_log_modulus_integral,
    multiproj_normalization,
    builtin_test_functions,
)
from .poly import (
    HomogeneousPoly,
    PolyMap,
    PolyParseError,
    InhomogeneityError,
    parse_poly,
    compose_and_reduce,
    restrict_to_line,
)
from .solve import (
    univariate_roots,
    bivariate_common_zeros,
    CommonFactorError,
    ConditioningError,
)
from .sections import (
    SectionEnsemble,
    ZeroSet,
    sample_section,
    zero_set,
    pair_zero_current,
    discrepancy,
    concentration_experiment,
    volume_count,
)
from .dynamics import (
    RationalSelfMap,
    Correspondence,
    preimages,
    topological_degree,
    backward_orbit_sample,
    invariance_defect,
    mixing_correlations,
    degree_growth,
)
from .henon import (
    RegularAutomorphism,
    LinePair,
    build_regular_automorphism,
    line_intersection_cloud,
    equidistribution_gap,
    green_function,
)
from .potential import (
    QpshWitness,
    CompactSet,
    make_witness,
    normalize_qpsh,
    r1_bound_audit,
    moderate_integral,
    exceedance_profile,
    capacity_upper_bound,
    chordal_potential_eval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
