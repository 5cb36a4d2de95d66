"""Lee-Yang zero analysis for isotropic spin chains.

Builds the chain partition function as an entire function of zeta = z^2
through a Gram-variable transfer recursion, locates its zeros, and checks
them against independent quadrature oracles.
"""

from .geometry import (
    ComplexVec2,
    GramTriple,
    gram_image_residual,
    gram_pair,
    in_L,
    preimage_pair,
)
from .laguerre import ClassEvidence, counterexample_scan, laguerre_evidence
from .measures import (
    LaplaceSeries,
    MeasureError,
    MeasureValidation,
    RadialMeasure,
    laplace_transform,
    radial_moment,
    validate_measure,
    wd_series,
)
from .oracles import OracleResult, laplace_direct, z_direct_circle, z_direct_mc
from .polys import (
    FLOAT,
    GRAM_VARS,
    PAIR_VARS,
    RATIONAL,
    FieldMismatchError,
    GramOperator,
    OperatorTerm,
    TruncatedPoly,
    VariableMismatchError,
    apply_operator,
    diagonal_series,
    exp_operator,
    merge_2_3,
)
from .recursion import (
    PartitionSeries,
    delta_operator,
    phi,
    phi_chain,
    phi_from_transform,
    psi_kernel,
    psi_step,
    psi_two,
    stable_coefficient_count,
)
from .zeros import (
    ZeroReport,
    classify_lee_yang,
    find_roots,
    newton_check,
    stabilize,
    stabilize_chain,
)

__version__ = "0.1.0"
