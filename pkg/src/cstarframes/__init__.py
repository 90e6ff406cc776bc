"""Frames and compactness certificates for Hilbert modules over
block-diagonal matrix algebras.

Everything is exact at machine precision: norms come from per-block
spectral computations on faithful realizations, so the library can
certify inequalities rather than estimate them.
"""

from .algebra import AlgebraElement, AlgebraShape, State, norm_attaining_state
from .certify import (
    BallSampler,
    Certificate,
    CertifyConfig,
    EquivalenceEntry,
    EquivalenceReport,
    GramDefectError,
    SeriesDecomposition,
    certify_equivalences,
    check_condition_a,
    check_condition_b,
    check_condition_cd,
    free_submodule_check,
    operator_precompact,
    series_decompose,
)
from .counterexample import (
    SingleGeneratorApprox,
    TruncatedCSetting,
    build_setting,
    coeff_growth,
    image_sample,
    single_generator_approx,
    tail_obstruction,
)
from .frames import DegenerateFrameError, Frame, standard_basis_frame
from .modules import (
    Functional,
    ModuleOperator,
    ModuleVector,
    SubmodulePresentation,
    inner_product,
    orthogonal_span_family,
    spectral_normalize,
    submodule_distance,
    synthesis_pinv_norm,
    theta_op,
)
from .seminorms import (
    AdmissibilityReport,
    AdmissibleSystem,
    ApproximationHypothesisError,
    SampleSet,
    SeminormSpec,
    TailDecaySignal,
    WitnessReport,
    admissible_check,
    adversarial_witness,
    epsilon_net,
    net_covers,
    net_transfer,
    pseudometric_eval,
    seminorm_eval,
)
from .serialization import SchemaError, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "AdmissibleSystem",
    "AlgebraElement",
    "AlgebraShape",
    "ApproximationHypothesisError",
    "BallSampler",
    "Certificate",
    "CertifyConfig",
    "DegenerateFrameError",
    "EquivalenceEntry",
    "EquivalenceReport",
    "Frame",
    "Functional",
    "GramDefectError",
    "ModuleOperator",
    "ModuleVector",
    "SampleSet",
    "SchemaError",
    "SeminormSpec",
    "SeriesDecomposition",
    "SingleGeneratorApprox",
    "State",
    "SubmodulePresentation",
    "TailDecaySignal",
    "TruncatedCSetting",
    "WitnessReport",
    "admissible_check",
    "adversarial_witness",
    "build_setting",
    "certify_equivalences",
    "check_condition_a",
    "check_condition_b",
    "check_condition_cd",
    "coeff_growth",
    "epsilon_net",
    "free_submodule_check",
    "image_sample",
    "inner_product",
    "net_covers",
    "net_transfer",
    "norm_attaining_state",
    "operator_precompact",
    "orthogonal_span_family",
    "parse",
    "pseudometric_eval",
    "seminorm_eval",
    "serialize",
    "series_decompose",
    "single_generator_approx",
    "spectral_normalize",
    "standard_basis_frame",
    "submodule_distance",
    "synthesis_pinv_norm",
    "tail_obstruction",
    "theta_op",
]
