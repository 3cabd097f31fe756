"""Exact Alexander invariants and Blanchfield linking forms over Laurent rings."""

from .knot import (
    KnotData,
    KnotError,
    KnotFileError,
    PDCode,
    Representation,
    SeifertMatrix,
    WirtingerPresentation,
    alexander_module,
    alexander_poly_fox,
    alexander_poly_seifert,
    blanchfield_from_seifert,
    connected_sum,
    connected_sum_presentation,
    fox_derivative,
    load_corpus,
    load_knot,
    satellite_blanchfield,
    twisted_alexander,
    wirtinger_from_pd,
)
from .linking import (
    LinkingError,
    LinkingPairing,
    ModuleMap,
    block_inclusions,
    classify,
    evaluate,
    infect,
    infected_module,
    is_hermitian,
    is_isometry,
    is_morphism,
    is_nonsingular,
    orthogonal_sum,
    pairing_from_presentation,
    pullback,
    tensor_pairing,
)
from .matrix import Mat, MatrixError, adjugate, det, inverse_over_fractions, smith_normal_form
from .module import (
    ModuleError,
    TorsionModule,
    direct_sum,
    modules_isomorphic,
    order,
    primary_decomposition,
    tensor_along,
)
from .ring import (
    GF,
    QQ,
    ZZ,
    BaseRing,
    EtaRegularityError,
    FractionClass,
    LaurentFraction,
    LaurentPoly,
    RingError,
    WindingMorphism,
    conj,
    normalize,
    reduce_mod_ring,
)
from .verify import VerificationReport, run_verification_suite

__version__ = "0.1.0"
