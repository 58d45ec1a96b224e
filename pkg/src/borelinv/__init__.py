"""Constructive right inverses of the asymptotic Borel map for the sequences
``M_p = p^(tau p^sigma)``, built from a Lambert-W kernel."""
from .errors import (
    BorelInvError,
    BranchCutError,
    ConvergenceError,
    DomainError,
    FitError,
    MomentTableGap,
    ParamError,
    QuadratureError,
)
from .estimator import BorelLaplaceExtension
from .extension import (
    ExtensionConfig,
    FormalSeries,
    borel_roundtrip,
    borel_series,
    certify_growth,
    extend,
    prepare,
    remainder_scan,
)
from .kernel import (
    KernelParams,
    constants,
    flatness_fit,
    g_complex,
    g_real_monotonicity_probe,
    kernel_e,
    sandwich_fit,
    sector_bound_fit,
)
from .lambert_w import (
    image_region_predicate,
    slow_variation_probe,
    w_derivative,
    w_principal,
)
from .moments import MomentTable, moment, moment_bound_fit
from .quadrature import QuadratureConfig
from .sectors import SectorSpec
from .weight_sequences import (
    WeightSequence,
    check_dc,
    check_lc,
    check_mg_witness,
    gamma_index_estimate,
)

__version__ = "0.1.0"
