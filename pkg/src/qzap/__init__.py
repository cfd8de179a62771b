"""Quantum-lattice calculus, almost-periodicity analysis and Hopfield solvers.

The package works on the point set {q**n} u {0} addressed by integer
exponents, provides the exact transport to the unit-step scale and back,
detects epsilon-almost periods of signals by brute-force window scans,
and computes the unique almost periodic trajectory of high-order
Hopfield networks by certified contraction iteration.
"""

from ._kernels import ACTIVE as kernel_backend
from .apgen import (
    ApClassification,
    ApGenerator,
    SplitReport,
    TranslationReport,
    ap_classify,
    asymptotic_split_check,
    sup_translation_diff,
    translate,
    translation_set,
    weighted_translate,
)
from .dynamics import (
    DynamicSystem,
    IntDelay,
    LyapunovSpec,
    dini_derivative_V,
    lyapunov_verify,
    solve_forward,
    stability_probe,
    trajectory_residual,
)
from .errors import (
    ConvergenceError,
    DivergenceError,
    InfeasibleCertificateError,
    OverflowGuardError,
    QzapError,
    RegressivityError,
    SchemaError,
    UndefinedAtZeroError,
    WindowError,
)
from .hopfield import (
    Activation,
    ContractionCertificate,
    ConvergenceLog,
    HopfieldSpec,
    as_dynamic_system,
    back_to_quantum,
    certificate,
    feasible_r0_interval,
    no_delays,
    phi_apply,
    picard_solve,
    residual,
    tail_length,
)
from .lattice import (
    NEG_INF_Q,
    GridFunction,
    GronwallReport,
    QLattice,
    ZLattice,
    gronwall_verify,
    mu,
    q_derivative,
    q_derivative_function,
    q_integral,
    qpow,
    rho,
    sigma,
    ts_exponential,
)
from .logmap import LogSignal, lift, lower, transform_rhs

__version__ = "0.1.0"
