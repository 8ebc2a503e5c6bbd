"""Traveling waves of the driven Frenkel-Kontorova chain with a piecewise
quadratic substrate: semi-analytic wave construction, kinetic relations,
and direct lattice simulation."""

from .params import ModelParams
from .errors import (
    FKWavesError,
    ResonantVelocity,
    RootCountMismatch,
    NotConverged,
    QuadratureFail,
    NoCandidate,
    NullspaceNotRankOne,
    NoAdmissibleWave,
    ProfileRange,
    NumericBlowup,
    NoFront,
    Inconclusive,
    RegimeMismatch,
    NoSignChange,
    NoPositiveRoot,
    TruncationWarning,
)
from .dispersion import (
    Branch,
    RootSet,
    eval_L,
    eval_Lk,
    real_roots,
    complex_roots,
    root_set,
    is_resonant,
    classify_real_root,
    resonance_velocities,
)
from .acwave import (
    ACSolution,
    KernelQuadrature,
    sigma_AC,
    U_profile,
    kernel_q,
    U_integral,
    q_integral,
    quad_kernel,
    ac_admissible,
    ac_solution,
)
from .bifurcation import (
    KernelJet,
    kernel_jet,
    threshold_V0,
    z_linear,
    z_quartic,
    shape_linear,
    shape_quadratic,
)
from .newwave import (
    ShapeFunction,
    KineticPoint,
    WaveSolution,
    build_Q,
    find_z,
    solve_shape,
    assemble_wave,
    check_generalized,
    kinetic_point,
    kinetic_wave,
    kinetic_curve,
)
from .chain import (
    ChainState,
    SimOutcome,
    SweepResult,
    phi,
    phi_prime,
    peierls_stress,
    energy,
    init_riemann,
    init_from_wave,
    front_position,
    step,
    run_and_classify,
    sweep_dynamic_threshold,
)
from ._backend import BACKEND, PURE_ENV_VAR

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "FKWavesError",
    "ResonantVelocity",
    "RootCountMismatch",
    "NotConverged",
    "QuadratureFail",
    "NoCandidate",
    "NullspaceNotRankOne",
    "NoAdmissibleWave",
    "ProfileRange",
    "NumericBlowup",
    "NoFront",
    "Inconclusive",
    "RegimeMismatch",
    "NoSignChange",
    "NoPositiveRoot",
    "TruncationWarning",
    "Branch",
    "RootSet",
    "eval_L",
    "eval_Lk",
    "real_roots",
    "complex_roots",
    "root_set",
    "is_resonant",
    "classify_real_root",
    "resonance_velocities",
    "ACSolution",
    "KernelQuadrature",
    "sigma_AC",
    "U_profile",
    "kernel_q",
    "U_integral",
    "q_integral",
    "quad_kernel",
    "ac_admissible",
    "ac_solution",
    "KernelJet",
    "kernel_jet",
    "threshold_V0",
    "z_linear",
    "z_quartic",
    "shape_linear",
    "shape_quadratic",
    "ShapeFunction",
    "KineticPoint",
    "WaveSolution",
    "build_Q",
    "find_z",
    "solve_shape",
    "assemble_wave",
    "check_generalized",
    "kinetic_point",
    "kinetic_wave",
    "kinetic_curve",
    "ChainState",
    "SimOutcome",
    "SweepResult",
    "phi",
    "phi_prime",
    "peierls_stress",
    "energy",
    "init_riemann",
    "init_from_wave",
    "front_position",
    "step",
    "run_and_classify",
    "sweep_dynamic_threshold",
    "BACKEND",
    "PURE_ENV_VAR",
    "__version__",
]
