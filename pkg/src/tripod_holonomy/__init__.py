"""Simulator and analysis toolkit for non-adiabatic holonomic one-qubit
gates on the four-level tripod system."""

__version__ = "0.1.0"

from .analysis import (
    FitResult,
    InputStateSet,
    OptimalPoint,
    SweepCurve,
    bloch_states,
    calibrate_gamma0,
    f_of_tau_relation,
    find_optimal_point,
    fit_noise_response,
    mean_fidelity,
    robustness,
    sweep,
)
from .lindblad import (
    DensityMatrix,
    JumpOperatorSet,
    NoiseModel,
    dissipator_apply,
    evolve_density,
    high_temperature_noise,
    jump_operators,
    loop_channel,
)
from .linalg import EigenSystem, exp_i_hermitian, frobenius_distance, herm_eig
from .loops import (
    ArcKind,
    ArcSegment,
    LoopSpec,
    angles_at,
    optimal_time,
    reverse_loop,
    solid_angle,
    standard_not_loop,
    wedge_loop,
    with_total_time,
)
from .propagators import (
    GatePropagator,
    TransportGenerator,
    adiabatic_gate,
    adiabatic_holonomy,
    arc_propagator,
    holonomy_path_ordered,
    loop_propagator,
    schrodinger_oracle,
    transport_generator,
)
from .tripod import (
    EigenFrame,
    SphericalPoint,
    eigenframe,
    eigenframe_rate,
    hamiltonian,
    rabi_from_angles,
)

__all__ = [
    "ArcKind",
    "ArcSegment",
    "DensityMatrix",
    "EigenFrame",
    "EigenSystem",
    "FitResult",
    "GatePropagator",
    "InputStateSet",
    "JumpOperatorSet",
    "LoopSpec",
    "NoiseModel",
    "OptimalPoint",
    "SphericalPoint",
    "SweepCurve",
    "TransportGenerator",
    "adiabatic_gate",
    "adiabatic_holonomy",
    "angles_at",
    "arc_propagator",
    "bloch_states",
    "calibrate_gamma0",
    "dissipator_apply",
    "eigenframe",
    "eigenframe_rate",
    "evolve_density",
    "exp_i_hermitian",
    "f_of_tau_relation",
    "find_optimal_point",
    "fit_noise_response",
    "frobenius_distance",
    "hamiltonian",
    "herm_eig",
    "high_temperature_noise",
    "holonomy_path_ordered",
    "jump_operators",
    "loop_channel",
    "loop_propagator",
    "mean_fidelity",
    "optimal_time",
    "rabi_from_angles",
    "reverse_loop",
    "robustness",
    "schrodinger_oracle",
    "solid_angle",
    "standard_not_loop",
    "sweep",
    "transport_generator",
    "wedge_loop",
    "with_total_time",
]
