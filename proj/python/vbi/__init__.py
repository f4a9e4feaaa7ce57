"""Vehicle-bridge interaction simulation: coupled and decoupled drivers,
closed-form 2-DOF theory, accuracy metrics."""

from ._vbi import (
    BridgeSpec,
    ConvergenceError,
    QuarterCarSpec,
    TheoryConfig,
    compare,
    coupled_amplitude,
    eigen_approx,
    exact_oracle,
    modal_frequencies,
    mse_freq,
    mse_time,
    parametric_sweep,
    reference_bridge,
    simulate,
    uncoupled_amplitude,
    validate,
    vehicle_frequencies,
    vehicle_preset,
    __version__,
)

__all__ = [
    "BridgeSpec",
    "ConvergenceError",
    "QuarterCarSpec",
    "TheoryConfig",
    "compare",
    "coupled_amplitude",
    "eigen_approx",
    "exact_oracle",
    "modal_frequencies",
    "mse_freq",
    "mse_time",
    "parametric_sweep",
    "reference_bridge",
    "simulate",
    "uncoupled_amplitude",
    "validate",
    "vehicle_frequencies",
    "vehicle_preset",
]
