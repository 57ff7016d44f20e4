"""Finite-temperature fidelity and Loschmidt echo for quasi-free fermionic models."""

__version__ = "0.1.0"

from .fidelity import (  # noqa: E402
    FidelityBreakdown,
    bures_distance,
    fidelity_commuting,
    fidelity_diagonal_fermions,
    ground_state_fidelity,
    mode_fidelity,
    mode_partition,
    thermal_fidelity,
)
from .loschmidt import EchoQuery, echo_time_series, ground_state_echo, mode_echo, thermal_echo  # noqa: E402
from .model import (  # noqa: E402
    Grid,
    MomentumMode,
    QuasiFreeModel,
    ThermalStateSpec,
    XYParams,
    lambda_spectrum,
    make_mode,
    xy_to_quasifree,
)
