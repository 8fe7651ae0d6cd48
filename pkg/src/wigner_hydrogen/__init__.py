"""Wigner functions of hydrogen bound states (n <= 2) from one generating integral."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .core import (Config, ConvergenceFailure, FeynmanParams, PhasePoint, QuantumNumbers,
                   UnsupportedState, WignerHydrogenError, load_config)
from .hai import DerivOrder, HaiRequest, HaiValue, hai_eval
from .oracle import OracleSettings, ToleranceNotMet, oracle_eval
from .states import WavefunctionPair, psi_mom, psi_pos
from .wigner import (WignerValue, marginal_momentum, marginal_position, normalization,
                     operator_catalog, wigner_eval, wigner_many)

__all__ = [
    "Config", "ConvergenceFailure", "DerivOrder", "FeynmanParams", "HaiRequest", "HaiValue",
    "OracleSettings", "PhasePoint", "QuantumNumbers", "ToleranceNotMet", "UnsupportedState",
    "WavefunctionPair", "WignerHydrogenError", "WignerValue", "hai_eval", "load_config",
    "marginal_momentum", "marginal_position", "normalization", "operator_catalog",
    "oracle_eval", "psi_mom", "psi_pos", "wigner_eval", "wigner_many",
]
