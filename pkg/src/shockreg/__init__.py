"""Self-similar shock configurations of the isentropic Euler system and
numerical checks of the identities used in their regularity analysis."""

from .gas import GasParams, ConstantState, PointState, eos, pseudo_velocity

__all__ = ["GasParams", "ConstantState", "PointState", "eos", "pseudo_velocity"]
__version__ = "0.1.0"
