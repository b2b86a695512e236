"""Equation of state for the scaled isentropic polytropic gas.

With the scaling p = rho**gamma / gamma the sound speed is
c = rho**((gamma-1)/2) and the enthalpy h(rho) = (rho**(gamma-1) - 1)/(gamma-1),
so that c**2 = (gamma-1) h + 1.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError

RHO_FLOOR = 1e-14


def _check_rho(rho):
    r = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r <= RHO_FLOOR):
        raise DomainError(f"density must be > {RHO_FLOOR:g}, got {rho!r}")
    return r


@dataclass(frozen=True)
class GasParams:
    gamma: float = 1.4

    def __post_init__(self):
        g = float(self.gamma)
        if not np.isfinite(g) or g <= 1.0:
            raise DomainError(f"adiabatic exponent must exceed 1, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)

    def pressure(self, rho):
        return np.power(rho, self.gamma) / self.gamma

    def sound_speed(self, rho):
        return np.power(rho, 0.5 * (self.gamma - 1.0))

    def enthalpy(self, rho):
        g1 = self.gamma - 1.0
        return np.expm1(g1 * np.log(rho)) / g1

    def internal_energy(self, rho):
        g = self.gamma
        return np.power(rho, g - 1.0) / (g * (g - 1.0))


class EOSRecord(NamedTuple):
    p: float
    h: float
    c: float
    e: float


def eos(rho, params: GasParams) -> EOSRecord:
    """Pressure, enthalpy, sound speed and internal energy at density ``rho``.

    Works elementwise on arrays.
    """
    r = _check_rho(rho)
    if r.ndim == 0:
        r = float(r)
    return EOSRecord(params.pressure(r), params.enthalpy(r),
                     params.sound_speed(r), params.internal_energy(r))


def _vec2(x, name):
    a = np.array(x, dtype=float).reshape(-1)
    if a.shape != (2,) or not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be a finite 2-vector, got {x!r}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ConstantState:
    """Uniform state: density and constant velocity u.  Pseudo-velocity is u - xi."""

    rho: float
    u: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "rho", float(_check_rho(self.rho)))
        object.__setattr__(self, "u", _vec2(self.u, "u"))

    def at(self, xi) -> "PointState":
        return PointState(self.rho, pseudo_velocity(self, xi))

    def sound_speed(self, params: GasParams) -> float:
        return float(params.sound_speed(self.rho))

    def mirrored(self) -> "ConstantState":
        """Reflection across the xi1 axis."""
        return ConstantState(self.rho, (self.u[0], -self.u[1]))

    def __eq__(self, other):
        if not isinstance(other, ConstantState):
            return NotImplemented
        return self.rho == other.rho and bool(np.all(self.u == other.u))

    def __hash__(self):
        return hash((self.rho, tuple(self.u)))


@dataclass(frozen=True)
class PointState:
    """Density and pseudo-velocity at a single point."""

    rho: float
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", float(_check_rho(self.rho)))
        object.__setattr__(self, "v", _vec2(self.v, "v"))

    def __eq__(self, other):
        if not isinstance(other, PointState):
            return NotImplemented
        return self.rho == other.rho and bool(np.all(self.v == other.v))

    def __hash__(self):
        return hash((self.rho, tuple(self.v)))


def pseudo_velocity(state: ConstantState, xi) -> np.ndarray:
    """v = u - xi.  ``xi`` may be a single point or an (..., 2) array."""
    return state.u - np.asarray(xi, dtype=float)
