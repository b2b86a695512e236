"""Rankine-Hugoniot relations across an oriented discontinuity.

Conventions: the unit normal ``nu`` points from the minus (upstream) side to the
plus (downstream) side, and the tangent is ``nu`` rotated by +90 degrees.  All
velocities are pseudo-velocities v = u - xi evaluated at the interface point.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple

import numpy as np

from .errors import NoPolarError, NoShockError, NumericalError, PreconditionError
from .gas import GasParams, PointState

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
# normal speeds within this relative distance below c count as sonic (rounding)
SONIC_RTOL = 1e-12


def rot90(a):
    a = np.asarray(a, dtype=float)
    return np.stack([-a[..., 1], a[..., 0]], axis=-1)


@dataclass(frozen=True)
class OrientedInterface:
    """Point on a discontinuity with its unit normal and tangent."""

    point: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray = field(init=False)

    def __post_init__(self):
        p = np.array(self.point, dtype=float).reshape(2)
        n = np.array(self.normal, dtype=float).reshape(2)
        norm = math.hypot(n[0], n[1])
        if not np.isfinite(norm) or norm == 0.0:
            raise PreconditionError("interface normal must be a nonzero finite vector")
        n = n / norm
        t = rot90(n)
        for a in (p, n, t):
            a.setflags(write=False)
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "tangent", t)

    @classmethod
    def from_angle(cls, point, angle):
        return cls(point, (math.cos(angle), math.sin(angle)))

    def flipped(self):
        return OrientedInterface(self.point, -self.normal)


class JumpKind(str, Enum):
    SHOCK = "Shock"
    VORTEX_SHEET = "VortexSheet"
    CONTINUOUS = "Continuous"
    INADMISSIBLE = "Inadmissible"


class JumpClassification(NamedTuple):
    kind: JumpKind
    mass_flux: float


def _components(s: PointState, iface: OrientedInterface):
    return float(s.v @ iface.normal), float(s.v @ iface.tangent)


def rh_residual(left: PointState, right: PointState, iface: OrientedInterface,
                params: GasParams) -> np.ndarray:
    """Mass, normal-momentum and tangential-momentum jumps (plus minus minus).

    ``left`` is the minus side, ``right`` the plus side.
    """
    vn_m, vt_m = _components(left, iface)
    vn_p, vt_p = _components(right, iface)
    mass = right.rho * vn_p - left.rho * vn_m
    mom_n = (right.rho * vn_p ** 2 + params.pressure(right.rho)) - (
        left.rho * vn_m ** 2 + params.pressure(left.rho))
    mom_t = right.rho * vn_p * vt_p - left.rho * vn_m * vt_m
    return np.array([mass, mom_n, mom_t])


def _flux_scale(left, right, params):
    s = max(left.rho * float(left.v @ left.v) + params.pressure(left.rho),
            right.rho * float(right.v @ right.v) + params.pressure(right.rho))
    return 1.0 + s


def classify(left: PointState, right: PointState, iface: OrientedInterface,
             params: GasParams, tol: float = DEFAULT_TOL) -> JumpClassification:
    vn_m, _ = _components(left, iface)
    vn_p, _ = _components(right, iface)
    m = left.rho * vn_m
    res = rh_residual(left, right, iface, params)
    if np.max(np.abs(res)) > tol * _flux_scale(left, right, params):
        return JumpClassification(JumpKind.INADMISSIBLE, m)
    drho = abs(right.rho - left.rho)
    if drho <= tol and np.max(np.abs(right.v - left.v)) <= tol:
        return JumpClassification(JumpKind.CONTINUOUS, m)
    if abs(vn_m) <= tol and abs(vn_p) <= tol and drho <= tol:
        return JumpClassification(JumpKind.VORTEX_SHEET, 0.0)
    if vn_m * vn_p > 0 and drho > tol:
        return JumpClassification(JumpKind.SHOCK, m)
    return JumpClassification(JumpKind.INADMISSIBLE, m)


class EntropyReport(NamedTuple):
    ok: bool
    margins: dict


def entropy_admissible(left: PointState, right: PointState, iface: OrientedInterface,
                       params: GasParams, tol: float = DEFAULT_TOL) -> EntropyReport:
    """Strict entropy inequalities for a shock oriented from ``left`` to ``right``.

    Margins (all must be > 0): v-.nu - v+.nu, v+.nu, rho+ - rho-,
    v-.nu - c-, c+ - v+.nu.  A zero-strength (continuous) pair is reported as
    not admissible rather than rejected.
    """
    kind = classify(left, right, iface, params, tol).kind
    if kind not in (JumpKind.SHOCK, JumpKind.CONTINUOUS):
        raise PreconditionError(f"entropy test needs a shock, got {kind.value}")
    vn_m, _ = _components(left, iface)
    vn_p, _ = _components(right, iface)
    margins = {
        "normal_speed_drop": vn_m - vn_p,
        "downstream_normal_positive": vn_p,
        "density_increase": right.rho - left.rho,
        "upstream_supersonic": vn_m - float(params.sound_speed(left.rho)),
        "downstream_subsonic": float(params.sound_speed(right.rho)) - vn_p,
    }
    return EntropyReport(all(v > 0 for v in margins.values()), margins)


def entropy_flux_jump(left: PointState, right: PointState, iface: OrientedInterface,
                      params: GasParams) -> float:
    """[(rho|v|^2/2 + rho e + p) v.nu], plus side minus minus side."""
    def flux(s):
        q = 0.5 * s.rho * float(s.v @ s.v) + s.rho * params.internal_energy(s.rho) \
            + params.pressure(s.rho)
        return q * float(s.v @ iface.normal)
    return flux(right) - flux(left)


def _divided_pressure(rho, rho_m, params):
    """(p(rho) - p(rho_m)) / (rho - rho_m) without cancellation."""
    d = rho - rho_m
    if d == 0.0:
        return float(params.sound_speed(rho_m)) ** 2
    g = params.gamma
    return params.pressure(rho_m) * math.expm1(g * math.log1p(d / rho_m)) / d


def downstream_state(upstream: PointState, iface: OrientedInterface, params: GasParams,
                     max_doublings: int = 60) -> PointState:
    """Compressive state behind a shock with upstream ``upstream``.

    Solves m^2/rho + p(rho) = m^2/rho- + p(rho-) for rho > rho-, m = rho- v-.nu,
    keeps the tangential pseudo-velocity and sets v+.nu = m/rho+.
    """
    rho_m = upstream.rho
    vn, vt = _components(upstream, iface)
    c_m = float(params.sound_speed(rho_m))
    if vn < c_m * (1.0 - SONIC_RTOL):
        raise NoShockError(
            f"upstream normal pseudo-speed {vn:.6g} is below the sound speed {c_m:.6g}")
    if vn <= c_m:
        return PointState(rho_m, upstream.v.copy())
    m = rho_m * vn
    g = params.gamma

    def G(rho):
        return -m * m / (rho * rho_m) + _divided_pressure(rho, rho_m, params)

    lo = rho_m
    mach = vn / c_m
    hi = rho_m * (1.0 + (g + 1.0) / (g - 1.0)) * max(1.0, mach)
    n_double = 0
    while G(hi) <= 0.0:
        if n_double >= max_doublings or hi > 1e6 * rho_m:
            raise NumericalError("no sign change for the downstream density",
                                 {"rho_minus": rho_m, "vn": vn, "upper": hi})
        if n_double == 0:
            log.info("downstream bracket doubling triggered (rho-=%g, M=%g)", rho_m, mach)
        hi *= 2.0
        n_double += 1

    it = 0
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if G(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        it += 1
        if it > 400:
            raise NumericalError("bisection did not converge",
                                 {"lo": lo, "hi": hi, "iterations": it})
    rho = 0.5 * (lo + hi)

    p_m = params.pressure(rho_m)

    def F(r):
        return m * m / r + params.pressure(r) - m * m / rho_m - p_m

    f = F(rho)
    for _ in range(3):
        df = -m * m / rho ** 2 + float(params.sound_speed(rho)) ** 2
        if df <= 0.0:
            break
        trial = rho - f / df
        if not (lo <= trial <= hi):
            break
        ft = F(trial)
        if abs(ft) >= abs(f):
            break
        rho, f = trial, ft
    vn_p = m / rho
    return PointState(rho, vn_p * iface.normal + vt * iface.tangent)


@dataclass(frozen=True)
class PolarEntry:
    beta: float
    iface: OrientedInterface
    downstream: PointState
    entropy_ok: bool


def shock_polar(upstream: PointState, params: GasParams, n_samples: int = 181,
                point=(0.0, 0.0)) -> List[PolarEntry]:
    """Downstream states over all admissible shock orientations.

    ``beta`` is the angle between the shock line and the upstream pseudo-velocity,
    so v-.nu = |v-| sin(beta) and beta ranges over [asin(c/|v|), pi - asin(c/|v|)].
    The endpoints are zero-strength shocks.
    """
    q = float(np.hypot(*upstream.v))
    c = float(params.sound_speed(upstream.rho))
    if q <= c:
        raise NoPolarError(f"upstream pseudo-speed {q:.6g} does not exceed c={c:.6g}")
    if n_samples < 2:
        raise PreconditionError("need at least two polar samples")
    b0 = math.asin(c / q)
    base = math.atan2(upstream.v[1], upstream.v[0])
    out = []
    for beta in np.linspace(b0, math.pi - b0, n_samples):
        iface = OrientedInterface.from_angle(point, base + 0.5 * math.pi - beta)
        down = downstream_state(upstream, iface, params)
        ok = entropy_admissible(upstream, down, iface, params).ok
        out.append(PolarEntry(float(beta), iface, down, ok))
    return out


POLAR_COLUMNS = ("beta_rad", "rho_plus", "vnu_plus", "vtau_plus", "p_plus", "entropy_ok")


def write_polar_csv(entries, params: GasParams, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POLAR_COLUMNS)
        for e in entries:
            d = e.downstream
            w.writerow([repr(e.beta), repr(d.rho), repr(float(d.v @ e.iface.normal)),
                        repr(float(d.v @ e.iface.tangent)),
                        repr(float(params.pressure(d.rho))), int(e.entropy_ok)])
