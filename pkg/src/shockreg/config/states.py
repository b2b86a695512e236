"""Uniform-state solvers: incident shock, corner (two-shock) reflections,
critical wedge angles, the normal reflection state and four-shock data."""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..errors import DetachedError, GeometryError, NumericalError, PreconditionError
from ..gas import ConstantState, GasParams, PointState
from ..jump import OrientedInterface, downstream_state

SCAN_ANGLES = 200


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _rot(a, ang):
    c, s = math.cos(ang), math.sin(ang)
    return np.array([c * a[0] - s * a[1], s * a[0] + c * a[1]])


def jump_speed(rho_a, rho_b, params: GasParams) -> float:
    """sqrt((p_b - p_a)(rho_b - rho_a) / (rho_a rho_b)), the velocity jump across a planar shock."""
    dp = params.pressure(rho_b) - params.pressure(rho_a)
    return math.sqrt(dp * (rho_b - rho_a) / (rho_a * rho_b))


class IncidentShock(NamedTuple):
    u1: float
    xi1_0: float


def incident_shock_setup(rho0, rho1, params: GasParams) -> IncidentShock:
    """Vertical shock xi1 = xi1_0 between state (0) at rest and state (1) moving right."""
    if not (rho1 > rho0 > 0):
        raise PreconditionError(
            f"no compressive incident shock: need rho1 > rho0 > 0, got rho0={rho0}, rho1={rho1}")
    u1 = jump_speed(rho0, rho1, params)
    return IncidentShock(u1, rho1 * u1 / (rho1 - rho0))


@dataclass(frozen=True)
class Reflection:
    """Constant state behind a straight reflected shock through ``iface.point``."""

    state: ConstantState
    iface: OrientedInterface
    upstream: ConstantState

    @property
    def point(self):
        return self.iface.point

    def pseudo_speed(self):
        return float(np.hypot(*(self.state.u - self.point)))

    def mach(self, params: GasParams):
        return self.pseudo_speed() / self.state.sound_speed(params)

    def supersonic(self, params: GasParams):
        return self.mach(params) > 1.0


class CornerSolution(NamedTuple):
    weak: Reflection
    strong: Reflection


class _Polar:
    """Deflection of the pseudo-flow across a shock as a function of the normal angle."""

    def __init__(self, upstream: ConstantState, point, params):
        self.up = upstream
        self.point = np.asarray(point, float)
        self.params = params
        self.v = upstream.u - self.point
        self.q = float(np.hypot(*self.v))
        self.c = upstream.sound_speed(params)
        self.vhat = self.v / self.q
        self.B = math.acos(min(1.0, self.c / self.q)) if self.q > self.c else 0.0

    def iface(self, s):
        return OrientedInterface(self.point, _rot(self.vhat, s))

    def downstream(self, s):
        it = self.iface(s)
        return it, downstream_state(PointState(self.up.rho, self.v), it, self.params)

    def deflection(self, s):
        _, d = self.downstream(s)
        return math.atan2(_cross(self.v, d.v), float(self.v @ d.v))


def _wall_target(v, wall_dir):
    t = np.asarray(wall_dir, float)
    t = t / np.hypot(*t)
    if float(t @ v) < 0:
        t = -t
    return t, math.atan2(_cross(v, t), float(v @ t))


def corner_margin(upstream: ConstantState, point, wall_dir, params) -> float:
    """max |deflection| minus the deflection needed to flow along the wall.

    Positive iff a regular reflection (two roots) exists; a subsonic upstream
    gives the negative value -(c - |v|)/c - |target|.
    """
    pol = _Polar(upstream, point, params)
    _, target = _wall_target(pol.v, wall_dir)
    if pol.q <= pol.c:
        return -(pol.c - pol.q) / pol.c - abs(target)
    side = 1.0 if pol.deflection(0.5 * pol.B) * target > 0 else -1.0
    res = minimize_scalar(lambda s: -abs(pol.deflection(side * s)), bounds=(0.0, pol.B),
                          method="bounded", options={"xatol": 1e-12})
    return -float(res.fun) - abs(target)


def solve_corner(upstream: ConstantState, point, wall_dir, params: GasParams) -> CornerSolution:
    """Both straight-shock corner states whose velocity slides along the wall.

    The wall passes through ``point`` with direction ``wall_dir``; the slip
    condition is (u - point).n_w = 0.  Raises DetachedError when no root exists.
    """
    pol = _Polar(upstream, point, params)
    if pol.q <= pol.c:
        raise DetachedError(
            f"upstream pseudo-flow is subsonic at the corner (|v|={pol.q:.6g} <= c={pol.c:.6g})")
    t_w, target = _wall_target(pol.v, wall_dir)
    if abs(target) < 1e-14:
        raise PreconditionError("upstream pseudo-flow already slides along the wall")
    side = 1.0 if pol.deflection(0.5 * pol.B) * target > 0 else -1.0

    def g(s):
        return pol.deflection(side * s) - target

    res = minimize_scalar(lambda s: -abs(pol.deflection(side * s)), bounds=(0.0, pol.B),
                          method="bounded", options={"xatol": 1e-12})
    s_star = float(res.x)
    if -res.fun < abs(target):
        raise DetachedError(
            f"wall deflection {abs(target):.6g} rad exceeds the maximal shock deflection "
            f"{-res.fun:.6g} rad: the corner is detached")
    out = []
    for a, b in ((0.0, s_star), (s_star, pol.B)):
        ga, gb = g(a), g(b)
        if ga == 0.0:
            s = a
        elif gb == 0.0:
            s = b
        elif ga * gb > 0:
            s = s_star  # tangency (detachment) within rounding
        else:
            s = brentq(g, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200)
        it, d = pol.downstream(side * s)
        out.append(Reflection(ConstantState(d.rho, d.v + pol.point), it, upstream))
    strong, weak = out
    if weak.state.rho > strong.state.rho:
        weak, strong = strong, weak
    return CornerSolution(weak, strong)


def reflection_point(rho0, rho1, params, theta_w):
    inc = incident_shock_setup(rho0, rho1, params)
    return inc, np.array([inc.xi1_0, inc.xi1_0 * math.tan(theta_w)])


def solve_state2(rho0, rho1, params: GasParams, wedge_angle) -> CornerSolution:
    """Weak and strong state (2) at the reflection point on the wedge."""
    if not (0.0 < wedge_angle < 0.5 * math.pi):
        raise PreconditionError(f"wedge angle must lie in (0, pi/2), got {wedge_angle}")
    inc, P0 = reflection_point(rho0, rho1, params, wedge_angle)
    state1 = ConstantState(rho1, (inc.u1, 0.0))
    wall = (math.cos(wedge_angle), math.sin(wedge_angle))
    return solve_corner(state1, P0, wall, params)


@dataclass(frozen=True)
class CriticalAngles:
    """Detachment and sonic angles of a one-parameter corner problem.

    ``existence_interval`` is the angle range with two corner roots;
    ``supersonic_side`` says whether the weak state is supersonic at the corner
    for angles "above" or "below" the sonic angle.
    """

    detachment: float
    sonic: float
    existence_interval: Tuple[float, float]
    supersonic_side: str
    sonic_one_sided: bool = False


CornerProblem = Callable[[float], Tuple[ConstantState, np.ndarray, np.ndarray]]


def _regular_reflection_problem(rho0, rho1, params) -> CornerProblem:
    inc = incident_shock_setup(rho0, rho1, params)
    state1 = ConstantState(rho1, (inc.u1, 0.0))

    def problem(th):
        P0 = np.array([inc.xi1_0, inc.xi1_0 * math.tan(th)])
        return state1, P0, np.array([math.cos(th), math.sin(th)])
    return problem


def _scan(fun, lo, hi, n):
    angles = np.linspace(lo, hi, n + 2)[1:-1]
    return angles, np.array([fun(a) for a in angles])


def _bisect(fun, a, b, tol):
    fa = fun(a)
    it = 0
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = fun(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
        it += 1
        if it > 200:
            break
    return 0.5 * (a + b), a, b


def detachment_from_problem(problem: CornerProblem, params, tol=1e-12):
    """Returns (theta_d, existence_interval)."""
    def margin(th):
        up, P, wall = problem(th)
        return corner_margin(up, P, wall, params)

    angles, vals = _scan(margin, 0.0, 0.5 * math.pi, SCAN_ANGLES)
    pos = vals > 0
    flips = np.nonzero(pos[1:] != pos[:-1])[0]
    if len(flips) != 1:
        raise NumericalError("detachment bracket not found",
                             {"angles": angles.tolist(), "margins": vals.tolist()})
    k = int(flips[0])
    th, a, b = _bisect(margin, float(angles[k]), float(angles[k + 1]), tol)
    if pos[k + 1]:
        return b, (b, 0.5 * math.pi)
    return a, (0.0, a)


def sonic_from_problem(problem: CornerProblem, params, interval, tol=1e-12):
    """Root of |v2(P)| - c2 along the weak branch inside ``interval``."""
    lo, hi = interval

    def m(th):
        up, P, wall = problem(th)
        w = solve_corner(up, P, wall, params).weak
        return w.pseudo_speed() - w.state.sound_speed(params)

    span = hi - lo
    angles, vals = _scan(m, lo + 1e-9 * span, hi - 1e-9 * span, SCAN_ANGLES)
    pos = vals > 0
    flips = np.nonzero(pos[1:] != pos[:-1])[0]
    near_d = lo if interval[1] == 0.5 * math.pi else hi
    if len(flips) == 0:
        return near_d, ("above" if pos[-1] else "below"), True
    k = int(flips[-1]) if interval[1] == 0.5 * math.pi else int(flips[0])
    a, b = float(angles[k]), float(angles[k + 1])
    th, a, b = _bisect(m, a, b, tol)
    side = "above" if pos[k + 1] else "below"
    return (b if side == "above" else a), side, False


def critical_angles(problem: CornerProblem, params) -> CriticalAngles:
    th_d, interval = detachment_from_problem(problem, params)
    th_s, side, one_sided = sonic_from_problem(problem, params, interval)
    return CriticalAngles(th_d, th_s, interval, side, one_sided)


def detachment_angle(rho0, rho1, params: GasParams) -> float:
    return detachment_from_problem(_regular_reflection_problem(rho0, rho1, params), params)[0]


def sonic_angle(rho0, rho1, params: GasParams) -> CriticalAngles:
    """Sonic angle of the weak state (2) together with the detachment data."""
    return critical_angles(_regular_reflection_problem(rho0, rho1, params), params)


def regular_reflection_angles(rho0, rho1, params):
    return sonic_angle(rho0, rho1, params)


def prandtl_problem(rho_inf, u_inf, params) -> CornerProblem:
    state = ConstantState(rho_inf, (u_inf, 0.0))

    def problem(th):
        return state, np.zeros(2), np.array([math.cos(th), math.sin(th)])
    return problem


class NormalReflection(NamedTuple):
    state: ConstantState
    offset: float          # shock line: xi . n_w = offset
    normal: np.ndarray     # n_w, unit normal of the ramp pointing into the flow


def normal_reflection(upstream: ConstantState, wall_dir, params: GasParams) -> NormalReflection:
    """State (N): velocity along the ramp, shock parallel to the ramp.

    With w = -u_inf.n_w > 0 the normal speed toward the ramp, the offset is
    s = rho_inf w / (rho_N - rho_inf) and rho_N solves
    (p_N - p_inf)(rho_N - rho_inf) = rho_inf rho_N w^2.
    """
    t = np.asarray(wall_dir, float)
    t = t / np.hypot(*t)
    n = np.array([-t[1], t[0]])
    w = -float(upstream.u @ n)
    if w <= 0:
        raise PreconditionError("flow does not approach the ramp; no normal reflection")
    r0 = upstream.rho
    p0 = params.pressure(r0)

    def f(r):
        return (params.pressure(r) - p0) * (r - r0) - r0 * r * w * w

    hi = 2 * r0
    while f(hi) <= 0:
        hi *= 2
        if hi > 1e8 * r0:
            raise NumericalError("normal reflection density not bracketed", {"w": w})
    rN = brentq(f, r0 * (1 + 1e-15), hi, xtol=1e-15, rtol=8.9e-16)
    s = r0 * w / (rN - r0)
    return NormalReflection(ConstantState(rN, float(upstream.u @ t) * t), s, n)


class FourShockStates(NamedTuple):
    states: dict           # '1', '2', '3', '4'
    sigma12: float
    sigma32: float
    nu12: np.ndarray
    nu32: np.ndarray
    P1: np.ndarray
    P4: np.ndarray


def four_shock_states(rho1, rho2, theta1, theta2, params: GasParams, b=0.0) -> FourShockStates:
    """Symmetric four-shock Riemann data.

    States (2) and (4) are mirror images, u2 = (b, d) with d < 0, states (1) and
    (3) move along the symmetry axis.  S12 has normal (-sin t1, cos t1) from (1)
    to (2), S32 has normal (sin t2, cos t2) from (3) to (2).
    """
    if not (rho2 > rho1 > 0):
        raise PreconditionError("four-shock data need rho2 > rho1 > 0")
    for th in (theta1, theta2):
        if not (0 < th < 0.5 * math.pi):
            raise PreconditionError("four-shock angles must lie in (0, pi/2)")
    J12 = jump_speed(rho1, rho2, params)
    d = -J12 * math.cos(theta1)
    J32 = J12 * math.cos(theta1) / math.cos(theta2)
    rho3 = brentq(lambda r: jump_speed(r, rho2, params) - J32, 1e-12 * rho2, rho2 * (1 - 1e-15),
                  xtol=1e-15, rtol=8.9e-16)
    u2 = np.array([b, d])
    s1 = ConstantState(rho1, (b + d * math.tan(theta1), 0.0))
    s2 = ConstantState(rho2, u2)
    s3 = ConstantState(rho3, (b - d * math.tan(theta2), 0.0))
    s4 = ConstantState(rho2, (b, -d))
    nu12 = np.array([-math.sin(theta1), math.cos(theta1)])
    nu32 = np.array([math.sin(theta2), math.cos(theta2)])
    m12 = rho1 * rho2 * J12 / (rho2 - rho1)
    m32 = rho3 * rho2 * J32 / (rho2 - rho3)
    sigma12 = float(s1.u @ nu12) - m12 / rho1
    sigma32 = float(s3.u @ nu32) - m32 / rho3
    P1 = np.array([-sigma12 / math.sin(theta1), 0.0])
    P4 = np.array([sigma32 / math.sin(theta2), 0.0])
    if not P1[0] > P4[0]:
        raise GeometryError("interaction points are not ordered along the axis")
    return FourShockStates({"1": s1, "2": s2, "3": s3, "4": s4}, sigma12, sigma32, nu12, nu32, P1, P4)


def four_shock_problem(rho1, rho2, theta2, params, which="P1") -> CornerProblem:
    """Corner problem at P1 (angle theta1 varies) or P4 (theta2 varies)."""
    def problem(th):
        t1, t2 = (th, theta2) if which == "P1" else (theta2, th)
        fs = four_shock_states(rho1, rho2, t1, t2, params)
        P = fs.P1 if which == "P1" else fs.P4
        return fs.states["2"], P, np.array([1.0, 0.0])
    return problem
