"""Builders for the four families of self-similar configurations.

Conventions shared by all builders: the boundary of Omega is a
counterclockwise loop; each curved interior shock is a cubic Hermite arc whose
end tangents match the straight shocks (or walls) it connects to, with
derivative magnitudes ``shock_scale`` times the chord length.
"""

import math

import numpy as np
from shapely.geometry import Polygon

from ..errors import GeometryError, PreconditionError
from ..gas import ConstantState, GasParams
from .curves import CircularArc, CubicHermite, CurveKind, LineSegment, Polyline
from .model import Configuration, Region, SonicCircle, StraightShock
from .states import (four_shock_states, incident_shock_setup, normal_reflection,
                     solve_corner, solve_state2)

KINDS = ("RegularReflectionSym", "RegularReflectionNonsym", "Prandtl", "Lighthill", "FourShock")


def _unit(a):
    a = np.asarray(a, float)
    return a / np.hypot(*a)


def _probe(poly):
    q = Polygon(poly).representative_point()
    return np.array([q.x, q.y])


def _mirror(p):
    p = np.asarray(p, float)
    return np.array([p[0], -p[1]])


def ray_circle(p, d, center, r):
    """Smallest t > 0 with |p + t d - center| = r, or None."""
    p, d, c = (np.asarray(a, float) for a in (p, d, center))
    f = p - c
    a = float(d @ d)
    b = 2 * float(f @ d)
    cc = float(f @ f) - r * r
    disc = b * b - 4 * a * cc
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    ts = sorted(((-b - sq) / (2 * a), (-b + sq) / (2 * a)))
    for t in ts:
        if t > 1e-14:
            return t
    return None


def _shock_direction(iface, away):
    """Unit direction along the straight shock through iface.point with positive dot on ``away``."""
    t = iface.tangent
    return t if float(t @ away) > 0 else -t


class _Corner:
    """A regular-reflection corner on a wall through the origin (or any wall line).

    wall_out: unit wall direction pointing from the wedge vertex toward the
    reflection point; into: unit normal of the wall pointing into the flow.
    """

    def __init__(self, refl, wall_out, into, params, label):
        self.refl = refl
        self.label = label
        self.P = refl.point
        self.state = refl.state
        self.c = refl.state.sound_speed(params)
        self.d = _shock_direction(refl.iface, into)
        self.supersonic = refl.supersonic(params)
        if self.supersonic:
            t = ray_circle(self.P, self.d, self.state.u, self.c)
            if t is None:
                raise GeometryError(f"reflected shock misses the sonic circle of state ({label})")
            self.shock_end = self.P + t * self.d
            self.wall_point = self.state.u + self.c * wall_out
        else:
            self.shock_end = self.P.copy()
            self.wall_point = self.P.copy()

    def polygon(self, n=64):
        if not self.supersonic:
            return None
        arc = CircularArc.between(self.state.u, self.c, self.shock_end, self.wall_point)
        return np.vstack([self.P[None], arc.point(np.linspace(0, 1, n))])

    def arc(self, name, reverse=False):
        a, b = (self.wall_point, self.shock_end)
        if reverse:
            a, b = b, a
        return CircularArc.between(self.state.u, self.c, a, b, name=name,
                                   meta={"state": self.label})


def _split(seg):
    if isinstance(seg, Polyline) and len(seg.pts) == 3:
        return [LineSegment(seg.pts[0], seg.pts[1], seg.kind, seg.name + "_a", seg.meta),
                LineSegment(seg.pts[1], seg.pts[2], seg.kind, seg.name + "_b", seg.meta)]
    if isinstance(seg, LineSegment):
        m = 0.5 * (seg.a + seg.b)
        return [LineSegment(seg.a, m, seg.kind, seg.name + "_a", seg.meta),
                LineSegment(m, seg.b, seg.kind, seg.name + "_b", seg.meta)]
    if isinstance(seg, CubicHermite):
        return [seg.restricted(0, 0.5, name=seg.name + "_a"), seg.restricted(0.5, 1, name=seg.name + "_b")]
    if isinstance(seg, CircularArc):
        m = 0.5 * (seg.theta0 + seg.theta1)
        return [CircularArc(seg.center, seg.radius, seg.theta0, m, seg.kind, seg.name + "_a", seg.meta),
                CircularArc(seg.center, seg.radius, m, seg.theta1, seg.kind, seg.name + "_b", seg.meta)]
    raise GeometryError(f"cannot split {seg!r}")


def _convex_vertex(poly):
    a, b, c = poly.pts[:3]
    u, w = b - a, c - b
    return float(u[0] * w[1] - u[1] * w[0]) > 0


def four_sides(loop):
    """Reduce or refine a ccw loop to exactly four sides for the Coons patch.

    Consecutive wall segments are merged into one polyline; if fewer than four
    pieces remain, polylines are split at their corner first, then the longest piece.
    """
    pieces = list(loop)
    merged = []
    for seg in pieces:
        if merged and seg.kind == CurveKind.STRAIGHT_WALL and merged[-1].kind == CurveKind.STRAIGHT_WALL \
                and isinstance(seg, LineSegment) and isinstance(merged[-1], LineSegment):
            prev = merged.pop()
            merged.append(Polyline([prev.a, prev.b, seg.b], CurveKind.STRAIGHT_WALL, prev.name + "+" + seg.name))
        else:
            merged.append(seg)
    if len(merged) > 4 and merged[0].kind == CurveKind.STRAIGHT_WALL and merged[-1].kind == CurveKind.STRAIGHT_WALL:
        first, last = merged[0], merged.pop()
        merged[0] = Polyline([last.start, last.end, first.end], CurveKind.STRAIGHT_WALL,
                             last.name + "+" + first.name)
    while len(merged) < 4:
        poly = [i for i, s in enumerate(merged) if isinstance(s, Polyline) and _convex_vertex(s)]
        i = poly[0] if poly else int(np.argmax([s.length() for s in merged]))
        merged[i:i + 1] = _split(merged[i])
    if len(merged) != 4:
        raise GeometryError(f"Omega boundary has {len(merged)} sides after merging walls")
    return merged


def _hermite(p0, p1, tau0, tau1, scale, straight, upstream, name="shock"):
    meta = {"upstream": upstream}
    if straight:
        return LineSegment(p0, p1, CurveKind.STRAIGHT_SHOCK, name, meta)
    h = CubicHermite.from_tangents(p0, p1, tau0, tau1, scale, kind=CurveKind.CURVED_SHOCK,
                                   name=name, meta=meta)
    return h


def axis_scale(p0, p1, tau0, tau1, x_target):
    """Hermite scale putting the curve midpoint at abscissa x_target."""
    p0, p1, tau0, tau1 = (np.asarray(a, float) for a in (p0, p1, tau0, tau1))
    L = float(np.hypot(*(p1 - p0)))
    den = 0.125 * L * (_unit(tau0)[0] - _unit(tau1)[0])
    if den >= 0:
        raise GeometryError("shock end tangents do not bend toward the upstream side")
    lam = (x_target - 0.5 * (p0[0] + p1[0])) / den
    if lam <= 0:
        raise GeometryError("target abscissa lies on the wrong side of the shock chord")
    return lam


def _rr_target(inc, params, rho1):
    """Default abscissa where the reflected shock crosses the axis: u1 - 1.5 c1."""
    return inc.u1 - 1.5 * float(params.sound_speed(rho1))


def _rr_upper_corner(rho0, rho1, theta_w, params, label="2"):
    sol = solve_state2(rho0, rho1, params, theta_w)
    tw = np.array([math.cos(theta_w), math.sin(theta_w)])
    nw = np.array([-tw[1], tw[0]])
    return sol, _Corner(sol.weak, tw, nw, params, label), tw, nw


def _mirror_corner(c: "_Corner", label):
    """Mirror image of an upper corner across the xi1 axis (used for the lower wedge)."""
    m = _Corner.__new__(_Corner)
    m.refl, m.label = c.refl, label
    m.P, m.state, m.c = _mirror(c.P), c.state.mirrored(), c.c
    m.d, m.supersonic = _mirror(c.d), c.supersonic
    m.shock_end, m.wall_point = _mirror(c.shock_end), _mirror(c.wall_point)
    return m


def build_regular_reflection_nonsym(params: GasParams, rho0, rho1, theta_w1, theta_w2,
                                    shock_scale=None, straight_shock=False) -> Configuration:
    """Wedge with upper half-angle theta_w1 and lower half-angle theta_w2.

    With ``shock_scale=None`` the cubic shock is scaled so that its midpoint
    lies at u1 - 1.5 c1, where state (1) is pseudo-supersonic.
    """
    inc = incident_shock_setup(rho0, rho1, params)
    sol_u, up, tw1, nw1 = _rr_upper_corner(rho0, rho1, theta_w1, params, "2")
    sol_l, lo_mirror, _, _ = _rr_upper_corner(rho0, rho1, theta_w2, params, "3")
    lo = _mirror_corner(lo_mirror, "3")
    s0 = ConstantState(rho0, (0.0, 0.0))
    s1 = ConstantState(rho1, (inc.u1, 0.0))
    origin = np.zeros(2)
    if shock_scale is None:
        shock_scale = axis_scale(up.shock_end, lo.shock_end, up.d, -lo.d, _rr_target(inc, params, rho1))
    shock = _hermite(up.shock_end, lo.shock_end, up.d, -lo.d, shock_scale, straight_shock, "1")
    loop, ext, intr = [], [], [shock]
    w1 = LineSegment(origin, up.wall_point, CurveKind.STRAIGHT_WALL, "wedge1")
    loop.append(w1)
    ext.append(w1)
    if up.supersonic:
        a2 = up.arc("sonic2")
        loop.append(a2)
        intr.append(a2)
    loop.append(shock)
    if lo.supersonic:
        a3 = lo.arc("sonic3", reverse=True)
        loop.append(a3)
        intr.append(a3)
    w2 = LineSegment(lo.wall_point, origin, CurveKind.STRAIGHT_WALL, "wedge2")
    loop.append(w2)
    ext.append(w2)

    H = 2.0 * max(np.hypot(*up.P), np.hypot(*lo.P))
    states = {"0": s0, "1": s1, "2": up.state, "3": lo.state}
    regions = [
        Region("Lambda0_upper", "0", up.P + np.array([0.1, 0.1 + 0.1 * math.tan(theta_w1)]) * inc.xi1_0),
        Region("Lambda0_lower", "0", lo.P + np.array([0.1, -0.1 - 0.1 * math.tan(theta_w2)]) * inc.xi1_0),
        Region("Lambda1", "1", np.array([shock.point(0.5)[0] - 0.25 * H, 0.0])),
    ]
    straight = [
        StraightShock(LineSegment(up.P, up.P + np.array([0, H]), CurveKind.STRAIGHT_SHOCK, "S0_upper"), "0", "1"),
        StraightShock(LineSegment(lo.P, lo.P - np.array([0, H]), CurveKind.STRAIGHT_SHOCK, "S0_lower"), "0", "1"),
    ]
    adjacency = [("0", "1")]
    points = {"P0": up.P, "P1": lo.P, "P2": up.shock_end, "P3": lo.shock_end, "P4": origin,
              "P5": up.wall_point, "P6": lo.wall_point, "O2": up.state.u, "O3": lo.state.u,
              "calP0": origin}
    circles = []
    for c, name in ((up, "Lambda2"), (lo, "Lambda3")):
        adjacency.append(("1", c.label))
        adjacency.append(("0", c.label))
        if c.supersonic:
            poly = c.polygon()
            regions.append(Region(name, c.label, _probe(poly), poly))
            circles.append(SonicCircle(c.label, c.state.u, c.c))
            straight.append(StraightShock(LineSegment(c.P, c.shock_end, CurveKind.STRAIGHT_SHOCK,
                                                      "S_" + c.label), "1", c.label))
    meta = {"theta_w1": theta_w1, "theta_w2": theta_w2, "incident": inc._asdict(),
            "supersonic_upper": up.supersonic, "supersonic_lower": lo.supersonic,
            "strong_upper": sol_u.strong.state, "strong_lower": sol_l.strong.state.mirrored(),
            "shock_scale": shock_scale, "corner_angle": 2 * math.pi - theta_w1 - theta_w2}
    return Configuration("RegularReflectionNonsym", params, states, regions, adjacency, points,
                         circles, loop, ext, intr, four_sides(loop), straight, origin, meta)


def build_regular_reflection(params: GasParams, rho0, rho1, theta_w, shock_scale=None,
                             straight_shock=False) -> Configuration:
    """Symmetric reflection, upper half domain.

    The curved shock is the upper half of the symmetric non-symmetric-model
    cubic, so it is vertical where it meets the symmetry line at P2.
    """
    inc = incident_shock_setup(rho0, rho1, params)
    sol, up, tw, nw = _rr_upper_corner(rho0, rho1, theta_w, params, "2")
    origin = np.zeros(2)
    A = up.shock_end
    if shock_scale is None:
        shock_scale = axis_scale(A, _mirror(A), up.d, -_mirror(up.d), _rr_target(inc, params, rho1))
    full = CubicHermite.from_tangents(A, _mirror(A), up.d, -_mirror(up.d), shock_scale)
    half = full.restricted(0.0, 0.5, name="shock", meta={"upstream": "1"})
    P2 = half.end.copy()
    P2[1] = 0.0
    if straight_shock:
        shock = LineSegment(A, P2, CurveKind.STRAIGHT_SHOCK, "shock", {"upstream": "1"})
    else:
        shock = CubicHermite(half.p0, P2, half.m0, np.array([0.0, half.m1[1]]),
                             kind=CurveKind.CURVED_SHOCK, name="shock", meta={"upstream": "1"})
    wedge = LineSegment(origin, up.wall_point, CurveKind.STRAIGHT_WALL, "wedge")
    sym = LineSegment(P2, origin, CurveKind.SYMMETRY_LINE, "symmetry")
    loop, intr = [wedge], [shock]
    if up.supersonic:
        arc = up.arc("sonic")
        loop.append(arc)
        intr.append(arc)
    loop += [shock, sym]
    H = 2.0 * np.hypot(*up.P)
    s0 = ConstantState(rho0, (0.0, 0.0))
    s1 = ConstantState(rho1, (inc.u1, 0.0))
    regions = [
        Region("Lambda0", "0", up.P + np.array([0.1, 0.1 + 0.1 * math.tan(theta_w)]) * inc.xi1_0),
        Region("Lambda1", "1", np.array([P2[0] - 0.25 * H, 0.25 * H])),
    ]
    circles, straight = [], [
        StraightShock(LineSegment(up.P, up.P + np.array([0, H]), CurveKind.STRAIGHT_SHOCK, "S0"), "0", "1")]
    if up.supersonic:
        poly = up.polygon()
        regions.append(Region("Lambda2", "2", _probe(poly), poly))
        circles.append(SonicCircle("2", up.state.u, up.c))
        straight.append(StraightShock(LineSegment(up.P, up.shock_end, CurveKind.STRAIGHT_SHOCK, "S1"), "1", "2"))
    points = {"P0": up.P, "P1": A, "P2": P2, "P3": origin, "P4": up.wall_point, "O2": up.state.u,
              "calP0": origin}
    meta = {"theta_w": theta_w, "incident": inc._asdict(), "supersonic": up.supersonic,
            "strong": sol.strong.state, "shock_scale": shock_scale, "corner_angle": math.pi - theta_w}
    return Configuration("RegularReflectionSym", params, {"0": s0, "1": s1, "2": up.state}, regions,
                         [("0", "1"), ("1", "2"), ("0", "2")], points, circles, loop, [wedge, sym], intr,
                         four_sides(loop), straight, origin, meta)


def build_prandtl(params: GasParams, rho_inf, u_inf, theta_w, shock_scale=1.0,
                  straight_shock=False) -> Configuration:
    """Supersonic flow (rho_inf, (u_inf, 0)) past a ramp of angle theta_w at the origin."""
    if not (0 < theta_w < 0.5 * math.pi):
        raise PreconditionError("ramp angle must lie in (0, pi/2)")
    s_inf = ConstantState(rho_inf, (u_inf, 0.0))
    tw = np.array([math.cos(theta_w), math.sin(theta_w)])
    nw = np.array([-tw[1], tw[0]])
    origin = np.zeros(2)
    sol = solve_corner(s_inf, origin, tw, params)
    O = _Corner(sol.weak, tw, nw, params, "O")
    if O.supersonic:
        O.wall_point = O.state.u - O.c * tw      # near side, toward the ramp tip
    nrm = normal_reflection(s_inf, tw, params)
    sN, off = nrm.state, nrm.offset
    cN = sN.sound_speed(params)
    if off >= cN:
        raise GeometryError("the normal-reflection shock does not meet the sonic circle of state (N)")
    P3 = sN.u + cN * tw
    P4 = sN.u + math.sqrt(cN * cN - off * off) * tw + off * nw
    P5 = O.shock_end
    P2 = O.wall_point
    shock = _hermite(P4, P5, -tw, -O.d, shock_scale, straight_shock, "inf")
    wedge = LineSegment(P2, P3, CurveKind.STRAIGHT_WALL, "wedge")
    arcN = CircularArc.between(sN.u, cN, P3, P4, name="sonicN", meta={"state": "N"})
    loop, intr = [wedge, arcN, shock], [shock, arcN]
    if O.supersonic:
        arcO = CircularArc.between(O.state.u, O.c, P5, P2, name="sonicO", meta={"state": "O"})
        loop.append(arcO)
        intr.append(arcO)
    far = P4 + 2 * np.hypot(*P4) * tw
    regions = [
        Region("Lambda_inf", "inf", np.array([-1.0, 0.5]) * max(1.0, np.hypot(*P4))),
        Region("LambdaN", "N", sN.u + (cN + 0.5 * np.hypot(*P4)) * tw + 0.5 * off * nw),
    ]
    straight = [StraightShock(LineSegment(P4, far, CurveKind.STRAIGHT_SHOCK, "SN"), "inf", "N")]
    circles = [SonicCircle("N", sN.u, cN)]
    if O.supersonic:
        poly = np.vstack([origin[None], CircularArc.between(O.state.u, O.c, P5, P2).point(np.linspace(0, 1, 64))])
        regions.append(Region("LambdaO", "O", _probe(poly), poly))
        circles.append(SonicCircle("O", O.state.u, O.c))
        straight.append(StraightShock(LineSegment(origin, P5, CurveKind.STRAIGHT_SHOCK, "SO"), "inf", "O"))
    points = {"P1": origin, "P2": P2, "P3": P3, "P4": P4, "P5": P5, "ON": sN.u, "OO": O.state.u}
    meta = {"theta_w": theta_w, "supersonic": O.supersonic, "normal_offset": off,
            "strong": sol.strong.state, "shock_scale": shock_scale}
    return Configuration("Prandtl", params, {"inf": s_inf, "O": O.state, "N": sN}, regions,
                         [("inf", "O"), ("inf", "N"), ("O", "N")], points, circles, loop, [wedge], intr,
                         four_sides(loop), straight, None, meta)


def lighthill_gate(rho0, rho1, params):
    inc = incident_shock_setup(rho0, rho1, params)
    c1 = float(params.sound_speed(rho1))
    if not (0.0 < inc.xi1_0 < c1):
        raise PreconditionError(
            f"incident shock location must satisfy 0 < xi1_0 < c1; got xi1_0={inc.xi1_0:.6g}, "
            f"c1={c1:.6g} (rho0={rho0}, rho1={rho1}, gamma={params.gamma})")
    return inc, c1


def build_lighthill(params: GasParams, rho0, rho1, theta_corner, p2_distance=None, shock_scale=1.0,
                    straight_shock=False) -> Configuration:
    """Incident shock passing a wall that steps down by the angle theta_corner at the origin."""
    inc, c1 = lighthill_gate(rho0, rho1, params)
    if not (0 < theta_corner < 0.5 * math.pi):
        raise PreconditionError("corner angle must lie in (0, pi/2)")
    u1, x0 = inc.u1, inc.xi1_0
    origin = np.zeros(2)
    t0 = np.array([math.cos(theta_corner), -math.sin(theta_corner)])
    n0 = np.array([-t0[1], t0[0]])
    s = x0 * math.cos(theta_corner) if p2_distance is None else float(p2_distance)
    if s <= float(params.sound_speed(rho0)):
        raise PreconditionError("P2 too close to the corner: state (0) is not supersonic there")
    P2 = s * t0
    P3 = np.array([x0, math.sqrt(c1 * c1 - (x0 - u1) ** 2)])
    P4 = np.array([u1 - c1, 0.0])
    shock = _hermite(P2, P3, n0, (0.0, 1.0), shock_scale, straight_shock, "0")
    w1 = LineSegment(P4, origin, CurveKind.STRAIGHT_WALL, "wedge1")
    w0 = LineSegment(origin, P2, CurveKind.STRAIGHT_WALL, "wedge0")
    arc = CircularArc.between((u1, 0.0), c1, P3, P4, name="sonic", meta={"state": "1"}, via=(0.0, 1.0))
    loop = [w1, w0, shock, arc]
    s0 = ConstantState(rho0, (0.0, 0.0))
    s1 = ConstantState(rho1, (u1, 0.0))
    regions = [Region("Lambda0", "0", np.array([x0 + 0.5 * c1, 0.5 * c1])),
               Region("Lambda1", "1", np.array([u1 - c1 - 0.25 * c1, 0.1 * c1]))]
    straight = [StraightShock(LineSegment(P3, P3 + np.array([0.0, c1]), CurveKind.STRAIGHT_SHOCK, "S1"),
                              "0", "1")]
    points = {"P1": origin, "P2": P2, "P3": P3, "P4": P4, "O1": s1.u, "calP0": origin}
    meta = {"theta_corner": theta_corner, "incident": inc._asdict(), "c1": c1,
            "corner_angle": math.pi + theta_corner, "shock_scale": shock_scale}
    return Configuration("Lighthill", params, {"0": s0, "1": s1}, regions, [("0", "1")], points,
                         [SonicCircle("1", s1.u, c1)], loop, [w1, w0], [shock, arc], four_sides(loop),
                         straight, origin, meta)


def build_four_shock(params: GasParams, rho1, rho2, theta1, theta2, shock_scale=1.0,
                     straight_shock=False) -> Configuration:
    """Symmetric four-shock Riemann configuration with reflections at P1 (right) and P4 (left)."""
    fs = four_shock_states(rho1, rho2, theta1, theta2, params)
    s = fs.states
    ex = np.array([1.0, 0.0])
    ey = np.array([0.0, 1.0])
    # reflection at P1: upstream (2), wall = symmetry axis, flow toward -xi1
    c6 = _Corner(solve_corner(s["2"], fs.P1, ex, params).weak, -ex, ey, params, "6")
    c5 = _Corner(solve_corner(s["2"], fs.P4, ex, params).weak, ex, ey, params, "5")
    A = c6.shock_end            # P2 or P1
    B = c5.shock_end            # P3 or P4
    shock1 = _hermite(A, B, c6.d, -c5.d, shock_scale, straight_shock, "2", "shock1")
    shock2 = _hermite(_mirror(B), _mirror(A), _mirror(c5.d), -_mirror(c6.d), shock_scale,
                      straight_shock, "4", "shock2")
    loop, intr = [shock1], [shock1, shock2]
    if c5.supersonic:
        arc5 = CircularArc.between(c5.state.u, c5.c, B, _mirror(B), name="sonic2",
                                   meta={"state": "5"}, via=(-1.0, 0.0))
        loop.append(arc5)
    loop.append(shock2)
    if c6.supersonic:
        arc6 = CircularArc.between(c6.state.u, c6.c, _mirror(A), A, name="sonic1",
                                   meta={"state": "6"}, via=(1.0, 0.0))
        loop.append(arc6)
        intr.insert(2, arc6)
    if c5.supersonic:
        intr.append(arc5)
    states = dict(s)
    states["5"], states["6"] = c5.state, c6.state
    H = 2.0 * max(abs(fs.P1[0]), abs(fs.P4[0]), 1.0)
    regions = [
        Region("Lambda1", "1", fs.P1 + np.array([0.5 * H, 0.0])),
        Region("Lambda2", "2", np.array([0.5 * (fs.P1[0] + fs.P4[0]), 2 * H])),
        Region("Lambda3", "3", fs.P4 - np.array([0.5 * H, 0.0])),
        Region("Lambda4", "4", np.array([0.5 * (fs.P1[0] + fs.P4[0]), -2 * H])),
    ]
    straight = [
        StraightShock(LineSegment(fs.P1, fs.P1 + H * np.array([math.cos(theta1), math.sin(theta1)]),
                                  CurveKind.STRAIGHT_SHOCK, "S12"), "1", "2"),
        StraightShock(LineSegment(fs.P4, fs.P4 + H * np.array([-math.cos(theta2), math.sin(theta2)]),
                                  CurveKind.STRAIGHT_SHOCK, "S32"), "3", "2"),
    ]
    circles = []
    for c, name in ((c5, "Lambda5"), (c6, "Lambda6")):
        if c.supersonic:
            arc = CircularArc.between(c.state.u, c.c, c.shock_end, _mirror(c.shock_end),
                                      via=(1.0, 0.0) if c is c6 else (-1.0, 0.0))
            poly = np.vstack([c.P[None], arc.point(np.linspace(0, 1, 128))])
            regions.append(Region(name, c.label, _probe(poly), poly))
            circles.append(SonicCircle(c.label, c.state.u, c.c))
            straight.append(StraightShock(LineSegment(c.P, c.shock_end, CurveKind.STRAIGHT_SHOCK,
                                                      "S2" + c.label), "2", c.label))
    points = {"P1": fs.P1, "P2": A, "P3": B, "P4": fs.P4, "P5": _mirror(B), "P6": _mirror(A),
              "O5": c5.state.u, "O6": c6.state.u}
    adjacency = [("1", "2"), ("3", "2"), ("1", "4"), ("3", "4"), ("2", "5"), ("2", "6"),
                 ("4", "5"), ("4", "6")]
    meta = {"theta1": theta1, "theta2": theta2, "supersonic_P1": c6.supersonic,
            "supersonic_P4": c5.supersonic, "sigma12": fs.sigma12, "sigma32": fs.sigma32,
            "shock_scale": shock_scale}
    return Configuration("FourShock", params, states, regions, adjacency, points, circles, loop, [],
                         intr, four_sides(loop), straight, None, meta)


def build_configuration(kind, params: GasParams, **data) -> Configuration:
    builders = {
        "RegularReflectionSym": build_regular_reflection,
        "RegularReflectionNonsym": build_regular_reflection_nonsym,
        "Prandtl": build_prandtl,
        "Lighthill": build_lighthill,
        "FourShock": build_four_shock,
    }
    if kind not in builders:
        raise PreconditionError(f"unknown configuration kind {kind!r}; expected one of {KINDS}")
    return builders[kind](params, **data)
