"""Admissibility checks for a built configuration.

Each check records a pass flag and a numeric margin; nothing raises.  The
velocity on interior boundaries is taken from the Omega side.  By default
it is the constant-state closure: behind a shock, the downstream state of
the upstream constant state across the local normal; on a sonic arc, the
constant state whose sonic circle the arc lies on.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from shapely.geometry import Point, Polygon

from ..errors import NoShockError, PreconditionError
from ..gas import PointState
from ..jump import OrientedInterface, downstream_state, entropy_admissible
from .curves import CurveKind
from .model import Configuration


@dataclass
class Thresholds:
    c_inv: float = 1e-6          # v.nu <= -c_inv on the distinguished shock
    angle: float = 1e-9          # corner angles kept away from 0 and 2 pi
    separation: float = 1e-9     # distance from the corner point to interior boundaries
    straightness: float = 1e-8   # |tau(P1) x tau(P*)| required for non-straightness
    tangential: float = 1e-8     # |v.tau| and |kappa| lower bound
    sonic: float = 1e-9          # |v.nu + c| on sonic arcs
    overlap: float = 1e-4        # relative area of polygon overlap tolerated (arc discretization)
    n_samples: int = 257
    n_entropy: int = 20


@dataclass
class CheckResult:
    ok: bool
    margin: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: Dict[str, CheckResult] = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.ok for c in self.checks.values())

    def add(self, name, ok, margin, detail=""):
        self.checks[name] = CheckResult(bool(ok), float(margin), detail)

    def failures(self):
        return [k for k, c in self.checks.items() if not c.ok]

    def to_dict(self):
        return {"ok": self.ok,
                "checks": {k: {"ok": c.ok, "margin": c.margin, "detail": c.detail}
                           for k, c in self.checks.items()}}

    def summary(self):
        lines = [f"{'PASS' if c.ok else 'FAIL'} {k}: margin={c.margin:.6g} {c.detail}".rstrip()
                 for k, c in self.checks.items()]
        return "\n".join(lines)


def constant_state_closure(cfg: Configuration):
    """Default Omega-side velocity on interior boundaries: returns f(seg, t) -> (rho, v)."""
    params = cfg.params

    def velocity(seg, t):
        t = np.atleast_1d(np.asarray(t, float))
        xi = seg.point(t)
        if seg.kind == CurveKind.SONIC_ARC:
            st = cfg.states[seg.meta["state"]]
            return np.full(len(t), st.rho), st.u - xi
        up = cfg.states[seg.meta["upstream"]]
        nu = seg.normal(t)           # from the upstream side (right) into Omega (left)
        rho = np.empty(len(t))
        v = np.empty((len(t), 2))
        for i in range(len(t)):
            iface = OrientedInterface(xi[i], nu[i])
            d = downstream_state(PointState(up.rho, up.u - xi[i]), iface, params)
            rho[i], v[i] = d.rho, d.v
        return rho, v

    return velocity


def _angle_between(a, b):
    return float(np.arctan2(a[0] * b[1] - a[1] * b[0], a @ b))


def corner_angles(cfg: Configuration):
    """Interior angle of Omega at each junction of the counterclockwise boundary loop."""
    out = {}
    loop = cfg.boundary
    for i, seg in enumerate(loop):
        nxt = loop[(i + 1) % len(loop)]
        turn = _angle_between(seg.tangent(1.0), nxt.tangent(0.0))
        out[f"{seg.name}|{nxt.name}"] = np.pi - turn
    return out


def _check_regions(cfg, rep, th):
    omega = Polygon(cfg.omega_polygon())
    polys = {r.label: Polygon(r.polygon) for r in cfg.regions if r.polygon is not None}
    worst = np.inf
    ok = omega.is_valid
    for lab, pg in polys.items():
        ov = pg.intersection(omega).area / max(pg.area, 1e-300)
        worst = min(worst, -ov)
        ok &= ov < th.overlap
        for lab2, pg2 in polys.items():
            if lab2 > lab:
                ov2 = pg.intersection(pg2).area / max(min(pg.area, pg2.area), 1e-300)
                ok &= ov2 < th.overlap
                worst = min(worst, -ov2)
    for r in cfg.regions:
        p = Point(*r.probe)
        inside = omega.contains(p) or any(pg.contains(p) for lab, pg in polys.items() if lab != r.label)
        if r.polygon is not None:
            inside |= not polys[r.label].buffer(1e-12).contains(p)
        ok &= not inside
    rep.add("regions_disjoint", ok, 0.0 if worst == np.inf else worst)
    gaps = []
    for a, b in cfg.adjacency:
        sa, sb = cfg.states[a], cfg.states[b]
        gaps.append(abs(sa.rho - sb.rho) + float(np.hypot(*(sa.u - sb.u))))
    rep.add("neighbor_states_differ", min(gaps) > 0, min(gaps))


def _check_corners(cfg, rep, th):
    ang = corner_angles(cfg)
    margin = min(min(a, 2 * np.pi - a) for a in ang.values())
    rep.add("corner_angles", margin > th.angle, margin,
            ", ".join(f"{k}={v:.6g}" for k, v in ang.items()))
    if cfg.corner is None:
        rep.add("corner_point_separated", True, np.inf, "no wall corner")
        return
    ts = np.linspace(0, 1, th.n_samples)
    d = min(float(np.min(np.hypot(*(s.point(ts) - cfg.corner).T))) for s in cfg.gamma_int)
    rep.add("corner_point_separated", d > th.separation, d)


def _check_interior(cfg, rep, th, velocity):
    ts = np.linspace(0, 1, th.n_samples)
    for k, seg in enumerate(cfg.gamma_int):
        try:
            rho, v = velocity(seg, ts)
        except (NoShockError, PreconditionError) as exc:
            rep.add(f"flux_sign[{seg.name}]", False, np.nan, str(exc))
            continue
        nu = np.stack([seg.tangent(ts)[:, 1], -seg.tangent(ts)[:, 0]], axis=1)
        vn = np.einsum("ij,ij->i", v, nu)
        if k == 0:
            rep.add(f"flux_sign[{seg.name}]", vn.max() <= -th.c_inv, -vn.max() - th.c_inv)
            c = cfg.params.sound_speed(rho)
            subs = c - np.hypot(v[:, 0], v[:, 1])
            rep.checks[f"subsonic_downstream[{seg.name}]"] = CheckResult(True, float(subs.min()),
                                                                         "informational")
        else:
            rep.add(f"flux_sign[{seg.name}]", vn.max() <= 0, -vn.max())
        if seg.kind == CurveKind.SONIC_ARC:
            c = cfg.params.sound_speed(rho)
            err = float(np.max(np.abs(vn + c)))
            rep.add(f"sonic_flux[{seg.name}]", err <= th.sonic, th.sonic - err)


def _check_shock_shape(cfg, rep, th, velocity):
    """Non-straightness and tangential velocity, anchored at an endpoint of the shock.

    Either endpoint may serve as the anchor; the one with the larger |v.tau| is used.
    """
    seg = cfg.shock
    ts = np.linspace(0, 1, th.n_samples)
    tau = seg.tangent(ts)
    try:
        _, v = velocity(seg, ts)
    except (NoShockError, PreconditionError) as exc:
        for name in ("shock_not_straight", "endpoint_tangential_velocity", "curvature_point"):
            rep.add(name, False, np.nan, str(exc))
        return
    vt = np.einsum("ij,ij->i", v, tau)
    k = 0 if abs(vt[0]) >= abs(vt[-1]) else -1
    where = "start" if k == 0 else "end"
    cr = np.abs(tau[k, 0] * tau[:, 1] - tau[k, 1] * tau[:, 0])
    rep.add("shock_not_straight", cr.max() > th.straightness, float(cr.max()), f"anchor={where}")
    rep.add("endpoint_tangential_velocity", abs(vt[k]) > th.tangential, abs(float(vt[k])),
            f"anchor={where}")
    kap = np.abs(seg.curvature(ts[1:-1]))
    both = np.minimum(kap, np.abs(vt[1:-1]))
    rep.add("curvature_point", both.max() > th.tangential, float(both.max()))


def _check_straight_shocks(cfg, rep, th):
    ts = np.linspace(0, 1, th.n_entropy)
    worst, ok = np.inf, True
    for sh in cfg.straight_shocks:
        up, dn = cfg.states[sh.upstream], cfg.states[sh.downstream]
        seg = sh.segment
        n = seg.normal(0.5)
        # orient the normal from the upstream side to the downstream side
        mid = seg.point(0.5)
        if float((up.u - mid) @ n) < 0:
            n = -n
        for x in seg.point(ts):
            iface = OrientedInterface(x, n)
            try:
                r = entropy_admissible(PointState(up.rho, up.u - x), PointState(dn.rho, dn.u - x), iface,
                                       cfg.params)
            except PreconditionError:
                ok = False
                worst = -np.inf
                continue
            ok &= r.ok
            worst = min(worst, min(r.margins.values()))
    rep.add("straight_shocks_entropy", ok, worst if np.isfinite(worst) or worst < 0 else 0.0)


def validate_admissible_structure(cfg: Configuration, boundary_velocity: Optional[Callable] = None,
                                  thresholds: Optional[Thresholds] = None) -> ValidationReport:
    th = thresholds or Thresholds()
    vel = boundary_velocity or constant_state_closure(cfg)
    rep = ValidationReport()
    _check_regions(cfg, rep, th)
    _check_corners(cfg, rep, th)
    _check_interior(cfg, rep, th, vel)
    _check_shock_shape(cfg, rep, th, vel)
    _check_straight_shocks(cfg, rep, th)
    return rep
