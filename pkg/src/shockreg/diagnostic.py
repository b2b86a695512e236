"""Renormalized vorticity diagnostics.

Manufactured fields are given symbolically and differentiated exactly; the
quadrature patch is the Coons map of a configuration's Omega (or any four
curves).  The vorticity convention matches vortcalc,
omega = d(v1)/d(xi2) - d(v2)/d(xi1), and X = omega / rho.
"""

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import sympy as sp
from numpy.polynomial.legendre import leggauss

from .config.curves import CoonsPatch, CurveKind, Polyline
from .config.model import Configuration
from .config.validate import validate_admissible_structure
from .errors import GeometryError, PreconditionError, ValidationError
from .gas import ConstantState, GasParams, PointState
from .jump import OrientedInterface, downstream_state
from .vortcalc import ShockPointData, shock_vorticity_closed_form

XI1, XI2 = sp.symbols("xi1 xi2", real=True)
INTERIOR_KINDS = (CurveKind.CURVED_SHOCK, CurveKind.STRAIGHT_SHOCK, CurveKind.SONIC_ARC)


# ---------------------------------------------------------------------------
# renormalization pairs

@dataclass(frozen=True)
class RenormPair:
    f: Callable
    fprime: Callable
    g: Callable
    name: str = ""

    def relation_residual(self, s):
        s = np.asarray(s, float)
        return s * self.fprime(s) - 2.0 * self.f(s) - self.g(s)


def quadratic_pair() -> RenormPair:
    return RenormPair(lambda s: np.asarray(s, float) ** 2, lambda s: 2.0 * np.asarray(s, float),
                      lambda s: np.zeros_like(np.asarray(s, float)), "quadratic")


def renorm_pair_truncated(M) -> RenormPair:
    """f_M(t) = t^2 for |t| <= M, M^2 + 2M(|t| - M) beyond; g_M = t f_M' - 2 f_M."""
    if not M > 1:
        raise PreconditionError(f"truncation level must satisfy M > 1, got {M}")
    M = float(M)

    def f(t):
        a = np.abs(np.asarray(t, float))
        return np.where(a <= M, a * a, M * M + 2 * M * (a - M))

    def fp(t):
        t = np.asarray(t, float)
        return 2.0 * np.minimum(np.abs(t), M) * np.sign(t)

    def g(t):
        a = np.abs(np.asarray(t, float))
        return np.where(a <= M, 0.0, 2.0 * (M * M - M * a))

    return RenormPair(f, fp, g, f"truncated(M={M:g})")


# ---------------------------------------------------------------------------
# analytic fields

def _lambdify(expr):
    fn = sp.lambdify((XI1, XI2), expr, "numpy")

    def call(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return np.broadcast_to(np.asarray(fn(x, y), float), np.broadcast(x, y).shape).copy()
    return call


@dataclass(frozen=True)
class FieldValues:
    rho: np.ndarray
    grad_rho: np.ndarray      # (2, n)
    v: np.ndarray             # (2, n)
    jac: np.ndarray           # (2, 2, n), jac[i, j] = d v_i / d xi_j
    omega: np.ndarray
    grad_omega: np.ndarray    # (2, n)

    @property
    def div_v(self):
        return self.jac[0, 0] + self.jac[1, 1]

    @property
    def X(self):
        return self.omega / self.rho

    @property
    def grad_X(self):
        return self.grad_omega / self.rho - self.omega * self.grad_rho / self.rho ** 2


class AnalyticField:
    """Density and pseudo-velocity with exact first (and vorticity) derivatives."""

    def __init__(self, rho, v1, v2, name=""):
        self.name = name
        self.exprs = tuple(sp.sympify(e) for e in (rho, v1, v2))
        rho, v1, v2 = self.exprs
        omega = sp.diff(v1, XI2) - sp.diff(v2, XI1)
        self._fns = {
            "rho": _lambdify(rho),
            "rho_x": _lambdify(sp.diff(rho, XI1)), "rho_y": _lambdify(sp.diff(rho, XI2)),
            "v1": _lambdify(v1), "v2": _lambdify(v2),
            "v1_x": _lambdify(sp.diff(v1, XI1)), "v1_y": _lambdify(sp.diff(v1, XI2)),
            "v2_x": _lambdify(sp.diff(v2, XI1)), "v2_y": _lambdify(sp.diff(v2, XI2)),
            "omega": _lambdify(omega),
            "omega_x": _lambdify(sp.diff(omega, XI1)), "omega_y": _lambdify(sp.diff(omega, XI2)),
        }

    @classmethod
    def from_sympy(cls, rho, v1, v2, name=""):
        return cls(rho, v1, v2, name)

    @classmethod
    def from_constant_state(cls, state: ConstantState):
        return cls(sp.Float(state.rho), sp.Float(state.u[0]) - XI1, sp.Float(state.u[1]) - XI2,
                   "constant")

    def __call__(self, pts) -> FieldValues:
        pts = np.atleast_2d(np.asarray(pts, float))
        x, y = pts[:, 0], pts[:, 1]
        F = {k: fn(x, y) for k, fn in self._fns.items()}
        if np.any(F["rho"] <= 0):
            raise PreconditionError(f"field {self.name!r} has non-positive density on the patch")
        return FieldValues(
            F["rho"], np.stack([F["rho_x"], F["rho_y"]]), np.stack([F["v1"], F["v2"]]),
            np.array([[F["v1_x"], F["v1_y"]], [F["v2_x"], F["v2_y"]]]),
            F["omega"], np.stack([F["omega_x"], F["omega_y"]]))


class TestFunction:
    """Smooth zeta with its gradient, from a sympy expression in xi1, xi2."""

    def __init__(self, expr):
        expr = sp.sympify(expr)
        self.expr = expr
        self._z = _lambdify(expr)
        self._zx = _lambdify(sp.diff(expr, XI1))
        self._zy = _lambdify(sp.diff(expr, XI2))

    def __call__(self, pts):
        pts = np.atleast_2d(pts)
        return self._z(pts[:, 0], pts[:, 1])

    def grad(self, pts):
        pts = np.atleast_2d(pts)
        return np.stack([self._zx(pts[:, 0], pts[:, 1]), self._zy(pts[:, 0], pts[:, 1])])


def pde_residuals(fld: AnalyticField, params: GasParams, at) -> Dict[str, np.ndarray]:
    """Residuals of mass, momentum, vorticity transport and ratio transport at points."""
    F = fld(at)
    v, gr = F.v, F.grad_rho
    mass = gr[0] * v[0] + gr[1] * v[1] + F.rho * F.div_v + 2.0 * F.rho
    hprime = F.rho ** (params.gamma - 2.0)
    conv = np.einsum("ijn,jn->in", F.jac, v)
    momentum = conv + v + hprime * gr
    transport = v[0] * F.grad_omega[0] + v[1] * F.grad_omega[1] + (1.0 + F.div_v) * F.omega
    gX = F.grad_X
    ratio = v[0] * gX[0] + v[1] * gX[1] - F.X
    return {"mass": mass, "momentum": momentum, "transport": transport, "ratio_transport": ratio}


# ---------------------------------------------------------------------------
# quadrature

def _gauss(n, a=0.0, b=1.0):
    x, w = leggauss(n)
    return a + (b - a) * 0.5 * (x + 1.0), 0.5 * (b - a) * w


def _pieces(seg):
    """Split polylines at their vertices so each piece is smooth."""
    if isinstance(seg, Polyline):
        k = seg.knots
        return [(seg, k[i], k[i + 1]) for i in range(len(k) - 1)]
    return [(seg, 0.0, 1.0)]


class QuadPatch:
    """Gauss-Legendre quadrature on a Coons patch and on its boundary curves.

    ``order`` nodes per direction on each smooth panel; ``line_order`` nodes
    per smooth boundary piece.  The boundary normal is the outward one of the
    counterclockwise loop (right normal of each side).
    """

    def __init__(self, sides, order=16, line_order=64, allow_fold=False):
        self.patch = CoonsPatch(sides)
        self.sides = list(sides)
        self.order = int(order)
        self.line_order = int(line_order)
        bs, bt = self.patch.breaks()
        pts, wts, dets = [], [], []
        for s0, s1 in zip(bs[:-1], bs[1:]):
            for t0, t1 in zip(bt[:-1], bt[1:]):
                xs, ws = _gauss(self.order, s0, s1)
                xt, wt = _gauss(self.order, t0, t1)
                S, T = np.meshgrid(xs, xt)
                det = self.patch.jacobian_det(S.ravel(), T.ravel())
                pts.append(self.patch.map(S.ravel(), T.ravel()))
                wts.append(np.outer(wt, ws).ravel() * det)
                dets.append(det)
        self.points = np.vstack(pts)
        self.weights = np.concatenate(wts)
        self.min_det = float(np.min(np.concatenate(dets)))
        if self.min_det <= 0 and not allow_fold:
            raise GeometryError(
                f"Coons map Jacobian is not positive on the patch (min det {self.min_det:.3g})")

    @classmethod
    def from_configuration(cls, cfg: Configuration, order=16, line_order=64, allow_fold=False):
        return cls(cfg.omega_sides, order, line_order, allow_fold)

    def refined(self, order):
        return QuadPatch(self.sides, order, self.line_order, allow_fold=True)

    def boundary(self, which="all", line_order=None):
        """(points, weights, outward normals, side index) on the chosen sides."""
        n = line_order or self.line_order
        P, W, N, idx = [], [], [], []
        for k, side in enumerate(self.sides):
            if which == "int" and side.kind not in INTERIOR_KINDS:
                continue
            if which == "ext" and side.kind in INTERIOR_KINDS:
                continue
            for seg, a, b in _pieces(side):
                t, w = _gauss(n, a, b)
                d = seg.d1(t)
                speed = np.hypot(d[:, 0], d[:, 1])
                P.append(seg.point(t))
                W.append(w * speed)
                N.append(np.stack([d[:, 1], -d[:, 0]], axis=1) / speed[:, None])
                idx.append(np.full(len(t), k))
        if not P:
            return np.zeros((0, 2)), np.zeros(0), np.zeros((0, 2)), np.zeros(0, int)
        return np.vstack(P), np.concatenate(W), np.vstack(N), np.concatenate(idx)

    def area(self):
        return float(np.sum(self.weights))


def weak_identity_terms(patch: QuadPatch, fld: AnalyticField, pair: RenormPair, zeta,
                        params: GasParams = None):
    """Volume, boundary and correction integrals of the renormalized weak identity.

    volume     = int_Omega rho f(X) v.grad(zeta) + rho g(X) zeta
    boundary   = oint_dOmega rho f(X) (v.nu) zeta, split into interior and exterior sides
    correction = int_Omega [f'(X) rho (v.grad X - X) + f(X) (div(rho v) + 2 rho)] zeta
    The divergence theorem gives volume - boundary + correction = 0 for any smooth field.
    """
    z = zeta if isinstance(zeta, TestFunction) else TestFunction(zeta)
    F = fld(patch.points)
    X = F.X
    fX, gX, fpX = pair.f(X), pair.g(X), pair.fprime(X)
    zv, gz = z(patch.points), z.grad(patch.points)
    v = F.v
    vol = np.sum(patch.weights * (F.rho * fX * (v[0] * gz[0] + v[1] * gz[1]) + F.rho * gX * zv))
    gXv = F.grad_X
    transport = v[0] * gXv[0] + v[1] * gXv[1] - X
    mass = F.grad_rho[0] * v[0] + F.grad_rho[1] * v[1] + F.rho * F.div_v + 2.0 * F.rho
    corr = np.sum(patch.weights * (fpX * F.rho * transport + fX * mass) * zv)
    parts = {}
    for which in ("int", "ext"):
        P, W, N, _ = patch.boundary(which)
        if len(W) == 0:
            parts[which] = 0.0
            continue
        B = fld(P)
        vn = B.v[0] * N[:, 0] + B.v[1] * N[:, 1]
        parts[which] = float(np.sum(W * B.rho * pair.f(B.X) * vn * z(P)))
    return {"volume": float(vol), "boundary_int": parts["int"], "boundary_ext": parts["ext"],
            "correction": float(corr)}


def weak_identity_residual(patch: QuadPatch, fld: AnalyticField, pair: RenormPair, zeta,
                           params: GasParams = None, order: Optional[int] = None) -> float:
    if order is not None and order != patch.order:
        patch = patch.refined(order)
    t = weak_identity_terms(patch, fld, pair, zeta, params)
    return t["volume"] - t["boundary_int"] - t["boundary_ext"] + t["correction"]


def identity_refinement(patch: QuadPatch, fld, pair, zeta, params=None, orders=(2, 4, 8, 16)):
    """Rows (order, nodes, residual) for a node-doubling schedule."""
    rows = []
    for n in orders:
        p = patch.refined(n)
        rows.append((n, len(p.weights), weak_identity_residual(p, fld, pair, zeta, params)))
    return rows


# ---------------------------------------------------------------------------
# truncation family

def truncation_limit_study(fld: AnalyticField, patch: QuadPatch, M_schedule: Sequence[float],
                           sides="int"):
    """Rows (M, volume term int rho g_M(X), boundary term oint rho f_M(X) v.nu).

    Also returns the sup of |X| over the volume nodes and over the boundary nodes.
    """
    F = fld(patch.points)
    P, W, N, _ = patch.boundary(sides)
    if len(W) == 0:
        P, W, N, _ = patch.boundary("all")
    B = fld(P)
    vn = B.v[0] * N[:, 0] + B.v[1] * N[:, 1]
    rows = []
    for M in M_schedule:
        pair = renorm_pair_truncated(M)
        vol = float(np.sum(patch.weights * F.rho * pair.g(F.X)))
        bnd = float(np.sum(W * B.rho * pair.f(B.X) * vn))
        rows.append((float(M), vol, bnd))
    full = float(np.sum(W * B.rho * B.X ** 2 * vn))
    return {"rows": rows, "sup_volume": float(np.max(np.abs(F.X))),
            "sup_boundary": float(np.max(np.abs(B.X))), "quadratic_boundary": full}


# ---------------------------------------------------------------------------
# contradiction functional

@dataclass
class ContradictionReport:
    value: float
    margin: float
    curvature_scale: float
    nodes: Dict[str, list] = field(default_factory=dict)

    def to_dict(self):
        return {"value": self.value, "margin": self.margin, "strictly_negative": self.value < 0,
                "curvature_scale": self.curvature_scale, "nodes": self.nodes}

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def shock_samples(cfg: Configuration, n_nodes=64, curvature_scale=1.0):
    """Gauss nodes on the distinguished shock with the Omega-side state and X = omega/rho."""
    seg = cfg.shock
    params = cfg.params
    up = cfg.states[seg.meta["upstream"]]
    t, w = _gauss(n_nodes)
    x = seg.point(t)
    d = seg.d1(t)
    speed = np.hypot(d[:, 0], d[:, 1])
    tau = d / speed[:, None]
    kappa = seg.curvature(t) * curvature_scale
    out = {k: np.empty(n_nodes) for k in ("rho", "X", "vn", "omega")}
    for i in range(n_nodes):
        into = np.array([-tau[i, 1], tau[i, 0]])
        vm = up.u - x[i]
        dn = downstream_state(PointState(up.rho, vm), OrientedInterface(x[i], into), params)
        data = ShockPointData.from_global(dn.rho, dn.v, up.rho, vm, tau[i], kappa[i], params)
        om = shock_vorticity_closed_form(data)
        out["rho"][i] = dn.rho
        out["omega"][i] = om
        out["X"][i] = om / dn.rho
        out["vn"][i] = -float(dn.v @ into)        # outward normal of Omega
    out.update(t=t, weight=w * speed, x=x[:, 0], y=x[:, 1], kappa=kappa)
    return out


def contradiction_functional(cfg: Configuration, params: GasParams = None, curvature_scale=1.0,
                             n_nodes=64, check=True) -> ContradictionReport:
    """oint over the distinguished shock of rho |X|^2 (v.nu), with X from the closed form.

    With ``check`` the configuration must pass validate_admissible_structure;
    ``check=False`` lets straight model shocks (which fail the non-straightness
    predicate by design) be evaluated.
    """
    if params is not None and params != cfg.params:
        raise PreconditionError("params differ from the configuration's gas")
    if check:
        rep = validate_admissible_structure(cfg)
        if not rep.ok:
            raise ValidationError(f"configuration fails admissibility checks: {rep.failures()}", rep)
    s = shock_samples(cfg, n_nodes, curvature_scale)
    integrand = s["rho"] * s["X"] ** 2 * s["vn"]
    value = float(np.sum(s["weight"] * integrand))
    nodes = {k: [float(a) for a in np.asarray(s[k])] for k in ("t", "x", "y", "rho", "X", "vn", "kappa")}
    nodes["integrand"] = [float(a) for a in integrand]
    return ContradictionReport(value, -value, float(curvature_scale), nodes)


# ---------------------------------------------------------------------------
# export

def write_rows_csv(header, rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in r])
