"""Grid fields, radial mollification, reflection extension and commutators.

Fields live on uniform cell-centered grids: cell (j, i) has center
``origin + ((i + 0.5) h, (j + 0.5) h)`` and ``values[j, i]``.  A boolean mask
marks cells that hold data; ``valid_margin`` counts boundary layers consumed by
convolutions.  Convolutions zero-fill invalid cells and mark every output cell
whose kernel footprint touches one as invalid, so norms never integrate unset
data.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import GeometryError, PreconditionError


class MarginError(PreconditionError):
    """Kernel support does not fit inside the valid region."""


@dataclass(frozen=True)
class GridField2D:
    origin: np.ndarray
    h: float
    values: np.ndarray
    mask: Optional[np.ndarray] = None
    valid_margin: int = 0

    def __post_init__(self):
        if not self.h > 0:
            raise PreconditionError("grid spacing must be positive")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise PreconditionError("values must be a 2-d array (ny, nx)")
        mask = np.ones(vals.shape, bool) if self.mask is None else np.asarray(self.mask, bool)
        if mask.shape != vals.shape:
            raise PreconditionError("mask shape does not match values")
        object.__setattr__(self, "origin", np.asarray(self.origin, float))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mask", mask)

    @property
    def nx(self):
        return self.values.shape[1]

    @property
    def ny(self):
        return self.values.shape[0]

    @classmethod
    def from_function(cls, fun, origin, h, nx, ny, mask=None):
        g = cls(origin, h, np.zeros((ny, nx)))
        X, Y = g.centers()
        vals = np.broadcast_to(np.asarray(fun(X, Y), float), (ny, nx)).copy()
        m = None if mask is None else np.asarray(mask(X, Y), bool)
        if m is not None:
            vals = np.where(m, vals, np.nan)
        return cls(origin, h, vals, m)

    @classmethod
    def unit_square(cls, n, fun):
        return cls.from_function(fun, (0.0, 0.0), 1.0 / n, n, n)

    def centers(self):
        x = self.origin[0] + (np.arange(self.nx) + 0.5) * self.h
        y = self.origin[1] + (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y)

    def valid(self):
        """Mask of usable cells: data present and outside the consumed margin."""
        v = self.mask.copy()
        m = self.valid_margin
        if m > 0:
            v[:m, :] = v[-m:, :] = False
            v[:, :m] = v[:, -m:] = False
        return v

    def filled(self):
        return np.where(self.valid(), self.values, 0.0)

    def like(self, values, mask=None, valid_margin=None):
        return GridField2D(self.origin, self.h, values, self.mask if mask is None else mask,
                           self.valid_margin if valid_margin is None else valid_margin)

    def same_grid(self, other):
        return (self.values.shape == other.values.shape and self.h == other.h
                and np.array_equal(self.origin, other.origin))

    def __add__(self, other):
        return _binary(self, other, np.add)

    def __sub__(self, other):
        return _binary(self, other, np.subtract)

    def __mul__(self, other):
        return _binary(self, other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self.like(-self.values)

    def shifted(self, di, dj):
        """Translate the data by (di, dj) cells; uncovered cells become invalid."""
        vals = np.full_like(self.values, np.nan)
        mask = np.zeros_like(self.mask)
        src = (slice(max(0, -dj), self.ny - max(0, dj)), slice(max(0, -di), self.nx - max(0, di)))
        dst = (slice(max(0, dj), self.ny - max(0, -dj)), slice(max(0, di), self.nx - max(0, -di)))
        vals[dst] = self.values[src]
        mask[dst] = self.valid()[src]
        return GridField2D(self.origin, self.h, vals, mask, 0)


def _binary(a, b, op):
    if isinstance(b, GridField2D):
        if not a.same_grid(b):
            raise PreconditionError("fields live on different grids")
        return GridField2D(a.origin, a.h, op(a.values, b.values), a.valid() & b.valid(), 0)
    return a.like(op(a.values, b))


# ---------------------------------------------------------------------------
# mollifier

def bump(r):
    """exp(-1/(1-r^2)) for r < 1, exactly 0 otherwise."""
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def bump_derivative(r):
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    inside = r < 1.0
    q = 1.0 - r[inside] ** 2
    out[inside] = np.exp(-1.0 / q) * (-2.0 * r[inside] / q ** 2)
    return out


PROFILES = {"bump": (bump, bump_derivative)}


@dataclass(frozen=True)
class MollifierKernel:
    """Radial kernel eta_eps sampled on the integer cell offsets of a grid with spacing h.

    ``values`` and ``grad`` have shape (2m+1, 2m+1) with m = ceil(eps/h); the
    normalization makes ``values.sum() * h**2 == 1`` and the same constant is
    applied to the analytic gradient samples.
    """

    epsilon: float
    h: float
    profile: str
    norm: float
    values: np.ndarray
    grad: tuple

    @property
    def half_width(self):
        return (self.values.shape[0] - 1) // 2

    def footprint(self):
        return self.values > 0

    def __call__(self, x, y):
        g, _ = PROFILES[self.profile]
        return self.norm * g(np.hypot(x, y) / self.epsilon)

    def derivative(self, x, y, axis):
        _, dg = PROFILES[self.profile]
        r = np.hypot(x, y)
        comp = x if axis == 0 else y
        with np.errstate(invalid="ignore", divide="ignore"):
            val = self.norm * dg(r / self.epsilon) * np.where(r > 0, comp / (r * self.epsilon), 0.0)
        return val


def make_mollifier(epsilon, h, profile="bump") -> MollifierKernel:
    if not epsilon > 0 or not h > 0:
        raise PreconditionError("epsilon and h must be positive")
    if profile not in PROFILES:
        raise PreconditionError(f"unknown kernel profile {profile!r}")
    g, dg = PROFILES[profile]
    m = int(math.ceil(epsilon / h))
    k = np.arange(-m, m + 1) * h
    X, Y = np.meshgrid(k, k)
    R = np.hypot(X, Y)
    raw = g(R / epsilon)
    if raw.sum() == 0:
        raise PreconditionError("kernel support contains no grid points; refine the grid")
    norm = 1.0 / (raw.sum() * h * h)
    with np.errstate(invalid="ignore", divide="ignore"):
        radial = dg(R / epsilon) / epsilon
        gx = norm * np.where(R > 0, radial * X / R, 0.0)
        gy = norm * np.where(R > 0, radial * Y / R, 0.0)
    return MollifierKernel(float(epsilon), float(h), profile, norm, norm * raw, (gx, gy))


def _convolve(f: GridField2D, kern_arr, k: MollifierKernel):
    if not math.isclose(f.h, k.h, rel_tol=1e-12):
        raise PreconditionError("kernel was sampled for a different grid spacing")
    m = k.half_width
    data = fftconvolve(f.filled(), kern_arr, mode="same") * f.h * f.h
    margin = f.valid_margin + m
    mm = f.valid_margin
    inner = f.mask[mm:f.ny - mm, mm:f.nx - mm] if mm else f.mask
    if inner.all():
        # only the margin frame is invalid; the grown margin already excludes its footprint
        bad = np.zeros(f.values.shape, bool)
    else:
        bad = fftconvolve((~f.valid()).astype(float), k.footprint().astype(float), mode="same") > 0.5
    out = GridField2D(f.origin, f.h, np.where(bad, np.nan, data), ~bad, margin)
    if not out.valid().any():
        raise MarginError(f"epsilon={k.epsilon} leaves no valid cells on this grid")
    return out


def mollify(f: GridField2D, k: MollifierKernel) -> GridField2D:
    """f * eta_eps on the cells whose kernel footprint is fully valid."""
    return _convolve(f, k.values, k)


def mollified_derivative(f: GridField2D, k: MollifierKernel, axis) -> GridField2D:
    """d/dx_axis (f * eta_eps) computed as f * d_axis eta_eps."""
    return _convolve(f, k.grad[axis], k)


def mollify_at(f: GridField2D, k: MollifierKernel, points) -> np.ndarray:
    """Direct evaluation of f * eta_eps at arbitrary points (analytic kernel, same normalization).

    Raises MarginError if the support of a point touches an invalid cell.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    X, Y = f.centers()
    valid = f.valid()
    out = np.empty(len(pts))
    m = k.half_width + 1
    for n, (px, py) in enumerate(pts):
        i0 = int(math.floor((px - f.origin[0]) / f.h))
        j0 = int(math.floor((py - f.origin[1]) / f.h))
        sl = (slice(max(j0 - m, 0), j0 + m + 2), slice(max(i0 - m, 0), i0 + m + 2))
        w = k(px - X[sl], py - Y[sl])
        support = w > 0
        if not np.all(valid[sl][support]):
            raise MarginError(f"kernel support at {px, py} touches invalid cells")
        out[n] = float(np.sum(f.values[sl][support] * w[support])) * f.h * f.h
    return out


# ---------------------------------------------------------------------------
# reflection extension

def exclusion_factor(corner_angle):
    """|cosec| of a reflex corner angle, 0 for convex corners."""
    if math.pi < corner_angle < 2 * math.pi:
        return abs(1.0 / math.sin(corner_angle))
    if 0 < corner_angle <= math.pi:
        return 0.0
    raise GeometryError(f"corner angle {corner_angle} outside (0, 2 pi)")


@dataclass(frozen=True)
class ReflectionSpec:
    """Straight boundary segment from ``start`` to ``end`` with Omega on the side of ``inner_normal``.

    ``corner`` is the wall corner (one of the endpoints) with its interior
    angle; ``others`` are the remaining boundary pieces used for the clearance r1.
    """

    start: np.ndarray
    end: np.ndarray
    inner_normal: np.ndarray
    corner: Optional[np.ndarray] = None
    corner_angle: float = math.pi
    others: Sequence = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("start", "end", "inner_normal"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), float))
        if self.corner is not None:
            object.__setattr__(self, "corner", np.asarray(self.corner, float))
        t = self.end - self.start
        n = self.inner_normal / np.hypot(*self.inner_normal)
        if abs(t @ n) > 1e-12 * np.hypot(*t):
            raise GeometryError("inner normal is not perpendicular to the segment")
        object.__setattr__(self, "inner_normal", n)

    @property
    def L(self):
        return exclusion_factor(self.corner_angle) if self.corner is not None else 0.0

    @property
    def tangent(self):
        t = self.end - self.start
        return t / np.hypot(*t)

    def r1(self):
        """Largest depth keeping B_{(L+1) r}(corner) clear of the other boundary pieces."""
        if self.corner is None or not self.others:
            return math.inf
        d = math.inf
        for seg in self.others:
            pts = seg.point(np.linspace(0, 1, 513)) if hasattr(seg, "point") else np.atleast_2d(seg)
            d = min(d, float(np.min(np.hypot(*(pts - self.corner).T))))
        return d / (self.L + 1.0)

    def mirror(self, X, Y):
        n = self.inner_normal
        s = (X - self.start[0]) * n[0] + (Y - self.start[1]) * n[1]
        return X - 2 * s * n[0], Y - 2 * s * n[1]

    def strip(self, X, Y, r):
        """Cells of W^r with the corner ball removed (the set V^r)."""
        n, t = self.inner_normal, self.tangent
        dx, dy = X - self.start[0], Y - self.start[1]
        depth = -(dx * n[0] + dy * n[1])
        along = dx * t[0] + dy * t[1]
        length = float(np.hypot(*(self.end - self.start)))
        inside = (depth > 0) & (depth < r) & (along >= 0) & (along <= length)
        if self.corner is not None and self.L > 0:
            inside &= np.hypot(X - self.corner[0], Y - self.corner[1]) > self.L * r
        return inside


def _mirror_indices(f: GridField2D, spec: ReflectionSpec):
    n = spec.inner_normal
    if abs(n[0]) == 1.0 and n[1] == 0.0:
        pos = (spec.start[0] - f.origin[0]) / f.h
        axis = 1
    elif abs(n[1]) == 1.0 and n[0] == 0.0:
        pos = (spec.start[1] - f.origin[1]) / f.h
        axis = 0
    else:
        return None
    if abs(pos - round(pos)) > 1e-9:
        return None
    return axis, int(round(pos))


def reflect_extend(f: GridField2D, spec: ReflectionSpec, parity: str, r: float,
                   source: Optional[Callable] = None) -> GridField2D:
    """Fill the strip V^r across the segment with the mirrored values of f.

    parity "odd" negates (normal components), "even" copies (density,
    tangential components).  Only cells without data are filled; the corner
    ball B_{Lr} stays unset.  Mirrors of cell centers are cell centers when the
    segment lies on a grid face line; otherwise ``source(x, y)`` supplies the
    values at mirrored points.
    """
    if parity not in ("odd", "even"):
        raise PreconditionError("parity must be 'odd' or 'even'")
    r1 = spec.r1()
    if r > r1:
        raise GeometryError(f"extension depth r={r} exceeds the corner clearance r1={r1:.6g}")
    sign = -1.0 if parity == "odd" else 1.0
    X, Y = f.centers()
    target = spec.strip(X, Y, r) & ~f.valid()
    vals = f.values.copy()
    mask = f.valid().copy()
    idx = _mirror_indices(f, spec)
    if idx is not None:
        axis, k = idx
        jj, ii = np.nonzero(target)
        if axis == 0:
            mj, mi = 2 * k - 1 - jj, ii
        else:
            mj, mi = jj, 2 * k - 1 - ii
        ok = (mj >= 0) & (mj < f.ny) & (mi >= 0) & (mi < f.nx)
        ok[ok] &= f.valid()[mj[ok], mi[ok]]
        vals[jj[ok], ii[ok]] = sign * f.values[mj[ok], mi[ok]]
        mask[jj[ok], ii[ok]] = True
    elif source is not None:
        MX, MY = spec.mirror(X[target], Y[target])
        vals[target] = sign * np.asarray(source(MX, MY), float)
        mask[target] = True
    else:
        raise GeometryError("segment is not on a grid face line; pass source= for mirrored values")
    return GridField2D(f.origin, f.h, vals, mask, f.valid_margin)


def reflect_extend_vector(vx: GridField2D, vy: GridField2D, spec: ReflectionSpec, r: float):
    """Extend a vector field: normal component odd, tangential component even."""
    n, t = spec.inner_normal, spec.tangent
    vn = vx * n[0] + vy * n[1]
    vt = vx * t[0] + vy * t[1]
    en = reflect_extend(vn, spec, "odd", r)
    et = reflect_extend(vt, spec, "even", r)
    return en * n[0] + et * t[0], en * n[1] + et * t[1]


# ---------------------------------------------------------------------------
# commutator

def commutator(b: GridField2D, u: GridField2D, axis: int, k: MollifierKernel) -> GridField2D:
    """A_eps[u, b] = d_i((b u)_eps - b_eps u_eps), all derivatives through d_i eta_eps."""
    if not b.same_grid(u):
        raise PreconditionError("b and u must share a grid")
    bu = b * u
    d_bu = mollified_derivative(bu, k, axis)
    b_e, u_e = mollify(b, k), mollify(u, k)
    db_e, du_e = mollified_derivative(b, k, axis), mollified_derivative(u, k, axis)
    return d_bu - (db_e * u_e + b_e * du_e)


def grid_derivative(f: GridField2D, axis: int) -> GridField2D:
    """Central difference (one-sided at the edges of the data)."""
    vals = np.gradient(f.values, f.h, axis=1 - axis)
    valid = f.valid()
    shift = np.zeros_like(valid)
    if axis == 0:
        shift[:, 1:-1] = valid[:, :-2] & valid[:, 2:]
    else:
        shift[1:-1, :] = valid[:-2, :] & valid[2:, :]
    return GridField2D(f.origin, f.h, vals, valid & shift, f.valid_margin)


def commutator_decomposition(b: GridField2D, u: GridField2D, axis: int, k: MollifierKernel,
                             db: Optional[GridField2D] = None):
    """The four pieces of A_eps, signed so that they sum to it.

    I1 = d_i(bu)_eps - b d_i u_eps, I2 = -b_{x_i} u_eps,
    I3 = -u_eps d_i(b_eps - b),     I4 = -(b_eps - b) d_i u_eps.
    ``db`` is the derivative of b (central differences by default).
    """
    if db is None:
        db = grid_derivative(b, axis)
    u_e, b_e = mollify(u, k), mollify(b, k)
    du_e, db_e = mollified_derivative(u, k, axis), mollified_derivative(b, k, axis)
    I1 = mollified_derivative(b * u, k, axis) - b * du_e
    I2 = -(db * u_e)
    I3 = -(u_e * (db_e - db))
    I4 = -((b_e - b) * du_e)
    return I1, I2, I3, I4


def theoretical_constant(k: MollifierKernel):
    """Constant C in ||A_eps||_L1(Omega') <= C ||grad b||_L2 ||u||_L2 for this kernel.

    Bounds per piece: I1 by pi*max|d eta| (unit-scale kernel), I2 by 1,
    I3 by 2, I4 by ||d eta||_L1; the maximum over both axes is used.
    """
    e = k.epsilon
    gmax = max(np.abs(g).max() for g in k.grad) * e ** 3
    gl1 = max(np.abs(g).sum() for g in k.grad) * k.h ** 2 * e
    return float(math.pi * gmax + 3.0 + gl1)


def gradient_l2(b: GridField2D) -> float:
    """||grad b||_L2 over the whole grid (one-sided differences at the edges)."""
    gx = np.gradient(b.values, b.h, axis=1)
    gy = np.gradient(b.values, b.h, axis=0)
    return float(np.sqrt(np.sum(gx * gx + gy * gy)) * b.h)


def random_pair(rng, n, modes=3):
    """A Lipschitz b (smooth modes plus a cone) and a smooth u on the unit square."""
    def trig(amp):
        k = rng.integers(1, 4, size=(modes, 2))
        a = rng.normal(size=modes) * amp
        ph = rng.uniform(0, 2 * np.pi, size=(modes, 2))
        return lambda x, y: sum(a[m] * np.sin(np.pi * k[m, 0] * x + ph[m, 0])
                                * np.cos(np.pi * k[m, 1] * y + ph[m, 1]) for m in range(modes))
    tb, tu = trig(0.5), trig(1.0)
    apex = rng.uniform(0.3, 0.7, 2)
    slope = rng.uniform(0.5, 2.0)
    b = GridField2D.unit_square(n, lambda x, y: tb(x, y) + slope * np.hypot(x - apex[0], y - apex[1]))
    u = GridField2D.unit_square(n, lambda x, y: tu(x, y) + rng.normal() * x * y)
    return b, u


DEFAULT_SUBDOMAIN = (0.2, 0.8, 0.2, 0.8)


def commutator_study(b: GridField2D, u: GridField2D, eps_schedule, axis=0, subdomain=DEFAULT_SUBDOMAIN):
    """Rows (eps, ||A_eps||_L1(sub), ratio to previous, empirical constant, theoretical constant).

    The empirical constant is ||A_eps||_L1 / (||grad b||_L2 ||u||_L2).
    """
    scale = gradient_l2(b) * lp_norm(u, 2)
    norms, consts = [], []
    for eps in eps_schedule:
        k = make_mollifier(eps, b.h)
        norms.append(lp_norm(commutator(b, u, axis, k), 1, subdomain))
        consts.append(theoretical_constant(k))
    return [r + (v / scale if scale > 0 else 0.0, c)
            for r, v, c in zip(convergence_table(eps_schedule, norms), norms, consts)]


# ---------------------------------------------------------------------------
# norms and export

def lp_norm(f: GridField2D, p=2, subdomain=None) -> float:
    """Midpoint-rule L^p norm over the cells whose centers lie in subdomain (x0, x1, y0, y1)."""
    X, Y = f.centers()
    sel = np.ones(f.values.shape, bool)
    if subdomain is not None:
        x0, x1, y0, y1 = subdomain
        sel = (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)
    if not sel.any():
        raise PreconditionError("empty subdomain")
    if not np.all(f.valid()[sel]):
        raise MarginError("subdomain contains cells without valid data")
    a = np.abs(f.values[sel])
    if p == np.inf or p == "inf":
        return float(a.max())
    p = float(p)
    return float((np.sum(a ** p) * f.h * f.h) ** (1.0 / p))


def convergence_table(eps, norms):
    rows = []
    for n, (e, v) in enumerate(zip(eps, norms)):
        ratio = math.nan if n == 0 else v / norms[n - 1]
        rows.append((float(e), float(v), ratio))
    return rows


CONVERGENCE_COLUMNS = ("epsilon", "l1_norm", "ratio_vs_previous", "empirical_constant",
                       "theoretical_constant")


def write_convergence_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CONVERGENCE_COLUMNS[:len(rows[0])] if rows else CONVERGENCE_COLUMNS[:3])
        for r in rows:
            w.writerow([repr(float(x)) for x in r])


def write_field_csv(f: GridField2D, path):
    X, Y = f.centers()
    valid = f.valid()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value", "valid"])
        for x, y, v, ok in zip(X.ravel(), Y.ravel(), f.values.ravel(), valid.ravel()):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(v)) if ok else "nan", int(ok)])
