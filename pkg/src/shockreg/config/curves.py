"""Parametrized boundary curves and the transfinite (Coons) patch.

Every curve maps t in [0, 1] to the plane and is evaluated vectorized:
``point(t)``, ``d1(t)``, ``d2(t)`` return arrays of shape (n, 2) for array t
and shape (2,) for scalar t.  Tangent, left normal and signed curvature
follow from the first two derivatives.
"""

from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import GeometryError


class CurveKind(str, Enum):
    STRAIGHT_WALL = "StraightWall"
    STRAIGHT_SHOCK = "StraightShock"
    SONIC_ARC = "SonicArc"
    CURVED_SHOCK = "CurvedShockModel"
    SYMMETRY_LINE = "SymmetryLine"


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _rot90(a):
    return np.stack([-a[..., 1], a[..., 0]], axis=-1)


def _shape(t, arr):
    return arr[0] if np.ndim(t) == 0 else arr


class CurveSegment:
    """Base class.  Subclasses implement ``_eval(t) -> (x, x', x'')`` on 1-d t."""

    def __init__(self, kind, name="", meta=None):
        self.kind = CurveKind(kind)
        self.name = name
        self.meta = dict(meta or {})

    def _eval(self, t):
        raise NotImplementedError

    def _all(self, t):
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        return self._eval(tt)

    def point(self, t):
        return _shape(t, self._all(t)[0])

    def d1(self, t):
        return _shape(t, self._all(t)[1])

    def d2(self, t):
        return _shape(t, self._all(t)[2])

    def tangent(self, t):
        d = self.d1(t)
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def normal(self, t):
        """Left normal (tangent rotated by +90 degrees)."""
        return _rot90(self.tangent(t))

    def curvature(self, t):
        _, d, dd = self._all(t)
        k = _cross(d, dd) / np.linalg.norm(d, axis=-1) ** 3
        return k[0] if np.ndim(t) == 0 else k

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)

    def length(self, n=32):
        x, w = leggauss(n)
        t = 0.5 * (x + 1)
        return 0.5 * float(np.sum(w * np.linalg.norm(self.d1(t), axis=-1)))

    def samples(self, n=256):
        return self.point(np.linspace(0.0, 1.0, n))

    def reversed(self):
        return ReversedCurve(self)

    def is_straight(self, n=64, tol=1e-12):
        k = self.curvature(np.linspace(0, 1, n))
        return bool(np.all(np.abs(k) <= tol))

    def __repr__(self):
        return f"{type(self).__name__}({self.kind.value}, {self.name!r}, {self.start} -> {self.end})"


class LineSegment(CurveSegment):
    def __init__(self, a, b, kind, name="", meta=None):
        super().__init__(kind, name, meta)
        self.a = np.array(a, dtype=float)
        self.b = np.array(b, dtype=float)
        if np.allclose(self.a, self.b, rtol=0, atol=1e-15):
            raise GeometryError(f"degenerate segment {name!r}")

    def _eval(self, t):
        d = self.b - self.a
        x = self.a + t[:, None] * d
        return x, np.broadcast_to(d, x.shape).copy(), np.zeros_like(x)


class CircularArc(CurveSegment):
    """Arc of the circle (center, radius) from angle theta0 to theta1."""

    def __init__(self, center, radius, theta0, theta1, kind=CurveKind.SONIC_ARC, name="", meta=None):
        super().__init__(kind, name, meta)
        self.center = np.array(center, dtype=float)
        self.radius = float(radius)
        self.theta0 = float(theta0)
        self.theta1 = float(theta1)
        if self.radius <= 0 or self.theta0 == self.theta1:
            raise GeometryError(f"degenerate arc {name!r}")

    @classmethod
    def between(cls, center, radius, p, q, kind=CurveKind.SONIC_ARC, name="", meta=None, via=None):
        """Arc from point p to point q on the circle.

        Takes the shorter arc unless ``via`` (a direction from the center) is given,
        in which case the arc containing that direction is used.
        """
        c = np.asarray(center, float)
        a0 = np.arctan2(*(np.asarray(p) - c)[::-1])
        a1 = np.arctan2(*(np.asarray(q) - c)[::-1])
        da = (a1 - a0 + np.pi) % (2 * np.pi) - np.pi
        if via is not None:
            av = np.arctan2(via[1], via[0])
            if da > 0:
                inside = (av - a0) % (2 * np.pi) <= da
            else:
                inside = (a0 - av) % (2 * np.pi) <= -da
            if not inside:
                da -= np.copysign(2 * np.pi, da)
        return cls(c, radius, a0, a0 + da, kind, name, meta)

    def _eval(self, t):
        dth = self.theta1 - self.theta0
        th = self.theta0 + t * dth
        cs, sn = np.cos(th), np.sin(th)
        r = self.radius
        x = self.center + r * np.stack([cs, sn], axis=-1)
        d = r * dth * np.stack([-sn, cs], axis=-1)
        dd = -r * dth ** 2 * np.stack([cs, sn], axis=-1)
        return x, d, dd


class CubicHermite(CurveSegment):
    """Cubic with prescribed endpoint positions p0, p1 and derivatives m0, m1."""

    def __init__(self, p0, p1, m0, m1, kind=CurveKind.CURVED_SHOCK, name="", meta=None):
        super().__init__(kind, name, meta)
        self.p0, self.p1, self.m0, self.m1 = (np.array(a, dtype=float) for a in (p0, p1, m0, m1))

    @classmethod
    def from_tangents(cls, p0, p1, tau0, tau1, scale=1.0, **kw):
        """Unit end tangents scaled by ``scale`` times the chord length."""
        L = scale * float(np.linalg.norm(np.asarray(p1, float) - np.asarray(p0, float)))
        t0 = np.asarray(tau0, float) / np.linalg.norm(tau0)
        t1 = np.asarray(tau1, float) / np.linalg.norm(tau1)
        return cls(p0, p1, L * t0, L * t1, **kw)

    def _eval(self, t):
        t = t[:, None]
        t2, t3 = t * t, t * t * t
        h00, h10, h01, h11 = 2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t, -2 * t3 + 3 * t2, t3 - t2
        x = h00 * self.p0 + h10 * self.m0 + h01 * self.p1 + h11 * self.m1
        d = (6 * t2 - 6 * t) * self.p0 + (3 * t2 - 4 * t + 1) * self.m0 \
            + (-6 * t2 + 6 * t) * self.p1 + (3 * t2 - 2 * t) * self.m1
        dd = (12 * t - 6) * self.p0 + (6 * t - 4) * self.m0 + (-12 * t + 6) * self.p1 + (6 * t - 2) * self.m1
        return x, d, dd

    def restricted(self, a, b, **kw):
        """The same cubic on [a, b], reparametrized to [0, 1]."""
        x, d, _ = self._eval(np.array([a, b], dtype=float))
        s = b - a
        opts = dict(kind=self.kind, name=self.name, meta=self.meta)
        opts.update(kw)
        return CubicHermite(x[0], x[1], s * d[0], s * d[1], **opts)

    def curvature_sign_changes(self, n=512):
        k = self.curvature(np.linspace(0, 1, n))
        s = np.sign(k[np.abs(k) > 1e-14])
        return int(np.count_nonzero(np.diff(s)))


class ReversedCurve(CurveSegment):
    def __init__(self, base):
        super().__init__(base.kind, base.name, base.meta)
        self.base = base

    def _eval(self, t):
        x, d, dd = self.base._eval(1.0 - t)
        return x, -d, dd

    def reversed(self):
        return self.base


class Polyline(CurveSegment):
    """Piecewise-linear curve through ``pts`` with arclength-uniform parameter."""

    def __init__(self, pts, kind=CurveKind.STRAIGHT_WALL, name="", meta=None):
        super().__init__(kind, name, meta)
        self.pts = np.array(pts, dtype=float)
        seg = np.linalg.norm(np.diff(self.pts, axis=0), axis=1)
        if np.any(seg <= 0):
            raise GeometryError("repeated polyline vertex")
        self.knots = np.concatenate([[0.0], np.cumsum(seg) / seg.sum()])

    def _eval(self, t):
        i = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.pts) - 2)
        h = self.knots[i + 1] - self.knots[i]
        d = (self.pts[i + 1] - self.pts[i]) / h[:, None]
        x = self.pts[i] + (t - self.knots[i])[:, None] * d
        return x, d, np.zeros_like(x)


def outward_normal(curve, t):
    """Outer normal of a counterclockwise boundary loop: the right normal."""
    return -curve.normal(t)


class CoonsPatch:
    """Transfinite map of [0,1]^2 onto the region bounded by a ccw loop of four curves.

    Sides: bottom e0(s), right e1(t), top e2 traversed backwards, left e3 backwards.
    """

    def __init__(self, sides, tol=1e-9):
        if len(sides) != 4:
            raise GeometryError("a Coons patch needs exactly four sides")
        self.sides = list(sides)
        for k in range(4):
            gap = np.linalg.norm(self.sides[k].end - self.sides[(k + 1) % 4].start)
            if gap > tol:
                raise GeometryError(f"patch sides {k} and {(k + 1) % 4} do not meet (gap {gap:.3g})")
        e0, e1, e2, e3 = self.sides
        self._c00, self._c10, self._c11, self._c01 = e0.start, e1.start, e2.start, e3.start

    def _edges(self, s, t):
        e0, e1, e2, e3 = self.sides
        B, dB, _ = e0._all(s)
        R, dR, _ = e1._all(t)
        T, dT, _ = e2._all(1.0 - s)
        Lf, dL, _ = e3._all(1.0 - t)
        return B, dB, R, dR, T, -dT, Lf, -dL

    def map(self, s, t):
        """Points for matching 1-d arrays s, t (same length)."""
        s = np.atleast_1d(np.asarray(s, float))
        t = np.atleast_1d(np.asarray(t, float))
        B, _, R, _, T, _, L, _ = self._edges(s, t)
        S, Tt = s[:, None], t[:, None]
        corner = ((1 - S) * (1 - Tt) * self._c00 + S * (1 - Tt) * self._c10
                  + (1 - S) * Tt * self._c01 + S * Tt * self._c11)
        return (1 - Tt) * B + Tt * T + (1 - S) * L + S * R - corner

    def jacobian(self, s, t):
        """(x_s, x_t) arrays of shape (n, 2) each."""
        s = np.atleast_1d(np.asarray(s, float))
        t = np.atleast_1d(np.asarray(t, float))
        B, dB, R, dR, T, dT, L, dL = self._edges(s, t)
        S, Tt = s[:, None], t[:, None]
        c00, c10, c01, c11 = self._c00, self._c10, self._c01, self._c11
        xs = (1 - Tt) * dB + Tt * dT - L + R - (-(1 - Tt) * c00 + (1 - Tt) * c10 - Tt * c01 + Tt * c11)
        xt = -B + T + (1 - S) * dL + S * dR - (-(1 - S) * c00 - S * c10 + (1 - S) * c01 + S * c11)
        return xs, xt

    def jacobian_det(self, s, t):
        xs, xt = self.jacobian(s, t)
        return _cross(xs, xt)

    def breaks(self):
        """Parameter breakpoints (s, t) where polyline sides have corners.

        The map is only piecewise smooth across these lines, so quadrature
        should use panels that end on them.
        """
        def knots(seg, flip):
            k = getattr(seg, "knots", np.array([0.0, 1.0]))
            return 1.0 - k[::-1] if flip else k
        e0, e1, e2, e3 = self.sides
        s = np.unique(np.concatenate([knots(e0, False), knots(e2, True)]))
        t = np.unique(np.concatenate([knots(e1, False), knots(e3, True)]))
        return s, t

    def boundary_polygon(self, n=128):
        return np.vstack([c.point(np.linspace(0, 1, n, endpoint=False)) for c in self.sides])
