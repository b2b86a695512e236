"""Vorticity algebra at a point of a curved shock.

Frame: at the shock point P the xi1 axis is tangent to the shock, which is the
graph xi2 = f_s(xi1) with f_s'(P) = 0, and the vorticity is
omega = d(v1)/d(xi2) - d(v2)/d(xi1).  Values with no superscript are taken on the
subsonic side of the shock; ``rho1``, ``v_minus`` are the upstream constant
state evaluated at P.

Solving the 3x3 boundary system gives, on the shock,

    omega = v1 ((rho - rho1) v2^2 - (p - p1)) / (rho v2^2) * f_s''
          = -v1 (rho - rho1)^2 / (rho rho1) * f_s''

(the second form uses the jump relations at P), and the system determinant is
rho v2^2 (c^2 - v2^2)^2 |v|^4.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .gas import GasParams

RH_TOL = 1e-10


def aligned_rotation(tangent):
    """Rotation R with R @ tangent = (|tangent|, 0); rows are e1 = tau, e2 = rot90(tau)."""
    t = np.asarray(tangent, dtype=float)
    n = np.hypot(t[0], t[1])
    if n == 0:
        raise PreconditionError("zero tangent")
    e1 = t / n
    return np.array([[e1[0], e1[1]], [-e1[1], e1[0]]])


@dataclass(frozen=True)
class ShockPointData:
    rho: float
    v: np.ndarray
    rho1: float
    v_minus: np.ndarray
    p: float
    p1: float
    c: float
    fs2: float

    def __post_init__(self):
        for name in ("v", "v_minus"):
            a = np.array(getattr(self, name), dtype=float).reshape(2)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.rho <= 0 or self.rho1 <= 0:
            raise PreconditionError("densities must be positive")
        v2 = self.v[1]
        if v2 == 0.0:
            raise PreconditionError("normal pseudo-velocity v2 vanishes at the shock point")
        if self.c ** 2 == v2 ** 2:
            raise PreconditionError("sonic normal speed: c^2 = v2^2")

    @classmethod
    def from_states(cls, rho, v, rho1, v_minus, fs2, params: GasParams):
        return cls(float(rho), v, float(rho1), v_minus, float(params.pressure(rho)),
                   float(params.pressure(rho1)), float(params.sound_speed(rho)), float(fs2))

    @classmethod
    def from_global(cls, rho, v, rho1, v_minus, tangent, curvature, params: GasParams):
        """Rotate global-frame pseudo-velocities into the frame aligned with ``tangent``.

        ``curvature`` is the signed curvature of the shock traversed along ``tangent``.
        """
        R = aligned_rotation(tangent)
        return cls.from_states(rho, R @ np.asarray(v, float), rho1,
                               R @ np.asarray(v_minus, float), curvature, params)

    @property
    def elliptic(self):
        return float(self.v @ self.v) < self.c ** 2

    def rh_defect(self):
        """(mass, tangential, normal-momentum) jump defects at P."""
        v1, v2 = self.v
        w1, w2 = self.v_minus
        return np.array([self.rho * v2 - self.rho1 * w2,
                         v1 - w1,
                         self.rho * v2 ** 2 + self.p - self.rho1 * w2 ** 2 - self.p1])


def velocity_gradient_from_state(rho, v, grad_rho, omega, params: GasParams):
    """Matrix J[i, j] = d v_i / d xi_j consistent with mass, momentum and omega."""
    v1, v2 = np.asarray(v, dtype=float)
    r1, r2 = np.asarray(grad_rho, dtype=float)
    q2 = v1 * v1 + v2 * v2
    if q2 == 0.0:
        raise PreconditionError("pseudo-velocity vanishes; the frame is singular")
    c2 = float(params.sound_speed(rho)) ** 2
    a = 1.0 / (rho * q2)
    J = np.empty((2, 2))
    J[0, 0] = -1 - (c2 + v2 * v2) * a * v1 * r1 + (c2 - v2 * v2) * a * v2 * r2 - v1 * v2 / q2 * omega
    J[0, 1] = -(c2 - v1 * v1) * a * v2 * r1 - (c2 - v2 * v2) * a * v1 * r2 + v1 * v1 / q2 * omega
    J[1, 0] = -(c2 - v1 * v1) * a * v2 * r1 - (c2 - v2 * v2) * a * v1 * r2 - v2 * v2 / q2 * omega
    J[1, 1] = -1 + (c2 - v1 * v1) * a * v1 * r1 - (c2 + v1 * v1) * a * v2 * r2 + v1 * v2 / q2 * omega
    return J


def shock_vorticity_system(data: ShockPointData):
    """Matrix and right-hand side for the unknowns (rho_xi1, rho_xi2, omega)."""
    rho, c2 = data.rho, data.c ** 2
    v1, v2 = data.v
    w1, _ = data.v_minus
    q2 = v1 * v1 + v2 * v2
    A = np.array([
        [(c2 - 2 * v1 * v1 - v2 * v2) * v2, (c2 - v2 * v2) * v1, rho * v2 * v2],
        [2 * (c2 - v1 * v1) * v1 * v2, -(c2 - v2 * v2) * (v2 * v2 - v1 * v1), 2 * rho * v1 * v2 * v2],
        [3 * v1 * v1 * v2 * v2 + v1 * v1 * c2 + v2 ** 4 - v2 * v2 * c2,
         -2 * (c2 - v2 * v2) * v1 * v2, -2 * rho * v2 ** 3],
    ])
    d1 = -q2 * (rho * v1 - data.rho1 * w1)
    d2 = -q2 * (rho * v1 * v1 + data.p - data.rho1 * w1 * w1 - data.p1)
    return A, np.array([d1 * data.fs2, d2 * data.fs2, 0.0])


def system_determinant(data: ShockPointData) -> float:
    """rho v2^2 (c^2 - v2^2)^2 |v|^4."""
    v1, v2 = data.v
    q2 = v1 * v1 + v2 * v2
    return data.rho * v2 * v2 * (data.c ** 2 - v2 * v2) ** 2 * q2 * q2


def printed_system_determinant(data: ShockPointData) -> float:
    """rho v2 (c^2 - v2^2)^2 |v|^4 as it appears in print; off by a factor v2."""
    v1, v2 = data.v
    q2 = v1 * v1 + v2 * v2
    return data.rho * v2 * (data.c ** 2 - v2 * v2) ** 2 * q2 * q2


def solve_shock_vorticity(data: ShockPointData):
    """Direct solve of the 3x3 system; returns (rho_xi1, rho_xi2, omega)."""
    A, b = shock_vorticity_system(data)
    return np.linalg.solve(A, b)


def _check_rh(data, tol):
    d = data.rh_defect()
    if np.max(np.abs(d)) > tol:
        raise PreconditionError(
            f"jump relations violated at the shock point (defects {d.tolist()}); "
            "the closed form applies only on the shock")


def shock_vorticity_closed_form(data: ShockPointData, tol: float = RH_TOL) -> float:
    """omega on the shock from the solved boundary system."""
    _check_rh(data, tol)
    v1, v2 = data.v
    if v1 == 0.0 or data.fs2 == 0.0:
        return 0.0
    num = v1 * ((data.rho - data.rho1) * v2 * v2 - (data.p - data.p1))
    return num / (data.rho * v2 * v2) * data.fs2


def printed_closed_form(data: ShockPointData) -> float:
    """v1 ((rho - rho1) v2^2 + (p - p1)) / (rho v2) * f_s'' as it appears in print."""
    v1, v2 = data.v
    return v1 * ((data.rho - data.rho1) * v2 * v2 + (data.p - data.p1)) / (data.rho * v2) * data.fs2
