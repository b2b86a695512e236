import csv
import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from shockreg.errors import GeometryError, PreconditionError
from shockreg.fields import (GridField2D, MarginError, ReflectionSpec, bump, commutator,
                             commutator_decomposition, convergence_table, exclusion_factor,
                             grid_derivative, lp_norm, make_mollifier, mollified_derivative,
                             mollify, mollify_at, reflect_extend, reflect_extend_vector,
                             theoretical_constant, write_convergence_csv, write_field_csv)

SUB = (0.2, 0.8, 0.2, 0.8)


# ---------------------------------------------------------------- kernel

@pytest.mark.parametrize("eps,h", [(0.1, 0.01), (1 / 16, 1 / 256), (0.3, 0.07)])
def test_kernel_normalization_and_moments(eps, h):
    k = make_mollifier(eps, h)
    assert abs(k.values.sum() * h * h - 1.0) <= 1e-12
    m = k.half_width
    off = np.arange(-m, m + 1) * h
    X, Y = np.meshgrid(off, off)
    assert abs(np.sum(X * k.values) * h * h) <= 1e-12
    assert abs(np.sum(Y * k.values) * h * h) <= 1e-12
    np.testing.assert_array_equal(k.values, k.values.T)
    np.testing.assert_array_equal(k.values, k.values[::-1, :])
    assert k(eps, 0.0) == 0.0 and k(0.0, 2 * eps) == 0.0 and k(0.6 * eps, 0.8 * eps) == 0.0


def test_kernel_derivative_matches_finite_difference():
    k = make_mollifier(0.2, 0.01)
    d = 1e-6
    for x, y in [(0.05, 0.03), (-0.1, 0.12), (0.0, -0.15)]:
        for axis in (0, 1):
            dx, dy = (d, 0) if axis == 0 else (0, d)
            fd = (k(x + dx, y + dy) - k(x - dx, y - dy)) / (2 * d)
            assert k.derivative(x, y, axis) == pytest.approx(fd, rel=1e-6, abs=1e-6)
    m = k.half_width
    off = np.arange(-m, m + 1) * k.h
    X, Y = np.meshgrid(off, off)
    np.testing.assert_allclose(k.grad[0], k.derivative(X, Y, 0), rtol=1e-13, atol=1e-10)


def test_continuous_kernel_integral():
    """The discrete normalization approximates the continuous integral of the bump."""
    total, _ = dblquad(lambda y, x: bump(np.hypot(x, y)), -1, 1, -1, 1)
    k = make_mollifier(1.0, 0.005)
    assert k.norm * total == pytest.approx(1.0, rel=1e-6)


def test_kernel_rejects_bad_input():
    with pytest.raises(PreconditionError):
        make_mollifier(0.0, 0.1)
    with pytest.raises(PreconditionError):
        make_mollifier(0.1, 0.1, profile="gauss")


# ---------------------------------------------------------------- mollify

def test_mollify_constant_and_linear():
    n = 128
    k = make_mollifier(1 / 16, 1 / n)
    c = mollify(GridField2D.unit_square(n, lambda x, y: 3.25 + 0 * x), k)
    v = c.valid()
    assert np.max(np.abs(c.values[v] - 3.25)) <= 1e-12
    f = GridField2D.unit_square(n, lambda x, y: 2 * x - 5 * y + 1)
    g = mollify(f, k)
    v = g.valid()
    assert np.max(np.abs(g.values[v] - f.values[v])) <= 1e-10
    assert g.valid_margin == k.half_width


def test_mollify_second_order():
    n = 512
    fun = lambda x, y: np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)  # noqa: E731
    f = GridField2D.unit_square(n, fun)
    errs = []
    for eps in (1 / 8, 1 / 16, 1 / 32):
        g = mollify(f, make_mollifier(eps, 1 / n))
        errs.append(lp_norm(g - f, np.inf, SUB))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    for r in ratios:
        assert 3.5 < r < 4.5


def test_mollify_is_linear_and_shift_equivariant():
    n = 96
    rng = np.random.default_rng(0)
    a = GridField2D((0, 0), 1 / n, rng.normal(size=(n, n)))
    b = GridField2D((0, 0), 1 / n, rng.normal(size=(n, n)))
    k = make_mollifier(0.05, 1 / n)
    lhs = mollify(a * 2.0 + b, k)
    rhs = mollify(a, k) * 2.0 + mollify(b, k)
    v = lhs.valid() & rhs.valid()
    assert np.max(np.abs(lhs.values[v] - rhs.values[v])) <= 1e-12
    s1 = mollify(a.shifted(3, -2), k)
    s2 = mollify(a, k).shifted(3, -2)
    v = s1.valid() & s2.valid()
    assert v.sum() > 0.3 * n * n
    assert np.max(np.abs(s1.values[v] - s2.values[v])) <= 1e-12


def test_mollified_derivative_matches_mollified_exact_derivative():
    """f * d_x eta and (d_x f) * eta agree up to kernel quadrature error, which shrinks with h."""
    errs = []
    for n in (128, 256, 512):
        f = GridField2D.unit_square(n, lambda x, y: np.sin(3 * x) * np.exp(y))
        fx = GridField2D.unit_square(n, lambda x, y: 3 * np.cos(3 * x) * np.exp(y))
        k = make_mollifier(1 / 8, 1 / n)
        d = mollified_derivative(f, k, 0)
        ref = mollify(fx, k)
        errs.append(lp_norm(d - ref, np.inf, SUB) / lp_norm(ref, np.inf, SUB))
    assert errs[-1] <= 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_margin_error_for_large_epsilon():
    n = 32
    f = GridField2D.unit_square(n, lambda x, y: x)
    with pytest.raises(MarginError):
        mollify(f, make_mollifier(0.6, 1 / n))


def test_invalid_cells_propagate():
    n = 64
    f = GridField2D.from_function(lambda x, y: x + y, (0, 0), 1 / n, n, n, mask=lambda x, y: x < 0.5)
    k = make_mollifier(0.05, 1 / n)
    g = mollify(f, k)
    X, Y = g.centers()
    assert not np.any(g.valid() & (X > 0.5 - 0.05 + 1 / n))
    v = g.valid()
    assert np.max(np.abs(g.values[v] - (X + Y)[v])) <= 1e-12


# ---------------------------------------------------------------- reflection

def _reflex_domain(theta, n=64):
    """Omega = {polar angle in (0, theta)} on [-1, 1]^2 with the x-axis on a face line."""
    def inside(x, y):
        return np.mod(np.arctan2(y, x), 2 * np.pi) < theta
    return inside, 2.0 / (2 * n), 2 * n


def test_exclusion_factor():
    assert exclusion_factor(1.75 * math.pi) == pytest.approx(math.sqrt(2))
    assert exclusion_factor(1.5 * math.pi) == pytest.approx(1.0)
    assert exclusion_factor(0.5 * math.pi) == 0.0
    assert exclusion_factor(math.pi) == 0.0
    with pytest.raises(GeometryError):
        exclusion_factor(2 * math.pi)


def test_reflection_parities():
    theta = 1.75 * math.pi
    inside, h, N = _reflex_domain(theta)
    fun = lambda x, y: np.cos(x) + y ** 2 + 0.3 * y  # noqa: E731
    f = GridField2D.from_function(fun, (-1, -1), h, N, N, mask=inside)
    spec = ReflectionSpec((0, 0), (1, 0), (0, 1), corner=(0, 0), corner_angle=theta)
    r = 0.25
    odd = reflect_extend(f, spec, "odd", r)
    even = reflect_extend(f, spec, "even", r)
    X, Y = f.centers()
    filled = odd.valid() & ~f.valid()
    assert filled.any()
    np.testing.assert_allclose(odd.values[filled], -fun(X, -Y)[filled], rtol=1e-14)
    np.testing.assert_allclose(even.values[filled], fun(X, -Y)[filled], rtol=1e-14)
    # corner ball of radius L r stays unset; the strip lies within depth r
    ball = np.hypot(X, Y) <= math.sqrt(2) * r
    assert not np.any(filled & ball & ~inside(X, Y))
    assert np.all(Y[filled] > -r)


def test_reflection_depth_limited_by_clearance():
    from shockreg.config import CurveKind, LineSegment
    far = LineSegment((0.0, -0.5), (1.0, -0.5), CurveKind.STRAIGHT_WALL)
    spec = ReflectionSpec((0, 0), (1, 0), (0, 1), corner=(0, 0), corner_angle=1.75 * math.pi,
                          others=[far])
    assert spec.r1() == pytest.approx(0.5 / (math.sqrt(2) + 1))
    f = GridField2D((0, -1), 0.01, np.zeros((200, 100)))
    with pytest.raises(GeometryError):
        reflect_extend(f, spec, "odd", 0.3)


def test_reflection_oblique_line_needs_source():
    f = GridField2D((0, 0), 0.1, np.zeros((10, 10)), mask=np.zeros((10, 10), bool))
    spec = ReflectionSpec((0, 0), (1, 1), (-1, 1))
    with pytest.raises(GeometryError):
        reflect_extend(f, spec, "odd", 0.2)
    g = reflect_extend(f, spec, "odd", 0.2, source=lambda x, y: x - y)
    X, Y = g.centers()
    filled = g.valid()
    MX, MY = spec.mirror(X[filled], Y[filled])
    np.testing.assert_allclose(g.values[filled], -(MX - MY), atol=1e-14)


def test_odd_extension_mollified_vanishes_on_segment():
    theta = 1.75 * math.pi
    inside, h, N = _reflex_domain(theta, n=80)
    vx = GridField2D.from_function(lambda x, y: np.sin(3 * x) + y, (-1, -1), h, N, N, mask=inside)
    vy = GridField2D.from_function(lambda x, y: np.cos(2 * x) * (1 + y), (-1, -1), h, N, N, mask=inside)
    spec = ReflectionSpec((0, 0), (1, 0), (0, 1), corner=(0, 0), corner_angle=theta)
    r, eps = 0.25, 0.1
    ex, ey = reflect_extend_vector(vx, vy, spec, r)
    k = make_mollifier(eps, h)
    xs = np.linspace(spec.L * r + eps + 2 * h, 1 - eps - 2 * h, 25)
    pts = np.stack([xs, np.zeros_like(xs)], axis=1)
    normal = mollify_at(ey, k, pts)
    assert np.max(np.abs(normal)) <= 1e-12
    tangential = mollify_at(ex, k, pts)
    assert np.min(np.abs(tangential)) > 1e-3
    # a point whose support reaches the unset corner ball is refused
    with pytest.raises(MarginError):
        mollify_at(ey, k, [[spec.L * r - 0.5 * eps, 0.0]])


# ---------------------------------------------------------------- commutator

def _fields(n=256):
    b = GridField2D.unit_square(n, lambda x, y: np.hypot(x - 0.43, y - 0.57))
    u = GridField2D.unit_square(n, lambda x, y: np.sin(2 * np.pi * x) * np.cos(3 * y) + x * y)
    return b, u


def test_commutator_vanishes_for_constant_factor():
    b, u = _fields()
    c = GridField2D.unit_square(256, lambda x, y: 2.5 + 0 * x)
    k = make_mollifier(1 / 16, 1 / 256)
    for axis in (0, 1):
        assert lp_norm(commutator(c, u, axis, k), np.inf, SUB) <= 1e-12
        assert lp_norm(commutator(b, c, axis, k), np.inf, SUB) <= 1e-11


def test_decomposition_sums_to_commutator():
    b, u = _fields()
    k = make_mollifier(1 / 16, 1 / 256)
    for axis in (0, 1):
        A = commutator(b, u, axis, k)
        I = commutator_decomposition(b, u, axis, k)
        S = I[0] + I[1] + I[2] + I[3]
        assert lp_norm(S - A, np.inf, SUB) <= 1e-10


def test_decomposition_constant_b_all_terms_vanish():
    _, u = _fields(128)
    c = GridField2D.unit_square(128, lambda x, y: -1.5 + 0 * x)
    k = make_mollifier(1 / 16, 1 / 128)
    for term in commutator_decomposition(c, u, 0, k):
        assert lp_norm(term, np.inf, SUB) <= 1e-11


def test_commutator_converges_for_cone():
    b, u = _fields(512)
    norms = [lp_norm(commutator(b, u, 0, make_mollifier(e, 1 / 512)), 1, SUB)
             for e in (1 / 8, 1 / 16, 1 / 32, 1 / 64)]
    assert all(a > b_ for a, b_ in zip(norms, norms[1:]))
    assert norms[-1] <= 0.1 * norms[0]
    table = convergence_table((1 / 8, 1 / 16, 1 / 32, 1 / 64), norms)
    assert math.isnan(table[0][2]) and table[1][2] < 1


def test_piece_bounds_and_constant():
    b, u = _fields(256)
    gb = np.hypot(*[grid_derivative(b, a).values for a in (0, 1)])
    gnorm = float(np.sqrt(np.sum(gb ** 2)) / 256)
    unorm = lp_norm(u, 2)
    for eps in (1 / 8, 1 / 16, 1 / 32):
        k = make_mollifier(eps, 1 / 256)
        C = theoretical_constant(k)
        assert 3 < C < 50
        pieces = [lp_norm(t, 1, SUB) for t in commutator_decomposition(b, u, 0, k)]
        assert sum(pieces) <= C * gnorm * unorm
        assert lp_norm(commutator(b, u, 0, k), 1, SUB) <= C * gnorm * unorm


def test_commutator_requires_same_grid():
    a = GridField2D.unit_square(32, lambda x, y: x)
    b = GridField2D.unit_square(64, lambda x, y: x)
    with pytest.raises(PreconditionError):
        commutator(a, b, 0, make_mollifier(0.1, 1 / 32))


# ---------------------------------------------------------------- norms and export

def test_lp_norms():
    n = 200
    assert lp_norm(GridField2D.unit_square(n, lambda x, y: 0 * x), 2) == 0.0
    one = GridField2D.unit_square(n, lambda x, y: 1 + 0 * x)
    for p in (1, 2, 3.5, np.inf):
        assert lp_norm(one, p) == pytest.approx(1.0, rel=1e-12)
    s = GridField2D.unit_square(n, lambda x, y: np.sin(2 * np.pi * x))
    assert abs(lp_norm(s, 2) - 1 / math.sqrt(2)) <= 1e-12 + 10 / n ** 2
    with pytest.raises(PreconditionError):
        lp_norm(one, 2, (2.0, 3.0, 2.0, 3.0))
    g = mollify(one, make_mollifier(0.1, 1 / n))
    with pytest.raises(MarginError):
        lp_norm(g, 1)


def test_csv_exports(tmp_path):
    rows = convergence_table([0.1, 0.05], [1.0, 0.3])
    p = tmp_path / "conv.csv"
    write_convergence_csv(rows, p)
    with open(p) as fh:
        r = list(csv.reader(fh))
    assert r[0] == ["epsilon", "l1_norm", "ratio_vs_previous"]
    assert float(r[2][2]) == pytest.approx(0.3)
    f = GridField2D.unit_square(4, lambda x, y: x * y)
    q = tmp_path / "field.csv"
    write_field_csv(f, q)
    with open(q) as fh:
        r = list(csv.reader(fh))
    assert len(r) == 17 and r[0] == ["x", "y", "value", "valid"]
