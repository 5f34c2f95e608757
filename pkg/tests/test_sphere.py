import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _data import generic_sphere_init, radially_separable
from hybridgis.annealing import AnnealingConfig
from hybridgis.dataset import from_arrays
from hybridgis.sphere import (
    MAX_CLAMPED_EPOCHS,
    RHO_MIN,
    DegenerateSphereError,
    SphereSeparator,
    clamp_center,
    inside_scores,
    nearest_sphere,
    sphere_cost,
    sphere_gradient,
    sphere_predict,
    spherical_stabilities,
    spherical_stability,
    train_minimerror_s,
)


def gamma_oracle(center, rho, x, label):
    n = len(x)
    d2 = sum((a - b) ** 2 for a, b in zip(x, center))
    return label * (d2 - rho**2) / (2 * rho * math.sqrt(n))


def radius_scan_oracle(X, y, center):
    """True if some radius around ``center`` separates inside -1 from outside +1."""
    d = np.linalg.norm(X - center, axis=1)
    return d[y == -1].max() < d[y == 1].min()


# -- stability ------------------------------------------------------------


@pytest.mark.parametrize("label", [-1, 1])
def test_surface_is_zero(label):
    s = SphereSeparator([1.0, 1.0], 2.0)
    assert spherical_stability(s, [3.0, 1.0], label) == 0.0


def test_center_pattern_forced_arithmetic():
    assert spherical_stability(SphereSeparator([0.0], 1.0), [0.0], -1) == 0.5


def test_stability_matches_formula(rng):
    for _ in range(20):
        c = rng.normal(size=3)
        rho = rng.uniform(0.2, 3)
        x = rng.normal(size=3)
        t = int(rng.choice([-1, 1]))
        got = spherical_stability(SphereSeparator(c, rho), x, t)
        assert got == pytest.approx(gamma_oracle(c, rho, x, t), rel=1e-12, abs=1e-14)


def test_stability_needs_label():
    with pytest.raises(ValueError):
        spherical_stability(SphereSeparator([0.0], 1.0), [0.0], None)


def test_separator_validation():
    with pytest.raises(ValueError):
        SphereSeparator([0.0], 0.0)
    with pytest.raises(ValueError):
        SphereSeparator([np.nan], 1.0)


def test_roundtrip():
    s = SphereSeparator([1.5, -2.0], 0.75)
    back = SphereSeparator.from_dict(s.to_dict())
    np.testing.assert_array_equal(back.center, s.center)
    assert back.radius == s.radius


# -- gradient -------------------------------------------------------------


def fd_gradient(data, center, rho, t, tl, h=1e-6):
    theta = np.append(center, rho)
    g = np.zeros_like(theta)
    for j in range(len(theta)):
        e = np.zeros_like(theta)
        e[j] = h
        hi, lo = theta + e, theta - e
        g[j] = (
            sphere_cost(data, SphereSeparator(hi[:-1], hi[-1]), t, tl)
            - sphere_cost(data, SphereSeparator(lo[:-1], lo[-1]), t, tl)
        ) / (2 * h)
    return g


@pytest.mark.parametrize("seed", range(100))
def test_gradient_finite_difference(seed):
    gen = np.random.default_rng(seed)
    n = 1 + seed % 4
    X = gen.normal(size=(15, n)) * 2
    y = np.where(gen.uniform(size=15) < 0.5, 1, -1)
    s = SphereSeparator(gen.normal(size=n), gen.uniform(0.5, 3))
    gam = spherical_stabilities(s, from_arrays(X, y))
    keep = np.abs(gam) > 1e-3
    data = from_arrays(X[keep], y[keep])
    t = gen.uniform(0.2, 2)
    g = sphere_gradient(data, s, t, 0.3 * t)
    ref = fd_gradient(data, s.center, s.radius, t, 0.3 * t)
    assert np.linalg.norm(g - ref) <= 1e-5 * max(np.linalg.norm(ref), 1e-8)


# -- prediction -----------------------------------------------------------


def test_predict_cases():
    s = SphereSeparator([1.0, 0.0], 2.0)
    assert sphere_predict(s, [1.0, 0.0]) == -1
    assert sphere_predict(s, [3.0, 0.0]) == -1  # boundary is inside
    assert sphere_predict(s, [5.0, 0.0]) == 1
    assert sphere_predict(s, np.array([[1.0, 0.0], [5.0, 0.0]])).tolist() == [-1, 1]


@given(st.integers(0, 10_000))
def test_prediction_agrees_with_stability_sign(seed):
    gen = np.random.default_rng(seed)
    s = SphereSeparator(gen.normal(size=2), gen.uniform(0.1, 3))
    X = gen.normal(size=(30, 2)) * 2
    y = np.where(gen.uniform(size=30) < 0.5, 1, -1)
    gam = spherical_stabilities(s, from_arrays(X, y))
    pred = sphere_predict(s, X)
    # gamma > 0 exactly when correct; gamma == 0 lands on the inside (-1) side
    assert np.all((gam > 0) == ((pred == y) & (gam != 0)))
    assert np.all(pred[gam == 0] == -1)


@given(st.integers(0, 10_000))
def test_label_flip_duality(seed):
    gen = np.random.default_rng(seed)
    s = SphereSeparator(gen.normal(size=3), gen.uniform(0.1, 3))
    X = gen.normal(size=(20, 3))
    y = np.where(gen.uniform(size=20) < 0.5, 1, -1)
    g = spherical_stabilities(s, from_arrays(X, y))
    g_flip = spherical_stabilities(s, from_arrays(X, -y))
    np.testing.assert_array_equal(g_flip, -g)
    # complement rule: inside means +1
    complement = np.where(np.sum((X - s.center) ** 2, axis=1) <= s.radius**2, 1, -1)
    strict = np.sum((X - s.center) ** 2, axis=1) != s.radius**2
    np.testing.assert_array_equal(complement[strict], -sphere_predict(s, X)[strict])


def test_inside_scores_and_nearest_sphere():
    a = SphereSeparator([0.0, 0.0], 1.0)
    b = SphereSeparator([4.0, 0.0], 1.0)
    X = np.array([[0.1, 0.0], [3.9, 0.0], [2.0, 0.0]])
    assert nearest_sphere([a, b], X).tolist() == [0, 1, 0]  # midpoint ties to the lowest
    assert inside_scores(a, [[0.0, 0.0]])[0] == pytest.approx(1 / (2 * math.sqrt(2)))


def test_clamp_center():
    b = np.array([[0.0, 1.0], [-1.0, 1.0]])
    np.testing.assert_array_equal(clamp_center(np.array([2.0, -3.0]), b), [1.0, -1.0])


# -- training -------------------------------------------------------------


def unit_disk_and_ring(seed=0):
    gen = np.random.default_rng(seed)
    a = gen.uniform(0, 2 * np.pi, 60)
    r = np.r_[np.sqrt(gen.uniform(0, 1, 30)) * 0.99, np.full(30, 3.0)]
    X = np.c_[r * np.cos(a), r * np.sin(a)]
    y = np.r_[-np.ones(30), np.ones(30)]
    return from_arrays(X, y)


def test_disk_and_ring_zero_errors():
    data = unit_disk_and_ring()
    assert radius_scan_oracle(data.X, data.y, np.zeros(2))
    s, _ = train_minimerror_s(data, SphereSeparator([0.0, 0.0], 2.0))
    assert np.all(sphere_predict(s, data.X) == data.y)


def test_already_separated_init_keeps_zero_errors():
    data = unit_disk_and_ring(1)
    init = SphereSeparator([0.0, 0.0], 2.0)
    assert np.all(sphere_predict(init, data.X) == data.y)
    s, diag = train_minimerror_s(data, init)
    assert np.all(sphere_predict(s, data.X) == data.y)
    assert min(diag.errors) == 0


@pytest.mark.parametrize("seed", range(5))
def test_generic_init_radial_data(seed):
    data, c, _ = radially_separable(seed)
    assert radius_scan_oracle(data.X, data.y, c)
    s, _ = train_minimerror_s(data, generic_sphere_init(data, seed))
    assert np.all(sphere_predict(s, data.X) == data.y)


def test_training_deterministic():
    data, _, _ = radially_separable(3)
    init = generic_sphere_init(data, 3)
    a, _ = train_minimerror_s(data, init)
    b, _ = train_minimerror_s(data, init)
    assert a.center.tobytes() == b.center.tobytes() and a.radius == b.radius


def test_translation_equivariance():
    data, _, _ = radially_separable(2)
    init = generic_sphere_init(data, 2)
    v = np.array([3.25, -1.5])
    a, _ = train_minimerror_s(data, init)
    b, _ = train_minimerror_s(
        from_arrays(data.X + v, data.y), SphereSeparator(init.center + v, init.radius)
    )
    # float rounding of x - w differs after the shift, so not bitwise
    np.testing.assert_allclose(b.center, a.center + v, atol=1e-6)
    assert b.radius == pytest.approx(a.radius, abs=1e-6)


def test_radius_never_below_floor():
    gen = np.random.default_rng(0)
    X = gen.normal(size=(20, 2))
    y = np.ones(20)
    y[0] = -1
    s, _ = train_minimerror_s(from_arrays(X, y), SphereSeparator(X[0], 0.01), AnnealingConfig(max_epochs=100))
    assert s.radius >= RHO_MIN


def test_degenerate_sphere_raises():
    # every pattern outside and tightly packed: at high T the cost keeps
    # shrinking the radius onto the floor
    gen = np.random.default_rng(0)
    X = gen.normal(size=(10, 2)) * 0.01
    cfg = AnnealingConfig(max_epochs=200)
    with pytest.raises(DegenerateSphereError) as info:
        train_minimerror_s(from_arrays(X, np.ones(10)), SphereSeparator([0.0, 0.0], 0.5), cfg)
    assert info.value.diagnostics.epochs > MAX_CLAMPED_EPOCHS


def test_border_box_keeps_center_inside():
    data, _, _ = radially_separable(1)
    lo, hi = data.X.min(axis=0), data.X.max(axis=0)
    bounds = np.c_[lo, hi]
    s, diag = train_minimerror_s(data, generic_sphere_init(data, 1), bounds=bounds)
    if not any("border" in n for n in diag.notes):
        assert np.all(s.center >= lo) and np.all(s.center <= hi)


def test_border_box_dropped_when_it_costs_errors():
    # the only good center sits outside a deliberately wrong box
    data = unit_disk_and_ring()
    bounds = np.array([[5.0, 6.0], [5.0, 6.0]])
    s, diag = train_minimerror_s(data, SphereSeparator([0.0, 0.0], 2.0), bounds=bounds)
    assert any("border" in n for n in diag.notes)
    assert np.all(sphere_predict(s, data.X) == data.y)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        train_minimerror_s(unit_disk_and_ring(), SphereSeparator([0.0], 1.0))
