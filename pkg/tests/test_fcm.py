import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridgis.fcm import (
    FcmConfig,
    FcmError,
    FcmModel,
    fcm_fit,
    fcm_objective,
    harden,
    random_memberships,
    update_centroids,
    update_memberships,
)


def objective_oracle(X, C, m, phi):
    total = 0.0
    for i in range(len(X)):
        for k in range(len(C)):
            d2 = sum((a - b) ** 2 for a, b in zip(X[i], C[k]))
            total += m[i][k] ** phi * d2
    return total


def kmeans_oracle(X, k, restarts, seed):
    """Lloyd's algorithm, best of many seeded restarts."""
    gen = np.random.default_rng(seed)
    best, best_sse = None, np.inf
    for _ in range(restarts):
        C = X[gen.choice(len(X), k, replace=False)]
        for _ in range(100):
            lab = np.argmin(((X[:, None] - C[None]) ** 2).sum(-1), axis=1)
            new = np.array([X[lab == j].mean(0) if np.any(lab == j) else C[j] for j in range(k)])
            if np.allclose(new, C):
                break
            C = new
        sse = ((X - C[lab]) ** 2).sum()
        if sse < best_sse:
            best, best_sse = C, sse
    return best


# -- objective ------------------------------------------------------------


def test_objective_zero_at_centroid():
    assert fcm_objective([[1.0, 2.0]], [[1.0, 2.0]], [[1.0]], 2.0) == 0.0


def test_objective_single_term():
    assert fcm_objective([[2.0]], [[0.0]], [[1.0]], 2.0) == 4.0


def test_objective_matches_double_loop(rng):
    X = rng.normal(size=(4, 3))
    C = rng.normal(size=(2, 3))
    m = random_memberships(4, 2, 3)
    assert fcm_objective(X, C, m, 2.0) == pytest.approx(objective_oracle(X, C, m, 2.0), rel=1e-12)


def test_objective_dimension_mismatch():
    with pytest.raises(ValueError):
        fcm_objective([[1.0, 2.0]], [[1.0]], [[1.0]], 2.0)


# -- memberships ----------------------------------------------------------


def test_equidistant_row():
    m = update_memberships([[0.0]], [[-1.0], [1.0]], 2.0)
    np.testing.assert_allclose(m, [[0.5, 0.5]])


def test_coincident_pattern():
    m = update_memberships([[3.0, 1.0]], [[0.0, 0.0], [3.0, 1.0]], 2.0)
    np.testing.assert_array_equal(m, [[0.0, 1.0]])


def test_coincident_with_two_centroids_splits():
    m = update_memberships([[1.0]], [[1.0], [5.0], [1.0]], 2.0)
    np.testing.assert_array_equal(m, [[0.5, 0.0, 0.5]])


def test_distances_one_and_two():
    # 1/d^2 weights: 1 and 1/4, normalised -> 0.8, 0.2
    m = update_memberships([[0.0]], [[1.0], [2.0]], 2.0)
    np.testing.assert_allclose(m, [[0.8, 0.2]], rtol=1e-14)


def test_membership_log_space_survives_tiny_distances():
    m = update_memberships([[0.0]], [[1e-200], [1.0]], 1.5)
    assert np.all(np.isfinite(m))
    assert m[0, 0] == pytest.approx(1.0)


@given(st.integers(0, 10_000), st.floats(1.05, 20.0), st.integers(2, 5))
def test_rows_sum_to_one(seed, phi, c):
    gen = np.random.default_rng(seed)
    X = gen.normal(size=(12, 3))
    m = update_memberships(X, gen.normal(size=(c, 3)), phi)
    assert np.all((m >= 0) & (m <= 1))
    np.testing.assert_allclose(m.sum(axis=1), 1.0, atol=1e-9)


def test_fuzziness_limit():
    # centroids well outside the data keep distance ratios moderate; with
    # exponent 2/(phi-1) a ratio r still shifts memberships by ~r^(2/49)
    gen = np.random.default_rng(1)
    X = gen.uniform(-1, 1, size=(20, 2))
    C = np.array([[4.0, 0.0], [-4.0, 0.0], [0.0, 4.0]])
    m = update_memberships(X, C, 50.0)
    assert np.all(np.abs(m - 1 / 3) < 0.01)


def test_fuzziness_deviation_shrinks_with_phi():
    gen = np.random.default_rng(1)
    X = gen.normal(size=(20, 2))
    C = gen.normal(size=(3, 2)) * 3
    dev = [np.abs(update_memberships(X, C, phi) - 1 / 3).max() for phi in (2, 5, 50, 500)]
    assert all(a > b for a, b in zip(dev, dev[1:]))
    assert dev[-1] < 0.01


def test_membership_matches_closed_form(rng):
    X = rng.normal(size=(6, 2))
    C = rng.normal(size=(3, 2))
    phi = 2.5
    m = update_memberships(X, C, phi)
    for i in range(6):
        d = [np.linalg.norm(X[i] - c) for c in C]
        for k in range(3):
            expect = 1.0 / sum((d[k] / d[j]) ** (2 / (phi - 1)) for j in range(3))
            assert m[i, k] == pytest.approx(expect, rel=1e-12)


# -- centroids ------------------------------------------------------------


def test_hard_memberships_give_means():
    X = np.array([[0.0], [2.0], [10.0], [14.0]])
    m = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float)
    np.testing.assert_array_equal(update_centroids(X, m, 2.0), [[1.0], [12.0]])


def test_half_half_gives_midpoint():
    C = update_centroids([[0.0], [2.0]], [[0.5, 0.5], [0.5, 0.5]], 2.0)
    np.testing.assert_allclose(C, [[1.0], [1.0]])


def test_centroids_match_weighted_mean(rng):
    X = rng.normal(size=(5, 3))
    m = random_memberships(5, 2, 11)
    phi = 2.0
    C = update_centroids(X, m, phi)
    for k in range(2):
        w = [m[i, k] ** phi for i in range(5)]
        expect = [sum(w[i] * X[i, j] for i in range(5)) / sum(w) for j in range(3)]
        np.testing.assert_allclose(C[k], expect, rtol=1e-12)


def test_zero_mass_class_raises():
    with pytest.raises(FcmError) as info:
        update_centroids([[0.0], [1.0]], [[1.0, 0.0], [1.0, 0.0]], 2.0, iteration=4)
    assert info.value.iteration == 4


# -- fit ------------------------------------------------------------------


def test_fixed_point_converges_in_one_iteration():
    X = np.array([[0.0, 0.0], [5.0, 5.0], [0.0, 0.0]])
    model, m = fcm_fit(X, FcmConfig(c=2, init="hard"), init_labels=[0, 1, 0])
    assert model.iterations == 1 and model.converged
    assert model.final_objective == 0.0
    np.testing.assert_array_equal(harden(m), [0, 1, 0])


def test_needs_more_patterns_than_classes():
    with pytest.raises(ValueError):
        fcm_fit([[0.0], [1.0]], FcmConfig(c=2))


def test_huge_stop_eps_stops_after_first_iteration():
    X = np.random.default_rng(0).normal(size=(20, 2))
    model, _ = fcm_fit(X, FcmConfig(stop_eps=10.0))
    assert model.iterations == 1 and model.converged


def test_max_iter_reports_not_converged():
    X = np.random.default_rng(0).normal(size=(50, 2))
    model, _ = fcm_fit(X, FcmConfig(stop_eps=1e-15, max_iter=2))
    assert model.iterations == 2 and not model.converged


@pytest.fixture(scope="module")
def two_blobs():
    gen = np.random.default_rng(42)
    A = gen.normal(size=(40, 2))
    B = gen.normal(size=(40, 2)) + [10.0, 0.0]
    return np.vstack([A, B])


def test_two_separated_clusters_match_kmeans(two_blobs):
    model, _ = fcm_fit(two_blobs, FcmConfig(c=2, phi=2.0, stop_eps=1e-3, seed=5))
    ref = kmeans_oracle(two_blobs, 2, restarts=20, seed=0)
    for c in model.centroids:
        assert np.min(np.linalg.norm(ref - c, axis=1)) < 0.5
    assert model.converged


@given(st.integers(0, 2**32), st.floats(1.2, 6.0))
def test_objective_trace_non_increasing(seed, phi):
    X = np.random.default_rng(seed % 1000).normal(size=(25, 2))
    model, _ = fcm_fit(X, FcmConfig(c=3, phi=phi, seed=seed, stop_eps=1e-6))
    trace = np.array(model.objective_trace)
    assert np.all(np.diff(trace) <= 1e-9 * np.maximum(1.0, trace[:-1]))
    assert model.final_objective >= 0


def test_fixed_point_at_convergence(two_blobs):
    cfg = FcmConfig(c=2, stop_eps=1e-6, seed=2)
    model, m = fcm_fit(two_blobs, cfg)
    C = update_centroids(two_blobs, update_memberships(two_blobs, model.centroids, 2.0), 2.0)
    assert np.max(np.abs(C - model.centroids)) < cfg.stop_eps


def test_fit_deterministic(two_blobs):
    a, ma = fcm_fit(two_blobs, FcmConfig(c=3, seed=9))
    b, mb = fcm_fit(two_blobs, FcmConfig(c=3, seed=9))
    assert a.centroids.tobytes() == b.centroids.tobytes()
    assert ma.tobytes() == mb.tobytes()
    assert a.objective_trace == b.objective_trace


def test_membership_invariants_after_fit(two_blobs):
    _, m = fcm_fit(two_blobs, FcmConfig(c=3, seed=1))
    assert np.all((m >= 0) & (m <= 1))
    np.testing.assert_allclose(m.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(m.sum(axis=0) > 0)


def test_model_roundtrip(two_blobs):
    model, _ = fcm_fit(two_blobs, FcmConfig(seed=3))
    back = FcmModel.from_dict(model.to_dict())
    np.testing.assert_array_equal(back.centroids, model.centroids)
    assert back.final_objective == model.final_objective


# -- harden ---------------------------------------------------------------


def test_harden_cases():
    assert harden(np.array([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]])).tolist() == [0, 0, 1]


def test_harden_matches_scan(rng):
    m = random_memberships(30, 4, 7)
    scan = []
    for row in m:
        best = 0
        for k in range(1, len(row)):
            if row[k] > row[best]:
                best = k
        scan.append(best)
    assert harden(m).tolist() == scan


@pytest.mark.parametrize(
    "kw", [dict(c=1), dict(phi=1.0), dict(stop_eps=0.0), dict(max_iter=0), dict(init="kmeans")]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        FcmConfig(**kw)
