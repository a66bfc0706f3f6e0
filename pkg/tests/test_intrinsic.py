import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gplab.errors import DegenerateInput, DimensionMismatch, EmptyCloud, MethodMismatch
from gplab.geometry import convex_hull, polytope_volume, surface_area
from gplab.grassmann import CircularCone, sample_subspaces
from gplab.intrinsic import (
    IVEstimate,
    default_method,
    intrinsic_volume,
    intrinsic_volumes,
    kappa,
    kubota_estimate,
    kubota_prefactor,
    local_functional,
    local_functional_batch,
    projected_volumes,
    v1_support_estimate,
)
from gplab.sampling import RandomStream

from oracles import unit_cube

seeds = st.integers(0, 2**32 - 1)


def gauss(seed, n, d):
    return np.random.default_rng(seed).standard_normal((n, d))


def test_kappa_values():
    assert kappa(0) == 1.0
    assert kappa(1) == pytest.approx(2.0)
    assert kappa(2) == pytest.approx(3.141593, abs=1e-6)
    assert kappa(3) == pytest.approx(4.18879, abs=1e-5)
    with pytest.raises(ValueError):
        kappa(-1)


def test_prefactor_values():
    for d in range(1, 7):
        assert kubota_prefactor(d, d) == pytest.approx(1.0)
    assert kubota_prefactor(2, 1) == pytest.approx(math.pi / 2)
    assert kubota_prefactor(3, 1) == pytest.approx(2.0)


def test_cube_exact_methods():
    cube = unit_cube(3)
    assert intrinsic_volume(cube, 3).value == pytest.approx(1.0, abs=1e-9)
    v2 = intrinsic_volume(cube, 2)
    assert v2.method == "exact-surface" and v2.value == pytest.approx(3.0, abs=1e-9)
    assert v2.std_error == 0.0


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_cube_kubota(ell):
    est = intrinsic_volume(unit_cube(3), ell, "kubota-mc", n_subspaces=20_000, stream=RandomStream(ell))
    assert abs(est.value - math.comb(3, ell)) <= 3 * est.std_error + 1e-12
    assert est.n_samples == 20_000


def test_thin_rectangle_half_perimeter():
    s, eps = 2.0, 1e-3
    rect = np.array([[0, 0], [s, 0], [s, eps], [0, eps]])
    assert intrinsic_volume(rect, 1).value == pytest.approx(s + eps, rel=1e-12)
    mc = intrinsic_volume(rect, 1, "kubota-mc", n_subspaces=50_000, stream=RandomStream(1))
    assert abs(mc.value - (s + eps)) <= 3 * mc.std_error


def test_support_estimator():
    assert v1_support_estimate(np.zeros((1, 3)), 100, RandomStream(1)).value == 0.0
    est = v1_support_estimate(unit_cube(3), 10**5, RandomStream(2))
    assert abs(est.value - 3.0) <= 3 * est.std_error
    with pytest.raises(EmptyCloud):
        v1_support_estimate(np.empty((0, 2)), 10, RandomStream(1))


def test_support_vs_kubota_on_random_clouds():
    misses = 0
    for t in range(50):
        pts = gauss(t, 30, 3)
        a = intrinsic_volume(pts, 1, "support-mc", n_directions=4000, stream=RandomStream(t, 1))
        b = intrinsic_volume(pts, 1, "kubota-mc", n_subspaces=4000, stream=RandomStream(t, 2))
        misses += abs(a.value - b.value) > 3 * math.hypot(a.std_error, b.std_error)
    assert misses <= 2  # 3-sigma: about 0.1 expected misses in 50


@pytest.mark.parametrize("d", [2, 3, 4])
def test_surface_vs_kubota(d):
    misses = 0
    for t in range(50):
        pts = gauss(100 * d + t, 25, d)
        a = intrinsic_volume(pts, d - 1)
        b = intrinsic_volume(pts, d - 1, "kubota-mc", n_subspaces=1000, stream=RandomStream(t))
        misses += abs(a.value - b.value) > 3 * b.std_error
    assert misses <= 2


def test_method_mismatch_and_bad_ell():
    pts = gauss(1, 20, 3)
    with pytest.raises(MethodMismatch):
        intrinsic_volume(pts, 2, "exact-volume")
    with pytest.raises(MethodMismatch):
        intrinsic_volume(pts, 1, "exact-surface")
    with pytest.raises(MethodMismatch):
        intrinsic_volume(pts, 2, "support-mc", stream=RandomStream(1))
    with pytest.raises(ValueError):
        intrinsic_volume(pts, 0)
    with pytest.raises(DegenerateInput):
        intrinsic_volume(np.zeros((5, 3)), 3)
    with pytest.raises(ValueError):
        IVEstimate(1, 1.0, 0.0, 0, "guess")
    assert default_method(4, 2) == "kubota-mc"


def test_projected_volume_dims():
    with pytest.raises(DimensionMismatch):
        projected_volumes(gauss(1, 10, 3), sample_subspaces(4, 2, 3, RandomStream(1)))


def test_lower_dimensional_projection_counts_zero():
    seg = np.array([[0.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0]])
    B = sample_subspaces(3, 2, 10, RandomStream(1))
    assert np.all(projected_volumes(seg, B) == 0.0)


@pytest.mark.parametrize("d,ell", [(3, 2), (4, 2), (4, 3), (5, 3)])
def test_general_path_matches_kernel_free_reference(d, ell):
    pts = gauss(d + ell, 30, d)
    B = sample_subspaces(d, ell, 20, RandomStream(3))
    ref = [polytope_volume(convex_hull(pts @ b.T)) for b in B]
    assert np.allclose(projected_volumes(pts, B), ref, rtol=1e-10)


@given(seeds, st.integers(2, 4), st.integers(1, 50))
def test_kubota_identity_at_full_dimension(seed, d, S):
    pts = gauss(seed, 50, d)
    exact = intrinsic_volume(pts, d).value
    mc = intrinsic_volume(pts, d, "kubota-mc", n_subspaces=S, stream=RandomStream(seed))
    assert mc.value == pytest.approx(exact, rel=1e-10)


@given(seeds, st.integers(2, 4), st.sampled_from([0.5, 2.0, 3.0]))
def test_homogeneity(seed, d, c):
    pts = gauss(seed, 30, d)
    for ell in (d, d - 1):
        a = intrinsic_volume(pts, ell).value
        b = intrinsic_volume(c * pts, ell).value
        assert b == pytest.approx(c ** ell * a, rel=1e-9)
    B = sample_subspaces(d, 1, 200, RandomStream(seed))
    a = kubota_estimate(pts, 1, B).value
    b = kubota_estimate(c * pts, 1, B).value
    assert b == pytest.approx(c * a, rel=1e-12)


@given(seeds, st.integers(2, 4), st.integers(1, 3))
def test_monotone_under_inclusion(seed, d, ell):
    ell = min(ell, d)
    pts = gauss(seed, 40, d)
    B = sample_subspaces(d, ell, 100, RandomStream(seed))
    small, big = projected_volumes(pts[:20], B), projected_volumes(pts, B)
    assert np.all(small <= big * (1 + 1e-12) + 1e-15)


def test_intrinsic_volumes_matches_single_calls():
    pts = gauss(5, 200, 3)
    B = {1: sample_subspaces(3, 1, 300, RandomStream(1))}
    many = intrinsic_volumes(pts, (1, 2, 3), subspaces=B)
    assert many[3].value == pytest.approx(intrinsic_volume(pts, 3).value)
    assert many[2].value == pytest.approx(intrinsic_volume(pts, 2).value)
    assert many[1].value == pytest.approx(intrinsic_volume(pts, 1, subspaces=B[1]).value)


# ------------------------------------------------------------ local functional

def _fixture(d=3, seed=0):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((d, d)) + 3 * np.eye(d)[0]
    z = rng.standard_normal(d)
    return z, F


def test_local_functional_full_dim_is_volume():
    z, F = _fixture()
    cone = CircularCone(np.zeros(3), np.eye(3)[2], 0.05)
    B = sample_subspaces(3, 3, 7, RandomStream(1))
    assert local_functional(z, F, cone, 3, B) == pytest.approx(polytope_volume(convex_hull(np.vstack([z, F]))))


@pytest.mark.parametrize("ell", [1, 2])
def test_local_functional_right_angle_is_unrestricted(ell):
    z, F = _fixture()
    cone = CircularCone(np.zeros(3), np.eye(3)[1], math.pi / 2)
    B = sample_subspaces(3, ell, 500, RandomStream(2))
    ref = kubota_estimate(np.vstack([z, F]), ell, B).value
    assert local_functional(z, F, cone, ell, B) == pytest.approx(ref, rel=1e-12)


@given(seeds, st.integers(1, 3), st.floats(0.05, 1.5))
def test_local_functional_nested_hulls(seed, ell, angle):
    z, F = _fixture(3, seed % 1000)
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(4))
    z2 = w @ np.vstack([z, F])
    cone = CircularCone(np.zeros(3), np.eye(3)[0], angle)
    B = sample_subspaces(3, ell, 200, RandomStream(seed))
    assert local_functional(z2, F, cone, ell, B) <= local_functional(z, F, cone, ell, B) + 1e-12


@pytest.mark.parametrize("d,ell", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 2), (4, 3)])
def test_batch_matches_scalar(d, ell):
    rng = np.random.default_rng(d * ell)
    F = rng.standard_normal((d, d)) + 2
    Z = rng.standard_normal((4, d))
    cone = CircularCone(np.zeros(d), np.eye(d)[0], 0.7)
    B = sample_subspaces(d, ell, 64, RandomStream(5))
    batch = local_functional_batch(Z, F, cone, ell, B)
    for k in range(4):
        pts = np.vstack([Z[k], F])
        ind = np.arccos(np.clip(np.linalg.norm(B @ cone.axis, axis=-1), 0, 1)) <= cone.half_angle
        ref = kubota_prefactor(d, ell) * (projected_volumes(pts, B) * ind).mean()
        assert batch[k] == pytest.approx(ref, rel=1e-10, abs=1e-14)
    with pytest.raises(DimensionMismatch):
        local_functional_batch(Z, F, cone, ell, sample_subspaces(d + 1, ell, 3, RandomStream(1)))
