import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightedpick import (
    AlgebraSpec,
    BaseMeasure,
    ClosedFormKernel,
    DomainKind,
    DomainSpec,
    SpaceSpec,
    build_cyclic_model,
    build_weighted_model,
    omega_f_check,
    rescaled_cyclic_kernel,
    weighted_kernel_eval,
)
from weightedpick.errors import DegenerateError, DomainError, OutsideOmegaFError
from weightedpick.instance import annulus_grid
from weightedpick.polynomial import CPolynomial, random_polynomial
from weightedpick.weighted import TruncationWarning, enumerate_basis

from conftest import random_points
from oracles import hardy_disk_weighted_kernel


def measure(space="hardy", kind="polydisk", dim=1):
    return BaseMeasure(DomainSpec(DomainKind(kind), dim), SpaceSpec(space))


def poly1(coeffs):
    return CPolynomial.from_coefficients([(k,) for k in range(len(coeffs))], coeffs)


def test_unit_weight_converges_to_szego():
    m = measure()
    assert abs(weighted_kernel_eval(build_weighted_model(m, CPolynomial.constant(1), degree=2), [0.5], [0.5])
               - 1.3125) < 1e-14
    val = weighted_kernel_eval(build_weighted_model(m, CPolynomial.constant(1), degree=30), [0.5], [0.5])
    assert abs(val - 4 / 3) < 1e-8


@pytest.mark.parametrize("coeffs", [[1, 0.5], [0.2, 1], [1, -0.3 + 0.4j, 0.2j], [0.1, 0.2, 1]])
def test_exact_disk_oracle(coeffs):
    m = measure()
    f = poly1(coeffs)
    model = build_weighted_model(m, f, degree=60)
    z, w = 0.3 + 0.2j, -0.25 + 0.1j
    exact = hardy_disk_weighted_kernel(coeffs, z, w)
    assert abs(model([z], [w]) - exact) < 1e-6 * abs(exact)


def test_gram_route_reproduces_polynomials(rng):
    m = measure("bergman", "ball", 2)
    f = random_polynomial(2, 2, rng)
    model = build_weighted_model(m, f, degree=6)
    p = random_polynomial(2, 4, rng)
    for z in random_points(rng, 3, 2, radius=0.4):
        assert abs(model.pairing(p, z) - p(z)) < 1e-9


def test_two_routes_agree(rng):
    for dim in (1, 2):
        m = measure("hardy", "polydisk", dim)
        for _ in range(3):
            f = random_polynomial(dim, 3, rng)
            deg = 12 if dim == 1 else 7
            gram = build_weighted_model(m, f, degree=deg)
            cyc = build_cyclic_model(m, f, degree=deg)
            pts = random_points(rng, 4, dim, radius=0.6)
            J = cyc.rescaled_matrix(pts)
            K = gram.kernel_matrix(pts)
            assert np.max(np.abs(J - K)) < 1e-9 * max(1, np.abs(K).max())


def test_isometry_between_weighted_and_cyclic(rng):
    # p -> p f / ||f|| is unitary from A^2(nu) onto A[f]
    m = measure("bergman", "polydisk", 2)
    f = random_polynomial(2, 2, rng)
    gram = build_weighted_model(m, f, degree=4)
    cyc = build_cyclic_model(m, f, degree=4)
    assert np.allclose(cyc.gram / cyc.f_norm_sq, gram.gram, atol=1e-13)
    assert np.isclose(cyc.f_norm_sq, gram.mass)


def test_projected_kernel_reproduces_on_cyclic_subspace(rng):
    m = measure("hardy", "ball", 2)
    f = random_polynomial(2, 2, rng)
    cyc = build_cyclic_model(m, f, degree=5)
    p = random_polynomial(2, 3, rng)
    pf = (p * f).coefficient_vector(cyc.indices)
    for z in random_points(rng, 3, 2, radius=0.4):
        kz = cyc.kernel_vectors(z[None, :])
        inner = cyc._inner(pf[:, None], kz)[0, 0]
        assert abs(inner - p(z) * f(z)) < 1e-9


def test_nested_truncations_are_monotone(rng):
    m = measure("hardy", "polydisk", 2)
    model = build_weighted_model(m, random_polynomial(2, 2, rng), degree=7)
    pts = random_points(rng, 5, 2, radius=0.6)
    diag = model.nested_diagonals(pts, list(range(-1, 8)))
    assert np.all(np.diff(diag, axis=0) >= -1e-12 * diag.max())
    assert np.allclose(diag[-1], np.real(np.diag(model.kernel_matrix(pts))))


def test_tail_bound_brackets_exact_kernel():
    rng = np.random.default_rng(5)
    m = measure()
    for _ in range(10):
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        c /= np.linalg.norm(c)
        model = build_weighted_model(m, poly1(c), degree=12)
        pts = random_points(rng, 4, 1, radius=0.6)
        tail, rigorous = model.tail_bound(pts)
        assert rigorous
        trunc = np.real(np.diag(model.kernel_matrix(pts)))
        exact = np.real(hardy_disk_weighted_kernel(c, pts[:, 0], pts[:, 0]))
        assert np.all(exact - trunc <= tail * (1 + 1e-9) + 1e-12)
        assert np.all(trunc <= exact * (1 + 1e-12))


def test_generated_algebra_of_squares():
    m = measure()
    alg = AlgebraSpec.generated([CPolynomial.monomial((2,))])
    basis = enumerate_basis(alg, 1, 10)
    assert basis.max_degree == 20
    model = build_weighted_model(m, CPolynomial.constant(1), alg, degree=25)
    z, w = 0.5, 0.4j
    expected = 1 / (1 - (z * np.conj(w)) ** 2)
    assert abs(model([z], [w]) - expected) < 1e-10


def test_omega_f():
    m = measure()
    cyc = build_cyclic_model(m, CPolynomial.monomial((1,)), degree=40)
    inside, mag = omega_f_check(cyc, [0.0])
    assert not inside and mag < 1e-12
    assert omega_f_check(cyc, [0.5]) == (True, pytest.approx(0.5))
    with pytest.raises(OutsideOmegaFError):
        rescaled_cyclic_kernel(cyc, [0.0], [0.5])
    assert abs(rescaled_cyclic_kernel(cyc, [0.5], [0.5]) - 4 / 3) < 1e-12


def test_evaluation_radius_guards():
    model = build_weighted_model(measure(), CPolynomial.constant(1), degree=4)
    with pytest.warns(TruncationWarning):
        model.kernel_matrix(np.array([[0.7]]))
    with pytest.raises(DomainError):
        model.kernel_matrix(np.array([[0.95]]))


def test_degenerate_weights():
    with pytest.raises(DegenerateError):
        build_weighted_model(measure(), CPolynomial(1, {}), degree=3)


def test_grid_routes_agree():
    m = BaseMeasure(annulus_grid(0.2, 0.8, 0.05), SpaceSpec.bergman())
    f = poly1([0.3, 1.0])
    gram = build_weighted_model(m, f, degree=8)
    cyc = build_cyclic_model(m, f, degree=8)
    pts = np.array([[0.5], [0.3j], [-0.4 + 0.2j]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        assert np.max(np.abs(cyc.rescaled_matrix(pts) - gram.kernel_matrix(pts))) < 1e-7


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["hardy", "bergman"]), st.sampled_from(["polydisk", "ball"]))
def test_kernel_matrix_is_hermitian_psd(seed, space, kind):
    rng = np.random.default_rng(seed)
    m = measure(space, kind, 2)
    model = build_weighted_model(m, random_polynomial(2, 2, rng), degree=6)
    K = model.kernel_matrix(random_points(rng, 5, 2, radius=0.4))
    assert np.allclose(K, K.conj().T, atol=1e-12 * np.abs(K).max())
    assert np.linalg.eigvalsh(K).min() > -1e-9 * np.abs(K).max()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_unit_weight_truncation_below_closed_form(seed):
    rng = np.random.default_rng(seed)
    m = measure("bergman", "ball", 2)
    model = build_weighted_model(m, CPolynomial.constant(2), degree=8)
    z = random_points(rng, 1, 2, radius=0.4)
    exact = ClosedFormKernel(m.space, m.domain)(z[0], z[0]).real
    assert model.kernel_matrix(z)[0, 0].real <= exact * (1 + 1e-12)


def test_weight_z_reproduces_szego_model():
    m = measure()
    a = build_weighted_model(m, CPolynomial.monomial((1,)), degree=3)
    b = build_weighted_model(m, CPolynomial.constant(1), degree=3)
    pts = np.array([[0.1], [0.5j], [-0.3 + 0.2j]])
    assert np.allclose(a.kernel_matrix(pts), b.kernel_matrix(pts), atol=1e-14)


def test_cyclic_kernel_of_z():
    cyc = build_cyclic_model(measure(), CPolynomial.monomial((1,)), degree=30)
    assert abs(cyc([0.5], [0.5]) - 1 / 3) < 1e-6
    assert abs(rescaled_cyclic_kernel(cyc, [0.5], [0.5]) - 4 / 3) < 1e-5
