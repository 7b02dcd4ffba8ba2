"""Colligation assembly from transfer-function decomposition data."""

import numpy as np
import pytest

import gen
from ndsys import (
    AglerData,
    DomainError,
    MatrixPolynomial,
    PreconditionError,
    RankAmbiguityError,
    RealizationError,
    ShapeError,
    assemble_colligation,
    builtin_examples,
    canonical_fixture,
    halton_disc,
    transfer_eval,
    verify_agler_identity,
)
from ndsys.realization import build_stacks, gram_matched_isometry


def poly_gap(sys, theta, points):
    return max(
        float(np.linalg.norm(transfer_eval(sys, z) - theta.evaluate(z)))
        for z in points
    )


def test_canonical_fixture_identity_is_exact():
    report = verify_agler_identity(canonical_fixture())
    assert report.passed
    assert report.max_residual <= 1e-12


def test_canonical_stack_values():
    # by hand at (0.5, 0.5): g carries the variable weights, f does not
    stacks = build_stacks(canonical_fixture())
    assert stacks.k_dim == 3 and stacks.l_dim == 3
    g = stacks.g((0.5, 0.5))
    f = stacks.f((0.5, 0.5))
    assert np.allclose(g, [[0.25], [0.5], [1.0]])
    assert np.allclose(f, [[0.5], [1.0], [0.25]])


def test_canonical_realization_is_conservative_and_minimal():
    res = assemble_colligation(canonical_fixture())
    assert res.state_dim == 1
    assert res.conservative
    assert res.padding == 0
    for value in res.residuals.values():
        assert value <= 1e-8
    pts = halton_disc(25, 2, 0.8)
    for z in pts:
        assert abs(transfer_eval(res.system, z)[0, 0] - z[0] * z[1]) <= 1e-10


def test_canonical_realization_matches_the_minimal_example_up_to_phase():
    # one-dimensional state leaves a single unitary freedom, a phase; peel
    # it off the c blocks and the two colligations coincide
    alpha = builtin_examples()["alpha"]
    res = assemble_colligation(canonical_fixture())
    omega_bar = res.system.c[0][0, 0] / alpha.c[0][0, 0]
    assert abs(abs(omega_bar) - 1.0) <= 1e-10
    omega = 1.0 / omega_bar
    for k in range(2):
        assert np.allclose(res.system.a[k], alpha.a[k], atol=1e-10)
        assert np.allclose(res.system.b[k], omega * alpha.b[k], atol=1e-10)
        assert np.allclose(res.system.c[k], alpha.c[k] * omega_bar, atol=1e-10)
        assert np.allclose(res.system.d[k], alpha.d[k], atol=1e-10)


@pytest.mark.parametrize("padding", [0, 1, 2])
def test_padding_grows_the_state_without_touching_the_transfer(padding):
    fix = canonical_fixture()
    res = assemble_colligation(fix, extra_padding=padding)
    assert res.state_dim == 1 + padding
    assert res.padding == padding
    assert res.conservative
    pts = halton_disc(20, 2, 0.8)
    assert poly_gap(res.system, fix.theta, pts) <= 1e-8


def test_negative_padding_rejected():
    with pytest.raises(DomainError):
        assemble_colligation(canonical_fixture(), extra_padding=-1)


@pytest.mark.parametrize(
    "seed,n,q",
    [(0, 2, 1), (1, 2, 2), (2, 3, 1), (3, 2, 2)],
)
def test_inner_fixtures_realize_conservatively(seed, n, q):
    rng = np.random.default_rng(100 + seed)
    data = gen.inner_fixture(rng, n, q)
    assert verify_agler_identity(data).passed
    res = assemble_colligation(data)
    assert res.conservative
    assert res.residuals["transfer"] <= 1e-7
    pts = halton_disc(15, n, 0.6)
    assert poly_gap(res.system, data.theta, pts) <= 1e-7


def test_tall_theta_gets_an_isometric_colligation():
    # two outputs fed by one input: the extension can only be isometric,
    # so the result is flagged non-conservative with a clean pencil
    half = np.sqrt(0.5)
    theta = MatrixPolynomial(
        n=2,
        shape=(2, 1),
        coeffs={
            (1, 0): np.array([[half], [0.0]]),
            (0, 1): np.array([[0.0], [half]]),
        },
    )
    factors = tuple(
        MatrixPolynomial(n=2, shape=(1, 1), coeffs={(0, 0): half * np.eye(1)})
        for _ in range(2)
    )
    data = AglerData(theta=theta, factors=factors, grid=tuple(halton_disc(40, 2, 0.7)))
    assert verify_agler_identity(data).passed
    res = assemble_colligation(data)
    assert not res.conservative
    assert res.residuals["conservativity_iso"] <= 1e-8
    assert res.state_dim == 1
    pts = halton_disc(20, 2, 0.8)
    assert poly_gap(res.system, theta, pts) <= 1e-8


def test_wide_theta_rejected():
    half = np.sqrt(0.5)
    theta = MatrixPolynomial(
        n=2,
        shape=(1, 2),
        coeffs={
            (1, 0): np.array([[half, 0.0]]),
            (0, 1): np.array([[0.0, half]]),
        },
    )
    factors = tuple(
        MatrixPolynomial(n=2, shape=(1, 2), coeffs={(0, 0): np.zeros((1, 2))})
        for _ in range(2)
    )
    data = AglerData(theta=theta, factors=factors, grid=tuple(halton_disc(10, 2, 0.7)))
    with pytest.raises(RealizationError):
        assemble_colligation(data)


def test_corrupted_decomposition_is_caught():
    fix = canonical_fixture()
    bad_theta = MatrixPolynomial(
        n=2, shape=(1, 1), coeffs={(1, 1): 1.3 * np.eye(1)}
    )
    bad = AglerData(theta=bad_theta, factors=fix.factors, grid=fix.grid)
    report = verify_agler_identity(bad)
    assert not report.passed
    assert report.max_residual > 1e-3
    with pytest.raises(PreconditionError):
        assemble_colligation(bad)


def test_nonvanishing_origin_rejected():
    fix = canonical_fixture()
    shifted = MatrixPolynomial(
        n=2, shape=(1, 1), coeffs={(0, 0): np.eye(1), (1, 1): np.eye(1)}
    )
    with pytest.raises(PreconditionError):
        assemble_colligation(
            AglerData(theta=shifted, factors=fix.factors, grid=fix.grid)
        )


def test_fixture_shape_gates():
    fix = canonical_fixture()
    with pytest.raises(ShapeError):
        AglerData(theta=fix.theta, factors=fix.factors[:1], grid=fix.grid)
    wide = MatrixPolynomial(n=2, shape=(1, 2), coeffs={(0, 0): np.zeros((1, 2))})
    with pytest.raises(ShapeError):
        AglerData(theta=fix.theta, factors=(fix.factors[0], wide), grid=fix.grid)
    with pytest.raises(ShapeError):
        AglerData(theta=fix.theta, factors=fix.factors, grid=((0.1, 0.2, 0.3),))


def test_empty_grid_rejected():
    fix = canonical_fixture()
    hollow = AglerData(theta=fix.theta, factors=fix.factors, grid=())
    with pytest.raises(DomainError):
        verify_agler_identity(hollow)
    with pytest.raises(DomainError):
        gram_matched_isometry(build_stacks(fix), grid=[])


def test_rank_dead_zone_is_refused():
    # pick the rank cutoff to sit exactly on a sampled singular value
    stacks = build_stacks(canonical_fixture(20))
    dom = np.hstack([stacks.g(z) for z in stacks.data.grid])
    rel = np.linalg.svd(dom, compute_uv=False)
    rel = rel / rel[0]
    with pytest.raises(RankAmbiguityError):
        gram_matched_isometry(stacks, rank_tol=float(2.0 * rel[1]))
