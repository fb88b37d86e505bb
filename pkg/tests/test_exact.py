"""Exact ensemble enumeration: channels, moments, invariances."""
from itertools import combinations

import numpy as np
import pytest

from matchgate_shadows import ShadowSample, lambda_eigenvalue, single_sample_estimate
from matchgate_shadows._rng import derive_rng
from matchgate_shadows.errors import ResourceError
from matchgate_shadows.exact import (
    born_probabilities_exact,
    check_matching_invariance,
    check_sign_invariance,
    ensemble_as_objects,
    enumerate_signed_permutation_group,
    estimator_moments_exact,
    exact_mean_estimate,
    exact_second_moment,
    lambda_diagonal,
    matching_representative_ensemble,
    measurement_channel_dense,
    measurement_channel_exact,
    monomial_state_expectations,
    random_sub_ensemble,
)
from matchgate_shadows.givens import sequence_of_signed_permutation
from matchgate_shadows.statevec import apply_sequence, basis_state, random_state


def test_group_sizes():
    perms, signs = enumerate_signed_permutation_group(1, determinant=1)
    assert len(perms) == 4
    perms, signs = enumerate_signed_permutation_group(2, determinant=1)
    assert len(perms) == 192
    perms, signs = enumerate_signed_permutation_group(2, determinant=None)
    assert len(perms) == 384
    with pytest.raises(ResourceError):
        enumerate_signed_permutation_group(4)


def test_matching_representatives():
    perms, signs = matching_representative_ensemble(2)
    assert len(perms) == 3
    perms3, _ = matching_representative_ensemble(3)
    assert len(perms3) == 15


def test_born_probabilities_match_dense_simulation():
    n = 2
    state = random_state(n, derive_rng(0))
    perms, signs = random_sub_ensemble(n, 40, derive_rng(1), determinant=None)
    probs = born_probabilities_exact(perms, signs, state)
    for e, sp in enumerate(ensemble_as_objects(perms, signs, n)):
        evolved = apply_sequence(state, sequence_of_signed_permutation(sp))
        np.testing.assert_allclose(probs[e], evolved.probabilities(), atol=1e-12)


def test_channel_exact_equals_dense_oracle():
    n = 2
    perms, signs = enumerate_signed_permutation_group(n, determinant=1)
    exact = measurement_channel_exact(perms, signs)
    dense = measurement_channel_dense(ensemble_as_objects(perms, signs, n))
    np.testing.assert_allclose(exact, dense, atol=1e-12)
    # and on a random weighted sub-ensemble
    sub_p, sub_s = random_sub_ensemble(n, 25, derive_rng(2), determinant=None)
    rng = derive_rng(3)
    w = rng.random(25)
    w /= w.sum()
    exact = measurement_channel_exact(sub_p, sub_s, weights=w)
    dense = measurement_channel_dense(ensemble_as_objects(sub_p, sub_s, n), weights=w)
    np.testing.assert_allclose(exact, dense, atol=1e-12)


def test_channel_diagonal_lambda_n2():
    n = 2
    perms, signs = enumerate_signed_permutation_group(n, determinant=1)
    np.testing.assert_allclose(
        measurement_channel_exact(perms, signs), lambda_diagonal(n), atol=1e-12
    )
    rp, rs = matching_representative_ensemble(n)
    np.testing.assert_allclose(
        measurement_channel_exact(rp, rs), lambda_diagonal(n), atol=1e-12
    )


def test_channel_diagonal_lambda_n3_representatives():
    n = 3
    rp, rs = matching_representative_ensemble(n)
    np.testing.assert_allclose(
        measurement_channel_exact(rp, rs), lambda_diagonal(n), atol=1e-12
    )
    dense = measurement_channel_dense(ensemble_as_objects(rp, rs, n))
    np.testing.assert_allclose(dense, lambda_diagonal(n), atol=1e-12)


def test_moments_against_brute_force_enumeration():
    # oracle: per element, dense-evolve the state, enumerate all outcomes and
    # average single_sample_estimate directly
    n = 2
    state = random_state(n, derive_rng(4))
    perms, signs = matching_representative_ensemble(n)
    mus = list(combinations(range(1, 2 * n + 1), 2)) + [(1, 2, 3, 4)]
    means, seconds = estimator_moments_exact(perms, signs, state, mus)
    for j, mu in enumerate(mus):
        mean = 0.0
        second = 0.0
        for sp in ensemble_as_objects(perms, signs, n):
            evolved = apply_sequence(state, sequence_of_signed_permutation(sp))
            probs = evolved.probabilities()
            for zi in range(2**n):
                z = tuple((zi >> (n - k)) & 1 for k in range(1, n + 1))
                val = single_sample_estimate(ShadowSample(sp, z, "o"), mu)
                mean += probs[zi] * val
                second += probs[zi] * abs(val) ** 2
        mean /= len(perms)
        second /= len(perms)
        assert abs(means[j] - mean) < 1e-12
        assert abs(seconds[j] - second) < 1e-12


def test_exact_unbiasedness():
    n = 2
    state = random_state(n, derive_rng(5))
    expect = monomial_state_expectations(state)
    for perms, signs in (
        enumerate_signed_permutation_group(n, determinant=1),
        matching_representative_ensemble(n),
    ):
        for deg in (2, 4):
            for mu in combinations(range(1, 2 * n + 1), deg):
                mask = sum(1 << (i - 1) for i in mu)
                mean = exact_mean_estimate(perms, signs, state, mu)
                assert abs(mean - expect[mask]) < 1e-10


def test_second_moment_identity_ensemble():
    # a singleton {identity} ensemble on |0...0>: the estimate is always
    # lambda^{-1} i, so E|o|^2 = lambda^{-2}
    n = 2
    perms = np.array([[1, 2, 3, 4]], dtype=np.int8)
    signs = np.ones_like(perms)
    state = basis_state("0" * n)
    m2 = exact_second_moment(perms, signs, state, (1, 2))
    lam = float(lambda_eigenvalue(1, n))
    assert abs(m2 - 1 / lam**2) < 1e-12


def test_shadow_norm_bound_full_group():
    n = 2
    perms, signs = enumerate_signed_permutation_group(n, determinant=1)
    state = random_state(n, derive_rng(6))
    mus = list(combinations(range(1, 2 * n + 1), 2)) + [(1, 2, 3, 4)]
    _, seconds = estimator_moments_exact(perms, signs, state, mus)
    for mu, m2 in zip(mus, seconds):
        lam = float(lambda_eigenvalue(len(mu) // 2, n))
        assert m2 <= 1 / lam + 1e-12


def test_sign_invariance_fast():
    n = 2
    perms, signs = enumerate_signed_permutation_group(n, determinant=1)
    state = random_state(n, derive_rng(7))
    rep = check_sign_invariance(perms, signs, state, trials=5, rng=derive_rng(8))
    assert rep.passed
    assert rep.max_moment_deviation <= 1e-10
    assert rep.max_channel_deviation <= 1e-10
    # flipping all signs of one element changes nothing either
    flipped = signs.copy()
    flipped[0] = -flipped[0]
    base = exact_second_moment(perms, signs, state, (1, 2))
    assert abs(exact_second_moment(perms, flipped, state, (1, 2)) - base) < 1e-12


def test_matching_invariance_fast():
    n = 2
    perms, signs = matching_representative_ensemble(n)
    state = random_state(n, derive_rng(9))
    rep = check_matching_invariance(perms, signs, state, trials=8, rng=derive_rng(10))
    assert rep.passed
    assert rep.negative_control_deviation > 1e-6
    # explicit examples: pair-internal swap and pair reorder
    base = exact_second_moment(np.array([[1, 2, 3, 4]]), np.ones((1, 4), int), state, (1, 2))
    swap = exact_second_moment(np.array([[2, 1, 3, 4]]), np.ones((1, 4), int), state, (1, 2))
    reorder = exact_second_moment(np.array([[3, 4, 1, 2]]), np.ones((1, 4), int), state, (1, 2))
    assert abs(base - swap) < 1e-12 and abs(base - reorder) < 1e-12
    # changing the matching moves the moment for some observable
    other = exact_second_moment(np.array([[1, 3, 2, 4]]), np.ones((1, 4), int), state, (1, 2))
    assert abs(base - other) > 1e-6
