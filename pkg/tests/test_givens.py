"""Givens circuits, signed permutations, matchings and circuit rewrites."""
import math
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchgate_shadows import (
    DomainError,
    GivensRotation,
    GivensSequence,
    MajoranaMonomial,
    PerfectMatching,
    SignedPermutation,
    act_on_monomial,
    braid_rewrite,
    brickwall_transform,
    bubblesort_transpositions,
    canonical_permutation,
    circuit_from_json,
    circuit_to_json,
    compose_to_matrix,
    greedy_depth,
    inversion_count,
    minor_determinant,
    perfect_matching_of,
    sequence_of_signed_permutation,
    signed_permutation_of,
)
from matchgate_shadows.givens import apply_transpositions, normalize_angle, parse_triangular

CLIFF = (0.0, math.pi, math.pi / 2, -math.pi / 2)


def random_sequence(n, length, rng, clifford=False, reflection=False):
    rots = []
    for _ in range(length):
        axis = int(rng.integers(2, 2 * n + 1))
        angle = float(rng.choice(CLIFF)) if clifford else float(rng.uniform(-np.pi, np.pi))
        rots.append(GivensRotation(axis, angle))
    return GivensSequence(n, tuple(rots), reflection)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50, allow_nan=False))
def test_angle_normalization(a):
    v = normalize_angle(a)
    assert -math.pi < v <= math.pi
    assert abs(math.sin(v) - math.sin(a)) < 1e-9 and abs(math.cos(v) - math.cos(a)) < 1e-9


def test_rotation_validation():
    with pytest.raises(DomainError):
        GivensRotation(1, 0.3)
    with pytest.raises(DomainError):
        GivensSequence(1, (GivensRotation(3, 0.1),))  # axis beyond 2n


def test_compose_examples():
    assert np.array_equal(compose_to_matrix(GivensSequence(2, ())), np.eye(4))
    q = compose_to_matrix(GivensSequence(1, (GivensRotation(2, math.pi / 2),)))
    np.testing.assert_array_equal(q, [[0.0, -1.0], [1.0, 0.0]])


def test_compose_orthogonal_and_determinant():
    rng = np.random.default_rng(0)
    for refl in (False, True):
        seq = random_sequence(3, 20, rng, reflection=refl)
        q = compose_to_matrix(seq)
        assert np.max(np.abs(q.T @ q - np.eye(6))) < 1e-10
        assert abs(np.linalg.det(q) - (-1.0 if refl else 1.0)) < 1e-10


def test_composition_law_concatenation():
    rng = np.random.default_rng(1)
    s1 = random_sequence(3, 7, rng)
    s2 = random_sequence(3, 5, rng)
    combined = GivensSequence(3, s1.rotations + s2.rotations)
    np.testing.assert_allclose(
        compose_to_matrix(combined),
        compose_to_matrix(s2) @ compose_to_matrix(s1),
        atol=1e-12,
    )


def test_channel_homomorphism_via_cauchy_binet():
    # det((Q2 Q1)_munu) = sum_rho det((Q2)_murho) det((Q1)_rhonu): the minor
    # expansion composes exactly like the channel on degree-2 monomials.
    rng = np.random.default_rng(2)
    n = 3
    s1 = random_sequence(n, 6, rng)
    s2 = random_sequence(n, 6, rng)
    q1, q2 = compose_to_matrix(s1), compose_to_matrix(s2)
    q21 = compose_to_matrix(GivensSequence(n, s1.rotations + s2.rotations))
    idx = list(combinations(range(1, 2 * n + 1), 2))
    for mu in idx:
        for nu in idx:
            direct = minor_determinant(q21, mu, nu)
            summed = sum(
                minor_determinant(q2, mu, rho) * minor_determinant(q1, rho, nu) for rho in idx
            )
            assert abs(direct - summed) < 1e-10


def test_signed_permutation_examples():
    sp = signed_permutation_of(GivensSequence(1, (GivensRotation(2, math.pi),)))
    assert sp.perm == (1, 2) and sp.signs == (-1, -1)
    sp = signed_permutation_of(GivensSequence(1, (GivensRotation(2, math.pi / 2),)))
    assert sp.perm == (2, 1) and sorted(sp.signs) == [-1, 1]
    sp = signed_permutation_of(GivensSequence(2, (GivensRotation(2, 0.0), GivensRotation(4, 0.0))))
    assert sp == SignedPermutation.identity(2)
    with pytest.raises(DomainError):
        signed_permutation_of(GivensSequence(1, (GivensRotation(2, 0.3),)))


def test_signed_permutation_matches_compose_exactly():
    rng = np.random.default_rng(3)
    for _ in range(300):
        seq = random_sequence(3, 10, rng, clifford=True, reflection=bool(rng.integers(2)))
        sp = signed_permutation_of(seq)
        assert np.array_equal(sp.to_matrix(), compose_to_matrix(seq))
        assert sp.determinant() == (-1 if seq.terminal_reflection else 1)


def test_signed_permutation_matmul_matches_matrix_product():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = signed_permutation_of(random_sequence(2, 6, rng, clifford=True))
        b = signed_permutation_of(random_sequence(2, 6, rng, clifford=True))
        np.testing.assert_array_equal((a @ b).to_matrix(), a.to_matrix() @ b.to_matrix())
        np.testing.assert_array_equal(a.transpose().to_matrix(), a.to_matrix().T)


def test_compile_round_trip_whole_group():
    from matchgate_shadows.exact import enumerate_signed_permutation_group, ensemble_as_objects

    perms, signs = enumerate_signed_permutation_group(2, determinant=None)
    assert len(perms) == 384
    for sp in ensemble_as_objects(perms, signs, 2):
        seq = sequence_of_signed_permutation(sp)
        assert signed_permutation_of(seq) == sp


def test_act_on_monomial_examples():
    ident = SignedPermutation.identity(2)
    assert act_on_monomial(ident, (1, 2)) == ((1, 2), 1)
    refl = SignedPermutation(2, (1, 2, 3, 4), (1, 1, 1, -1))
    assert act_on_monomial(refl, (3, 4)) == ((3, 4), -1)
    swap = SignedPermutation(1, (2, 1), (1, 1))
    nu, sign = act_on_monomial(swap, (1, 2))
    assert nu == (1, 2) and sign == -1
    # sign equals the 2x2 minor determinant of the swap block
    assert abs(minor_determinant(swap.to_matrix(), (1, 2), nu) - sign) < 1e-14


def test_act_on_monomial_matches_minor_determinants():
    rng = np.random.default_rng(5)
    n = 3
    for _ in range(200):
        sp = signed_permutation_of(random_sequence(n, 8, rng, clifford=True))
        q = sp.to_matrix()
        deg = int(rng.choice([1, 2, 3, 4]))
        mu = tuple(sorted(rng.choice(np.arange(1, 2 * n + 1), size=deg, replace=False)))
        nu, sign = act_on_monomial(sp, MajoranaMonomial(n, mu))
        assert abs(minor_determinant(q, mu, nu) - sign) < 1e-14
        # every other same-size minor vanishes for a signed permutation
        for other in combinations(range(1, 2 * n + 1), deg):
            if other != nu:
                assert minor_determinant(q, mu, other) == 0.0


def test_minor_determinant_examples_and_leibniz_oracle():
    assert minor_determinant(np.eye(4), (1, 3), (1, 3)) == 1.0
    q = compose_to_matrix(GivensSequence(1, (GivensRotation(2, 0.37),)))
    assert abs(minor_determinant(q, (1, 2), (1, 2)) - 1.0) < 1e-12
    rng = np.random.default_rng(6)
    m = rng.normal(size=(6, 6))
    for mu in [(1, 4), (2, 3), (5, 6)]:
        for nu in [(1, 2), (3, 6)]:
            rows, cols = np.array(mu) - 1, np.array(nu) - 1
            leibniz = 0.0
            for perm in permutations(range(len(cols))):
                sign = 1 if inversion_count([p + 1 for p in perm]) % 2 == 0 else -1
                term = sign
                for i, j in enumerate(perm):
                    term *= m[rows[i], cols[j]]
                leibniz += term
            assert abs(minor_determinant(m, mu, nu) - leibniz) < 1e-12
    with pytest.raises(DomainError):
        minor_determinant(m, (1, 2), (1,))


def test_perfect_matching_examples():
    assert perfect_matching_of((1, 2, 3, 4)) == PerfectMatching(((1, 2), (3, 4)))
    assert perfect_matching_of((3, 1, 4, 2)) == PerfectMatching(((1, 3), (2, 4)))
    # unordered pairs: swapping the first two outputs leaves the matching fixed
    assert perfect_matching_of((2, 1, 3, 4)) == perfect_matching_of((1, 2, 3, 4))
    with pytest.raises(DomainError):
        PerfectMatching(((1, 2), (2, 3)))


def test_canonical_permutation_minimizes_inversions():
    cases = {
        ((1, 2), (3, 4)): ((1, 2, 3, 4), 0),
        ((1, 3), (2, 4)): ((1, 3, 2, 4), 1),
        ((1, 4), (2, 3)): ((1, 4, 2, 3), 2),
    }
    for pairs, (expected, inv) in cases.items():
        m = PerfectMatching(pairs)
        canon = canonical_permutation(m)
        assert canon == expected
        assert inversion_count(canon) == inv
        # exhaustive oracle over all 2^2 * 2! matching-equivalent permutations
        equivalents = []
        for flips in range(4):
            p0 = [list(p) for p in m.pairs]
            for i in range(2):
                if (flips >> i) & 1:
                    p0[i] = p0[i][::-1]
            for order in permutations(range(2)):
                flat = tuple(x for i in order for x in p0[i])
                equivalents.append(flat)
        best = min(inversion_count(p) for p in equivalents)
        assert inversion_count(canon) == best


def test_bubblesort_examples_and_property():
    assert bubblesort_transpositions((1, 2, 3, 4)) == []
    assert bubblesort_transpositions((2, 1)) == [2]
    axes = bubblesort_transpositions((1, 3, 2, 4))
    assert len(axes) == 1 == inversion_count((1, 3, 2, 4))
    rng = np.random.default_rng(7)
    for _ in range(200):
        dim = int(rng.integers(2, 11))
        p = tuple(int(x) + 1 for x in rng.permutation(dim))
        axes = bubblesort_transpositions(p)
        assert apply_transpositions(axes, dim) == p
        assert len(axes) == inversion_count(p)
        parse_triangular(axes, dim // 2 if dim % 2 == 0 else (dim + 1) // 2)


def test_greedy_depth():
    assert greedy_depth([]) == 0
    assert greedy_depth([2, 4]) == 1  # disjoint axes share a layer
    assert greedy_depth([2, 3]) == 2


def test_braid_rewrite_table_exhaustive():
    for b1 in (0, 1):
        for b2 in (0, 1):
            for b3 in (0, 1):
                c1, c2, c3 = braid_rewrite(b1, b2, b3)
                left = apply_transpositions([2] * b1 + [3] * b2 + [2] * b3, 4)
                right = apply_transpositions([3] * c1 + [2] * c2 + [3] * c3, 4)
                assert left == right
                assert b1 + b2 + b3 >= c1 + c2 + c3
    # the full braid identity holds exactly
    assert braid_rewrite(1, 1, 1) == (1, 1, 1)
    assert apply_transpositions([2, 3, 2], 4) == apply_transpositions([3, 2, 3], 4)


def test_brickwall_examples():
    assert brickwall_transform([], 2) == []
    layers = brickwall_transform([2, 3, 2], 2)
    flat = [a for layer in layers for a in layer]
    assert apply_transpositions(flat, 4) == apply_transpositions([2, 3, 2], 4)
    assert len(flat) <= 3


def test_brickwall_random_triangular_circuits():
    rng = np.random.default_rng(8)
    for _ in range(300):
        n = int(rng.integers(1, 6))  # 2n <= 10
        dim = 2 * n
        p = tuple(int(x) + 1 for x in rng.permutation(dim))
        axes = bubblesort_transpositions(p)
        layers = brickwall_transform(axes, n)
        flat = [a for layer in layers for a in layer]
        assert apply_transpositions(flat, dim) == p
        assert len(flat) <= len(axes)
        assert len(layers) <= dim
        for layer in layers:
            assert all(a % 2 == layer[0] % 2 for a in layer)  # same parity per layer
            assert sorted(layer) == list(layer)


def test_brickwall_rejects_malformed_layout():
    with pytest.raises(DomainError):
        brickwall_transform([2, 3, 2, 4, 3, 2, 2], 2)  # more diagonals than 2n-1
    with pytest.raises(DomainError):
        brickwall_transform([9], 2)


def test_circuit_json_round_trip():
    rng = np.random.default_rng(9)
    seq = random_sequence(3, 6, rng, reflection=True)
    doc = circuit_to_json(seq)
    assert doc["n_modes"] == 3 and doc["terminal_reflection"] is True
    assert "signed_permutation" not in doc
    back = circuit_from_json(doc)
    assert back == seq
    cseq = random_sequence(2, 4, rng, clifford=True)
    cdoc = circuit_to_json(cseq)
    sp = signed_permutation_of(cseq)
    assert cdoc["signed_permutation"] == {"perm": list(sp.perm), "signs": list(sp.signs)}
