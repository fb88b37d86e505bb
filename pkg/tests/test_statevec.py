"""State-vector simulator: gates, Born sampling, state I/O."""
import math

import numpy as np
import pytest
from scipy import stats

from matchgate_shadows import (
    DataError,
    DomainError,
    GivensRotation,
    GivensSequence,
    MajoranaMonomial,
    apply_givens,
    apply_sequence,
    basis_state,
    born_sample,
    clifford_sequence,
    compose_to_matrix,
    dense_matrix,
    haar_sequence,
    load_state,
    make_state,
    minor_determinant,
    random_state,
    save_state,
)
from matchgate_shadows._rng import derive_rng
from matchgate_shadows.statevec import born_sample_batch, circuit_unitary
from itertools import combinations


def test_zero_angle_is_identity():
    state = random_state(3, derive_rng(0))
    out = apply_givens(state, GivensRotation(4, 0.0))
    np.testing.assert_allclose(out.amplitudes, state.amplitudes)


def test_z_pi_on_plus_gives_minus():
    plus = make_state("basis", bits="0", n_qubits=1)
    plus = apply_sequence(plus, GivensSequence(1, ()))  # no-op sanity
    amps = np.array([1, 1]) / math.sqrt(2)
    from matchgate_shadows.statevec import StateVector

    plus = StateVector(1, amps)
    out = apply_givens(plus, GivensRotation(2, math.pi))
    minus = np.array([1, -1]) / math.sqrt(2)
    # equality up to a global phase
    overlap = abs(np.vdot(minus, out.amplitudes))
    assert abs(overlap - 1.0) < 1e-12


def test_adjoint_action_matches_matrix_rows():
    rng = derive_rng(1)
    n = 3
    for _ in range(20):
        axis = int(rng.integers(2, 2 * n + 1))
        angle = float(rng.uniform(-math.pi, math.pi))
        seq = GivensSequence(n, (GivensRotation(axis, angle),))
        q = compose_to_matrix(seq)
        u = circuit_unitary(seq)
        for k in range(1, 2 * n + 1):
            g = dense_matrix(MajoranaMonomial(n, (k,)))
            lhs = u.conj().T @ g @ u
            rhs = sum(
                q[k - 1, l - 1] * dense_matrix(MajoranaMonomial(n, (l,)))
                for l in range(1, 2 * n + 1)
            )
            assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_sequence_inverse():
    rng = derive_rng(2)
    state = random_state(3, rng)
    seq = haar_sequence(3, rng)
    back = apply_sequence(apply_sequence(state, seq), seq.inverse_rotations())
    assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-10


def test_degree2_adjoint_action_minor_expansion():
    rng = derive_rng(3)
    n = 3
    seq = haar_sequence(n, rng)
    q = compose_to_matrix(seq)
    u = circuit_unitary(seq)
    for mu in combinations(range(1, 2 * n + 1), 2):
        g = dense_matrix(MajoranaMonomial(n, mu))
        lhs = u.conj().T @ g @ u
        rhs = np.zeros_like(lhs)
        for nu in combinations(range(1, 2 * n + 1), 2):
            rhs = rhs + minor_determinant(q, mu, nu) * dense_matrix(MajoranaMonomial(n, nu))
        assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_norm_preservation_long_circuit():
    rng = derive_rng(4)
    n = 8
    state = random_state(n, rng)
    rots = tuple(
        GivensRotation(int(rng.integers(2, 2 * n + 1)), float(rng.uniform(-math.pi, math.pi)))
        for _ in range(1000)
    )
    out = apply_sequence(state, GivensSequence(n, rots))
    assert abs(out.norm() - 1.0) < 1e-10


def test_born_on_basis_state():
    state = basis_state("010")
    rng = derive_rng(5)
    for _ in range(20):
        assert born_sample(state, rng) == (0, 1, 0)


def test_born_on_plus_state():
    from matchgate_shadows.statevec import StateVector

    plus = StateVector(1, np.array([1, 1]) / math.sqrt(2))
    rng = derive_rng(6)
    draws = [born_sample(plus, rng)[0] for _ in range(20_000)]
    freq = np.mean(draws)
    assert abs(freq - 0.5) < 3 * math.sqrt(0.25 / 20_000)


def test_born_chi_square_random_state():
    state = random_state(4, derive_rng(7))
    n_draws = 50_000
    amps = np.tile(state.amplitudes, (n_draws, 1))
    outcomes = born_sample_batch(amps, 4, derive_rng(8))
    idx = outcomes @ (1 << np.arange(3, -1, -1))
    observed = np.bincount(idx, minlength=16)
    expected = state.probabilities() * n_draws
    res = stats.chisquare(observed, expected)
    assert res.pvalue > 0.01


def test_born_batch_matches_scalar_path():
    state = random_state(3, derive_rng(9))
    z1 = born_sample(state, derive_rng(10, "x"))
    z2 = tuple(born_sample_batch(state.amplitudes[None, :], 3, derive_rng(10, "x"))[0])
    assert z1 == tuple(int(b) for b in z2)


def test_make_state_and_file_round_trip(tmp_path):
    st_basis = make_state("basis", bits="01")
    assert st_basis.amplitudes[1] == 1.0
    st_rand = make_state("random_haar", n_qubits=2, rng=derive_rng(11))
    assert abs(st_rand.norm() - 1.0) < 1e-12
    path = tmp_path / "state.txt"
    save_state(st_rand, path)
    back = make_state("from_file", path=path)
    np.testing.assert_allclose(back.amplitudes, st_rand.amplitudes, atol=1e-15)


def test_state_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("nqubits 1\n0.5 0\n0.5 0\n")  # norm far from 1
    with pytest.raises(DataError):
        load_state(bad)
    short = tmp_path / "short.txt"
    short.write_text("nqubits 2\n1 0\n0 0\n")  # dimension mismatch
    with pytest.raises(DataError):
        load_state(short)
    with pytest.raises(DataError):
        load_state(tmp_path / "missing.txt")
    with pytest.raises(DomainError):
        make_state("nope")


def test_clifford_circuits_give_affine_uniform_outcomes():
    # a Clifford circuit maps |z0> to a stabilizer state: the outcome
    # distribution is uniform over an affine subspace of GF(2)^n
    rng = derive_rng(12)
    for n in (2, 3, 4):
        for _ in range(10):
            seq = clifford_sequence(n, rng, mode="four_angle")
            state = apply_sequence(basis_state("0" * n), seq)
            probs = state.probabilities()
            support = np.where(probs > 1e-12)[0]
            # uniform on the support
            np.testing.assert_allclose(probs[support], 1.0 / len(support), atol=1e-10)
            # support size is a power of two and closed under xor with offset
            assert len(support) & (len(support) - 1) == 0
            offset = support[0]
            deltas = {int(s) ^ int(offset) for s in support}
            for a in deltas:
                for b in deltas:
                    assert (a ^ b) in deltas
