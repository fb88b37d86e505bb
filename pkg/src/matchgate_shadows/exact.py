"""Exact enumeration of Clifford matchgate ensembles and invariance checks.

Everything here works on finite weighted ensembles of signed permutations.
Two independent routes compute the measurement channel:

* :func:`measurement_channel_exact` uses signed-permutation arithmetic and
  the product expansion of |z><z| over adjacent Majorana pairs; all
  coefficients are powers of i times dyadic rationals, so double arithmetic
  is exact.
* :func:`measurement_channel_dense` compiles every element to a circuit,
  builds its dense unitary with the state-vector simulator and averages the
  snapshot states directly.  It trusts nothing about the signed-permutation
  algebra and serves as the oracle for the first route.

Estimator moments E[o_hat] and E[|o_hat|^2] are computed by exact summation
over ensemble elements and measurement outcomes, weighting by the Born
probabilities of a supplied pure state.  These feed the sign-invariance and
matching-invariance checks.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations, permutations
from pathlib import Path

import numpy as np

from ._rng import as_rng
from .errors import DomainError, ResourceError
from .givens import (
    SignedPermutation,
    canonical_permutation,
    sequence_of_signed_permutation,
)
from .pauli import MajoranaMonomial, dense_matrix
from .sampling import all_perfect_matchings
from .shadows import lambda_eigenvalue
from .statevec import StateVector, circuit_unitary

ENUMERATION_CAP_MODES = 3


def _cache_dir() -> Path:
    root = os.environ.get("MATCHGATE_SHADOWS_CACHE")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "matchgate_shadows"


def enumerate_signed_permutation_group(
    n_modes: int, determinant: int | None = 1
) -> tuple[np.ndarray, np.ndarray]:
    """All signed permutations on [2n], optionally filtered by determinant.

    Returns (perms, signs) arrays of shape (G, 2n); results for n = 2, 3 are
    cached on disk because the group sizes (192 and 23040) make re-enumeration
    noticeable in tight loops.
    """
    if n_modes > ENUMERATION_CAP_MODES:
        raise ResourceError(
            f"group enumeration capped at n = {ENUMERATION_CAP_MODES} modes"
        )
    tag = {1: "plus", -1: "minus", None: "full"}[determinant]
    cache = _cache_dir() / f"sym2_{2 * n_modes}_{tag}.npz"
    if n_modes >= 2 and cache.exists():
        data = np.load(cache)
        return data["perms"], data["signs"]

    dim = 2 * n_modes
    perms_list = []
    signs_list = []
    for perm in permutations(range(1, dim + 1)):
        inv = sum(1 for i in range(dim) for j in range(i + 1, dim) if perm[i] > perm[j])
        perm_parity = -1 if inv % 2 else 1
        for bits in range(2**dim):
            sgn = [1 - 2 * ((bits >> k) & 1) for k in range(dim)]
            det = perm_parity
            for s in sgn:
                det *= s
            if determinant is not None and det != determinant:
                continue
            perms_list.append(perm)
            signs_list.append(sgn)
    perms = np.array(perms_list, dtype=np.int8)
    signs = np.array(signs_list, dtype=np.int8)
    if n_modes >= 2:
        try:
            cache.parent.mkdir(parents=True, exist_ok=True)
            np.savez_compressed(cache, perms=perms, signs=signs)
        except OSError:
            pass  # the cache is an optimization only
    return perms, signs


def matching_representative_ensemble(n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """One canonical permutation per perfect matching, all signs +1."""
    perms = np.array(
        [canonical_permutation(m) for m in all_perfect_matchings(n_modes)], dtype=np.int8
    )
    signs = np.ones_like(perms)
    return perms, signs


def random_sub_ensemble(
    n_modes: int, size: int, rng, determinant: int | None = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random subset of the signed-permutation group."""
    perms, signs = enumerate_signed_permutation_group(n_modes, determinant)
    rng = as_rng(rng)
    idx = rng.choice(len(perms), size=min(size, len(perms)), replace=False)
    return perms[idx], signs[idx]


def ensemble_as_objects(
    perms: np.ndarray, signs: np.ndarray, n_modes: int
) -> list[SignedPermutation]:
    return [
        SignedPermutation(n_modes, tuple(int(x) for x in p), tuple(int(x) for x in s))
        for p, s in zip(perms, signs)
    ]


# ---------------------------------------------------------------------------
# Vectorized signed-permutation kernels
# ---------------------------------------------------------------------------


def mask_images_and_signs(perms: np.ndarray, signs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Image mask and sign of every monomial under every element.

    Shapes (G, 2n) -> (G, 4**n); row g, column mask holds the action
    gamma_mask -> sgn * gamma_image exactly as act_on_monomial computes it.
    """
    g, dim = perms.shape
    n_modes = dim // 2
    masks = np.arange(4**n_modes)
    bits = ((masks[:, None] >> np.arange(dim)[None, :]) & 1).astype(np.int64)
    weights = 1 << (perms.astype(np.int64) - 1)
    images = bits @ weights.T  # (4**n, G)
    parity = bits @ (signs < 0).astype(np.int64).T
    for k1, k2 in combinations(range(dim), 2):
        both = (bits[:, k1] & bits[:, k2]).astype(bool)
        if not both.any():
            continue
        inv = (perms[:, k1] > perms[:, k2]).astype(np.int64)
        parity[both] += inv[None, :]
    sgn = np.where(parity % 2 == 1, -1, 1).astype(np.int8)
    return images.T.astype(np.int64), sgn.T


def transpose_arrays(perms: np.ndarray, signs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row arrays of the transposed (inverse) signed permutations."""
    g, dim = perms.shape
    inv_perms = np.empty_like(perms)
    inv_signs = np.empty_like(signs)
    rows = np.arange(g)[:, None]
    inv_perms[rows, perms.astype(np.int64) - 1] = np.arange(1, dim + 1)[None, :]
    inv_signs[rows, perms.astype(np.int64) - 1] = signs
    return inv_perms, inv_signs


def _pair_union_table(n_modes: int) -> np.ndarray:
    """is_pair_union[mask]: mask is a union of adjacent pairs {2i-1, 2i}."""
    dim1 = 4**n_modes
    table = np.zeros(dim1, dtype=bool)
    for mask in range(dim1):
        m = mask
        ok = True
        while m:
            low = m & -m
            k = low.bit_length() - 1
            if k % 2 == 1 or not (m >> (k + 1)) & 1:
                ok = False
                break
            m &= ~(low | (low << 1))
        table[mask] = ok
    return table


def _pair_value_table(n_modes: int) -> np.ndarray:
    """value[mask, z_index] = <z|gamma_mask|z>; zero rows off pair unions."""
    dim1 = 4**n_modes
    nz = 2**n_modes
    table = np.zeros((dim1, nz), dtype=complex)
    is_pu = _pair_union_table(n_modes)
    for mask in range(dim1):
        if not is_pu[mask]:
            continue
        pair_qubits = [k + 1 for k in range(n_modes) if (mask >> (2 * k)) & 1]
        for z in range(nz):
            val = 1.0 + 0.0j
            for q in pair_qubits:
                zq = (z >> (n_modes - q)) & 1
                val *= 1j * (1.0 - 2.0 * zq)
            table[mask, z] = val
    return table


def monomial_state_expectations(state: StateVector) -> np.ndarray:
    """tr(gamma_mask rho) for every mask, dense oracle route."""
    n = state.n_qubits
    v = state.amplitudes
    out = np.empty(4**n, dtype=complex)
    for mask in range(4**n):
        idx = tuple(k + 1 for k in range(2 * n) if (mask >> k) & 1)
        g = dense_matrix(MajoranaMonomial(n, idx))
        out[mask] = v.conj() @ (g @ v)
    return out


@dataclass
class EnsembleKernel:
    """Shared precomputation for one (perms, signs, state) triple."""

    n_modes: int
    weights: np.ndarray
    images: np.ndarray      # forward action, (G, 4**n)
    sgn: np.ndarray
    inv_images: np.ndarray  # transpose action, (G, 4**n)
    inv_sgn: np.ndarray
    pair_vals: np.ndarray   # (4**n, 2**n)
    is_pu: np.ndarray
    probs: np.ndarray | None  # Born probabilities (G, 2**n) when a state is given


def build_kernel(
    perms: np.ndarray, signs: np.ndarray, state: StateVector | None, weights=None
) -> EnsembleKernel:
    g, dim = perms.shape
    n = dim // 2
    if weights is None:
        weights = np.full(g, 1.0 / g)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (g,) or abs(weights.sum() - 1.0) > 1e-9 or (weights < 0).any():
        raise DomainError("ensemble weights must be a probability vector over elements")
    images, sgn = mask_images_and_signs(perms, signs)
    inv_images, inv_sgn = mask_images_and_signs(*transpose_arrays(perms, signs))
    pair_vals = _pair_value_table(n)
    is_pu = _pair_union_table(n)
    probs = None
    if state is not None:
        if state.n_qubits != n:
            raise DomainError("state size does not match the ensemble")
        expect = monomial_state_expectations(state)
        pu = np.where(is_pu)[0]
        # |z><z| = 2^-n sum_S conj(<z|gamma_S|z>) gamma_S over pair unions S.
        coeff = sgn[:, pu] * expect[images[:, pu]]
        probs = (coeff @ pair_vals[pu].conj()).real / 2**n
        if probs.min() < -1e-9 or np.max(np.abs(probs.sum(axis=1) - 1.0)) > 1e-9:
            raise DomainError("computed Born probabilities are inconsistent")
        probs = np.clip(probs, 0.0, None)
    return EnsembleKernel(n, weights, images, sgn, inv_images, inv_sgn, pair_vals, is_pu, probs)


def born_probabilities_exact(
    perms: np.ndarray, signs: np.ndarray, state: StateVector, weights=None
) -> np.ndarray:
    """P[z | U] for every ensemble element, shape (G, 2**n)."""
    return build_kernel(perms, signs, state, weights).probs


def _mu_mask(mu) -> int:
    indices = mu.indices if isinstance(mu, MajoranaMonomial) else tuple(mu)
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


def estimator_moments_exact(
    perms: np.ndarray,
    signs: np.ndarray,
    state: StateVector,
    observables,
    weights=None,
    kernel: EnsembleKernel | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact (E[o_hat], E[|o_hat|^2]) for several monomials at once.

    The estimator of gamma_mu evaluates, per element and outcome, to
    lambda^{-1} s1 <z|gamma_rho|z> with (rho, s1) the image of mu under Q^T;
    both moments are the Born-weighted sums of that exact quantity.
    """
    ker = kernel or build_kernel(perms, signs, state, weights)
    means = np.empty(len(observables), dtype=complex)
    seconds = np.empty(len(observables), dtype=float)
    for i, mu in enumerate(observables):
        indices = mu.indices if isinstance(mu, MajoranaMonomial) else tuple(mu)
        if len(indices) % 2:
            raise DomainError("odd-degree monomials have no unbiased estimator")
        lam_inv = float(1 / lambda_eigenvalue(len(indices) // 2, ker.n_modes))
        mmask = _mu_mask(indices)
        vals = ker.pair_vals[ker.inv_images[:, mmask]]  # (G, 2**n)
        s1 = ker.inv_sgn[:, mmask].astype(float)
        means[i] = (ker.weights * s1 * (ker.probs * vals).sum(axis=1)).sum() * lam_inv
        seconds[i] = (
            (ker.weights * (ker.probs * np.abs(vals) ** 2).sum(axis=1)).sum() * lam_inv**2
        )
    return means, seconds


def exact_mean_estimate(perms, signs, state, mu, weights=None) -> complex:
    means, _ = estimator_moments_exact(perms, signs, state, [mu], weights)
    return complex(means[0])


def exact_second_moment(perms, signs, state, mu, weights=None) -> float:
    _, seconds = estimator_moments_exact(perms, signs, state, [mu], weights)
    return float(seconds[0])


def measurement_channel_exact(
    perms: np.ndarray,
    signs: np.ndarray,
    weights=None,
    kernel: EnsembleKernel | None = None,
) -> np.ndarray:
    """Measurement channel matrix on the monomial basis, exact arithmetic.

    Entry [nu, mu] is the coefficient of gamma_nu in
    M(gamma_mu) = E_Q sum_z <z|U gamma_mu U^dag|z> U^dag |z><z| U.
    For the uniform determinant-+1 group this is diag(lambda_{k,n}).
    """
    ker = kernel or build_kernel(perms, signs, None, weights)
    n = ker.n_modes
    dim1 = 4**n
    pu = np.where(ker.is_pu)[0]
    # z-sum of <z|gamma_rho|z> conj(<z|gamma_S|z>), computed explicitly;
    # orthogonality over z is a result here, not an assumption.
    zsum = (ker.pair_vals[pu] @ ker.pair_vals[pu].conj().T).real  # (|PU|, |PU|)
    pu_pos = np.full(dim1, -1)
    pu_pos[pu] = np.arange(len(pu))
    out = np.zeros((dim1, dim1))
    for mu in range(dim1):
        rho = ker.inv_images[:, mu]
        live = ker.is_pu[rho]
        if not live.any():
            continue
        idx = np.where(live)[0]
        s1 = ker.inv_sgn[idx, mu].astype(float)
        w = ker.weights[idx] * s1 / 2**n
        coeffs = zsum[pu_pos[rho[idx]]]            # (L, |PU|)
        targets = ker.images[idx][:, pu]           # (L, |PU|)
        vals = (w[:, None] * coeffs) * ker.sgn[idx][:, pu]
        np.add.at(out, (targets.ravel(), np.full(targets.size, mu)), vals.ravel())
    return out


def measurement_channel_dense(
    elements: list[SignedPermutation], weights=None
) -> np.ndarray:
    """Dense-simulator route to the measurement channel (the oracle).

    Uses only compiled circuits and dense linear algebra; no signed
    permutation arithmetic enters beyond choosing which circuit to build.
    """
    n = elements[0].n_modes
    if n > ENUMERATION_CAP_MODES:
        raise ResourceError("dense channel route capped at n = 3 modes")
    dim1 = 4**n
    nz = 2**n
    if weights is None:
        weights = np.full(len(elements), 1.0 / len(elements))
    units = np.stack([circuit_unitary(sequence_of_signed_permutation(sp)) for sp in elements])
    gammas = np.stack(
        [
            dense_matrix(MajoranaMonomial(n, tuple(k + 1 for k in range(2 * n) if (m >> k) & 1)))
            for m in range(dim1)
        ]
    )
    u_conj = units.conj()
    out = np.zeros((dim1, dim1), dtype=complex)
    for mu in range(dim1):
        w_rot = np.einsum("eij,jk,elk->eil", units, gammas[mu], u_conj)
        v = np.einsum("ezz->ez", w_rot)  # <z| U gamma_mu U^dag |z>
        a = np.einsum("e,ez,ezi,ezj->ij", weights, v, u_conj, units)
        out[:, mu] = np.einsum("nij,ij->n", gammas.conj(), a) / nz
    if np.max(np.abs(out.imag)) > 1e-9:
        raise DomainError("dense channel has unexpected imaginary parts")
    return out.real


def lambda_diagonal(n_modes: int) -> np.ndarray:
    """Expected channel matrix diag(lambda_{|mask|/2, n}) on the mask basis."""
    dim1 = 4**n_modes
    diag = np.zeros(dim1)
    for mask in range(dim1):
        deg = int(mask).bit_count()
        diag[mask] = float(lambda_eigenvalue(deg // 2, n_modes)) if deg % 2 == 0 else 0.0
    return np.diag(diag)


# ---------------------------------------------------------------------------
# Invariance checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceReport:
    check: str
    n_modes: int
    trials: int
    max_moment_deviation: float
    max_channel_deviation: float
    negative_control_deviation: float | None
    passed: bool


def _deg2_and_deg4_monomials(n_modes: int) -> list[tuple[int, ...]]:
    out = list(combinations(range(1, 2 * n_modes + 1), 2))
    if n_modes >= 2:
        out += list(combinations(range(1, 2 * n_modes + 1), 4))
    return out


def check_sign_invariance(
    perms: np.ndarray,
    signs: np.ndarray,
    state: StateVector,
    observables=None,
    trials: int = 20,
    rng=0,
    tol: float = 1e-10,
) -> InvarianceReport:
    """Reassign all entry signs at random; moments and channel must not move."""
    n = perms.shape[1] // 2
    rng = as_rng(rng)
    if observables is None:
        observables = _deg2_and_deg4_monomials(n)
    base_kernel = build_kernel(perms, signs, state)
    _, base_moments = estimator_moments_exact(perms, signs, state, observables, kernel=base_kernel)
    base_channel = measurement_channel_exact(perms, signs, kernel=base_kernel)
    worst_m = 0.0
    worst_c = 0.0
    for _ in range(trials):
        new_signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=signs.shape)
        kernel = build_kernel(perms, new_signs, state)
        _, moments = estimator_moments_exact(perms, new_signs, state, observables, kernel=kernel)
        channel = measurement_channel_exact(perms, new_signs, kernel=kernel)
        worst_m = max(worst_m, float(np.max(np.abs(moments - base_moments))))
        worst_c = max(worst_c, float(np.max(np.abs(channel - base_channel))))
    return InvarianceReport(
        "sign-invariance", n, trials, worst_m, worst_c, None, worst_m <= tol and worst_c <= tol
    )


def _matching_equivalent(perm: np.ndarray, rng) -> np.ndarray:
    """Uniform random permutation with the same perfect matching."""
    n_pairs = len(perm) // 2
    pairs = perm.reshape(n_pairs, 2).copy()
    for i in range(n_pairs):
        if rng.random() < 0.5:
            pairs[i] = pairs[i, ::-1]
    order = rng.permutation(n_pairs)
    return pairs[order].reshape(-1)


def check_matching_invariance(
    perms: np.ndarray,
    signs: np.ndarray,
    state: StateVector,
    observables=None,
    trials: int = 20,
    rng=0,
    tol: float = 1e-10,
) -> InvarianceReport:
    """Replace elements by matching-equivalent permutations; moments fixed.

    Also runs a negative control: breaking one element's matching must move
    some second moment, confirming the check has teeth.
    """
    n = perms.shape[1] // 2
    rng = as_rng(rng)
    if observables is None:
        observables = _deg2_and_deg4_monomials(n)
    base_kernel = build_kernel(perms, signs, state)
    _, base_moments = estimator_moments_exact(perms, signs, state, observables, kernel=base_kernel)
    base_channel = measurement_channel_exact(perms, signs, kernel=base_kernel)
    worst_m = 0.0
    worst_c = 0.0
    for _ in range(trials):
        new_perms = np.stack([_matching_equivalent(p, rng) for p in perms])
        kernel = build_kernel(new_perms, signs, state)
        _, moments = estimator_moments_exact(new_perms, signs, state, observables, kernel=kernel)
        channel = measurement_channel_exact(new_perms, signs, kernel=kernel)
        worst_m = max(worst_m, float(np.max(np.abs(moments - base_moments))))
        worst_c = max(worst_c, float(np.max(np.abs(channel - base_channel))))

    # negative control: an odd rotation of one element's row breaks its matching
    broken = perms.copy()
    broken[0] = np.roll(broken[0].copy(), 1)
    _, moments = estimator_moments_exact(broken, signs, state, observables)
    control = float(np.max(np.abs(moments - base_moments)))
    passed = worst_m <= tol and worst_c <= tol and control > 1e-6
    return InvarianceReport("matching-invariance", n, trials, worst_m, worst_c, control, passed)
