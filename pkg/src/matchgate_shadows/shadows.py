"""Classical-shadows pipeline: channel eigenvalues, estimators, experiments.

A shadow sample stores the transform Q of the applied circuit (exact signed
permutation for Clifford ensembles, dense orthogonal matrix otherwise) and
the measured bitstring z.  The single-sample estimator of a degree-2k
Majorana monomial gamma_mu is

    o_hat = lambda_{k,n}^{-1} * sum_nu det((Q^T)_{mu nu}) <z|gamma_nu|z>,

where the sum runs over the monomials nu that are unions of adjacent pairs
{2i-1, 2i} (all other diagonal matrix elements vanish), and
lambda_{k,n} = C(n,k)/C(2n,2k) is the measurement-channel eigenvalue on
degree-2k monomials.  For signed permutations the sum collapses to at most
one exact term.

Estimates of raw monomials are complex; Hermitian observables are linear
combinations with the appropriate i powers (e.g. i*gamma_p*gamma_q), so both
components are reported and aggregated separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from ._rng import as_rng, derive_rng
from .errors import DomainError, ResourceError
from .givens import GivensSequence, SignedPermutation, act_on_monomial, signed_permutation_of
from .pauli import MajoranaMonomial, bitstring_expectation, dense_matrix, rdm_expansion
from .sampling import (
    ENSEMBLES,
    optimal_sequence_for_canonical,
    sample_angles,
    sample_clifford_angles,
    triangular_axes,
)
from .statevec import (
    StateVector,
    _apply_rotation_inplace,
    _x_last_inplace,
    apply_sequence,
    born_sample_batch,
)

DENSE_DEGREE_CAP = 4
CLIFFORD_ENSEMBLES = ("four_angle", "two_angle", "optimal")


def lambda_eigenvalue(k: int, n_modes: int) -> Fraction:
    """Exact eigenvalue C(n,k)/C(2n,2k) of the measurement channel."""
    if not 0 <= k <= n_modes:
        raise DomainError(f"degree index k={k} outside [0, {n_modes}]")
    return Fraction(math.comb(n_modes, k), math.comb(2 * n_modes, 2 * k))


def pair_union_indices(n_modes: int, k: int) -> list[tuple[int, ...]]:
    """All unions of k distinct adjacent pairs {2i-1, 2i}, as index tuples."""
    out = []
    for pairs in combinations(range(1, n_modes + 1), k):
        idx: tuple[int, ...] = ()
        for i in pairs:
            idx += (2 * i - 1, 2 * i)
        out.append(idx)
    return out


@dataclass(frozen=True)
class ShadowSample:
    """One randomized measurement: transform Q, outcome z, ensemble tag."""

    transform: SignedPermutation | np.ndarray
    outcome: tuple[int, ...]
    ensemble: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcome", tuple(int(b) for b in self.outcome))
        if len(self.outcome) != self.n_modes or any(b not in (0, 1) for b in self.outcome):
            raise DomainError("outcome must be a 0/1 string of length n")

    @property
    def n_modes(self) -> int:
        if isinstance(self.transform, SignedPermutation):
            return self.transform.n_modes
        return self.transform.shape[0] // 2


@dataclass(frozen=True)
class EstimatorReport:
    observable: tuple[int, ...]
    estimate: complex
    method: str
    batch_count: int
    batch_means: tuple[complex, ...]
    n_samples: int


def _as_indices(mu) -> tuple[int, ...]:
    if isinstance(mu, MajoranaMonomial):
        return mu.indices
    return tuple(int(i) for i in mu)


def single_sample_estimate(sample: ShadowSample, mu) -> complex:
    """Unbiased per-sample estimate of tr(gamma_mu rho); degree must be even."""
    indices = _as_indices(mu)
    n = sample.n_modes
    deg = len(indices)
    if deg % 2:
        raise DomainError(
            "odd-degree Majorana monomials admit no unbiased shadow estimator"
        )
    k = deg // 2
    lam_inv = float(1 / lambda_eigenvalue(k, n))
    if deg == 0:
        return complex(lam_inv)
    z = sample.outcome
    if isinstance(sample.transform, SignedPermutation):
        nu, sign = act_on_monomial(sample.transform.transpose(), indices)
        val = bitstring_expectation(MajoranaMonomial(n, nu), z)
        return lam_inv * sign * val
    if deg > DENSE_DEGREE_CAP:
        raise ResourceError(
            f"degree {deg} exceeds the dense-transform cap of {DENSE_DEGREE_CAP}"
        )
    qt = np.asarray(sample.transform).T
    rows = np.asarray(indices) - 1
    total = 0.0 + 0.0j
    for nu in pair_union_indices(n, k):
        cols = np.asarray(nu) - 1
        det = np.linalg.det(qt[np.ix_(rows, cols)]) if deg > 1 else qt[rows[0], cols[0]]
        val = bitstring_expectation(MajoranaMonomial(n, nu), z)
        total += det * val
    return lam_inv * total


def _median_of_means(values: np.ndarray, batch_count: int) -> tuple[complex, list[complex]]:
    n = len(values)
    if not 1 <= batch_count <= n:
        raise DomainError(f"batch count {batch_count} outside [1, {n}]")
    base = n // batch_count
    means = []
    for b in range(batch_count):
        lo = b * base
        hi = (b + 1) * base if b < batch_count - 1 else n  # last batch absorbs remainder
        means.append(complex(values[lo:hi].mean()))
    point = complex(np.median([m.real for m in means]) + 1j * np.median([m.imag for m in means]))
    return point, means


def estimate(samples, mu, method: str = "mean", batch_count: int = 1) -> EstimatorReport:
    """Aggregate single-sample estimates by mean or median-of-means."""
    indices = _as_indices(mu)
    if isinstance(samples, ShadowBatch):
        values = samples.estimate_matrix([indices])[:, 0]
    else:
        samples = list(samples)
        if not samples:
            raise DomainError("cannot estimate from an empty sample list")
        values = np.array([single_sample_estimate(s, indices) for s in samples])
    if len(values) == 0:
        raise DomainError("cannot estimate from an empty sample list")
    if method == "mean":
        point, means = complex(values.mean()), [complex(values.mean())]
        batch_count = 1
    elif method == "median_of_means":
        point, means = _median_of_means(values, batch_count)
    else:
        raise DomainError(f"unknown estimation method {method!r}")
    return EstimatorReport(
        observable=indices,
        estimate=point,
        method=method,
        batch_count=batch_count,
        batch_means=tuple(means),
        n_samples=len(values),
    )


def sample_size(
    epsilon: float, delta: float, n_observables: int, var_bound: float, constant: float = 34.0
) -> int:
    """Shot budget ceil(C * eps^-2 * log(M/delta) * var_bound).

    The proportionality constant is configuration (default 34, a standard
    median-of-means constant), not a derived quantity.
    """
    if epsilon <= 0 or delta <= 0 or n_observables < 1 or var_bound <= 0:
        raise DomainError("sample_size arguments must be positive")
    return math.ceil(constant * math.log(n_observables / delta) * var_bound / epsilon**2)


# ---------------------------------------------------------------------------
# Batched collection
# ---------------------------------------------------------------------------


@dataclass
class ShadowBatch:
    """Columnar storage of shadow samples for vectorized estimation."""

    ensemble: str
    n_modes: int
    outcomes: np.ndarray  # (N, n) uint8
    perms: np.ndarray | None = None   # (N, 2n) int, Clifford ensembles
    signs: np.ndarray | None = None   # (N, 2n) int8
    matrices: np.ndarray | None = None  # (N, 2n, 2n) float64, dense ensembles
    _inv_perms: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return self.outcomes.shape[0]

    @property
    def is_clifford(self) -> bool:
        return self.perms is not None

    def inv_perms(self) -> np.ndarray:
        if self._inv_perms is None:
            n_samples, dim = self.perms.shape
            inv = np.empty_like(self.perms)
            rows = np.arange(n_samples)[:, None]
            inv[rows, self.perms - 1] = np.arange(1, dim + 1)[None, :]
            self._inv_perms = inv
        return self._inv_perms

    def sample(self, i: int) -> ShadowSample:
        z = tuple(int(b) for b in self.outcomes[i])
        if self.is_clifford:
            sp = SignedPermutation(
                self.n_modes, tuple(int(p) for p in self.perms[i]), tuple(int(s) for s in self.signs[i])
            )
            return ShadowSample(sp, z, self.ensemble)
        return ShadowSample(self.matrices[i].copy(), z, self.ensemble)

    def to_samples(self) -> list[ShadowSample]:
        return [self.sample(i) for i in range(len(self))]

    def head(self, n: int) -> "ShadowBatch":
        return ShadowBatch(
            self.ensemble,
            self.n_modes,
            self.outcomes[:n],
            None if self.perms is None else self.perms[:n],
            None if self.signs is None else self.signs[:n],
            None if self.matrices is None else self.matrices[:n],
        )

    # -- estimation ---------------------------------------------------------

    def _estimate_clifford(self, mu: tuple[int, ...]) -> np.ndarray:
        n = self.n_modes
        k = len(mu) // 2
        lam_inv = float(1 / lambda_eigenvalue(k, n))
        inv = self.inv_perms()
        sign_t = np.take_along_axis(self.signs, inv - 1, axis=1)
        images = inv[:, np.asarray(mu) - 1]  # (N, 2k)
        sign = np.prod(sign_t[:, np.asarray(mu) - 1], axis=1).astype(np.int64)
        # parity of the sort of the image list
        deg = len(mu)
        for i in range(deg):
            for j in range(i + 1, deg):
                sign = np.where(images[:, i] > images[:, j], -sign, sign)
        nu = np.sort(images, axis=1)
        # union-of-adjacent-pairs mask and the product of +-i pair factors
        ok = np.ones(len(self), dtype=bool)
        factor = np.ones(len(self), dtype=complex)
        for i in range(0, deg, 2):
            a, b = nu[:, i], nu[:, i + 1]
            same = (b == a + 1) & (a % 2 == 1)
            ok &= same
            pair = (a + 1) // 2  # 1-based qubit of the pair
            zbit = np.take_along_axis(
                self.outcomes, np.clip(pair, 1, n)[:, None] - 1, axis=1
            )[:, 0]
            factor = factor * (1j * (1.0 - 2.0 * zbit))
        return lam_inv * sign * np.where(ok, factor, 0.0)

    def _estimate_dense(self, mu: tuple[int, ...]) -> np.ndarray:
        n = self.n_modes
        deg = len(mu)
        if deg > DENSE_DEGREE_CAP:
            raise ResourceError(
                f"degree {deg} exceeds the dense-transform cap of {DENSE_DEGREE_CAP}"
            )
        k = deg // 2
        lam_inv = float(1 / lambda_eigenvalue(k, n))
        qt = self.matrices.transpose(0, 2, 1)
        rows = np.asarray(mu) - 1
        pair_factors = 1j * (1.0 - 2.0 * self.outcomes.astype(float))  # (N, n)
        total = np.zeros(len(self), dtype=complex)
        for nu in pair_union_indices(n, k):
            cols = np.asarray(nu) - 1
            sub = qt[:, rows[:, None], cols[None, :]]
            det = np.linalg.det(sub) if deg > 1 else sub[:, 0, 0]
            f = np.ones(len(self), dtype=complex)
            for i in range(0, deg, 2):
                f = f * pair_factors[:, (nu[i] + 1) // 2 - 1]
            total += det * f
        return lam_inv * total

    def estimate_matrix(self, mus: Sequence[Sequence[int]]) -> np.ndarray:
        """Per-sample estimates for several monomials; shape (N, len(mus))."""
        cols = []
        for mu in mus:
            mu = _as_indices(mu)
            if len(mu) % 2:
                raise DomainError(
                    "odd-degree Majorana monomials admit no unbiased shadow estimator"
                )
            if len(mu) == 0:
                cols.append(np.ones(len(self), dtype=complex))
            elif self.is_clifford:
                cols.append(self._estimate_clifford(mu))
            else:
                cols.append(self._estimate_dense(mu))
        return np.stack(cols, axis=1)


def _collect_template_batch(
    state: StateVector, ensemble: str, n_samples: int, seed: int
) -> ShadowBatch:
    n = state.n_qubits
    dim = 2 * n
    axes = triangular_axes(n)
    rng_angles = derive_rng(seed, ensemble, "angles")
    rng_born = derive_rng(seed, ensemble, "born")

    amps = np.tile(state.amplitudes, (n_samples, 1))
    clifford = ensemble in ("four_angle", "two_angle")
    if clifford:
        perms = np.tile(np.arange(1, dim + 1), (n_samples, 1))
        signs = np.ones((n_samples, dim), dtype=np.int8)
        mats = None
    else:
        mats = np.tile(np.eye(dim), (n_samples, 1, 1))
        perms = signs = None

    for axis in axes:
        if clifford:
            ang = sample_clifford_angles(axis, ensemble, n_samples, rng_angles)
        else:
            ang = sample_angles(axis, n_samples, rng_angles)
        _apply_rotation_inplace(amps, n, axis, ang)
        a, b = axis - 2, axis - 1
        if clifford:
            m = ang == math.pi
            signs[m, a] *= -1
            signs[m, b] *= -1
            for angle_val, sa_mul in ((math.pi / 2, +1), (-math.pi / 2, -1)):
                m = ang == angle_val
                pa, pb = perms[m, a].copy(), perms[m, b].copy()
                perms[m, a], perms[m, b] = pb, pa
                sa, sb = signs[m, a].copy(), signs[m, b].copy()
                if sa_mul > 0:  # +pi/2: rows (a,b) <- (-row b, row a)
                    signs[m, a], signs[m, b] = -sb, sa
                else:  # -pi/2: rows (a,b) <- (row b, -row a)
                    signs[m, a], signs[m, b] = sb, -sa
        else:
            c, s = np.cos(ang)[:, None], np.sin(ang)[:, None]
            row_a, row_b = mats[:, a, :].copy(), mats[:, b, :].copy()
            mats[:, a, :] = c * row_a - s * row_b
            mats[:, b, :] = s * row_a + c * row_b

    if ensemble == "haar_o2n":
        reflect = derive_rng(seed, ensemble, "reflection").random(n_samples) < 0.5
        mats[reflect, dim - 1, :] *= -1.0
        flip = np.arange(amps.shape[1]) ^ 1
        amps[reflect] = amps[reflect][:, flip]

    outcomes = born_sample_batch(amps, n, rng_born)
    return ShadowBatch(ensemble, n, outcomes, perms, signs, mats)


def _collect_optimal_batch(state: StateVector, n_samples: int, seed: int) -> ShadowBatch:
    n = state.n_qubits
    dim = 2 * n
    rng_perm = derive_rng(seed, "optimal", "permutation")
    rng_born = derive_rng(seed, "optimal", "born")

    base = np.tile(np.arange(1, dim + 1), (n_samples, 1))
    perms0 = rng_perm.permuted(base, axis=1)
    pairs = np.sort(perms0.reshape(n_samples, n, 2), axis=2)
    order = np.argsort(pairs[:, :, 0], axis=1)
    canon = np.take_along_axis(pairs, order[:, :, None], axis=1).reshape(n_samples, dim)

    uniq, inverse = np.unique(canon, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    u_perms = np.empty((len(uniq), dim), dtype=np.int64)
    u_signs = np.empty((len(uniq), dim), dtype=np.int8)
    u_amps = np.empty((len(uniq), 2**n), dtype=complex)
    for i, row in enumerate(uniq):
        seq = optimal_sequence_for_canonical(tuple(int(v) for v in row), n)
        sp = signed_permutation_of(seq)
        u_perms[i] = sp.perm
        u_signs[i] = sp.signs
        u_amps[i] = apply_sequence(state, seq).amplitudes

    outcomes = born_sample_batch(u_amps[inverse], n, rng_born)
    return ShadowBatch("optimal", n, outcomes, u_perms[inverse], u_signs[inverse], None)


def collect_batch(state: StateVector, ensemble: str, n_samples: int, seed: int) -> ShadowBatch:
    """Vectorized collection; deterministic in (seed, ensemble, n_samples)."""
    if ensemble not in ENSEMBLES:
        raise DomainError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")
    if n_samples < 0:
        raise DomainError("n_samples must be nonnegative")
    if n_samples == 0:
        return ShadowBatch(
            ensemble,
            state.n_qubits,
            np.zeros((0, state.n_qubits), dtype=np.uint8),
            None if ensemble not in CLIFFORD_ENSEMBLES else np.zeros((0, 2 * state.n_qubits), int),
            None if ensemble not in CLIFFORD_ENSEMBLES else np.zeros((0, 2 * state.n_qubits), np.int8),
            None if ensemble in CLIFFORD_ENSEMBLES else np.zeros((0, 2 * state.n_qubits, 2 * state.n_qubits)),
        )
    if ensemble == "optimal":
        return _collect_optimal_batch(state, n_samples, seed)
    return _collect_template_batch(state, ensemble, n_samples, seed)


def collect_shadows(state: StateVector, ensemble: str, n_samples: int, seed: int) -> list[ShadowSample]:
    """N independent shadow samples as a list (see collect_batch for bulk use)."""
    return collect_batch(state, ensemble, n_samples, seed).to_samples()


# ---------------------------------------------------------------------------
# k-RDM assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RdmEstimate:
    order: int
    tensor: np.ndarray
    reports: dict


def estimate_rdm(samples, k: int, method: str = "mean", batch_count: int = 1) -> RdmEstimate:
    """k-RDM tensor assembled by linearity from monomial estimates (k = 1 or 2).

    The returned tensor is exactly Hermitian: the raw linear-combination
    estimate is symmetrized deterministically after assembly.
    """
    if k not in (1, 2):
        raise DomainError(f"k-RDM assembly supports k in {{1, 2}}, got {k}")
    batch = samples if isinstance(samples, ShadowBatch) else _batch_from_list(list(samples))
    n = batch.n_modes

    entries = list(_rdm_entry_indices(n, k))
    expansions = {}
    needed: set[tuple[int, ...]] = set()
    for ps, qs in entries:
        exp = rdm_expansion(ps, qs, n)
        expansions[(ps, qs)] = exp
        needed.update(idx for idx in exp if idx)

    ordered = sorted(needed)
    values = batch.estimate_matrix(ordered) if ordered else np.zeros((len(batch), 0), complex)
    reports = {}
    monomial_estimates: dict[tuple[int, ...], complex] = {(): 1.0 + 0.0j}
    for col, idx in enumerate(ordered):
        vals = values[:, col]
        if method == "median_of_means":
            point, means = _median_of_means(vals, batch_count)
        else:
            point, means = complex(vals.mean()), [complex(vals.mean())]
        monomial_estimates[idx] = point
        reports[idx] = EstimatorReport(idx, point, method, len(means), tuple(means), len(vals))

    shape = (n,) * (2 * k)
    tensor = np.zeros(shape, dtype=complex)
    for ps, qs in entries:
        val = sum(c * monomial_estimates[idx] for idx, c in expansions[(ps, qs)].items())
        tensor[tuple(i - 1 for i in ps + qs)] = val
    tensor = _hermitize(tensor, k)
    return RdmEstimate(k, tensor, reports)


def _rdm_entry_indices(n: int, k: int):
    if k == 1:
        for p in range(1, n + 1):
            for q in range(1, n + 1):
                yield (p,), (q,)
    else:
        for p1 in range(1, n + 1):
            for p2 in range(1, n + 1):
                for q1 in range(1, n + 1):
                    for q2 in range(1, n + 1):
                        yield (p1, p2), (q1, q2)


def _hermitize(tensor: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return (tensor + tensor.conj().T) / 2.0
    swapped = tensor.conj().transpose(2, 3, 0, 1)
    return (tensor + swapped) / 2.0


def _batch_from_list(samples: list[ShadowSample]) -> ShadowBatch:
    if not samples:
        raise DomainError("cannot build a batch from an empty sample list")
    n = samples[0].n_modes
    ensemble = samples[0].ensemble
    outcomes = np.array([s.outcome for s in samples], dtype=np.uint8)
    if all(isinstance(s.transform, SignedPermutation) for s in samples):
        perms = np.array([s.transform.perm for s in samples])
        signs = np.array([s.transform.signs for s in samples], dtype=np.int8)
        return ShadowBatch(ensemble, n, outcomes, perms, signs, None)
    if all(isinstance(s.transform, np.ndarray) for s in samples):
        mats = np.stack([s.transform for s in samples])
        return ShadowBatch(ensemble, n, outcomes, None, None, mats)
    raise DomainError("mixed transform kinds in one sample list")


# ---------------------------------------------------------------------------
# Error-versus-shots experiment (bench)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchConfig:
    state: StateVector
    ensembles: tuple[str, ...]
    shot_grid: tuple[int, ...]
    bootstrap_size: int
    seed: int
    observables: tuple[tuple[int, ...], ...] | None = None


@dataclass(frozen=True)
class BenchRow:
    ensemble: str
    n_shots: int
    mean_abs_error: float
    std_abs_error: float
    bootstrap_size: int
    seed: int


def true_expectation(state: StateVector, mu) -> complex:
    """Dense-oracle tr(gamma_mu rho) for a pure state."""
    indices = _as_indices(mu)
    m = MajoranaMonomial(state.n_qubits, indices)
    g = dense_matrix(m)
    v = state.amplitudes
    return complex(v.conj() @ (g @ v))


def _bootstrap_curve(
    est: np.ndarray, truth: np.ndarray, bootstrap_size: int, rng
) -> tuple[float, float]:
    """Bootstrap the mean-over-observables of |mean estimate - truth|."""
    n = est.shape[0]
    rng = as_rng(rng)
    stats = np.empty(bootstrap_size)
    chunk = max(1, min(bootstrap_size, 64))
    pos = 0
    while pos < bootstrap_size:
        b = min(chunk, bootstrap_size - pos)
        idx = rng.integers(0, n, size=(b, n))
        counts = np.zeros((b, n))
        for r in range(b):
            counts[r] = np.bincount(idx[r], minlength=n)
        means = (counts @ est) / n
        stats[pos : pos + b] = np.abs(means - truth[None, :]).mean(axis=1)
        pos += b
    return float(stats.mean()), float(stats.std())


def variance_experiment(config: BenchConfig) -> list[BenchRow]:
    """Error statistics versus shot count for each requested ensemble.

    For each ensemble a single stream of max(shot_grid) samples is collected;
    each grid value N uses the first N of them, and the mean absolute
    estimator error (averaged over the observable set) is bootstrap-resampled
    with replacement at fixed N.
    """
    state = config.state
    n = state.n_qubits
    mus = config.observables
    if mus is None:
        mus = tuple(combinations(range(1, 2 * n + 1), 2))
    grid = sorted(int(x) for x in config.shot_grid)
    if not grid or grid[0] <= 0:
        raise DomainError("shot grid must contain positive counts")
    truth = np.array([true_expectation(state, mu) for mu in mus])

    rows = []
    for ensemble in config.ensembles:
        batch = collect_batch(state, ensemble, grid[-1], config.seed)
        est = batch.estimate_matrix(mus)
        for n_shots in grid:
            rng = derive_rng(config.seed, "bootstrap", ensemble, n_shots)
            mean_err, std_err = _bootstrap_curve(
                est[:n_shots], truth, config.bootstrap_size, rng
            )
            rows.append(
                BenchRow(ensemble, n_shots, mean_err, std_err, config.bootstrap_size, config.seed)
            )
    return rows


BENCH_CSV_HEADER = "ensemble,N,mean_abs_error,std_abs_error,bootstrap_size,seed"


def bench_rows_to_csv(rows: Sequence[BenchRow]) -> str:
    lines = [BENCH_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.ensemble},{r.n_shots},{r.mean_abs_error:.17g},{r.std_abs_error:.17g},"
            f"{r.bootstrap_size},{r.seed}"
        )
    return "\n".join(lines) + "\n"
