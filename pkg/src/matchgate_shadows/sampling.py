"""Samplers for the matchgate-circuit ensembles.

All samplers emit :class:`~matchgate_shadows.givens.GivensSequence` objects
over the same triangular schedule of n(2n-1) slots: diagonal l = 1..2n-1
holds axes 2..(2n+1-l) in circuit time order.  The ensembles differ only in
how the angle of the slot at axis k is drawn:

* ``haar``       density proportional to |sin theta|**(k-2) on (-pi, pi],
                 giving the uniform (Haar) distribution on SO(2n);
* ``four_angle`` Clifford angles with p(0) = p(pi) = 1/(2k) and
                 p(+-pi/2) = (k-1)/(2k);
* ``two_angle``  {0, pi/2} with p(0) = 1/k, p(pi/2) = (k-1)/k;
* ``haar_o2n``   haar followed by a terminal reflection with probability 1/2,
                 extending the ensemble from SO(2n) to O(2n);
* ``optimal``    the gate-count-optimal sampler: uniform permutation ->
                 perfect matching -> canonical permutation -> bubblesort ->
                 one pi/2 rotation per transposition.

Samplers are pure given an explicit rng; parallel callers must hold
independently seeded generators.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ._rng import as_rng
from .errors import DomainError
from .givens import (
    GivensRotation,
    GivensSequence,
    PerfectMatching,
    brickwall_transform,
    bubblesort_transpositions,
    canonical_permutation,
    inversion_count,
    perfect_matching_of,
)

ENSEMBLES = ("haar", "haar_o2n", "four_angle", "two_angle", "optimal")


def triangular_axes(n_modes: int) -> list[int]:
    """Axis schedule of the triangular decomposition, circuit time order."""
    dim = 2 * n_modes
    axes = []
    for diag in range(1, dim):
        axes.extend(range(2, dim + 2 - diag))
    return axes


def sample_angle(k: int, rng) -> float:
    """One angle with density proportional to |sin theta|**(k-2) on (-pi, pi]."""
    return float(sample_angles(k, 1, rng)[0])


def sample_angles(k: int, size: int, rng) -> np.ndarray:
    """Vectorized :func:`sample_angle`; k = 2 reduces to the uniform density.

    Draws u = cos(theta) from the symmetric Beta((k-1)/2, (k-1)/2) law mapped
    to [-1, 1], then assigns the sign of theta uniformly.  Exact, no
    rejection loop.
    """
    if k < 2:
        raise DomainError(f"angle index k must be >= 2, got {k}")
    rng = as_rng(rng)
    u = 2.0 * rng.beta((k - 1) / 2.0, (k - 1) / 2.0, size=size) - 1.0
    theta = np.arccos(np.clip(u, -1.0, 1.0))
    flip = rng.random(size) < 0.5
    theta = np.where(flip, -theta, theta)
    theta[theta <= -math.pi] += 2 * math.pi
    return theta


def clifford_angle_probabilities(k: int, mode: str) -> dict[float, float]:
    """Per-slot angle distribution of the Clifford ensembles at axis k."""
    if k < 2:
        raise DomainError(f"axis must be >= 2, got {k}")
    if mode == "four_angle":
        return {
            0.0: 1.0 / (2 * k),
            math.pi: 1.0 / (2 * k),
            math.pi / 2: (k - 1) / (2 * k),
            -math.pi / 2: (k - 1) / (2 * k),
        }
    if mode == "two_angle":
        return {0.0: 1.0 / k, math.pi / 2: (k - 1) / k}
    raise DomainError(f"unknown Clifford angle mode {mode!r}")


def sample_clifford_angles(k: int, mode: str, size: int, rng) -> np.ndarray:
    probs = clifford_angle_probabilities(k, mode)
    angles = np.array(list(probs))
    weights = np.array(list(probs.values()))
    rng = as_rng(rng)
    return angles[rng.choice(len(angles), size=size, p=weights)]


def haar_sequence(n_modes: int, rng) -> GivensSequence:
    """Triangular circuit whose matrix is Haar-uniform on SO(2n)."""
    rng = as_rng(rng)
    rots = tuple(
        GivensRotation(axis, sample_angle(axis, rng)) for axis in triangular_axes(n_modes)
    )
    return GivensSequence(n_modes, rots)


def clifford_sequence(n_modes: int, rng, mode: str = "four_angle") -> GivensSequence:
    """Triangular circuit with Clifford angles from the four- or two-angle law."""
    rng = as_rng(rng)
    rots = []
    for axis in triangular_axes(n_modes):
        angle = float(sample_clifford_angles(axis, mode, 1, rng)[0])
        rots.append(GivensRotation(axis, angle))
    return GivensSequence(n_modes, tuple(rots))


def add_random_reflection(seq: GivensSequence, rng) -> GivensSequence:
    """Toggle the terminal reflection with probability 1/2."""
    rng = as_rng(rng)
    if rng.random() < 0.5:
        return GivensSequence(seq.n_modes, seq.rotations, not seq.terminal_reflection)
    return GivensSequence(seq.n_modes, seq.rotations, seq.terminal_reflection)


def optimal_sequence_for_canonical(canon: tuple[int, ...], n_modes: int) -> GivensSequence:
    """Compile a canonical matching permutation into pi/2 rotations.

    The bubblesort decomposition fixes the gate multiset (one transposition
    per inversion); the gates are then packed into the brick-wall layout,
    which realizes the identical permutation with the same count but a
    greedy-layer depth of at most 2n.
    """
    axes = bubblesort_transpositions(canon)
    layers = brickwall_transform(axes, n_modes)
    rots = tuple(
        GivensRotation(axis, math.pi / 2) for layer in layers for axis in layer
    )
    return GivensSequence(n_modes, rots)


def sample_optimal_circuit(n_modes: int, rng) -> GivensSequence:
    """Gate-count-optimal Clifford circuit for the shadows protocol.

    A uniform permutation is reduced to its perfect matching, the matching's
    canonical permutation is decomposed into adjacent transpositions, and
    every transposition becomes a pi/2 rotation.  The gate count equals the
    canonical permutation's inversion count.
    """
    rng = as_rng(rng)
    dim = 2 * n_modes
    perm = tuple(int(v) + 1 for v in rng.permutation(dim))
    matching = perfect_matching_of(perm)
    canon = canonical_permutation(matching)
    return optimal_sequence_for_canonical(canon, n_modes)


def sample_circuit(ensemble: str, n_modes: int, rng) -> GivensSequence:
    """Dispatch by ensemble name (see ENSEMBLES)."""
    rng = as_rng(rng)
    if ensemble == "haar":
        return haar_sequence(n_modes, rng)
    if ensemble == "haar_o2n":
        return add_random_reflection(haar_sequence(n_modes, rng), rng)
    if ensemble in ("four_angle", "two_angle"):
        return clifford_sequence(n_modes, rng, mode=ensemble)
    if ensemble == "optimal":
        return sample_optimal_circuit(n_modes, rng)
    raise DomainError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")


def all_perfect_matchings(n_modes: int) -> list[PerfectMatching]:
    """Every perfect matching of [2n] ((2n-1)!! of them); n is kept small."""
    dim = 2 * n_modes

    def rec(avail: tuple[int, ...]):
        if not avail:
            yield ()
            return
        first, rest = avail[0], avail[1:]
        for partner in rest:
            remaining = tuple(x for x in rest if x != partner)
            for tail in rec(remaining):
                yield ((first, partner),) + tail

    return [PerfectMatching(pairs) for pairs in rec(tuple(range(1, dim + 1)))]


def optimal_gate_count_summary(n_modes: int, n_samples: int, rng) -> dict:
    """Empirical mean gate count of the optimal sampler next to the exact value.

    The exact value enumerates all matchings with uniform weight (the law
    induced by a uniform permutation).  The n(n-1)/4 figure is included for
    reference only; it is not asserted anywhere.
    """
    rng = as_rng(rng)
    counts = [sample_optimal_circuit(n_modes, rng).gate_count for _ in range(n_samples)]
    exact = float(
        np.mean([inversion_count(canonical_permutation(m)) for m in all_perfect_matchings(n_modes)])
    )
    return {
        "n_modes": n_modes,
        "n_samples": n_samples,
        "empirical_mean_gates": float(np.mean(counts)),
        "enumeration_mean_gates": exact,
        "quarter_formula_n(n-1)/4": n_modes * (n_modes - 1) / 4.0,
    }


def degree2_monomial_indices(n_modes: int) -> list[tuple[int, int]]:
    """All index pairs (p, q), p < q, of the degree-2 Majorana observables."""
    return list(combinations(range(1, 2 * n_modes + 1), 2))
