"""Givens-rotation circuits, signed permutations and perfect matchings.

Matrix/circuit conventions (fixed here once, asserted by the test suite):

* A :class:`GivensSequence` lists rotations in circuit time order: the first
  entry acts on the state first.
* ``compose_to_matrix`` returns the matrix Q satisfying
  ``U^dag gamma_k U = sum_l Q[k, l] gamma_l`` for the circuit unitary U.
  Because conjugation composes contravariantly, later gates multiply on the
  left: ``Q = R^flag @ g_m @ ... @ g_1`` with R = diag(1, ..., 1, -1) the
  terminal reflection.
* Consequently ``matrix(s1 followed by s2) = matrix(s2) @ matrix(s1)``.
* A :class:`SignedPermutation` stores the same matrix exactly: row k has its
  single nonzero ``signs[k]`` in column ``perm[k]`` (1-based), i.e. the
  circuit maps gamma_k -> signs[k] * gamma_{perm[k]}.

A Givens rotation of angle theta on axis k mixes the adjacent Majorana pair
(k-1, k): gamma_{k-1} -> cos(theta) gamma_{k-1} - sin(theta) gamma_k and
gamma_k -> sin(theta) gamma_{k-1} + cos(theta) gamma_k.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .pauli import MajoranaMonomial

CLIFFORD_ANGLES = (0.0, math.pi, math.pi / 2, -math.pi / 2)


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    a = math.fmod(float(angle), 2 * math.pi)
    if a <= -math.pi:
        a += 2 * math.pi
    elif a > math.pi:
        a -= 2 * math.pi
    return a


@dataclass(frozen=True)
class GivensRotation:
    """Rotation by ``angle`` in the plane of the adjacent pair (axis-1, axis)."""

    axis: int
    angle: float

    def __post_init__(self) -> None:
        if self.axis < 2:
            raise DomainError(f"axis must be >= 2, got {self.axis}")
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @property
    def is_clifford(self) -> bool:
        return self.angle in CLIFFORD_ANGLES


@dataclass(frozen=True)
class GivensSequence:
    """Circuit IR: ordered rotations plus an optional terminal reflection.

    The reflection flips the sign of the last Majorana operator gamma_{2n}
    (a Pauli X on the last qubit) and is applied after all rotations.
    """

    n_modes: int
    rotations: tuple[GivensRotation, ...] = field(default_factory=tuple)
    terminal_reflection: bool = False

    def __post_init__(self) -> None:
        if self.n_modes < 1:
            raise DomainError(f"n_modes must be positive, got {self.n_modes}")
        rots = tuple(self.rotations)
        object.__setattr__(self, "rotations", rots)
        for r in rots:
            if r.axis > 2 * self.n_modes:
                raise DomainError(
                    f"axis {r.axis} outside [2, {2 * self.n_modes}] for {self.n_modes} modes"
                )

    @property
    def gate_count(self) -> int:
        return len(self.rotations)

    @property
    def is_clifford(self) -> bool:
        return all(r.is_clifford for r in self.rotations)

    def depth(self) -> int:
        return greedy_depth([r.axis for r in self.rotations])

    def inverse_rotations(self) -> "GivensSequence":
        """Angle-negated reverse; inverts the circuit when no reflection is set."""
        rots = tuple(GivensRotation(r.axis, -r.angle) for r in reversed(self.rotations))
        return GivensSequence(self.n_modes, rots, self.terminal_reflection)


_CLIFFORD_COS_SIN = {
    0.0: (1.0, 0.0),
    math.pi: (-1.0, 0.0),
    math.pi / 2: (0.0, 1.0),
    -math.pi / 2: (0.0, -1.0),
}


def _cos_sin(angle: float) -> tuple[float, float]:
    # Clifford angles get exact 0/+-1 entries so signed permutations compare
    # entrywise equal to the composed matrix.
    exact = _CLIFFORD_COS_SIN.get(angle)
    return exact if exact is not None else (math.cos(angle), math.sin(angle))


def givens_matrix(n_modes: int, axis: int, angle: float) -> np.ndarray:
    """Dense 2n x 2n matrix of one adjacent Givens rotation."""
    dim = 2 * n_modes
    if not 2 <= axis <= dim:
        raise DomainError(f"axis {axis} outside [2, {dim}]")
    g = np.eye(dim)
    c, s = _cos_sin(angle)
    a, b = axis - 2, axis - 1
    g[a, a] = c
    g[a, b] = -s
    g[b, a] = s
    g[b, b] = c
    return g


def compose_to_matrix(seq: GivensSequence) -> np.ndarray:
    """Matrix Q of the whole circuit; see the module docstring for the order."""
    dim = 2 * seq.n_modes
    q = np.eye(dim)
    for r in seq.rotations:
        c, s = _cos_sin(r.angle)
        a, b = r.axis - 2, r.axis - 1
        row_a = q[a].copy()
        row_b = q[b].copy()
        q[a] = c * row_a - s * row_b
        q[b] = s * row_a + c * row_b
    if seq.terminal_reflection:
        q[dim - 1] *= -1.0
    return q


def assert_orthogonal(q: np.ndarray, tol: float = 1e-10) -> None:
    dev = np.max(np.abs(q.T @ q - np.eye(q.shape[0])))
    if dev > tol:
        raise DomainError(f"matrix is not orthogonal: max |Q^T Q - I| = {dev:.3e}")


@dataclass(frozen=True)
class SignedPermutation:
    """Exact signed permutation matrix on 2n Majorana indices (1-based)."""

    n_modes: int
    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        dim = 2 * self.n_modes
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)
        if sorted(perm) != list(range(1, dim + 1)):
            raise DomainError(f"perm {perm} is not a bijection on [1, {dim}]")
        if len(signs) != dim or any(s not in (-1, 1) for s in signs):
            raise DomainError("signs must be a +-1 vector of length 2n")

    @classmethod
    def identity(cls, n_modes: int) -> "SignedPermutation":
        dim = 2 * n_modes
        return cls(n_modes, tuple(range(1, dim + 1)), (1,) * dim)

    def __matmul__(self, other: "SignedPermutation") -> "SignedPermutation":
        """Matrix product self @ other (other's action happens first on rows)."""
        if self.n_modes != other.n_modes:
            raise DomainError("size mismatch in signed permutation product")
        perm = tuple(other.perm[self.perm[k] - 1] for k in range(2 * self.n_modes))
        signs = tuple(
            self.signs[k] * other.signs[self.perm[k] - 1] for k in range(2 * self.n_modes)
        )
        return SignedPermutation(self.n_modes, perm, signs)

    def transpose(self) -> "SignedPermutation":
        dim = 2 * self.n_modes
        perm = [0] * dim
        signs = [1] * dim
        for k in range(dim):
            j = self.perm[k] - 1
            perm[j] = k + 1
            signs[j] = self.signs[k]
        return SignedPermutation(self.n_modes, tuple(perm), tuple(signs))

    inverse = transpose

    def to_matrix(self) -> np.ndarray:
        dim = 2 * self.n_modes
        m = np.zeros((dim, dim))
        for k in range(dim):
            m[k, self.perm[k] - 1] = self.signs[k]
        return m

    def determinant(self) -> int:
        par = -1 if inversion_count(self.perm) % 2 else 1
        for s in self.signs:
            par *= s
        return par


def act_on_monomial(
    q: SignedPermutation, mu: MajoranaMonomial | Sequence[int]
) -> tuple[tuple[int, ...], int]:
    """Image (nu, sign) of gamma_mu under the channel of a Clifford circuit.

    nu is the sorted image of mu under the permutation; the sign collects the
    per-index entry signs and the anticommutation parity of the sort.
    """
    indices = mu.indices if isinstance(mu, MajoranaMonomial) else tuple(mu)
    images = [q.perm[k - 1] for k in indices]
    sign = 1
    for k in indices:
        sign *= q.signs[k - 1]
    inv = sum(
        1 for i in range(len(images)) for j in range(i + 1, len(images)) if images[i] > images[j]
    )
    if inv % 2:
        sign = -sign
    return tuple(sorted(images)), sign


def signed_permutation_of(seq: GivensSequence) -> SignedPermutation:
    """Exact signed permutation of a Clifford-angle sequence.

    Every angle must lie in {0, pi, +-pi/2}; anything else is a domain error.
    Equals ``compose_to_matrix`` entrywise with zero floating error.
    """
    dim = 2 * seq.n_modes
    perm = list(range(1, dim + 1))
    signs = [1] * dim
    for r in seq.rotations:
        a, b = r.axis - 2, r.axis - 1
        if r.angle == 0.0:
            continue
        if r.angle == math.pi:
            signs[a] *= -1
            signs[b] *= -1
        elif r.angle == math.pi / 2:
            # rows (a, b) <- (-row b, row a)
            perm[a], perm[b] = perm[b], perm[a]
            signs[a], signs[b] = -signs[b], signs[a]
        elif r.angle == -math.pi / 2:
            perm[a], perm[b] = perm[b], perm[a]
            signs[a], signs[b] = signs[b], -signs[a]
        else:
            raise DomainError(f"angle {r.angle} is not a Clifford angle")
    if seq.terminal_reflection:
        signs[dim - 1] *= -1
    return SignedPermutation(seq.n_modes, tuple(perm), tuple(signs))


def sequence_of_signed_permutation(sp: SignedPermutation) -> GivensSequence:
    """Compile a signed permutation back into Clifford-angle rotations.

    Determinant -1 elements receive the terminal reflection.  The result
    satisfies ``signed_permutation_of(sequence_of_signed_permutation(sp)) == sp``.
    """
    dim = 2 * sp.n_modes
    target = sp
    use_reflection = sp.determinant() == -1
    if use_reflection:
        signs = list(sp.signs)
        signs[dim - 1] *= -1
        target = SignedPermutation(sp.n_modes, sp.perm, tuple(signs))

    rotations: list[GivensRotation] = []
    # Build the permutation part from adjacent pi/2 rotations, tracking the
    # signed permutation realized so far, then fix residual signs with pi
    # rotations (each flips an adjacent pair of signs).
    realized = SignedPermutation.identity(sp.n_modes)
    for axis in bubblesort_transpositions(target.perm):
        rotations.append(GivensRotation(axis, math.pi / 2))
        step = signed_permutation_of(
            GivensSequence(sp.n_modes, (GivensRotation(axis, math.pi / 2),))
        )
        realized = step @ realized
    residual = [target.signs[k] * realized.signs[k] for k in range(dim)]
    flip = [k for k in range(dim) if residual[k] == -1]
    if len(flip) % 2:
        raise DomainError("sign pattern unreachable: odd residual with det +1 target")
    # Flip pairs (i, j) via the chain of adjacent pair-flips i..j.
    for i, j in zip(flip[0::2], flip[1::2]):
        for a in range(i, j):
            rotations.append(GivensRotation(a + 2, math.pi))
    return GivensSequence(sp.n_modes, tuple(rotations), use_reflection)


def minor_determinant(q: np.ndarray, mu: Sequence[int], nu: Sequence[int]) -> float:
    """det of the submatrix with rows mu and columns nu (1-based index sets)."""
    mu = tuple(mu)
    nu = tuple(nu)
    if len(mu) != len(nu):
        raise DomainError("row and column index sets must have equal size")
    if not mu:
        return 1.0
    rows = np.asarray(mu) - 1
    cols = np.asarray(nu) - 1
    return float(np.linalg.det(np.asarray(q)[np.ix_(rows, cols)]))


# ---------------------------------------------------------------------------
# Permutations, matchings and transposition circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerfectMatching:
    """Partition of [2n] into n unordered pairs, stored canonically sorted."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        canon = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", canon)
        flat = [i for p in canon for i in p]
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise DomainError(f"pairs {canon} do not partition [1, {len(flat)}]")

    @property
    def n_modes(self) -> int:
        return len(self.pairs)


def perfect_matching_of(perm: Sequence[int] | SignedPermutation) -> PerfectMatching:
    """Matching {{p(2i-1), p(2i)}} of a permutation in one-line notation."""
    if isinstance(perm, SignedPermutation):
        perm = perm.perm
    p = tuple(int(x) for x in perm)
    if len(p) % 2:
        raise DomainError("permutation must act on an even number of indices")
    return PerfectMatching(tuple((p[2 * i], p[2 * i + 1]) for i in range(len(p) // 2)))


def canonical_permutation(m: PerfectMatching) -> tuple[int, ...]:
    """Pairs sorted internally then by first element; minimizes inversions."""
    return tuple(i for pair in m.pairs for i in pair)


def inversion_count(perm: Sequence[int]) -> int:
    p = list(perm)
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def apply_transpositions(axes: Iterable[int], dim: int) -> tuple[int, ...]:
    """One-line permutation built by swapping positions (axis-1, axis) in order."""
    arr = list(range(1, dim + 1))
    for axis in axes:
        if not 2 <= axis <= dim:
            raise DomainError(f"transposition axis {axis} outside [2, {dim}]")
        arr[axis - 2], arr[axis - 1] = arr[axis - 1], arr[axis - 2]
    return tuple(arr)


def _invert(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for pos, val in enumerate(perm):
        inv[val - 1] = pos + 1
    return inv


def bubblesort_transpositions(perm: Sequence[int]) -> list[int]:
    """Adjacent-transposition decomposition of a permutation via bubblesort.

    Applying the returned axes in order to the identity arrangement recovers
    ``perm`` (see :func:`apply_transpositions`); the length equals the
    inversion count, which is minimal.
    """
    p = tuple(int(x) for x in perm)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise DomainError(f"{perm} is not a permutation in one-line notation")
    # Bubblesorting the inverse records, in order, exactly the swap sequence
    # whose composition equals perm itself.
    arr = _invert(p)
    axes: list[int] = []
    m = len(arr)
    for top in range(m - 1, 0, -1):
        for i in range(top):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                axes.append(i + 2)
    return axes


def greedy_depth(axes: Sequence[int]) -> int:
    """Layer count when gates are packed greedily into disjoint-axis layers."""
    frontier: dict[int, int] = {}
    depth = 0
    for axis in axes:
        layer = max(frontier.get(axis - 1, 0), frontier.get(axis, 0)) + 1
        frontier[axis - 1] = layer
        frontier[axis] = layer
        depth = max(depth, layer)
    return depth


def parse_triangular(axes: Sequence[int], n_modes: int) -> list[list[int]]:
    """Split a transposition circuit into the diagonals of the triangular layout.

    Diagonal l (1-based) may only hold strictly increasing axes within
    [2, 2n+1-l]; at most 2n-1 diagonals exist.  Raises DomainError otherwise.
    """
    dim = 2 * n_modes
    diagonals: list[list[int]] = [[]]
    for axis in axes:
        if not 2 <= axis <= dim:
            raise DomainError(f"axis {axis} outside [2, {dim}]")
        if diagonals[-1] and axis <= diagonals[-1][-1]:
            diagonals.append([])
        diagonals[-1].append(axis)
    if diagonals == [[]]:
        diagonals = []
    if len(diagonals) > dim - 1:
        raise DomainError("circuit does not fit the triangular layout: too many diagonals")
    for l, diag in enumerate(diagonals, start=1):
        if diag and diag[-1] > dim + 1 - l:
            raise DomainError(
                f"diagonal {l} holds axis {diag[-1]} beyond its bound {dim + 1 - l}"
            )
    return diagonals


_BRAID_REWRITE = {
    (0, 0, 0): (0, 0, 0),
    (1, 0, 0): (0, 1, 0),
    (0, 1, 0): (1, 0, 0),
    (0, 0, 1): (0, 1, 0),
    (1, 1, 0): (0, 1, 1),
    (0, 1, 1): (1, 1, 0),
    (1, 0, 1): (0, 0, 0),
    (1, 1, 1): (1, 1, 1),
}


def braid_rewrite(b1: int, b2: int, b3: int) -> tuple[int, int, int]:
    """Rewrite tau_i^b1 tau_{i+1}^b2 tau_i^b3 as tau_{i+1}^b1' tau_i^b2' tau_{i+1}^b3'.

    The occupation count never increases; the full braid case (1,1,1) maps to
    itself, the double-transposition case (1,0,1) cancels.
    """
    key = (int(b1), int(b2), int(b3))
    if any(b not in (0, 1) for b in key):
        raise DomainError("braid occupation bits must be 0 or 1")
    return _BRAID_REWRITE[key]


def brickwall_transform(axes: Sequence[int], n_modes: int) -> list[list[int]]:
    """Rewrite a triangular transposition circuit into brick-wall layers.

    The input must parse as the triangular layout.  The output realizes the
    identical permutation with gate count equal to its inversion count (hence
    never more gates than the input) arranged in alternating even/odd layers,
    at most 2n of them.
    """
    parse_triangular(axes, n_modes)
    dim = 2 * n_modes
    target = apply_transpositions(axes, dim)
    # Odd-even transposition sort of the inverse arrangement emits, pass by
    # pass, swap layers whose composition equals the target permutation.
    arr = _invert(target)
    layers: list[list[int]] = []
    for layer_idx in range(dim):
        start = 0 if layer_idx % 2 == 0 else 1
        layer = []
        for i in range(start, dim - 1, 2):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                layer.append(i + 2)
        if layer:
            layers.append(layer)
        if arr == sorted(arr) and layer_idx >= 1:
            break
    flat = [a for layer in layers for a in layer]
    if apply_transpositions(flat, dim) != target:
        raise DomainError("brick-wall rewrite failed to reproduce the permutation")
    return layers


# ---------------------------------------------------------------------------
# Circuit JSON wire format
# ---------------------------------------------------------------------------


def circuit_to_json(seq: GivensSequence) -> dict:
    """Wire format: n_modes, rotations [{axis, angle}], terminal_reflection.

    Clifford circuits additionally carry their exact signed permutation.
    """
    doc = {
        "n_modes": seq.n_modes,
        "rotations": [{"axis": r.axis, "angle": r.angle} for r in seq.rotations],
        "terminal_reflection": seq.terminal_reflection,
    }
    if seq.is_clifford:
        sp = signed_permutation_of(seq)
        doc["signed_permutation"] = {"perm": list(sp.perm), "signs": list(sp.signs)}
    return doc


def circuit_from_json(doc: dict | str) -> GivensSequence:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        rots = tuple(GivensRotation(int(r["axis"]), float(r["angle"])) for r in doc["rotations"])
        return GivensSequence(int(doc["n_modes"]), rots, bool(doc.get("terminal_reflection", False)))
    except (KeyError, TypeError) as exc:
        from .errors import DataError

        raise DataError(f"malformed circuit JSON: {exc}") from exc
