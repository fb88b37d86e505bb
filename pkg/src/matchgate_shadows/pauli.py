"""Exact Pauli-string and Majorana-monomial algebra under the Jordan-Wigner map.

Conventions, used consistently everywhere in the package:

* Qubits and Majorana indices are 1-based.  A system of ``n`` fermionic modes
  maps to ``n`` qubits carrying ``2n`` Majorana operators.
* Qubit 1 is the most significant bit of a computational bitstring
  ``z = (z_1, ..., z_n)``; the state-vector index of ``|z>`` is
  ``sum_k z_k * 2**(n-k)``.
* In bitmasks (``x_mask``, ``z_mask``, monomial masks) bit ``k-1`` stands for
  qubit/index ``k``.
* A :class:`PauliString` encodes the operator ``i**phase * prod_k X_k^{x_k}
  Z_k^{z_k}``.  In this encoding the letter Y on one qubit is ``x=z=1`` with
  one factor ``i`` absorbed into ``phase``; phases are exact integers mod 4,
  never floats.

The Jordan-Wigner images are ``gamma_{2m-1} = Z_1 ... Z_{m-1} X_m`` and
``gamma_{2m} = Z_1 ... Z_{m-1} Y_m``.  Only this map is implemented; it is
isolated in :func:`jw_pauli` so another Majorana-to-Pauli map could be swapped
in without touching the rest of the algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ResourceError

# Dense matrices above this many qubits are refused; property tests stay fast.
DENSE_ORACLE_CAP = 6

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

_SINGLE_QUBIT = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),           # X
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),          # Z
    (1, 1): np.array([[0, -1], [1, 0]], dtype=complex),          # XZ = -iY
}


@dataclass(frozen=True)
class PauliString:
    """Phase-exact n-qubit Pauli operator ``i**phase * prod X^x Z^z``."""

    n_qubits: int
    phase: int
    x_mask: int
    z_mask: int

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise DomainError(f"n_qubits must be positive, got {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if not (0 <= self.x_mask <= full and 0 <= self.z_mask <= full):
            raise DomainError("mask has bits outside the qubit register")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise DomainError("cannot multiply Pauli strings on different registers")
        # Commuting Z^z1 past X^x2 contributes (-1)^{|z1 & x2|}.
        phase = self.phase + other.phase + 2 * (self.z_mask & other.x_mask).bit_count()
        return PauliString(
            self.n_qubits,
            phase % 4,
            self.x_mask ^ other.x_mask,
            self.z_mask ^ other.z_mask,
        )

    @property
    def word_phase(self) -> int:
        """Exponent of i multiplying the conventional I/X/Y/Z word."""
        n_y = (self.x_mask & self.z_mask).bit_count()
        return (self.phase - n_y) % 4

    def word(self) -> str:
        """Letters of the Pauli word, qubit 1 first."""
        letters = []
        for k in range(self.n_qubits):
            x = (self.x_mask >> k) & 1
            z = (self.z_mask >> k) & 1
            letters.append("IXZY"[x + 2 * z] if x + 2 * z != 3 else "Y")
        return "".join(letters)

    def coefficient(self) -> complex:
        """Exact value of i**word_phase as a complex number."""
        return _PHASES[self.word_phase]

    def dense(self) -> np.ndarray:
        """Dense matrix, qubit 1 as the most significant tensor factor."""
        if self.n_qubits > DENSE_ORACLE_CAP:
            raise ResourceError(
                f"dense Pauli on {self.n_qubits} qubits exceeds the cap of {DENSE_ORACLE_CAP}"
            )
        out = np.array([[_PHASES[self.phase]]], dtype=complex)
        for k in range(self.n_qubits):
            x = (self.x_mask >> k) & 1
            z = (self.z_mask >> k) & 1
            out = np.kron(out, _SINGLE_QUBIT[(x, z)])
        return out


@dataclass(frozen=True)
class MajoranaMonomial:
    """Ordered product gamma_{mu_1} ... gamma_{mu_k}, indices strictly increasing."""

    n_modes: int
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_modes < 1:
            raise DomainError(f"n_modes must be positive, got {self.n_modes}")
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(not 1 <= i <= 2 * self.n_modes for i in idx):
            raise DomainError(f"Majorana indices {idx} outside [1, {2 * self.n_modes}]")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise DomainError(f"Majorana indices {idx} must be strictly increasing")

    @property
    def degree(self) -> int:
        return len(self.indices)

    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << (i - 1)
        return m


def jw_pauli(k: int, n_modes: int) -> PauliString:
    """Pauli string of the single Majorana operator gamma_k on n modes."""
    if not 1 <= k <= 2 * n_modes:
        raise DomainError(f"Majorana index {k} outside [1, {2 * n_modes}]")
    qubit = (k + 1) // 2
    z_prefix = (1 << (qubit - 1)) - 1
    x_mask = 1 << (qubit - 1)
    if k % 2 == 1:
        return PauliString(n_modes, 0, x_mask, z_prefix)
    # even index: Z...Z Y, with Y = i * XZ absorbed as phase exponent 1
    return PauliString(n_modes, 1, x_mask, z_prefix | x_mask)


def monomial_to_pauli(m: MajoranaMonomial) -> PauliString:
    """Ordered product of the jw_pauli images, phase tracked exactly."""
    out = PauliString.identity(m.n_modes)
    for k in m.indices:
        out = out * jw_pauli(k, m.n_modes)
    return out


def _as_bits(z: Sequence[int] | str, n: int) -> tuple[int, ...]:
    if isinstance(z, str):
        bits = tuple(int(c) for c in z)
    else:
        bits = tuple(int(b) for b in z)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise DomainError(f"bitstring {z!r} is not a length-{n} 0/1 string")
    return bits


def bitstring_expectation(m: MajoranaMonomial, z: Sequence[int] | str) -> complex:
    """Exact <z| gamma_mu |z> for a computational-basis bitstring z.

    Nonzero only when mu is a disjoint union of adjacent pairs {2k-1, 2k};
    the value is then a product of +-i factors fixed by the bits z_k.
    """
    bits = _as_bits(z, m.n_modes)
    p = monomial_to_pauli(m)
    if p.x_mask != 0:
        return 0.0 + 0.0j
    z_bits_mask = 0
    for k, b in enumerate(bits, start=1):
        if b:
            z_bits_mask |= 1 << (k - 1)
    sign = -1.0 if (p.z_mask & z_bits_mask).bit_count() % 2 else 1.0
    return _PHASES[p.phase] * sign


def dense_matrix(obj: MajoranaMonomial | PauliString) -> np.ndarray:
    """Dense complex matrix of a monomial or Pauli string (oracle for tests)."""
    if isinstance(obj, PauliString):
        return obj.dense()
    if isinstance(obj, MajoranaMonomial):
        if obj.n_modes > DENSE_ORACLE_CAP:
            raise ResourceError(
                f"dense monomial on {obj.n_modes} modes exceeds the cap of {DENSE_ORACLE_CAP}"
            )
        return monomial_to_pauli(obj).dense()
    raise DomainError(f"cannot build a dense matrix from {type(obj).__name__}")


def _multiply_by_gamma(indices: tuple[int, ...], k: int) -> tuple[int, tuple[int, ...]]:
    """Reduce gamma_indices * gamma_k to (sign, sorted indices).

    The incoming gamma_k anticommutes past every factor with a larger index;
    a duplicate cancels through gamma_k^2 = I.
    """
    greater = sum(1 for i in indices if i > k)
    sign = -1 if greater % 2 else 1
    if k in indices:
        return sign, tuple(i for i in indices if i != k)
    pos = sum(1 for i in indices if i < k)
    return sign, indices[:pos] + (k,) + indices[pos:]


def rdm_expansion(
    p_indices: Sequence[int], q_indices: Sequence[int], n_modes: int
) -> dict[tuple[int, ...], complex]:
    """Expand a'_{p1}...a'_{pk} a_{q1}...a_{qk} over Majorana monomials.

    Uses a_p = (gamma_{2p-1} + i gamma_{2p}) / 2.  Coefficients are Gaussian
    integers scaled by 2**(-2k), which binary floats represent exactly.
    Repeated creation (or annihilation) indices give the zero combination,
    returned as an empty mapping.
    """
    ps = [int(p) for p in p_indices]
    qs = [int(q) for q in q_indices]
    if len(ps) != len(qs):
        raise DomainError("creation and annihilation index lists must have equal length")
    for i in ps + qs:
        if not 1 <= i <= n_modes:
            raise DomainError(f"mode index {i} outside [1, {n_modes}]")
    if len(set(ps)) != len(ps) or len(set(qs)) != len(qs):
        return {}

    factors = [((2 * p - 1, 0.5), (2 * p, -0.5j)) for p in ps]
    factors += [((2 * q - 1, 0.5), (2 * q, 0.5j)) for q in qs]

    terms: dict[tuple[int, ...], complex] = {(): 1.0 + 0.0j}
    for factor in factors:
        new_terms: dict[tuple[int, ...], complex] = {}
        for indices, coeff in terms.items():
            for k, c in factor:
                sign, reduced = _multiply_by_gamma(indices, k)
                new_terms[reduced] = new_terms.get(reduced, 0.0) + coeff * c * sign
        terms = new_terms

    return {idx: c for idx, c in terms.items() if c != 0}


def expansion_expectation(
    expansion: Mapping[tuple[int, ...], complex],
    expectations: Mapping[tuple[int, ...], complex],
) -> complex:
    """Contract an rdm_expansion with per-monomial expectation values."""
    total = 0.0 + 0.0j
    for indices, coeff in expansion.items():
        total += coeff * expectations[indices]
    return total


def all_monomials(n_modes: int, degrees: Iterable[int] | None = None):
    """Yield MajoranaMonomial objects, optionally restricted to given degrees."""
    from itertools import combinations

    allowed = None if degrees is None else set(degrees)
    for d in range(0, 2 * n_modes + 1):
        if allowed is not None and d not in allowed:
            continue
        for combo in combinations(range(1, 2 * n_modes + 1), d):
            yield MajoranaMonomial(n_modes, combo)
