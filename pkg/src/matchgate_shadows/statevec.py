"""Dense state-vector simulation of matchgate circuits.

Under Jordan-Wigner, the rotation on axis k is a Pauli rotation
exp(-i theta/2 P): for even k = 2m it is a Z rotation on qubit m, for odd
k = 2m+1 an XX rotation on qubits (m, m+1).  The terminal reflection is a
Pauli X on the last qubit.  Qubit 1 is the most significant bit of the
amplitude index (see :mod:`matchgate_shadows.pauli`).

Pure states only; desk-scale inputs to the protocol are pure, and mixed-state
claims are exercised through ensembles of pure states.  Gate application is
an in-place stride loop over a private copy, bit-exact for a fixed seed and
gate order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import as_rng
from .errors import DataError, DomainError, InternalError, ResourceError
from .givens import GivensRotation, GivensSequence

SIMULATOR_QUBIT_CAP = 14
NORM_TOL = 1e-10
FILE_NORM_TOL = 1e-6


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise DomainError(
                f"amplitude vector has shape {amps.shape}, expected (2**{self.n_qubits},)"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def _check_n(n_qubits: int) -> None:
    if n_qubits < 1:
        raise DomainError(f"n_qubits must be positive, got {n_qubits}")
    if n_qubits > SIMULATOR_QUBIT_CAP:
        raise ResourceError(
            f"{n_qubits} qubits exceeds the simulator cap of {SIMULATOR_QUBIT_CAP}"
        )


def basis_state(bits, n_qubits: int | None = None) -> StateVector:
    """|z> for a bitstring z given as a string or an int sequence."""
    if isinstance(bits, str):
        bits = tuple(int(c) for c in bits)
    bits = tuple(int(b) for b in bits)
    n = n_qubits if n_qubits is not None else len(bits)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise DomainError(f"{bits} is not a valid length-{n} bitstring")
    _check_n(n)
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    amps = np.zeros(2**n, dtype=complex)
    amps[idx] = 1.0
    return StateVector(n, amps)


def random_state(n_qubits: int, rng) -> StateVector:
    """Haar-random pure state."""
    _check_n(n_qubits)
    rng = as_rng(rng)
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(n_qubits, v / np.linalg.norm(v))


def make_state(kind: str, *, bits=None, n_qubits: int | None = None, path=None, rng=None) -> StateVector:
    """Uniform entry point for basis / random_haar / from_file states."""
    if kind == "basis":
        return basis_state(bits, n_qubits)
    if kind == "random_haar":
        if n_qubits is None:
            raise DomainError("random_haar requires n_qubits")
        return random_state(n_qubits, rng)
    if kind == "from_file":
        if path is None:
            raise DomainError("from_file requires a path")
        return load_state(path)
    raise DomainError(f"unknown state kind {kind!r}")


def save_state(state: StateVector, path) -> None:
    """State file: header 'nqubits N' then 2**N lines 're im' in index order."""
    with open(path, "w") as fh:
        fh.write(f"nqubits {state.n_qubits}\n")
        for a in state.amplitudes:
            fh.write(f"{a.real:.17g} {a.imag:.17g}\n")


def load_state(path) -> StateVector:
    try:
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 2 or header[0] != "nqubits":
                raise DataError(f"{path}: expected header 'nqubits N', got {header}")
            n = int(header[1])
            rows = [line.split() for line in fh if line.strip()]
    except OSError as exc:
        raise DataError(f"cannot read state file {path}: {exc}") from exc
    _check_n(n)
    if len(rows) != 2**n:
        raise DataError(f"{path}: expected {2**n} amplitude lines, found {len(rows)}")
    try:
        amps = np.array([float(r) + 1j * float(i) for r, i in rows])
    except (ValueError, TypeError) as exc:
        raise DataError(f"{path}: malformed amplitude line: {exc}") from exc
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) >= FILE_NORM_TOL:
        raise DataError(f"{path}: state norm {norm} deviates from 1 by >= {FILE_NORM_TOL}")
    return StateVector(n, amps / norm)


# ---------------------------------------------------------------------------
# Gate application
# ---------------------------------------------------------------------------


def _z_rotation_inplace(amps: np.ndarray, n: int, qubit: int, angle) -> None:
    """exp(-i angle/2 Z_qubit); `angle` may be a scalar or per-row array."""
    mask = 1 << (n - qubit)
    idx = np.arange(amps.shape[-1])
    hi = (idx & mask).astype(bool)
    angle = np.asarray(angle)
    half = angle[..., None] / 2.0 if angle.ndim else angle / 2.0
    phase = np.where(hi, np.exp(1j * half), np.exp(-1j * half))
    amps *= phase


def _xx_rotation_inplace(amps: np.ndarray, n: int, qubit: int, angle) -> None:
    """exp(-i angle/2 X_qubit X_{qubit+1}) on adjacent qubits."""
    flip = (1 << (n - qubit)) | (1 << (n - qubit - 1))
    idx = np.arange(amps.shape[-1])
    partner = idx ^ flip
    angle = np.asarray(angle)
    half = angle[..., None] / 2.0 if angle.ndim else angle / 2.0
    c, s = np.cos(half), np.sin(half)
    amps[...] = c * amps - 1j * s * amps[..., partner]


def _x_last_inplace(amps: np.ndarray) -> None:
    idx = np.arange(amps.shape[-1])
    amps[...] = amps[..., idx ^ 1]


def _apply_rotation_inplace(amps: np.ndarray, n: int, axis: int, angle) -> None:
    if not 2 <= axis <= 2 * n:
        raise DomainError(f"axis {axis} outside [2, {2 * n}]")
    if axis % 2 == 0:
        _z_rotation_inplace(amps, n, axis // 2, angle)
    else:
        _xx_rotation_inplace(amps, n, axis // 2, angle)


def apply_givens(state: StateVector, rotation: GivensRotation) -> StateVector:
    """Apply one matchgate rotation; returns a new state."""
    amps = state.amplitudes.copy()
    _apply_rotation_inplace(amps, state.n_qubits, rotation.axis, rotation.angle)
    return StateVector(state.n_qubits, amps)


def apply_sequence(state: StateVector, seq: GivensSequence) -> StateVector:
    """Apply a circuit in time order, then the terminal reflection if set."""
    if seq.n_modes != state.n_qubits:
        raise DomainError(
            f"circuit acts on {seq.n_modes} modes but the state has {state.n_qubits} qubits"
        )
    amps = state.amplitudes.copy()
    for r in seq.rotations:
        _apply_rotation_inplace(amps, state.n_qubits, r.axis, r.angle)
    if seq.terminal_reflection:
        _x_last_inplace(amps)
    return StateVector(state.n_qubits, amps)


def circuit_unitary(seq: GivensSequence) -> np.ndarray:
    """Dense unitary of a circuit (oracle-sized systems only)."""
    n = seq.n_modes
    if n > 10:
        raise ResourceError(f"dense unitary on {n} qubits refused")
    dim = 2**n
    cols = np.eye(dim, dtype=complex)
    for r in seq.rotations:
        _apply_rotation_inplace(cols, n, r.axis, r.angle)
    if seq.terminal_reflection:
        _x_last_inplace(cols)
    # columns evolved as batch rows; transpose back to U e_j = column j
    return cols.T


def born_sample(state: StateVector, rng) -> tuple[int, ...]:
    """One computational-basis outcome z drawn from |amplitude|^2."""
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > FILE_NORM_TOL:
        raise InternalError(f"state norm deviates from 1 by {abs(total - 1.0):.3e}")
    rng = as_rng(rng)
    idx = int(np.searchsorted(np.cumsum(probs / total), rng.random(), side="right"))
    idx = min(idx, len(probs) - 1)
    n = state.n_qubits
    return tuple((idx >> (n - k)) & 1 for k in range(1, n + 1))


def born_sample_batch(amps: np.ndarray, n: int, rng) -> np.ndarray:
    """Vectorized Born sampling; amps has shape (N, 2**n), output (N, n)."""
    probs = np.abs(amps) ** 2
    totals = probs.sum(axis=1)
    if np.max(np.abs(totals - 1.0)) > FILE_NORM_TOL:
        raise InternalError("batch state norms deviate from 1")
    rng = as_rng(rng)
    u = rng.random(probs.shape[0])
    cdf = np.cumsum(probs / totals[:, None], axis=1)
    idx = (cdf < u[:, None]).sum(axis=1)
    idx = np.minimum(idx, probs.shape[1] - 1)
    shifts = np.array([n - k for k in range(1, n + 1)])
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
