"""t-fold twirl channels on the Majorana-monomial basis and design checks.

Basis and representation
------------------------
Every unsigned n-qubit Pauli word corresponds to exactly one Majorana
monomial gamma_mu up to a diagonal phase, so the 4**n monomial bitmasks
(mu subset of [2n], bit k-1 <-> index k) index the Pauli basis.  In this
basis the channel of a Clifford matchgate circuit is a signed permutation of
masks, and the channel of a Givens rotation splits into 2x2 rotation blocks;
both have real matrix elements, so a :class:`ChannelVector` is a real
coefficient vector of length 4**(n*t).

Channels are never materialized as dense 4**(nt) x 4**(nt) matrices:
Clifford t-fold channels act as signed index permutations and averaged gates
as <= 4-term convex sums applied to coefficient vectors (basis vectors are
processed in chunks).

Angle densities
---------------
The three-fold average of a random rotation whose angle is distributed
symmetrically about the Clifford angles {0, pi, +-pi/2} collapses to the
four-term Clifford combination with weights ((1-p)/2, (1-p)/2, p/2, p/2),
p = E[sin^2 theta].  Symmetry is certified numerically through vanishing
trigonometric moments; each moment is integrated adaptively to an absolute
target of 1e-11 (or summed exactly for discrete densities).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError, ResourceError
from .givens import GivensRotation, GivensSequence, SignedPermutation, act_on_monomial, signed_permutation_of

TFOLD_DIM_CAP = 4**6
QUAD_TARGET = 1e-11
SYMMETRY_TOL = 1e-8

ChannelVector = np.ndarray


# ---------------------------------------------------------------------------
# Angle densities and trigonometric moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteAngles:
    """Finite angle distribution given as ((angle, weight), ...)."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        total = sum(w for _, w in self.atoms)
        if abs(total - 1.0) > 1e-12 or any(w < 0 for _, w in self.atoms):
            raise DomainError("atom weights must be nonnegative and sum to 1")

    def expect(self, f: Callable[[float], float]) -> float:
        return float(sum(w * f(a) for a, w in self.atoms))


@dataclass(frozen=True)
class ContinuousDensity:
    """Probability density on (-pi, pi]; normalized on construction."""

    pdf: Callable[[np.ndarray], np.ndarray]
    norm: float = 1.0

    @classmethod
    def from_unnormalized(cls, pdf: Callable) -> "ContinuousDensity":
        norm, err = integrate.quad(
            lambda t: float(pdf(np.asarray(t))),
            -math.pi,
            math.pi,
            epsabs=QUAD_TARGET,
            limit=400,
            points=(-math.pi / 2, 0.0, math.pi / 2),
        )
        if norm <= 0 or not math.isfinite(norm):
            raise DomainError("density does not normalize on (-pi, pi]")
        return cls(pdf, norm)

    def expect(self, f: Callable[[float], float]) -> float:
        val, err = integrate.quad(
            lambda t: float(self.pdf(np.asarray(t))) * f(t) / self.norm,
            -math.pi,
            math.pi,
            epsabs=QUAD_TARGET,
            limit=400,
            points=(-math.pi / 2, 0.0, math.pi / 2),
        )
        if err > 1e-8:
            raise NumericError(f"quadrature did not converge: estimated error {err:.3e}")
        return float(val)


AngleDensity = DiscreteAngles | ContinuousDensity


def haar_angle_density(k: int) -> ContinuousDensity:
    """Density proportional to |sin theta|**(k-2), the Haar angle law at axis k."""
    if k < 2:
        raise DomainError(f"axis must be >= 2, got {k}")
    if k == 2:
        return ContinuousDensity(lambda t: np.ones_like(np.asarray(t, dtype=float)), 2 * math.pi)
    return ContinuousDensity.from_unnormalized(lambda t: np.abs(np.sin(t)) ** (k - 2))


def uniform_angle_density() -> ContinuousDensity:
    return haar_angle_density(2)


def clifford_point_density(weights: Sequence[float] = (0.25, 0.25, 0.25, 0.25)) -> DiscreteAngles:
    """Discrete density on the Clifford angles (0, pi, pi/2, -pi/2)."""
    angles = (0.0, math.pi, math.pi / 2, -math.pi / 2)
    return DiscreteAngles(tuple(zip(angles, (float(w) for w in weights))))


def trig_moment(density: AngleDensity, a: int, b: int) -> float:
    """E[cos(theta)**a * sin(theta)**b]."""
    return density.expect(lambda t: math.cos(t) ** a * math.sin(t) ** b)


def harmonic_moment(density: AngleDensity, kind: str, m: int) -> float:
    f = math.cos if kind == "cos" else math.sin
    return density.expect(lambda t: f(m * t))


def assert_clifford_symmetric(density: AngleDensity, max_harmonic: int = 3,
                              tol: float = SYMMETRY_TOL) -> None:
    """Certify symmetry about every Clifford angle via vanishing moments.

    Symmetry about 0 and pi/2 is equivalent (for trig polynomials up to the
    given harmonic) to E[sin(m theta)] = 0 for every m and E[cos(m theta)] = 0
    for odd m.  This covers the sin/sin3 moments recentred at each Clifford
    angle plus the sin(2 theta) moment, which recentring alone misses.
    """
    bad = []
    for m in range(1, max_harmonic + 1):
        s = harmonic_moment(density, "sin", m)
        if abs(s) > tol:
            bad.append(f"E[sin({m}t)]={s:.2e}")
        if m % 2 == 1:
            c = harmonic_moment(density, "cos", m)
            if abs(c) > tol:
                bad.append(f"E[cos({m}t)]={c:.2e}")
    if bad:
        raise DomainError(
            "density is not symmetric about the Clifford angles: " + ", ".join(bad)
        )


# ---------------------------------------------------------------------------
# Clifford t-fold channels (signed permutations of t-fold masks)
# ---------------------------------------------------------------------------


def _check_tfold_dim(n_modes: int, t: int) -> int:
    dim = 4 ** (n_modes * t)
    if dim > TFOLD_DIM_CAP:
        raise ResourceError(
            f"t-fold space of dimension 4**{n_modes * t} exceeds the cap 4**6"
        )
    return dim


def mask_action(sp: SignedPermutation) -> tuple[np.ndarray, np.ndarray]:
    """One-fold channel of a Clifford FGU: signed permutation of the 4**n masks."""
    n = sp.n_modes
    dim1 = 4**n
    perm = np.empty(dim1, dtype=np.int64)
    sign = np.empty(dim1, dtype=np.int8)
    for mask in range(dim1):
        indices = tuple(k + 1 for k in range(2 * n) if (mask >> k) & 1)
        nu, s = act_on_monomial(sp, indices)
        out = 0
        for i in nu:
            out |= 1 << (i - 1)
        perm[mask] = out
        sign[mask] = s
    return perm, sign


@dataclass(frozen=True)
class MonomialChannel:
    """Signed permutation of the t-fold mask basis (exact Clifford channel)."""

    n_modes: int
    t: int
    perm: np.ndarray
    sign: np.ndarray

    def apply(self, vec: ChannelVector) -> ChannelVector:
        """Coefficient transport: (T v)[perm[j]] = sign[j] v[j]."""
        out = np.zeros_like(vec)
        out[self.perm] = (self.sign.T * vec.T).T if vec.ndim > 1 else self.sign * vec
        return out

    def basis_columns(self, lo: int, hi: int) -> np.ndarray:
        cols = np.arange(lo, hi)
        out = np.zeros((len(self.perm), hi - lo))
        out[self.perm[cols], np.arange(hi - lo)] = self.sign[cols]
        return out

    def compose(self, other: "MonomialChannel") -> "MonomialChannel":
        """Channel applying `other` first, then self."""
        perm = self.perm[other.perm]
        sign = other.sign * self.sign[other.perm]
        return MonomialChannel(self.n_modes, self.t, perm, sign)


def _tensor_power(perm1: np.ndarray, sign1: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
    perm, sign = perm1.copy(), sign1.astype(np.int64)
    d = len(perm1)
    for _ in range(t - 1):
        perm = (perm[:, None] * d + perm1[None, :]).ravel()
        sign = (sign[:, None] * sign1[None, :]).ravel()
    return perm, sign.astype(np.int8)


def clifford_tfold(u: SignedPermutation | GivensSequence, t: int) -> MonomialChannel:
    """Exact t-fold channel A -> (U^dag)^t A U^t of a Clifford matchgate circuit."""
    sp = u if isinstance(u, SignedPermutation) else signed_permutation_of(u)
    _check_tfold_dim(sp.n_modes, t)
    perm1, sign1 = mask_action(sp)
    perm, sign = _tensor_power(perm1, sign1.astype(np.int64), t)
    return MonomialChannel(sp.n_modes, t, perm, sign)


# ---------------------------------------------------------------------------
# Averaged rotation channels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexChannelSum:
    """Convex combination of exact Clifford channels."""

    weights: tuple[float, ...]
    channels: tuple[MonomialChannel, ...]

    def apply(self, vec: ChannelVector) -> ChannelVector:
        out = np.zeros_like(vec, dtype=float)
        for w, ch in zip(self.weights, self.channels):
            out += w * ch.apply(vec)
        return out

    def basis_columns(self, lo: int, hi: int) -> np.ndarray:
        cols = np.arange(lo, hi)
        dim = len(self.channels[0].perm)
        out = np.zeros((dim, hi - lo))
        for w, ch in zip(self.weights, self.channels):
            out[ch.perm[cols], np.arange(hi - lo)] += w * ch.sign[cols]
        return out


def _clifford_gate_channels(axis: int, n_modes: int, t: int) -> tuple[MonomialChannel, ...]:
    gates = []
    for angle in (0.0, math.pi, math.pi / 2, -math.pi / 2):
        seq = GivensSequence(n_modes, (GivensRotation(axis, angle),))
        gates.append(clifford_tfold(signed_permutation_of(seq), t))
    return tuple(gates)


def averaged_gate_3fold(axis: int, density: AngleDensity, n_modes: int) -> ConvexChannelSum:
    """Three-fold average of one random rotation with a Clifford-symmetric angle.

    Returns the exact four-term Clifford combination with weights
    ((1-p)/2, (1-p)/2, p/2, p/2), p = E[sin^2 theta].
    """
    assert_clifford_symmetric(density, max_harmonic=3)
    p = trig_moment(density, 0, 2)
    ident, zpi, s_plus, s_minus = _clifford_gate_channels(axis, n_modes, 3)
    w = ((1.0 - p) / 2.0, (1.0 - p) / 2.0, p / 2.0, p / 2.0)
    return ConvexChannelSum(w, (ident, zpi, s_plus, s_minus))


@dataclass(frozen=True)
class RotationMomentChannel:
    """E[C_theta^{x3}] assembled from trigonometric moments of the density.

    The one-fold channel of a rotation on axis k is A + cos(theta) B +
    sin(theta) C, where A projects onto masks holding both or neither of the
    pair indices (k-1, k), B projects onto masks holding exactly one, and C
    maps such a mask to its partner with the rotation sign.  The three-fold
    average is the moment-weighted sum over {A, B, C}^3; no symmetry of the
    density is assumed.
    """

    n_modes: int
    axis: int
    terms: tuple[tuple[float, tuple[str, str, str]], ...]

    def apply(self, vec: ChannelVector) -> ChannelVector:
        n = self.n_modes
        d = 4**n
        a, b = self.axis - 2, self.axis - 1
        masks = np.arange(d)
        has_a = ((masks >> a) & 1).astype(bool)
        has_b = ((masks >> b) & 1).astype(bool)
        single = has_a ^ has_b
        proj_a = (~single).astype(float)
        proj_b = single.astype(float)
        partner = masks ^ ((1 << a) | (1 << b))
        # out[nu] collects C[nu, partner(nu)] * v[partner(nu)]:
        # -1 when the source mask holds k-1 (i.e. nu holds k), +1 otherwise.
        c_coef = np.where(single, np.where(has_b, -1.0, 1.0), 0.0)

        shape = (d, d, d) + vec.shape[1:]
        v = vec.reshape(shape)

        def apply_one(x: np.ndarray, op: str, fold: int) -> np.ndarray:
            if op == "A":
                w = proj_a
            elif op == "B":
                w = proj_b
            else:
                moved = np.take(x, partner, axis=fold)
                wshape = [1] * x.ndim
                wshape[fold] = d
                return moved * c_coef.reshape(wshape)
            wshape = [1] * x.ndim
            wshape[fold] = d
            return x * w.reshape(wshape)

        out = np.zeros_like(v, dtype=float)
        for coef, ops in self.terms:
            term = v
            for fold, op in enumerate(ops):
                term = apply_one(term, op, fold)
            out += coef * term
        return out.reshape(vec.shape)

    def basis_columns(self, lo: int, hi: int) -> np.ndarray:
        """Sparse column build: each term maps a basis vector to one basis vector."""
        n = self.n_modes
        d = 4**n
        a, b = self.axis - 2, self.axis - 1
        masks = np.arange(d)
        has_a = ((masks >> a) & 1).astype(bool)
        has_b = ((masks >> b) & 1).astype(bool)
        single = has_a ^ has_b
        partner = masks ^ ((1 << a) | (1 << b))
        targets = {
            "A": masks,
            "B": masks,
            "C": partner,
        }
        coefs = {
            "A": (~single).astype(float),
            "B": single.astype(float),
            # column j of C lands on partner(j) with -1 when j holds k-1
            "C": np.where(single, np.where(has_a, -1.0, 1.0), 0.0),
        }
        cols = np.arange(lo, hi)
        j3 = cols % d
        j2 = (cols // d) % d
        j1 = cols // (d * d)
        out = np.zeros((d**3, hi - lo))
        pos = np.arange(hi - lo)
        for coef, ops in self.terms:
            tgt = (
                targets[ops[0]][j1] * d * d
                + targets[ops[1]][j2] * d
                + targets[ops[2]][j3]
            )
            val = coef * coefs[ops[0]][j1] * coefs[ops[1]][j2] * coefs[ops[2]][j3]
            np.add.at(out, (tgt, pos), val)
        return out


def brute_3fold_quadrature(axis: int, density: AngleDensity, n_modes: int) -> RotationMomentChannel:
    """Directly averaged three-fold rotation channel (oracle for the formula).

    Builds E[C^{x3}] from the mixed moments E[cos^a sin^b], a + b <= 3, each
    computed by adaptive quadrature (or exact summation for atoms).
    """
    if not 2 <= axis <= 2 * n_modes:
        raise DomainError(f"axis {axis} outside [2, {2 * n_modes}]")
    _check_tfold_dim(n_modes, 3)
    moments: dict[tuple[int, int], float] = {}
    terms = []
    for ops in np.ndindex(3, 3, 3):
        labels = tuple("ABC"[o] for o in ops)
        a = labels.count("B")
        b = labels.count("C")
        if (a, b) not in moments:
            moments[(a, b)] = trig_moment(density, a, b)
        coef = moments[(a, b)]
        if abs(coef) > 1e-14:
            terms.append((coef, labels))
    return RotationMomentChannel(n_modes, axis, tuple(terms))


def channel_sup_difference(op1, op2, n_modes: int, t: int = 3, chunk: int = 256) -> float:
    """max over basis vectors and coordinates of |op1 e_j - op2 e_j|."""
    dim = _check_tfold_dim(n_modes, t)
    worst = 0.0
    for lo in range(0, dim, chunk):
        hi = min(lo + chunk, dim)
        sides = []
        for op in (op1, op2):
            if hasattr(op, "basis_columns"):
                sides.append(op.basis_columns(lo, hi))
            else:
                block = np.zeros((dim, hi - lo))
                block[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
                sides.append(op.apply(block))
        worst = max(worst, float(np.max(np.abs(sides[0] - sides[1]))))
    return worst


# ---------------------------------------------------------------------------
# Three-design check and the four-fold obstruction witness
# ---------------------------------------------------------------------------


def _template_slots(n_modes: int) -> list[int]:
    from .sampling import triangular_axes

    return triangular_axes(n_modes)


class _ComposedChannel:
    """Composition of per-slot channels in circuit order (first slot outermost)."""

    def __init__(self, slot_ops: Sequence) -> None:
        self.slot_ops = list(slot_ops)

    def apply(self, vec: ChannelVector) -> ChannelVector:
        out = vec
        for op in reversed(self.slot_ops):
            out = op.apply(out)
        return out


class _GroupAverageChannel:
    """Uniform average of exact t-fold channels over an enumerated group."""

    def __init__(self, perms: np.ndarray, signs: np.ndarray, n_modes: int, t: int) -> None:
        self.n_modes = n_modes
        self.t = t
        self.members = []
        for p, s in zip(perms, signs):
            sp = SignedPermutation(n_modes, tuple(int(x) for x in p), tuple(int(x) for x in s))
            perm1, sign1 = mask_action(sp)
            self.members.append(_tensor_power(perm1, sign1.astype(np.int64), t))

    def apply(self, vec: ChannelVector) -> ChannelVector:
        out = np.zeros_like(vec, dtype=float)
        for perm, sign in self.members:
            moved = np.zeros_like(vec, dtype=float)
            moved[perm] = (sign.T * vec.T).T if vec.ndim > 1 else sign * vec
            out += moved
        return out / len(self.members)

    def basis_columns(self, lo: int, hi: int) -> np.ndarray:
        """Columns lo..hi of the averaged operator, exploiting sparsity."""
        dim = len(self.members[0][0])
        cols = np.arange(lo, hi)
        out = np.zeros((dim, hi - lo))
        for perm, sign in self.members:
            out[perm[cols], np.arange(hi - lo)] += sign[cols]
        return out / len(self.members)


def template_average_channel(n_modes: int, slot_channels: Sequence | None = None):
    """Three-fold channel of the triangular template with averaged slots."""
    if slot_channels is None:
        slot_channels = [
            averaged_gate_3fold(axis, haar_angle_density(axis), n_modes)
            for axis in _template_slots(n_modes)
        ]
    return _ComposedChannel(slot_channels)


def check_3design(n_modes: int, chunk: int = 256, slot_channels: Sequence | None = None) -> dict:
    """Compare the averaged triangular template against the uniform group average.

    The template composes, slot by slot, the four-term Clifford average of
    each Haar-density rotation; the reference is the uniform average over the
    fully enumerated determinant-+1 signed-permutation group.  Reports the
    maximum absolute deviation over all 4**(3n) basis vectors.
    """
    from .exact import enumerate_signed_permutation_group

    _check_tfold_dim(n_modes, 3)
    perms, signs = enumerate_signed_permutation_group(n_modes, determinant=1)
    group_avg = _GroupAverageChannel(perms, signs, n_modes, 3)
    template = template_average_channel(n_modes, slot_channels)
    dev = channel_sup_difference(template, group_avg, n_modes, t=3, chunk=chunk)
    return {
        "check": "design3",
        "n": n_modes,
        "group_size": len(perms),
        "max_deviation": dev,
    }


def gamma_4fold(density: AngleDensity) -> float:
    """Four-fold obstruction witness Gamma = 1 + 4 E[cos^2 sin^2].

    Computed as the Pauli-coefficient 1-norm of E[(C_theta(X))^{x4}]; any
    value > 1 certifies that the rotation ensemble admits no Clifford
    four-fold cubature.  Requires symmetry about the Clifford angles.
    """
    assert_clifford_symmetric(density, max_harmonic=4)
    c4 = trig_moment(density, 4, 0)
    s4 = trig_moment(density, 0, 4)
    c3s = trig_moment(density, 3, 1)
    cs3 = trig_moment(density, 1, 3)
    c2s2 = trig_moment(density, 2, 2)
    return abs(c4) + abs(s4) + 4 * abs(c3s) + 4 * abs(cs3) + 6 * abs(c2s2)
