"""U (x) U* twirling: exact projection, Monte-Carlo average, finite 2-designs,
and the symmetrized two-copy construction."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .linalg import BipartiteIndex, InvariantViolation, as_matrix, permute_subsystems
from .states import (
    DensityMatrix,
    PureBipartiteState,
    isotropic,
    max_entangled,
)

MC_CHUNK = 2048


@dataclass(frozen=True)
class PureEnsemble:
    """Probability-weighted list of pure states; a constructive decomposition."""

    probs: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size != len(self.states):
            raise InvariantViolation("need one probability per state")
        if np.any(p < -1e-12):
            raise InvariantViolation(f"negative weight {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-10:
            raise InvariantViolation(
                f"weights sum to 1 off by {abs(p.sum() - 1.0):.3e} > 1e-10"
            )
        idx = self.states[0].idx
        for st in self.states:
            if st.idx != idx:
                raise InvariantViolation("ensemble members live on different spaces")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def idx(self) -> BipartiteIndex:
        return self.states[0].idx

    def mixture(self) -> DensityMatrix:
        amps = np.array([st.amplitudes for st in self.states])
        m = np.einsum("m,mi,mj->ij", self.probs, amps, amps.conj())
        return DensityMatrix(m, self.idx)


@dataclass(frozen=True)
class UnitaryEnsemble:
    """Equal-weight finite set of N x N unitaries; two_design marks exactness."""

    unitaries: np.ndarray
    two_design: bool = False

    def __post_init__(self):
        u = np.ascontiguousarray(np.asarray(self.unitaries, dtype=np.complex128))
        if u.ndim != 3 or u.shape[1] != u.shape[2]:
            raise InvariantViolation("expected a stack of square matrices")
        eye = np.eye(u.shape[1])
        defect = float(np.max(np.abs(np.einsum("sij,sik->sjk", u.conj(), u) - eye)))
        if defect > 1e-10:
            raise InvariantViolation(f"non-unitary member: defect {defect:.3e} > 1e-10")
        object.__setattr__(self, "unitaries", u)

    @property
    def dim(self) -> int:
        return int(self.unitaries.shape[1])

    def __len__(self) -> int:
        return int(self.unitaries.shape[0])


def fidelity_with_max_entangled(rho: DensityMatrix) -> float:
    """F = <Psi+| rho |Psi+> on a square bipartition."""
    if rho.idx.d_a != rho.idx.d_b:
        raise InvariantViolation(
            f"twirling needs d_a == d_b, got ({rho.idx.d_a}, {rho.idx.d_b})"
        )
    v = max_entangled(rho.idx.d_a).amplitudes
    return float((v.conj() @ rho.matrix @ v).real)


def twirl_exact(rho: DensityMatrix) -> DensityMatrix:
    """Project onto the isotropic family, preserving F = <Psi+|rho|Psi+>."""
    f = fidelity_with_max_entangled(rho)
    return isotropic(rho.idx.d_a, min(max(f, 0.0), 1.0))


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed N x N unitary (Ginibre + QR with phase-fixed R)."""
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def twirl_mc(rho: DensityMatrix, samples: int, seed: int = 0) -> DensityMatrix:
    """Monte-Carlo twirl: average of (U (x) U*) rho (..)^dagger over Haar samples.

    Samples are drawn in fixed-size chunks with chunk seeds derived from
    (seed, chunk index) and accumulated in ascending order, so the result is
    bit-stable for a fixed seed regardless of how chunks are scheduled.
    """
    if samples < 1:
        raise InvariantViolation(f"sample count must be positive, got {samples}")
    n = rho.idx.d_a
    if n != rho.idx.d_b:
        raise InvariantViolation(
            f"twirling needs d_a == d_b, got ({rho.idx.d_a}, {rho.idx.d_b})"
        )
    acc = np.zeros_like(rho.matrix)
    done = 0
    chunk_index = 0
    while done < samples:
        count = min(MC_CHUNK, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
        gin = (
            rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
        ) / np.sqrt(2)
        acc += kernels.mc_twirl_sum(rho.matrix, gin)
        done += count
        chunk_index += 1
    return DensityMatrix(acc / samples, rho.idx)


def _canonical_phase(u: np.ndarray) -> np.ndarray:
    flat = u.reshape(-1)
    i = int(np.argmax(np.abs(flat) > 1e-8))
    return u / (flat[i] / abs(flat[i]))


def _phase_key(u: np.ndarray):
    c = np.round(_canonical_phase(u).reshape(-1), 9) + 0.0
    return tuple(float(x) for z in c for x in (z.real, z.imag))


@functools.lru_cache(maxsize=1)
def clifford_ensemble_qubit() -> UnitaryEnsemble:
    """The 24-element single-qubit Clifford group (a unitary 2-design).

    Generated by closure of {H, S} modulo global phase, in a deterministic
    order.
    """
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
    eye = np.eye(2, dtype=np.complex128)
    group = {_phase_key(eye): _canonical_phase(eye)}
    frontier = [eye]
    while frontier:
        new = []
        for u in frontier:
            for g in (h, s):
                w = g @ u
                key = _phase_key(w)
                if key not in group:
                    group[key] = _canonical_phase(w)
                    new.append(w)
        frontier = new
    elems = [group[key] for key in sorted(group)]
    return UnitaryEnsemble(np.array(elems), two_design=True)


def twirl_pure_ensemble(psi: PureBipartiteState, ens: UnitaryEnsemble | None = None) -> PureEnsemble:
    """Ensemble {(1/|ens|, (U (x) U*) psi)}; for a 2-design its mixture equals
    the exact twirl, and every member keeps the Schmidt rank of psi."""
    if ens is None:
        ens = clifford_ensemble_qubit()
    n = psi.idx.d_a
    if psi.idx.d_b != n or ens.dim != n:
        raise InvariantViolation(
            f"state dims ({psi.idx.d_a}, {psi.idx.d_b}) do not match "
            f"ensemble dimension {ens.dim}"
        )
    states = []
    for u in ens.unitaries:
        w = np.kron(u, u.conj())
        states.append(PureBipartiteState(w @ psi.amplitudes, psi.idx))
    probs = np.full(len(ens), 1.0 / len(ens))
    return PureEnsemble(probs, tuple(states))


def _two_pair_factors(idx: BipartiteIndex) -> int:
    n = int(round(np.sqrt(idx.d_a)))
    if idx.d_a != idx.d_b or n * n != idx.d_a:
        raise InvariantViolation(
            f"expected two square copies, got dims ({idx.d_a}, {idx.d_b})"
        )
    return n


def symmetrize_copies(rho: DensityMatrix) -> DensityMatrix:
    """Average with the simultaneous copy swap A1<->A2, B1<->B2.

    The input is bipartite (N^2, N^2) with factor order A1 A2 B1 B2.
    """
    n = _two_pair_factors(rho.idx)
    dims = [n, n, n, n]
    swapped = permute_subsystems(rho.matrix, dims, [1, 0, 3, 2])
    return DensityMatrix((rho.matrix + swapped) / 2.0, rho.idx)


def _swap_copies_vector(amp: np.ndarray, n: int) -> np.ndarray:
    t = amp.reshape(n, n, n, n).transpose(1, 0, 3, 2)
    return np.ascontiguousarray(t.reshape(n**4))


def two_copy_construction() -> tuple[PureEnsemble, DensityMatrix]:
    """Explicit Schmidt-rank-2 decomposition of two copies of the N=2
    isotropic state at F = 1/sqrt(2).

    Starts from a maximally entangled rank-two state across (A1 A2):(B1 B2),
    twirls pairs (A1, B1) and (A2, B2) independently with the Clifford
    2-design, then symmetrizes the copies. Returns the 1152-member ensemble
    and its mixture.
    """
    s2 = np.sqrt(2.0)
    psi0 = np.array([s2 * np.sqrt(s2 - 1.0), 1.0 - s2], dtype=np.complex128)
    e0 = np.array([1.0, 0.0], dtype=np.complex128)
    e1 = np.array([0.0, 1.0], dtype=np.complex128)

    def kron4(a, b, c, d):
        return np.kron(np.kron(a, b), np.kron(c, d))

    # order A1 A2 B1 B2; bipartite cut between slots 2 and 3
    psi = (kron4(e0, psi0, e0, psi0) + kron4(e1, e0, e1, e0)) / s2
    psi /= np.linalg.norm(psi)

    cliff = clifford_ensemble_qubit().unitaries
    idx = BipartiteIndex(4, 4)
    members = []
    for u in cliff:
        for v in cliff:
            w = kron4(u, v, u.conj(), v.conj())
            members.append(w @ psi)
    amps = np.array(members)
    swapped = np.array([_swap_copies_vector(a, 2) for a in amps])
    all_amps = np.concatenate([amps, swapped])
    states = tuple(PureBipartiteState(a, idx) for a in all_amps)
    probs = np.full(len(states), 1.0 / len(states))
    ensemble = PureEnsemble(probs, states)

    twirled = np.einsum("mi,mj->ij", amps, amps.conj()) / len(amps)
    mixture = symmetrize_copies(DensityMatrix(twirled, idx))
    return ensemble, mixture


def two_copy_coefficients(rho: DensityMatrix) -> tuple[float, float, float, float]:
    """Coefficients (a, b1, b2, c) of a two-pair state in the basis
    {Q (x) Q, P+ (x) Q, Q (x) P+, P+ (x) P+}, Q = 1 - P+, pairwise ordering."""
    n = _two_pair_factors(rho.idx)
    dims = [n, n, n, n]
    pairwise = permute_subsystems(rho.matrix, dims, [0, 2, 1, 3])
    v = max_entangled(n).amplitudes
    pplus = np.outer(v, v.conj())
    q = np.eye(n * n) - pplus
    qdim = n * n - 1
    a = float(np.trace(np.kron(q, q) @ pairwise).real) / qdim**2
    b1 = float(np.trace(np.kron(pplus, q) @ pairwise).real) / qdim
    b2 = float(np.trace(np.kron(q, pplus) @ pairwise).real) / qdim
    c = float(np.trace(np.kron(pplus, pplus) @ pairwise).real)
    return a, b1, b2, c
