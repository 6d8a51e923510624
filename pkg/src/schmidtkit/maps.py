"""Linear Hermiticity-preserving maps on matrix algebras.

A map L : M_{n_in} -> M_{n_out} is stored by its Choi matrix
C = (1 (x) L)(|Psi+><Psi+|) with |Psi+> on H_{n_in} (x) H_{n_in}; the
action is recovered as L(X) = n_in * Tr_A[(X^T (x) 1) C].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .linalg import BipartiteIndex, InvariantViolation, as_matrix, hermitize
from .states import (
    DensityMatrix,
    PureBipartiteState,
    max_entangled_projector,
)

NEGATIVITY_THRESHOLD = -1e-8


@dataclass(frozen=True)
class MatrixMap:
    """Hermiticity-preserving linear map, represented by its Choi matrix."""

    n_in: int
    n_out: int
    choi: np.ndarray

    def __post_init__(self):
        c = as_matrix(self.choi)
        d = self.n_in * self.n_out
        if c.shape != (d, d):
            raise InvariantViolation(
                f"Choi matrix shape {c.shape} does not match dims "
                f"({self.n_in}, {self.n_out})"
            )
        object.__setattr__(self, "choi", hermitize(c))

    def choi4(self) -> np.ndarray:
        """Choi tensor C[i, a, j, b] with i, j input and a, b output indices."""
        return self.choi.reshape(self.n_in, self.n_out, self.n_in, self.n_out)


@dataclass(frozen=True)
class PositivityClass:
    """Largest k for which a map is known k-positive."""

    k_positive_up_to: int
    completely_positive: bool


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the numerical k-positivity falsifier.

    ``violation`` is one-sided: True comes with a certified counterexample;
    False only means the search found none and certifies nothing.
    """

    violation: bool
    min_eigenvalue: float
    state: PureBipartiteState


def map_from_choi(choi: np.ndarray, n_in: int, n_out: int) -> MatrixMap:
    """Wrap a Hermitian matrix as the Choi matrix of a map."""
    return MatrixMap(n_in=n_in, n_out=n_out, choi=choi)


def reduction_family(n: int, p: float) -> MatrixMap:
    """The family L_p(X) = Tr(X) 1 - p X on M_N; Choi matrix 1/N - p P+."""
    if n < 2:
        raise InvariantViolation(f"reduction family needs N >= 2, got {n}")
    choi = np.eye(n * n, dtype=np.complex128) / n - p * max_entangled_projector(n)
    return MatrixMap(n, n, choi)


def transpose_map(n: int) -> MatrixMap:
    """Transposition in the computational basis; Choi matrix SWAP/N."""
    if n < 2:
        raise InvariantViolation(f"transpose map needs N >= 2, got {n}")
    swap = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            swap[i * n + j, j * n + i] = 1.0
    return MatrixMap(n, n, swap / n)


def apply_map(lam: MatrixMap, x: np.ndarray) -> np.ndarray:
    """Apply the map to a matrix: L(X) = n_in Tr_A[(X^T (x) 1) C]."""
    x = as_matrix(x)
    if x.shape != (lam.n_in, lam.n_in):
        raise InvariantViolation(
            f"input shape {x.shape} does not match map input dim {lam.n_in}"
        )
    return lam.n_in * np.einsum("ij,iajb->ab", x, lam.choi4())


def apply_id_tensor_map(lam: MatrixMap, rho) -> np.ndarray:
    """Apply (1 (x) L) blockwise: each d_b x d_b block B_ij maps to L(B_ij).

    ``rho`` may be a DensityMatrix or a plain square matrix whose dimension
    is a multiple of the map's input dimension.
    """
    if isinstance(rho, DensityMatrix):
        d_a, d_b = rho.idx.d_a, rho.idx.d_b
        mat = rho.matrix
    else:
        mat = as_matrix(rho)
        d_b = lam.n_in
        d_a, rem = divmod(mat.shape[0], d_b)
        if rem or mat.shape[0] != mat.shape[1]:
            raise InvariantViolation(
                f"matrix of shape {mat.shape} cannot be split into "
                f"{d_b}-dimensional B blocks"
            )
    if d_b != lam.n_in:
        raise InvariantViolation(
            f"B dimension {d_b} does not match map input dim {lam.n_in}"
        )
    r4 = mat.reshape(d_a, d_b, d_a, d_b)
    out = lam.n_in * np.einsum("ikjl,kalb->iajb", r4, lam.choi4())
    d_out = d_a * lam.n_out
    return np.ascontiguousarray(out.reshape(d_out, d_out))


def adjoint_map(lam: MatrixMap) -> MatrixMap:
    """Hilbert-Schmidt adjoint: Tr[A^dag L(B)] = Tr[L^dag(A^dag) B]."""
    c4 = lam.choi4()
    adj = c4.transpose(3, 2, 1, 0) * (lam.n_in / lam.n_out)
    d = lam.n_in * lam.n_out
    return MatrixMap(lam.n_out, lam.n_in, np.ascontiguousarray(adj.reshape(d, d)))


def lambda_p_class(n: int, p: float) -> PositivityClass:
    """Exact positivity class of the reduction family.

    L_p is k-positive but (k+1)-negative exactly for 1/(k+1) < p <= 1/k;
    the class is capped at N, where k-positivity becomes complete positivity.
    """
    if not 0.0 < p <= 1.0:
        raise InvariantViolation(f"need 0 < p <= 1, got {p}")
    k = int(np.floor(1.0 / p + 1e-12))
    k = min(k, n)
    return PositivityClass(k_positive_up_to=k, completely_positive=k >= n)


def kpos_form(lam: MatrixMap, a_vecs, b_vecs, mu) -> float:
    """Bilinear positivity form sum_{n,m} sqrt(mu_n mu_m) <b_n| L(|a_n><a_m|) |b_m>.

    Nonnegative for every choice of orthonormal sets and weights iff the map
    is k-positive (k the number of vectors).
    """
    a = np.ascontiguousarray(np.asarray(a_vecs, dtype=np.complex128))
    b = np.ascontiguousarray(np.asarray(b_vecs, dtype=np.complex128))
    w = np.asarray(mu, dtype=np.float64)
    k = w.size
    if a.shape[0] != k or b.shape[0] != k:
        raise InvariantViolation("need as many vectors as weights")
    if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-10:
        raise InvariantViolation("weights must be a probability vector")
    for name, vecs in (("a", a), ("b", b)):
        gram = vecs.conj() @ vecs.T
        defect = float(np.max(np.abs(gram - np.eye(k))))
        if defect > 1e-8:
            raise InvariantViolation(
                f"{name}-vectors are not orthonormal: Gram defect {defect:.3e}"
            )
    total = 0.0 + 0.0j
    for i in range(k):
        for j in range(k):
            op = apply_map(lam, np.outer(a[i], a[j].conj()))
            total += np.sqrt(w[i] * w[j]) * (b[i].conj() @ op @ b[j])
    return float(total.real)


def id_tensor_superop(lam: MatrixMap, d_a: int) -> np.ndarray:
    """Matrix of (1_{d_a} (x) L) acting on row-major vectorized matrices."""
    l4 = lam.n_in * lam.choi4().transpose(1, 3, 0, 2)
    eye = np.eye(d_a)
    s = np.einsum("ip,jq,abkl->iajbpkql", eye, eye, l4)
    d_in = d_a * lam.n_in
    d_out = d_a * lam.n_out
    return np.ascontiguousarray(s.reshape(d_out * d_out, d_in * d_in))


def kpositivity_probe(
    lam: MatrixMap,
    k: int,
    restarts: int = 50,
    max_iters: int = 500,
    step: float = 0.1,
    seed: int = 0,
) -> ProbeResult:
    """Search for a maximally entangled Schmidt-rank-k state |Psi_k> with
    (1 (x) L)(|Psi_k><Psi_k|) having an eigenvalue below -1e-8.

    One-sided falsifier: a violation comes with the witnessing state; a clean
    run is not a k-positivity certificate. Restart r uses seed + r; results
    merge in restart order.
    """
    if lam.n_in != lam.n_out:
        raise InvariantViolation("probe requires a square map")
    n = lam.n_in
    if not 1 <= k <= n:
        raise InvariantViolation(f"need 1 <= k <= N, got k={k}, N={n}")
    if restarts < 1:
        raise InvariantViolation(f"need at least one restart, got {restarts}")
    s_op = id_tensor_superop(lam, n)
    s_adj = id_tensor_superop(adjoint_map(lam), n)
    best_val = np.inf
    best_ab = None
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        a0 = np.linalg.qr(_ginibre(n, k, rng))[0]
        b0 = np.linalg.qr(_ginibre(n, k, rng))[0]
        pert_a = _ginibre_batch(8, n, k, rng)
        pert_b = _ginibre_batch(8, n, k, rng)
        val, a, b = kernels.probe_descent(
            s_op, s_adj, n, k, a0, b0, pert_a, pert_b, max_iters, step
        )
        if val < best_val:
            best_val = float(val)
            best_ab = (a, b)
    a, b = best_ab
    psi = ((a @ b.T) / np.sqrt(k)).reshape(n * n)
    psi = psi / np.linalg.norm(psi)
    state = PureBipartiteState(psi, BipartiteIndex(n, n))
    return ProbeResult(
        violation=best_val < NEGATIVITY_THRESHOLD,
        min_eigenvalue=best_val,
        state=state,
    )


def _ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def _ginibre_batch(count: int, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (
        rng.normal(size=(count, rows, cols)) + 1j * rng.normal(size=(count, rows, cols))
    ) / np.sqrt(2)
