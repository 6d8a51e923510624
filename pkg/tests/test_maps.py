import numpy as np
import pytest

from helpers import random_density, random_hermitian, random_product_vector
from schmidtkit import (
    BipartiteIndex,
    InvariantViolation,
    adjoint_map,
    apply_id_tensor_map,
    apply_map,
    isotropic,
    kpos_form,
    kpositivity_probe,
    kron,
    lambda_p_class,
    map_from_choi,
    max_entangled,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    reduction_family,
    transpose_map,
)
from schmidtkit.states import max_entangled_projector


def unit(i, j, n):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def reduction_action(x, p):
    return np.trace(x) * np.eye(x.shape[0]) - p * x


# ------------------------------------------------------------ Choi recovery


def test_map_from_choi_max_entangled_is_identity_map():
    # C = |Psi+><Psi+| is the Choi matrix of the identity map: recovery
    # yields L(E_ij) = E_ij on every matrix unit.
    n = 3
    lam = map_from_choi(max_entangled_projector(n), n, n)
    for i in range(n):
        for j in range(n):
            assert np.allclose(apply_map(lam, unit(i, j, n)), unit(i, j, n), atol=1e-12)


def test_map_from_choi_completely_depolarizing():
    n = 3
    lam = map_from_choi(np.eye(n * n) / n**2, n, n)
    for i in range(n):
        for j in range(n):
            expected = (1.0 if i == j else 0.0) * np.eye(n) / n
            assert np.allclose(apply_map(lam, unit(i, j, n)), expected, atol=1e-12)
    rng = np.random.default_rng(0)
    x = random_hermitian(n, rng)
    assert np.allclose(apply_map(lam, x), np.trace(x) * np.eye(n) / n, atol=1e-12)


def test_choi_round_trip():
    rng = np.random.default_rng(1)
    c = random_hermitian(9, rng)
    lam = map_from_choi(c, 3, 3)
    # rebuild the Choi matrix from the recovered action
    n = 3
    rebuilt = np.zeros((9, 9), dtype=complex)
    for i in range(n):
        for j in range(n):
            rebuilt += kron(unit(i, j, n), apply_map(lam, unit(i, j, n))) / n
    assert np.allclose(rebuilt, lam.choi, atol=1e-10)


def test_map_from_choi_rejects_non_hermitian():
    with pytest.raises(InvariantViolation):
        map_from_choi(np.triu(np.ones((4, 4))), 2, 2)


# --------------------------------------------------------- reduction family


def test_reduction_family_action_on_identity():
    for n, p in ((2, 1.0), (3, 0.4)):
        lam = reduction_family(n, p)
        assert np.allclose(apply_map(lam, np.eye(n)), (n - p) * np.eye(n), atol=1e-12)


def test_reduction_family_choi_spectrum():
    for n, p in ((2, 1.0), (3, 0.6), (4, 0.25)):
        w = np.linalg.eigvalsh(reduction_family(n, p).choi)
        expected = np.sort(np.array([1 / n] * (n * n - 1) + [1 / n - p]))
        assert np.allclose(np.sort(w), expected, atol=1e-12)
    assert np.isclose(np.linalg.eigvalsh(reduction_family(2, 1.0).choi)[0], -0.5, atol=1e-14)


def test_reduction_choi_min_eigenvalue_grid():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        p = float(rng.uniform(0.05, 1.0))
        lo = min_eigenvalue(reduction_family(n, p).choi)
        assert abs(lo - min(1 / n - p, 1 / n)) < 1e-12


def test_witness_pairing_scalar_identity():
    for n in (2, 3, 4):
        for p in (0.2, 0.5, 1.0):
            choi = reduction_family(n, p).choi
            for f in np.linspace(0, 1, 5):
                val = np.trace(choi @ isotropic(n, f).matrix).real
                assert abs(val - (1 / n - p * f)) < 1e-10


# ------------------------------------------------------------ transposition


def test_transpose_map_matches_partial_transpose():
    rng = np.random.default_rng(3)
    rho = random_density(3, 3, rng)
    lam = transpose_map(3)
    assert np.allclose(
        apply_id_tensor_map(lam, rho),
        partial_transpose(rho.matrix, rho.idx),
        atol=1e-12,
    )


def test_transpose_choi_spectrum():
    for n in (2, 3):
        w = np.sort(np.linalg.eigvalsh(transpose_map(n).choi))
        minus = n * (n - 1) // 2
        expected = np.array([-1 / n] * minus + [1 / n] * (n * n - minus))
        assert np.allclose(w, expected, atol=1e-12)


def test_transpose_is_one_positive_on_products():
    rng = np.random.default_rng(4)
    lam = transpose_map(3)
    for _ in range(100):
        v = random_product_vector(3, 3, rng)
        rho = np.outer(v, v.conj())
        mapped = apply_id_tensor_map(lam, rho)
        assert np.linalg.eigvalsh((mapped + mapped.conj().T) / 2)[0] > -1e-12


# ------------------------------------------------------------- application


def test_apply_map_transpose_action():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(apply_map(transpose_map(3), x), x.T, atol=1e-12)


def test_apply_map_matches_matrix_unit_expansion():
    rng = np.random.default_rng(6)
    n, p = 3, 0.7
    lam = reduction_family(n, p)
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    expansion = sum(
        x[i, j] * reduction_action(unit(i, j, n), p) for i in range(n) for j in range(n)
    )
    assert np.allclose(apply_map(lam, x), expansion, atol=1e-11)
    assert np.allclose(apply_map(lam, x), reduction_action(x, p), atol=1e-11)


def test_apply_id_tensor_map_identity_map():
    rng = np.random.default_rng(7)
    rho = random_density(2, 3, rng)
    ident = map_from_choi(max_entangled_projector(3), 3, 3)
    assert np.allclose(apply_id_tensor_map(ident, rho), rho.matrix, atol=1e-12)


def test_apply_id_tensor_map_reduction_closed_form():
    for n, f, p in ((2, 0.8, 1.0), (3, 0.7, 0.5), (4, 0.6, 0.5)):
        rho = isotropic(n, f)
        mapped = apply_id_tensor_map(reduction_family(n, p), rho)
        assert np.allclose(mapped, np.eye(n * n) / n - p * rho.matrix, atol=1e-12)
        if f > (1 - f) / (n * n - 1):
            assert abs(min_eigenvalue(mapped) - (1 / n - p * f)) < 1e-12


def test_apply_id_tensor_map_equals_marginal_form():
    rng = np.random.default_rng(8)
    for _ in range(5):
        n, p = 3, 0.65
        rho = random_density(n, n, rng)
        mapped = apply_id_tensor_map(reduction_family(n, p), rho)
        marginal = partial_trace(rho.matrix, rho.idx, "B")
        expected = kron(marginal, np.eye(n)) - p * rho.matrix
        assert np.allclose(mapped, expected, atol=1e-10)


def test_apply_id_tensor_map_bell_transpose():
    mapped = apply_id_tensor_map(transpose_map(2), max_entangled(2).density())
    assert np.isclose(min_eigenvalue(mapped), -0.5, atol=1e-12)


# ----------------------------------------------------------------- adjoints


def test_adjoint_trace_identity():
    rng = np.random.default_rng(9)
    maps = [
        reduction_family(3, 0.8),
        transpose_map(3),
        map_from_choi(random_hermitian(9, rng), 3, 3),
    ]
    for lam in maps:
        adj = adjoint_map(lam)
        for _ in range(100):
            a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            lhs = np.trace(a.conj().T @ apply_map(lam, b))
            rhs = np.trace(apply_map(adj, a.conj().T) @ b)
            assert abs(lhs - rhs) < 1e-10


def test_adjoint_self_adjoint_families():
    assert np.allclose(adjoint_map(reduction_family(3, 0.4)).choi,
                       reduction_family(3, 0.4).choi, atol=1e-12)
    assert np.allclose(adjoint_map(transpose_map(3)).choi, transpose_map(3).choi, atol=1e-12)
    rng = np.random.default_rng(10)
    lam = map_from_choi(random_hermitian(9, rng), 3, 3)
    assert np.allclose(adjoint_map(adjoint_map(lam)).choi, lam.choi, atol=1e-12)


# --------------------------------------------------------- positivity class


def test_lambda_p_class_examples():
    assert lambda_p_class(3, 1.0).k_positive_up_to == 1
    assert lambda_p_class(3, 0.4).k_positive_up_to == 2
    cls = lambda_p_class(3, 0.2)
    assert cls.k_positive_up_to == 3 and cls.completely_positive
    assert lambda_p_class(4, 0.5).k_positive_up_to == 2
    assert lambda_p_class(4, 1 / 3).k_positive_up_to == 3
    with pytest.raises(InvariantViolation):
        lambda_p_class(3, 0.0)
    with pytest.raises(InvariantViolation):
        lambda_p_class(3, 1.5)


# ------------------------------------------------------------ bilinear form


def test_kpos_form_reduction_uniform():
    for n, k, p in ((3, 2, 0.6), (4, 3, 0.3), (2, 2, 1.0)):
        lam = reduction_family(n, p)
        basis = np.eye(n, dtype=complex)
        val = kpos_form(lam, basis[:k], basis[:k], np.full(k, 1 / k))
        assert abs(val - (1 - p * k)) < 1e-12


def test_kpos_form_rank_one_positive():
    rng = np.random.default_rng(11)
    for lam in (reduction_family(3, 1.0), transpose_map(3)):
        for _ in range(20):
            a = rng.normal(size=3) + 1j * rng.normal(size=3)
            b = rng.normal(size=3) + 1j * rng.normal(size=3)
            a /= np.linalg.norm(a)
            b /= np.linalg.norm(b)
            assert kpos_form(lam, a[None, :], b[None, :], np.ones(1)) > -1e-10


def test_kpos_form_cross_check_construction():
    rng = np.random.default_rng(12)
    n, k = 4, 3
    lam = map_from_choi(random_hermitian(n * n, rng), n, n)
    a = np.linalg.qr(rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k)))[0].T
    b = np.linalg.qr(rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k)))[0].T
    mu = rng.dirichlet(np.ones(k))
    val = kpos_form(lam, a, b, mu)
    phi = sum(np.kron(np.eye(n, dtype=complex)[i], a[i]) for i in range(k))
    chi = sum(np.sqrt(mu[i]) * np.kron(np.eye(n, dtype=complex)[i], b[i]) for i in range(k))
    big = apply_id_tensor_map(lam, np.outer(phi, phi.conj()))
    assert abs(val - (chi.conj() @ big @ chi).real) < 1e-10


def test_kpos_form_rejects_non_orthonormal():
    lam = reduction_family(3, 0.5)
    v = np.array([[1, 0, 0], [1, 0, 0]], dtype=complex)
    with pytest.raises(InvariantViolation):
        kpos_form(lam, v, v, np.full(2, 0.5))


# -------------------------------------------------------------------- probe


def test_probe_finds_reduction_violations():
    lam = reduction_family(3, 0.6)
    res = kpositivity_probe(lam, 2, restarts=6, seed=0)
    assert res.violation
    assert abs(res.min_eigenvalue - (0.5 - 0.6)) < 1e-6
    mapped = apply_id_tensor_map(lam, res.state.density())
    assert abs(min_eigenvalue(mapped) - res.min_eigenvalue) < 1e-10


def test_probe_respects_positivity_range():
    lam = reduction_family(3, 0.45)
    res = kpositivity_probe(lam, 2, restarts=6, seed=0)
    assert not res.violation
    res = kpositivity_probe(lam, 3, restarts=6, seed=0)
    assert res.violation
    assert abs(res.min_eigenvalue - (1 / 3 - 0.45)) < 1e-6


def test_probe_transpose_map():
    lam = transpose_map(2)
    assert not kpositivity_probe(lam, 1, restarts=6, seed=0).violation
    res = kpositivity_probe(lam, 2, restarts=6, seed=0)
    assert res.violation and abs(res.min_eigenvalue + 0.5) < 1e-6


def test_probe_agrees_with_class_small_grid():
    for p in (0.45, 0.8):
        for n in (2, 3):
            expected_k = lambda_p_class(n, p).k_positive_up_to
            lam = reduction_family(n, p)
            for k in range(1, n + 1):
                res = kpositivity_probe(lam, k, restarts=4, seed=1)
                assert res.violation == (k > expected_k)


def test_probe_rejects_bad_rank():
    with pytest.raises(InvariantViolation):
        kpositivity_probe(reduction_family(3, 0.5), 4)
