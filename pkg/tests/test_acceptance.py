"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one PASS line per
criterion.
"""

import json

import numpy as np

from helpers import random_density, random_pure
from schmidtkit import (
    BipartiteIndex,
    PureBipartiteState,
    analyze,
    clifford_ensemble_qubit,
    ensemble_search,
    fidelity_max,
    fully_entangled_fraction_pure,
    isotropic,
    isotropic_sn,
    kpositivity_probe,
    kron,
    lambda_p_class,
    max_entangled,
    min_eigenvalue,
    partial_transpose,
    psi_k,
    reduction_family,
    schmidt_decompose,
    schmidt_rank,
    sn_lower_via_map,
    tensor_copies,
    twirl_exact,
    twirl_mc,
    two_copy_construction,
    verify_decomposition,
    verify_report,
)
from schmidtkit.cli import main
from schmidtkit.twirl import two_copy_coefficients

F_TIGHT = 1 / np.sqrt(2)
F_CONJECTURED = np.sqrt(3) / 2


def map_scan_lower(rho):
    n = rho.idx.d_a
    lower = 1
    for k in range(1, n):
        if sn_lower_via_map(rho, k) is not None:
            lower = k + 1
    return lower


def test_criterion_01_isotropic_classification_via_witness_scan():
    for n in (2, 3, 4):
        fs = list(np.linspace(0.0, 1.0, 50))
        for k in range(1, n + 1):
            fs.append(k / n - 1e-13)
            if k < n:
                fs.append(k / n + 1e-13)
        for f in fs:
            expected = isotropic_sn(n, f)
            got = map_scan_lower(isotropic(n, f))
            assert got == expected, (n, f, got, expected)
    print("PASS criterion 1: map-witness scan reproduces the exact isotropic "
          "classification on 50-point grids and at boundaries")


def test_criterion_02_witness_scalar_identity():
    for n in (2, 3, 4, 5, 6):
        for p in np.linspace(0.2, 1.0, 5):
            choi = reduction_family(n, p).choi
            for f in np.linspace(0.0, 1.0, 5):
                val = float(np.trace(choi @ isotropic(n, f).matrix).real)
                assert abs(val - (1 / n - p * f)) < 1e-10
    print("PASS criterion 2: Tr[choi(L_p) rho_F] = 1/N - pF to 1e-10 on the 5x5x5 grid")


def test_criterion_03_twirl_correctness():
    for n in (2, 3, 4):
        for k in range(1, n + 1):
            out = twirl_exact(psi_k(n, k).density())
            dist = np.linalg.norm(out.matrix - isotropic(n, k / n).matrix)
            assert dist < 1e-12

    zero = PureBipartiteState(np.array([1, 0, 0, 0], dtype=complex), BipartiteIndex(2, 2))
    mc = twirl_mc(zero.density(), samples=100_000, seed=0)
    assert np.linalg.norm(mc.matrix - twirl_exact(zero.density()).matrix) < 1e-2
    rng = np.random.default_rng(60)
    rho = random_density(2, 2, rng)
    mc = twirl_mc(rho, samples=100_000, seed=1)
    assert np.linalg.norm(mc.matrix - twirl_exact(rho).matrix) < 1e-2

    ens = clifford_ensemble_qubit()
    for _ in range(5):
        rho = random_density(2, 2, rng)
        acc = np.zeros((4, 4), dtype=complex)
        for u in ens.unitaries:
            w = kron(u, u.conj())
            acc += w @ rho.matrix @ w.conj().T
        assert np.linalg.norm(acc / len(ens) - twirl_exact(rho).matrix) < 1e-10
    print("PASS criterion 3: exact twirl to 1e-12, MC twirl (1e5 samples) to 1e-2, "
          "Clifford twirl to 1e-10")


def test_criterion_04_nonadditivity_construction():
    ensemble, mixture = two_copy_construction()
    s2 = np.sqrt(2)
    a, b1, b2, c = two_copy_coefficients(mixture)
    assert abs(a - (s2 - 1) ** 2 / 18) < 1e-10
    assert abs(b1 - (s2 - 1) / 6) < 1e-10
    assert abs(b2 - (s2 - 1) / 6) < 1e-10
    assert abs(c - 0.5) < 1e-10

    target = tensor_copies(isotropic(2, F_TIGHT), 2)
    assert np.linalg.norm(mixture.matrix - target.matrix) < 1e-10
    assert all(schmidt_rank(st, rank_tol=1e-9) <= 2 for st in ensemble.states)

    one = analyze(isotropic(2, F_TIGHT), search_upper=2, restarts=8, seed=0)
    assert (one.lower_bound, one.upper_bound) == (2, 2)
    two = analyze(target, search_upper=2, restarts=8, seed=0)
    assert (two.lower_bound, two.upper_bound) == (2, 2)
    assert verify_report(one, isotropic(2, F_TIGHT)) and verify_report(two, target)
    print("PASS criterion 4: two-copy construction matches the published "
          "coefficients and analyze reports bounds (2, 2) for one and two copies")


def test_criterion_05_probe_agrees_with_positivity_ranges():
    for p in (0.3, 0.45, 0.6, 0.8, 1.0):
        for n in (2, 3, 4):
            lam = reduction_family(n, p)
            k_max = lambda_p_class(n, p).k_positive_up_to
            for k in range(1, n + 1):
                res = kpositivity_probe(lam, k, restarts=8, seed=0)
                should_violate = p > 1 / k
                assert res.violation == should_violate, (p, n, k)
                assert should_violate == (k > k_max)
                if should_violate:
                    assert abs(res.min_eigenvalue - (1 / k - p)) < 1e-6, (p, n, k)
    print("PASS criterion 5: probe violations match the k-positivity ranges, "
          "eigenvalues within 1e-6 of 1/k - p, <= 50 restarts")


def test_criterion_06_fully_entangled_fraction_properties():
    rng = np.random.default_rng(61)
    checked = 0
    while checked < 500:
        d_a, d_b = rng.integers(1, 6, size=2)
        psi = random_pure(d_a, d_b, rng)
        lam = schmidt_decompose(psi).coefficients
        rank = schmidt_rank(psi)
        assert np.sum(np.sqrt(lam)) ** 2 <= rank + 1e-12
        if d_a == d_b:
            assert fully_entangled_fraction_pure(psi) <= rank / d_a + 1e-12
        checked += 1

    for n in (2, 3):
        for f in np.linspace(1 / n**2, 1.0, 5):
            fb = fidelity_max(isotropic(n, f), restarts=20, seed=0)
            assert abs(fb.f_hat - f) < 1e-6, (n, f, fb.f_hat)
    print("PASS criterion 6: Schmidt-sum and fraction bounds on 500 random states; "
          "fidelity ascent within 1e-6 of F on isotropic states")


def test_criterion_07_peres_baseline():
    for f in np.linspace(0.0, 1.0, 50):
        rho = isotropic(2, f)
        lo = min_eigenvalue(partial_transpose(rho.matrix, rho.idx))
        assert (lo < -1e-10) == (f > 0.5), (f, lo)
    print("PASS criterion 7: partial transposition of rho_F is negative iff F > 1/2")


def test_criterion_08_ensemble_search_soundness():
    found = ensemble_search(isotropic(2, 0.5), 1, seed=0)
    assert found is not None and found.residual < 1e-4
    assert verify_decomposition(found.ensemble, isotropic(2, 0.5), 1, 1e-4)

    found2 = ensemble_search(isotropic(2, 1.0), 2, restarts=2, seed=0)
    assert found2 is not None
    assert verify_decomposition(found2.ensemble, isotropic(2, 1.0), 2, 1e-4)

    # informational: the two-copy rank-3 target at F = sqrt(3)/2; success is
    # reported but not required.
    target = tensor_copies(isotropic(2, F_CONJECTURED), 2)
    attempt = ensemble_search(target, 3, restarts=2, max_iters=800, seed=0)
    if attempt is not None:
        assert verify_decomposition(attempt.ensemble, target, 3, 1e-4)
        note = f"found rank-3 decomposition, residual {attempt.residual:.2e}"
    else:
        # the failure is in fact forced: every rank-3 member would have to
        # saturate the 3/4 overlap bound, and such members put weight at
        # least 1/12 on the (1-P+) (x) (1-P+) sector, while the target
        # carries only (1-F)^2 there (see the sector-obstruction test).
        gap = 1 / 12 - (1 - F_CONJECTURED) ** 2
        note = (f"no rank-3 decomposition found; sector analysis shows none "
                f"exists (weight gap {gap:.3f})")
    print(f"PASS criterion 8: searches are sound and verified; F=sqrt(3)/2: {note}")


def test_criterion_09_figure_step_data(tmp_path, capsys):
    path = tmp_path / "fig.csv"
    assert main(["figure-step", "--grid", "400", "--out", str(path)]) == 0
    capsys.readouterr()
    rows = [line.split(",") for line in path.read_text().strip().splitlines()[1:]]
    fs = np.array([float(r[0]) for r in rows])
    one = np.array([int(r[1]) for r in rows])
    two = np.array([int(r[2]) for r in rows])
    assert fs[one == 1].max() == 0.5
    assert np.isclose(fs[two == 1].max() ** 2, 0.25, atol=1e-12)
    assert np.isclose(fs[two == 2].max() ** 2, 0.5, atol=1e-12)
    assert np.isclose(fs[two == 3].max() ** 2, 0.75, atol=1e-12)
    assert one[-1] == 2 and two[-1] == 4
    print("PASS criterion 9: step positions sit exactly at F = 1/2 and "
          "F^2 in {1/4, 1/2, 3/4}")


def test_criterion_10_determinism(tmp_path, capsys):
    state_path = tmp_path / "state.json"
    from schmidtkit import io

    rho = tensor_copies(isotropic(2, F_TIGHT), 2)
    io.write_matrix_file(state_path, rho.matrix, rho.idx)
    reports = []
    for run in range(2):
        out = tmp_path / f"report{run}.json"
        assert main(["analyze", "--input", str(state_path), "--search-upper", "2",
                     "--seed", "11", "--out", str(out), "--json"]) == 0
        capsys.readouterr()
        reports.append(out.read_bytes())
    assert reports[0] == reports[1]
    payload = json.loads(reports[0])
    assert (payload["lower_bound"], payload["upper_bound"]) == (2, 2)

    figures = []
    for run in range(2):
        out = tmp_path / f"fig{run}.csv"
        assert main(["figure-step", "--grid", "200", "--out", str(out)]) == 0
        capsys.readouterr()
        figures.append(out.read_bytes())
    assert figures[0] == figures[1]
    print("PASS criterion 10: repeated runs with fixed seeds produce "
          "byte-identical reports")
