"""End-to-end acceptance gate.

Each test exercises one numbered criterion at its stated tolerance and
prints a PASS/FAIL line (visible with ``pytest -s``). The heavier Monte
Carlo checks pin their seeds so reruns are bit-identical.
"""
import numpy as np
from scipy.stats import spearmanr

from sparsecrb.bounds import (
    BiasSpec,
    coherence_sandwich,
    crb_general,
    crb_sparse_vector,
    efficient_estimate,
    feasible_basis,
    fisher_information,
    unbiased_estimator_exists,
)
from sparsecrb.cli import EXIT_OK, main
from sparsecrb.estimators import bpdn, dantzig, oracle, soft_threshold
from sparsecrb.model import (
    ProblemInstance,
    SignalModel,
    coherence,
    generate_dictionary,
    generate_sparse_param,
    simulate_measurements,
)
from sparsecrb.bounds import crb_signal
from sparsecrb.simulation import TrialPlan, estimate_mse, sweep_sparsity
from conftest import dantzig_l1_optimum


def report(num, description, ok):
    print(f"{'PASS' if ok else 'FAIL'}: criterion {num} - {description}")
    assert ok, f"criterion {num} failed: {description}"


def sparse_vec(p, support, values):
    v = np.zeros(p)
    v[list(support)] = values
    return v


def test_criterion_01_oracle_mse_identity():
    rng = np.random.default_rng(1001)
    worst = 0.0
    for trial in range(50):
        s = int(rng.integers(1, 6))
        H = generate_dictionary(40, 80, 10_000 + trial)
        alpha = generate_sparse_param(80, s, 20_000 + trial)
        sigma = float(rng.uniform(0.05, 1.0))
        trace = crb_sparse_vector(ProblemInstance(H=H, sigma=sigma, s=s, alpha0=alpha)).trace
        # independent path: singular values of the support submatrix
        sv = np.linalg.svd(H[:, np.nonzero(alpha)[0]], compute_uv=False)
        analytic = sigma**2 * float(np.sum(sv**-2.0))
        worst = max(worst, abs(trace - analytic) / analytic)
    report(1, f"oracle-MSE identity, max rel err {worst:.2e} < 1e-10", worst < 1e-10)


def test_criterion_02_oracle_monte_carlo():
    plan = TrialPlan(m=100, p=200, s=3, sigma=0.1, trials=20_000, base_seed=12345,
                     estimator_names=("oracle",), dictionary_mode="fixed")
    result = estimate_mse(plan)
    st = result.per_estimator["oracle"]
    dev = abs(st.mse - result.crb_trace) / st.std_error
    report(2, f"oracle Monte Carlo within 3 SE (deviation {dev:.2f} SE)", dev < 3.0)


def test_criterion_03_ml_reaches_bound_at_high_snr():
    plan = TrialPlan(m=30, p=60, s=3, sigma=1e-3, trials=500, base_seed=777,
                     estimator_names=("ml",), dictionary_mode="fixed")
    result = estimate_mse(plan)
    ratio = result.per_estimator["ml"].mse / result.crb_trace
    report(3, f"ml mse / crb = {ratio:.4f} in [1.0, 1.2]", 1.0 <= ratio <= 1.2)


def test_criterion_04_low_snr_crossover():
    plan = TrialPlan(m=30, p=60, s=3, sigma=1.0, trials=5000, base_seed=777,
                     estimator_names=("ds",), dictionary_mode="fixed")
    result = estimate_mse(plan)
    st = result.per_estimator["ds"]
    margin = (result.crb_trace - st.mse) / st.std_error
    report(4, f"ds beats the unbiased bound at sigma=1 by {margin:.1f} SE (>= 3)", margin >= 3.0)


def test_criterion_05_dichotomy_exactness():
    rng = np.random.default_rng(1005)
    ok = True
    for trial in range(20):
        H = rng.standard_normal((7, 7)) + 4 * np.eye(7)
        alpha = sparse_vec(7, (trial % 7,), [1.0])
        sigma = 0.3
        trace = crb_sparse_vector(ProblemInstance(H=H, sigma=sigma, s=3, alpha0=alpha)).trace
        expect = sigma**2 * np.trace(np.linalg.inv(H.T @ H))
        ok &= abs(trace - expect) / expect < 1e-12
    for trial in range(20):
        H = generate_dictionary(6, 12, 30_000 + trial)
        alpha = sparse_vec(12, (trial % 12,), [1.0])
        ok &= not unbiased_estimator_exists(H, alpha, 3)
        basis = feasible_basis(alpha, 3)
        res = crb_general(basis, BiasSpec.unbiased(12, 12), fisher_information(H, 0.3))
        ok &= not res.feasible
    report(5, "dichotomy exactness and infeasibility of underdetermined unbiased case", ok)


def test_criterion_06_coherence_sandwich():
    ok = True
    for trial in range(100):
        H = generate_dictionary(50, 100, 40_000 + trial)
        mu = coherence(H)
        s = 1
        while (s + 1) * mu < 1.0:
            s += 1
        support = np.random.default_rng(trial).choice(100, size=s, replace=False)
        alpha = sparse_vec(100, support, np.ones(s))
        sigma = 0.2
        trace = crb_sparse_vector(ProblemInstance(H=H, sigma=sigma, s=s, alpha0=alpha)).trace
        lower, upper = coherence_sandwich(mu, s, sigma)
        ok &= lower <= trace <= upper
        w = np.linalg.eigvalsh(H[:, support].T @ H[:, support])
        ok &= bool(np.all(w >= 1 - s * mu - 1e-10) and np.all(w <= 1 + s * mu + 1e-10))
    report(6, "coherence sandwich and Gershgorin eigenvalue containment (100 dictionaries)", ok)


def test_criterion_07_efficient_estimator_identity():
    worst = 0.0
    for trial in range(100):
        H = generate_dictionary(20, 40, 50_000 + trial)
        alpha = generate_sparse_param(40, 4, 60_000 + trial)
        inst = ProblemInstance(H=H, sigma=0.1, s=4, alpha0=alpha)
        basis = feasible_basis(alpha, 4)
        bias = BiasSpec.unbiased(40, 4)
        support = np.nonzero(alpha)[0]
        for k in range(10):
            y = simulate_measurements(H, alpha, 0.1, 70_000 + 10 * trial + k)
            eff = efficient_estimate(inst, basis, bias, y)
            worst = max(worst, float(np.max(np.abs(eff - oracle(H, y, support).estimate))))
    report(7, f"efficient estimator equals oracle, max dev {worst:.2e} < 1e-10", worst < 1e-10)


def test_criterion_08_signal_space_special_cases():
    n, s, sigma = 6, 2, 0.4
    D = generate_dictionary(n, 10, 8)
    r_max = sparse_vec(10, (1, 7), [1.0, -2.0])
    res = crb_signal(SignalModel(A=np.eye(n), D=D, s=s, representation=r_max), sigma)
    ok = abs(res.trace - s * sigma**2) < 1e-10
    r_non = sparse_vec(10, (3,), [1.0])
    res2 = crb_signal(SignalModel(A=np.eye(n), D=D, s=s, representation=r_non), sigma)
    ok &= abs(res2.trace - n * sigma**2) < 1e-10
    report(8, "signal-space bound special cases (s*sigma^2 and n*sigma^2)", ok)


def test_criterion_09_solver_oracles():
    rng = np.random.default_rng(1009)
    ok = True
    # orthonormal designs reduce both solvers to soft thresholding
    for trial in range(20):
        Q, _ = np.linalg.qr(rng.standard_normal((10, 6)))
        y = rng.standard_normal(10)
        level = float(rng.uniform(0.1, 0.6))
        closed = soft_threshold(Q.T @ y, level)
        ok &= float(np.max(np.abs(bpdn(Q, y, level).estimate - closed))) < 1e-6
        ok &= float(np.max(np.abs(dantzig(Q, y, level).estimate - closed))) < 1e-6
    # tiny dense programs against exhaustive vertex enumeration
    for trial in range(20):
        p = 2 + trial % 2
        H = rng.standard_normal((p + 2, p))
        y = rng.standard_normal(p + 2)
        tau = 0.3
        got = float(np.sum(np.abs(dantzig(H, y, tau).estimate)))
        ok &= abs(got - dantzig_l1_optimum(H, y, tau)) < 1e-6
    # subgradient certificate on 1000 random instances
    for trial in range(1000):
        local = np.random.default_rng(80_000 + trial)
        H = local.standard_normal((8, 5))
        y = local.standard_normal(8)
        gamma = float(local.uniform(0.05, 0.5))
        est = bpdn(H, y, gamma).estimate
        g = H.T @ (y - H @ est)
        viol = np.where(est != 0.0, np.abs(g - gamma * np.sign(est)),
                        np.maximum(np.abs(g) - gamma, 0.0))
        ok &= float(np.max(viol)) <= 1e-7
    report(9, "solver correctness oracles (closed forms, LP vertices, certificates)", ok)


def test_criterion_10_sparsity_sweep_shape():
    plan = TrialPlan(m=50, p=100, s=1, sigma=0.01, trials=200, base_seed=2024,
                     estimator_names=("gds",), dictionary_mode="fixed")
    rep = sweep_sparsity(plan, support_sizes=range(1, 16))
    crb = [r.crb_trace for r in rep.rows]
    gaps = [r.mse - r.crb_trace for r in rep.rows]
    sizes = [r.sweep_value for r in rep.rows]
    monotone = all(b >= a for a, b in zip(crb, crb[1:]))
    rho = float(spearmanr(sizes, gaps).statistic)
    report(10, f"sparsity sweep: crb nondecreasing ({monotone}), "
               f"gap rank-correlation {rho:.2f} > 0", monotone and rho > 0.0)


def test_criterion_11_determinism(tmp_path):
    args = ["sweep-snr", "--gen", "12,24", "--s", "2", "--seed", "99",
            "--trials", "8", "--estimators", "oracle,gds", "--paper-rule",
            "--sigmas", "0.5,0.05,0.005", "--no-plot"]
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert main(args + ["--out", str(out1)]) == EXIT_OK
    assert main(args + ["--out", str(out2)]) == EXIT_OK
    identical = out1.read_bytes() == out2.read_bytes()
    report(11, "sweep rerun with identical flags is byte-identical", identical)
