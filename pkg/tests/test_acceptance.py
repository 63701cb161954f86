"""Acceptance suite: one test per shipped criterion, each printing a
PASS/FAIL line (run with ``pytest -s tests/test_acceptance.py`` to see them
live).  Expected values come from independent routes: grid-plus-polish
brute force for the scaled-family equality, closed weighted-norm formulas
for the mixture spaces, and fresh-sample verification for certificates.
"""

import math
import time

import numpy as np
import pytest

from latfact import (ExponentTriple, SNormSpace, brute_force_family_sup,
                     collapse_weight, constant_chain_report, dirac_space,
                     family_sup_rhs, attainment_point, find_domination_measure,
                     identity_operator, kakutani_equivalence, partition_space,
                     q_summing_estimate, s_norm, verify_domination,
                     xi_saturation_check)
from latfact.snorm import DiscreteRadonMeasure
from latfact.spaces import DualVector, extreme_dual_vectors
from latfact.suite import lemma_instances, operator_suite
from conftest import make_space

PAIRS = (ExponentTriple(p=1.0, q=2.0), ExponentTriple(p=2.0, q=2.0))
TOL = 1e-6


def report(criterion: int, passed: bool, detail: str) -> None:
    print(f"[criterion {criterion:>2}] {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def suite_certificates():
    """Solve the regression suite once for criteria 7-10.

    Returns the certificate map plus the wall time the solves took, so the
    soundness criterion can enforce its runtime limit on solve+verify.
    """
    start = time.time()
    results = {}
    for e in PAIRS:
        for name, T in operator_suite(e, seed=42, random_count=20):
            cert = find_domination_measure(T, e, tol=TOL, budget=40, seed=3)
            results[(e.p, e.q, name)] = (T, e, cert)
    return results, time.time() - start


def test_criterion_1_scaled_family_equality():
    start = time.time()
    worst = 0.0
    for X, e, F in lemma_instances(100, seed=1007, n_max=4, m_max=3):
        lhs = brute_force_family_sup(X, e, F, step=1e-3)
        grid = extreme_dual_vectors(X, e.p)
        grid.append(attainment_point(X, e, F))
        rhs = family_sup_rhs(X, e, F, grid)
        worst = max(worst, abs(lhs - rhs) / max(rhs, 1e-30))
    elapsed = time.time() - start
    report(1, worst <= 1e-6 and elapsed <= 60.0,
           f"max relative gap {worst:.3e} over 100 instances "
           f"({elapsed:.1f}s <= 60s)")


def test_criterion_2_dirac_collapse():
    rng = np.random.default_rng(2020)
    worst = 0.0
    trials = 0
    for n in (2, 4, 8):
        for p, q in ((1.0, 2.0), (2.0, 3.0)):
            weights = rng.uniform(0.5, 2.0, size=n)
            X = make_space(weights, p)
            g = rng.uniform(0.1, 1.0, size=n)
            g = g / g.max()
            S = dirac_space(X, ExponentTriple(p=p, q=q), g)
            F = rng.normal(size=(170, n))
            direct = (np.abs(F) ** p * (g * weights)).sum(axis=1) ** (1.0 / p)
            got = S.seminorm_rows(F)
            nz = direct > 0
            worst = max(worst, float(np.max(
                np.abs(got[nz] - direct[nz]) / direct[nz])))
            trials += F.shape[0]
    report(2, worst <= 1e-12 and trials >= 1000,
           f"max relative gap {worst:.3e} over {trials} samples")


def test_criterion_3_partition_formula():
    rng = np.random.default_rng(3030)
    worst = 0.0
    trials = 0
    for n in (3, 5, 8):
        for p, q in ((1.0, 2.0), (2.0, 3.0)):
            weights = rng.uniform(0.5, 2.0, size=n)
            X = make_space(weights, p)
            order = rng.permutation(n)
            cut = int(rng.integers(1, n))
            blocks = [sorted(order[:cut].tolist()), sorted(order[cut:].tolist())]
            alpha = rng.uniform(0.2, 1.0, size=2)
            g = rng.uniform(0.1, 1.0, size=n)
            g = g / g.max()
            S = partition_space(X, ExponentTriple(p=p, q=q), g, blocks, alpha)
            F = rng.normal(size=(170, n))
            mixed = np.zeros(F.shape[0])
            for block, a in zip(blocks, alpha):
                mask = np.zeros(n)
                mask[block] = 1.0
                block_norm = (np.abs(F) ** p
                              * (g * mask * weights)).sum(axis=1) ** (1.0 / p)
                mixed += a * block_norm ** q
            mixed = mixed ** (1.0 / q)
            got = S.seminorm_rows(F)
            nz = mixed > 0
            worst = max(worst, float(np.max(
                np.abs(got[nz] - mixed[nz]) / mixed[nz])))
            trials += F.shape[0]
    report(3, worst <= 1e-12 and trials >= 1000,
           f"max relative gap {worst:.3e} over {trials} samples")


def test_criterion_4_saturation_counterexample():
    X = make_space([1, 1], 1)
    atom = DualVector(h=np.array([1.0, 0.0]), certified_norm=1.0)
    xi = DiscreteRadonMeasure.from_pairs([(atom, 1.0)])
    S = SNormSpace(base=X, e=ExponentTriple(p=1.0, q=2.0), xi=xi)
    f = np.array([0.0, 5.0])  # nonzero, supported on the annihilated atom
    ok, witness = xi_saturation_check(S)
    passed = (not ok) and witness == 1 and s_norm(S, f) == 0.0 and f[1] != 0.0
    report(4, passed,
           f"seminorm of nonzero f is {s_norm(S, f)}, witness atom {witness}")


def test_criterion_5_mixture_norm_properties():
    fixtures = []
    X1 = make_space([1.0, 0.8, 1.3], 1)
    fixtures.append(("dirac", dirac_space(X1, ExponentTriple(p=1.0, q=2.0),
                                          np.array([0.9, 1.0, 0.7]))))
    X2 = make_space([1.0, 0.8, 1.3, 0.6], 2)
    fixtures.append(("partition",
                     partition_space(X2, ExponentTriple(p=2.0, q=3.0),
                                     np.ones(4), [[0, 2], [1, 3]], [0.4, 0.6])))
    worst = 0.0
    for name, S in fixtures:
        rng = np.random.default_rng(5050)
        p = S.e.p
        for _ in range(1000):
            f = rng.normal(size=S.n)
            g = rng.normal(size=S.n)
            nf, ng = S.norm(f), S.norm(g)
            scale = max(nf + ng, 1e-30)
            worst = max(worst, (S.norm(f + g) - nf - ng) / scale)
            a = rng.normal()
            worst = max(worst, abs(S.norm(a * f) - abs(a) * nf)
                        / max(abs(a) * nf, 1e-30))
            smaller = np.sign(g) * np.minimum(np.abs(f), np.abs(g))
            worst = max(worst, (S.norm(smaller) - ng) / max(ng, 1e-30))
            m = int(rng.integers(1, 5))
            F = rng.normal(size=(m, S.n))
            agg = S.norm((np.abs(F) ** p).sum(axis=0) ** (1.0 / p))
            rhs = float(np.sum(S.norm_rows(F) ** p) ** (1.0 / p))
            worst = max(worst, (agg - rhs) / max(rhs, 1e-30))
    report(5, worst <= 1e-10,
           f"worst relative violation {worst:.3e} over 1000 trials/fixture")


def test_criterion_6_constant_chain():
    rng = np.random.default_rng(6060)
    e = ExponentTriple(p=1.0, q=2.0)
    from latfact import EuclideanNorm, LinearOperator
    chain_ok = True
    for i in range(50):
        n = int(rng.integers(1, 4))
        d = int(rng.integers(1, 4))
        X = make_space(rng.uniform(0.5, 2.0, size=n), 1.0)
        T = LinearOperator(matrix=rng.normal(size=(d, n)), domain=X,
                           codomain=EuclideanNorm(dim=d))
        rep = constant_chain_report(T, e, budget=6, seed=i)
        c = rep["chain"]
        chain_ok &= (c["operator_norm"] <= c["M_q"] + 1e-6
                     and c["M_q"] <= c["M_pq"] + 1e-6
                     and c["M_pq"] <= c["pi_q"] + 1e-6)
    # identity instance: on a single atom every constant equals one
    X1 = make_space([1.0], 1.0)
    rep1 = constant_chain_report(identity_operator(X1), e, budget=6, seed=99)
    identity_ok = all(abs(v - 1.0) <= 1e-6 for v in rep1["chain"].values())
    # on more atoms the first three stay at one (the summing constant grows
    # with dimension, so it is only checked against the chain ordering)
    X3 = make_space([1.0, 1.0, 1.0], 1.0)
    rep3 = constant_chain_report(identity_operator(X3), e, budget=8, seed=98)
    c3 = rep3["chain"]
    identity_ok &= all(abs(c3[k] - 1.0) <= 1e-6
                       for k in ("operator_norm", "M_q", "M_pq"))
    identity_ok &= c3["pi_q"] >= 1.0 - 1e-6
    report(6, chain_ok and identity_ok,
           "witness-transfer chain held on 50 random operators; "
           f"identity chain {tuple(round(v, 8) for v in rep1['chain'].values())}")


def test_criterion_7_solver_soundness(suite_certificates):
    certificates, solve_time = suite_certificates
    start = time.time()
    worst = -math.inf
    all_ok = True
    for (p, q, name), (T, e, cert) in certificates.items():
        if not cert.converged:
            all_ok = False
            print(f"    solver did not converge on {name} at ({p}, {q})")
            continue
        residual = verify_domination(cert, T, e, sample_count=10000, seed=777)
        worst = max(worst, residual)
        ok, _ = xi_saturation_check(SNormSpace(base=T.domain, e=e, xi=cert.xi))
        all_ok &= ok and residual <= TOL
    elapsed = solve_time + (time.time() - start)
    report(7, all_ok and elapsed <= 300.0,
           f"44 certificates verified on 10^4 fresh samples each, worst "
           f"residual {worst:.3e} ({elapsed:.0f}s incl. solves, limit 300s)")


def test_criterion_8_identity_tightness(suite_certificates):
    certificates, _ = suite_certificates
    all_ok = True
    details = []
    for e in PAIRS:
        T, _, cert = certificates[(e.p, e.q, "identity")]
        ones_mass = 0.0
        for atom, mass in zip(cert.xi.atoms, cert.xi.masses):
            if np.allclose(atom.h, np.ones(T.n)):
                ones_mass += mass
        ok = (cert.converged and cert.C <= 1.0 + 1e-5
              and ones_mass >= 1.0 - TOL)
        details.append(f"({e.p:g},{e.q:g}): C={cert.C:.8f}, "
                       f"unit-weight mass={ones_mass:.8f}")
        all_ok &= ok
    report(8, all_ok, "; ".join(details))


def test_criterion_9_collapse_at_equal_exponents(suite_certificates):
    worst = 0.0
    count = 0
    rng = np.random.default_rng(909)
    certificates, _ = suite_certificates
    for (p, q, name), (T, e, cert) in certificates.items():
        if not e.is_extreme or not cert.converged:
            continue
        w = collapse_weight(cert)
        S = SNormSpace(base=T.domain, e=e, xi=cert.xi)
        F = rng.normal(size=(200, T.n))
        weighted = ((np.abs(F) ** q * (w * T.domain.space.weights))
                    .sum(axis=1) ** (1.0 / q))
        got = S.seminorm_rows(F)
        nz = weighted > 0
        worst = max(worst, float(np.max(np.abs(got[nz] - weighted[nz])
                                        / weighted[nz])))
        count += 1
    report(9, worst <= 1e-12 and count >= 22,
           f"collapse identity exact to {worst:.3e} on {count} certificates")


def test_criterion_10_summing_constant_feasibility(suite_certificates):
    certificates, _ = suite_certificates
    all_ok = True
    for (p, q, name), (T, e, cert) in certificates.items():
        pi_hat = q_summing_estimate(T, e.q, budget=12, seed=5).value
        if pi_hat == 0.0:
            continue
        trial = find_domination_measure(T, e, tol=TOL, budget=40, seed=3,
                                        C=pi_hat * (1.0 + 1e-4))
        if not trial.converged:
            all_ok = False
            print(f"    infeasible at pi-hat constant: {name} ({p}, {q})")
    report(10, all_ok,
           "solver converged at C = pi_hat * (1 + 1e-4) for all 44 operators")


def test_criterion_11_kakutani_equivalence():
    worst = 0.0
    for e in PAIRS:
        X = make_space([1.0, 1.0, 1.0], e.p)
        _, lower, upper = kakutani_equivalence(X, e, tol=TOL, budget=40, seed=0)
        worst = max(worst, abs(lower - 1.0), abs(upper - 1.0))
    report(11, worst <= 1e-4,
           f"max deviation of equivalence constants from 1: {worst:.3e}")
