import math

import numpy as np
import pytest

from chargecent import (
    Graph,
    KatzParams,
    NumericalError,
    count_feasible_walks,
    make_instance,
    max_alpha,
    soc_katz,
    spectral_radius,
    standard_katz,
)
from chargecent.generators import path_graph
from chargecent.oracles import dense_adjacency, dense_bkappa, dense_katz, dense_soc_katz

from conftest import instance_corpus


def test_standard_katz_empty_graph():
    g = Graph(3, [], directed=False)
    assert np.allclose(standard_katz(g, 0.5).values, 1.0)


def test_standard_katz_single_edge():
    g = Graph(2, [(0, 1)], directed=False)
    assert np.allclose(standard_katz(g, 0.5).values, [2.0, 2.0], atol=1e-9)


def test_standard_katz_matches_dense(small_instances):
    for inst in small_instances[:15]:
        g = inst.graph
        rho = max(abs(np.linalg.eigvals(dense_adjacency(g))))
        alpha = 0.5 / rho if rho > 0 else 0.5
        got = standard_katz(g, alpha, tol=1e-12)
        assert np.allclose(got.values, dense_katz(g, alpha), atol=1e-8)


def test_soc_katz_single_edge():
    inst = make_instance(Graph(2, [(0, 1)], directed=False), [], 1)
    assert np.allclose(soc_katz(inst, KatzParams(0.5)).values, [1.5, 1.5], atol=1e-10)


def test_soc_katz_refilled_path_frozen_values():
    # Walk counts double every two steps, giving (1+a)/(1-2a^2) at the ends.
    inst = make_instance(path_graph(3), [1], 1)
    got = soc_katz(inst, KatzParams(0.5, tol=1e-13))
    assert np.allclose(got.values, [3.0, 4.0, 3.0], atol=1e-9)
    assert np.allclose(dense_soc_katz(inst, 0.5).values, [3.0, 4.0, 3.0], atol=1e-12)


def test_soc_katz_matches_dense_oracle(small_instances):
    for inst in small_instances:
        if inst.graph.n * (inst.kappa + 1) > 50:
            continue
        bound = max_alpha(inst)
        alpha = 0.3 if math.isinf(bound.max_alpha) else 0.5 * bound.max_alpha
        got = soc_katz(inst, KatzParams(alpha, tol=1e-13))
        ref = dense_soc_katz(inst, alpha)
        assert np.allclose(got.values, ref.values, rtol=1e-8, atol=1e-10)


def test_soc_katz_small_alpha_first_order():
    inst = make_instance(path_graph(4), [2], 2)
    alpha = 1e-6
    got = soc_katz(inst, KatzParams(alpha)).values
    deg1 = np.asarray(count_feasible_walks(inst, 1).counts, float).sum(axis=1)
    assert np.allclose(got, 1.0 + alpha * deg1, atol=1e-10)


def test_truncated_series_matches_walk_counts(small_instances):
    # Partial sums of the damped series equal damped feasible-walk counts.
    alpha = 0.1
    for inst in small_instances[:10]:
        big = dense_bkappa(inst)
        n = inst.graph.n
        acc = np.zeros(n)
        expect = np.zeros(n)
        power = np.eye(big.shape[0])
        for k in range(5):
            counts = np.asarray(count_feasible_walks(inst, k).counts, float)
            expect += alpha**k * counts.sum(axis=1)
            acc += alpha**k * power[:n].sum(axis=1)
            power = power @ big
        assert np.allclose(acc, expect, atol=1e-10)


def test_omega_full_reduces_to_standard(small_instances):
    for inst in small_instances[:15]:
        g = inst.graph
        rho = max(abs(np.linalg.eigvals(dense_adjacency(g))))
        alpha = 0.4 / rho if rho > 0 else 0.4
        full = make_instance(g, range(g.n), inst.kappa)
        a = soc_katz(full, KatzParams(alpha, tol=1e-13)).values
        b = standard_katz(g, alpha, tol=1e-13).values
        assert np.allclose(a, b, rtol=1e-8)


def test_omega_monotonicity():
    rng = np.random.default_rng(8)
    for inst in instance_corpus(15, seed=55, n_max=6, kappa_max=2):
        g = inst.graph
        base = sorted(inst.omega.members)
        extra = [v for v in range(g.n) if v not in inst.omega]
        if not extra:
            continue
        bigger = sorted(base + [extra[int(rng.integers(len(extra)))]])
        alpha = 0.05
        lo = dense_soc_katz(inst, alpha).values
        hi = dense_soc_katz(make_instance(g, bigger, inst.kappa), alpha).values
        assert np.all(hi >= lo - 1e-12)


def test_max_alpha_nilpotent_is_infinite():
    inst = make_instance(Graph(2, [(0, 1)], directed=True), [], 1)
    bound = max_alpha(inst)
    assert math.isinf(bound.max_alpha) and bound.acyclic


def test_max_alpha_full_refill_matches_adjacency():
    g = path_graph(4)
    inst = make_instance(g, range(4), 2)
    bound = max_alpha(inst)
    rho = spectral_radius(g).value
    assert bound.max_alpha == pytest.approx(1.0 / rho, rel=1e-6)


def test_lemma_ordering_on_random_instances(small_instances):
    for inst in small_instances[:20]:
        big = dense_bkappa(inst)
        rho_b = max(abs(np.linalg.eigvals(big)))
        rho_a = max(abs(np.linalg.eigvals(dense_adjacency(inst.graph))))
        assert rho_b <= rho_a + 1e-9
        est = max_alpha(inst)
        if not est.acyclic:
            assert est.radius == pytest.approx(float(rho_b), abs=1e-6)


def test_alpha_at_bound_rejected():
    g = Graph(2, [(0, 1)], directed=False)
    inst = make_instance(g, [0, 1], 1)
    with pytest.raises(ValueError, match="bound"):
        soc_katz(inst, KatzParams(1.0))
    with pytest.raises(ValueError, match="bound"):
        standard_katz(g, 1.0)


def test_non_convergence_carries_partial():
    g = Graph(2, [(0, 1)], directed=False)
    inst = make_instance(g, [0, 1], 1)
    with pytest.raises(NumericalError) as err:
        soc_katz(inst, KatzParams(0.999, tol=1e-14, max_iter=5))
    partial = err.value.partial
    assert partial is not None and len(partial) == 2
    assert np.all(partial.values >= 1.0)
