import itertools
import math

import numpy as np
import pytest

from epicut.benders import Workspace
from epicut.lp import INF
from epicut.model import Cut
from epicut.selection import (
    AdaptiveK,
    SingletonProfile,
    Surrogate,
    adapt_k,
    build_surrogate,
    cutpl_order,
    cutpl_support,
    greedy_order,
    greedy_support,
    mixing_envelope,
    mixing_violation,
    prop4_violation,
    singleton_profile,
)
from epicut.sparse import NuCache, NuTable, SupportSet, solve_cglp

from conftest import one_var_problem
from test_sparse import cold_nu


def brute_mixing(a, x, b=0.0):
    """Max over increasing index sequences ending at the last one."""
    d = len(a)
    best = -INF
    for r in range(d):
        for head in itertools.combinations(range(d - 1), r):
            seq = list(head) + [d - 1]
            val, prev = b, 0.0
            for i in seq:
                val += (a[i] - prev) * x[i]
                prev = a[i]
            best = max(best, val)
    return best


def surrogate_table(sur: Surrogate, support) -> NuTable:
    """nu(chi) = b + max a_i chi_i for the surrogate restricted to ``support``."""
    I = SupportSet.of(support)
    coef = sur.coef()
    vals = np.empty(1 << I.K)
    for g in range(1 << I.K):
        on = [coef[i] for j, i in enumerate(I.indices) if (g >> j) & 1]
        vals[g] = sur.b + max(on, default=0.0)
    return NuTable(0, I, vals)


def random_surrogate(rng, d):
    a = np.sort(rng.uniform(0, 5, d))
    return Surrogate(tuple(range(d)), tuple(a), float(rng.uniform(0, 2)), {})


# -- profiles and surrogates -------------------------------------------------

def test_profile_complements_trivial_block():
    prof = singleton_profile(Workspace(one_var_problem()), 0, [0])
    assert prof.complemented == (True,)
    assert prof.pairs() == [(pytest.approx(0.0), pytest.approx(1.0))]


def test_profile_flag_rule():
    prof = SingletonProfile.from_values([1, 2], [(1.0, 3.0), (2.0, 0.0)])
    assert prof.pairs() == [(1.0, 3.0), (0.0, 2.0)]
    assert prof.complemented == (False, True)


def test_profile_rejects_empty():
    with pytest.raises(ValueError):
        singleton_profile(Workspace(one_var_problem()), 0, [])


def test_profile_matches_cold_solves(cap_problem):
    ws = Workspace(cap_problem)
    cache = NuCache()
    cand = list(range(cap_problem.n))
    prof = singleton_profile(ws, 2, cand, cache)
    for t, i in enumerate(prof.indices):
        v0, v1 = cold_nu(cap_problem, 2, [i], 0), cold_nu(cap_problem, 2, [i], 1)
        if prof.complemented[t]:
            v0, v1 = v1, v0
        assert prof.nu0[t] == pytest.approx(v0, abs=1e-7)
        assert prof.nu1[t] == pytest.approx(v1, abs=1e-7)
    assert len(cache.singletons) == cap_problem.n


def test_surrogate_from_profile():
    prof = SingletonProfile.from_values([1, 2], [(1.0, 3.0), (2.0, 0.0)])
    sur = build_surrogate(prof)
    assert sur.b == 1.0
    assert sur.order == (2, 1) and sur.a == (1.0, 2.0)
    assert sur.complemented == {1: False, 2: True}


def test_surrogate_single_and_flat():
    sur = build_surrogate(SingletonProfile.from_values([0], [(0.0, 5.0)]))
    assert sur.a == (5.0,) and sur.b == 0.0
    flat = build_surrogate(SingletonProfile.from_values([0, 1, 2], [(2.5, 2.5)] * 3))
    assert flat.a == (0.0, 0.0, 0.0) and flat.b == 2.5
    assert flat.order == (0, 1, 2)


def test_surrogate_value_uses_complement():
    sur = build_surrogate(SingletonProfile.from_values([0, 1], [(1.0, 3.0), (2.0, 0.0)]))
    # x~_1 = 1 - x_1
    assert sur.value(np.array([0.0, 0.0])) == pytest.approx(1.0 + 1.0)
    assert sur.value(np.array([1.0, 1.0])) == pytest.approx(1.0 + 2.0)


# -- mixing envelope -----------------------------------------------------------

def test_mixing_example():
    sur = Surrogate((0, 1, 2), (1.0, 2.0, 3.0), 0.0, {})
    x = np.array([0.5, 0.2, 0.4])
    assert mixing_violation(x, [0, 1, 2], sur) == pytest.approx(1.3)
    assert mixing_violation(np.zeros(3), [0, 1, 2], sur) == 0.0


@pytest.mark.parametrize("g", range(8))
def test_mixing_at_vertices(g):
    sur = Surrogate((0, 1, 2), (1.0, 2.0, 3.0), 0.5, {})
    chi = np.array([(g >> j) & 1 for j in range(3)], dtype=float)
    expect = 0.5 + max((a for a, c in zip(sur.a, chi) if c), default=0.0)
    assert mixing_violation(chi, [0, 1, 2], sur) == pytest.approx(expect)


def test_mixing_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(200):
        d = int(rng.integers(1, 9))
        a = np.sort(rng.uniform(0, 10, d))
        x = rng.random(d)
        b = float(rng.uniform(-1, 1))
        assert abs(mixing_envelope(a, x, b) - brute_mixing(a, x, b)) <= 1e-9


def test_mixing_equals_cglp_on_surrogate_tables():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = int(rng.integers(1, 7))
        sur = random_surrogate(rng, d)
        support = sorted(rng.choice(d, int(rng.integers(1, d + 1)), replace=False).tolist())
        x = rng.random(d)
        res = solve_cglp(x[support], -INF, surrogate_table(sur, support))
        assert abs(mixing_violation(x, support, sur) - res.g) <= 1e-7


# -- submodularity and greedy ------------------------------------------------------

def test_submodular_and_monotone():
    rng = np.random.default_rng(4)
    for _ in range(500):
        d = int(rng.integers(3, 11))
        sur = random_surrogate(rng, d)
        x = rng.random(d)
        j, k = rng.choice(d, 2, replace=False).tolist()
        rest = [i for i in range(d) if i not in (j, k)]
        S = [i for i in rest if rng.random() < 0.4]
        g = lambda T: mixing_violation(x, T, sur) if T else sur.b
        assert g(S + [j]) + g(S + [k]) >= g(S + [j, k]) + g(S) - 1e-9
        assert g(S) <= g(S + [j]) + 1e-9


def test_greedy_example():
    sur = Surrogate((0, 1, 2), (1.0, 2.0, 3.0), 0.0, {})
    x = np.array([0.5, 0.2, 0.4])
    assert greedy_order(x, 2, sur, [0, 1, 2]) == [2, 0]
    assert greedy_support(x, 2, sur, [0, 1, 2]).indices == (0, 2)


def test_greedy_single_step_and_saturation():
    sur = Surrogate((0, 1, 2), (2.0, 2.0, 2.0), 0.0, {})
    x = np.array([0.5, 0.5, 0.1])
    assert greedy_order(x, 1, sur, [0, 1, 2]) == [0]  # tie goes to the lowest index
    assert greedy_support(x, 5, sur, [2, 0, 1]).indices == (0, 1, 2)
    with pytest.raises(ValueError):
        greedy_order(x, 0, sur, [0])


def test_greedy_within_guarantee():
    rng = np.random.default_rng(5)
    for _ in range(100):
        d = int(rng.integers(2, 11))
        K = int(rng.integers(1, 5))
        sur = random_surrogate(rng, d)
        x = rng.random(d)
        got = mixing_violation(x, greedy_order(x, K, sur, range(d)), sur) - sur.b
        best = max(mixing_violation(x, list(T), sur) for T in itertools.combinations(range(d), min(K, d))) - sur.b
        assert got >= (1 - 1 / math.e) * best - 1e-9


# -- cutting-plane rule ------------------------------------------------------------

def cut(a, b=0.0):
    return Cut(0, 1.0, {j: v for j, v in enumerate(a) if v}, b, "benders", ())


def test_cutpl_scores_example():
    x = np.array([0.5, 0.5, 1.0])
    assert cutpl_order(x, 2, [cut([2.0, -1.0, 0.0])], 3) == [0, 1]
    assert cutpl_support(x, 0.0, 2, [cut([2.0, -1.0, 0.0])], 3).indices == (0, 1)


def test_cutpl_moves_to_next_cut_on_zero_scores():
    x = np.array([0.0, 1.0, 0.5])
    first = cut([3.0, 0.0, 0.0])  # score 0 at x_0 = 0
    second = cut([0.0, 1.0, 2.0])
    assert cutpl_order(x, 2, [first, second], 3) == [1, 2]


def test_cutpl_short_pool_and_empty():
    x = np.array([0.5, 0.5, 0.5])
    assert cutpl_order(x, 3, [cut([1.0, 0.0, 0.0])], 3) == [0]
    with pytest.raises(ValueError):
        cutpl_support(x, 0.0, 2, [], 3)


def test_prop4_full_support_recovers_cut():
    rng = np.random.default_rng(6)
    a, b = rng.normal(size=5), 0.3
    x = rng.random(5)
    assert prop4_violation(a, b, x, 0.1, range(5)) == pytest.approx(a @ x + b - 0.1)


def test_prop4_matches_cglp():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        a = rng.normal(size=n)
        b = float(rng.normal())
        x, theta = rng.random(n), float(rng.normal())
        I = sorted(rng.choice(n, int(rng.integers(1, n + 1)), replace=False).tolist())
        # nu_I(chi) over F_(a,b): free binaries take their cheapest value
        rest = sum(min(a[j], 0.0) for j in range(n) if j not in I)
        vals = [b + rest + sum(a[i] for t, i in enumerate(I) if (g >> t) & 1) for g in range(1 << len(I))]
        res = solve_cglp(x[I], theta, NuTable(0, SupportSet.of(I), np.array(vals)))
        assert abs(prop4_violation(a, b, x, theta, I) - (res.g - theta)) <= 1e-8


# -- adaptive K ------------------------------------------------------------------

def test_adapt_k_stall_raises():
    st = AdaptiveK(K=4)
    hist = [9.95, 9.96, 9.97, 9.98, 9.99, 10.0]  # last five gained 0.05 of 10
    assert adapt_k(st, hist) == (5, True)
    assert st.history == [10.0]


def test_adapt_k_progress_keeps():
    st = AdaptiveK(K=4)
    assert adapt_k(st, [9.5, 9.6, 9.7, 9.8, 9.9, 10.0]) == (4, False)


def test_adapt_k_cap_and_short_history():
    assert adapt_k(AdaptiveK(K=10), [5.0] * 6) == (10, False)
    assert adapt_k(AdaptiveK(K=4), [5.0] * 3) == (4, False)


def test_adaptive_record_sequence():
    st = AdaptiveK(K=4, history=[0.0])
    out = [st.record(v) for v in (5.0, 8.0, 8.0, 8.0, 8.0, 8.0, 8.0)]
    assert out[-1] == (5, True) and all(r == (4, False) for r in out[:-1])
    assert not AdaptiveK(K=10).bump()
