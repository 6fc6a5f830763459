"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``. The lines are written past
pytest's capture so they show up in plain ``-v`` output.
"""

import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from epicut.benders import EnumerationOracle, kelley_root_loop
from epicut.bnc import optimal_value, solve_instance
from epicut.forge import CAPParams, generate, write_instance
from epicut.lp import INF, LinearProgram, Row, SimplexLP, solve
from epicut.model import build_extensive
from epicut.rootloop import ExperimentConfig, run_root_loop
from epicut.selection import greedy_order, mixing_envelope, mixing_violation, prop4_violation
from epicut.sparse import NuTable, SupportSet, solve_cglp
from epicut.tilting import SeparableQuadratic, perspective_set, subgradient_base, tilt_bounds, tilt_cglp, tilt_cut

from conftest import tiny
from test_lp import random_lp
from test_selection import brute_mixing, random_surrogate, surrogate_table

SEEDED = [(f, s) for f in ("cap", "lla", "snip") for s in range(7)]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, f"criterion {n}: {detail}"
    return emit


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


# 1 -------------------------------------------------------------------------------

def test_c01_every_emitted_cut_is_valid(report):
    start = time.perf_counter()
    worst, counts = INF, {}
    for family, seed in SEEDED:
        p = tiny(family, seed)
        assert p.n <= 12
        oracle = EnumerationOracle(p)
        emitted = []
        res = run_root_loop(p, ExperimentConfig(k="adaptive", clock="work", oracle_check=True))
        emitted += res.master.cuts
        pb = run_root_loop(p, ExperimentConfig(k=4, method="pb", clock="work", max_rounds=1))
        emitted += pb.cuts
        x, theta = pb.master.x, pb.master.theta
        I = SupportSet.of(np.argsort(-np.minimum(x, 1 - x), kind="stable")[:2])
        for cut in [c for c in res.master.cuts if c.origin == "benders"][:6]:
            new, _ = tilt_cut(p, cut, I, x, theta[cut.block])
            if new is not None:
                emitted.append(new)
        for c in emitted:
            worst = min(worst, oracle.slack(c))
            counts[c.origin] = counts.get(c.origin, 0) + 1
    elapsed = time.perf_counter() - start
    kinds = {"benders", "isparse", "pb", "tilt"}
    ok = worst >= -1e-6 and elapsed < 300.0 and kinds <= set(counts)
    report(1, ok, f"{len(SEEDED)} instances, cuts by origin {dict(sorted(counts.items()))}, "
                  f"min slack {worst:.3g}, {elapsed:.0f}s")


# 2 -------------------------------------------------------------------------------

def test_c02_envelope_equivalence(report):
    rng = np.random.default_rng(20)
    brute = 0.0
    for _ in range(200):
        d = int(rng.integers(1, 9))
        a, x, b = np.sort(rng.uniform(0, 10, d)), rng.random(d), float(rng.uniform(-1, 1))
        brute = max(brute, abs(mixing_envelope(a, x, b) - brute_mixing(a, x, b)))
    cglp = 0.0
    for _ in range(200):
        d = int(rng.integers(1, 9))
        sur = random_surrogate(rng, d)
        support = sorted(rng.choice(d, int(rng.integers(1, d + 1)), replace=False).tolist())
        x = rng.random(d)
        res = solve_cglp(x[support], -INF, surrogate_table(sur, support))
        cglp = max(cglp, abs(mixing_violation(x, support, sur) - res.g))
    report(2, brute <= 1e-9 and cglp <= 1e-7,
           f"max |brute - envelope| {brute:.2e} (<= 1e-9), max |CGLP - envelope| {cglp:.2e} (<= 1e-7)")


# 3 -------------------------------------------------------------------------------

def test_c03_submodular_and_greedy_guarantee(report):
    rng = np.random.default_rng(30)
    worst = INF
    for _ in range(500):
        d = int(rng.integers(3, 11))
        sur = random_surrogate(rng, d)
        x = rng.random(d)
        j, k = rng.choice(d, 2, replace=False).tolist()
        S = [i for i in range(d) if i not in (j, k) and rng.random() < 0.4]
        g = lambda T: mixing_violation(x, T, sur) if T else sur.b
        worst = min(worst, g(S + [j]) + g(S + [k]) - g(S + [j, k]) - g(S), g(S + [j]) - g(S))
    ratio = INF
    for d in range(1, 11):
        for K in range(1, 5):
            for _ in range(5):
                sur = random_surrogate(rng, d)
                x = rng.random(d)
                got = mixing_violation(x, greedy_order(x, K, sur, range(d)), sur) - sur.b
                best = max(mixing_violation(x, list(T), sur)
                           for T in itertools.combinations(range(d), min(K, d))) - sur.b
                if best > 1e-12:
                    ratio = min(ratio, got / best)
    report(3, worst >= -1e-9 and ratio >= 1 - 1 / math.e,
           f"500 checks min slack {worst:.2e}, greedy/exhaustive min ratio {ratio:.4f} (>= {1 - 1 / math.e:.4f})")


# 4 -------------------------------------------------------------------------------

def test_c04_closed_form_matches_cglp(report):
    rng = np.random.default_rng(40)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 8))
        a, b = rng.normal(size=n), float(rng.normal())
        x, theta = rng.random(n), float(rng.normal())
        I = sorted(rng.choice(n, int(rng.integers(1, n + 1)), replace=False).tolist())
        rest = sum(min(a[j], 0.0) for j in range(n) if j not in I)
        vals = [b + rest + sum(a[i] for t, i in enumerate(I) if (g >> t) & 1) for g in range(1 << len(I))]
        res = solve_cglp(x[I], theta, NuTable(0, SupportSet.of(I), np.array(vals)))
        worst = max(worst, abs(prop4_violation(a, b, x, theta, I) - (res.g - theta)))
    report(4, worst <= 1e-8, f"100 draws, max |closed form - CGLP| {worst:.2e} (<= 1e-8)")


# 5 -------------------------------------------------------------------------------

def test_c05_perspective_cut(report):
    X = SupportSet.of([0])
    f = SeparableQuadratic(np.array([1.0]), np.array([0.0]))
    base = subgradient_base(f, [0.5])
    res = tilt_cglp([0.5], [0.25, 0.07], base, X, tilt_bounds(perspective_set(f, [1.0]), base, X))
    ineq = res.inequality
    # theta >= z - 0.25 x  as  -0.25 x + z - theta <= 0
    err = max(abs(ineq.alpha[0] + 0.25), *np.abs(ineq.beta - [1.0, -1.0]), abs(ineq.gamma))
    rng = np.random.default_rng(50)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 4))
        f = SeparableQuadratic(rng.uniform(0.2, 3.0, m), rng.uniform(-1.0, 1.0, m))
        u = rng.uniform(1.0, 2.0, m)
        z_bar = rng.uniform(0.05, 0.95) * u
        s = f.grad(z_bar)
        base = subgradient_base(f, z_bar)
        x_hat = float(rng.uniform(0.1, 0.9))
        y_hat = np.concatenate([z_bar * x_hat, [f(z_bar) * x_hat * 0.5]])
        r = tilt_cglp([x_hat], y_hat, base, X, tilt_bounds(perspective_set(f, u), base, X))
        worst = max(worst, abs(r.inequality.alpha[0] - (f(z_bar) - s @ z_bar)), abs(r.inequality.gamma))
    report(5, err <= 1e-9 and worst <= 1e-9,
           f"z^2 at 0.5 coefficient error {err:.2e}, 20 quadratics identity error {worst:.2e} (<= 1e-9)")


# 6 -------------------------------------------------------------------------------

# the first five seeds whose K=4 loop adds a cut; seeds without one compare nothing
C6_PARAMS = CAPParams(facilities=10, customers=20, scenarios=5)


def test_c06_sparse_beats_dense_in_time(report, capsys):
    start = time.perf_counter()
    rows, fast, dom = [], 0, 0
    for seed in range(12):
        if len(rows) == 5:
            break
        p = generate("cap", seed, C6_PARAMS)
        a = run_root_loop(p, ExperimentConfig(k=4))
        if a.sparse_cuts == 0:
            continue
        t_is = next(r.time_s for r in a.profile if r.z_R >= a.z_root) - a.profile[0].time_s
        b = run_root_loop(p, ExperimentConfig(k=4, method="pb", root_time_limit=60.0))
        target = a.z_root - 1e-6 * max(1.0, abs(a.z_root))
        hit = [r.time_s for r in b.profile if r.z_R >= target]
        t_pb = hit[0] - b.profile[0].time_s if hit else INF
        ratio = t_is / t_pb
        fast += ratio <= 0.10
        dom += b.z_root >= a.z_root - 1e-6
        rows.append(f"seed {seed}: t_isparse {t_is:.3f}s t_pb {t_pb:.3f}s ratio {ratio:.3f} "
                    f"bounds {a.z_root:.4f} vs {b.z_root:.4f}")
    elapsed = time.perf_counter() - start
    with capsys.disabled():
        print("\n" + "\n".join(rows))
    n = len(rows)
    ok = n == 5 and fast == n and dom == n and elapsed < 600.0
    report(6, ok, f"{n} CAP instances, ratio <= 0.10 on {fast}/{n}, PB dominance on {dom}/{n}, {elapsed:.0f}s")


# 7 -------------------------------------------------------------------------------

def test_c07_gap_closed_grows_with_k(report, capsys):
    rows, ok = [], True
    for family, seed in [("cap", 0), ("cap", 1), ("cap", 3), ("lla", 0), ("lla", 1), ("snip", 0)]:
        p = tiny(family, seed)
        z = optimal_value(p)
        gap = {k: run_root_loop(p, ExperimentConfig(k=k, clock="work"), z_star=z).profile[-1].gap_closed_pct
               for k in (4, 7, 10, "adaptive")}
        good = (gap[10] >= gap[7] - 1e-6 and gap[7] >= gap[4] - 1e-6
                and gap["adaptive"] >= max(gap[4], gap[7], gap[10]) - 0.5)
        ok &= good
        rows.append(f"{family} {seed}: " + " ".join(f"K={k} {v:.2f}%" for k, v in gap.items()))
    with capsys.disabled():
        print("\n" + "\n".join(rows))
    report(7, ok, f"{len(rows)} instances, K=10 >= K=7 >= K=4 and adaptive within 0.5 pp of the best")


# 8 -------------------------------------------------------------------------------

def test_c08_kelley_bound_and_warm_starts(report):
    worst = 0.0
    for family, seed in SEEDED:
        p = tiny(family, seed)
        z_ext = solve(build_extensive(p)[0]).objective
        worst = max(worst, abs(kelley_root_loop(p, tol=1e-9).z_lp - z_ext))
    warm = 0.0
    rng = np.random.default_rng(80)
    for seed in range(60):
        lp = random_lp(seed, m=8, n=10)
        h = SimplexLP(lp)
        h.solve()
        lb, ub, c = lp.lb.copy(), lp.ub.copy(), lp.c.copy()
        rows = [Row({j: v for j, v in enumerate(lp.A[i]) if v}, lp.senses[i], lp.rhs[i]) for i in range(lp.m)]
        for step in rng.choice(["bound", "row", "obj"], size=6):
            if step == "bound":
                j = int(rng.integers(lp.n))
                lo = float(rng.uniform(lp.lb[j], lp.ub[j]))
                hi = float(rng.uniform(lo, lp.ub[j]))
                lb[j], ub[j] = lo, hi
                h.set_bounds([(j, lo, hi)])
            elif step == "row":
                a = rng.normal(size=lp.n)
                r = Row(dict(enumerate(a)), ">=", float(a @ rng.uniform(lb, ub)) - 0.5)
                rows.append(r)
                h.add_rows([r])
            else:
                c = rng.normal(size=lp.n)
                h.set_objective(c)
            w, cold = h.solve(), solve(LinearProgram.from_rows(c, rows, lb, ub))
            if w.status is not cold.status:
                warm = INF
            elif cold.optimal:
                warm = max(warm, abs(w.objective - cold.objective) / (1 + abs(cold.objective)))
    report(8, worst <= 1e-6 and warm <= 1e-7,
           f"Kelley vs extensive max |diff| {worst:.2e} on {len(SEEDED)} instances, "
           f"warm vs cold max rel diff {warm:.2e}")


# 9 -------------------------------------------------------------------------------

def test_c09_protocols_agree(report, capsys):
    rows, ok = [], True
    for family, seed in [(f, s) for f in ("cap", "lla", "snip") for s in range(3)]:
        p = tiny(family, seed)
        cfg = dict(k="adaptive", clock="work", time_limit=600.0)
        out = {m: solve_instance(p, ExperimentConfig(mode=m, **cfg)) for m in ("ext", "bbc", "ibc")}
        res = {m: r for m, (r, _) in out.items()}
        root = out["ibc"][1]
        if not all(r.status == "optimal" for r in res.values()):
            rows.append(f"{family} {seed}: skipped, not solved within limits")
            continue
        ref = res["ext"].obj
        agree = all(rel(r.obj, ref) <= 1e-6 for r in res.values())
        gain = res["ibc"].root_bound - res["bbc"].root_bound
        tol = 1e-6 * max(1.0, abs(ref))
        bound_ok = gain >= -tol and (gain > tol or root.sparse_cuts == 0)
        ok &= agree and bound_ok
        rows.append(f"{family} {seed}: obj {ref:.6f} agree={agree} root bounds bbc {res['bbc'].root_bound:.6f} "
                    f"ibc {res['ibc'].root_bound:.6f} sparse cuts {root.sparse_cuts}")
    with capsys.disabled():
        print("\n" + "\n".join(rows))
    report(9, ok, f"{len(rows)} instances, EXT/BBC/IBC agree and IBC root bound >= BBC root bound")


# 10 ------------------------------------------------------------------------------

def cli(*args):
    out = subprocess.run([sys.executable, "-m", "epicut", *args], capture_output=True, text=True, timeout=600)
    assert out.returncode == 0, out.stderr
    return out


def test_c10_reruns_are_byte_identical(report, tmp_path):
    inst = tmp_path / "lla1.bdz"
    write_instance(tiny("lla", 1), inst)
    files = []
    for run in range(2):
        d = tmp_path / f"run{run}"
        d.mkdir()
        common = [str(inst), "--clock", "work", "--workers", "1"]
        cli("root", *common, "--k", "adaptive", "--out", str(d / "profile.csv"))
        cli("root", *common, "--k", "4", "--method", "pb", "--out", str(d / "pb.csv"))
        cli("solve", *common, "--mode", "ibc", "--out", str(d / "summary.csv"))
        cli("solve", *common, "--mode", "bbc", "--out", str(d / "summary.csv"))
        files.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    same = files[0] == files[1] and len(files[0]) == 3
    report(10, same, f"two fresh-process reruns, {len(files[0])} output files, byte-identical={same}")
