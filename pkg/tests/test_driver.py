import numpy as np
import pytest

from epicut.benders import CutValidityError
from epicut.bnc import BnCResult, optimal_value, solve_instance
from epicut.forge import max_affine_fixture
from epicut.model import Cut
from epicut.rootloop import (
    ConfigError,
    ExperimentConfig,
    ProfileRow,
    _Separator,
    gap_closed,
    run_root_loop,
    write_profile,
)

from conftest import one_var_problem, tiny


def cfg(**kw):
    kw.setdefault("clock", "work")
    return ExperimentConfig(**kw)


# -- gap closed ------------------------------------------------------------------

def test_gap_closed_examples():
    assert gap_closed(15.0, 10.0, 20.0) == (50.0, False)
    assert gap_closed(10.0, 10.0, 20.0) == (0.0, False)
    assert gap_closed(20.0, 10.0, 20.0) == (100.0, False)


def test_gap_closed_clamps_and_flags():
    assert gap_closed(25.0, 10.0, 20.0)[0] == 100.0
    assert gap_closed(5.0, 10.0, 20.0)[0] == 0.0
    assert gap_closed(10.0, 10.0, 10.0) == (100.0, True)


# -- config ----------------------------------------------------------------------

@pytest.mark.parametrize("kw", [
    {"rule": "best"}, {"method": "dense"}, {"mode": "mip"}, {"clock": "cpu"},
    {"k": 0}, {"k": 21}, {"k": "four"}, {"k": True}, {"root_time_limit": 0},
    {"time_limit": -1.0}, {"instance": "a.bdz", "family": "cap"},
])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw).check()


def test_config_defaults():
    c = ExperimentConfig().check()
    assert (c.root_time_limit, c.time_limit, c.k, c.rule) == (1800.0, 3600.0, 4, "greedy")
    assert not c.stop_rule and ExperimentConfig(mode="ibc").stop_rule
    assert ExperimentConfig(k="adaptive").adaptive


# -- root loop -------------------------------------------------------------------

def test_integral_closure_adds_nothing():
    res = run_root_loop(one_var_problem(), cfg(k=1), z_star=0.0)
    assert res.status == "converged" and res.rounds == 0 and res.sparse_cuts == 0
    assert len(res.profile) == 1


def test_envelope_fixture_closes_whole_gap():
    # simplex X: R(X) = conv(X), so a full-support cut gives the hull
    fx = max_affine_fixture([1.0, 2.0, 3.0, 5.0], 0.0, card=("=", 1))
    z_star = optimal_value(fx.problem)
    res = run_root_loop(fx.problem, cfg(k=4), z_star=z_star)
    assert z_star == pytest.approx(1.0)
    assert res.z_lp < z_star - 1e-3
    assert res.profile[-1].gap_closed_pct == pytest.approx(100.0, abs=1e-6)


def test_bound_grows_with_k():
    p = tiny("cap", 1)
    z = optimal_value(p)
    bounds = [run_root_loop(p, cfg(k=k), z_star=z).z_root for k in (4, 10)]
    assert bounds[1] >= bounds[0] - 1e-6


@pytest.mark.parametrize("rule", ["greedy", "cutpl"])
@pytest.mark.parametrize("family", ["cap", "lla"])
def test_profile_monotone_and_cuts_valid(family, rule):
    p = tiny(family, 0)
    res = run_root_loop(p, cfg(k="adaptive", rule=rule, oracle_check=True), z_star=optimal_value(p))
    rows = res.profile
    assert all(b.time_s >= a.time_s for a, b in zip(rows, rows[1:]))
    assert all(b.z_R >= a.z_R for a, b in zip(rows, rows[1:]))
    assert all(b.gap_closed_pct >= a.gap_closed_pct for a, b in zip(rows, rows[1:]))
    assert all(0.0 <= r.gap_closed_pct <= 100.0 for r in rows)
    assert rows[-1].isparse_cuts == res.sparse_cuts
    assert 4 <= res.K <= 10


def test_oracle_check_catches_bad_cut(monkeypatch):
    def bogus(self, k, K, x_hat, theta_hat):
        return Cut(k, 1.0, {0: 1.0}, 1e6, "isparse", (0,))

    monkeypatch.setattr(_Separator, "isparse", bogus)
    with pytest.raises(CutValidityError):
        run_root_loop(tiny("cap", 0), cfg(oracle_check=True))


def test_pb_method_runs():
    p = tiny("lla", 1)
    res = run_root_loop(p, cfg(method="pb", k=4), z_star=optimal_value(p))
    assert res.profile[-1].pb_cuts > 0 and res.profile[-1].isparse_cuts == 0
    assert res.z_root >= res.z_lp


def test_time_limit_keeps_partial_profile():
    res = run_root_loop(tiny("lla", 0), cfg(k=4, root_time_limit=1e-9))
    assert res.status == "time_limit" and len(res.profile) == 1


def test_work_clock_profiles_are_reproducible(tmp_path):
    p = tiny("lla", 2)
    paths = []
    for run in range(2):
        res = run_root_loop(p, cfg(k="adaptive"), z_star=-1.0e3)
        paths.append(tmp_path / f"p{run}.csv")
        write_profile(res.profile, paths[-1])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().splitlines()[0] == ProfileRow.HEADER


def test_ibc_stop_rule_ends_the_root():
    p = tiny("cap", 1)
    res = run_root_loop(p, cfg(k=10, mode="ibc"), z_star=optimal_value(p))
    assert res.status in ("stop_rule", "converged")
    if res.status == "stop_rule":
        assert res.rounds >= 2


# -- branch and cut ------------------------------------------------------------

def test_one_variable_instance_solved_quickly():
    for mode in ("ext", "bbc", "ibc"):
        res, _ = solve_instance(one_var_problem(c=0.5), cfg(mode=mode, k=1))
        assert res.status == "optimal" and res.nodes <= 2
        assert res.obj == pytest.approx(0.5)


@pytest.mark.parametrize("family", ["cap", "lla", "snip"])
def test_modes_agree(family):
    p = tiny(family, 2)
    out = {m: solve_instance(p, cfg(mode=m, k="adaptive"))[0] for m in ("ext", "bbc", "ibc")}
    ref = out["ext"].obj
    for m, res in out.items():
        assert res.status == "optimal"
        assert abs(res.obj - ref) <= 1e-6 * max(1.0, abs(ref))
        assert res.bound <= res.obj + 1e-6 * max(1.0, abs(res.obj))
    assert out["ibc"].root_bound >= out["bbc"].root_bound - 1e-6 * max(1.0, abs(ref))


def test_bnc_time_limit_reports_gap():
    res, _ = solve_instance(tiny("cap", 0), cfg(mode="ext", time_limit=1e-9))
    assert res.status == "time_limit"
    assert res.gap == np.inf or res.gap >= 0.0


def test_summary_format():
    r = BnCResult("ext", "optimal", 1.5, 1.5, 3, 0.25)
    assert r.summary() == "ext,optimal,1.5,1.5,0.000000,3,0.250000"
    assert BnCResult("bbc", "time_limit", np.inf, 0.0, 1, 1.0).summary().split(",")[4] == "inf"


def test_solve_instance_rejects_root_mode():
    with pytest.raises(ValueError):
        solve_instance(one_var_problem(), cfg(mode="root"))
