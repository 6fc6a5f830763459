"""Root cut loop: Kelley initialization followed by I-sparse (or PB) rounds."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .benders import CutPool, EnumerationOracle, Master, Workspace, kelley_root_loop
from .model import BlockDiagonalProblem, Cut
from .pb import TermOracle, pb_separate
from .selection import AdaptiveK, Surrogate, build_surrogate, cutpl_support, greedy_support, singleton_profile
from .sparse import NuCache, SparseCut, SupportSet, UnboundedSeparation, eval_nu_table, solve_cglp
from .workers import pmap, worker_count

log = logging.getLogger(__name__)

# seconds charged per simplex pivot or solve under the work clock
WORK_UNIT = 5e-5
FIXED_K = (4, 7, 10)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """One run. ``k`` is an int or the string 'adaptive'.

    Exactly one of ``instance`` (a BDZ1 path) and ``family`` (with ``seed``)
    names the instance when the CLI resolves it.
    """

    rule: str = "greedy"
    k: int | str = 4
    method: str = "isparse"  # isparse | pb
    mode: str = "root"  # root | ext | bbc | ibc
    root_time_limit: float = 1800.0
    time_limit: float = 3600.0
    pb_time_limit: float = 60.0
    instance: str | None = None
    family: str | None = None
    seed: int = 0
    out: str | None = None
    workers: int | None = None
    clock: str = "wall"  # wall | work
    kelley_tol: float = 1e-9
    cut_tol: float = 1e-6
    max_rounds: int = 10_000
    ibc_stop: bool | None = None  # defaults to mode == 'ibc'
    oracle_check: bool = False
    projection_cuts: bool = True  # turn separating rays into x-only cuts

    def check(self) -> "ExperimentConfig":
        if self.rule not in ("greedy", "cutpl"):
            raise ConfigError(f"unknown rule {self.rule!r}")
        if self.method not in ("isparse", "pb"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.mode not in ("root", "ext", "bbc", "ibc"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.clock not in ("wall", "work"):
            raise ConfigError(f"unknown clock {self.clock!r}")
        if self.k != "adaptive":
            if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or not 1 <= self.k <= 20:
                raise ConfigError(f"K must be 'adaptive' or an integer in 1..20, got {self.k!r}")
        if min(self.root_time_limit, self.time_limit, self.pb_time_limit) <= 0:
            raise ConfigError("time limits must be positive")
        if self.instance is not None and self.family is not None:
            raise ConfigError("give either an instance file or a generator family, not both")
        return self

    @property
    def adaptive(self) -> bool:
        return self.k == "adaptive"

    @property
    def stop_rule(self) -> bool:
        return self.mode == "ibc" if self.ibc_stop is None else bool(self.ibc_stop)


class RunClock:
    """Elapsed seconds, either wall time or deterministic work units."""

    def __init__(self, kind: str, ws: Workspace, unit: float = WORK_UNIT):
        self.kind = kind
        self.ws = ws
        self.unit = unit
        self.start = self._raw()

    def _raw(self) -> float:
        if self.kind == "work":
            return self.ws.work() * self.unit
        return time.perf_counter()

    def __call__(self) -> float:
        return self._raw() - self.start


def gap_closed(z_R: float, z_LP: float, z_star: float) -> tuple[float, bool]:
    """(percent clamped to [0, 100], degenerate flag)."""
    denom = z_star - z_LP
    if abs(denom) <= 1e-9 * max(1.0, abs(z_star)):
        return 100.0, True
    raw = (z_R - z_LP) / denom * 100.0
    if raw < 0.0 or raw > 100.0:
        log.debug("raw gap closed %.9g clamped", raw)
    return min(100.0, max(0.0, raw)), False


@dataclass
class ProfileRow:
    time_s: float
    z_R: float
    gap_closed_pct: float
    benders_cuts: int
    isparse_cuts: int
    pb_cuts: int
    K: int

    HEADER = "time_s,z_R,gap_closed_pct,benders_cuts,isparse_cuts,pb_cuts,K"

    def csv(self) -> str:
        gap = "" if math.isnan(self.gap_closed_pct) else f"{self.gap_closed_pct:.6f}"
        return (f"{self.time_s:.6f},{self.z_R!r},{gap},{self.benders_cuts},"
                f"{self.isparse_cuts},{self.pb_cuts},{self.K}")


def write_profile(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(ProfileRow.HEADER + "\n")
        for r in rows:
            fh.write(r.csv() + "\n")


@dataclass
class RootResult:
    profile: list[ProfileRow]
    master: Master
    cache: NuCache
    pool: CutPool
    ws: Workspace
    z_lp: float
    z_root: float
    status: str  # converged | time_limit | stop_rule | max_rounds
    rounds: int
    kelley_iterations: int
    K: int
    skipped: int = 0  # separating rays ignored (projection cuts disabled)
    cuts: list[Cut] = field(default_factory=list)

    @property
    def sparse_cuts(self) -> int:
        return sum(1 for c in self.cuts if c.origin in ("isparse", "pb"))


class _Separator:
    """Per-block support selection and cut generation for one run."""

    def __init__(self, problem, config: ExperimentConfig, ws: Workspace, pool: CutPool,
                 cache: NuCache, clock: RunClock):
        self.problem = problem
        self.config = config
        self.ws = ws
        self.pool = pool
        self.cache = cache
        self.clock = clock
        self._surrogates: dict[int, tuple[int, Surrogate, list[int]]] = {}
        self._oracles: dict[int, TermOracle] = {}
        self.skipped = 0

    def surrogate(self, k: int) -> tuple[Surrogate, list[int]]:
        size = len(self.pool.block(k))
        hit = self._surrogates.get(k)
        if hit is None or hit[0] != size:
            cand = self.pool.candidates(k)
            if cand:
                prof = singleton_profile(self.ws, k, cand, self.cache)
                sur = build_surrogate(prof)
                cand = list(prof.indices)
            else:
                sur = Surrogate((), (), 0.0, {})
            hit = (size, sur, cand)
            self._surrogates[k] = hit
        return hit[1], hit[2]

    def support(self, k: int, K: int, x_hat, theta_hat) -> SupportSet | None:
        if self.config.rule == "greedy":
            sur, cand = self.surrogate(k)
            if not cand:
                return None
            return greedy_support(x_hat, K, sur, cand)
        cuts = self.pool.by_tightness(k, x_hat)
        if not cuts:
            return None
        return cutpl_support(x_hat, theta_hat[k], K, cuts, self.problem.n)

    def tol(self, theta: float) -> float:
        return self.config.cut_tol * (1.0 + abs(theta))

    def projection_cut(self, res: UnboundedSeparation) -> Cut | None:
        """0 >= mu^T x_I + eta from the separating ray, or None when disabled."""
        log.info("block %d: x_hat outside the hull of feasible fixings on %s", res.block, res.support.indices)
        if not self.config.projection_cuts:
            self.skipped += 1
            return None
        coefs = {i: float(v) for i, v in zip(res.support.indices, res.mu) if v != 0.0}
        return Cut(res.block, 0.0, coefs, float(res.eta), "isparse", res.support.indices)

    def isparse(self, k: int, K: int, x_hat, theta_hat) -> Cut | None:
        tol = self.tol(theta_hat[k])
        best = None
        for table in self.cache.block_tables(k):
            res = solve_cglp(x_hat[list(table.support.indices)], theta_hat[k], table, tol, self.ws)
            if isinstance(res, UnboundedSeparation):
                return self.projection_cut(res)
            if isinstance(res, SparseCut) and (best is None or res.g > best.g):
                best = res
        if best is not None:
            return best.cut
        sup = self.support(k, K, x_hat, theta_hat)
        if sup is None or self.cache.get(k, sup) is not None:
            return None  # a cached support was just rechecked
        table = eval_nu_table(self.ws, k, sup, self.cache)
        res = solve_cglp(x_hat[list(sup.indices)], theta_hat[k], table, tol, self.ws)
        if isinstance(res, UnboundedSeparation):
            return self.projection_cut(res)
        return res.cut if isinstance(res, SparseCut) else None

    def pb(self, k: int, K: int, x_hat, theta_hat) -> Cut | None:
        sup = self.support(k, K, x_hat, theta_hat)
        if sup is None:
            return None
        oracle = self._oracles.get(k)
        if oracle is None:
            oracle = self._oracles[k] = TermOracle(self.ws, k)
        res = pb_separate(self.ws, k, sup, x_hat, theta_hat[k], time_limit=self.config.pb_time_limit,
                          tol=self.config.cut_tol, clock=self.clock, oracle=oracle)
        if res.cut is None:
            return None
        # compare violations on the theta-normalized scale when possible
        if res.cut.theta_coef > 0 and res.cut.violation(theta_hat[k], x_hat) / res.cut.theta_coef <= self.tol(theta_hat[k]):
            return None
        return res.cut


def run_root_loop(problem: BlockDiagonalProblem, config: ExperimentConfig | None = None,
                  z_star: float | None = None, ws: Workspace | None = None,
                  clock: RunClock | None = None) -> RootResult:
    """Kelley initialization, then rounds of at most one sparse cut per block.

    The profile records the master bound after every master solve, starting
    with the Kelley bound z_LP.  ``z_star`` only feeds the gap-closed column.
    """
    config = (config or ExperimentConfig()).check()
    workers = config.workers if config.workers is not None else worker_count()
    ws = ws or Workspace(problem)
    clock = clock or RunClock(config.clock, ws)
    kel = kelley_root_loop(problem, tol=config.kelley_tol, ws=ws, workers=workers)
    master, pool = kel.master, kel.pool
    z_lp = kel.z_lp
    cache = NuCache()
    sep = _Separator(problem, config, ws, pool, cache, clock)
    oracle = EnumerationOracle(problem) if config.oracle_check else None
    if oracle is not None:
        for c in master.cuts:
            oracle.check(c)

    ak = AdaptiveK(K=4, baseline=0.0, history=[0.0]) if config.adaptive else None
    K = ak.K if ak else int(config.k)
    profile: list[ProfileRow] = []
    best = z_lp

    def record():
        gap = gap_closed(best, z_lp, z_star)[0] if z_star is not None else float("nan")
        profile.append(ProfileRow(clock(), best, gap, master.count("benders"), master.count("isparse"),
                                  master.count("pb"), K))

    record()
    added: list[Cut] = []
    at_K = [z_lp]  # bounds recorded at the current K, starting when K was set
    status = "converged"
    rounds = 0
    separate = sep.pb if config.method == "pb" else sep.isparse
    while True:
        if clock() >= config.root_time_limit:
            status = "time_limit"
            break
        if rounds >= config.max_rounds:
            status = "max_rounds"
            break
        x_hat, theta_hat = master.x.copy(), master.theta.copy()
        cuts = [c for c in pmap(lambda k: separate(k, K, x_hat, theta_hat), range(problem.N), workers)
                if c is not None]
        if not cuts:
            if ak is not None and ak.bump():
                K = ak.K
                at_K = [best]
                log.info("no violated cut: K raised to %d", K)
                continue
            break
        rounds += 1
        if oracle is not None:
            for c in cuts:
                oracle.check(c)
        master.add_cuts(cuts)
        added.extend(cuts)
        master.solve()
        best = max(best, master.objective)
        record()
        at_K.append(best)
        if config.stop_rule and len(at_K) == 3:
            recent, total = at_K[2] - at_K[0], best - z_lp
            if recent < 0.01 * total or total <= 0:
                status = "stop_rule"
                break
        if ak is not None:
            newK, restart = ak.record(best - z_lp)
            if restart:
                K = newK
                at_K = [best]
                log.info("gain stalled: K raised to %d", K)
    return RootResult(profile, master, cache, pool, ws, z_lp, best, status, rounds, kel.iterations, K,
                      sep.skipped, added)
