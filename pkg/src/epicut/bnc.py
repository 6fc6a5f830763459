"""Best-bound branch-and-bound over the extensive form (EXT) or a Benders
master with lazy cuts at integral nodes (BBC, and IBC when the master already
carries root I-sparse cuts)."""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .benders import CutPool, Master, Workspace, kelley_root_loop, make_benders_cut, solve_subproblem
from .forge import fingerprint
from .lp import INF, LPStatus, SimplexLP
from .model import BlockDiagonalProblem, build_extensive
from .rootloop import ExperimentConfig, RunClock, run_root_loop

log = logging.getLogger(__name__)

INT_TOL = 1e-6
GAP_TOL = 1e-6


@dataclass
class BnCResult:
    mode: str
    status: str  # optimal | time_limit | infeasible
    obj: float
    bound: float
    nodes: int
    time_s: float
    x: np.ndarray | None = None
    root_bound: float = -INF
    lazy_cuts: int = 0
    root_cuts: int = 0

    @property
    def gap(self) -> float:
        """Relative gap (incumbent - bound) / max(1, |incumbent|)."""
        if not math.isfinite(self.obj):
            return INF
        return max(0.0, self.obj - self.bound) / max(1.0, abs(self.obj))

    def summary(self) -> str:
        gap = "inf" if not math.isfinite(self.gap) else f"{100.0 * self.gap:.6f}"
        return f"{self.mode},{self.status},{self.obj!r},{self.bound!r},{gap},{self.nodes},{self.time_s:.6f}"


SUMMARY_HEADER = "mode,status,obj,bound,gap_pct,nodes,time_s"


@dataclass(order=True)
class _Node:
    bound: float
    nid: int
    fix: tuple = field(compare=False)  # ((column, value), ...)
    basis: object = field(compare=False, default=None)


def _most_fractional(v: np.ndarray) -> int | None:
    frac = np.minimum(v - np.floor(v), np.ceil(v) - v)
    j = int(np.argmax(frac))  # first maximum, i.e. lowest index
    return j if frac[j] > INT_TOL else None


def branch_and_bound(problem: BlockDiagonalProblem, handle: SimplexLP, xcols: np.ndarray, mode: str,
                     clock: Callable[[], float], time_limit: float,
                     lazy: Callable | None = None) -> BnCResult:
    """Generic best-bound search on ``handle`` branching on columns ``xcols``.

    ``lazy(sol, x_int)`` returns ("accept", value) or ("cut", None) after
    adding rows to ``handle``; without it an integral LP optimum is accepted
    at its LP value.
    """
    inc, inc_x = INF, None
    nodes = 0
    nid = 0
    heap = [_Node(-INF, 0, (), handle.basis())]
    current: dict[int, float] = {}
    base_lo = {int(j): handle.lo[j] for j in xcols}
    base_hi = {int(j): handle.hi[j] for j in xcols}
    root_bound = -INF
    status = "optimal"
    lazy_cuts = 0

    def tol(v):
        return GAP_TOL * max(1.0, abs(v))

    while heap:
        if inc < INF and heap[0].bound >= inc - tol(inc):
            break
        if clock() >= time_limit:
            status = "time_limit"
            break
        node = heapq.heappop(heap)
        want = dict(node.fix)
        changes = [(j, base_lo[j], base_hi[j]) for j in current if j not in want]
        changes += [(j, v, v) for j, v in want.items() if current.get(j) != v]
        handle.set_bounds(changes)
        current = want
        handle.set_basis(node.basis)
        nodes += 1
        while True:
            sol = handle.solve()
            if sol.status is LPStatus.INFEASIBLE:
                break
            if sol.status is not LPStatus.OPTIMAL:
                raise RuntimeError(f"node LP stopped with {sol.status.value}")
            if node.nid == 0:
                root_bound = max(root_bound, sol.objective)
            if inc < INF and sol.objective >= inc - tol(inc):
                break
            xv = sol.x[xcols]
            j = _most_fractional(xv)
            if j is not None:
                basis = handle.basis()
                col = int(xcols[j])
                for v in (0.0, 1.0):
                    nid += 1
                    heapq.heappush(heap, _Node(sol.objective, nid, tuple(sorted({**want, col: v}.items())), basis))
                break
            x_int = np.round(xv)
            if lazy is None:
                verdict, value = "accept", sol.objective
            else:
                verdict, value = lazy(sol, x_int)
            if verdict == "cut":
                lazy_cuts += 1
                continue
            if value < inc:
                inc, inc_x = value, x_int
            break
    if status == "optimal" and inc == INF:
        status = "infeasible"
    # open nodes never beat the incumbent by more than the tolerance when optimal
    bound = min([inc] + [n.bound for n in heap])
    return BnCResult(mode, status, inc, bound, nodes, clock(), inc_x, root_bound, lazy_cuts)


def solve_ext(problem: BlockDiagonalProblem, clock: Callable[[], float] | None = None,
              time_limit: float = 3600.0, ws: Workspace | None = None) -> BnCResult:
    lp, mask = build_extensive(problem)
    handle = SimplexLP(lp)
    if ws is not None:
        ws.register(handle)
    clock = clock or RunClock("wall", ws or Workspace(problem))
    return branch_and_bound(problem, handle, np.flatnonzero(mask), "ext", clock, time_limit)


def solve_benders(problem: BlockDiagonalProblem, master: Master, pool: CutPool, ws: Workspace, mode: str,
                  clock: Callable[[], float], time_limit: float, root_cuts: int = 0) -> BnCResult:
    """B&B on the master; Benders cuts enter lazily at integral node solutions."""
    N = problem.N

    def lazy(sol, x_int):
        theta = sol.x[:N]
        qs, cuts = [], []
        for k in range(N):
            q, pi = solve_subproblem(ws, k, x_int)
            qs.append(q)
            if theta[k] < q - 1e-6 * (1.0 + abs(q)):
                cut = make_benders_cut(problem, k, pi)
                if pool.add(cut):
                    cuts.append(cut)
        if cuts:
            master.add_cuts(cuts)
            return "cut", None
        return "accept", float(problem.c @ x_int + sum(qs))

    res = branch_and_bound(problem, master.handle, N + np.arange(problem.n), mode, clock, time_limit, lazy)
    res.root_cuts = root_cuts
    return res


def solve_instance(problem: BlockDiagonalProblem, config: ExperimentConfig) -> tuple[BnCResult, object]:
    """Run one of the EXT/BBC/IBC protocols; returns (result, root loop result or None)."""
    config = config.check()
    ws = Workspace(problem)
    clock = RunClock(config.clock, ws)
    if config.mode == "ext":
        return solve_ext(problem, clock, config.time_limit, ws), None
    if config.mode == "bbc":
        kel = kelley_root_loop(problem, tol=config.kelley_tol, ws=ws)
        return solve_benders(problem, kel.master, kel.pool, ws, "bbc", clock, config.time_limit), None
    if config.mode == "ibc":
        root_limit = min(config.root_time_limit, config.time_limit)
        cfg = ExperimentConfig(**{**config.__dict__, "root_time_limit": root_limit})
        root = run_root_loop(problem, cfg, ws=ws, clock=clock)
        res = solve_benders(problem, root.master, root.pool, ws, "ibc", clock, config.time_limit,
                            root.sparse_cuts)
        return res, root
    raise ValueError(f"mode {config.mode!r} is not a branch-and-cut protocol")


_OPTIMA: dict[str, float] = {}


def optimal_value(problem: BlockDiagonalProblem, time_limit: float = 3600.0) -> float:
    """z* from an EXT solve, cached per instance fingerprint."""
    key = fingerprint(problem)
    if key not in _OPTIMA:
        res = solve_ext(problem, time_limit=time_limit)
        if res.status != "optimal":
            raise RuntimeError(f"EXT solve for z* ended with status {res.status}")
        _OPTIMA[key] = res.obj
    return _OPTIMA[key]
