"""Dense multi-term disjunctive cuts by row generation (the PB baseline).

Separates (theta_hat, x_hat) from the union of slices {x_I = chi} of the
block epigraph with an inequality pi0 theta + pi^T x >= eta whose x part is
unrestricted, under pi0 >= 0 and |pi0| + |pi|_1 <= 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .benders import Workspace
from .lp import INF, LinearProgram, LPStatus, Row, SimplexLP
from .model import Cut, slice_lp
from .sparse import SupportSet, gray_sequence, pattern_bits

Point = tuple[float, np.ndarray]


class TermOracle:
    """Solves min pi0 d^T y + pi^T x over block k's slice with x_I = chi."""

    def __init__(self, ws: Workspace, k: int):
        self.problem = ws.problem
        self.k = k
        self.n = ws.problem.n
        self.d = ws.problem.blocks[k].d
        self.handle = ws.register(SimplexLP(slice_lp(ws.problem, k)))
        self._fixed: dict[int, float] = {}

    def _fix(self, support: SupportSet, pattern: int) -> None:
        want = {i: float((pattern >> j) & 1) for j, i in enumerate(support.indices)}
        changes = [(i, 0.0, 1.0) for i in self._fixed if i not in want]
        changes += [(i, v, v) for i, v in want.items() if self._fixed.get(i) != v]
        if changes:
            self.handle.set_bounds(changes)
        self._fixed = want

    def solve(self, support: SupportSet, pattern: int, pi0: float, pi) -> tuple[float, Point | None]:
        self._fix(support, pattern)
        c = np.concatenate([np.asarray(pi, dtype=float), pi0 * self.d])
        self.handle.set_objective(c)
        sol = self.handle.solve()
        if sol.status is LPStatus.INFEASIBLE:
            return INF, None
        if sol.status is not LPStatus.OPTIMAL:
            raise RuntimeError(f"block {self.k}: term LP stopped with {sol.status.value}")
        x = sol.x[: self.n].copy()
        theta = float(self.d @ sol.x[self.n:])
        return sol.objective, (theta, x)


def term_subproblem(ws: Workspace, k: int, support: SupportSet, pattern: int, pi0: float, pi,
                    oracle: TermOracle | None = None) -> tuple[float, Point | None]:
    """eta(pi0, pi; chi) and the point attaining it (+inf when the slice is empty)."""
    if pi0 < 0:
        raise ValueError("pi0 must be nonnegative")
    oracle = oracle or TermOracle(ws, k)
    return oracle.solve(support, pattern, pi0, pi)


@dataclass
class PBResult:
    cut: Cut | None
    objective: float  # pi0 theta_hat + pi^T x_hat - eta at the returned iterate
    pi0: float = 0.0
    pi: np.ndarray | None = None
    eta: float = 0.0
    iterations: int = 0
    points: int = 0
    status: str = "converged"  # converged | time_limit | iteration_limit


@dataclass
class PBState:
    support: SupportSet
    points: dict[int, list[Point]] = field(default_factory=dict)
    feasible: list[int] = field(default_factory=list)
    iterations: int = 0
    seen: set = field(default_factory=set)

    def store(self, g: int, pt: Point) -> bool:
        """Add a point to term g unless it is already there (to 1e-9)."""
        key = (g, round(pt[0], 9)) + tuple(np.round(pt[1], 9))
        if key in self.seen:
            return False
        self.seen.add(key)
        self.points.setdefault(g, []).append(pt)
        return True


class _PBMaster:
    """LP over (pi0, pi+, pi-, eta) with one row per stored point."""

    def __init__(self, n: int, theta_hat: float, x_hat: np.ndarray):
        self.n = n
        c = np.concatenate([[theta_hat], x_hat, -x_hat, [-1.0]])
        norm = np.concatenate([[1.0], np.ones(2 * n), [0.0]])
        lb = np.concatenate([np.zeros(2 * n + 1), [-INF]])
        ub = np.concatenate([np.ones(2 * n + 1), [INF]])
        self.handle = SimplexLP(LinearProgram(c, norm[None, :], ["<="], [1.0], lb, ub))

    def add_points(self, pts: list[Point]) -> None:
        n = self.n
        rows = []
        for theta, x in pts:
            coefs = {0: theta, 2 * n + 1: -1.0}
            for j in range(n):
                if x[j] != 0.0:
                    coefs[1 + j] = x[j]
                    coefs[1 + n + j] = -x[j]
            rows.append(Row(coefs, ">=", 0.0))
        self.handle.add_rows(rows)

    def solve(self) -> tuple[float, float, np.ndarray, float]:
        sol = self.handle.solve()
        if sol.status is not LPStatus.OPTIMAL:
            raise RuntimeError(f"PB master stopped with {sol.status.value}")
        n = self.n
        z = sol.x
        pi = z[1: 1 + n] - z[1 + n: 1 + 2 * n]
        pi[np.abs(pi) < 1e-12] = 0.0
        return sol.objective, float(z[0]), pi, float(z[2 * n + 1])


def pb_separate(ws: Workspace, k: int, support: SupportSet, x_hat, theta_hat: float,
                time_limit: float = 60.0, max_iter: int = 10_000, tol: float = 1e-6,
                clock: Callable[[], float] = time.perf_counter, oracle: TermOracle | None = None,
                seed_points: dict[int, list[Point]] | None = None) -> PBResult:
    """Row generation for the l1-normalized multi-term CGLP on support I."""
    problem = ws.problem
    n = problem.n
    x_hat = np.clip(np.asarray(x_hat, dtype=float), 0.0, 1.0)
    oracle = oracle or TermOracle(ws, k)
    start = clock()
    state = PBState(support)
    zero = np.zeros(n)
    for g in gray_sequence(support.K):
        if seed_points is not None:
            pts = [(float(t), np.asarray(x, dtype=float)) for t, x in seed_points.get(g, [])]
            if pts:
                state.feasible.append(g)
                for pt in pts:
                    state.store(g, pt)
            continue
        val, pt = oracle.solve(support, g, 1.0, zero)
        if pt is not None:
            state.feasible.append(g)
            state.store(g, pt)
    if not state.feasible:
        raise RuntimeError(f"block {k}: every fixing of the support is infeasible")
    master = _PBMaster(n, theta_hat, x_hat)
    ws.register(master.handle)
    master.add_points([p for g in state.feasible for p in state.points[g]])
    status = "converged"
    while True:
        state.iterations += 1
        obj, pi0, pi, eta_hat = master.solve()
        if obj >= -tol:
            return PBResult(None, obj, pi0, pi, eta_hat, state.iterations,
                            sum(len(v) for v in state.points.values()), status)
        values = {}
        new_pts = []
        for g in state.feasible:
            val, pt = oracle.solve(support, g, pi0, pi)
            values[g] = val
            # a point already in the master only looks violated through LP tolerances
            if val < eta_hat - 1e-9 * (1.0 + abs(eta_hat)) and state.store(g, pt):
                new_pts.append(pt)
        if not new_pts:
            break
        if clock() - start > time_limit:
            status = "time_limit"
            break
        if state.iterations >= max_iter:
            status = "iteration_limit"
            break
        master.add_points(new_pts)
    # exact validity from the last full pass over the terms
    eta = float(min(values.values()))
    obj = float(pi0 * theta_hat + pi @ x_hat - eta)
    npts = sum(len(v) for v in state.points.values())
    if obj >= -tol:
        return PBResult(None, obj, pi0, pi, eta, state.iterations, npts, status)
    coefs = {int(j): float(-pi[j]) for j in np.flatnonzero(pi)}
    cut = Cut(k, pi0, coefs, eta, "pb", tuple(sorted(coefs)))
    return PBResult(cut, obj, pi0, pi, eta, state.iterations, npts, status)
