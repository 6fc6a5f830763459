"""Benders subproblems, cut extraction, the cut pool and the Kelley root loop."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .lp import INF, LPStatus, SimplexLP
from .model import BlockDiagonalProblem, Cut, build_master, slice_lp, subproblem_lp
from .workers import pmap

THETA_FLOOR = -1e9


class RecourseViolation(RuntimeError):
    """Block subproblem is infeasible (or unbounded) at a relaxation point."""

    def __init__(self, k: int, detail: str = "infeasible"):
        super().__init__(f"block {k}: recourse LP is {detail}")
        self.block = k


class IterationLimit(RuntimeError):
    pass


class Workspace:
    """Per-block LP handles with warm starts, plus a shared work meter.

    Handles for a block are only touched by the thread processing that block.
    """

    def __init__(self, problem: BlockDiagonalProblem):
        self.problem = problem
        self._sub: dict[int, SimplexLP] = {}
        self._slice: dict[int, SimplexLP] = {}
        self._extra: list[SimplexLP] = []
        self._lock = threading.Lock()
        self._units = 0

    def sub(self, k: int) -> SimplexLP:
        h = self._sub.get(k)
        if h is None:
            h = SimplexLP(subproblem_lp(self.problem, k, np.zeros(self.problem.n)))
            with self._lock:
                self._sub[k] = h
        return h

    def slice(self, k: int) -> SimplexLP:
        h = self._slice.get(k)
        if h is None:
            h = SimplexLP(slice_lp(self.problem, k))
            with self._lock:
                self._slice[k] = h
        return h

    def register(self, handle: SimplexLP) -> SimplexLP:
        with self._lock:
            self._extra.append(handle)
        return handle

    def add_work(self, units: int) -> None:
        with self._lock:
            self._units += int(units)

    def work(self) -> int:
        """Deterministic effort counter: pivots plus solves over all handles."""
        with self._lock:
            hs = list(self._sub.values()) + list(self._slice.values()) + list(self._extra)
            units = self._units
        return units + sum(h.pivots + h.solves for h in hs)


def solve_subproblem(ws: Workspace, k: int, x_hat) -> tuple[float, np.ndarray]:
    """Q_k(x_hat) and an optimal dual vector of the recourse LP."""
    problem = ws.problem
    x_hat = np.asarray(x_hat, dtype=float)
    if not problem.X.in_relaxation(x_hat, 1e-7):
        raise ValueError("x_hat lies outside R(X)")
    b = problem.blocks[k]
    h = ws.sub(k)
    h.set_row_rhs(enumerate(b.h - b.T @ x_hat))
    sol = h.solve()
    if sol.status is LPStatus.INFEASIBLE:
        raise RecourseViolation(k)
    if sol.status is LPStatus.UNBOUNDED:
        raise RecourseViolation(k, "unbounded")
    if sol.status is not LPStatus.OPTIMAL:
        raise RuntimeError(f"block {k}: recourse LP stopped with {sol.status.value}")
    return sol.objective, sol.duals.copy()


def make_benders_cut(problem: BlockDiagonalProblem, k: int, dual) -> Cut:
    """theta_k >= pi^T (h - T x)."""
    b = problem.blocks[k]
    pi = np.asarray(dual, dtype=float)
    a = -(b.T.T @ pi)
    coefs = {int(j): float(a[j]) for j in np.flatnonzero(np.abs(a) > 1e-12)}
    return Cut(k, 1.0, coefs, float(pi @ b.h), "benders", tuple(sorted(coefs)))


def _fingerprint(cut: Cut) -> tuple:
    items = tuple(sorted((j, round(v, 9)) for j, v in cut.coefs.items() if round(v, 9) != 0.0))
    return (cut.block, round(cut.theta_coef, 9), items, round(cut.rhs, 9))


@dataclass
class CutPool:
    """Benders cuts per block, deduplicated on rounded coefficients."""

    N: int
    cuts: list[list[Cut]] = field(default_factory=list)
    _seen: set = field(default_factory=set)

    def __post_init__(self):
        if not self.cuts:
            self.cuts = [[] for _ in range(self.N)]

    def add(self, cut: Cut) -> bool:
        key = _fingerprint(cut)
        if key in self._seen:
            return False
        self._seen.add(key)
        self.cuts[cut.block].append(cut)
        return True

    def __len__(self) -> int:
        return sum(len(c) for c in self.cuts)

    def block(self, k: int) -> list[Cut]:
        return self.cuts[k]

    def by_tightness(self, k: int, x_hat) -> list[Cut]:
        """Cuts of block k ordered by a^T x_hat + b, descending; older first on ties."""
        cuts = self.cuts[k]
        vals = [c.value(x_hat) for c in cuts]
        order = sorted(range(len(cuts)), key=lambda i: (-round(vals[i], 12), i))
        return [cuts[i] for i in order]

    def candidates(self, k: int) -> list[int]:
        """Indices with a nonzero coefficient in some pooled cut of block k."""
        idx = set()
        for c in self.cuts[k]:
            idx.update(j for j, v in c.coefs.items() if v != 0.0)
        return sorted(idx)


def theta_floors(ws: Workspace, workers: int = 1) -> np.ndarray:
    """min over R(X) of Q_k for every block (THETA_FLOOR when unbounded)."""

    def floor(k: int) -> float:
        h = ws.slice(k)
        sol = h.solve()
        if sol.status is LPStatus.UNBOUNDED:
            return THETA_FLOOR
        if sol.status is LPStatus.INFEASIBLE:
            raise RecourseViolation(k)
        if sol.status is not LPStatus.OPTIMAL:
            raise RuntimeError(f"block {k}: floor LP stopped with {sol.status.value}")
        return max(sol.objective, THETA_FLOOR)

    return np.array(pmap(floor, range(ws.problem.N), workers))


class Master:
    """Master LP over (theta, x) that accumulates cuts."""

    def __init__(self, problem: BlockDiagonalProblem, theta_lb, ws: Workspace | None = None):
        self.problem = problem
        self.theta_lb = np.asarray(theta_lb, dtype=float)
        self.handle = SimplexLP(build_master(problem, self.theta_lb))
        if ws is not None:
            ws.register(self.handle)
        self.cuts: list[Cut] = []
        self.objective = -INF
        self.theta = self.theta_lb.copy()
        self.x = np.zeros(problem.n)

    def add_cuts(self, cuts) -> None:
        cuts = list(cuts)
        if cuts:
            self.handle.add_rows([c.as_row(self.problem.N) for c in cuts])
            self.cuts.extend(cuts)

    def solve(self) -> float:
        sol = self.handle.solve()
        if sol.status is not LPStatus.OPTIMAL:
            raise RuntimeError(f"master LP stopped with {sol.status.value}")
        N = self.problem.N
        self.theta = sol.x[:N].copy()
        self.x = np.clip(sol.x[N:], 0.0, 1.0)
        self.objective = sol.objective
        return self.objective

    def count(self, origin: str) -> int:
        return sum(1 for c in self.cuts if c.origin == origin)


@dataclass
class KelleyResult:
    master: Master
    pool: CutPool
    z_lp: float
    iterations: int
    history: list[float]


def kelley_root_loop(problem: BlockDiagonalProblem, tol: float = 1e-6, max_iter: int = 2000,
                     ws: Workspace | None = None, workers: int = 1) -> KelleyResult:
    """Cutting-plane loop adding one Benders cut per violated block per round."""
    ws = ws or Workspace(problem)
    master = Master(problem, theta_floors(ws, workers), ws)
    pool = CutPool(problem.N)
    history = []
    it = 0
    while True:
        it += 1
        master.solve()
        history.append(master.objective)
        x_hat, theta = master.x.copy(), master.theta.copy()

        def separate(k: int):
            q, pi = solve_subproblem(ws, k, x_hat)
            return (make_benders_cut(problem, k, pi), q) if q - theta[k] > tol else None

        found = [r for r in pmap(separate, range(problem.N), workers) if r is not None]
        new = [cut for cut, _ in found if pool.add(cut)]
        if not found:
            break
        if not new:
            # every violated cut is already in the pool: numerical floor reached
            break
        if it >= max_iter:
            raise IterationLimit(f"Kelley loop hit {max_iter} iterations")
        master.add_cuts(new)
    return KelleyResult(master, pool, master.objective, it, history)


class CutValidityError(AssertionError):
    pass


class EnumerationOracle:
    """Q_k(x) on every x in X, for checking cuts on tiny instances (n <= 12)."""

    def __init__(self, problem: BlockDiagonalProblem, limit: int = 12):
        if problem.n > limit:
            raise ValueError(f"enumeration oracle needs n <= {limit}, got {problem.n}")
        self.problem = problem
        self.points = problem.X.enumerate(limit)
        ws = Workspace(problem)
        self.values = np.array([[solve_subproblem(ws, k, x)[0] for k in range(problem.N)]
                                for x in self.points]).reshape(len(self.points), problem.N)

    def slack(self, cut: Cut) -> float:
        """min over x in X of theta_coef Q_k(x) - (a^T x + b); >= 0 for a valid cut."""
        k = cut.block
        return min(cut.theta_coef * self.values[t, k] - cut.value(x) for t, x in enumerate(self.points))

    def check(self, cut: Cut, tol: float = 1e-6) -> float:
        s = self.slack(cut)
        if s < -tol:
            raise CutValidityError(f"{cut.origin} cut on block {cut.block} violated by {-s:.3g} on X")
        return s
