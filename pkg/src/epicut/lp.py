"""Bounded-variable revised simplex with warm starts.

Every LP in the package goes through :class:`SimplexLP`.  Rows are stored in
the computational form ``A x - s = 0`` where the logical variable ``s`` of a
row carries the row bounds implied by its sense, so a right-hand-side change
is just a bound change on a logical.  The basis inverse is kept explicitly and
updated in product form; it is recomputed from scratch every
``refactor_every`` pivots.

Cold solves start from the all-logical basis.  After bound changes, row
additions or objective changes the previous basis is kept and the solver picks
primal phase 2 (primal feasible), dual simplex (dual feasible) or a composite
phase 1 (neither).
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

INF = np.inf

BASIC, AT_LOWER, AT_UPPER, AT_ZERO = 0, 1, 2, 3
_STATUS_NAMES = {BASIC: "basic", AT_LOWER: "lower", AT_UPPER: "upper", AT_ZERO: "zero"}

SENSES = ("<=", "=", ">=")


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class Row:
    """A sparse row ``sum(coefs[j] * x[j]) <sense> rhs``."""

    coefs: Mapping[int, float]
    sense: str
    rhs: float

    def dense(self, n: int) -> np.ndarray:
        a = np.zeros(n)
        for j, v in self.coefs.items():
            a[j] += v
        return a


def row_bounds(sense: str, rhs: float) -> tuple[float, float]:
    if sense == "<=":
        return -INF, float(rhs)
    if sense == ">=":
        return float(rhs), INF
    if sense == "=":
        return float(rhs), float(rhs)
    raise ValueError(f"unknown row sense {sense!r}")


@dataclass
class LinearProgram:
    """``min c^T x`` subject to ``A x <sense> rhs`` and ``lb <= x <= ub``."""

    c: np.ndarray
    A: np.ndarray
    senses: list[str]
    rhs: np.ndarray
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        self.lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).copy()
        self.ub = np.full(n, INF) if self.ub is None else np.asarray(self.ub, dtype=float).copy()
        self.check()

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_rows(cls, c, rows: Sequence[Row], lb=None, ub=None) -> "LinearProgram":
        c = np.asarray(c, dtype=float)
        A = np.array([r.dense(c.size) for r in rows]).reshape(len(rows), c.size)
        return cls(c, A, [r.sense for r in rows], [r.rhs for r in rows], lb, ub)

    def check(self) -> None:
        n, m = self.n, self.m
        if self.rhs.size != m or len(self.senses) != m:
            raise ValueError("row count mismatch between A, senses and rhs")
        if self.lb.size != n or self.ub.size != n:
            raise ValueError("bound vectors must match the variable count")
        if not np.all(np.isfinite(self.c)):
            raise ValueError("objective coefficients must be finite")
        if not np.all(np.isfinite(self.A)) or not np.all(np.isfinite(self.rhs)):
            raise ValueError("row data must be finite")
        bad = [s for s in self.senses if s not in SENSES]
        if bad:
            raise ValueError(f"unknown row senses {bad}")

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ x)


@dataclass
class LPSolution:
    status: LPStatus
    x: np.ndarray
    objective: float
    duals: np.ndarray
    reduced_costs: np.ndarray
    row_activity: np.ndarray
    var_status: np.ndarray
    row_status: np.ndarray
    iterations: int = 0
    ray: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL

    def basis_labels(self) -> tuple[list[str], list[str]]:
        return ([_STATUS_NAMES[int(s)] for s in self.var_status],
                [_STATUS_NAMES[int(s)] for s in self.row_status])


@dataclass
class Basis:
    head: np.ndarray
    status: np.ndarray
    n: int
    m: int


@dataclass
class SimplexOptions:
    ftol: float = 1e-7
    dtol: float = 1e-7
    ptol: float = 1e-9
    refactor_every: int = 100
    bland_after: int = 1000
    max_iter: int | None = None


class SimplexLP:
    """Solved-LP state that supports warm-started re-solves.

    >>> lp = LinearProgram([-1, -1], [[1, 1]], ["<="], [1], ub=[1, 1])
    >>> SimplexLP(lp).solve().objective
    -1.0
    """

    def __init__(self, lp: LinearProgram, options: SimplexOptions | None = None):
        self.opt = options or SimplexOptions()
        self.pivots = 0
        self.solves = 0
        self.solution: LPSolution | None = None
        self._load(lp)

    # -- setup -----------------------------------------------------------
    def _load(self, lp: LinearProgram) -> None:
        n, m = lp.n, lp.m
        self.n, self.m = n, m
        self.As = lp.A.copy()
        self.cost = np.zeros(n + m)
        self.cost[:n] = lp.c
        self.lo = np.empty(n + m)
        self.hi = np.empty(n + m)
        self.lo[:n], self.hi[:n] = lp.lb, lp.ub
        self.senses = list(lp.senses)
        for i, (s, b) in enumerate(zip(lp.senses, lp.rhs)):
            self.lo[n + i], self.hi[n + i] = row_bounds(s, b)
        self._slack_basis()

    def _slack_basis(self) -> None:
        n, m = self.n, self.m
        self.head = np.arange(n, n + m)
        self.status = np.full(n + m, BASIC, dtype=np.int8)
        self.x = np.zeros(n + m)
        for j in range(n):
            self._rest(j)
        self.Binv = -np.eye(m)
        self._since_refactor = 0
        self._fresh = True
        self._compute_xB()

    def _rest(self, j: int, prefer: int | None = None) -> None:
        """Place nonbasic ``j`` at a bound, preferring status ``prefer``."""
        lo, hi = self.lo[j], self.hi[j]
        if prefer == AT_UPPER and hi < INF:
            self.status[j], self.x[j] = AT_UPPER, hi
        elif prefer == AT_LOWER and lo > -INF:
            self.status[j], self.x[j] = AT_LOWER, lo
        elif lo > -INF:
            self.status[j], self.x[j] = AT_LOWER, lo
        elif hi < INF:
            self.status[j], self.x[j] = AT_UPPER, hi
        else:
            self.status[j], self.x[j] = AT_ZERO, 0.0

    def copy(self) -> "SimplexLP":
        return copy.deepcopy(self)

    # -- modification API ------------------------------------------------
    def set_bounds(self, changes: Iterable[tuple[int, float, float]]) -> None:
        for j, lo, hi in changes:
            j = int(j)
            if not 0 <= j < self.n:
                raise IndexError(f"variable index {j} out of range")
            self.lo[j], self.hi[j] = float(lo), float(hi)
            if self.status[j] != BASIC:
                self._rest(j, prefer=int(self.status[j]))
        self._compute_xB()

    def set_row_rhs(self, changes: Iterable[tuple[int, float]]) -> None:
        for i, rhs in changes:
            j = self.n + int(i)
            self.lo[j], self.hi[j] = row_bounds(self.senses[int(i)], rhs)
            if self.status[j] != BASIC:
                self._rest(j, prefer=int(self.status[j]))
        self._compute_xB()

    def set_objective(self, c) -> None:
        c = np.asarray(c, dtype=float)
        if c.size != self.n or not np.all(np.isfinite(c)):
            raise ValueError("objective must be a finite vector of length n")
        self.cost[: self.n] = c

    def add_rows(self, rows: Sequence[Row]) -> None:
        if not rows:
            return
        n, m, k = self.n, self.m, len(rows)
        new = np.zeros((k, n))
        for r, row in enumerate(rows):
            for j in row.coefs:
                if not 0 <= j < n:
                    raise IndexError(f"row coefficient index {j} out of range")
            new[r] = row.dense(n)
        # B' = [[B, 0], [a_B, -1]]  =>  B'^-1 = [[B^-1, 0], [a_B B^-1, -1]]
        aB = self._basis_matrix_rows(new)
        self.As = np.vstack([self.As, new])
        self.cost = np.concatenate([self.cost, np.zeros(k)])
        lo = np.empty(k)
        hi = np.empty(k)
        for r, row in enumerate(rows):
            lo[r], hi[r] = row_bounds(row.sense, row.rhs)
        self.lo = np.concatenate([self.lo, lo])
        self.hi = np.concatenate([self.hi, hi])
        self.senses += [row.sense for row in rows]
        self.status = np.concatenate([self.status, np.full(k, BASIC, dtype=np.int8)])
        self.x = np.concatenate([self.x, np.zeros(k)])
        self.head = np.concatenate([self.head, np.arange(n + m, n + m + k)])
        Binv = np.zeros((m + k, m + k))
        Binv[:m, :m] = self.Binv
        Binv[m:, :m] = aB @ self.Binv
        Binv[m:, m:] = -np.eye(k)
        self.Binv = Binv
        self.m = m + k
        self._fresh = False
        self._compute_xB()

    def basis(self) -> Basis:
        return Basis(self.head.copy(), self.status.copy(), self.n, self.m)

    def set_basis(self, basis: Basis) -> None:
        """Load a basis saved earlier; rows added since then get logical basics."""
        n, m = self.n, self.m
        if basis.n != n or basis.m > m:
            raise ValueError("basis does not fit this LP")
        status = np.full(n + m, BASIC, dtype=np.int8)
        status[: n + basis.m] = basis.status
        self.status = status
        self.head = np.concatenate([basis.head, np.arange(n + basis.m, n + m)])
        for j in np.flatnonzero(self.status != BASIC):
            self._rest(int(j), prefer=int(self.status[j]))
        self._refactor()

    # -- linear algebra helpers -----------------------------------------
    def _basis_matrix_rows(self, rows: np.ndarray) -> np.ndarray:
        """Columns ``head`` of ``[rows | 0]`` (new logicals are not in head yet)."""
        out = np.zeros((rows.shape[0], self.head.size))
        struct = self.head < self.n
        out[:, struct] = rows[:, self.head[struct]]
        return out

    def _basis_matrix(self) -> np.ndarray:
        m, n = self.m, self.n
        B = np.zeros((m, m))
        struct = self.head < n
        B[:, struct] = self.As[:, self.head[struct]]
        slack_pos = np.flatnonzero(~struct)
        B[self.head[slack_pos] - n, slack_pos] = -1.0
        return B

    def _column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.As[:, j]
        col = np.zeros(self.m)
        col[j - self.n] = -1.0
        return col

    def _refactor(self) -> None:
        m = self.m
        if m:
            B = self._basis_matrix()
            ok = True
            try:
                Binv = np.linalg.inv(B)
                ok = bool(np.all(np.isfinite(Binv))) and np.abs(B @ Binv - np.eye(m)).max() < 1e-6
            except np.linalg.LinAlgError:
                ok = False
            if not ok:
                self._repair()
                return
            self.Binv = Binv
        else:
            self.Binv = np.zeros((0, 0))
        self._since_refactor = 0
        self._fresh = True
        self._compute_xB()

    def _repair(self) -> None:
        # singular basis: fall back to all-logical, keeping nonbasic positions
        n, m = self.n, self.m
        for j in self.head:
            if j < n:
                self._rest(int(j))
        self.status[n:] = BASIC
        self.head = np.arange(n, n + m)
        self.Binv = -np.eye(m)
        self._since_refactor = 0
        self._fresh = True
        self._compute_xB()

    def _compute_xB(self) -> None:
        if not self.m:
            return
        xN = self.x.copy()
        xN[self.head] = 0.0
        r = self.As @ xN[: self.n] - xN[self.n:]
        self.x[self.head] = -(self.Binv @ r)

    def _reduced_costs(self, cB: np.ndarray, cfull: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        y = self.Binv.T @ cB if self.m else np.zeros(0)
        d = cfull.copy()
        d[: self.n] -= self.As.T @ y
        d[self.n:] += y
        d[self.head] = 0.0
        return y, d

    def _pivot(self, q: int, r: int, alpha: np.ndarray, leave_status: int) -> None:
        j = int(self.head[r])
        self.status[j] = leave_status
        self.x[j] = self.lo[j] if leave_status == AT_LOWER else self.hi[j]
        self.head[r] = q
        self.status[q] = BASIC
        row = self.Binv[r] / alpha[r]
        self.Binv -= np.outer(alpha, row)
        self.Binv[r] = row
        self.pivots += 1
        self._fresh = False
        self._since_refactor += 1
        if self._since_refactor >= self.opt.refactor_every:
            self._refactor()
        else:
            self._compute_xB()

    # -- feasibility tests -------------------------------------------------
    def _primal_violation(self) -> np.ndarray:
        xB = self.x[self.head]
        return np.maximum(self.lo[self.head] - xB, xB - self.hi[self.head])

    def _dual_infeasible(self, d: np.ndarray) -> np.ndarray:
        tol = self.opt.dtol
        st = self.status
        free = self.lo < self.hi
        return free & (((st == AT_LOWER) & (d < -tol)) | ((st == AT_UPPER) & (d > tol))
                       | ((st == AT_ZERO) & (np.abs(d) > tol)))

    # -- main driver -------------------------------------------------------
    def solve(self) -> LPSolution:
        """Optimize from the current basis and return the solution."""
        self.solves += 1
        self._iter0 = self.pivots
        self._limit = self.opt.max_iter or 100 * (self.m + self.n + 1)
        self._degenerate = 0
        self._bland = False
        self._ray = None
        if np.any(self.lo[: self.n] > self.hi[: self.n] + self.opt.ftol) or \
                np.any(self.lo[self.n:] > self.hi[self.n:] + self.opt.ftol):
            status = LPStatus.INFEASIBLE
        else:
            status = self._optimize()
        self.solution = self._extract(status)
        return self.solution

    def _optimize(self) -> LPStatus:
        if not self._fresh:
            self._refactor()
        for _ in range(20):
            if self._primal_violation().max(initial=0.0) > self.opt.ftol:
                _, d = self._reduced_costs(self.cost[self.head], self.cost)
                self._flip_boxed(d)
                _, d = self._reduced_costs(self.cost[self.head], self.cost)
                if not self._dual_infeasible(d).any():
                    st = self._dual_simplex()
                    if st == "lost":
                        st = self._primal_simplex(phase=1)
                else:
                    st = self._primal_simplex(phase=1)
                if isinstance(st, LPStatus):
                    return st
            st = self._primal_simplex(phase=2)
            if st is not LPStatus.OPTIMAL:
                return st
            self._refactor()
            _, d = self._reduced_costs(self.cost[self.head], self.cost)
            if self._primal_violation().max(initial=0.0) <= self.opt.ftol and \
                    not self._dual_infeasible(d).any():
                return LPStatus.OPTIMAL
        return LPStatus.ITERATION_LIMIT

    def _flip_boxed(self, d: np.ndarray) -> None:
        bad = self._dual_infeasible(d) & np.isfinite(self.lo) & np.isfinite(self.hi)
        idx = np.flatnonzero(bad)
        if idx.size == 0:
            return
        for j in idx:
            if d[j] < 0:
                self.status[j], self.x[j] = AT_UPPER, self.hi[j]
            else:
                self.status[j], self.x[j] = AT_LOWER, self.lo[j]
        self._compute_xB()

    def _out_of_iterations(self) -> bool:
        return self.pivots - self._iter0 >= self._limit

    def _note_step(self, t: float) -> None:
        if t <= 1e-12:
            self._degenerate += 1
            if self._degenerate >= self.opt.bland_after:
                self._bland = True
        else:
            self._degenerate = 0

    def _choose_entering(self, d: np.ndarray) -> int:
        cand = self._dual_infeasible(d)
        if not cand.any():
            return -1
        if self._bland:
            return int(np.flatnonzero(cand)[0])
        score = np.where(cand, np.abs(d), -1.0)
        return int(np.argmax(score))

    def _primal_simplex(self, phase: int):
        """Primal simplex; phase 1 minimizes the sum of bound violations."""
        opt = self.opt
        n = self.n
        zero_cost = np.zeros(self.n + self.m)
        stalls = 0
        while True:
            if self._out_of_iterations():
                return LPStatus.ITERATION_LIMIT
            xB = self.x[self.head]
            loB, hiB = self.lo[self.head], self.hi[self.head]
            if phase == 1:
                below = xB < loB - opt.ftol
                above = xB > hiB + opt.ftol
                if not (below.any() or above.any()):
                    return None
                cB = above.astype(float) - below.astype(float)
                _, d = self._reduced_costs(cB, zero_cost)
            else:
                below = above = np.zeros(self.m, dtype=bool)
                _, d = self._reduced_costs(self.cost[self.head], self.cost)
            q = self._choose_entering(d)
            if q < 0:
                return LPStatus.INFEASIBLE if phase == 1 else LPStatus.OPTIMAL
            direction = 1.0 if d[q] < 0 else -1.0
            alpha = self.Binv @ self._column(q) if self.m else np.zeros(0)
            rate = -direction * alpha
            r, t, leave = self._ratio_test(rate, xB, loB, hiB, below, above)
            span = self.hi[q] - self.lo[q]
            if span < INF and (r < 0 or span <= t):
                # entering variable reaches its opposite bound first
                if direction > 0:
                    self.status[q], self.x[q] = AT_UPPER, self.hi[q]
                else:
                    self.status[q], self.x[q] = AT_LOWER, self.lo[q]
                self._compute_xB()
                self._note_step(span)
                self.pivots += 1
                continue
            if r < 0:
                if phase == 2:
                    ray = np.zeros(self.n + self.m)
                    ray[q] = direction
                    ray[self.head] = rate
                    self._ray = ray[:n]
                    return LPStatus.UNBOUNDED
                # phase 1 cannot be unbounded; numerical trouble
                stalls += 1
                if stalls > 3:
                    return LPStatus.ITERATION_LIMIT
                self._refactor()
                continue
            self._note_step(t)
            self._pivot(q, r, alpha, leave)

    def _ratio_test(self, rate, xB, loB, hiB, below, above):
        """Two-pass (Harris) ratio test.  Returns (row, step, leaving status)."""
        opt = self.opt
        m = rate.size
        if m == 0:
            return -1, INF, AT_LOWER
        feas = ~(below | above)
        dec = rate < -opt.ptol
        inc = rate > opt.ptol
        exact = np.full(m, INF)
        relaxed = np.full(m, INF)
        to_lower = np.zeros(m, dtype=bool)
        with np.errstate(divide="ignore", invalid="ignore"):
            k = feas & dec & np.isfinite(loB)
            exact[k] = (xB[k] - loB[k]) / -rate[k]
            relaxed[k] = (xB[k] - loB[k] + opt.ftol) / -rate[k]
            to_lower[k] = True
            k = feas & inc & np.isfinite(hiB)
            exact[k] = (hiB[k] - xB[k]) / rate[k]
            relaxed[k] = (hiB[k] - xB[k] + opt.ftol) / rate[k]
            k = below & inc
            exact[k] = relaxed[k] = (loB[k] - xB[k]) / rate[k]
            to_lower[k] = True
            k = above & dec
            exact[k] = relaxed[k] = (xB[k] - hiB[k]) / -rate[k]
        tmax = relaxed.min()
        if tmax == INF:
            return -1, INF, AT_LOWER
        if self._bland:
            tmin = exact.min()
            cand = np.flatnonzero(exact <= tmin + 1e-12)
            r = int(cand[np.argmin(self.head[cand])])
        else:
            cand = np.flatnonzero(exact <= tmax)
            r = int(cand[np.argmax(np.abs(rate[cand]))])
        t = max(float(exact[r]), 0.0)
        leave = AT_LOWER if to_lower[r] else AT_UPPER
        j = self.head[r]
        if self.lo[j] == self.hi[j]:
            leave = AT_LOWER
        return r, t, leave

    def _dual_simplex(self):
        opt = self.opt
        n = self.n
        while True:
            if self._out_of_iterations():
                return LPStatus.ITERATION_LIMIT
            viol = self._primal_violation()
            if viol.max(initial=0.0) <= opt.ftol:
                return None
            if self._bland:
                cand = np.flatnonzero(viol > opt.ftol)
                r = int(cand[np.argmin(self.head[cand])])
            else:
                r = int(np.argmax(viol))
            jB = self.head[r]
            to_lower = self.x[jB] < self.lo[jB]
            _, d = self._reduced_costs(self.cost[self.head], self.cost)
            if self._dual_infeasible(d).any():
                return "lost"
            rho = self.Binv[r]
            arow = np.empty(n + self.m)
            arow[:n] = rho @ self.As
            arow[n:] = -rho
            arow[self.head] = 0.0
            st = self.status
            movable = (st != BASIC) & (self.lo < self.hi)
            if to_lower:
                cand = movable & (((st == AT_LOWER) & (arow < -opt.ptol))
                                  | ((st == AT_UPPER) & (arow > opt.ptol))
                                  | ((st == AT_ZERO) & (np.abs(arow) > opt.ptol)))
            else:
                cand = movable & (((st == AT_LOWER) & (arow > opt.ptol))
                                  | ((st == AT_UPPER) & (arow < -opt.ptol))
                                  | ((st == AT_ZERO) & (np.abs(arow) > opt.ptol)))
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                return LPStatus.INFEASIBLE
            dd = np.abs(d[idx])
            aa = np.abs(arow[idx])
            ratios = dd / aa
            if self._bland:
                tmin = ratios.min()
                q = int(idx[ratios <= tmin + 1e-12][0])
            else:
                bound = ((dd + opt.dtol) / aa).min()
                ok = ratios <= bound
                q = int(idx[ok][np.argmax(aa[ok])])
            alpha = self.Binv @ self._column(q)
            self._note_step(float(np.abs(d[q]) / abs(arow[q])))
            self._pivot(q, r, alpha, AT_LOWER if to_lower else AT_UPPER)

    def drive_out_fixed_logicals(self) -> LPSolution:
        """Pivot basic logicals of equality rows out of an optimal basis.

        Each pivot is primal degenerate and keeps dual feasibility, so the
        optimum is unchanged while the row duals move to a vertex of the dual
        polyhedron whenever the structural columns have full row rank.
        Only applies when every movable nonbasic structural sits at its
        lower bound (as in a convex-combination LP).
        """
        if self.solution is None or not self.solution.optimal:
            raise RuntimeError("needs an optimal solution")
        n, tol = self.n, self.opt.ptol
        movable = (self.status[:n] != BASIC) & (self.lo[:n] < self.hi[:n])
        if np.any(movable & (self.status[:n] != AT_LOWER)):
            return self.solution
        for r in range(self.m):
            j = int(self.head[r])
            if j < n or self.lo[j] != self.hi[j]:
                continue
            _, d = self._reduced_costs(self.cost[self.head], self.cost)
            arow = self.Binv[r] @ self.As
            nonbasic = (self.status[:n] != BASIC) & (self.lo[:n] < self.hi[:n])
            pos = np.flatnonzero(nonbasic & (arow > 1e3 * tol))
            neg = np.flatnonzero(nonbasic & (arow < -1e3 * tol))
            best = None
            # d_j - t * arow_j must keep its sign for every nonbasic j
            if pos.size:
                ratios = d[pos] / arow[pos]
                i = int(np.argmin(ratios))
                best = (abs(ratios[i]), int(pos[i]))
            if neg.size:
                ratios = d[neg] / arow[neg]
                i = int(np.argmax(ratios))
                if best is None or abs(ratios[i]) < best[0]:
                    best = (abs(ratios[i]), int(neg[i]))
            if best is None:
                continue
            q = best[1]
            alpha = self.Binv @ self._column(q)
            self._pivot(q, r, alpha, AT_LOWER)
        self._refactor()
        self.solution = self._extract(LPStatus.OPTIMAL)
        return self.solution

    # -- reporting ---------------------------------------------------------
    def _extract(self, status: LPStatus) -> LPSolution:
        n = self.n
        y, d = self._reduced_costs(self.cost[self.head], self.cost)
        x = self.x[:n].copy()
        return LPSolution(
            status=status,
            x=x,
            objective=float(self.cost[:n] @ x) if status is LPStatus.OPTIMAL else
            (-INF if status is LPStatus.UNBOUNDED else INF),
            duals=y.copy(),
            reduced_costs=d[:n].copy(),
            row_activity=self.As @ x,
            var_status=self.status[:n].copy(),
            row_status=self.status[n:].copy(),
            iterations=self.pivots - self._iter0,
            ray=None if self._ray is None else self._ray.copy(),
        )


def solve(lp: LinearProgram, options: SimplexOptions | None = None) -> LPSolution:
    return SimplexLP(lp, options).solve()


def update_bounds_and_resolve(handle: SimplexLP, changes: Iterable[tuple[int, float, float]]) -> LPSolution:
    changes = list(changes)
    for _, lo, hi in changes:
        if lo > hi:
            raise ValueError("new lower bound exceeds new upper bound")
    handle.set_bounds(changes)
    return handle.solve()


def add_rows_and_resolve(handle: SimplexLP, rows: Sequence[Row]) -> LPSolution:
    handle.add_rows(rows)
    return handle.solve()
