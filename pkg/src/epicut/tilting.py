"""Sparse tilting of a valid inequality alpha^T x + beta^T y <= gamma.

Only the coefficients on a support I of binary variables change.  For each
chi in {0,1}^I the tilted right-hand side must dominate

    bound(chi) = min{ max{alpha_rest^T x_rest + beta^T y : (x, y) in D^R, x_I = chi},
                      gamma - alpha_I^T chi }

and the best tilt at (x_hat, y_hat) solves a CGLP of the same shape as the
I-sparse one, so it is delegated to :func:`epicut.sparse.solve_cglp`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .lp import INF, LinearProgram, LPStatus, SimplexLP
from .model import BlockDiagonalProblem, Cut
from .sparse import NuTable, SparseCut, SupportSet, UnboundedSeparation, gray_sequence, solve_cglp


class TiltBoundFailure(RuntimeError):
    def __init__(self, pattern: int, detail: str):
        super().__init__(f"tilting bound for pattern {pattern:b}: {detail}")
        self.pattern = pattern


SliceMax = Callable[[np.ndarray, np.ndarray, dict], float]


@dataclass
class MixedBinarySet:
    """D^R = {(x, y) : A [x; y] (senses) rhs, x in [0,1]^n, y_lb <= y <= y_ub}.

    ``slice_max_hook`` replaces the LP for nonlinear fixtures: it receives the
    x objective, the y objective and a {index: value} map of fixed binaries,
    and returns the maximum (-inf when empty, +inf when unbounded).
    """

    n: int
    p: int
    A: np.ndarray | None = None
    senses: Sequence[str] = ()
    rhs: np.ndarray | None = None
    y_lb: np.ndarray | None = None
    y_ub: np.ndarray | None = None
    x_rows: Sequence = ()  # extra constraints on binaries only, as (coef dict, sense, rhs)
    slice_max_hook: SliceMax | None = None

    def slice_max(self, c_x, beta, fixed: dict) -> float:
        c_x = np.asarray(c_x, dtype=float)
        beta = np.asarray(beta, dtype=float)
        if self.slice_max_hook is not None:
            return float(self.slice_max_hook(c_x, beta, fixed))
        n, p = self.n, self.p
        lb = np.concatenate([np.zeros(n), np.zeros(p) if self.y_lb is None else self.y_lb])
        ub = np.concatenate([np.ones(n), np.full(p, INF) if self.y_ub is None else self.y_ub])
        for i, v in fixed.items():
            lb[i] = ub[i] = v
        A = np.zeros((0, n + p)) if self.A is None else np.asarray(self.A, dtype=float)
        rhs = np.zeros(0) if self.rhs is None else np.asarray(self.rhs, dtype=float)
        senses = list(self.senses)
        for coefs, sense, r in self.x_rows:
            row = np.zeros(n + p)
            for j, v in coefs.items():
                row[j] = v
            A = np.vstack([A, row])
            senses.append(sense)
            rhs = np.append(rhs, r)
        sol = SimplexLP(LinearProgram(-np.concatenate([c_x, beta]), A, senses, rhs, lb, ub)).solve()
        if sol.status is LPStatus.INFEASIBLE:
            return -INF
        if sol.status is LPStatus.UNBOUNDED:
            return INF
        if sol.status is not LPStatus.OPTIMAL:
            raise RuntimeError(f"slice LP stopped with {sol.status.value}")
        return -sol.objective

    def binary_points(self) -> list[np.ndarray]:
        """Binary x with a nonempty fiber in D (small n only)."""
        pts = []
        for bits in itertools.product((0.0, 1.0), repeat=self.n):
            x = np.array(bits)
            if self.slice_max(np.zeros(self.n), np.zeros(self.p), dict(enumerate(bits))) > -INF:
                pts.append(x)
        return pts

    def max_over_D(self, c_x, beta) -> float:
        """max of c_x^T x + beta^T y over D by enumerating binaries."""
        best = -INF
        for x in self.binary_points():
            v = float(np.asarray(c_x) @ x) + self.slice_max(np.zeros(self.n), beta, dict(enumerate(x)))
            best = max(best, v)
        return best


@dataclass
class BaseInequality:
    """alpha^T x + beta^T y <= gamma."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: float

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.beta = np.asarray(self.beta, dtype=float)
        self.gamma = float(self.gamma)

    def violation(self, x, y) -> float:
        return float(self.alpha @ np.asarray(x) + self.beta @ np.asarray(y) - self.gamma)

    def valid_for(self, D: MixedBinarySet, tol: float = 1e-6) -> bool:
        return D.max_over_D(self.alpha, self.beta) <= self.gamma + tol


def tilt_bounds(D: MixedBinarySet, base: BaseInequality, support: SupportSet) -> np.ndarray:
    """bound(chi) for every pattern; -inf marks an empty slice (no constraint)."""
    idx = list(support.indices)
    rest = base.alpha.copy()
    rest[idx] = 0.0
    out = np.empty(1 << support.K)
    for g in gray_sequence(support.K):
        chi = [float((g >> j) & 1) for j in range(support.K)]
        nu_bar = D.slice_max(rest, base.beta, dict(zip(idx, chi)))
        cap = base.gamma - float(base.alpha[idx] @ np.array(chi))
        val = min(nu_bar, cap)
        if np.isnan(val) or val == INF:
            raise TiltBoundFailure(g, "both the slice maximum and the cap are unbounded")
        out[g] = val
    return out


@dataclass
class TiltResult:
    inequality: BaseInequality | None
    violation: float
    base_violation: float
    ray: UnboundedSeparation | None = None


def tilt_cglp(x_hat, y_hat, base: BaseInequality, support: SupportSet, bounds) -> TiltResult:
    """Most violated tilt at (x_hat, y_hat); mu equals alpha off the support.

    With eta' = -eta the rows  eta - mu_I^T chi >= bound(chi)  read
    mu_I^T chi + eta' <= -bound(chi), i.e. a CGLP over the table -bound.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    idx = list(support.indices)
    table = NuTable(-1, support, -np.asarray(bounds, dtype=float))
    base_viol = base.violation(x_hat, y_hat)
    res = solve_cglp(x_hat[idx], -INF, table)
    if isinstance(res, UnboundedSeparation):
        return TiltResult(None, INF, base_viol, res)
    mu = base.alpha.copy()
    mu[idx] = res.mu
    tilted = BaseInequality(mu, base.beta.copy(), -res.eta)
    return TiltResult(tilted, tilted.violation(x_hat, y_hat), base_viol)


# -- block epigraph tilting -------------------------------------------------

def block_epigraph_set(problem: BlockDiagonalProblem, k: int) -> MixedBinarySet:
    """D^R for block k over (x, (theta, y^k)) with theta >= d^T y."""
    b = problem.blocks[k]
    n, m = problem.n, b.m
    p = 1 + m
    rows, senses, rhs = [], [], []
    for r in problem.X.lp_rows():
        rows.append(np.concatenate([r.dense(n), np.zeros(p)]))
        senses.append(r.sense)
        rhs.append(r.rhs)
    for r in range(b.rows):
        rows.append(np.concatenate([b.T[r], [0.0], b.W[r]]))
        senses.append(b.senses[r])
        rhs.append(b.h[r])
    rows.append(np.concatenate([np.zeros(n), [1.0], -b.d]))
    senses.append(">=")
    rhs.append(0.0)
    y_lb = np.concatenate([[-INF], np.zeros(m)])
    return MixedBinarySet(n, p, np.array(rows), senses, np.array(rhs), y_lb, np.full(p, INF))


def cut_to_base(cut: Cut, problem: BlockDiagonalProblem) -> BaseInequality:
    """theta >= a^T x + b  as  a^T x - theta <= -b over (x, (theta, y))."""
    if cut.theta_coef != 1.0:
        raise ValueError("tilting expects theta coefficient 1")
    m = problem.blocks[cut.block].m
    beta = np.zeros(1 + m)
    beta[0] = -1.0
    return BaseInequality(cut.dense(problem.n), beta, -cut.rhs)


def tilt_cut(problem: BlockDiagonalProblem, cut: Cut, support: SupportSet, x_hat, theta_hat: float,
             D: MixedBinarySet | None = None) -> tuple[Cut | None, TiltResult]:
    """Tilt a block epigraph cut on ``support``; returns the tilted Cut (origin 'tilt')."""
    D = D or block_epigraph_set(problem, cut.block)
    base = cut_to_base(cut, problem)
    y_hat = np.zeros(D.p)
    y_hat[0] = theta_hat
    res = tilt_cglp(x_hat, y_hat, base, support, tilt_bounds(D, base, support))
    if res.inequality is None:
        return None, res
    mu, eta = res.inequality.alpha, res.inequality.gamma
    coefs = {int(j): float(mu[j]) for j in np.flatnonzero(mu)}
    return Cut(cut.block, 1.0, coefs, -eta, "tilt", tuple(sorted(coefs))), res


# -- perspective fixture ------------------------------------------------------

@dataclass
class SeparableQuadratic:
    """f(z) = sum q_i z_i^2 + l_i z_i with q >= 0 (so f(0) = 0, convex)."""

    q: np.ndarray
    l: np.ndarray

    def __call__(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return float(self.q @ (z * z) + self.l @ z)

    def grad(self, z) -> np.ndarray:
        return 2 * self.q * np.asarray(z, dtype=float) + self.l


def perspective_set(f: SeparableQuadratic, u) -> MixedBinarySet:
    """D = {(x, z, theta) : 0 <= z <= u x, theta >= f(z)} with one binary x.

    Continuous variables are ordered (z_1..z_m, theta).
    """
    u = np.asarray(u, dtype=float)
    m = u.size

    def slice_max(c_x, beta, fixed):
        c_z, b_t = beta[:m], beta[m]
        if 0 not in fixed:
            raise ValueError("the perspective fixture needs x fixed")
        x = fixed[0]
        if b_t > 0:
            return INF
        ub = u * x
        if b_t == 0:
            z = np.where(c_z > 0, ub, 0.0)
        else:
            # concave separable maximization over the box [0, u x]
            lin = c_z + b_t * f.l
            quad = b_t * f.q
            with np.errstate(divide="ignore", invalid="ignore"):
                z = np.where(quad < 0, np.clip(-lin / (2 * quad), 0.0, ub), np.where(lin > 0, ub, 0.0))
        return float(c_x[0] * x + c_z @ z + b_t * f(z))

    return MixedBinarySet(1, m + 1, slice_max_hook=slice_max)


def subgradient_base(f: SeparableQuadratic, z_bar) -> BaseInequality:
    """theta >= f(z_bar) + s^T (z - z_bar)  as  0 x + s^T z - theta <= s^T z_bar - f(z_bar)."""
    z_bar = np.asarray(z_bar, dtype=float)
    s = f.grad(z_bar)
    return BaseInequality(np.zeros(1), np.concatenate([s, [-1.0]]), float(s @ z_bar - f(z_bar)))
