"""Block-diagonal binary MILP data and LP assembly.

The problem is

    min c^T x + sum_k (d^k)^T y^k
    s.t. T^k x + W^k y^k  (sense)  h^k,   y^k >= 0,   x in X subset {0,1}^n

where X is described by an optional cardinality row plus extra linear rows.
Its relaxation R(X) is the box [0,1]^n intersected with the same rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .lp import INF, LinearProgram, Row, SENSES

ORIGINS = ("benders", "isparse", "pb", "tilt")


@dataclass(frozen=True)
class LinearRow:
    coefs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float

    @classmethod
    def make(cls, coefs: Mapping[int, float], sense: str, rhs: float) -> "LinearRow":
        items = tuple(sorted((int(j), float(v)) for j, v in coefs.items() if v != 0.0))
        return cls(items, sense, float(rhs))

    def activity(self, x: np.ndarray) -> float:
        return float(sum(v * x[j] for j, v in self.coefs))

    def satisfied(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        a = self.activity(x)
        if self.sense == "<=":
            return a <= self.rhs + tol
        if self.sense == ">=":
            return a >= self.rhs - tol
        return abs(a - self.rhs) <= tol


@dataclass
class FirstStageSet:
    """X: binary vectors meeting an optional cardinality row and extra rows."""

    n: int
    card_sense: str | None = None
    card_rhs: int = 0
    rows: list[LinearRow] = field(default_factory=list)

    def lp_rows(self, offset: int = 0) -> list[Row]:
        """Rows of R(X) with x stored starting at column ``offset``."""
        out = []
        if self.card_sense is not None:
            out.append(Row({offset + j: 1.0 for j in range(self.n)}, self.card_sense, float(self.card_rhs)))
        for r in self.rows:
            out.append(Row({offset + j: v for j, v in r.coefs}, r.sense, r.rhs))
        return out

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if x.size != self.n or np.any(np.abs(x - np.round(x)) > tol):
            return False
        return self.in_relaxation(x, tol)

    def in_relaxation(self, x, tol: float = 1e-7) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < -tol) or np.any(x > 1 + tol):
            return False
        if self.card_sense is not None:
            s = float(x.sum())
            if self.card_sense == "<=" and s > self.card_rhs + tol:
                return False
            if self.card_sense == ">=" and s < self.card_rhs - tol:
                return False
            if self.card_sense == "=" and abs(s - self.card_rhs) > tol:
                return False
        return all(r.satisfied(x, tol) for r in self.rows)

    def enumerate(self, limit: int = 16) -> list[np.ndarray]:
        """All members of X in lexicographic order (small n only)."""
        if self.n > limit:
            raise ValueError(f"refusing to enumerate 2^{self.n} points")
        pts = []
        for bits in itertools.product((0.0, 1.0), repeat=self.n):
            x = np.array(bits)
            if self.in_relaxation(x, 1e-9):
                pts.append(x)
        return pts


@dataclass
class Block:
    """One recourse block: min d^T y s.t. T x + W y (senses) h, y >= 0."""

    index: int
    d: np.ndarray
    T: np.ndarray
    W: np.ndarray
    h: np.ndarray
    senses: list[str]

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=float).reshape(-1)
        self.h = np.asarray(self.h, dtype=float).reshape(-1)
        self.T = np.atleast_2d(np.asarray(self.T, dtype=float))
        self.W = np.atleast_2d(np.asarray(self.W, dtype=float))
        self.senses = list(self.senses)

    @property
    def m(self) -> int:
        return self.d.size

    @property
    def rows(self) -> int:
        return self.h.size

    def support(self) -> np.ndarray:
        """First-stage columns touched by T."""
        return np.flatnonzero(np.any(self.T != 0.0, axis=0))


@dataclass
class BlockDiagonalProblem:
    c: np.ndarray
    X: FirstStageSet
    blocks: list[Block]
    name: str = ""

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)

    @property
    def n(self) -> int:
        return self.X.n

    @property
    def N(self) -> int:
        return len(self.blocks)


@dataclass
class Cut:
    """``theta_coef * theta_k >= sum_j coefs[j] x_j + rhs`` for block ``block``.

    ``block`` is None for cuts that only involve x (master scope).
    """

    block: int | None
    theta_coef: float
    coefs: dict[int, float]
    rhs: float
    origin: str
    support: tuple[int, ...] = ()

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown cut origin {self.origin!r}")
        if self.origin == "isparse":
            extra = set(self.coefs) - set(self.support)
            if extra:
                raise ValueError(f"I-sparse cut has coefficients outside its support: {sorted(extra)}")

    def value(self, x) -> float:
        """Right-hand side evaluated at x."""
        return float(sum(v * x[j] for j, v in self.coefs.items())) + self.rhs

    def violation(self, theta: float, x) -> float:
        return self.value(x) - self.theta_coef * theta

    def dense(self, n: int) -> np.ndarray:
        a = np.zeros(n)
        for j, v in self.coefs.items():
            a[j] = v
        return a

    def as_row(self, N: int) -> Row:
        """Row over the master layout (theta_1..theta_N, x_1..x_n)."""
        coefs = {N + j: -v for j, v in self.coefs.items() if v != 0.0}
        if self.block is not None and self.theta_coef != 0.0:
            coefs[self.block] = self.theta_coef
        return Row(coefs, ">=", self.rhs)


def validate(problem: BlockDiagonalProblem) -> list[str]:
    out = []
    X = problem.X
    n = X.n
    if n < 1:
        out.append("first-stage dimension must be positive")
    if problem.c.size != n:
        out.append(f"first-stage cost has length {problem.c.size}, expected {n}")
    if X.card_sense is not None:
        if X.card_sense not in ("<=", ">=", "="):
            out.append(f"cardinality sense {X.card_sense!r} is not supported")
        if not 0 <= X.card_rhs <= n:
            out.append(f"cardinality rhs {X.card_rhs} outside [0, {n}]")
    for r, row in enumerate(X.rows):
        if row.sense not in SENSES:
            out.append(f"first-stage row {r} has unknown sense {row.sense!r}")
        if any(not 0 <= j < n for j, _ in row.coefs):
            out.append(f"first-stage row {r} references a column outside [0, {n})")
    if problem.N < 1:
        out.append("problem has no blocks")
    for pos, b in enumerate(problem.blocks):
        k = b.index
        if k != pos:
            out.append(f"block {k}: index does not match position {pos}")
        if b.m < 1:
            out.append(f"block {k}: recourse dimension must be at least 1")
        if b.T.shape[0] != b.rows or b.W.shape[0] != b.rows or len(b.senses) != b.rows:
            out.append(f"block {k}: row counts of T, W, h and senses disagree")
        if b.T.shape[1] > n:
            out.append(f"block {k}: T references first-stage column {b.T.shape[1] - 1} >= n={n}")
        elif b.T.shape[1] < n:
            out.append(f"block {k}: T has {b.T.shape[1]} columns, expected {n}")
        if b.W.shape[1] != b.m:
            out.append(f"block {k}: W has {b.W.shape[1]} columns, expected {b.m}")
        if any(s not in SENSES for s in b.senses):
            out.append(f"block {k}: unknown row sense")
        for arr, name in ((b.d, "d"), (b.T, "T"), (b.W, "W"), (b.h, "h")):
            if not np.all(np.isfinite(arr)):
                out.append(f"block {k}: non-finite entries in {name}")
    return out


def _require_valid(problem: BlockDiagonalProblem) -> None:
    diags = validate(problem)
    if diags:
        raise ValueError("; ".join(diags))


def build_extensive(problem: BlockDiagonalProblem) -> tuple[LinearProgram, np.ndarray]:
    """Extensive-form LP over (x, y^1, ..., y^N) and the integrality mask."""
    _require_valid(problem)
    n = problem.n
    total = n + sum(b.m for b in problem.blocks)
    c = np.zeros(total)
    c[:n] = problem.c
    ub = np.full(total, INF)
    ub[:n] = 1.0
    rows = problem.X.lp_rows()
    A_blocks = []
    off = n
    for b in problem.blocks:
        c[off: off + b.m] = b.d
        A = np.zeros((b.rows, total))
        A[:, :n] = b.T
        A[:, off: off + b.m] = b.W
        A_blocks.append((A, b.senses, b.h))
        off += b.m
    A0 = np.array([r.dense(total) for r in rows]).reshape(len(rows), total)
    A = np.vstack([A0] + [a for a, _, _ in A_blocks])
    senses = [r.sense for r in rows] + [s for _, ss, _ in A_blocks for s in ss]
    rhs = np.concatenate([[r.rhs for r in rows]] + [h for _, _, h in A_blocks])
    mask = np.zeros(total, dtype=bool)
    mask[:n] = True
    return LinearProgram(c, A, senses, rhs, np.zeros(total), ub), mask


def build_master(problem: BlockDiagonalProblem, theta_lb) -> LinearProgram:
    """Master LP over (theta_1..theta_N, x) with R(X) rows and theta floors."""
    _require_valid(problem)
    theta_lb = np.asarray(theta_lb, dtype=float).reshape(-1)
    N, n = problem.N, problem.n
    if theta_lb.size != N or not np.all(np.isfinite(theta_lb)):
        raise ValueError("theta_lb must hold one finite value per block")
    c = np.concatenate([np.ones(N), problem.c])
    lb = np.concatenate([theta_lb, np.zeros(n)])
    ub = np.concatenate([np.full(N, INF), np.ones(n)])
    rows = problem.X.lp_rows(offset=N)
    A = np.array([r.dense(N + n) for r in rows]).reshape(len(rows), N + n)
    return LinearProgram(c, A, [r.sense for r in rows], [r.rhs for r in rows], lb, ub)


def slice_lp(problem: BlockDiagonalProblem, k: int, objective_x=None) -> LinearProgram:
    """LP over (x, y^k) with R(X) rows and block k's rows; objective d^k y.

    Fixing x_I by bounds gives the LP whose value is nu_I(chi).
    """
    b = problem.blocks[k]
    n = problem.n
    total = n + b.m
    c = np.zeros(total)
    c[n:] = b.d
    if objective_x is not None:
        c[:n] = objective_x
    rows = problem.X.lp_rows()
    A0 = np.array([r.dense(total) for r in rows]).reshape(len(rows), total)
    A1 = np.hstack([b.T, b.W])
    A = np.vstack([A0, A1])
    senses = [r.sense for r in rows] + b.senses
    rhs = np.concatenate([[r.rhs for r in rows], b.h])
    ub = np.concatenate([np.ones(n), np.full(b.m, INF)])
    return LinearProgram(c, A, senses, rhs, np.zeros(total), ub)


def subproblem_lp(problem: BlockDiagonalProblem, k: int, x_hat) -> LinearProgram:
    """Recourse LP min d^T y s.t. W y (senses) h - T x_hat, y >= 0."""
    b = problem.blocks[k]
    x_hat = np.asarray(x_hat, dtype=float)
    return LinearProgram(b.d, b.W, b.senses, b.h - b.T @ x_hat, np.zeros(b.m), np.full(b.m, INF))
