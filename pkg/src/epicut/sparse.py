"""nu-table evaluation and the I-sparse cut-generating LP.

For a block k and a support I, nu_I(chi) = min{Q_k(x) : x in R(X), x_I = chi}.
The table over all chi in {0,1}^I feeds a small LP whose optimum is the
strongest inequality theta >= mu^T x_I + eta valid for every slice.
"""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .benders import Workspace
from .lp import INF, LinearProgram, LPStatus, SimplexLP
from .model import Cut

MAX_K = 20
VIOLATION_TOL = 1e-6


def gray_sequence(K: int) -> list[int]:
    """Reflected Gray code over K bits; bit j of a pattern refers to I[j]."""
    if not 1 <= K <= MAX_K:
        raise ValueError(f"support size {K} outside [1, {MAX_K}]")
    return [i ^ (i >> 1) for i in range(1 << K)]


def pattern_bits(pattern: int, K: int) -> np.ndarray:
    return np.array([(pattern >> j) & 1 for j in range(K)], dtype=float)


@dataclass(frozen=True)
class SupportSet:
    """Sorted tuple of distinct first-stage indices."""

    indices: tuple[int, ...]

    @classmethod
    def of(cls, indices: Iterable[int], n: int | None = None) -> "SupportSet":
        idx = tuple(sorted(int(i) for i in indices))
        if len(set(idx)) != len(idx):
            raise ValueError("support indices must be distinct")
        if not 1 <= len(idx) <= MAX_K:
            raise ValueError(f"support size {len(idx)} outside [1, {MAX_K}]")
        if idx[0] < 0 or (n is not None and idx[-1] >= n):
            raise ValueError("support index out of range")
        return cls(idx)

    @property
    def K(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


@dataclass
class NuTable:
    block: int
    support: SupportSet
    values: np.ndarray  # length 2^K, +inf marks an infeasible fixing

    def chi(self, pattern: int) -> np.ndarray:
        return pattern_bits(pattern, self.support.K)

    def finite(self) -> np.ndarray:
        return np.flatnonzero(np.isfinite(self.values))

    def patterns(self) -> np.ndarray:
        """Matrix whose row p is chi(p)."""
        K = self.support.K
        p = np.arange(1 << K)
        return ((p[:, None] >> np.arange(K)[None, :]) & 1).astype(float)


class NuCache:
    """Tables keyed by (block, support) plus a singleton store.

    Reads are lock-free dictionary lookups; insertion is exclusive and
    first-writer-wins, so a table never changes once stored.
    """

    def __init__(self):
        self.tables: dict[tuple[int, tuple[int, ...]], NuTable] = {}
        self.singletons: dict[tuple[int, int], tuple[float, float]] = {}
        self._by_block: dict[int, list[NuTable]] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, k: int, support: SupportSet) -> NuTable | None:
        return self.tables.get((k, support.indices))

    def put(self, table: NuTable) -> NuTable:
        key = (table.block, table.support.indices)
        with self._lock:
            existing = self.tables.get(key)
            if existing is not None:
                return existing
            table.values.setflags(write=False)
            self.tables[key] = table
            self._by_block.setdefault(table.block, []).append(table)
            if table.support.K == 1:
                self.singletons.setdefault((table.block, table.support.indices[0]),
                                           (float(table.values[0]), float(table.values[1])))
            return table

    def put_singleton(self, k: int, i: int, nu0: float, nu1: float) -> None:
        with self._lock:
            self.singletons.setdefault((k, i), (float(nu0), float(nu1)))

    def block_tables(self, k: int) -> list[NuTable]:
        """Tables of block k in insertion order."""
        with self._lock:
            return list(self._by_block.get(k, ()))

    def __len__(self):
        return len(self.tables)


def _eval_values(ws: Workspace, k: int, indices: Sequence[int]) -> np.ndarray:
    """nu over all patterns, one warm-started LP per pattern in Gray order."""
    K = len(indices)
    h = ws.slice(k)
    values = np.full(1 << K, INF)
    prev = None
    try:
        h.set_bounds((i, 0.0, 0.0) for i in indices)
        for g in gray_sequence(K):
            if prev is not None:
                j = (g ^ prev).bit_length() - 1
                v = float((g >> j) & 1)
                h.set_bounds([(indices[j], v, v)])
            prev = g
            sol = h.solve()
            if sol.status is LPStatus.OPTIMAL:
                values[g] = sol.objective
            elif sol.status is LPStatus.UNBOUNDED:
                raise RuntimeError(f"block {k}: recourse is unbounded below on a slice")
            elif sol.status is not LPStatus.INFEASIBLE:
                raise RuntimeError(f"block {k}: slice LP stopped with {sol.status.value}")
    finally:
        h.set_bounds((i, 0.0, 1.0) for i in indices)
    return values


def eval_nu_table(ws: Workspace, k: int, support: SupportSet, cache: NuCache | None = None) -> NuTable:
    if cache is not None:
        hit = cache.get(k, support)
        if hit is not None:
            cache.hits += 1
            return hit
        cache.misses += 1
    table = NuTable(k, support, _eval_values(ws, k, support.indices))
    return cache.put(table) if cache is not None else table


def singleton_values(ws: Workspace, k: int, i: int, cache: NuCache | None = None) -> tuple[float, float]:
    if cache is not None and (k, i) in cache.singletons:
        return cache.singletons[(k, i)]
    v = _eval_values(ws, k, [i])
    if cache is not None:
        cache.put_singleton(k, i, v[0], v[1])
    return float(v[0]), float(v[1])


# -- CGLP ---------------------------------------------------------------------

@dataclass
class SparseCut:
    mu: np.ndarray
    eta: float
    g: float
    cut: Cut | None = None


@dataclass
class NoViolation:
    g: float
    mu: np.ndarray | None = None
    eta: float = 0.0


@dataclass
class UnboundedSeparation:
    """x_hat_I lies outside the hull of feasible fixings.

    ``ray`` = (mu, eta) with mu^T chi + eta <= 0 on every feasible chi and
    mu^T x_hat_I + eta > 0.
    """

    mu: np.ndarray
    eta: float
    support: SupportSet | None = None
    block: int | None = None


SparseCutResult = SparseCut | NoViolation | UnboundedSeparation


def _hull_lp(chis: np.ndarray, nus: np.ndarray, target: np.ndarray) -> LinearProgram:
    K = chis.shape[1]
    A = np.vstack([chis.T, np.ones(chis.shape[0])])
    rhs = np.concatenate([target, [1.0]])
    return LinearProgram(nus, A, ["="] * (K + 1), rhs)


def _separating_ray(chis: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, float]:
    K = chis.shape[1]
    c = -np.concatenate([target, [1.0]])
    A = np.hstack([chis, np.ones((chis.shape[0], 1))])
    lb = np.concatenate([-np.ones(K), [-(K + 1.0)]])
    ub = -lb
    sol = SimplexLP(LinearProgram(c, A, ["<="] * chis.shape[0], np.zeros(chis.shape[0]), lb, ub)).solve()
    return sol.x[:K].copy(), float(sol.x[K])


def solve_cglp(x_hat_I, theta_hat: float, table: NuTable, tol: float = VIOLATION_TOL,
               meter: Workspace | None = None) -> SparseCutResult:
    """max mu^T x_hat_I + eta s.t. mu^T chi + eta <= nu(chi) for finite nu.

    Solved through its dual, min sum nu(chi) lam_chi over convex combinations
    of the feasible chi that reproduce x_hat_I.
    """
    x = np.clip(np.asarray(x_hat_I, dtype=float), 0.0, 1.0)
    K = table.support.K
    if x.size != K:
        raise ValueError("x_hat_I length does not match the support")
    fin = table.finite()
    if fin.size == 0:
        raise ValueError("nu table has no finite entry")
    chis = table.patterns()[fin]
    nus = np.asarray(table.values)[fin]
    handle = SimplexLP(_hull_lp(chis, nus, x))
    try:
        return _finish_cglp(handle, handle.solve(), chis, nus, x, theta_hat, table, tol)
    finally:
        if meter is not None:
            meter.add_work(handle.pivots + handle.solves)


def _finish_cglp(handle, sol, chis, nus, x, theta_hat, table, tol) -> SparseCutResult:
    K = table.support.K
    if sol.status is LPStatus.INFEASIBLE:
        mu, eta = _separating_ray(chis, x)
        return UnboundedSeparation(mu, eta, table.support, table.block)
    if sol.status is not LPStatus.OPTIMAL:
        raise RuntimeError(f"CGLP stopped with {sol.status.value}")
    # prefer a vertex of the cut polyhedron when x_hat_I is degenerate
    sol = handle.drive_out_fixed_logicals()
    mu = sol.duals[:K].copy()
    mu[np.abs(mu) < 1e-12] = 0.0
    # exact validity: eta = min over feasible chi of nu(chi) - mu^T chi
    eta = float(np.min(nus - chis @ mu))
    g = float(mu @ x + eta)
    if g > theta_hat + tol:
        coefs = {i: float(v) for i, v in zip(table.support.indices, mu) if v != 0.0}
        cut = Cut(table.block, 1.0, coefs, eta, "isparse", table.support.indices)
        return SparseCut(mu, eta, g, cut)
    return NoViolation(g, mu, eta)


def recheck_cached_supports(x_hat, theta_hat, cache: NuCache, blocks: Iterable[int] | None = None,
                            tol: float = VIOLATION_TOL, meter: Workspace | None = None) -> list[Cut]:
    """Re-run the CGLP on cached tables at a new point; violated cuts only."""
    x_hat = np.asarray(x_hat, dtype=float)
    theta_hat = np.atleast_1d(np.asarray(theta_hat, dtype=float))
    wanted = None if blocks is None else set(blocks)
    out = []
    with cache._lock:
        items = list(cache.tables.items())
    for (k, idx), table in items:
        if wanted is not None and k not in wanted:
            continue
        res = solve_cglp(x_hat[list(idx)], float(theta_hat[k]), table, tol, meter)
        if isinstance(res, SparseCut):
            out.append(res.cut)
    return out


def dump_tables(cache: NuCache, path) -> None:
    """Debug CSV with columns k, I, chi, nu."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "I", "chi", "nu"])
        for (k, idx), table in cache.tables.items():
            K = len(idx)
            for p, v in enumerate(table.values):
                bits = "".join(str((p >> j) & 1) for j in range(K))
                w.writerow([k, " ".join(map(str, idx)), bits, repr(float(v))])
