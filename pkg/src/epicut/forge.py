"""Seeded instance generators, test fixtures and the BDZ1 instance format.

All randomness comes from ``numpy.random.default_rng(seed)``, i.e. the PCG64
generator, so an instance is a pure function of (family, params, seed).

BDZ1 format (one record per line, ``#`` starts a comment)::

    BDZ1 <n> <N>
    name <text>                      optional
    c <j> <value>                    first-stage cost, zero entries omitted
    X
    card <sense> <rhs> | card none
    xrow <r> <sense> <rhs>           extra first-stage rows
    xa <r> <j> <value>
    BLOCK <k> <m_k> <rows_k>
    d <j> <value>
    row <r> <sense> <rhs>            one per block row, in order
    T <r> <j> <value>
    W <r> <j> <value>

Floats are written with ``repr`` so a write/read round trip is lossless.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .lp import INF, LinearProgram, LPStatus, SimplexLP
from .model import Block, BlockDiagonalProblem, FirstStageSet, LinearRow


# -- generator parameters ---------------------------------------------------

@dataclass
class SnipParams:
    nodes: int = 15
    arcs: int = 40
    interdictable: int = 15
    scenarios: int = 10
    budget: int = 3
    r_range: tuple[float, float] = (0.6, 1.0)
    q_fraction: tuple[float, float] = (0.1, 0.5)
    family: str = field(default="snip", init=False)

    def check(self):
        if min(self.nodes, self.arcs, self.interdictable, self.scenarios) < 1:
            raise ValueError("SNIP sizes must be positive")
        if self.nodes < 2:
            raise ValueError("SNIP needs at least 2 nodes")
        if not 0 <= self.budget <= self.interdictable:
            raise ValueError("SNIP budget must lie in [0, interdictable]")
        lo, hi = self.r_range
        if not 0 <= lo <= hi <= 1:
            raise ValueError("r_range must be a sub-interval of [0, 1]")
        lo, hi = self.q_fraction
        if not 0 <= lo <= hi <= 1:
            raise ValueError("q_fraction must be a sub-interval of [0, 1]")


@dataclass
class LLAParams:
    n: int = 40
    segments: int = 20
    p: int = 8
    U: float = 150.0
    capacity: float = 0.5
    family: str = field(default="lla", init=False)

    def check(self):
        if min(self.n, self.segments, self.p) < 1:
            raise ValueError("LLA sizes must be positive")
        if self.p % 2 or self.p > self.n:
            raise ValueError("LLA consideration size p must be even and at most n")
        if self.U < 100:
            raise ValueError("LLA profit cap U must be at least 100")
        if not 0 < self.capacity <= 1:
            raise ValueError("LLA capacity fraction must lie in (0, 1]")


@dataclass
class CAPParams:
    facilities: int = 10
    customers: int = 15
    scenarios: int = 10
    capacity_ratio: float = 3.0
    family: str = field(default="cap", init=False)

    def check(self):
        if min(self.facilities, self.customers, self.scenarios) < 1:
            raise ValueError("CAP sizes must be positive")
        if self.capacity_ratio <= 0:
            raise ValueError("capacity_ratio must be positive")


GeneratorParams = SnipParams | LLAParams | CAPParams


# -- SNIP -------------------------------------------------------------------

def snip_from_network(n_nodes: int, arcs: list[tuple[int, int]], r, q, interdictable: list[int],
                      scenarios: list[tuple[int, int]], budget: float, probs=None,
                      cost=None, name: str = "snip") -> BlockDiagonalProblem:
    """SNIP instance on an explicit network.

    ``interdictable`` lists arc positions that may receive a sensor; x_a follows
    that order.  Scenario s is an (origin, destination) pair with probability
    ``probs[s]`` (uniform by default).
    """
    r = np.asarray(r, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(q > r + 1e-15):
        raise ValueError("interdicted probability q_a must not exceed r_a")
    S = len(scenarios)
    probs = np.full(S, 1.0 / S) if probs is None else np.asarray(probs, dtype=float)
    n = len(interdictable)
    pos = {a: i for i, a in enumerate(interdictable)}
    cost = np.ones(n) if cost is None else np.asarray(cost, dtype=float)
    blocks = []
    for s, (u, v) in enumerate(scenarios):
        pibar = _max_reliability(n_nodes, arcs, r, v)
        if pibar[u] <= 0:
            raise ValueError(f"scenario {s}: no path from {u} to {v}")
        T, W, h, senses = [], [], [], []
        for a, (i, j) in enumerate(arcs):
            w = np.zeros(n_nodes)
            w[i] += 1.0
            w[j] -= r[a]
            t = np.zeros(n)
            if a in pos:
                t[pos[a]] = (r[a] - q[a]) * pibar[j]
            T.append(t), W.append(w), h.append(0.0), senses.append(">=")
            if a in pos:
                w = np.zeros(n_nodes)
                w[i] += 1.0
                w[j] -= q[a]
                T.append(np.zeros(n)), W.append(w), h.append(0.0), senses.append(">=")
        w = np.zeros(n_nodes)
        w[v] = 1.0
        T.append(np.zeros(n)), W.append(w), h.append(1.0), senses.append("=")
        d = np.zeros(n_nodes)
        d[u] = probs[s]
        blocks.append(Block(s, d, np.array(T), np.array(W), np.array(h), senses))
    if np.allclose(cost, 1.0) and float(budget).is_integer():
        X = FirstStageSet(n, "<=", int(budget))
    else:
        X = FirstStageSet(n, None, 0, [LinearRow.make(dict(enumerate(cost)), "<=", budget)])
    return BlockDiagonalProblem(np.zeros(n), X, blocks, name)


def _max_reliability(n_nodes, arcs, r, target) -> np.ndarray:
    """Best undetected-arrival probability to ``target`` from every node (no sensors)."""
    best = np.zeros(n_nodes)
    best[target] = 1.0
    # Bellman-Ford style relaxation; probabilities <= 1 so it converges
    for _ in range(n_nodes):
        changed = False
        for a, (i, j) in enumerate(arcs):
            val = r[a] * best[j]
            if val > best[i] + 1e-15:
                best[i] = val
                changed = True
        if not changed:
            break
    return best


def _layered_dag(rng, nodes: int, arcs: int):
    layers = max(2, int(round(math.sqrt(nodes))))
    layer_of = np.sort(np.concatenate([np.arange(layers), rng.integers(0, layers, nodes - layers)])) \
        if nodes >= layers else np.arange(nodes)
    by_layer = [np.flatnonzero(layer_of == l) for l in range(layers)]
    edges = []
    seen = set()

    def add(i, j):
        if (i, j) not in seen:
            seen.add((i, j))
            edges.append((int(i), int(j)))

    for l in range(layers - 1):
        for i in by_layer[l]:
            add(i, rng.choice(by_layer[l + 1]))
        for j in by_layer[l + 1]:
            add(rng.choice(by_layer[l]), j)
    forward = [(i, j) for i in range(nodes) for j in range(nodes)
               if layer_of[i] < layer_of[j] and (i, j) not in seen]
    extra = max(0, min(arcs - len(edges), len(forward)))
    if extra:
        for idx in rng.choice(len(forward), size=extra, replace=False):
            add(*forward[idx])
    return edges, by_layer


def gen_snip(params: SnipParams | None = None, seed: int = 0) -> BlockDiagonalProblem:
    """SNIP on a layered random DAG; origins in the first layer, destinations in the last."""
    params = params or SnipParams()
    params.check()
    rng = np.random.default_rng(seed)
    for _attempt in range(50):
        edges, by_layer = _layered_dag(rng, params.nodes, params.arcs)
        A = len(edges)
        if params.interdictable > A:
            raise ValueError("more interdictable arcs requested than arcs generated")
        r = rng.uniform(*params.r_range, size=A)
        q = r * rng.uniform(*params.q_fraction, size=A)
        D = sorted(int(a) for a in rng.choice(A, size=params.interdictable, replace=False))
        pairs = []
        reach_cache = {}
        for _ in range(params.scenarios * 20):
            if len(pairs) == params.scenarios:
                break
            u = int(rng.choice(by_layer[0]))
            v = int(rng.choice(by_layer[-1]))
            if v not in reach_cache:
                reach_cache[v] = _max_reliability(params.nodes, edges, np.ones(A), v)
            if reach_cache[v][u] > 0:
                pairs.append((u, v))
        if len(pairs) == params.scenarios:
            return snip_from_network(params.nodes, edges, r, q, D, pairs, params.budget,
                                     name=f"snip-s{seed}")
    raise ValueError("could not generate a connected SNIP network")


# -- LLA --------------------------------------------------------------------

def lla_block(k: int, n: int, C, lam: float, v0: float, v, w) -> Block:
    """Segment block of the assortment MILP, written as a minimization.

    Variables (y, z_i for i in C); profit is negated.
    """
    C = list(C)
    p = len(C)
    m = 1 + p
    d = np.zeros(m)
    rows_T, rows_W, h, senses = [], [], [], []
    # v0 y + sum v_i z_i = 1
    wrow = np.zeros(m)
    wrow[0] = v0
    for t, i in enumerate(C):
        wrow[1 + t] = v[t]
        d[1 + t] = -lam * v[t] * w[i]
    rows_T.append(np.zeros(n)), rows_W.append(wrow), h.append(1.0), senses.append("=")
    for t, i in enumerate(C):
        # v0 y - v0 z_i + x_i <= 1
        wr = np.zeros(m)
        wr[0], wr[1 + t] = v0, -v0
        tr = np.zeros(n)
        tr[i] = 1.0
        rows_T.append(tr), rows_W.append(wr), h.append(1.0), senses.append("<=")
        # z_i - y <= 0
        wr = np.zeros(m)
        wr[0], wr[1 + t] = -1.0, 1.0
        rows_T.append(np.zeros(n)), rows_W.append(wr), h.append(0.0), senses.append("<=")
        # (v0 + v_i) z_i - x_i <= 0
        wr = np.zeros(m)
        wr[1 + t] = v0 + v[t]
        tr = np.zeros(n)
        tr[i] = -1.0
        rows_T.append(tr), rows_W.append(wr), h.append(0.0), senses.append("<=")
    return Block(k, d, np.array(rows_T), np.array(rows_W), np.array(h), senses)


def gen_lla(params: LLAParams | None = None, seed: int = 0) -> BlockDiagonalProblem:
    params = params or LLAParams()
    params.check()
    rng = np.random.default_rng(seed)
    n, N, p = params.n, params.segments, params.p
    w = rng.uniform(100.0, params.U, size=n)
    blocks = []
    prev = None
    for k in range(N):
        lam = rng.uniform(0.0, 1.0)
        v0 = rng.uniform(0.0, 4.0)
        # segments are 1-based in the scheme: odd segments draw fresh sets
        if k % 2 == 0:
            C = np.sort(rng.choice(n, size=p, replace=False))
        else:
            C = np.sort(rng.choice(prev, size=p // 2, replace=False))
        v = rng.integers(0, 11, size=len(C)).astype(float)
        blocks.append(lla_block(k, n, C, lam, v0, v, w))
        prev = C
    X = FirstStageSet(n, "<=", int(math.floor(params.capacity * n + 1e-9)))
    return BlockDiagonalProblem(np.zeros(n), X, blocks, f"lla-s{seed}")


# -- CAP --------------------------------------------------------------------

def cap_problem(f, s, q, demands, name: str = "cap") -> BlockDiagonalProblem:
    """Stochastic CAP from explicit data; ``demands`` has shape (N, m)."""
    f = np.asarray(f, dtype=float)
    s = np.asarray(s, dtype=float)
    q = np.asarray(q, dtype=float)
    demands = np.atleast_2d(np.asarray(demands, dtype=float))
    n, m = q.shape
    N = demands.shape[0]
    need = float(demands.sum(axis=1).max())
    if s.sum() < need - 1e-12:
        raise ValueError("total capacity is below the largest scenario demand")
    blocks = []
    for k in range(N):
        W = np.zeros((m + n, n * m))
        T = np.zeros((m + n, n))
        h = np.zeros(m + n)
        senses = [">="] * m + ["<="] * n
        for j in range(m):
            W[j, [i * m + j for i in range(n)]] = 1.0
            h[j] = demands[k, j]
        for i in range(n):
            W[m + i, i * m: (i + 1) * m] = 1.0
            T[m + i, i] = -s[i]
        blocks.append(Block(k, q.reshape(-1) / N, T, W, h, senses))
    cover = LinearRow.make(dict(enumerate(s)), ">=", need)
    min_open = int(math.ceil(need / s.max() - 1e-9))
    X = FirstStageSet(n, ">=", min(max(min_open, 0), n), [cover])
    return BlockDiagonalProblem(f, X, blocks, name)


def gen_cap(params: CAPParams | None = None, seed: int = 0) -> BlockDiagonalProblem:
    """Facilities and customers on the unit square; unit cost 10 x distance."""
    params = params or CAPParams()
    params.check()
    rng = np.random.default_rng(seed)
    n, m, N = params.facilities, params.customers, params.scenarios
    fac = rng.random((n, 2))
    cust = rng.random((m, 2))
    q = 10.0 * np.linalg.norm(fac[:, None, :] - cust[None, :, :], axis=2)
    demands = rng.uniform(5.0, 35.0, size=(N, m))
    s = rng.uniform(10.0, 160.0, size=n)
    s *= params.capacity_ratio * demands.sum(axis=1).mean() / s.sum()
    need = demands.sum(axis=1).max()
    if s.sum() < need:
        s *= need / s.sum() * (1 + 1e-9)
    f = rng.uniform(0.0, 90.0, size=n) + rng.uniform(100.0, 110.0, size=n) * np.sqrt(s)
    return cap_problem(f, s, q, demands, f"cap-s{seed}")


GENERATORS: dict[str, Callable] = {"snip": gen_snip, "lla": gen_lla, "cap": gen_cap}
PARAMS = {"snip": SnipParams, "lla": LLAParams, "cap": CAPParams}


def generate(family: str, seed: int = 0, params=None) -> BlockDiagonalProblem:
    family = family.lower()
    if family not in GENERATORS:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(GENERATORS)}")
    return GENERATORS[family](params or PARAMS[family](), seed)


# -- fixtures ---------------------------------------------------------------

@dataclass
class EpigraphFixture:
    problem: BlockDiagonalProblem
    Q: Callable[[np.ndarray], float]


def fractional_epigraph(a, b: float, c, d: float, n: int | None = None) -> EpigraphFixture:
    """Convex LP extension of (a^T x + b) / (c^T x + d) over [0,1]^n.

    Recourse variables are (y, z_1..z_n) with y = 1/(c^T x + d), z_i = x_i y.
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    n = a.size if n is None else n
    if a.size != n or c.size != n:
        raise ValueError("a and c must have length n")
    if np.any(a < 0) or np.any(c < 0) or d <= 0:
        raise ValueError("need a, c >= 0 and d > 0")
    m = 1 + n
    rows_T, rows_W, h, senses = [], [], [], []
    for i in range(n):
        wr = np.zeros(m)
        wr[0], wr[1 + i] = -1.0, 1.0
        rows_T.append(np.zeros(n)), rows_W.append(wr), h.append(0.0), senses.append("<=")
        wr = np.zeros(m)
        wr[1 + i] = c[i] + d
        tr = np.zeros(n)
        tr[i] = -1.0
        rows_T.append(tr), rows_W.append(wr), h.append(0.0), senses.append("<=")
        wr = np.zeros(m)
        wr[0], wr[1 + i] = d, -d
        tr = np.zeros(n)
        tr[i] = 1.0
        rows_T.append(tr), rows_W.append(wr), h.append(1.0), senses.append("<=")
    wr = np.concatenate([[d], c])
    rows_T.append(np.zeros(n)), rows_W.append(wr), h.append(1.0), senses.append("=")
    block = Block(0, np.concatenate([[b], a]), np.array(rows_T), np.array(rows_W), np.array(h), senses)
    problem = BlockDiagonalProblem(np.zeros(n), FirstStageSet(n), [block], "fractional")
    return EpigraphFixture(problem, lambda x: _recourse_value(problem, 0, x))


def max_affine_fixture(a, b: float, n: int | None = None, card: tuple[str, int] | None = None,
                       c=None) -> EpigraphFixture:
    """Q(x) = b + max_i a_i x_i (a >= 0, b >= 0) as the LP min t s.t. t - a_i x_i >= b."""
    a = np.asarray(a, dtype=float)
    n = a.size if n is None else n
    if np.any(a < 0) or b < 0:
        raise ValueError("max-affine fixture needs a >= 0 and b >= 0")
    T = -np.diag(a)
    W = np.ones((n, 1))
    block = Block(0, np.array([1.0]), T, W, np.full(n, float(b)), [">="] * n)
    X = FirstStageSet(n) if card is None else FirstStageSet(n, card[0], card[1])
    cost = np.zeros(n) if c is None else np.asarray(c, dtype=float)
    problem = BlockDiagonalProblem(cost, X, [block], "max-affine")
    return EpigraphFixture(problem, lambda x: float(b + np.max(a * np.asarray(x))))


def _recourse_value(problem: BlockDiagonalProblem, k: int, x) -> float:
    b = problem.blocks[k]
    x = np.asarray(x, dtype=float)
    lp = LinearProgram(b.d, b.W, b.senses, b.h - b.T @ x, np.zeros(b.m), np.full(b.m, INF))
    sol = SimplexLP(lp).solve()
    if sol.status is LPStatus.OPTIMAL:
        return sol.objective
    return INF if sol.status is LPStatus.INFEASIBLE else -INF


# -- BDZ1 format --------------------------------------------------------------

class InstanceFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _r(v: float) -> str:
    return repr(float(v))


def dumps(problem: BlockDiagonalProblem, include_name: bool = True) -> str:
    out = [f"BDZ1 {problem.n} {problem.N}"]
    if include_name and problem.name:
        out.append(f"name {problem.name}")
    for j, v in enumerate(problem.c):
        if v != 0.0:
            out.append(f"c {j} {_r(v)}")
    X = problem.X
    out.append("X")
    out.append("card none" if X.card_sense is None else f"card {X.card_sense} {int(X.card_rhs)}")
    for r, row in enumerate(X.rows):
        out.append(f"xrow {r} {row.sense} {_r(row.rhs)}")
        for j, v in row.coefs:
            out.append(f"xa {r} {j} {_r(v)}")
    for b in problem.blocks:
        out.append(f"BLOCK {b.index} {b.m} {b.rows}")
        for j, v in enumerate(b.d):
            if v != 0.0:
                out.append(f"d {j} {_r(v)}")
        for r in range(b.rows):
            out.append(f"row {r} {b.senses[r]} {_r(b.h[r])}")
        for r, j in zip(*np.nonzero(b.T)):
            out.append(f"T {r} {j} {_r(b.T[r, j])}")
        for r, j in zip(*np.nonzero(b.W)):
            out.append(f"W {r} {j} {_r(b.W[r, j])}")
    return "\n".join(out) + "\n"


def loads(text: str) -> BlockDiagonalProblem:
    lines = text.splitlines()
    recs = []
    for no, raw in enumerate(lines, 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            recs.append((no, body.split()))
    if not recs:
        raise InstanceFormatError(1, "empty instance file")
    last = len(lines)

    def num(no, tok, kind=float):
        try:
            return kind(tok)
        except ValueError:
            raise InstanceFormatError(no, f"expected {kind.__name__}, got {tok!r}") from None

    no, head = recs[0]
    if head[0] != "BDZ1" or len(head) != 3:
        raise InstanceFormatError(no, "header must be 'BDZ1 <n> <N>'")
    n, N = num(no, head[1], int), num(no, head[2], int)
    if n < 1 or N < 0:
        raise InstanceFormatError(no, "header sizes must be positive")
    name = ""
    c = np.zeros(n)
    card_sense, card_rhs = None, 0
    xrows: dict[int, list] = {}
    blocks = []
    cur = None
    section = "top"

    def index(no, tok, bound, what):
        v = num(no, tok, int)
        if not 0 <= v < bound:
            raise InstanceFormatError(no, f"{what} index {v} outside [0, {bound})")
        return v

    def close_block(no):
        if cur is None:
            return
        missing = [r for r in range(cur["rows"]) if cur["senses"][r] is None]
        if missing:
            raise InstanceFormatError(no, f"block {cur['k']}: missing row records {missing}")
        blocks.append(Block(cur["k"], cur["d"], cur["T"], cur["W"], cur["h"], cur["senses"]))

    for no, tok in recs[1:]:
        key = tok[0]
        if key == "name" and section == "top":
            name = " ".join(tok[1:])
        elif key == "c" and section == "top":
            if len(tok) != 3:
                raise InstanceFormatError(no, "expected 'c <j> <value>'")
            c[index(no, tok[1], n, "column")] = num(no, tok[2])
        elif key == "X" and section == "top":
            section = "X"
        elif key == "card" and section == "X":
            if tok[1:] == ["none"]:
                card_sense = None
            elif len(tok) == 3 and tok[1] in ("<=", ">=", "="):
                card_sense, card_rhs = tok[1], num(no, tok[2], int)
            else:
                raise InstanceFormatError(no, "expected 'card <sense> <rhs>' or 'card none'")
        elif key == "xrow" and section == "X":
            if len(tok) != 4 or tok[2] not in ("<=", ">=", "="):
                raise InstanceFormatError(no, "expected 'xrow <r> <sense> <rhs>'")
            r = num(no, tok[1], int)
            xrows[r] = [tok[2], num(no, tok[3]), {}]
        elif key == "xa" and section == "X":
            if len(tok) != 4:
                raise InstanceFormatError(no, "expected 'xa <r> <j> <value>'")
            r = num(no, tok[1], int)
            if r not in xrows:
                raise InstanceFormatError(no, f"coefficient for undeclared first-stage row {r}")
            xrows[r][2][index(no, tok[2], n, "column")] = num(no, tok[3])
        elif key == "BLOCK" and section in ("X", "block"):
            close_block(no)
            if len(tok) != 4:
                raise InstanceFormatError(no, "expected 'BLOCK <k> <m_k> <rows_k>'")
            k, m, rows = num(no, tok[1], int), num(no, tok[2], int), num(no, tok[3], int)
            if k != len(blocks):
                raise InstanceFormatError(no, f"expected block {len(blocks)}, found {k}")
            if m < 1 or rows < 0:
                raise InstanceFormatError(no, "block sizes must be positive")
            cur = {"k": k, "m": m, "rows": rows, "d": np.zeros(m), "T": np.zeros((rows, n)),
                   "W": np.zeros((rows, m)), "h": np.zeros(rows), "senses": [None] * rows}
            section = "block"
        elif section == "block" and key in ("d", "row", "T", "W"):
            if key == "d":
                if len(tok) != 3:
                    raise InstanceFormatError(no, "expected 'd <j> <value>'")
                cur["d"][index(no, tok[1], cur["m"], "recourse")] = num(no, tok[2])
            elif key == "row":
                if len(tok) != 4 or tok[2] not in ("<=", ">=", "="):
                    raise InstanceFormatError(no, "expected 'row <r> <sense> <rhs>'")
                r = index(no, tok[1], cur["rows"], "row")
                cur["senses"][r] = tok[2]
                cur["h"][r] = num(no, tok[3])
            else:
                if len(tok) != 4:
                    raise InstanceFormatError(no, f"expected '{key} <r> <j> <value>'")
                r = index(no, tok[1], cur["rows"], "row")
                width = n if key == "T" else cur["m"]
                cur[key][r, index(no, tok[2], width, "column")] = num(no, tok[3])
        else:
            raise InstanceFormatError(no, f"unexpected record {key!r} in section {section}")
    if section == "top":
        raise InstanceFormatError(last, "missing X section")
    close_block(last)
    if len(blocks) != N:
        raise InstanceFormatError(last, f"expected {N} blocks, found {len(blocks)} (truncated file?)")
    rows = []
    for r in sorted(xrows):
        sense, rhs, coefs = xrows[r]
        rows.append(LinearRow.make(coefs, sense, rhs))
    X = FirstStageSet(n, card_sense, card_rhs, rows)
    return BlockDiagonalProblem(c, X, blocks, name)


def write_instance(problem: BlockDiagonalProblem, path) -> None:
    Path(path).write_text(dumps(problem))


def read_instance(path) -> BlockDiagonalProblem:
    return loads(Path(path).read_text())


def fingerprint(problem: BlockDiagonalProblem) -> str:
    """64-bit hex digest of the canonical serialization (name excluded)."""
    return hashlib.blake2b(dumps(problem, include_name=False).encode(), digest_size=8).hexdigest()
