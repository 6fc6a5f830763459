"""Support selection: greedy over the mixing-set surrogate, the cutting-plane
scoring rule, and the adaptive-K controller."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Cut
from .sparse import NuCache, SupportSet, singleton_values

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingletonProfile:
    """nu_{i}(0), nu_{i}(1) per candidate after complementing.

    ``complemented[t]`` is set when x_i was replaced by 1 - x_i because
    nu_{i}(1) < nu_{i}(0); the stored pair is already swapped.
    """

    indices: tuple[int, ...]
    nu0: tuple[float, ...]
    nu1: tuple[float, ...]
    complemented: tuple[bool, ...]

    @classmethod
    def from_values(cls, indices, pairs) -> "SingletonProfile":
        nu0, nu1, comp = [], [], []
        for v0, v1 in pairs:
            flip = v1 < v0
            nu0.append(float(v1 if flip else v0))
            nu1.append(float(v0 if flip else v1))
            comp.append(bool(flip))
        return cls(tuple(int(i) for i in indices), tuple(nu0), tuple(nu1), tuple(comp))

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.nu0, self.nu1))


def singleton_profile(ws, k: int, candidates: Sequence[int], cache: NuCache | None = None) -> SingletonProfile:
    """Two LPs per candidate; indices with an infeasible fixing are dropped.

    An infeasible fixing means x_i is constant over R(X), so it can never be
    fractional and carries no information for the surrogate.
    """
    if len(candidates) == 0:
        raise ValueError("candidate list is empty")
    keep, pairs = [], []
    for i in candidates:
        v0, v1 = singleton_values(ws, k, int(i), cache)
        if np.isfinite(v0) and np.isfinite(v1):
            keep.append(int(i))
            pairs.append((v0, v1))
    return SingletonProfile.from_values(keep, pairs)


@dataclass(frozen=True)
class Surrogate:
    """Q~(x) = max_i a_i x~_i + b with a sorted ascending (x~ complemented x)."""

    order: tuple[int, ...]
    a: tuple[float, ...]
    b: float
    complemented: dict = field(default_factory=dict)

    def position(self) -> dict[int, int]:
        return {i: t for t, i in enumerate(self.order)}

    def coef(self) -> dict[int, float]:
        return dict(zip(self.order, self.a))

    def transform(self, x_hat) -> np.ndarray:
        """x_hat with complemented coordinates flipped."""
        x = np.array(x_hat, dtype=float)
        for i, flip in self.complemented.items():
            if flip:
                x[i] = 1.0 - x[i]
        return x

    def value(self, x) -> float:
        """Q~ at an (uncomplemented) point."""
        xt = self.transform(x)
        return self.b + max((a * xt[i] for i, a in zip(self.order, self.a)), default=0.0)


def build_surrogate(profile: SingletonProfile) -> Surrogate:
    if not profile.indices:
        return Surrogate((), (), 0.0, {})
    lb = max(profile.nu0)
    a = [max(v1, lb) - lb for v1 in profile.nu1]
    order = sorted(range(len(a)), key=lambda t: (a[t], t))  # stable on ties
    return Surrogate(tuple(profile.indices[t] for t in order), tuple(a[t] for t in order), float(lb),
                     {i: c for i, c in zip(profile.indices, profile.complemented)})


def mixing_envelope(a: Sequence[float], x: Sequence[float], b: float = 0.0) -> float:
    """Mixing-set separation as printed: a ascending, x in [0,1], same order.

    Scans from the last index down, links each new running maximum of x to the
    previous one through sigma, then sums the chain from i_max to d.
    """
    d = len(a)
    if d == 0:
        return float(b)
    x_max, i_max = -np.inf, d - 1
    sigma = [None] * d
    for i in range(d - 1, -1, -1):
        if x[i] > x_max:
            sigma[i] = i_max
            x_max, i_max = x[i], i
    g = b + a[i_max] * x[i_max]
    k = i_max
    while k != d - 1:
        s = sigma[k]
        g += (a[s] - a[k]) * x[s]
        k = s
    return float(g)


def mixing_violation(x_hat, support: Sequence[int], surrogate: Surrogate) -> float:
    """Envelope of Q~ restricted to ``support`` at x_hat (uncomplemented x_hat)."""
    pos = surrogate.position()
    members = sorted(support, key=lambda i: pos[i])
    xt = surrogate.transform(x_hat)
    a = [surrogate.a[pos[i]] for i in members]
    return mixing_envelope(a, [xt[i] for i in members], surrogate.b)


def greedy_order(x_hat, K: int, surrogate: Surrogate, candidates: Sequence[int]) -> list[int]:
    """Indices in the order greedy picks them; exactly min(K, |candidates|)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    pool = sorted(set(int(i) for i in candidates) & set(surrogate.order))
    chosen: list[int] = []
    while len(chosen) < min(K, len(pool)):
        best, best_i = -np.inf, None
        for i in pool:
            if i in chosen:
                continue
            val = mixing_violation(x_hat, chosen + [i], surrogate)
            if val > best + 1e-12:
                best, best_i = val, i
        chosen.append(best_i)
    return chosen


def greedy_support(x_hat, K: int, surrogate: Surrogate, candidates: Sequence[int]) -> SupportSet | None:
    picks = greedy_order(x_hat, K, surrogate, candidates)
    return SupportSet.of(picks) if picks else None


def cutpl_scores(coefs: np.ndarray, x_hat) -> np.ndarray:
    a = np.asarray(coefs, dtype=float)
    return a * np.asarray(x_hat, dtype=float) + np.maximum(-a, 0.0)


def cutpl_order(x_hat, K: int, cuts: Sequence[Cut], n: int) -> list[int]:
    """Walk cuts (already in tightness order) and take positive-score indices."""
    if K < 1:
        raise ValueError("K must be at least 1")
    chosen: list[int] = []
    for cut in cuts:
        scores = cutpl_scores(cut.dense(n), x_hat)
        ranked = sorted((j for j in range(n) if scores[j] > 1e-12 and j not in chosen),
                        key=lambda j: (-scores[j], j))
        for j in ranked:
            if len(chosen) == K:
                return chosen
            chosen.append(j)
        if len(chosen) == K:
            return chosen
    if len(chosen) < K:
        log.debug("cut pool exhausted with |I|=%d < K=%d", len(chosen), K)
    return chosen


def cutpl_support(x_hat, theta_hat: float, K: int, pool_cuts: Sequence[Cut], n: int) -> SupportSet | None:
    """Cutting-plane rule; ``pool_cuts`` must be ordered by tightness at x_hat."""
    if not pool_cuts:
        raise ValueError("cut pool is empty")
    picks = cutpl_order(x_hat, K, pool_cuts, n)
    return SupportSet.of(picks) if picks else None


def prop4_violation(a, b: float, x_hat, theta_hat: float, support: Sequence[int]) -> float:
    """Best violation of a support-restricted inequality valid for {theta >= a^T x + b, x binary}."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x_hat, dtype=float)
    neg = np.maximum(-a, 0.0)
    idx = list(support)
    return float(-neg.sum() + np.sum(a[idx] * x[idx] + neg[idx]) + b - theta_hat)


# -- adaptive K -------------------------------------------------------------

@dataclass
class AdaptiveK:
    """Grows K when the recent gain at the current K stalls.

    ``history`` holds the cumulative gap closed (percent) recorded after each
    master solve at the current K, starting with the value when K was set.
    ``baseline`` is the gap closed when the sparse phase began.
    """

    K: int = 4
    k_max: int = 10
    window: int = 5
    fraction: float = 0.01
    baseline: float = 0.0
    history: list[float] = field(default_factory=list)

    def record(self, gap_closed: float) -> tuple[int, bool]:
        self.history.append(float(gap_closed))
        return adapt_k(self, self.history)

    def bump(self, last: float | None = None) -> bool:
        """Increase K unconditionally (if below the cap); restart the window."""
        if self.K >= self.k_max:
            return False
        self.K += 1
        if last is None:
            last = self.history[-1] if self.history else self.baseline
        self.history = [float(last)]
        return True


def adapt_k(state: AdaptiveK, history: Sequence[float]) -> tuple[int, bool]:
    """(K, restart) after the latest master solve at the current K."""
    if state.K >= state.k_max or len(history) < state.window + 1:
        return state.K, False
    recent = history[-1] - history[-1 - state.window]
    total = history[-1] - state.baseline
    stalled = recent < state.fraction * total if total > 0 else recent <= 0
    if not stalled:
        return state.K, False
    state.bump(history[-1])
    return state.K, True
