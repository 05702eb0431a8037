"""Dynamical critical exponents by counting group elements with controlled
co-norm, and Poincare-type series at a point.

Derivative lower bounds along a word come from summing certified per-letter
enclosures over the exact image arcs, so every count is an undercount of the
true set and the fitted exponent a certified-style lower estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, DegenerateFit, NoBracket
from .maps import LN2, Arc, arc_log_deriv_bounds, wrap
from .words import Alphabet, ball_size, level_expand

_CHUNK = 400_000


@dataclass
class ArcLevel:
    """One BFS level of reduced words with per-arc state arrays of shape (nodes, arcs)."""

    level: int
    heads: np.ndarray
    parents: np.ndarray
    start: np.ndarray
    length: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    kappa: np.ndarray | None = None


def arc_levels(alphabet: Alphabet, L: int, starts, lengths, grid: int = 8, track_kappa: bool = False, cap: int | None = None) -> Iterator[ArcLevel]:
    """Propagate arcs along every reduced word of length <= L.

    Letters are prepended, so a child a.w maps an arc I to a(w(I)).  ``lo`` and
    ``hi`` bound log2 (a.w)' on I; ``kappa`` bounds the Lipschitz constant of
    log2 (a.w)' on I.
    """
    if cap is not None and ball_size(alphabet, L) > cap:
        raise BudgetExceeded(f"ball of radius {L} has {ball_size(alphabet, L)} words, cap is {cap}")
    starts = np.atleast_1d(np.asarray(starts, float))
    lengths = np.broadcast_to(np.asarray(lengths, float), starts.shape).copy()
    k = starts.size
    cur = ArcLevel(
        0,
        np.zeros(1, np.int64),
        np.full(1, -1),
        starts[None, :].copy(),
        lengths[None, :].copy(),
        np.zeros((1, k)),
        np.zeros((1, k)),
        np.zeros((1, k)) if track_kappa else None,
    )
    yield cur
    for level in range(1, L + 1):
        parents, heads = level_expand(alphabet, cur.heads)
        n = parents.size
        nxt = ArcLevel(level, heads, parents, np.empty((n, k)), np.empty((n, k)), np.empty((n, k)), np.empty((n, k)), np.empty((n, k)) if track_kappa else None)
        for a in alphabet.letters:
            rows = np.nonzero(heads == a)[0]
            if rows.size == 0:
                continue
            m = alphabet.map(a)
            for c0 in range(0, rows.size, max(1, _CHUNK // k)):
                r = rows[c0:c0 + max(1, _CHUNK // k)]
                p = parents[r]
                s = cur.start[p]
                ln = cur.length[p]
                lo, hi = arc_log_deriv_bounds(m, s, ln, grid)
                a0 = wrap(m._eval(s))
                a1 = m._eval(s + ln)
                newlen = np.where(ln >= 1.0, 1.0, wrap(a1 - a0))
                nxt.start[r] = a0
                nxt.length[r] = newlen
                nxt.lo[r] = cur.lo[p] + lo
                nxt.hi[r] = cur.hi[p] + hi
                if track_kappa:
                    lip = m.logderiv_lipschitz(s, ln)
                    nxt.kappa[r] = cur.kappa[p] + lip * np.exp2(cur.hi[p])
        yield nxt
        cur = nxt


# ---------------------------------------------------------------------------
# counting


@dataclass
class CountTable:
    """counts[n] = #{g in the ball : the co-norm condition holds at level n}.

    ``by_length[l, n]`` splits the same counts by word length, which gives the
    truncation sensitivity for free.
    """

    base_points: list
    eps: float
    max_len: int
    counts: np.ndarray
    by_length: np.ndarray
    complete_up_to: int
    distortion_cap: float | None = None
    mode: str = "local"

    def counts_up_to_length(self, L: int) -> np.ndarray:
        return self.by_length[: L + 1].sum(axis=0)

    def to_rows(self):
        return [(int(n), int(c)) for n, c in enumerate(self.counts)]

    def to_json(self):
        return {
            "base_points": [float(x) for x in self.base_points],
            "eps": self.eps,
            "max_len": self.max_len,
            "counts": [int(c) for c in self.counts],
            "complete_up_to": self.complete_up_to,
            "distortion_cap": self.distortion_cap,
            "mode": self.mode,
        }


def _levels_to_table(levels_n: list[np.ndarray], n_max: int = 2048, **meta) -> CountTable:
    finite = [v[np.isfinite(v) & (v <= n_max)] for v in levels_n]
    top = int(max((v.max() for v in finite if v.size), default=0))
    top = max(top, 0)
    by_len = np.zeros((len(levels_n), top + 1), dtype=np.int64)
    for ell, v in enumerate(finite):
        v = np.clip(v, 0, top).astype(np.int64)
        by_len[ell] = np.cumsum(np.bincount(v, minlength=top + 1))
    last = levels_n[-1]
    complete = int(min(last.min(), n_max + 1)) - 1 if last.size else top
    complete = max(0, min(complete, top))
    return CountTable(counts=by_len.sum(axis=0), by_length=by_len, complete_up_to=complete, **meta)


def count_by_conorm(alphabet: Alphabet, base_points: Sequence[float], eps: float, L: int, cap: int = 5_000_000, distortion_cap: float | None = None, grid: int = 8, n_max: int = 2048) -> CountTable:
    """Local co-norm counts: g counts at level n when inf over B(x, eps) of
    log2 g' is certified >= -n for some base point x (and, when
    ``distortion_cap`` is set, the Lipschitz norm of log2 g' there is <= cap)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L < 1:
        raise ValueError("L must be at least 1")
    pts = np.asarray(base_points, float)
    starts = wrap(pts - eps)
    per_level = []
    for lev in arc_levels(alphabet, L, starts, min(2 * eps, 1.0), grid, track_kappa=distortion_cap is not None, cap=cap):
        need = -lev.lo
        if distortion_cap is not None:
            need = np.where(lev.kappa <= distortion_cap, need, np.inf)
        per_level.append(np.ceil(need.min(axis=1) - 1e-12))
    return _levels_to_table(per_level, n_max, base_points=list(pts), eps=eps, max_len=L, distortion_cap=distortion_cap, mode="local")


def count_global_conorm(alphabet: Alphabet, L: int, cells: int = 256, cap: int = 5_000_000, grid: int = 8, n_max: int = 2048) -> CountTable:
    """Global co-norm counts: g counts at level n when g' >= 2^-n on all of S^1."""
    starts = np.arange(cells) / cells
    per_level = []
    for lev in arc_levels(alphabet, L, starts, 1.0 / cells, grid, cap=cap):
        per_level.append(np.ceil(-lev.lo.min(axis=1) - 1e-12))
    return _levels_to_table(per_level, n_max, base_points=[], eps=0.0, max_len=L, mode="global")


def delta_fit(table_or_counts, n_window: tuple[int, int] | None = None):
    """Least-squares slope of log2 counts(n) over the window.

    Accepts a CountTable or a plain counts sequence.  Diagnostics hold the
    slopes over both half-windows, the residual and a ``subexponential`` flag.
    """
    if isinstance(table_or_counts, CountTable):
        counts = np.asarray(table_or_counts.counts, float)
        if n_window is None:
            hi = table_or_counts.complete_up_to
            n_window = (max(1, hi // 3), hi)
    else:
        counts = np.asarray(table_or_counts, float)
        if n_window is None:
            n_window = (1, len(counts) - 1)
    lo, hi = int(n_window[0]), int(n_window[1])
    hi = min(hi, len(counts) - 1)
    if hi - lo < 2:
        raise DegenerateFit(f"window {n_window} is too short")
    n = np.arange(lo, hi + 1, dtype=float)
    c = counts[lo:hi + 1]
    if np.any(c <= 0):
        raise DegenerateFit("counts vanish inside the window")
    y = np.log2(c)
    if np.ptp(y) == 0:
        raise DegenerateFit("counts are constant on the window")
    slope, icpt = np.polyfit(n, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * n + icpt)) ** 2)))
    mid = (lo + hi) // 2
    halves = []
    for a, b in ((lo, mid), (mid, hi)):
        if b - a >= 1:
            halves.append(float(np.polyfit(np.arange(a, b + 1), np.log2(counts[a:b + 1]), 1)[0]))
    # a power law fits log counts linearly in log n
    ln = np.log2(n + 1.0)
    pw = np.polyfit(ln, y, 1)
    pw_resid = float(np.sqrt(np.mean((y - np.polyval(pw, ln)) ** 2)))
    diag = {
        "window": [lo, hi],
        "residual": resid,
        "half_window_slopes": halves,
        "power_law_exponent": float(pw[0]),
        "power_law_residual": pw_resid,
        "subexponential": bool(pw_resid < resid and slope < 0.1),
    }
    return float(slope), diag


def delta_ladder(alphabet: Alphabet, base_points, L: int, eps_values=(0.05, 0.02, 0.01), **kw):
    """delta estimate per eps, plus the L-2 truncation sensitivity."""
    rows = []
    for eps in eps_values:
        t = count_by_conorm(alphabet, base_points, eps, L, **kw)
        d, diag = delta_fit(t)
        short = t.counts_up_to_length(max(1, L - 2))
        try:
            d2, _ = delta_fit(short, tuple(diag["window"]))
        except DegenerateFit:
            d2 = float("nan")
        rows.append({"eps": eps, "delta": d, "delta_L_minus_2": d2, **diag})
    return rows


# ---------------------------------------------------------------------------
# Poincare series


@dataclass
class SeriesTable:
    """Partial sums of sum_{|g| <= l} g'(x)^s for l = 0..max_len.

    ``sphere_logs[l]`` keeps the log2 g'(x) of the sphere of radius l, so the
    series can be re-evaluated at any s.
    """

    x: float
    s_values: list
    partial_sums: dict
    max_len: int
    sphere_logs: list = field(repr=False, default_factory=list)

    def sphere_sums(self, s: float) -> np.ndarray:
        return np.array([np.exp2(s * v).sum() for v in self.sphere_logs])

    def to_rows(self):
        return [(ell, s, float(v)) for s in self.s_values for ell, v in enumerate(self.partial_sums[s])]


def poincare_partial(alphabet: Alphabet, x: float, s_values: Sequence[float], L: int, cap: int = 5_000_000) -> SeriesTable:
    if ball_size(alphabet, L) > cap:
        raise BudgetExceeded(f"ball of radius {L} exceeds the cap of {cap}")
    logs = [np.zeros(1)]
    pts = np.array([float(x)])
    heads = np.zeros(1, np.int64)
    for _ in range(L):
        parents, new = level_expand(alphabet, heads)
        npts = np.empty(parents.size)
        nlog = np.empty(parents.size)
        for a in alphabet.letters:
            r = np.nonzero(new == a)[0]
            if r.size == 0:
                continue
            m = alphabet.map(a)
            y = pts[parents[r]]
            nlog[r] = logs[-1][parents[r]] + np.log2(m._d1(y))
            npts[r] = wrap(m._eval(y))
        pts, heads = npts, new
        logs.append(nlog)
    s_values = [float(s) for s in s_values]
    table = SeriesTable(float(x), s_values, {}, L, logs)
    for s in s_values:
        table.partial_sums[s] = np.cumsum(table.sphere_sums(s))
    return table


def _tail_ratio(table: SeriesTable, s: float) -> float:
    """Growth of the sum over the last quarter of spheres against the block
    three quarters as long just before it; >= 1 means divergence."""
    L = table.max_len
    sums = table.sphere_sums(s)
    a = int(round(0.75 * L))
    b = int(round(0.75 * a))
    last = sums[a + 1:L + 1].sum()
    prev = sums[b + 1:a + 1].sum()
    if prev == 0:
        return 0.0
    return float(last / prev)


def diverges(table: SeriesTable, s: float) -> bool:
    return _tail_ratio(table, s) >= 1.0


def convergence_exponent(table: SeriesTable, tol: float = 0.005):
    """Bisect between diverging and converging s; returns (midpoint, width)."""
    ss = sorted(table.s_values)
    if len(ss) < 2:
        raise NoBracket("need at least two s values")
    flags = [diverges(table, s) for s in ss]
    if all(flags) or not any(flags):
        raise NoBracket("every s behaves alike; widen the s range")
    lo = max(s for s, f in zip(ss, flags) if f)
    above = [s for s, f in zip(ss, flags) if not f and s > lo]
    if not above:
        raise NoBracket("diverging values lie above every converging value")
    hi = min(above)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if diverges(table, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), hi - lo
