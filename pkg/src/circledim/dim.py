"""Dimension estimators (dyadic box counting and entropy dimension) and the
analytic oracles used to check them: the Moran equation and a transfer
operator pressure solver for conformal repellers on arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateFit, NotContracting, OverlapDetected
from .maps import Arc, CircleMap, arcs_disjoint, image_arc, log_deriv_bounds, wrap
from .walk import EmpiricalMeasure, WalkMeasure, lyapunov, rw_entropy, shannon, stationary_sample

DEFAULT_WINDOW = (4, 12)


@dataclass
class DimEstimate:
    value: float
    scale_range: tuple
    fit_residual: float
    method: str
    table: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "value": self.value,
            "scale_range": list(self.scale_range),
            "fit_residual": self.fit_residual,
            "method": self.method,
            "flags": self.flags,
        }


def _as_points_weights(points):
    if isinstance(points, EmpiricalMeasure):
        return points.points, points.weights
    p = wrap(np.asarray(points, float).ravel())
    return p, np.full(p.size, 1.0 / max(p.size, 1))


def _cells(p: np.ndarray, n: int) -> np.ndarray:
    k = np.floor(p * 2.0**n).astype(np.int64)
    return np.minimum(k, (1 << n) - 1)


def _fit(levels: np.ndarray, values: np.ndarray, method: str) -> DimEstimate:
    table = [(int(n), float(v)) for n, v in zip(levels, values)]
    if np.ptp(values) == 0:
        # a finite set: the slope is exactly zero on the window
        return DimEstimate(0.0, (int(levels[-1]), int(levels[0])), 0.0, method, table, {"constant": True})
    slope, icpt = np.polyfit(levels, values, 1)
    resid = float(np.sqrt(np.mean((values - slope * levels - icpt) ** 2)))
    return DimEstimate(float(slope), (int(levels[-1]), int(levels[0])), resid, method, table, {"constant": False})


def _window(level_lo, level_hi):
    if level_hi - level_lo < 1:
        raise DegenerateFit(f"window [{level_lo}, {level_hi}] has fewer than two levels")
    if level_hi > 52:
        raise DegenerateFit("levels beyond 52 exceed double precision")
    return np.arange(level_lo, level_hi + 1)


def box_dim(points, level_lo: int = DEFAULT_WINDOW[0], level_hi: int = DEFAULT_WINDOW[1]) -> DimEstimate:
    """Slope of log2(occupied dyadic cells) against the level."""
    p, _ = _as_points_weights(points)
    if p.size == 0:
        raise DegenerateFit("no points")
    levels = _window(level_lo, level_hi)
    counts = np.array([np.unique(_cells(p, n)).size for n in levels], float)
    return _fit(levels, np.log2(counts), "box")


def entropy_dim(nu, level_lo: int = DEFAULT_WINDOW[0], level_hi: int = DEFAULT_WINDOW[1]) -> DimEstimate:
    """Slope of the Shannon entropy of the dyadic partition against the level."""
    p, w = _as_points_weights(nu)
    if p.size == 0:
        raise DegenerateFit("no points")
    levels = _window(level_lo, level_hi)
    ent = []
    for n in levels:
        c = _cells(p, n)
        order = np.argsort(c, kind="stable")
        cs = c[order]
        starts = np.concatenate([[0], np.nonzero(np.diff(cs))[0] + 1])
        ent.append(shannon(np.add.reduceat(w[order], starts)))
    return _fit(levels, np.array(ent), "entropy")


def moran_dim(ratios: Sequence[float], tol: float = 1e-12) -> float:
    """Root s of sum r_i^s = 1."""
    r = np.asarray(ratios, float)
    if r.size == 0 or np.any((r <= 0) | (r >= 1)):
        raise ValueError("ratios must lie in (0, 1)")
    if r.size == 1:
        return 0.0
    lo, hi = 0.0, 1.0
    while np.sum(r**hi) > 1.0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.sum(r**mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# transfer operator


def _cheb_nodes(n: int) -> np.ndarray:
    k = np.arange(n)
    return 0.5 - 0.5 * np.cos(np.pi * (2 * k + 1) / (2 * n))


def _bary_matrix(nodes: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Rows interpolate node values at points t (first-kind Chebyshev weights)."""
    n = nodes.size
    k = np.arange(n)
    w = (-1.0) ** k * np.sin(np.pi * (2 * k + 1) / (2 * n))
    diff = t[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    diff = np.where(exact, 1.0, diff)
    c = w[None, :] / diff
    B = c / c.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if np.any(hit):
        B[hit] = exact[hit].astype(float)
    return B


def _spectral_radius(M: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    v = np.ones(M.shape[0])
    rho = 0.0
    for _ in range(max_iter):
        w = M @ v
        nrm = np.abs(w).max()
        if nrm == 0:
            return 0.0
        w /= nrm
        if abs(nrm - rho) <= tol * max(nrm, 1e-300) and np.abs(w - v).max() <= 1e-8:
            return float(nrm)
        v, rho = w, nrm
    return float(rho)


def pressure_dim(contractions: Sequence[CircleMap], arcs: Sequence[Arc], allowed=None, nodes: int = 64, tol: float = 1e-6) -> DimEstimate:
    """s with spectral radius one for the operator
    (L_s f)(x) = sum_i g_i'(x)^s f(g_i(x)).

    Map i sends the arcs j with ``allowed[j][i]`` into arc i; by default every
    map acts on every arc (an IFS).  A transition matrix handles Markov
    systems such as the cones of a Schottky group.
    """
    maps = list(contractions)
    arcs = list(arcs)
    m = len(maps)
    if len(arcs) != m:
        raise ValueError("need one arc per map")
    if not arcs_disjoint(arcs):
        raise OverlapDetected("arcs are not pairwise disjoint")
    allowed = np.ones((m, m), bool) if allowed is None else np.asarray(allowed, bool)
    t = _cheb_nodes(nodes)
    starts = np.array([a.start for a in arcs])
    lens = np.array([a.length for a in arcs])
    pts = starts[:, None] + lens[:, None] * t[None, :]
    N = m * nodes
    blocks = []  # (rows, cols, interpolation block, log2 derivative)
    for j in range(m):
        for i in range(m):
            if not allowed[j, i]:
                continue
            g = maps[i]
            a, L = image_arc(g, arcs[j].start, arcs[j].length)
            off = float(wrap(a - arcs[i].start))
            if not (off > 0 and off + float(L) < arcs[i].length):
                raise NotContracting(f"map {i} does not send arc {j} strictly inside arc {i}")
            _, hi = log_deriv_bounds(g, arcs[j], 256)
            if hi >= 0:
                raise NotContracting(f"map {i} is not a contraction on arc {j}")
            y = wrap(g._eval(pts[j]) - arcs[i].start) / arcs[i].length
            blocks.append((j, i, _bary_matrix(t, y), np.log2(g._d1(pts[j]))))

    def radius(s: float) -> float:
        M = np.zeros((N, N))
        for j, i, B, ld in blocks:
            M[j * nodes:(j + 1) * nodes, i * nodes:(i + 1) * nodes] += np.exp2(s * ld)[:, None] * B
        return _spectral_radius(M)

    lo, hi = 0.0, 1.0
    r_lo = radius(lo)
    if radius(hi) > 1.0:
        raise NotContracting("pressure stays positive at s = 1")
    if r_lo <= 1.0 + 1e-12:
        return DimEstimate(0.0, (nodes, nodes), abs(math.log2(max(r_lo, 1e-300))), "pressure")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if radius(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return DimEstimate(s, (nodes, nodes), abs(math.log2(radius(s))), "pressure")


# ---------------------------------------------------------------------------
# dimension formula


@dataclass
class DimFormulaRecord:
    h_rw: float
    lyap: float
    measured_dim: float
    lyap_stderr: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def predicted_dim(self) -> float:
        return self.h_rw / abs(self.lyap) if self.lyap != 0 else math.inf

    @property
    def gap(self) -> float:
        return abs(self.predicted_dim - self.measured_dim)

    def to_json(self):
        return {
            "h_rw": self.h_rw,
            "lyap": self.lyap,
            "lyap_stderr": self.lyap_stderr,
            "predicted_dim": self.predicted_dim,
            "measured_dim": self.measured_dim,
            "gap": self.gap,
            "furstenberg_entropy": self.measured_dim * abs(self.lyap),
            **self.details,
        }


def dim_formula_check(mu: WalkMeasure, x0: float = 0.5, n: int = 4000, trials: int = 16, burn: int = 200, count: int = 200_000, chains: int = 64, window=(6, 16), seed: int = 0) -> DimFormulaRecord:
    """Compare h_RW / |lambda| with the entropy dimension of a stationary sample."""
    if not mu.free:
        raise ValueError("the dimension formula check needs a walk declared free")
    h, _ = rw_entropy(mu, 1)
    lam, err = lyapunov(mu, x0, n, trials, seed)
    nu = stationary_sample(mu, burn, count, chains, seed + 1)
    est = entropy_dim(nu, *window)
    return DimFormulaRecord(h, lam, est.value, err, {"window": list(window), "fit_residual": est.fit_residual, "stationary_residual": nu.info["residual"]})
