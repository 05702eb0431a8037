"""Random walks driven by a finitely supported measure on circle maps.

Monte Carlo estimates of Lyapunov exponents, stationary-measure samples,
random-walk entropy and the (d, r) structure of the random boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .errors import BudgetExceeded, Unreliable
from .maps import circle_dist, signed_offset, wrap
from .words import Alphabet, Word


@dataclass
class WalkMeasure:
    """Probability vector over ``alphabet.letters`` (forward letters only in semigroup mode).

    ``free`` declares that distinct words give distinct maps, which makes the
    random-walk entropy exactly the Shannon entropy of the weights.
    """

    alphabet: Alphabet
    weights: np.ndarray
    free: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, float)
        if w.shape != (len(self.alphabet.letters),):
            raise ValueError(f"need {len(self.alphabet.letters)} weights, got {w.shape}")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        self.weights = w

    @classmethod
    def uniform(cls, alphabet: Alphabet, free: bool = False) -> "WalkMeasure":
        n = len(alphabet.letters)
        return cls(alphabet, np.full(n, 1.0 / n), free)

    @property
    def letters(self) -> list[int]:
        return self.alphabet.letters

    def maps(self):
        return [self.alphabet.map(a) for a in self.letters]

    def inverse_system(self) -> "WalkMeasure":
        """Walk on the inverse maps with the same weights (semigroup alphabets)."""
        gens = [(f"{n}^-1", m.inverse()) for n, m in zip(self.alphabet.names, self.alphabet.maps)]
        if self.alphabet.group_mode:
            return self
        return WalkMeasure(Alphabet(gens, group_mode=False), self.weights, self.free)

    def conjugated(self, by) -> "WalkMeasure":
        from .maps import Conjugate

        gens = [(n, Conjugate(m, by)) for n, m in zip(self.alphabet.names, self.alphabet.maps)]
        return WalkMeasure(Alphabet(gens, self.alphabet.group_mode), self.weights, self.free)


@dataclass
class EmpiricalMeasure:
    points: np.ndarray
    weights: np.ndarray
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        p = wrap(np.asarray(self.points, float).ravel())
        w = np.asarray(self.weights, float).ravel()
        if p.shape != w.shape or p.size == 0:
            raise ValueError("points and weights must be non-empty and of equal length")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        order = np.argsort(p, kind="stable")
        self.points = p[order]
        self.weights = w[order] / w.sum()

    @classmethod
    def uniform(cls, points, **info) -> "EmpiricalMeasure":
        points = np.asarray(points, float).ravel()
        return cls(points, np.ones(points.size), dict(info))

    def push(self, m) -> "EmpiricalMeasure":
        return EmpiricalMeasure(m.eval(self.points), self.weights)

    def to_json(self):
        return {"points": self.points.tolist(), "weights": self.weights.tolist(), "info": self.info}


def wasserstein_circle(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """W1 on R/Z: min over c of the integral of |F_a - F_b - c|."""
    pts = np.concatenate([a.points, b.points])
    wts = np.concatenate([a.weights, -b.weights])
    order = np.argsort(pts, kind="stable")
    pts = pts[order]
    cum = np.cumsum(wts[order])
    lengths = np.diff(np.concatenate([pts, [pts[0] + 1.0]]))
    # the cumulative difference on [pts[i], pts[i+1]) is cum[i]; shift c is a weighted median
    srt = np.argsort(cum, kind="stable")
    c_sorted = cum[srt]
    l_sorted = lengths[srt]
    half = 0.5 * l_sorted.sum()
    k = int(np.searchsorted(np.cumsum(l_sorted), half))
    c = c_sorted[min(k, len(c_sorted) - 1)]
    return float(np.sum(np.abs(cum - c) * lengths))


def convolve(mu: WalkMeasure, nu: EmpiricalMeasure) -> EmpiricalMeasure:
    """One-step push mu * nu as an atomic measure."""
    pts = [m.eval(nu.points) for m in mu.maps()]
    wts = [p * nu.weights for p in mu.weights]
    return EmpiricalMeasure(np.concatenate(pts), np.concatenate(wts))


# ---------------------------------------------------------------------------
# sampling


def _letter_indices(mu: WalkMeasure, n: int, gen: np.random.Generator) -> np.ndarray:
    return gen.choice(len(mu.weights), size=n, p=mu.weights)


def sample_word(mu: WalkMeasure, n: int, seed: int) -> Word:
    """f_{n-1} ... f_0 with i.i.d. letters; no reduction is applied."""
    if n < 0:
        raise ValueError("n must be non-negative")
    idx = _letter_indices(mu, n, rng.stream(seed))
    letters = np.asarray(mu.letters)[idx]
    return Word(tuple(int(a) for a in letters[::-1]))


def _apply(maps, idx: np.ndarray, x: np.ndarray, with_log: bool = False):
    """Apply maps[idx[j]] to x[j] for every j."""
    out = np.empty_like(x)
    logd = np.empty_like(x) if with_log else None
    for k, m in enumerate(maps):
        sel = idx == k
        if not np.any(sel):
            continue
        xs = x[sel]
        if with_log:
            logd[sel] = np.log2(m._d1(xs))
        out[sel] = wrap(m._eval(xs))
    return out, logd


def lyapunov(mu: WalkMeasure, x0: float, n: int, trials: int, seed: int):
    """(estimate, stderr) of the base-2 Lyapunov exponent.

    Each trial burns in n // 2 steps from x0, then averages log2 f'(x) over n
    steps.  Trial i draws from stream seed ^ i.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be positive")
    burn = n // 2
    maps = mu.maps()
    idx = np.stack([_letter_indices(mu, burn + n, rng.stream(seed, i)) for i in range(trials)])
    x = np.full(trials, float(x0))
    acc = np.zeros(trials)
    for t in range(burn + n):
        x, logd = _apply(maps, idx[:, t], x, with_log=t >= burn)
        if t >= burn:
            acc += logd
    per_trial = acc / n
    est = float(per_trial.mean())
    err = float(per_trial.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return est, err


def stationary_sample(mu: WalkMeasure, burn: int, count: int, chains: int, seed: int, residual_threshold: float = 0.02) -> EmpiricalMeasure:
    """Pooled post-burn-in orbit points of ``chains`` equispaced starting points.

    ``info`` carries the invariance residual W1(nu, mu * nu) and a
    ``converged`` flag comparing it with ``residual_threshold``.
    """
    if burn < 1 or chains < 1 or count < 1:
        raise ValueError("burn, count and chains must be positive")
    per = -(-count // chains)
    maps = mu.maps()
    idx = np.stack([_letter_indices(mu, burn + per, rng.stream(seed, i)) for i in range(chains)])
    x = (np.arange(chains) + 0.5) / chains
    pool = np.empty((per, chains))
    for t in range(burn + per):
        x, _ = _apply(maps, idx[:, t], x)
        if t >= burn:
            pool[t - burn] = x
    pts = pool.ravel()[:count]
    nu = EmpiricalMeasure.uniform(pts)
    probe = nu if count <= 20_000 else EmpiricalMeasure.uniform(pts[:: -(-count // 20_000)])
    resid = wasserstein_circle(probe, convolve(mu, probe))
    nu.info.update({"burn": burn, "chains": chains, "residual": resid, "converged": bool(resid <= residual_threshold)})
    return nu


# ---------------------------------------------------------------------------
# structure constants


def cluster(points: np.ndarray, eps: float):
    """Split circle points at gaps larger than ``eps``.

    Returns (centers, diameters, gaps between consecutive clusters, labels).
    """
    p = np.sort(wrap(np.asarray(points, float)))
    n = p.size
    gaps = np.diff(np.concatenate([p, [p[0] + 1.0]]))
    cuts = np.nonzero(gaps > eps)[0]
    if cuts.size == 0:
        return np.array([float(p[0])]), np.array([1.0]), np.array([0.0]), np.zeros(n, int)
    # clusters run from cut+1 to the next cut (cyclically)
    centers, diams, labels = [], [], np.empty(n, int)
    starts = (cuts + 1) % n
    ends = np.roll(cuts, -1)
    for j, (s, e) in enumerate(zip(starts, ends)):
        members = np.arange(s, e + 1) if e >= s else np.concatenate([np.arange(s, n), np.arange(0, e + 1)])
        labels[members] = j
        span = float(wrap(p[e] - p[s]))
        diams.append(span)
        centers.append(float(wrap(p[s] + span / 2)))
    between = gaps[np.roll(cuts, -1)]
    return np.array(centers), np.array(diams), between, labels


@dataclass
class StructureReport:
    dr: int
    d: int
    r: int
    cluster_centers: list
    lyapunov_per_component: list
    diagnostics: dict
    reliable: bool = True

    def to_json(self):
        return {
            "dr": self.dr,
            "d": self.d,
            "r": self.r,
            "cluster_centers": list(self.cluster_centers),
            "lyapunov_per_component": list(self.lyapunov_per_component),
            "diagnostics": self.diagnostics,
            "reliable": self.reliable,
        }


def _forward_image(mu: WalkMeasure, n: int, seed: int, pts: np.ndarray) -> np.ndarray:
    maps = mu.maps()
    idx = _letter_indices(mu, n, rng.stream(seed))
    x = pts.copy()
    for t in range(n):
        m = maps[idx[t]]
        x = wrap(m._eval(x))
    return x


def _orbit_support(mu: WalkMeasure, start: float, n: int, seed: int, chains: int = 8) -> np.ndarray:
    maps = mu.maps()
    idx = np.stack([_letter_indices(mu, 2 * n, rng.stream(seed, i)) for i in range(chains)])
    x = np.full(chains, float(start))
    keep = []
    for t in range(2 * n):
        x, _ = _apply(maps, idx[:, t], x)
        if t >= n // 2:
            keep.append(x.copy())
    return np.sort(np.concatenate(keep))


def _supports_overlap(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    pos = np.searchsorted(b, a)
    left = b[(pos - 1) % b.size]
    right = b[pos % b.size]
    d = np.minimum(circle_dist(a, left), circle_dist(a, right))
    return bool(d.min() <= tol)


def detect_structure(mu: WalkMeasure, n: int, grid_size: int = 64, cluster_eps: float = 1e-3, seeds: Sequence[int] | int = 20, lyap_steps: int = 2000) -> StructureReport:
    """(d, r) from clustering of f_w^n(grid) over several seeds.

    dr is the majority cluster count; clusters are merged into minimal-set
    components when forward orbits started at their centers overlap within
    ``cluster_eps``.
    """
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    grid = (np.arange(grid_size) + 0.5) / grid_size
    per_seed = []
    for s in seeds:
        img = _forward_image(mu, n, s, grid)
        centers, diams, gaps, _ = cluster(img, cluster_eps)
        ok = len(centers) > 1 and gaps.min() >= 10 * diams.max() or len(centers) == 1 and diams[0] < cluster_eps
        per_seed.append((len(centers), bool(ok), centers, diams, gaps))
    failed = sum(not ok for _, ok, *_ in per_seed)
    counts = [c for c, ok, *_ in per_seed if ok] or [c for c, *_ in per_seed]
    values, freq = np.unique(counts, return_counts=True)
    dr = int(values[np.argmax(freq)])
    votes = {int(v): int(f) for v, f in zip(values, freq)}

    # representative seed for the centers
    rep = next(p for p in per_seed if p[0] == dr and p[1]) if any(p[0] == dr and p[1] for p in per_seed) else per_seed[0]
    centers = rep[2]

    supports = [_orbit_support(mu, c, n, 7919 * (j + 1) + int(seeds[0])) for j, c in enumerate(centers)]
    parent = list(range(len(centers)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(centers)), 2):
        if find(i) != find(j) and _supports_overlap(supports[i], supports[j], cluster_eps):
            parent[find(i)] = find(j)
    groups = sorted({find(i) for i in range(len(centers))})
    d = len(groups)
    reliable = failed <= 0.2 * len(seeds) and dr % d == 0
    r = dr // d if dr % d == 0 else 0

    lyaps = []
    for g in groups:
        start = centers[g]
        est, _ = lyapunov(mu, start, lyap_steps, 4, 104729 + g)
        lyaps.append(est)

    diagnostics = {
        "votes": votes,
        "failed_seeds": failed,
        "seeds": len(seeds),
        "cluster_diameters": [float(v) for v in rep[3]],
        "cluster_gaps": [float(v) for v in rep[4]],
        "components": [[i for i in range(len(centers)) if find(i) == g] for g in groups],
    }
    report = StructureReport(dr, d, r, [float(c) for c in centers], lyaps, diagnostics, reliable)
    if failed > 0.2 * len(seeds):
        raise Unreliable(f"cluster diagnostics failed for {failed} of {len(seeds)} seeds", report)
    return report


def boundary_map(mu: WalkMeasure, seed: int, n: int, grid_size: int = 64, cluster_eps: float = 1e-3):
    """(Pi, decay): cluster centers of f_{-1} ... f_{-n}(grid) and the fitted
    log2 decay rate of the largest cluster diameter over m in [n/2, n]."""
    grid = (np.arange(grid_size) + 0.5) / grid_size
    maps = mu.maps()
    # letters omega_{-1}, omega_{-2}, ... ; omega_{-m} is applied first
    idx = _letter_indices(mu, n, rng.stream(seed))
    ms, diam = [], []
    final = None
    for m in range(max(1, n // 2), n + 1):
        x = grid.copy()
        for t in range(m - 1, -1, -1):
            x = wrap(maps[idx[t]]._eval(x))
        centers, diams, gaps, labels = cluster(x, cluster_eps)
        # stray singleton clusters near the repelling set carry no information
        sizes = np.bincount(labels, minlength=len(centers))
        big = sizes > max(1, grid_size // 50)
        dmax = float(diams[big].max()) if np.any(big) else float(diams.max())
        if dmax > 1e-13:
            ms.append(m)
            diam.append(dmax)
        final = (centers, diams, gaps, sizes)
    centers, diams, gaps, sizes = final
    keep = sizes > max(1, grid_size // 50)
    pi = [float(c) for c in centers[keep]] if np.any(keep) else [float(c) for c in centers]
    if len(ms) < 3:
        raise Unreliable("cluster diameters reach double-precision resolution before n/2; lower n")
    decay = float(np.polyfit(ms, np.log2(diam), 1)[0])
    return pi, decay


# ---------------------------------------------------------------------------
# entropy


def shannon(p) -> float:
    p = np.asarray(p, float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def rw_entropy(mu: WalkMeasure, n: int, resolution: int = 64, cap: int = 200_000):
    """(h, exact).  Free systems: h = H(mu).  Otherwise H(mu^{*n}) / n with
    maps identified when they agree on a ``resolution``-point grid within 1e-9."""
    if n < 1:
        raise ValueError("n must be positive")
    if mu.free:
        return shannon(mu.weights), True
    k = len(mu.letters)
    if k**n > cap:
        raise BudgetExceeded(f"{k ** n} words exceed the cap of {cap}")
    grid = (np.arange(resolution) + 0.5) / resolution
    maps = mu.maps()
    seqs = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64).reshape(-1, n)
    probs = np.prod(mu.weights[seqs], axis=1)
    imgs = np.tile(grid, (len(seqs), 1))
    for t in range(n - 1, -1, -1):
        for j, m in enumerate(maps):
            sel = seqs[:, t] == j
            imgs[sel] = wrap(m._eval(imgs[sel]))
    order = np.lexsort(imgs.T[::-1])
    imgs = imgs[order]
    probs = probs[order]
    diff = np.abs(signed_offset(imgs[1:], imgs[:-1])).max(axis=1) if len(imgs) > 1 else np.array([])
    new_group = np.concatenate([[True], diff > 1e-9])
    gid = np.cumsum(new_group) - 1
    masses = np.bincount(gid, weights=probs)
    return shannon(masses) / n, False
