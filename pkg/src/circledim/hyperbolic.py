"""Pingpong pairs, uniformly hyperbolic subsystems and truncated
Patterson-Sullivan measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .critexp import arc_levels
from .errors import BudgetExceeded, EmptySubsystem, NotFound, PingpongViolation
from .maps import (
    Arc,
    CircleMap,
    circle_dist,
    find_fixed_points,
    image_arc,
    log_deriv_bounds,
    power,
    wrap,
)
from .walk import EmpiricalMeasure, WalkMeasure, wasserstein_circle
from .words import Alphabet, Word, ball_size, level_expand

CONE_MARGIN = 1e-6


@dataclass
class PingpongCertificate:
    maps: tuple
    cones: tuple  # (U1+, U2+, U1-, U2-), each a list of Arc
    q: int
    margins: dict
    fixed_points: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "q": self.q,
            "cones": [[a.to_json() for a in u] for u in self.cones],
            "margins": {str(k): v for k, v in self.margins.items()},
            "maps": [m.to_json() for m in self.maps],
        }


def _complement(arcs: Sequence[Arc]) -> list[tuple[float, float]]:
    """Closed arcs (start, length) making up the circle minus the open arcs."""
    arcs = sorted(arcs, key=lambda a: a.start)
    out = []
    for i, a in enumerate(arcs):
        nxt = arcs[(i + 1) % len(arcs)]
        gap = float(wrap(nxt.start - a.end)) if len(arcs) > 1 else 1.0 - a.length
        out.append((a.end, gap))
    return out


def _containment_slack(start: float, length: float, arcs: Sequence[Arc]) -> float:
    """Largest slack with which [start, start+length] sits inside one of the arcs."""
    best = -math.inf
    for u in arcs:
        off = float(wrap(start - u.start))
        if off > u.length:
            off -= 1.0
        best = max(best, min(off, u.length - off - length))
    return best


def _near(points, arcs: Sequence[Arc]):
    """For each point: slack to the boundary of the arc containing it (or -inf)."""
    res = []
    for p in points:
        s = -math.inf
        for u in arcs:
            off = float(wrap(p - u.start))
            if off <= u.length:
                s = max(s, min(off, u.length - off))
        res.append(s)
    return np.array(res)


def certify_pingpong(h1: CircleMap, h2: CircleMap, cones, grid: int = 64, fp_grid: int = 10_000, margin: float = CONE_MARGIN) -> PingpongCertificate:
    """Check the six perfect-pingpong conditions in order.

    ``cones`` is (U1+, U2+, U1-, U2-), each a list of closed Arcs read as the
    closures of the open cones.  Raises PingpongViolation naming the first
    failing condition with a witness point.
    """
    U = [list(u) if not isinstance(u, Arc) else [u] for u in cones]
    if len(U) != 4:
        raise ValueError("need four cone families")
    maps = (h1, h2)
    margins = {}

    # (1) 2q hyperbolic fixed points each
    fps = []
    for i, h in enumerate(maps):
        recs = find_fixed_points(h, fp_grid)
        par = [r for r in recs if r.kind == "parabolic"]
        if par:
            raise PingpongViolation(1, f"h{i + 1} has a parabolic fixed point", par[0].location)
        if not recs or len(recs) % 2:
            w = recs[0].location if recs else None
            raise PingpongViolation(1, f"h{i + 1} has {len(recs)} fixed points", w)
        fps.append(recs)
    if len(fps[0]) != len(fps[1]):
        raise PingpongViolation(1, "fixed-point counts differ", fps[0][0].location)
    q = len(fps[0]) // 2
    margins[1] = float(min(abs(math.log2(r.multiplier)) for recs in fps for r in recs))

    att = [np.array([r.location for r in recs if r.kind == "attracting"]) for recs in fps]
    rep = [np.array([r.location for r in recs if r.kind == "repelling"]) for recs in fps]

    # (2) distinct, with attractors (and repellors) of h1 and h2 adjacent in pairs
    allpts = np.concatenate([att[0], att[1], rep[0], rep[1]])
    labels = ["a1"] * len(att[0]) + ["a2"] * len(att[1]) + ["r1"] * len(rep[0]) + ["r2"] * len(rep[1])
    order = np.argsort(allpts)
    srt = allpts[order]
    lab = [labels[i] for i in order]
    gaps = circle_dist(srt, np.roll(srt, -1))
    if gaps.min() < 1e-9:
        raise PingpongViolation(2, "h1 and h2 share a fixed point", float(srt[int(np.argmin(gaps))]))
    n = len(lab)
    for j in range(n):
        kind, who = lab[j][0], lab[j][1]
        want = kind + ("2" if who == "1" else "1")
        if lab[(j - 1) % n] != want and lab[(j + 1) % n] != want:
            raise PingpongViolation(2, f"fixed point of type {lab[j]} has no adjacent partner", float(srt[j]))
    margins[2] = float(gaps.min())

    # (3) q components each, around the right fixed points
    targets = [att[0], att[1], rep[0], rep[1]]
    names = ["U1+", "U2+", "U1-", "U2-"]
    slack3 = math.inf
    for u, pts, nm in zip(U, targets, names):
        if len(u) != q:
            raise PingpongViolation(3, f"{nm} has {len(u)} components, expected {q}", float(pts[0]))
        s = _near(pts, u)
        if np.any(s < margin):
            raise PingpongViolation(3, f"{nm} misses a fixed point", float(pts[int(np.argmin(s))]))
        for arc in u:
            inside = [p for p in pts if arc.contains(p)]
            if len(inside) != 1:
                raise PingpongViolation(3, f"a component of {nm} holds {len(inside)} fixed points", arc.center)
        slack3 = min(slack3, float(s.min()))
    margins[3] = slack3

    # (4) closures pairwise disjoint
    flat = [a for u in U for a in u]
    slack4 = math.inf
    for i, a in enumerate(flat):
        for b in flat[i + 1:]:
            g1 = float(wrap(b.start - a.end))
            g2 = float(wrap(a.start - b.end))
            if g1 + b.length > 1.0 - 1e-15 or g2 + a.length > 1.0 - 1e-15 or a.length + b.length >= 1.0:
                raise PingpongViolation(4, "cones overlap", b.start)
            gap = min(g1, g2)
            if gap < margin:
                raise PingpongViolation(4, "cone closures touch", b.start)
            slack4 = min(slack4, gap)
    margins[4] = slack4

    # (5) h(S^1 \ U-) in U+ and h^-1(S^1 \ U+) in U-; (6) contraction there
    slack5 = slack6 = math.inf
    for i, h in enumerate(maps):
        uplus, uminus = U[i], U[i + 2]
        for f, src, dst in ((h, uminus, uplus), (h.inverse(), uplus, uminus)):
            for s, ln in _complement(src):
                a, L = image_arc(f, s, ln)
                sl = _containment_slack(float(a), float(L), dst)
                if sl < margin:
                    raise PingpongViolation(5, "image of the cone complement leaves the target cone", float(wrap(s + ln / 2)))
                slack5 = min(slack5, sl)
                _, hi = log_deriv_bounds(f, Arc(s, ln), grid=max(grid, int(ln * 4096)))
                if -hi < margin:
                    raise PingpongViolation(6, "derivative is not certified below 1 off the cone", float(wrap(s + ln / 2)))
                slack6 = min(slack6, -hi)
    margins[5] = slack5
    margins[6] = slack6
    return PingpongCertificate(maps, tuple(U), q, margins, {"attractors": [a.tolist() for a in att], "repellors": [r.tolist() for r in rep]})


def standard_cones(h1: CircleMap, h2: CircleMap, fp_grid: int = 10_000, rho: float | None = None):
    """rho-neighbourhoods of attractors and repellors, rho a quarter of the minimal gap."""
    fps = [find_fixed_points(h, fp_grid) for h in (h1, h2)]
    pts = np.sort([r.location for recs in fps for r in recs])
    if rho is None:
        gaps = circle_dist(pts, np.roll(pts, -1)) if pts.size > 1 else np.array([1.0])
        rho = float(gaps.min()) / 4.0
    cones = []
    for kind in ("attracting", "repelling"):
        for recs in fps:
            cones.append([Arc.ball(r.location, rho) for r in recs if r.kind == kind])
    return tuple(cones), rho


def _hyperbolic_only(h: CircleMap) -> bool:
    try:
        recs = find_fixed_points(h, 4000)
    except Exception:
        return False
    return bool(recs) and all(r.kind != "parabolic" for r in recs) and len(recs) % 2 == 0


def search_pingpong(mu: WalkMeasure, target_arc: Arc | None = None, max_power: int = 64, seeds: int | Sequence[int] = 8, max_word_len: int = 3):
    """Find (h1, h2, certificate) among powers of sampled words of mu.

    Candidates are words of length 1..max_word_len drawn from mu; each pair
    with hyperbolic fixed points is tried with powers 1, 2, 4, ... up to
    max_power until the certificate passes.
    """
    alphabet = mu.alphabet
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    words: list[Word] = []
    for a in mu.letters:
        words.append(Word((a,)))
    for s in seeds:
        gen = rng.stream(s)
        for length in range(2, max_word_len + 1):
            idx = gen.choice(len(mu.weights), size=length, p=mu.weights)
            words.append(Word(tuple(int(mu.letters[i]) for i in idx)))
    seen, cands = set(), []
    for w in words:
        if w.letters in seen:
            continue
        seen.add(w.letters)
        m = alphabet.as_map(w) if len(w) > 1 else alphabet.map(w.letters[0])
        if _hyperbolic_only(m):
            cands.append((w, m))
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            (w1, m1), (w2, m2) = cands[i], cands[j]
            p = 1
            while p <= max_power:
                h1, h2 = power(m1, p), power(m2, p)
                try:
                    cones, _ = standard_cones(h1, h2)
                    if target_arc is not None and not any(target_arc.contains(a.center) for a in cones[0] + cones[1]):
                        break
                    cert = certify_pingpong(h1, h2, cones)
                except PingpongViolation as exc:
                    if exc.condition in (1, 2, 3, 4):
                        break
                    p *= 2
                    continue
                cert.fixed_points["words"] = [alphabet.to_names(w1 ** p), alphabet.to_names(w2 ** p)]
                return h1, h2, cert
    raise NotFound("no pingpong pair within the power and word budget")


def pingpong_free_check(h1: CircleMap, h2: CircleMap, max_len: int = 6, grid: int = 1000, tol: float = 1e-6):
    """Smallest sup-grid displacement over nontrivial reduced words of length <= max_len."""
    al = Alphabet([("h1", h1), ("h2", h2)], group_mode=True)
    x = (np.arange(grid) + 0.5) / grid
    pts = [x]
    heads = np.zeros(1, np.int64)
    imgs = x[None, :]
    worst = math.inf
    for _ in range(max_len):
        parents, new = level_expand(al, heads)
        nxt = np.empty((parents.size, grid))
        for a in al.letters:
            r = np.nonzero(new == a)[0]
            nxt[r] = wrap(al.map(a)._eval(imgs[parents[r]]))
        worst = min(worst, float(circle_dist(nxt, x[None, :]).max(axis=1).min()))
        imgs, heads = nxt, new
    return worst, worst > tol


# ---------------------------------------------------------------------------
# subsystems


@dataclass
class Subsystem:
    N: int
    words: list
    arcs: list
    derivative_window: tuple
    separating: bool
    bounds: list = field(default_factory=list)
    scanned: int = 0

    def to_json(self, alphabet: Alphabet | None = None):
        ws = [alphabet.to_names(w) for w in self.words] if alphabet else [list(w.letters) for w in self.words]
        return {
            "N": self.N,
            "words": ws,
            "arcs": [a.to_json() for a in self.arcs],
            "derivative_window": list(self.derivative_window),
            "separating": self.separating,
            "kept": len(self.words),
            "scanned": self.scanned,
        }


def _disjoint_sweep(starts: np.ndarray, lengths: np.ndarray) -> list[int]:
    order = np.argsort(starts, kind="stable")
    kept: list[int] = []
    last_end = -math.inf
    for i in order:
        if starts[i] > last_end:
            kept.append(int(i))
            last_end = starts[i] + lengths[i]
    # cyclic wrap: the last kept arc must not run into the first
    while len(kept) > 1 and starts[kept[-1]] + lengths[kept[-1]] >= starts[kept[0]] + 1.0:
        kept.pop()
    return kept


def extract_subsystem(alphabet: Alphabet, N: int, lam: float, eps: float, arcs: Sequence[Arc], cap: int = 2_000_000, separating: bool = False, grid: int = 8) -> Subsystem:
    """Length-N words mapping every arc strictly into itself with certified
    log2-derivative in [N(lam - eps), N(lam + eps)] on every arc."""
    arcs = list(arcs)
    if ball_size(alphabet, N) > cap:
        raise BudgetExceeded(f"ball of radius {N} exceeds the cap of {cap}")
    starts = np.array([a.start for a in arcs])
    lengths = np.array([a.length for a in arcs])
    lev = None
    for lev in arc_levels(alphabet, N, starts, lengths, grid):
        pass
    lo_w, hi_w = N * (lam - eps), N * (lam + eps)
    off = wrap(lev.start - starts[None, :])
    inside = (off > 0) & (off + lev.length < lengths[None, :])
    ok = inside.all(axis=1) & (lev.lo >= lo_w).all(axis=1) & (lev.hi <= hi_w).all(axis=1)
    idx = np.nonzero(ok)[0]
    if separating and idx.size:
        keep = np.ones(idx.size, bool)
        for j in range(len(arcs)):
            sel = _disjoint_sweep(lev.start[idx, j][keep], lev.length[idx, j][keep])
            mask = np.zeros(int(keep.sum()), bool)
            mask[sel] = True
            keep[np.nonzero(keep)[0]] = mask
        idx = idx[keep]
    if idx.size == 0:
        raise EmptySubsystem(f"no word of length {N} fits the window [{lo_w:.3f}, {hi_w:.3f}]")
    words = _words_at(alphabet, N, idx)
    bounds = [(float(lev.lo[i].min()), float(lev.hi[i].max())) for i in idx]
    return Subsystem(N, words, arcs, (2.0**lo_w, 2.0**hi_w), separating, bounds, int(lev.heads.size))


def _words_at(alphabet: Alphabet, N: int, idx) -> list[Word]:
    from .words import Ball

    ball = Ball(alphabet)
    for _ in range(N):
        ball.grow()
    return [ball.word(N, i) for i in idx]


def subsystem_sample(alphabet: Alphabet, sub: Subsystem, depth: int, cap: int = 2_000_000) -> np.ndarray:
    """Images of the first arc's centre under all depth-fold products of kept words."""
    k = len(sub.words)
    if k**depth > cap:
        raise BudgetExceeded(f"{k ** depth} points exceed the cap of {cap}")
    maps = [alphabet.as_map(w) for w in sub.words]
    pts = np.array([sub.arcs[0].center])
    for _ in range(depth):
        pts = np.concatenate([wrap(m._eval(pts)) for m in maps])
    return pts


# ---------------------------------------------------------------------------
# Patterson-Sullivan


@dataclass
class AtomicMeasure:
    points: np.ndarray
    weights: np.ndarray
    s: float
    x: float
    L: int

    def as_empirical(self) -> EmpiricalMeasure:
        return EmpiricalMeasure(self.points, self.weights)

    def to_rows(self):
        return list(zip(self.points.tolist(), self.weights.tolist()))


def _ball_orbit(alphabet: Alphabet, x: float, L: int, cap: int):
    if ball_size(alphabet, L) > cap:
        raise BudgetExceeded(f"ball of radius {L} exceeds the cap of {cap}")
    pts = [np.array([float(x)])]
    logs = [np.zeros(1)]
    heads = np.zeros(1, np.int64)
    for _ in range(L):
        parents, new = level_expand(alphabet, heads)
        npts = np.empty(parents.size)
        nlog = np.empty(parents.size)
        for a in alphabet.letters:
            r = np.nonzero(new == a)[0]
            m = alphabet.map(a)
            y = pts[-1][parents[r]]
            nlog[r] = logs[-1][parents[r]] + np.log2(m._d1(y))
            npts[r] = wrap(m._eval(y))
        pts.append(npts)
        logs.append(nlog)
        heads = new
    return np.concatenate(pts), np.concatenate(logs)


def patterson_sullivan(alphabet: Alphabet, x: float, s: float, L: int, cap: int = 20_000_000) -> AtomicMeasure:
    """Atoms g(x) over the L-ball with weights proportional to g'(x)^s."""
    if s <= 0:
        raise ValueError("s must be positive")
    pts, logs = _ball_orbit(alphabet, x, L, cap)
    e = s * logs
    w = np.exp2(e - e.max())
    w /= w.sum()
    return AtomicMeasure(pts, w, float(s), float(x), int(L))


def conformality_residual(nu: AtomicMeasure, f: CircleMap, delta: float) -> float:
    """W1 between f^-1_* nu and (f')^delta nu renormalised."""
    finv = f.inverse()
    a = EmpiricalMeasure(finv.eval(nu.points), nu.weights)
    dens = np.exp2(delta * np.log2(f._d1(nu.points)))
    b = EmpiricalMeasure(nu.points, nu.weights * dens)
    return wasserstein_circle(a, b)
