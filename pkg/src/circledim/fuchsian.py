"""Schottky subgroups of SL(2, R) acting on the circle, with the classical
critical exponent from matrix-norm counting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .critexp import delta_fit
from .errors import BudgetExceeded, ConesOverlap, PingpongViolation
from .maps import Arc, MobiusLinear, MobiusProjective, wrap
from .words import Alphabet, ball_size, level_expand

_NAMES = "abcdefghijklmnopqrstuvwxyz"


def rotation_matrix(turns: float) -> np.ndarray:
    c, s = math.cos(turns), math.sin(turns)
    return np.array([[c, -s], [s, c]])


@dataclass
class FuchsianSystem:
    matrices: list
    cover: str = "projective"
    multipliers: list = field(default_factory=list)
    axes: list = field(default_factory=list)

    def __post_init__(self):
        if self.cover not in ("projective", "linear"):
            raise ValueError(f"unknown cover {self.cover!r}")
        self.matrices = [np.asarray(m, float) for m in self.matrices]

    @property
    def alphabet(self) -> Alphabet:
        cls = MobiusProjective if self.cover == "projective" else MobiusLinear
        return Alphabet([(_NAMES[i], cls(m)) for i, m in enumerate(self.matrices)], group_mode=True)

    def cone_radius(self) -> float:
        """Cone radius: a quarter of the smallest gap between fixed points."""
        pts = np.sort(self.fixed_points())
        gaps = np.diff(np.concatenate([pts, [pts[0] + 1.0]]))
        return float(gaps.min()) / 4.0

    def fixed_points(self) -> np.ndarray:
        return np.sort(np.concatenate([_fixed_points_axis(ax, self.cover) for ax in self.axes]))

    def cones(self, radius: float | None = None) -> dict:
        """Attracting cone of every letter (a cone of a^-1 is a repelling cone of a)."""
        r = self.cone_radius() if radius is None else radius
        al = self.alphabet
        out = {}
        for letter in al.letters:
            ax = self.axes[abs(letter) - 1]
            pts = _fixed_points_axis(ax, self.cover)
            att = pts[0::2] if letter > 0 else pts[1::2]
            out[letter] = [Arc.ball(p, r) for p in att]
        return out

    def to_json(self):
        return {"matrices": [m.tolist() for m in self.matrices], "cover": self.cover, "multipliers": list(self.multipliers), "axes": list(self.axes)}


def _fixed_points_axis(axis: float, cover: str) -> np.ndarray:
    """Attractor, repellor, ... in circle units for a generator with this axis."""
    if cover == "projective":
        return wrap(np.array([axis, axis + 0.5]))
    # the linear cover doubles the angle scale: axis a sits at a/2 and a/2 + 1/2
    return wrap(np.array([axis / 2, axis / 2 + 0.25, axis / 2 + 0.5, axis / 2 + 0.75]))


def schottky(multipliers: Sequence[float], axis_angles: Sequence[float], cover: str = "projective", check: bool = True) -> FuchsianSystem:
    """Generator i = R(pi axis_i) diag(chi_i, 1/chi_i) R(-pi axis_i).

    Axes are projective circle points (fractions of a half turn of the line).
    Raises ConesOverlap unless the standard cones give a pingpong configuration.
    """
    if len(multipliers) != len(axis_angles) or not multipliers:
        raise ValueError("need equally many multipliers and axes, at least one")
    mats = []
    for chi, ax in zip(multipliers, axis_angles):
        if chi <= 1:
            raise ValueError("multipliers must exceed 1")
        R = rotation_matrix(math.pi * ax)
        mats.append(R @ np.diag([chi, 1.0 / chi]) @ R.T)
    system = FuchsianSystem(mats, cover, [float(c) for c in multipliers], [float(wrap(a)) for a in axis_angles])
    if check:
        _check_cones(system)
    return system


def _check_cones(system: FuchsianSystem):
    pts = system.fixed_points()
    if len(pts) < len(system.axes) * (2 if system.cover == "projective" else 4):
        raise ConesOverlap("generators share fixed points")
    r = system.cone_radius()
    # the complement of the repelling cone lands inside the attracting one iff
    # the cone radius exceeds atan(1/chi)/pi in projective units
    scale = 1.0 if system.cover == "projective" else 0.5
    for chi in system.multipliers:
        if r <= scale * math.atan(1.0 / chi) / math.pi * (1 + 1e-9):
            raise ConesOverlap(f"multiplier {chi} is too weak for cones of radius {r:.4g}")
    if len(system.matrices) == 2:
        from .hyperbolic import certify_pingpong

        cones = system.cones()
        try:
            certify_pingpong(*system.alphabet.maps, (cones[1], cones[2], cones[-1], cones[-2]))
        except PingpongViolation as exc:
            raise ConesOverlap(f"pingpong condition {exc.condition} fails: {exc}") from None


def pingpong_cones(system: FuchsianSystem):
    c = system.cones()
    return (c[1], c[2], c[-1], c[-2])


def _sigma_max_log2(M: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    """log2 of the largest singular value of (2^log_scale) M for stacked 2x2 M."""
    fro = (M**2).sum(axis=(1, 2))
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    disc = np.sqrt(np.maximum(fro * fro - 4.0 * det * det, 0.0))
    return 0.5 * np.log2(0.5 * (fro + disc)) + log_scale


def norm_levels(system: FuchsianSystem, L: int, cap: int = 5_000_000):
    """Per-sphere arrays of log2 ||g|| for reduced words up to length L.

    Products are renormalised at every step and the scale is carried as a
    separate log, so norms far beyond the float range stay exact in log form.
    """
    al = system.alphabet
    if ball_size(al, L) > cap:
        raise BudgetExceeded(f"ball of radius {L} exceeds the cap of {cap}")
    gens = {a: (system.matrices[a - 1] if a > 0 else np.linalg.inv(system.matrices[-a - 1])) for a in al.letters}
    M = np.eye(2)[None]
    scale = np.zeros(1)
    heads = np.zeros(1, np.int64)
    out = [np.zeros(1)]
    for _ in range(L):
        parents, new = level_expand(al, heads)
        nM = np.empty((parents.size, 2, 2))
        for a in al.letters:
            r = np.nonzero(new == a)[0]
            nM[r] = gens[a] @ M[parents[r]]
        nscale = scale[parents]
        c = np.abs(nM).max(axis=(1, 2))
        nM /= c[:, None, None]
        nscale = nscale + np.log2(c)
        out.append(_sigma_max_log2(nM, nscale))
        M, scale, heads = nM, nscale, new
    return out


def classical_delta(system: FuchsianSystem, L: int, n_window: tuple[int, int] | None = None, cap: int = 5_000_000):
    """Slope of log2 #{g : ||g|| <= 2^{n/2}} against n.

    Returns (delta, diagnostics).  The default window runs from a third of the
    completeness level to the level itself, where completeness is the
    smallest 2 log2 ||g|| on the outermost sphere.
    """
    levels = norm_levels(system, L, cap)
    ns = [np.ceil(2.0 * v - 1e-9) for v in levels]
    top = int(max(v.max() for v in ns))
    allv = np.clip(np.concatenate(ns), 0, top).astype(np.int64)
    counts = np.cumsum(np.bincount(allv, minlength=top + 1))
    complete = max(0, int(ns[-1].min()) - 1)
    if n_window is None:
        n_window = (max(1, complete // 3), complete)
    delta, diag = delta_fit(counts, n_window)
    diag["complete_up_to"] = complete
    diag["counts"] = counts.tolist()
    return delta, diag


def limit_set_sample(system: FuchsianSystem, depth: int, per_cone: int = 1, cap: int = 5_000_000) -> np.ndarray:
    """Images of cone base points under every reduced word of length ``depth``.

    A word ending (on the right) in letter a is applied to base points in the
    attracting cone of a, which lie outside the repelling cone of a.
    """
    al = system.alphabet
    k = len(al.letters)
    total = k * (k - 1) ** max(depth - 1, 0) * per_cone
    if total > cap:
        raise BudgetExceeded(f"{total} points exceed the cap of {cap}")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cones = system.cones()
    heads_l, pts_l = [], []
    for a in al.letters:
        base = np.concatenate([arc.start + arc.length * (np.arange(per_cone) + 0.5) / per_cone for arc in cones[a]])
        pts_l.append(wrap(al.map(a)._eval(base)))
        heads_l.append(np.full(per_cone, a, np.int64))
    pts, heads = np.concatenate(pts_l), np.concatenate(heads_l)
    for _ in range(depth - 1):
        parents, new = level_expand(al, heads)
        npts = np.empty(parents.size)
        for a in al.letters:
            r = np.nonzero(new == a)[0]
            npts[r] = wrap(al.map(a)._eval(pts[parents[r]]))
        pts, heads = npts, new
    return pts


def schottky_pressure(system: FuchsianSystem, nodes: int = 64, tol: float = 1e-6):
    """Pressure oracle for the limit set: letters act on the cone components
    of the letters they may follow in a reduced word."""
    from .dim import pressure_dim

    al = system.alphabet
    cones = system.cones()
    letters, arcs = [], []
    for a in al.letters:
        for c in cones[a]:
            letters.append(a)
            arcs.append(c)
    maps = [al.map(a) for a in letters]
    m = len(arcs)
    allowed = np.zeros((m, m), bool)
    for j in range(m):
        for i in range(m):
            if letters[i] != -letters[j]:
                allowed[j, i] = arcs[i].contains(float(maps[i]._eval(np.array(arcs[j].center))))
    return pressure_dim(maps, arcs, allowed, nodes, tol)
