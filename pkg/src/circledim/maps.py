"""Closed-form circle diffeomorphisms on R/Z with exact first and second
derivatives, distortion estimates and fixed-point analysis.

All angles are fractions of a full turn and all logarithms are base 2.
Every map evaluates on numpy arrays; scalars go in and come back as floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidMap, TooManyFixedPoints, UnboundedDistortion

LN2 = math.log(2.0)
TWO_PI = 2.0 * math.pi

# Lipschitz tables: cells per turn and samples per cell.
_LIP_CELLS = 1 << 13
_LIP_SAMPLES = 6
_LIP_SAFETY = 1.5

PARABOLIC_TOL = 1e-6


def wrap(x):
    """Reduce to [0, 1)."""
    r = np.mod(x, 1.0)
    return np.where(r >= 1.0, 0.0, r)


def circle_dist(x, y):
    d = np.abs(wrap(np.asarray(x, float) - np.asarray(y, float)))
    return np.minimum(d, 1.0 - d)


def signed_offset(x, y):
    """Representative of x - y in [-1/2, 1/2)."""
    return np.mod(np.asarray(x, float) - np.asarray(y, float) + 0.5, 1.0) - 0.5


def _out(r):
    r = np.asarray(r, float)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class Arc:
    """Closed arc [start, start + length] read counter-clockwise."""

    start: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= 1.0):
            raise ValueError(f"arc length must lie in (0, 1], got {self.length}")
        object.__setattr__(self, "start", float(wrap(self.start)))

    @classmethod
    def ball(cls, center: float, radius: float) -> "Arc":
        return cls(center - radius, min(2.0 * radius, 1.0))

    @property
    def end(self) -> float:
        return float(wrap(self.start + self.length))

    @property
    def center(self) -> float:
        return float(wrap(self.start + 0.5 * self.length))

    def contains(self, x, margin: float = 0.0):
        off = wrap(np.asarray(x, float) - self.start)
        return (off >= margin) & (off <= self.length - margin)

    def points(self, grid: int) -> np.ndarray:
        return wrap(self.start + np.linspace(0.0, self.length, grid))

    def to_json(self):
        return [self.start, self.length]


def arcs_disjoint(arcs: Sequence[Arc], margin: float = 0.0) -> bool:
    for i, a in enumerate(arcs):
        for b in arcs[i + 1:]:
            if a.length + b.length + 2 * margin >= 1.0:
                return False
            off = float(wrap(b.start - a.start))
            if off <= a.length + margin or off + b.length >= 1.0 - margin:
                return False
    return True


def image_arc(m: "CircleMap", start, length):
    """Exact image of arcs under an orientation-preserving homeomorphism."""
    start = np.asarray(start, float)
    length = np.asarray(length, float)
    a = m.eval(start)
    b = m.eval(start + length)
    img = wrap(b - a)
    full = length >= 1.0
    img = np.where(full, 1.0, img)
    # a short arc may round to zero length; an almost-full one to 1
    return a, img


class CircleMap:
    """Base class; subclasses implement ``_eval``, ``_d1`` and ``_d2``."""

    def eval(self, x):
        return _out(wrap(self._eval(np.asarray(x, float))))

    __call__ = eval

    def deriv(self, x):
        return _out(self._d1(np.asarray(x, float)))

    def deriv2(self, x):
        return _out(self._d2(np.asarray(x, float)))

    def log_deriv(self, x):
        return _out(np.log2(self._d1(np.asarray(x, float))))

    def _jet(self, x):
        """(value, first, second derivative) in one pass."""
        return self._eval(x), self._d1(x), self._d2(x)

    def inverse(self) -> "CircleMap":
        closed = self.closed_inverse()
        return closed if closed is not None else Inverse(self)

    def closed_inverse(self):
        return None

    def to_json(self):
        raise NotImplementedError

    # -- Lipschitz bound of log2 m' over arcs -------------------------------

    @cached_property
    def _lip_table(self):
        n = _LIP_CELLS
        xs = (np.arange(n)[:, None] + np.linspace(0.0, 1.0, _LIP_SAMPLES)[None, :]) / n
        with np.errstate(over="ignore", invalid="ignore"):
            slope = np.abs(self._d2(xs) / self._d1(xs)) / LN2
        cell = slope.max(axis=1)
        # neighbours guard against peaks narrower than a cell
        cell = np.maximum(cell, np.maximum(np.roll(cell, 1), np.roll(cell, -1)))
        cell = cell * _LIP_SAFETY + 1e-300
        doubled = np.concatenate([cell, cell])
        levels = [doubled]
        span = 1
        while 2 * span <= n:
            prev = levels[-1]
            nxt = prev.copy()
            nxt[: len(prev) - span] = np.maximum(prev[: len(prev) - span], prev[span:])
            levels.append(nxt)
            span *= 2
        return np.stack(levels), float(cell.max())

    def logderiv_lipschitz(self, start, length):
        """Upper bound on |(log2 m')'| over arcs [start, start + length]."""
        table, top = self._lip_table
        start = np.asarray(start, float)
        length = np.asarray(length, float)
        n = _LIP_CELLS
        i0 = np.floor(wrap(start) * n).astype(np.int64)
        i0 = np.minimum(i0, n - 1)
        i1 = np.floor(wrap(start) * n + length * n).astype(np.int64)
        i1 = np.minimum(i1, i0 + n - 1)
        width = i1 - i0 + 1
        k = np.floor(np.log2(width)).astype(np.int64)
        k = np.minimum(k, table.shape[0] - 1)
        lo = table[k, i0]
        hi = table[k, i1 - (1 << k) + 1]
        res = np.maximum(lo, hi)
        res = np.where(length >= 0.5, top, res)
        if not np.all(np.isfinite(res)):
            raise UnboundedDistortion("log-derivative slope bound is not finite")
        return _out(res)


# ---------------------------------------------------------------------------
# elementary maps


@dataclass(frozen=True, eq=False)
class Rotation(CircleMap):
    alpha: float

    def _eval(self, x):
        return x + self.alpha

    def _d1(self, x):
        return np.ones_like(x)

    def _d2(self, x):
        return np.zeros_like(x)

    def closed_inverse(self):
        return Rotation(-self.alpha)

    def logderiv_lipschitz(self, start, length):
        return _out(np.zeros_like(np.asarray(start, float)))

    def to_json(self):
        return {"type": "Rotation", "alpha": self.alpha}


def _check_sl2(matrix):
    a = np.asarray(matrix, float)
    if a.shape != (2, 2):
        raise InvalidMap("matrix must be 2x2")
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if not abs(det - 1.0) <= 1e-9:
        raise InvalidMap(f"matrix must have determinant 1, got {det}")
    return tuple(tuple(float(v) for v in row) for row in a)


@dataclass(frozen=True, eq=False)
class _Mobius(CircleMap):
    matrix: tuple
    # x -> angle factor: pi for lines (projective), 2 pi for unit vectors
    _scale = math.pi

    def __post_init__(self):
        object.__setattr__(self, "matrix", _check_sl2(self.matrix))

    @cached_property
    def A(self) -> np.ndarray:
        return np.array(self.matrix, float)

    def _image(self, x):
        th = self._scale * x
        c, s = np.cos(th), np.sin(th)
        A = self.A
        w0 = A[0, 0] * c + A[0, 1] * s
        w1 = A[1, 0] * c + A[1, 1] * s
        return w0, w1, c, s

    def _eval(self, x):
        w0, w1, _, _ = self._image(x)
        ang = np.arctan2(w1, w0)
        return ang / self._scale

    def _d1(self, x):
        w0, w1, _, _ = self._image(x)
        return 1.0 / (w0 * w0 + w1 * w1)

    def _d2(self, x):
        w0, w1, c, s = self._image(x)
        A = self.A
        # derivative of the image vector with respect to the angle
        v0 = -A[0, 0] * s + A[0, 1] * c
        v1 = -A[1, 0] * s + A[1, 1] * c
        n2 = w0 * w0 + w1 * w1
        return -2.0 * (w0 * v0 + w1 * v1) / (n2 * n2) * self._scale

    def _inverse_matrix(self):
        (a, b), (c, d) = self.matrix
        return ((d, -b), (-c, a))

    def to_json(self):
        return {"type": type(self).__name__, "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True, eq=False)
class MobiusProjective(_Mobius):
    """SL(2,R) acting on lines; x is the line angle divided by pi."""

    _scale = math.pi

    def closed_inverse(self):
        return MobiusProjective(self._inverse_matrix())


@dataclass(frozen=True, eq=False)
class MobiusLinear(_Mobius):
    """SL(2,R) acting on unit vectors (double cover of the projective action)."""

    _scale = TWO_PI

    def closed_inverse(self):
        return MobiusLinear(self._inverse_matrix())


@dataclass(frozen=True, eq=False)
class TrigFlow(CircleMap):
    """Time-t map of the flow of dx/dt = sin(2 k pi x)."""

    k: int
    t: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidMap("TrigFlow needs a positive integer k")
        if abs(TWO_PI * self.k * self.t) > 600:
            raise InvalidMap("TrigFlow time too large for double precision")

    @cached_property
    def E(self) -> float:
        return math.exp(TWO_PI * self.k * self.t)

    def _eval(self, x):
        u = self.k * math.pi * x
        j = np.floor(u / math.pi + 0.5)
        r = u - j * math.pi
        r2 = np.arctan2(self.E * np.sin(r), np.cos(r))
        return (r2 + j * math.pi) / (self.k * math.pi)

    def _den(self, x):
        u = self.k * math.pi * x
        c, s = np.cos(u), np.sin(u)
        return c * c + self.E * self.E * s * s, u

    def _d1(self, x):
        d, _ = self._den(x)
        return self.E / d

    def _d2(self, x):
        d, u = self._den(x)
        E = self.E
        return -self.k * math.pi * E * (E * E - 1.0) * np.sin(2.0 * u) / (d * d)

    def closed_inverse(self):
        return TrigFlow(self.k, -self.t)

    def to_json(self):
        return {"type": "TrigFlow", "k": self.k, "t": self.t}


class _ShiftMap(CircleMap):
    """Maps with a natural lift x -> x + displacement(x); inverted numerically."""

    def _check_positive(self):
        xs = np.linspace(0.0, 1.0, 10_001)
        if not np.all(self._d1(xs) > 0):
            raise InvalidMap(f"{type(self).__name__}: derivative not positive on the check grid")

    def lift(self, x):
        return self._eval(x)

    @cached_property
    def _disp_bound(self) -> float:
        xs = np.linspace(0.0, 1.0, 4097)
        return float(np.max(np.abs(self.lift(xs) - xs))) + 1e-3


@dataclass(frozen=True, eq=False)
class ParabolicBlend(_ShiftMap):
    """x -> x + eps sin^{2k}(pi x) cos(2 pi x): parabolic fixed point of multiplicity 2k at 0."""

    k: int
    eps: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidMap("ParabolicBlend needs a positive integer k")
        self._check_positive()

    def _eval(self, x):
        p = 2 * self.k
        return x + self.eps * np.sin(math.pi * x) ** p * np.cos(TWO_PI * x)

    def _d1(self, x):
        p = 2 * self.k
        s, c = np.sin(math.pi * x), np.cos(math.pi * x)
        h1 = p * s ** (p - 1) * math.pi * c * np.cos(TWO_PI * x) - TWO_PI * s**p * np.sin(TWO_PI * x)
        return 1.0 + self.eps * h1

    def _d2(self, x):
        p = 2 * self.k
        s, c = np.sin(math.pi * x), np.cos(math.pi * x)
        C2, S2 = np.cos(TWO_PI * x), np.sin(TWO_PI * x)
        h2 = math.pi**2 * (p * (p - 1) * s ** (p - 2) * c * c * C2 - (p + 4) * s**p * C2 - 4 * p * s ** (p - 1) * c * S2)
        return self.eps * h2

    def to_json(self):
        return {"type": "ParabolicBlend", "k": self.k, "eps": self.eps}


@dataclass(frozen=True, eq=False)
class TrigPolyShift(_ShiftMap):
    """x -> x + const + sum_j a_j cos(2 pi j x) + b_j sin(2 pi j x), j = 1..J."""

    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()
    const: float = 0.0

    def __post_init__(self):
        a = tuple(float(v) for v in self.cos_coeffs)
        b = tuple(float(v) for v in self.sin_coeffs)
        n = max(len(a), len(b))
        a = a + (0.0,) * (n - len(a))
        b = b + (0.0,) * (n - len(b))
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)
        self._check_positive()

    @cached_property
    def _coef(self):
        j = np.arange(1, len(self.cos_coeffs) + 1, dtype=float)
        return j, np.array(self.cos_coeffs), np.array(self.sin_coeffs)

    def _terms(self, x):
        j, a, b = self._coef
        ang = TWO_PI * np.multiply.outer(x, j)
        return j, a, b, np.cos(ang), np.sin(ang)

    def _eval(self, x):
        if not len(self.cos_coeffs):
            return x + self.const
        _, a, b, c, s = self._terms(x)
        return x + self.const + c @ a + s @ b

    def _d1(self, x):
        if not len(self.cos_coeffs):
            return np.ones_like(x)
        j, a, b, c, s = self._terms(x)
        return 1.0 + TWO_PI * (c @ (j * b) - s @ (j * a))

    def _d2(self, x):
        if not len(self.cos_coeffs):
            return np.zeros_like(x)
        j, a, b, c, s = self._terms(x)
        w = TWO_PI**2 * j * j
        return -(c @ (w * a) + s @ (w * b))

    def to_json(self):
        return {
            "type": "TrigPolyShift",
            "cos_coeffs": list(self.cos_coeffs),
            "sin_coeffs": list(self.sin_coeffs),
            "const": self.const,
        }


def _smoothstep(t):
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_int(t):
    return t**4 * (2.5 + t * (-3.0 + t))


def _smoothstep_d(t):
    return 30.0 * t * t * (1.0 - t) ** 2


@dataclass(frozen=True, eq=False)
class AffineBlend(_ShiftMap):
    """Fixes ``center`` and is affine with slope ``ratio`` on B(center, half_width).

    Outside the affine zone the derivative ramps (C^2 quintic) to the constant
    that makes the total turn equal to one.
    """

    center: float
    ratio: float
    half_width: float
    ramp: float

    def __post_init__(self):
        if not (self.ratio > 0 and self.half_width > 0 and self.ramp > 0):
            raise InvalidMap("AffineBlend needs positive ratio, half_width and ramp")
        if self.half_width + self.ramp >= 0.5:
            raise InvalidMap("AffineBlend zones overlap their antipode")

    @cached_property
    def plateau(self) -> float:
        return self.ratio + (1.0 - self.ratio) / (1.0 - 2.0 * self.half_width - self.ramp)

    def _integral(self, z):
        """int_0^z of the derivative for 0 <= z <= 1/2."""
        w, tau, rho = self.half_width, self.ramp, self.ratio
        t = np.clip((z - w) / tau, 0.0, 1.0)
        ramp_part = tau * _smoothstep_int(t) + np.maximum(z - w - tau, 0.0)
        return rho * z + (self.plateau - rho) * ramp_part

    def lift(self, x):
        y = np.asarray(x, float) - self.center
        n = np.floor(y + 0.5)
        y0 = y - n
        return self.center + n + np.sign(y0) * self._integral(np.abs(y0))

    _eval = lift

    def _d1(self, x):
        y = np.abs(signed_offset(x, self.center))
        t = np.clip((y - self.half_width) / self.ramp, 0.0, 1.0)
        return self.ratio + (self.plateau - self.ratio) * _smoothstep(t)

    def _d2(self, x):
        y = signed_offset(x, self.center)
        t = np.clip((np.abs(y) - self.half_width) / self.ramp, 0.0, 1.0)
        return np.sign(y) * (self.plateau - self.ratio) * _smoothstep_d(t) / self.ramp

    def to_json(self):
        return {
            "type": "AffineBlend",
            "center": self.center,
            "ratio": self.ratio,
            "half_width": self.half_width,
            "ramp": self.ramp,
        }


# ---------------------------------------------------------------------------
# combinators


@dataclass(frozen=True, eq=False)
class Compose(CircleMap):
    """Composition applied right to left: Compose([f, g])(x) = f(g(x))."""

    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))

    def _eval(self, x):
        for m in reversed(self.maps):
            x = m._eval(x)
        return x

    def _d1(self, x):
        return self._jet(x)[1]

    def _d2(self, x):
        return self._jet(x)[2]

    def _jet(self, x):
        d1 = np.ones_like(x)
        d2 = np.zeros_like(x)
        for m in reversed(self.maps):
            x, a1, a2 = m._jet(x)
            d1, d2 = a1 * d1, a2 * d1 * d1 + a1 * d2
        return x, d1, d2

    def closed_inverse(self):
        return Compose(tuple(m.inverse() for m in reversed(self.maps)))

    def to_json(self):
        return [m.to_json() for m in self.maps]


@dataclass(frozen=True, eq=False)
class Inverse(CircleMap):
    inner: CircleMap

    @cached_property
    def _closed(self):
        return self.inner.closed_inverse()

    def _solve(self, y):
        inner = self.inner
        if not isinstance(inner, _ShiftMap):
            raise InvalidMap(f"no inverse available for {type(inner).__name__}")
        y = np.asarray(wrap(y), float)
        b = inner._disp_bound
        lo = y - b
        hi = y + b
        z = np.array(0.5 * (lo + hi), float)
        lo = np.array(lo, float)
        hi = np.array(hi, float)
        act = np.flatnonzero(np.ones(z.shape, bool))
        zf, lof, hif, yf = z.reshape(-1), lo.reshape(-1), hi.reshape(-1), y.reshape(-1)
        # Newton safeguarded by a bracket; converged points drop out
        for _ in range(100):
            if act.size == 0:
                break
            za, la, ha = zf[act], lof[act], hif[act]
            f = inner.lift(za) - yf[act]
            below = f < 0
            la = np.where(below, za, la)
            ha = np.where(below, ha, za)
            step = za - f / inner._d1(za)
            ok = (step >= la) & (step <= ha)
            zn = np.where(ok, step, 0.5 * (la + ha))
            zf[act], lof[act], hif[act] = zn, la, ha
            done = (np.abs(zn - za) <= 4e-16 * np.maximum(1.0, np.abs(za))) | (ha - la <= 4e-16)
            act = act[~done]
        return zf.reshape(z.shape)

    def _eval(self, x):
        if self._closed is not None:
            return self._closed._eval(x)
        return self._solve(x)

    def _d1(self, x):
        if self._closed is not None:
            return self._closed._d1(x)
        return 1.0 / self.inner._d1(self._solve(x))

    def _d2(self, x):
        if self._closed is not None:
            return self._closed._d2(x)
        return self._jet(x)[2]

    def _jet(self, x):
        if self._closed is not None:
            return self._closed._jet(x)
        z = self._solve(x)
        d = self.inner._d1(z)
        return z, 1.0 / d, -self.inner._d2(z) / d**3

    def closed_inverse(self):
        return self.inner

    def to_json(self):
        return {"type": "Inverse", "of": self.inner.to_json()}


@dataclass(frozen=True, eq=False)
class Conjugate(CircleMap):
    """by o inner o by^{-1}."""

    inner: CircleMap
    by: CircleMap

    @cached_property
    def _chain(self) -> Compose:
        return Compose((self.by, self.inner, self.by.inverse()))

    def _eval(self, x):
        return self._chain._eval(x)

    def _d1(self, x):
        return self._chain._d1(x)

    def _d2(self, x):
        return self._chain._d2(x)

    def _jet(self, x):
        return self._chain._jet(x)

    def closed_inverse(self):
        return Conjugate(self.inner.inverse(), self.by)

    def to_json(self):
        return {"type": "Conjugate", "inner": self.inner.to_json(), "by": self.by.to_json()}


def power(m: CircleMap, p: int) -> CircleMap:
    """m composed with itself p times (p may be negative)."""
    if p == 0:
        return Rotation(0.0)
    if p < 0:
        return power(m.inverse(), -p)
    if isinstance(m, _Mobius):
        return type(m)(np.linalg.matrix_power(m.A, p))
    if isinstance(m, Rotation):
        return Rotation(m.alpha * p)
    if isinstance(m, TrigFlow):
        return TrigFlow(m.k, m.t * p)
    return Compose((m,) * p)


# ---------------------------------------------------------------------------
# serialization

_SIMPLE = {
    "Rotation": lambda d: Rotation(d["alpha"]),
    "MobiusProjective": lambda d: MobiusProjective(d["matrix"]),
    "MobiusLinear": lambda d: MobiusLinear(d["matrix"]),
    "TrigFlow": lambda d: TrigFlow(int(d["k"]), d["t"]),
    "ParabolicBlend": lambda d: ParabolicBlend(int(d["k"]), d["eps"]),
    "TrigPolyShift": lambda d: TrigPolyShift(tuple(d.get("cos_coeffs", ())), tuple(d.get("sin_coeffs", ())), d.get("const", 0.0)),
    "AffineBlend": lambda d: AffineBlend(d["center"], d["ratio"], d["half_width"], d["ramp"]),
    "Inverse": lambda d: Inverse(map_from_json(d["of"])),
    "Conjugate": lambda d: Conjugate(map_from_json(d["inner"]), map_from_json(d["by"])),
}


def map_from_json(obj) -> CircleMap:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, list):
        return Compose(tuple(map_from_json(o) for o in obj))
    try:
        build = _SIMPLE[obj["type"]]
    except KeyError:
        raise InvalidMap(f"unknown map type {obj.get('type')!r}") from None
    return build(obj)


# ---------------------------------------------------------------------------
# derivative enclosures and distortion


def _grid_on_arc(arc: Arc, grid: int):
    if grid < 2:
        raise ValueError("grid must be at least 2")
    xs = arc.start + np.linspace(0.0, arc.length, grid)
    return xs, arc.length / (grid - 1)


def log_deriv_bounds(m: CircleMap, arc: Arc, grid: int = 64):
    """Guaranteed (lower, upper) enclosure of log2 m' over ``arc``.

    Grid extremes are widened by L h / 2, L bounding |(log2 m')'| on the arc;
    every point of the arc is within h / 2 of a grid point.
    """
    xs, h = _grid_on_arc(arc, grid)
    with np.errstate(over="raise", divide="raise", invalid="raise"):
        try:
            vals = np.log2(m._d1(xs))
        except FloatingPointError as exc:
            raise UnboundedDistortion(str(exc)) from None
    lip = m.logderiv_lipschitz(arc.start, arc.length)
    widen = lip * h / 2.0
    return float(vals.min() - widen), float(vals.max() + widen)


def arc_log_deriv_bounds(m: CircleMap, start, length, grid: int = 8):
    """Vectorised ``log_deriv_bounds`` over many arcs at once."""
    start = np.asarray(start, float)
    length = np.asarray(length, float)
    t = np.linspace(0.0, 1.0, grid)
    xs = start[..., None] + length[..., None] * t
    vals = np.log2(m._d1(xs))
    h = length / (grid - 1)
    widen = m.logderiv_lipschitz(start, length) * h / 2.0
    return vals.min(axis=-1) - widen, vals.max(axis=-1) + widen


def distortion(m: CircleMap, arc: Arc, grid: int = 64):
    """(kappa, kappa_tilde) estimates: oscillation and Lipschitz norm of log2 m'."""
    xs, h = _grid_on_arc(arc, grid)
    logs = np.log2(m._d1(xs))
    lip = m.logderiv_lipschitz(arc.start, arc.length)
    kappa = float(logs.max() - logs.min() + lip * h)
    slopes = np.abs(np.diff(logs)) / h
    pointwise = np.abs(m._d2(xs) / m._d1(xs)) / LN2
    kappa_t = float(max(slopes.max(initial=0.0), pointwise.max()))
    return kappa, kappa_t


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True)
class FixedPointRecord:
    location: float
    kind: str  # attracting | repelling | parabolic
    multiplicity: int
    multiplier: float

    def to_json(self):
        return {"location": self.location, "kind": self.kind, "multiplicity": self.multiplicity, "multiplier": self.multiplier}


def _displacement(m: CircleMap, x):
    return signed_offset(m._eval(x), x)


def _bisect(f, lo, hi, tol=1e-13, max_iter=200):
    flo = f(lo)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _taylor_multiplicity(m: CircleMap, x0: float, max_order: int = 8) -> int:
    """Order of the first Taylor coefficient of m(x) - x exceeding the threshold."""
    c1 = float(m._d1(np.array(x0))) - 1.0
    if abs(c1) > PARABOLIC_TOL:
        return 1
    c2 = float(m._d2(np.array(x0))) / 2.0
    if abs(c2) > PARABOLIC_TOL:
        return 2
    h = 2e-3
    offs = np.arange(-4, 5) * h  # f[4] is the centre
    f = m._d2(x0 + offs)
    # central differences of m'' give phi^{(j)} for j >= 3
    d3 = (-f[6] + 8 * f[5] - 8 * f[3] + f[2]) / (12 * h)
    d4 = (-f[6] + 16 * f[5] - 30 * f[4] + 16 * f[3] - f[2]) / (12 * h * h)
    d5 = (f[6] - 2 * f[5] + 2 * f[3] - f[2]) / (2 * h**3)
    d6 = (f[6] - 4 * f[5] + 6 * f[4] - 4 * f[3] + f[2]) / h**4
    for order, val in ((3, d3), (4, d4), (5, d5), (6, d6)):
        if abs(val / math.factorial(order)) > PARABOLIC_TOL:
            return order
    return max_order


def find_fixed_points(m: CircleMap, grid: int = 10_000, zero_tol: float = 1e-10):
    """Fixed points of m located by sign changes and tangencies of m(x) - x."""
    xs = np.arange(grid) / grid
    phi = _displacement(m, xs)
    if np.max(np.abs(phi)) < zero_tol:
        raise ValueError("map is the identity within tolerance")
    nxt = np.roll(phi, -1)
    xs_next = xs + 1.0 / grid
    found = []

    def disp(x):
        return float(_displacement(m, np.array(x)))

    for i in np.nonzero((np.sign(phi) != np.sign(nxt)) & (np.abs(phi - nxt) < 0.5))[0]:
        if phi[i] == 0.0:
            found.append(xs[i])
            continue
        if nxt[i] == 0.0:
            continue
        found.append(_bisect(disp, xs[i], xs_next[i]))

    # tangential zeros: local extrema of phi that touch zero
    aphi = np.abs(phi)
    prev = np.roll(aphi, 1)
    after = np.roll(aphi, -1)
    cand = np.nonzero((aphi <= prev) & (aphi <= after) & (aphi < 1e-3))[0]

    def slope(x):
        return float(m._d1(np.array(x))) - 1.0

    for i in cand:
        lo, hi = xs[i] - 1.0 / grid, xs[i] + 1.0 / grid
        if np.sign(slope(lo)) == np.sign(slope(hi)):
            continue
        x0 = _bisect(slope, lo, hi, tol=1e-15)
        if abs(disp(x0)) <= zero_tol:
            found.append(x0)

    pts = np.sort(wrap(np.array(found, float)))
    # merge duplicates reported by both passes
    merged = []
    for p in pts:
        if merged and circle_dist(p, merged[-1]) < 10.0 / grid and circle_dist(p, merged[-1]) < 1e-7:
            continue
        merged.append(float(p))
    if len(merged) > 1 and circle_dist(merged[0], merged[-1]) < 1e-7:
        merged.pop()
    if len(merged) > grid / 10:
        raise TooManyFixedPoints(f"{len(merged)} fixed points on a grid of {grid}")

    out = []
    for p in merged:
        mult = float(m._d1(np.array(p)))
        if abs(mult - 1.0) <= PARABOLIC_TOL:
            kind = "parabolic"
            order = _taylor_multiplicity(m, p)
        else:
            kind = "attracting" if mult < 1.0 else "repelling"
            order = 1
        out.append(FixedPointRecord(p, kind, order, mult))
    return out


# ---------------------------------------------------------------------------
# parabolic asymptotics


def parabolic_asymptotics(m: CircleMap, z: float, fixed_point: float = 0.0, n_lo: int = 100, n_hi: int = 10_000, k: int | None = None):
    """Log-log slopes of |x_n - p| and (m^n)'(z) against n along the orbit of z.

    Returns a dict with ``orbit_exponent``, ``deriv_exponent`` and the last
    value of n^{1/k}|x_n - p| (``scaled_limit``); k defaults to the integer
    nearest to the one read off the orbit fit.
    """
    n = np.arange(n_hi + 1)
    xs = np.empty(n_hi + 1)
    logd = np.empty(n_hi + 1)
    x = np.array(float(z))
    acc = 0.0
    for i in range(n_hi + 1):
        xs[i] = x
        logd[i] = acc
        acc += float(np.log2(m._d1(x)))
        x = wrap(m._eval(x))
    sel = np.unique(np.geomspace(n_lo, n_hi, 60).astype(int))
    dist = circle_dist(xs[sel], fixed_point)
    ln = np.log2(sel.astype(float))
    orbit_slope = float(np.polyfit(ln, np.log2(dist), 1)[0])
    deriv_slope = float(np.polyfit(ln, logd[sel], 1)[0])
    if k is None:
        k = max(1, int(round(-1.0 / orbit_slope)))
    return {
        "k": k,
        "orbit_exponent": orbit_slope,
        "deriv_exponent": deriv_slope,
        "scaled_limit": float(n_hi ** (1.0 / k) * circle_dist(xs[-1], fixed_point)),
        "orbit": xs,
    }
