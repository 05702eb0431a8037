"""Built-in constructed systems with their natural experiment settings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnknownFixture
from .fuchsian import FuchsianSystem, rotation_matrix, schottky
from .maps import AffineBlend, Arc, Conjugate, MobiusLinear, MobiusProjective, ParabolicBlend, Rotation, TrigFlow, TrigPolyShift, power
from .words import Alphabet


@dataclass
class Fixture:
    """A named system plus a default experiment config and reference data.

    ``reference`` holds the closed-form or construction-time quantities the
    system was designed around (fixed points, rates, arcs, fit windows).
    """

    name: str
    description: str
    system: Alphabet
    config: dict
    reference: dict = field(default_factory=dict)
    fuchsian: FuchsianSystem | None = None

    def system_json(self):
        return {"fixture": self.name}


def _schottky(cover: str) -> Callable[..., Fixture]:
    def build(chi: float = 50.0, axes=(0.0, 0.25)) -> Fixture:
        sy = schottky([chi, chi], list(axes), cover=cover)
        return Fixture(
            "schottky2" if cover == "projective" else "schottky2-linear",
            f"Schottky pair, multiplier {chi}, axes {list(axes)}, {cover} action",
            sy.alphabet,
            {"experiment": "fuchsian-calibrate", "parameters": {"max_len": 12, "depth": 12, "box_window": [8, 48], "eps": 0.01}},
            {"cone_radius": sy.cone_radius(), "fixed_points": sy.fixed_points().tolist(), "q": 1 if cover == "projective" else 2},
            sy,
        )

    return build


def _mobius_pair(cover: str) -> Callable[..., Fixture]:
    def build(chi: float = 3.0, axis: float = 0.37) -> Fixture:
        A = np.diag([chi, 1.0 / chi])
        R = rotation_matrix(math.pi * axis)
        B = R @ A @ R.T
        if cover == "projective":
            al = Alphabet([("a", MobiusProjective(A)), ("b", MobiusProjective(B))])
            dr = (1, 1)
        else:
            # -B swaps the two lifts, so the lifted minimal set stays connected
            al = Alphabet([("a", MobiusLinear(A)), ("b", MobiusLinear(-B))])
            dr = (1, 2)
        return Fixture(
            "mobius-pair" if cover == "projective" else "mobius-pair-linear",
            f"two hyperbolic matrices, {cover} action",
            al,
            {"experiment": "structure", "parameters": {"n": 200, "seeds": 20}},
            {"d": dr[0], "r": dr[1]},
        )

    return build


def two_arc_d2(t: float = 0.1, shift: float = 0.05) -> Fixture:
    """Two flows with attractors near 1/4 and 3/4: two disjoint minimal sets."""
    f = TrigFlow(2, t)
    al = Alphabet([("a", f), ("b", Conjugate(f, Rotation(shift)))], group_mode=False)
    return Fixture(
        "two-arc-d2",
        "semigroup of two time-t flows whose attractors sit in two disjoint arcs",
        al,
        {"experiment": "structure", "parameters": {"n": 200, "seeds": 20}},
        {"d": 2, "r": 1, "arcs": [[0.25, shift], [0.75, shift]]},
    )


def parabolic_k1(eps: float = 0.05) -> Fixture:
    g = ParabolicBlend(1, eps)
    return Fixture(
        "parabolic-k1",
        "cyclic group of a map with a parabolic fixed point of multiplicity 2 at 0",
        Alphabet([("g", g)]),
        {"experiment": "poincare", "parameters": {"x": 0.9, "max_len": 20000, "s_values": [0.1, 0.3, 0.4, 0.45, 0.55, 0.6, 0.7, 0.9, 1.1]}},
        {"k": 1, "a": eps * math.pi**2, "z": 0.9, "fixed_point": 0.0, "threshold": 0.5},
    )


def parabolic_k2(eps: float = 0.05) -> Fixture:
    # x - g(x) = eps pi^3 x^3 + O(x^5): multiplicity 3, attracting on both sides
    g = TrigPolyShift((), (-eps / 4.0, eps / 8.0))
    return Fixture(
        "parabolic-k2",
        "cyclic group of a map with a parabolic fixed point of multiplicity 3 at 0",
        Alphabet([("g", g)]),
        {"experiment": "poincare", "parameters": {"x": 0.1, "max_len": 20000, "s_values": [0.1, 0.3, 0.5, 0.6, 0.75, 0.8, 0.9, 1.1]}},
        {"k": 2, "a": eps * math.pi**3, "z": 0.1, "fixed_point": 0.0, "threshold": 2.0 / 3.0},
    )


def cyclic_hyperbolic(chi: float = 2.0) -> Fixture:
    h = MobiusProjective(np.diag([chi, 1.0 / chi]))
    return Fixture(
        "cyclic-hyperbolic",
        "cyclic group of one hyperbolic Mobius map",
        Alphabet([("h", h)]),
        {"experiment": "poincare", "parameters": {"x": 0.3, "max_len": 60, "s_values": [0.0, 0.1, 0.3, 0.6, 1.0]}},
        {"threshold": 0.0},
    )


def solvable_2k(k: int = 1, t: float = 1.0) -> Fixture:
    """f the flow of sin(2 k pi x), g the rotation by 1/(2k): g f g^-1 = f^-1."""
    f = TrigFlow(k, t)
    g = Rotation(1.0 / (2 * k))
    return Fixture(
        "solvable-2k",
        f"relation g f g^-1 = f^-1 with k = {k}",
        Alphabet([("f", f), ("g", g)]),
        {"experiment": "lyapunov", "parameters": {"x0": 0.3, "n": 2000, "trials": 8}},
        {"k": k, "relation": [["g", "f", "g^-1"], ["f^-1"]]},
    )


def twoscale_pingpong(eta: float = 0.12, p: int = 15, shift: float = 0.02) -> Fixture:
    """Pingpong pair with one strongly and one weakly contracting attractor.

    The base map has repellors at 0 and 1/2, a strong attractor at 1/4 and a
    weak one at 3/4; ``p`` iterates separate the two scales.  The second
    generator is the first conjugated by a small rotation, so the weak
    attractors carry a Cantor set of positive dimension while every element
    of the group still contracts hard somewhere, keeping the global co-norm
    count nearly flat.
    """
    e = 0.5 / (4.0 * math.pi)
    base = TrigPolyShift((e * (1.0 - eta) / 2.0, 0.0, -e * (1.0 - eta) / 2.0), (0.0, e))
    h1 = power(base, p)
    h2 = Conjugate(h1, Rotation(shift))
    al = Alphabet([("a", h1), ("b", h2)])
    return Fixture(
        "twoscale-pingpong",
        "pingpong pair with a strong and a weak attractor",
        al,
        {
            "experiment": "critexp",
            "parameters": {
                "base_points": [0.75 + shift / 2.0],
                "eps": 0.01,
                "max_len": 6,
                "window": [1, 8],
                "global": True,
                "global_cells": 64,
            },
        },
        {"weak_arc": [0.75, shift], "strong_attractor": 0.25, "repellors": [0.0, 0.5]},
    )


def moran2() -> Fixture:
    maps = [AffineBlend(0.45, 1.0 / 3.0, 0.2, 0.1), AffineBlend(0.55, 1.0 / 3.0, 0.2, 0.1)]
    return Fixture(
        "moran2",
        "two affine contractions of ratio 1/3 on a common arc",
        Alphabet([("a", maps[0]), ("b", maps[1])], group_mode=False),
        {"experiment": "dim", "parameters": {"window": [6, 16]}},
        {
            "ratios": [1.0 / 3.0] * 2,
            "invariant_arc": [0.44, 0.12],
            "pressure_arcs": [[0.43, 0.065], [0.505, 0.065]],
        },
    )


def moran3() -> Fixture:
    maps = [AffineBlend(c, 0.25, 0.31, 0.1) for c in (0.36, 0.5, 0.64)]
    return Fixture(
        "moran3",
        "three affine contractions of ratio 1/4 on a common arc",
        Alphabet([(n, m) for n, m in zip("abc", maps)], group_mode=False),
        {"experiment": "dim", "parameters": {"window": [6, 16]}},
        {
            "ratios": [0.25] * 3,
            "invariant_arc": [0.34, 0.32],
            "pressure_arcs": [[0.35, 0.09], [0.455, 0.09], [0.56, 0.09]],
        },
    )


REGISTRY: dict[str, Callable[..., Fixture]] = {
    "schottky2": _schottky("projective"),
    "schottky2-linear": _schottky("linear"),
    "two-arc-d2": two_arc_d2,
    "parabolic-k1": parabolic_k1,
    "parabolic-k2": parabolic_k2,
    "solvable-2k": solvable_2k,
    "twoscale-pingpong": twoscale_pingpong,
    "moran2": moran2,
    "moran3": moran3,
    "mobius-pair": _mobius_pair("projective"),
    "mobius-pair-linear": _mobius_pair("linear"),
    "cyclic-hyperbolic": cyclic_hyperbolic,
}


def fixture_names() -> list[str]:
    return sorted(REGISTRY)


def fixtures(name: str, **params) -> Fixture:
    """Build the named fixture; keyword arguments override its construction parameters."""
    try:
        build = REGISTRY[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}") from None
    return build(**params)


def arc(pair) -> Arc:
    return Arc(float(pair[0]), float(pair[1]))
