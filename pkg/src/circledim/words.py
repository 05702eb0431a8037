"""Free group / free semigroup words over a named generator alphabet.

Letters are signed 1-based generator indices: ``+i`` is generator ``i`` and
``-i`` its formal inverse.  A word lists its letters left to right as they are
written, so ``Word((a, b))`` is the map a o b and acts on a point by applying
``b`` first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidMap
from .maps import CircleMap, map_from_json, wrap


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(a) for a in self.letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def is_reduced(self) -> bool:
        return all(a != -b for a, b in zip(self.letters, self.letters[1:]))

    def inverse(self) -> "Word":
        return Word(tuple(-a for a in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)[0]

    def __pow__(self, p: int) -> "Word":
        if p < 0:
            return self.inverse() ** (-p)
        return reduce(self.letters * p)


IDENTITY = Word(())


def reduce(letters: Sequence[int]) -> Word:
    """Free reduction (stack based); idempotent."""
    out: list[int] = []
    for a in letters:
        a = int(a)
        if a == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return Word(tuple(out))


def multiply(g: Word, h: Word) -> tuple[Word, int]:
    """Reduced product g h and the cancellation length (|g|+|h|-|gh|)/2."""
    left = list(reduce(g.letters).letters)
    right = reduce(h.letters).letters
    i = 0
    while left and i < len(right) and left[-1] == -right[i]:
        left.pop()
        i += 1
    return Word(tuple(left) + right[i:]), i


class Alphabet:
    """Named generators; in group mode formal inverses are letters too."""

    def __init__(self, generators: Sequence[tuple[str, CircleMap]], group_mode: bool = True):
        names = [n for n, _ in generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        if not generators:
            raise ValueError("alphabet needs at least one generator")
        self.names = names
        self.maps = [m for _, m in generators]
        self.group_mode = bool(group_mode)
        if self.group_mode:
            for m in self.maps:
                m.inverse()

    @property
    def rank(self) -> int:
        return len(self.maps)

    @property
    def letters(self) -> list[int]:
        """Usable letters in enumeration order (ascending signed index)."""
        pos = list(range(1, self.rank + 1))
        if not self.group_mode:
            return pos
        return sorted(pos + [-i for i in pos])

    @cached_property
    def _inverses(self) -> list[CircleMap]:
        return [m.inverse() for m in self.maps]

    def map(self, letter: int) -> CircleMap:
        if letter > 0:
            return self.maps[letter - 1]
        if not self.group_mode:
            raise ValueError("inverse letters need group mode")
        return self._inverses[-letter - 1]

    def name(self, letter: int) -> str:
        base = self.names[abs(letter) - 1]
        return base if letter > 0 else f"{base}^-1"

    def parse(self, names: Sequence[str]) -> Word:
        idx = {n: i + 1 for i, n in enumerate(self.names)}
        out = []
        for tok in names:
            if tok.endswith("^-1"):
                out.append(-idx[tok[:-3]])
            else:
                out.append(idx[tok])
        return Word(tuple(out))

    def to_names(self, w: Word) -> list[str]:
        return [self.name(a) for a in w.letters]

    def to_json(self):
        return {
            "generators": [{"name": n, "map": m.to_json()} for n, m in zip(self.names, self.maps)],
            "group_mode": self.group_mode,
        }

    @classmethod
    def from_json(cls, obj) -> "Alphabet":
        try:
            gens = [(g["name"], map_from_json(g["map"])) for g in obj["generators"]]
        except (KeyError, TypeError) as exc:
            raise InvalidMap(f"malformed alphabet: {exc}") from None
        return cls(gens, obj.get("group_mode", True))

    def as_map(self, w: Word) -> CircleMap:
        from .maps import Compose

        return Compose(tuple(self.map(a) for a in w.letters))


def sphere_size(alphabet: Alphabet, L: int) -> int:
    k = alphabet.rank
    if L == 0:
        return 1
    if alphabet.group_mode:
        return 2 * k * (2 * k - 1) ** (L - 1)
    return k**L


def ball_size(alphabet: Alphabet, L: int) -> int:
    return sum(sphere_size(alphabet, i) for i in range(L + 1))


def enumerate_words(alphabet: Alphabet, L: int, mode: str = "ball", cap: int | None = None) -> Iterator[Word]:
    """Reduced words of length == L (sphere) or <= L (ball), depth first."""
    if L < 0:
        raise ValueError("radius must be non-negative")
    if mode not in ("ball", "sphere"):
        raise ValueError(f"unknown mode {mode!r}")
    total = ball_size(alphabet, L) if mode == "ball" else sphere_size(alphabet, L)
    if cap is not None and total > cap:
        raise BudgetExceeded(f"{total} words exceed the cap of {cap}")
    letters = alphabet.letters

    def walk(prefix: tuple):
        depth = len(prefix)
        if mode == "ball" or depth == L:
            yield Word(prefix)
        if depth == L:
            return
        for a in letters:
            if prefix and prefix[-1] == -a:
                continue
            yield from walk(prefix + (a,))

    return walk(())


def evaluate_word(alphabet: Alphabet, w: Word, x):
    """(image, log2-derivative, orbit) of x under w; orbit has |w|+1 entries."""
    x = np.asarray(x, float)
    orbit = [wrap(x)]
    logd = np.zeros_like(x)
    cur = wrap(x)
    for a in reversed(w.letters):
        m = alphabet.map(a)
        logd = logd + np.log2(m._d1(cur))
        cur = wrap(m._eval(cur))
        orbit.append(cur)
    if x.ndim == 0:
        return float(cur), float(logd), [float(o) for o in orbit]
    return cur, logd, orbit


def level_expand(alphabet: Alphabet, last: np.ndarray):
    """Children of a BFS level when letters are prepended on the left.

    ``last`` holds the leftmost letter of each node (0 for the identity).
    Returns (parent index, new letter) arrays for every reduced extension.
    """
    parents = []
    new = []
    idx = np.arange(len(last))
    for a in alphabet.letters:
        ok = last != -a
        parents.append(idx[ok])
        new.append(np.full(int(ok.sum()), a, dtype=np.int64))
    if not parents:
        return idx[:0], idx[:0]
    return np.concatenate(parents), np.concatenate(new)


class Ball:
    """Breadth-first reduced-word tree with prefix pointers, built level by level.

    Words grow on the left: level l+1 words are ``a . w`` for level-l words w,
    so the letter added last is applied last.
    """

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.parents = [np.array([-1])]
        self.heads = [np.array([0], dtype=np.int64)]

    def grow(self):
        p, a = level_expand(self.alphabet, self.heads[-1])
        self.parents.append(p)
        self.heads.append(a)
        return p, a

    def word(self, level: int, index: int) -> Word:
        letters = []
        while level > 0:
            letters.append(int(self.heads[level][index]))
            index = int(self.parents[level][index])
            level -= 1
        return Word(tuple(letters))
