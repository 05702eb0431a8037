import numpy as np
import pytest

from circledim.critexp import (
    convergence_exponent,
    count_by_conorm,
    count_global_conorm,
    delta_fit,
    delta_ladder,
    diverges,
    poincare_partial,
)
from circledim.errors import BudgetExceeded, DegenerateFit, NoBracket
from circledim.fixtures import fixtures
from circledim.fuchsian import classical_delta, limit_set_sample, schottky
from circledim.maps import AffineBlend, MobiusProjective, Rotation
from circledim.words import Alphabet


def test_delta_fit_synthetic_exponential():
    n = np.arange(60)
    d, diag = delta_fit(np.round(2 ** (0.6 * n)), (10, 50))
    assert d == pytest.approx(0.6, abs=1e-3)
    assert not diag["subexponential"]
    assert len(diag["half_window_slopes"]) == 2


def test_delta_fit_flags_polynomial():
    n = np.arange(200)
    d, diag = delta_fit((n + 1.0) ** 2, (20, 199))
    assert d < 0.1 and diag["subexponential"]


def test_delta_fit_degenerate():
    with pytest.raises(DegenerateFit):
        delta_fit([1, 2, 4], (0, 1))
    with pytest.raises(DegenerateFit):
        delta_fit([5] * 20, (2, 15))
    with pytest.raises(DegenerateFit):
        delta_fit([0] * 20, (2, 15))


def test_rotations_count_everything_at_level_zero():
    al = Alphabet([("a", Rotation(0.1)), ("b", Rotation(0.3))])
    t = count_by_conorm(al, [0.2], 0.01, 4)
    assert t.counts[0] == 1 + 4 + 12 + 36 + 108


def test_semigroup_affine_counts():
    # ratio 1/2 maps: every word of length l has co-norm exactly l
    al = Alphabet([("a", AffineBlend(0.45, 0.5, 0.2, 0.1)), ("b", AffineBlend(0.55, 0.5, 0.2, 0.1))], group_mode=False)
    t = count_by_conorm(al, [0.5], 0.01, 6)
    assert t.counts[:7].tolist() == [2 ** (ell + 1) - 1 for ell in range(7)]


def test_cyclic_hyperbolic_counts_grow_linearly():
    al = Alphabet([("h", MobiusProjective(np.diag([2.0, 0.5])))])
    t = count_by_conorm(al, [0.3], 0.01, 30)
    d, diag = delta_fit(t)
    assert abs(d) < 0.1


def test_count_budget():
    with pytest.raises(BudgetExceeded):
        count_by_conorm(fixtures("schottky2").system, [0.1], 0.01, 20, cap=1000)
    with pytest.raises(ValueError):
        count_by_conorm(fixtures("schottky2").system, [0.1], -0.01, 3)


def test_schottky_conorm_matches_classical():
    sy = schottky([50, 50], [0, 0.25])
    base = limit_set_sample(sy, 3)
    base = base[:: max(1, base.size // 6)]
    dh, _ = delta_fit(count_by_conorm(sy.alphabet, base, 0.01, 10))
    dt, _ = classical_delta(sy, 10)
    assert abs(dh - dt) < 0.05


def test_truncation_columns_sum():
    t = count_by_conorm(fixtures("schottky2").system, [0.02], 0.01, 6)
    assert np.array_equal(t.counts_up_to_length(6), t.counts)
    assert np.all(t.counts_up_to_length(4) <= t.counts)


def test_delta_ladder_rows():
    rows = delta_ladder(fixtures("schottky2").system, [0.02], 8, (0.05, 0.01))
    assert [r["eps"] for r in rows] == [0.05, 0.01]
    assert all(0 < r["delta"] < 0.3 for r in rows)


def test_global_counts_rotations():
    al = Alphabet([("a", Rotation(0.1)), ("b", Rotation(0.3))])
    t = count_global_conorm(al, 3, cells=16)
    assert t.mode == "global" and t.counts[0] == 1 + 4 + 12 + 36


def test_poincare_identity_and_sums():
    al = Alphabet([("h", MobiusProjective(np.diag([2.0, 0.5])))])
    t = poincare_partial(al, 0.3, [0.0, 1.0], 5)
    assert t.partial_sums[0.0].tolist() == [1.0, 3.0, 5.0, 7.0, 9.0, 11.0]
    assert diverges(t, 0.0)


def test_convergence_exponent_cyclic_hyperbolic():
    fx = fixtures("cyclic-hyperbolic")
    p = fx.config["parameters"]
    t = poincare_partial(fx.system, p["x"], p["s_values"], p["max_len"])
    s, width = convergence_exponent(t)
    assert s < 0.05 and width <= 0.005


def test_convergence_exponent_needs_bracket():
    al = Alphabet([("h", MobiusProjective(np.diag([2.0, 0.5])))])
    t = poincare_partial(al, 0.3, [0.3, 0.6], 40)
    with pytest.raises(NoBracket):
        convergence_exponent(t)
