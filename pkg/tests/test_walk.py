import numpy as np
import pytest

from circledim.fixtures import fixtures
from circledim.maps import AffineBlend, Arc, MobiusLinear, MobiusProjective, Rotation, TrigFlow, circle_dist
from circledim.walk import (
    EmpiricalMeasure,
    WalkMeasure,
    boundary_map,
    convolve,
    detect_structure,
    lyapunov,
    rw_entropy,
    sample_word,
    stationary_sample,
    wasserstein_circle,
)
from circledim.words import IDENTITY, Alphabet


def single(m, group=False):
    return WalkMeasure.uniform(Alphabet([("g", m)], group_mode=group))


def moran2_walk():
    return WalkMeasure.uniform(fixtures("moran2").system, free=True)


def test_weights_validated():
    al = Alphabet([("a", Rotation(0.1)), ("b", Rotation(0.2))], group_mode=False)
    with pytest.raises(ValueError):
        WalkMeasure(al, [0.5, 0.6])
    with pytest.raises(ValueError):
        WalkMeasure(al, [1.0, 0.0])


def test_sample_word():
    al = Alphabet([("a", Rotation(0.1)), ("b", Rotation(0.2))], group_mode=False)
    mu = WalkMeasure.uniform(al)
    assert sample_word(mu, 0, 1) == IDENTITY
    w = sample_word(mu, 10_000, 5)
    freq = np.mean(np.array(w.letters) == 1)
    assert abs(freq - 0.5) < 3 * 0.5 / 100
    assert sample_word(mu, 50, 9) == sample_word(mu, 50, 9)


def test_lyapunov_contracting_mobius():
    # attracting multiplier 1/4 at the attractor
    lam, err = lyapunov(single(MobiusProjective(np.diag([2.0, 0.5]))), 0.3, 400, 4, 0)
    assert lam == pytest.approx(-2.0, abs=0.05)


def test_lyapunov_rotations_zero():
    al = Alphabet([("a", Rotation(0.1)), ("b", Rotation(0.37))], group_mode=False)
    lam, _ = lyapunov(WalkMeasure.uniform(al), 0.2, 100, 3, 0)
    assert lam == 0.0


def test_lyapunov_agrees_with_single_long_run():
    mu = WalkMeasure.uniform(fixtures("mobius-pair").system)
    lam, err = lyapunov(mu, 0.3, 2000, 16, 1)
    long, _ = lyapunov(mu, 0.3, 2000 * 16, 1, 99)
    assert abs(lam - long) <= 2 * err + 0.02


def test_lyapunov_conjugation_invariant():
    mu = WalkMeasure.uniform(fixtures("mobius-pair").system)
    a, ea = lyapunov(mu, 0.3, 2000, 16, 2)
    b, eb = lyapunov(mu.conjugated(TrigFlow(1, 0.05)), 0.3, 2000, 16, 3)
    assert abs(a - b) < 2 * (ea + eb) + 0.01


def test_lyapunov_affine_rate():
    # the orbit stays in the affine zones where both maps have slope 1/3
    lam, _ = lyapunov(moran2_walk(), 0.5, 500, 4, 0)
    assert lam == pytest.approx(np.log2(1 / 3), abs=1e-9)


def test_stationary_point_mass():
    nu = stationary_sample(single(MobiusProjective(np.diag([2.0, 0.5]))), 60, 1000, 8, 0)
    assert np.max(circle_dist(nu.points, 0.0)) < 1e-6


def test_stationary_support_in_image_arcs():
    mu = moran2_walk()
    nu = stationary_sample(mu, 100, 5000, 8, 0)
    inv = Arc(0.44, 0.12)
    images = [Arc(float(m.eval(inv.start)), float(m.eval(inv.end) - m.eval(inv.start))) for m in mu.maps()]
    assert np.all(images[0].contains(nu.points) | images[1].contains(nu.points))


def test_stationary_residual_vs_replicas():
    mu = moran2_walk()
    a = stationary_sample(mu, 100, 10_000, 16, 1)
    b = stationary_sample(mu, 100, 10_000, 16, 1000)
    assert a.info["converged"]
    assert wasserstein_circle(a, convolve(mu, a)) <= 2 * wasserstein_circle(a, b) + 1e-4


def test_wasserstein_basics():
    a = EmpiricalMeasure(np.array([0.1]), np.array([1.0]))
    b = EmpiricalMeasure(np.array([0.3]), np.array([1.0]))
    c = EmpiricalMeasure(np.array([0.95]), np.array([1.0]))
    assert wasserstein_circle(a, b) == pytest.approx(0.2)
    assert wasserstein_circle(a, c) == pytest.approx(0.15)
    assert wasserstein_circle(a, a) == 0.0


@pytest.mark.parametrize("name,expected", [("mobius-pair", (1, 1)), ("mobius-pair-linear", (1, 2)), ("two-arc-d2", (2, 1))])
def test_structure_constants(name, expected):
    fx = fixtures(name)
    mu = WalkMeasure.uniform(fx.system)
    for m in (mu, mu.conjugated(Rotation(0.3))):
        rep = detect_structure(m, 200, seeds=20)
        assert (rep.d, rep.r) == expected
        assert rep.diagnostics["votes"] == {expected[0] * expected[1]: 20}
        assert rep.dr == rep.d * rep.r


def test_inverse_system_has_same_d():
    mu = WalkMeasure.uniform(fixtures("two-arc-d2").system)
    assert detect_structure(mu.inverse_system(), 200, seeds=10).d == 2


def test_boundary_map_single_contraction():
    m = MobiusProjective(np.diag([2.0, 0.5]))
    mu = single(m)
    pi, decay = boundary_map(mu, 0, 20)
    assert len(pi) == 1 and circle_dist(pi[0], 0.0) < 1e-6
    lam, _ = lyapunov(mu, 0.3, 200, 2, 0)
    assert abs(decay - lam) < 0.2


def test_boundary_map_linear_antipodal():
    mu = single(MobiusLinear(np.diag([2.0, 0.5])))
    pi, _ = boundary_map(mu, 0, 20)
    assert len(pi) == 2
    assert circle_dist(pi[0] + 0.5, pi[1]) < 1e-6


def test_rw_entropy():
    al = Alphabet([(n, AffineBlend(c, 0.25, 0.31, 0.1)) for n, c in zip("abc", (0.36, 0.5, 0.64))], group_mode=False)
    h, exact = rw_entropy(WalkMeasure.uniform(al, free=True), 1)
    assert exact and h == pytest.approx(np.log2(3))
    h, _ = rw_entropy(WalkMeasure(al, [0.5, 0.25, 0.25], free=True), 1)
    assert h == pytest.approx(1.5)
    dup = Alphabet([("g", Rotation(0.1)), ("h", Rotation(0.1))], group_mode=False)
    h, exact = rw_entropy(WalkMeasure.uniform(dup), 6)
    assert not exact and h == pytest.approx(0.0, abs=1e-12)
