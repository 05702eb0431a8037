import math

import numpy as np
import pytest

from circledim.dim import box_dim, dim_formula_check, entropy_dim, moran_dim, pressure_dim
from circledim.errors import DegenerateFit, NotContracting, OverlapDetected
from circledim.fixtures import arc, fixtures
from circledim.maps import AffineBlend, Arc, Conjugate, MobiusProjective, Rotation
from circledim.walk import EmpiricalMeasure, WalkMeasure


def cantor_points(depth=14):
    pts = np.array([0.0])
    for _ in range(depth):
        pts = np.concatenate([pts / 3, pts / 3 + 2 / 3])
    return pts + 1e-12


def test_box_dim_examples():
    assert box_dim(np.linspace(0, 1, 2**14, endpoint=False)).value == pytest.approx(1.0, abs=0.01)
    est = box_dim(np.array([0.1, 0.4, 0.7]))
    assert est.value == 0.0 and est.flags["constant"]
    assert box_dim(cantor_points(), 4, 12).value == pytest.approx(math.log(2) / math.log(3), abs=0.03)


def test_entropy_dim_examples():
    u = EmpiricalMeasure.uniform(np.linspace(0, 1, 2**14, endpoint=False))
    assert entropy_dim(u).value == pytest.approx(1.0, abs=0.01)
    assert entropy_dim(np.array([0.3] * 10)).value == 0.0


def test_degenerate_windows():
    with pytest.raises(DegenerateFit):
        box_dim(np.array([0.1]), 5, 5)
    with pytest.raises(DegenerateFit):
        box_dim(np.array([]), 4, 12)
    with pytest.raises(DegenerateFit):
        entropy_dim(np.array([0.1]), 4, 60)


def test_moran_dim():
    assert moran_dim([1 / 3, 1 / 3]) == pytest.approx(math.log(2) / math.log(3), abs=1e-10)
    assert moran_dim([0.25] * 3) == pytest.approx(math.log(3) / math.log(4), abs=1e-10)
    assert moran_dim([0.5]) == 0.0
    with pytest.raises(ValueError):
        moran_dim([1.2])


@pytest.mark.parametrize("name", ["moran2", "moran3"])
def test_pressure_matches_moran(name):
    fx = fixtures(name)
    maps = [fx.system.map(a) for a in fx.system.letters]
    est = pressure_dim(maps, [arc(p) for p in fx.reference["pressure_arcs"]])
    assert est.value == pytest.approx(moran_dim(fx.reference["ratios"]), abs=1e-4)


def test_pressure_conjugation_invariant():
    fx = fixtures("moran2")
    h = Rotation(0.2)
    maps = [fx.system.map(a) for a in fx.system.letters]
    arcs = [Arc(a.start + 0.2, a.length) for a in (arc(p) for p in fx.reference["pressure_arcs"])]
    est = pressure_dim([Conjugate(m, h) for m in maps], arcs)
    assert est.value == pytest.approx(math.log(2) / math.log(3), abs=1e-4)


def test_pressure_rejects_bad_inputs():
    m = AffineBlend(0.45, 1 / 3, 0.2, 0.1)
    with pytest.raises(OverlapDetected):
        pressure_dim([m, m], [Arc(0.4, 0.1), Arc(0.45, 0.1)])
    with pytest.raises(NotContracting):
        pressure_dim([MobiusProjective(np.diag([2.0, 0.5]))], [Arc(0.4, 0.2)])


def test_dim_formula_on_moran():
    mu = WalkMeasure.uniform(fixtures("moran2").system, free=True)
    rec = dim_formula_check(mu, n=500, trials=4, count=100_000, chains=32)
    assert rec.h_rw == pytest.approx(1.0)
    assert rec.lyap == pytest.approx(math.log2(1 / 3), abs=1e-9)
    assert rec.predicted_dim == pytest.approx(math.log(2) / math.log(3), abs=1e-9)
    assert rec.gap < 0.05


def test_dim_formula_requires_free():
    with pytest.raises(ValueError):
        dim_formula_check(WalkMeasure.uniform(fixtures("moran2").system))
