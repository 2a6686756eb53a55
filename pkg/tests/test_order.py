import numpy as np
import pytest

from conedyn import order
from conedyn.conefield import ConstantField
from conedyn.cones import Lorentz, Orthant, PSDCone
from conedyn.geometry import pack_sym
from conedyn.order import (
    CAUSAL,
    CHRONOLOGICAL,
    INCOMPARABLE,
    LEQ,
    LEQ_STRICT,
    FlatOrderOracle,
    MinkowskiOracle,
    continuity_probe,
    flat_order_properties,
    leq_flat,
    leq_loewner,
    minkowski_future,
    minkowski_relation,
    push_up_probe,
    quasi_closed_probe,
    reachable_grid,
)

REGION = ((0.0, 2.0), (-2.0, 2.0))


# ------------------------------------------------------------------ flat leq


def test_leq_flat_strict():
    got = leq_flat(Orthant(2), np.zeros(2), np.array([1.0, 2.0]))
    assert got.relation == LEQ_STRICT


def test_leq_flat_reflexive():
    x = np.array([0.3, -0.7])
    assert leq_flat(Orthant(2), x, x).relation == LEQ


def test_leq_flat_lorentz_incomparable():
    got = leq_flat(Lorentz(2), np.zeros(2), np.array([1.0, 2.0]))
    assert got.relation == INCOMPARABLE
    assert got.certificate is None


def test_leq_flat_certificates_reverify():
    # every certificate segment direction must lie in the cone at its start
    rng = np.random.default_rng(0)
    c = Orthant(3)
    for _ in range(50):
        x = rng.normal(size=3)
        y = x + rng.uniform(0.0, 1.0, 3)
        got = leq_flat(c, x, y)
        if got.certificate is not None:
            seg = got.certificate[1] - got.certificate[0]
            assert c.margin(seg) >= -1e-9


def test_leq_loewner():
    I = pack_sym(np.eye(2))
    two = pack_sym(2.0 * np.eye(2))
    indef = pack_sym(np.diag([2.0, 0.5]))
    assert leq_loewner(2, I, two).relation == LEQ_STRICT
    assert leq_loewner(2, I, indef).relation == INCOMPARABLE
    assert leq_loewner(2, I, I).relation == LEQ


# ------------------------------------------------------------ minkowski sets


def test_minkowski_point_classifications():
    fut_c = minkowski_future(np.zeros(2), CAUSAL, REGION, 11)
    fut_i = minkowski_future(np.zeros(2), CHRONOLOGICAL, REGION, 11)
    assert fut_c.contains_point([2.0, 1.0]) and fut_i.contains_point([2.0, 1.0])
    assert fut_c.contains_point([1.0, 1.0]) and not fut_i.contains_point([1.0, 1.0])
    assert not fut_c.contains_point([0.0, 1.0])


def test_chronological_subset_of_causal():
    fut_c = minkowski_future(np.zeros(2), CAUSAL, REGION, 101)
    fut_i = minkowski_future(np.zeros(2), CHRONOLOGICAL, REGION, 101)
    assert not np.any(fut_i.grid & ~fut_c.grid)


def test_minkowski_relation_null():
    assert minkowski_relation(np.zeros(2), np.array([1.0, 1.0])).relation == LEQ
    assert minkowski_relation(np.zeros(2), np.array([2.0, 1.0])).relation == LEQ_STRICT


def test_degenerate_region_rejected():
    with pytest.raises(ValueError):
        minkowski_future(np.zeros(2), CAUSAL, ((0.0, 0.0), (-1.0, 1.0)), 11)
    with pytest.raises(ValueError):
        minkowski_future(np.zeros(2), CAUSAL, REGION, 1)


# ------------------------------------------------------------ reachability


def test_reachable_grid_matches_analytic_future():
    fut = minkowski_future(np.zeros(2), CAUSAL, REGION, 101)
    reach = reachable_grid("minkowski", np.zeros(2), REGION, 101, 16)
    assert reach.agreement(fut) >= 0.99


def test_reachable_grid_orthant_corner_fills_quadrant():
    field = ConstantField(Orthant(2))
    reach = reachable_grid(field, np.array([0.0, -2.0]),
                           ((0.0, 2.0), (-2.0, 2.0)), 51, 8)
    assert np.all(reach.grid)


def test_reachable_grid_lorentz_field_equals_minkowski():
    # same cone through two code paths: grids must agree exactly
    a = reachable_grid("minkowski", np.zeros(2), REGION, 101, 16)
    b = reachable_grid(ConstantField(Lorentz(2)), np.zeros(2), REGION, 101, 16)
    assert np.array_equal(a.grid, b.grid)


def test_reachable_grid_requires_enough_directions():
    with pytest.raises(ValueError):
        reachable_grid("minkowski", np.zeros(2), REGION, 11, 4)


# ----------------------------------------------------------------- probes


def test_quasi_closed_flat_orthant():
    rep = quasi_closed_probe(FlatOrderOracle(Orthant(2)), 200, seed=0)
    assert rep["violations"] == 0


def test_quasi_closed_minkowski_null_pairs():
    rep = quasi_closed_probe(MinkowskiOracle(), 200, seed=0)
    assert rep["violations"] == 0


def test_quasi_closed_specific_boundary_pairs():
    # the orthant boundary pair (0,0) <= (1,0) and the null Minkowski pair
    flat = FlatOrderOracle(Orthant(2))
    assert flat.relation(np.zeros(2), np.array([1.0, 0.0])).relation == LEQ
    mink = MinkowskiOracle()
    assert mink.relation(np.zeros(2), np.array([1.0, 1.0])).relation == LEQ
    assert mink.relation(np.zeros(2), np.zeros(2)).relation == LEQ


def test_push_up_probe_clean():
    rep = push_up_probe(1000, seed=0)
    assert rep["violations"] == 0


def test_openness_of_strict_order():
    # perturbing both endpoints inside the margin keeps strict order
    rng = np.random.default_rng(1)
    c = Orthant(2)
    checked = 0
    while checked < 100:
        x = rng.normal(size=2)
        y = x + rng.uniform(0.1, 2.0, 2)
        got = leq_flat(c, x, y)
        if got.relation != LEQ_STRICT:
            continue
        checked += 1
        margin = c.margin(y - x)
        budget = 0.1 * margin * np.linalg.norm(y - x)
        for _ in range(5):
            dx = rng.normal(size=2)
            dy = rng.normal(size=2)
            x2 = x + budget * dx / np.linalg.norm(dx)
            y2 = y + budget * dy / np.linalg.norm(dy)
            assert leq_flat(c, x2, y2).relation == LEQ_STRICT


def test_flat_order_properties_clean():
    rep = flat_order_properties(Orthant(2), 1000, seed=0)
    assert rep["antisymmetry_violations"] == 0
    assert rep["transitivity_violations"] == 0


def test_antisymmetry_forces_equality():
    c = Orthant(2)
    rng = np.random.default_rng(2)
    for _ in range(200):
        x = rng.normal(size=2)
        y = x + rng.uniform(0, 1.0) * np.array([1.0, 0.4])
        fwd = leq_flat(c, x, y).relation != INCOMPARABLE
        rev = leq_flat(c, y, x).relation != INCOMPARABLE
        if fwd and rev:
            assert np.linalg.norm(x - y) < 1e-12


def test_transitivity_on_chains():
    c = Orthant(3)
    rng = np.random.default_rng(3)
    for _ in range(1000):
        x = rng.normal(size=3)
        y = x + rng.uniform(0, 1, 3)
        z = y + rng.uniform(0, 1, 3)
        assert leq_flat(c, x, y).relation != INCOMPARABLE
        assert leq_flat(c, y, z).relation != INCOMPARABLE
        assert leq_flat(c, x, z).relation != INCOMPARABLE


# -------------------------------------------------------------- continuity


def test_continuity_inner_config():
    rep = continuity_probe("inner", np.zeros(2), [np.array([-2.0, 0.0])], [0.5])
    assert rep["max_delta_passing"] == 0.5


def test_continuity_outer_config():
    rep = continuity_probe("outer", np.zeros(2), [np.array([0.0, 3.0])], [0.5])
    assert rep["max_delta_passing"] == 0.5


def test_continuity_empty_k_vacuous():
    rep = continuity_probe("inner", np.zeros(2), [], [0.1, 0.5, 2.0])
    assert rep["passing"] == [True, True, True]
    assert rep["max_delta_passing"] == 2.0


def test_continuity_precondition_enforced():
    with pytest.raises(ValueError):
        continuity_probe("inner", np.zeros(2), [np.array([0.0, 3.0])], [0.5])
    with pytest.raises(ValueError):
        continuity_probe("outer", np.zeros(2), [np.array([-2.0, 0.0])], [0.5])


def test_psd_boundary_pair_probe():
    rep = quasi_closed_probe(FlatOrderOracle(PSDCone(2)), 100, seed=5)
    assert rep["violations"] == 0
