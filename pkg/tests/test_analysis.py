import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gmfg import analysis, equilibrium as eq, instances
from gmfg.errors import ProfileTooShortError
from gmfg.graphon import degree_profile, from_step_matrix


def _solved(inst):
    return inst.graphon, eq.solve(inst.params, inst.graphon, inst.mean)


def test_extrema_basic():
    p = [0.0, 1.0, 0.0, 2.0, 2.0, 0.0, 3.0]
    assert analysis.find_strict_local_extrema(p, "max") == [1]  # plateau at 3-4 excluded
    assert analysis.find_strict_local_extrema(p, "min") == [2, 5]


def test_extrema_boundary_never_counted():
    assert analysis.find_strict_local_extrema([5.0, 1.0, 2.0, 3.0], "max") == []


def test_extrema_constant_profile():
    assert analysis.find_strict_local_extrema(np.full(10, 0.5), "max") == []


def test_extrema_too_short():
    with pytest.raises(ProfileTooShortError):
        analysis.find_strict_local_extrema([1.0, 2.0], "max")


def test_extrema_bad_kind():
    with pytest.raises(ValueError):
        analysis.find_strict_local_extrema([1.0, 2.0, 1.0], "saddle")


profiles = arrays(np.float64, st.integers(3, 40), elements=st.floats(-10, 10))


@settings(max_examples=200, deadline=None)
@given(profiles, st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_extrema_affine_invariant(p, a, c):
    base = analysis.find_strict_local_extrema(p, "max")
    assert analysis.find_strict_local_extrema(a * p + c, "max") == base or np.ptp(p) < 1e-6


@settings(max_examples=200, deadline=None)
@given(profiles)
def test_min_is_max_of_negation(p):
    assert analysis.find_strict_local_extrema(p, "min") == analysis.find_strict_local_extrema(-p, "max")


@settings(max_examples=200, deadline=None)
@given(profiles)
def test_extrema_are_interior_and_dominant(p):
    for i in analysis.find_strict_local_extrema(p, "max"):
        assert 0 < i < len(p) - 1
        assert p[i] > p[i - 1] and p[i] > p[i + 1]


def test_single_bump_sets_equal():
    g, sol = _solved(instances.bump_instance())
    rep = analysis.equivalence_report(g, sol)
    assert rep.degree_maxima == [256]
    assert rep.cost_minima == [256]
    assert rep.verdict == "sets-equal"
    assert rep.mode == "a5-ablation"
    assert not rep.assumptions["a5"]


def test_two_bump_sets_equal():
    g, sol = _solved(instances.bump_instance(centers=(0.25, 0.75)))
    rep = analysis.equivalence_report(g, sol)
    assert rep.degree_maxima == [128, 384]
    assert rep.cost_minima == [128, 384]
    assert rep.verdict == "sets-equal"


def test_full_mode_reports_full_cost():
    g, sol = _solved(instances.bump_instance())
    rep = analysis.equivalence_report(g, sol, ablation=False)
    assert rep.mode == "full"
    assert rep.cost_minima == rep.full_cost_minima


def test_constant_graphon_has_no_extrema():
    g, sol = _solved(instances.constant_instance())
    rep = analysis.equivalence_report(g, sol)
    assert rep.degree_maxima == [] and rep.cost_minima == []


def test_step_graphon_conditions_not_applicable():
    g, sol = _solved(instances.sbm2_instance())
    rec = analysis.differential_conditions(g, sol, 100)
    assert not rec.applicable and rec.reason == "step-function graphon"


def test_bump_differential_conditions():
    g, sol = _solved(instances.bump_instance())
    rec = analysis.differential_conditions(g, sol, 256)
    assert rec.applicable and rec.first_order
    # degree peaks where the cost dips
    assert rec.d2_degree < 0 < rec.d2_cost
    assert rec.d_cost == pytest.approx(rec.d_cost_predicted, abs=1e-9)


def test_predicted_derivative_tracks_cost_slope():
    g, sol = _solved(instances.bump_instance())
    rec = analysis.differential_conditions(g, sol, 240)
    assert rec.d_cost == pytest.approx(rec.d_cost_predicted, rel=1e-3)


def test_ablated_cost_is_affine_in_degree():
    # with the quadratic part removed, J_abl = const - 2 m^2 (sum lambar <1,f> f)
    g, sol = _solved(instances.bump_instance())
    J = analysis.ablated_cost(sol)
    gbar = (sol.lambda_bar * g.ones_projections()) @ g.eigenfunctions
    p, m = sol.params, 1.0
    expected = sol.pi * (p.nu**2 + m**2 + p.sigma**2 / p.rho) - 2 * m**2 * gbar
    assert np.allclose(J, expected, atol=1e-12)
    assert np.argmax(degree_profile(g)) == np.argmin(J)


def test_report_serialises():
    g, sol = _solved(instances.bump_instance(M=128))
    d = analysis.equivalence_report(g, sol).to_dict()
    assert d["verdict"] == "sets-equal"
    assert isinstance(d["conditions"][0], dict)


def test_sbm_plateau_has_no_strict_maximum():
    # the middle block has the largest degree, but the profile is flat on it
    g = from_step_matrix([[0.2, 0.3, 0.1], [0.3, 0.9, 0.3], [0.1, 0.3, 0.2]], 90)
    delta = degree_profile(g)
    assert np.argmax(delta) in range(30, 60)
    assert analysis.find_strict_local_extrema(delta, "max") == []


def test_zero_mean_reports_a3_false():
    inst = instances.bump_instance(m=0.0)
    g, sol = _solved(inst)
    rep = analysis.equivalence_report(g, sol)
    assert rep.assumptions["a3"] is False
    assert np.ptp(eq.cost_full(sol).J) == 0.0
    assert rep.cost_minima == []
    assert rep.verdict == "sets-differ"


def test_single_peak_eigenfunction_derivatives():
    g, sol = _solved(instances.bump_instance())
    rec = analysis.differential_conditions(g, sol, 256)
    assert abs(rec.df[0]) <= 1e-6 * np.max(np.abs(g.eigenfunctions)) * 512
    # canonical f is negative with a downward bump, so d2f > 0 at the peak
    assert rec.d2f[0] > 0 and rec.second_order
