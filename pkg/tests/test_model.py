import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepcarnot.model import (
    BathSpec,
    ControlFunction,
    EnergyLevelSchedule,
    LevelCrossingError,
    ThermalState,
    build_schedule,
    gibbs_populations,
    shannon_entropy,
)

energies = st.lists(st.floats(-50, 50), min_size=1, max_size=8)


def test_gibbs_two_level():
    # e^-1 / (1 + e^-1)
    p = gibbs_populations([0, 10], 0.1).p
    assert p == pytest.approx([0.7311, 0.2689], abs=1e-4)
    assert p[1] == pytest.approx(math.exp(-1) / (1 + math.exp(-1)), rel=1e-15)


def test_gibbs_degenerate_and_infinite_temperature():
    assert gibbs_populations([0, 0], 1.0).p == pytest.approx([0.5, 0.5])
    assert gibbs_populations([0, 7.0], 1e-12).p == pytest.approx([0.5, 0.5], abs=1e-11)


def test_gibbs_large_beta_e_does_not_overflow():
    p = gibbs_populations([1000.0, 1001.0, 5000.0], 10.0).p
    assert np.all(np.isfinite(p))
    assert p[0] == pytest.approx(1 / (1 + math.exp(-10)))


def test_gibbs_rejects_empty():
    with pytest.raises(ValueError):
        gibbs_populations([], 1.0)


@given(energies, st.floats(0.01, 5), st.floats(-100, 100))
def test_gibbs_shift_invariant(E, beta, c):
    a = gibbs_populations(E, beta).p
    b = gibbs_populations(np.array(E) + c, beta).p
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


def test_entropy_examples():
    assert shannon_entropy(ThermalState(np.array([1.0, 0.0]))) == 0.0
    assert shannon_entropy(ThermalState(np.array([0.5, 0.5]))) == pytest.approx(math.log(2))
    assert shannon_entropy([0.7311, 0.2689]) == pytest.approx(0.5822, abs=1e-4)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=7).filter(lambda x: sum(x) > 1e-3), st.randoms())
def test_entropy_permutation_invariant_and_bounded(w, rnd):
    p = np.array(w) / sum(w)
    q = p.copy()
    rnd.shuffle(q)
    S = shannon_entropy(p)
    assert S == pytest.approx(shannon_entropy(q), abs=1e-12)
    assert -1e-12 <= S <= math.log(p.size) + 1e-12


def test_thermal_state_validation():
    with pytest.raises(ValueError):
        ThermalState(np.array([0.6, 0.6]))
    with pytest.raises(ValueError):
        ThermalState(np.array([1.2, -0.2]))
    st_ = ThermalState.two_level(0.25)
    assert st_.excited == 0.25
    with pytest.raises(ValueError):
        st_.p[0] = 0.0


def test_bath_spec():
    bath = BathSpec.from_beta(0.1, gamma=2.0)
    assert bath.T == 10.0
    assert bath.beta * bath.T == 1.0
    assert bath.gamma_tilde(10.0) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        BathSpec(0.0)
    with pytest.raises(ValueError):
        BathSpec(1.0, gamma=0.0)


def test_build_schedule_linear():
    s = build_schedule([0, 10], [0, 6], ControlFunction.power(1), 4, 1.0)
    assert s.energies[1].tolist() == [10, 9, 8, 7, 6]
    assert s.energies[0].tolist() == [0] * 5
    assert s.delta.tolist() == [0, -4]
    assert s.delta_bar == -2
    assert s.t_f == 4


def test_build_schedule_quadratic():
    # 10 - 4 (j/4)^2
    s = build_schedule([0, 10], [0, 6], ControlFunction.power(2), 4, 1.0)
    assert s.energies[1] == pytest.approx([10, 9.75, 9, 7.75, 6])


def test_build_schedule_tabulated_matches_linear():
    s = build_schedule([0, 10], [0, 6], ControlFunction.tabulated([0, -1, -2, -3, -4]), 4, 1.0)
    assert s.energies[1].tolist() == [10, 9, 8, 7, 6]
    with pytest.raises(ValueError):
        build_schedule([0, 10], [0, 6], ControlFunction.tabulated([0, -1, -4]), 4, 1.0)


def test_build_schedule_endpoints_exact():
    s = build_schedule([0.1, 3.3, 7.7], [0.3, 2.9, 9.1], ControlFunction.exponential(b=0.5), 37, 0.2)
    assert s.energies[:, 0].tolist() == [0.1, 3.3, 7.7]
    assert s.energies[:, -1].tolist() == [0.3, 2.9, 9.1]
    np.testing.assert_allclose(s.eps.sum(axis=1), s.delta, rtol=0, atol=1e-14)


def test_build_schedule_rejects_crossing():
    with pytest.raises(LevelCrossingError):
        build_schedule([0, 1], [0, -1], ControlFunction.linear(), 4, 1.0)
    with pytest.raises(LevelCrossingError):
        EnergyLevelSchedule(np.array([[0, 0, 0], [1, 0.5, -0.5]]), 1.0)


def test_schedule_validation():
    with pytest.raises(ValueError):
        build_schedule([0, 10], [0, 6], ControlFunction.linear(), 0, 1.0)
    with pytest.raises(ValueError):
        build_schedule([0, 10], [0, 6], ControlFunction.linear(), 4, 0.0)
    with pytest.raises(ValueError):
        build_schedule([0, 10], [0, 6, 1], ControlFunction.linear(), 4, 1.0)


@settings(max_examples=50)
@given(st.integers(1, 60), st.lists(st.floats(-5, 5), min_size=1, max_size=5))
def test_linear_control_gives_uniform_steps(N, deltas):
    M = len(deltas)
    E0 = 20.0 * np.arange(M)
    s = build_schedule(E0, E0 + np.array(deltas), ControlFunction.linear(), N, 1.0)
    for m in range(M):
        np.testing.assert_allclose(s.eps[m], s.delta[m] / N, atol=1e-13)


def test_control_function_validation():
    with pytest.raises(ValueError, match="n > 0 required"):
        ControlFunction.power(0)
    with pytest.raises(ValueError):
        ControlFunction.exponential(b=0)
    with pytest.raises(ValueError):
        ControlFunction.logarithmic(a=0)
    with pytest.raises(ValueError):
        ControlFunction.tabulated([1, 2])
    with pytest.raises(ValueError):
        ControlFunction("spline")
    # delta/b <= -1 has no exponential realisation
    with pytest.raises(ValueError):
        ControlFunction.exponential(b=2.0).profile(10, -4.0)


@pytest.mark.parametrize(
    "ctrl",
    [
        ControlFunction.power(3),
        ControlFunction.exponential(b=-2.0),
        ControlFunction.logarithmic(a=-4.0),
        ControlFunction.exponential(b=1.0, a=0.3),
        ControlFunction.logarithmic(a=2.0, b=0.7),
    ],
)
def test_profiles_hit_both_endpoints(ctrl):
    f = ctrl.profile(25, -4.0)
    assert f[0] == 0.0 and f[-1] == -4.0
    assert np.all(np.diff(f) < 0)


def test_exponential_default_rate_matches_raw_form():
    # b (e^{a k} - 1) with a = ln(1 + delta/b)/N ends at delta with no rescaling
    N, delta, b = 50, -4.0, -2.0
    a = math.log1p(delta / b) / N
    raw = b * np.expm1(a * np.arange(N + 1))
    np.testing.assert_allclose(ControlFunction.exponential(b=b).profile(N, delta), raw, atol=1e-13)


def test_logarithmic_default_rate_matches_raw_form():
    N, delta, a = 50, -4.0, -4.0
    b = math.expm1(delta / a) / N
    raw = a * np.log1p(b * np.arange(N + 1))
    np.testing.assert_allclose(ControlFunction.logarithmic(a=a).profile(N, delta), raw, atol=1e-13)
