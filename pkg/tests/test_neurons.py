import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neurocascade.automata import cyclic_group
from neurocascade.errors import InvalidInputError, ParameterError
from neurocascade.neurons import (
    C2,
    Interval,
    convergent_inputs,
    interpretation_alternates,
    make_c2_sign,
    make_c2_tanh,
    make_sign_flipflop,
    make_sign_toggle,
    make_synthetic_group_neuron,
    make_tanh_flipflop,
    make_tanh_toggle,
    neuron_step,
    optimal_tanh_ab,
    settles,
    state_interpretation,
    trajectory,
    verify_core_conditions,
)

INF = math.inf


def bounds(spec, name, part="input"):
    iv = (spec.input_interval if part == "input" else spec.state_interval)(name)
    return iv.lo, iv.hi


# -- sign flip-flop --------------------------------------------------------

def test_sign_flipflop_intervals():
    s = make_sign_flipflop(1, 0.5)
    assert bounds(s, "read") == (-0.5, 0.5)
    assert bounds(s, "set") == (1.5, INF)
    assert bounds(s, "reset") == (-INF, -1.5)
    assert bounds(s, "low", "state") == (-1, -1)
    assert bounds(s, "high", "state") == (1, 1)


def test_sign_flipflop_steps():
    s = make_sign_flipflop(1, 0.5)
    assert neuron_step(s, -1, 2.0) == 1
    assert neuron_step(s, 1, 0.0) == 1
    assert neuron_step(s, -1, 0.0) == -1


@pytest.mark.parametrize("w, a", [(0, 0.5), (-1, 0.5), (1, 0), (1, 1)])
def test_sign_flipflop_rejects(w, a):
    with pytest.raises(ParameterError):
        make_sign_flipflop(w, a)


# -- tanh flip-flop --------------------------------------------------------

def test_tanh_flipflop_intervals():
    s = make_tanh_flipflop(2, -0.4407, 0.4407)
    lo, hi = bounds(s, "read")
    assert lo == pytest.approx(-0.5328, abs=1e-4)
    assert hi == pytest.approx(0.5328, abs=1e-4)
    assert bounds(s, "high", "state")[0] == pytest.approx(0.7071, abs=1e-4)


def test_tanh_flipflop_degenerate_rejected():
    with pytest.raises(ParameterError, match="a < b"):
        make_tanh_flipflop(2, 0, 0)


def test_tanh_flipflop_inequality_reported():
    with pytest.raises(ParameterError, match="tanh"):
        make_tanh_flipflop(2, -2.0, 2.0)


def test_tanh_flipflop_set_midpoint_lands_high():
    s = make_tanh_flipflop(2)
    v = s.input_interval("set").representative()
    assert state_interpretation(s, neuron_step(s, 1.0, v)) == "high"


def test_optimal_ab():
    a, b = optimal_tanh_ab(2)
    assert b == pytest.approx(0.44068, abs=1e-5) and a == -b
    # artanh(sqrt(3)/2) / 4 = 1.316958 / 4
    assert optimal_tanh_ab(4)[1] == pytest.approx(0.329239, abs=1e-6)
    assert optimal_tanh_ab(1 + 1e-9)[1] < 1e-3
    with pytest.raises(ParameterError):
        optimal_tanh_ab(1)


def test_optimal_ab_is_unit_slope():
    for w in (1.5, 2, 5, 10):
        a, b = optimal_tanh_ab(w)
        for x in (a, b):
            assert w * (1 - math.tanh(w * x) ** 2) == pytest.approx(1.0)


# -- toggles ---------------------------------------------------------------

def test_sign_toggle():
    s = make_sign_toggle(-1, 0.5)
    assert bounds(s, "toggle") == (-0.5, 0.5)
    assert neuron_step(s, -1, 0) == 1
    assert neuron_step(s, 1, 0) == -1
    with pytest.raises(ParameterError):
        make_sign_toggle(1, 0.5)


def test_tanh_toggle():
    s = make_tanh_toggle(-2, -0.4407, 0.4407)
    lo, hi = bounds(s, "high", "state")
    assert lo == pytest.approx(0.7071, abs=1e-4) and hi == 1
    v = s.input_interval("toggle").representative()
    assert state_interpretation(s, neuron_step(s, 0.9, v)) == "low"
    with pytest.raises(ParameterError):
        make_tanh_toggle(-2, 0.3, 0.3)
    with pytest.raises(ParameterError):
        make_tanh_toggle(-0.5)


# -- second order ----------------------------------------------------------

def test_c2_sign():
    s = make_c2_sign(1, 0.5)
    assert neuron_step(s, 1, -1) == -1
    assert neuron_step(s, -1, -1) == 1
    assert neuron_step(s, -1, 1) == -1
    with pytest.raises(ParameterError):
        make_c2_sign(1, -0.5)


def test_c2_tanh():
    s = make_c2_tanh(2, 1)
    fa = math.tanh(2)
    assert fa == pytest.approx(0.9640, abs=1e-4)
    assert bounds(s, "0")[0] == pytest.approx(1.0373, abs=1e-4)
    assert neuron_step(s, fa, 1 / fa) == pytest.approx(fa)
    assert state_interpretation(s, neuron_step(s, -fa, -1 / fa)) == "1"
    with pytest.raises(ParameterError):
        make_c2_tanh(2, -1)


# -- synthetic -------------------------------------------------------------

def test_synthetic_c2_layout():
    s = make_synthetic_group_neuron(C2, 0.1)
    assert bounds(s, "1", "state") == pytest.approx((0.4, 0.6))
    assert bounds(s, "0", "state") == pytest.approx((-0.1, 0.1))


def test_synthetic_trivial_group():
    s = make_synthetic_group_neuron([[0]], 0.2)
    assert len(s.state_partition) == 1
    assert neuron_step(s, 0.1, -0.1) == 0.0


def test_synthetic_c3_step():
    s = make_synthetic_group_neuron(cyclic_group(3), 0.1)
    x = s.state_interval("2").representative()
    v = s.input_interval("2").representative()
    assert state_interpretation(s, neuron_step(s, x, v)) == "1"


def test_synthetic_margin_range():
    with pytest.raises(ParameterError):
        make_synthetic_group_neuron(C2, 0.3)
    with pytest.raises(InvalidInputError):
        make_synthetic_group_neuron([[0, 0], [0, 0]], 0.1)


# -- raw dynamics and interpretation ---------------------------------------

def test_neuron_step_examples():
    assert neuron_step(make_sign_flipflop(1), 0, 0) == 1
    t = make_tanh_flipflop(2)
    assert neuron_step(t, 0, 0) == 0
    assert neuron_step(t, 1, 1) == pytest.approx(0.99505, abs=1e-5)


def test_state_interpretation_examples():
    assert state_interpretation(make_sign_flipflop(1), 1) == "high"
    t = make_tanh_flipflop(2)
    assert state_interpretation(t, 0.0) is None
    assert state_interpretation(t, -1.0) == "low"


def test_interval_rejects_reversed():
    with pytest.raises(InvalidInputError):
        Interval(1, 0)


# -- condition verification ------------------------------------------------

def test_verify_examples_pass():
    for spec in (make_sign_flipflop(1, 0.5), make_tanh_flipflop(2), make_tanh_toggle(-2),
                 make_c2_tanh(-3, -0.5), make_synthetic_group_neuron(cyclic_group(4))):
        report = verify_core_conditions(spec)
        assert report.passed, report.to_json()
        assert report.method.startswith("corner-exact")


def test_widened_read_fails_with_witness():
    spec = make_tanh_flipflop(2)
    iv = spec.input_interval("read")
    bad = spec.with_input_interval("read", Interval(iv.lo, iv.hi + 0.05))
    report = verify_core_conditions(bad)
    assert not report.passed
    failed = {c.label: c for c in report.conditions if not c.ok}
    assert "read preserves low" in failed
    w = failed["read preserves low"].witness
    assert w["v"] > iv.hi
    assert bad.interpret(bad.step(w["x"], w["v"])) != "low"


# -- properties ------------------------------------------------------------

def random_spec(kind, rng):
    if kind == "sign_ff":
        return make_sign_flipflop(rng.uniform(1e-3, 10), rng.uniform(0.01, 0.99))
    if kind == "tanh_ff":
        return make_tanh_flipflop(rng.uniform(1.01, 10))
    if kind == "sign_toggle":
        return make_sign_toggle(-rng.uniform(1e-3, 10), rng.uniform(0.01, 0.99))
    if kind == "tanh_toggle":
        return make_tanh_toggle(-rng.uniform(1.01, 10))
    if kind == "c2_sign":
        s = rng.choice([-1.0, 1.0])
        return make_c2_sign(s * rng.uniform(0.1, 10), s * rng.uniform(0.1, 2))
    s = rng.choice([-1.0, 1.0])
    return make_c2_tanh(s * rng.uniform(0.1, 10), s * rng.uniform(0.1, 2))


KINDS = ["sign_ff", "tanh_ff", "sign_toggle", "tanh_toggle", "c2_sign", "c2_tanh"]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(KINDS), st.integers(0, 2**32 - 1))
def test_constructor_interval_invariants(kind, seed):
    spec = random_spec(kind, np.random.default_rng(seed))
    for parts in (spec.state_partition, spec.input_partition):
        ivs = [iv for _, iv in parts]
        for i in range(len(ivs)):
            assert ivs[i].lo <= ivs[i].hi
            for j in range(i + 1, len(ivs)):
                assert ivs[i].disjoint(ivs[j])
    assert all(iv.length > 0 for _, iv in spec.input_partition)


@pytest.mark.parametrize("kind", KINDS)
def test_corner_and_grid_agree(kind):
    rng = np.random.default_rng(7)
    for _ in range(100):
        spec = random_spec(kind, rng)
        corner = verify_core_conditions(spec, grid=0)
        full = verify_core_conditions(spec, grid=1000)
        assert corner.passed and full.passed
        assert [c.corner_ok for c in corner.conditions] == [c.grid_ok for c in full.conditions]


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 10), st.floats(0.01, 0.99), st.floats(0, 1))
def test_sign_flipflop_sampled(w, a, t):
    s = make_sign_flipflop(w, a)
    lo, hi = bounds(s, "read")
    v = lo + t * (hi - lo)
    assert s.step(-1, v) == -1 and s.step(1, v) == 1
    v_set = s.input_interval("set").lo + 10 * t
    assert s.step(-1, v_set) == 1 and s.step(1, v_set) == 1


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 10), st.floats(0, 1), st.floats(0, 1))
def test_tanh_flipflop_read_preserves(w, tx, tv):
    s = make_tanh_flipflop(w)
    lo, hi = bounds(s, "read")
    v = lo + tv * (hi - lo)
    for name in ("low", "high"):
        X = s.state_interval(name)
        x = X.lo + tx * (X.hi - X.lo)
        y = s.step(x, v)
        assert X.lo - 1e-12 <= y <= X.hi + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["c2_sign", "c2_tanh"]), st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_c2_interpretation_matches_table(kind, seed, tx, tv):
    spec = random_spec(kind, np.random.default_rng(seed))
    for i in ("0", "1"):
        X = spec.state_interval(i)
        x = X.lo + tx * (X.hi - X.lo)
        for j in ("0", "1"):
            lo, hi = spec.input_interval(j).truncated()
            v = lo + tv * (hi - lo)
            got = spec.interpret(spec.step(x, v))
            assert got == str(C2[int(i), int(j)])


def test_toggle_alternates_1000_steps():
    s = make_tanh_toggle(-2)
    v = s.input_interval("toggle").representative()
    xs = trajectory("tanh", s.w, -1.0, np.full(1000, v))
    assert interpretation_alternates(s, xs)


def test_convergence_probe():
    rng = np.random.default_rng(0)
    for _ in range(100):
        act = ["tanh", "sign"][int(rng.integers(0, 2))]
        w = rng.uniform(1e-6, 5)
        v_star = rng.uniform(-3, 3)
        xs = trajectory(act, w, rng.uniform(-1, 1), convergent_inputs(v_star, 1200))
        assert settles(xs, 200, 1e-9)
