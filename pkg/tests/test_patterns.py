import numpy as np
import pytest

from neurocascade.automata import cascade_automaton, is_group_free, run_automaton
from neurocascade.compiler import NeuronChoice, check_equivalence, compile_cascade
from neurocascade.errors import InvalidInputError, ParameterError
from neurocascade.patterns import (
    CookieObservation,
    PriceSequence,
    cookie_alphabet,
    cookie_cascade,
    cookie_probabilities,
    cookie_reference,
    parity_spec,
    planted_prices,
    random_prices,
    simulate_episode,
    ttop_cascade,
    ttop_reference,
)
from neurocascade.patterns.ttop import component_count

TTOP_FIXTURE = [0, 1, 2, 3, 14, 2, 12, 4, 10, 6, 5]


# -- TTOP oracle -----------------------------------------------------------

def test_increasing_prices_never_fire():
    assert ttop_reference(list(range(16))) == [0] * 16


def test_constant_prices_never_fire():
    assert ttop_reference([7] * 12) == [0] * 12


def test_fixture_fires_after_fifth_extremum():
    out = ttop_reference(TTOP_FIXTURE)
    assert out == [0] * 9 + [1, 1]


def test_rising_maximum_resets_count():
    # the third maximum is higher than the first, so the count restarts
    assert ttop_reference([0, 14, 2, 15, 4, 10, 6])[-1] == 0


def test_price_range_checked():
    with pytest.raises(InvalidInputError):
        PriceSequence([16], 4)


def test_empty_sequence():
    assert ttop_reference([]) == []


# -- TTOP cascade ----------------------------------------------------------

def test_component_layout():
    spec = ttop_cascade(4)
    assert len(spec.components) == component_count(4) == 21
    names = [c.name for c in spec.components]
    assert names[4] == "slope" and spec.components[4].initial_state == "high"
    counts = [c for c in spec.components if c.name.startswith("count")]
    assert [c.initial_state for c in counts] == ["high"] + ["low"] * 5
    assert all(c.kind == "flipflop" for c in spec.components)


@pytest.mark.parametrize("bits", [0, 17])
def test_bits_out_of_range(bits):
    with pytest.raises(ParameterError):
        ttop_cascade(bits)


@pytest.mark.parametrize("bits", [2, 3, 4])
def test_cascade_agrees_with_oracle(bits):
    spec = ttop_cascade(bits)
    flat = cascade_automaton(spec)
    rng = np.random.default_rng(bits)
    for k in range(200):
        seq = planted_prices(rng, bits) if bits >= 3 and k % 2 else random_prices(rng, bits)
        expected = [str(y) for y in ttop_reference(seq)]
        assert run_automaton(flat, seq.letters()) == expected
        assert spec.run(seq.letters()) == expected


def test_planted_corpus_mixes_outcomes():
    rng = np.random.default_rng(0)
    fired = sum(any(ttop_reference(planted_prices(rng, 4))) for _ in range(100))
    assert 0 < fired < 100


def test_sixteen_bits_compiles_and_runs():
    spec = ttop_cascade(16)
    r = compile_cascade(spec, NeuronChoice("tanh", 2.0))
    prices = [100, 60000, 5, 50000, 900, 40000, 2000, 1]
    res = check_equivalence(r, spec, words=[[str(p) for p in prices]])
    assert res.equivalent
    assert ttop_reference(prices)[-2:] == [1, 1]


# -- Cookie ----------------------------------------------------------------

def obs(loc, **flags):
    return CookieObservation.at(loc, **flags)


def test_observation_needs_one_location():
    with pytest.raises(InvalidInputError):
        CookieObservation(greenRoom=True, blueRoom=True)
    with pytest.raises(InvalidInputError):
        CookieObservation()


def test_letter_round_trip():
    for letter in cookie_alphabet():
        assert CookieObservation.from_letter(letter).letter == letter
    assert len(cookie_alphabet()) == 32


def test_no_cookie_before_button():
    probs = cookie_probabilities([obs("hallway"), obs("green"), obs("hallway"), obs("blue")])
    assert probs == [0.0, 0.0, 0.0, 0.0]


def test_half_after_button():
    seq = [obs("orange", buttonPushed=True), obs("hallway"), obs("green", cookie=True, cookieEaten=True)]
    assert cookie_probabilities(seq) == [0.0, 0.0, 0.5]


def test_certain_after_empty_room():
    seq = [obs("orange", buttonPushed=True), obs("hallway"), obs("blue"), obs("hallway"),
           obs("green", cookie=True, cookieEaten=True)]
    assert cookie_probabilities(seq)[-1] == 1.0


def test_cascade_flipflop_inputs():
    spec = cookie_cascade()
    f1, f2, f3 = spec.components
    pushed = spec.alphabet.index("orange+buttonPushed")
    blue_empty = spec.alphabet.index("blue")
    assert f1.internal_alphabet[f1.table[pushed]] == "set"
    assert f2.internal_alphabet[f2.table[pushed]] == "reset"
    assert f3.internal_alphabet[f3.table[blue_empty]] == "set"
    q = spec.run_states(["orange+buttonPushed", "hallway", "blue"])[-1]
    assert q == ("high", "high", "high")


def test_cascade_matches_reference():
    spec = cookie_cascade()
    for seed in range(20):
        observations, probs = cookie_reference(seed, 100)
        got = spec.run([o.letter for o in observations])
        assert [float(y) for y in got] == probs


def test_simulator_respects_rules():
    observations = simulate_episode(3, 500)
    assert observations[0].location == "hallway"
    for prev, cur in zip(observations, observations[1:]):
        if cur.buttonPushed:
            assert cur.location == "orange" and prev.location == "orange"
        assert cur.cookie == cur.cookieEaten
        if prev.location != "hallway":
            assert cur.location in (prev.location, "hallway")
    with pytest.raises(InvalidInputError):
        simulate_episode(0, 0)


def test_cookie_cascade_group_free():
    flat = cascade_automaton(cookie_cascade(), reachable=False).semiautomaton
    assert is_group_free(flat)


# -- parity ----------------------------------------------------------------

def test_parity_examples():
    a, spec = parity_spec()
    assert a.run("a") == ["1"]
    assert a.run("aa") == ["1", "0"]
    assert a.run("") == []
    assert spec.run("aaa") == ["1", "0", "1"]
    assert not is_group_free(a.semiautomaton)
