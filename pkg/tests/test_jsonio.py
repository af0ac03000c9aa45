import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings

from neurocascade import jsonio
from neurocascade.automata import compose_network, cyclic_group, group_semiautomaton, is_group_free
from neurocascade.compiler import NeuronChoice, compile_cascade, run_letters
from neurocascade.errors import InvalidInputError
from neurocascade.neurons import make_c2_tanh, make_sign_flipflop, make_synthetic_group_neuron, make_tanh_toggle
from neurocascade.patterns import cookie_cascade, parity_spec, rotation_network, simulate_episode, ttop_cascade
from strategies import spec_and_word

FIXTURES = Path(__file__).parent / "fixtures"


def round_trip(kind, obj):
    to, back = jsonio.KINDS[kind]
    doc = json.loads(jsonio.dumps(to(obj)))
    return back(doc), doc


def test_semiautomaton_round_trip():
    s = group_semiautomaton(cyclic_group(3), {"x": 1, "y": 2})
    back, doc = round_trip("semiautomaton", s)
    assert doc["transitions"]["0|1"] == "1"
    assert back.states == s.states and (back.delta == s.delta).all()


def test_automaton_round_trip():
    a, _ = parity_spec()
    back, _ = round_trip("automaton", a)
    assert back.run("aaaa") == a.run("aaaa")


def test_product_states_as_lists():
    flat = compose_network(rotation_network())
    back, doc = round_trip("semiautomaton", flat)
    assert doc["states"][0] == ["low", "low"]
    assert back.states == flat.states


@pytest.mark.parametrize("spec", [
    make_sign_flipflop(2, 0.3), make_tanh_toggle(-3), make_c2_tanh(-2, -1),
    make_synthetic_group_neuron(cyclic_group(3)),
])
def test_neuron_round_trip(spec):
    back, doc = round_trip("neuron", spec)
    assert back.state_partition == spec.state_partition
    assert back.input_partition == spec.input_partition
    assert back.w == spec.w and back.activation == spec.activation
    text = json.dumps(doc)
    assert "Infinity" not in text


def test_infinite_bounds_use_sentinels():
    doc = jsonio.neuron_to_json(make_sign_flipflop(1))
    ends = {p["name"]: (p["lo"], p["hi"]) for p in doc["input_partition"]}
    assert ends["set"][1] == "inf" and ends["reset"][0] == "-inf"


def test_cascade_round_trip_keeps_output():
    spec = cookie_cascade()
    back, _ = round_trip("cascade", spec)
    episode = [o.letter for o in simulate_episode(1, 60)]
    assert back.run(episode) == spec.run(episode)


@settings(max_examples=40, deadline=None)
@given(spec_and_word())
def test_cascade_round_trip_dynamics(sw):
    spec, word = sw
    back, _ = round_trip("cascade", spec)
    assert back.run_states(word) == spec.run_states(word)


def test_rnc_round_trip():
    spec = ttop_cascade(2)
    r = compile_cascade(spec, NeuronChoice("tanh", 2.0))
    back, doc = round_trip("rnc", r)
    assert doc["approximator"] is None
    word = ["0", "3", "1", "2", "0", "3", "1"]
    a, ta = run_letters(r, word)
    b, tb = run_letters(back, word)
    assert a == b and np.array_equal(ta.states, tb.states)


def test_network_witness_fixture():
    kind, net = jsonio.load_any(FIXTURES / "network_witness.json")
    assert kind == "cascade" and net.architecture == "network"
    assert len(net.components) == 2 and all(c.kind == "flipflop" for c in net.components)
    assert not is_group_free(compose_network(net))


def test_price_and_episode_files(tmp_path):
    jsonio.save_prices([1, 2, 3], tmp_path / "prices_a.json")
    assert jsonio.load_prices(tmp_path / "prices_a.json") == [1, 2, 3]
    ep = simulate_episode(2, 30)
    jsonio.save_episode(ep, tmp_path / "cookie_episode_a.jsonl")
    assert jsonio.load_episode(tmp_path / "cookie_episode_a.jsonl") == ep


def test_bad_documents(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(InvalidInputError):
        jsonio.load_any(p)
    p.write_text('{"foo": 1}')
    with pytest.raises(InvalidInputError):
        jsonio.load_any(p)
    p.write_text('[-1]')
    with pytest.raises(InvalidInputError):
        jsonio.load_prices(p)
    doc = jsonio.cascade_to_json(rotation_network())
    del doc["components"][0]["input_fn"]["a|low"]
    with pytest.raises(InvalidInputError):
        jsonio.cascade_from_json(doc)
