"""JSON documents for semiautomata, automata, cascades, neurons and compiled RNCs.

Every table is an explicit object whose keys join the letter and/or states
with ``|``. Product states are written as lists and their parts are joined
into keys the same way. Unbounded interval ends are the strings ``"inf"``
and ``"-inf"``.
"""
import json
from pathlib import Path

import numpy as np

from .automata import Automaton, CascadeSpec, Component, OutputFunction, Semiautomaton, prime_core
from .compiler import RNC, PiecewiseInputMap, SymbolGrounding
from .errors import InvalidInputError
from .neurons import NeuronSpec, interval_from_json, interval_to_json

SEP = "|"


def _parts(q):
    return list(q) if isinstance(q, tuple) else [q]


def _key(*parts):
    out = []
    for p in parts:
        out.extend(str(x) for x in _parts(p))
    return SEP.join(out)


def _state_json(q):
    return list(q) if isinstance(q, tuple) else q


def _state_parse(q):
    return tuple(q) if isinstance(q, list) else q


def _require(obj, *keys):
    missing = [k for k in keys if k not in obj]
    if missing:
        raise InvalidInputError(f"missing keys {missing}")


def _lookup(table, key):
    try:
        return table[key]
    except KeyError:
        raise InvalidInputError(f"table has no entry for {key!r}") from None


# -- semiautomata and automata ---------------------------------------------

def semiautomaton_to_json(s):
    internal = s.internal_alphabet if s.internal_alphabet is not None else s.alphabet
    doc = {"alphabet": list(s.alphabet), "states": [_state_json(q) for q in s.states]}
    if s.input_fn is not None:
        doc["internal_alphabet"] = list(internal)
        doc["input_fn"] = {a: internal[k] for a, k in zip(s.alphabet, s.input_fn)}
    doc["transitions"] = {
        _key(q, p): _state_json(s.states[s.table[i, k]])
        for i, q in enumerate(s.states) for k, p in enumerate(internal)
    }
    return doc


def semiautomaton_from_json(doc):
    _require(doc, "alphabet", "states", "transitions")
    states = [_state_parse(q) for q in doc["states"]]
    alphabet = list(doc["alphabet"])
    internal = doc.get("internal_alphabet")
    cols = internal if internal is not None else alphabet
    index = {q: i for i, q in enumerate(states)}
    table = np.empty((len(states), len(cols)), dtype=np.int64)
    for i, q in enumerate(states):
        for k, p in enumerate(cols):
            nxt = _state_parse(_lookup(doc["transitions"], _key(q, p)))
            if nxt not in index:
                raise InvalidInputError(f"transition to unknown state {nxt!r}")
            table[i, k] = index[nxt]
    phi = None
    if internal is not None:
        fn = doc.get("input_fn")
        if fn is None:
            raise InvalidInputError("internal_alphabet given without input_fn")
        try:
            phi = [internal.index(fn[a]) for a in alphabet]
        except (KeyError, ValueError) as e:
            raise InvalidInputError(f"input function is not total into the internal alphabet: {e}") from None
    return Semiautomaton(alphabet, states, table, internal, phi)


def automaton_to_json(a):
    doc = semiautomaton_to_json(a.semiautomaton)
    doc["initial"] = _state_json(a.initial)
    doc["output_alphabet"] = list(a.output_alphabet)
    doc["outputs"] = {
        _key(q, s): a.output_alphabet[a.outputs[i, k]]
        for i, q in enumerate(a.states) for k, s in enumerate(a.alphabet)
    }
    return doc


def automaton_from_json(doc):
    _require(doc, "initial", "output_alphabet", "outputs")
    s = semiautomaton_from_json(doc)
    gamma = list(doc["output_alphabet"])
    outputs = np.empty((len(s.states), len(s.alphabet)), dtype=np.int64)
    for i, q in enumerate(s.states):
        for k, a in enumerate(s.alphabet):
            y = _lookup(doc["outputs"], _key(q, a))
            if y not in gamma:
                raise InvalidInputError(f"output {y!r} is not in the output alphabet")
            outputs[i, k] = gamma.index(y)
    return Automaton(s, _state_parse(doc["initial"]), gamma, outputs)


# -- cascades --------------------------------------------------------------

def _table_to_json(table, alphabet, axes, names):
    out = {}
    for idx in np.ndindex(*table.shape):
        key = _key(alphabet[idx[0]], *[axes[k][j] for k, j in enumerate(idx[1:])])
        out[key] = names[table[idx]]
    return out


def _table_from_json(obj, alphabet, axes, names):
    shape = (len(alphabet),) + tuple(len(a) for a in axes)
    table = np.empty(shape, dtype=np.int64)
    for idx in np.ndindex(*shape):
        key = _key(alphabet[idx[0]], *[axes[k][j] for k, j in enumerate(idx[1:])])
        value = _lookup(obj, key)
        if value not in names:
            raise InvalidInputError(f"entry {key!r} maps to {value!r}, expected one of {list(names)}")
        table[idx] = names.index(value)
    return table


def cascade_to_json(spec):
    comps = []
    states = [c.states for c in spec.components]
    for c in spec.components:
        doc = {"name": c.name, "kind": c.kind, "reads": list(c.reads), "initial": c.initial_state}
        if c.kind == "group":
            doc["cayley"] = c.cayley.tolist()
        doc["input_fn"] = _table_to_json(
            c.tabulated(), spec.alphabet, [states[r] for r in c.reads], list(c.internal_alphabet)
        )
        comps.append(doc)
    doc = {"alphabet": list(spec.alphabet), "architecture": spec.architecture, "components": comps}
    if spec.output is not None:
        o = spec.output
        doc["output"] = {
            "alphabet": list(o.alphabet),
            "reads": list(o.reads),
            "table": _table_to_json(o.tabulated(), spec.alphabet, [states[r] for r in o.reads], list(o.alphabet)),
        }
    return doc


def cascade_from_json(doc):
    _require(doc, "alphabet", "components")
    alphabet = list(doc["alphabet"])
    arch = doc.get("architecture", "cascade")
    raw = doc["components"]
    if not isinstance(raw, list) or not raw:
        raise InvalidInputError("components must be a non-empty list")
    kinds = []
    for c in raw:
        _require(c, "kind", "input_fn")
        kinds.append(prime_core(c["kind"], c.get("cayley")))
    comps = []
    for i, c in enumerate(raw):
        reads = tuple(c.get("reads", range(i) if arch == "cascade" else [j for j in range(len(raw)) if j != i]))
        if any(not 0 <= r < len(raw) for r in reads):
            raise InvalidInputError(f"component {i} reads a component that does not exist")
        table = _table_from_json(c["input_fn"], alphabet, [kinds[r][0] for r in reads], list(kinds[i][1]))
        comps.append(Component(c["kind"], reads, table, c.get("name", ""), c.get("cayley"), c.get("initial")))
    output = None
    if "output" in doc:
        o = doc["output"]
        _require(o, "alphabet", "reads", "table")
        reads = tuple(o["reads"])
        table = _table_from_json(o["table"], alphabet, [kinds[r][0] for r in reads], list(o["alphabet"]))
        output = OutputFunction(o["alphabet"], reads, table)
    return CascadeSpec(alphabet, comps, arch, output)


# -- neurons and RNCs ------------------------------------------------------

def neuron_to_json(spec):
    doc = {
        "kind": spec.kind,
        "activation": spec.activation,
        "order": spec.order,
        "w": spec.w,
        "params": dict(spec.params),
        "state_partition": [interval_to_json(n, iv) for n, iv in spec.state_partition],
        "input_partition": [interval_to_json(n, iv) for n, iv in spec.input_partition],
    }
    if spec.cayley is not None:
        doc["cayley"] = spec.cayley.tolist()
    return doc


def neuron_from_json(doc):
    _require(doc, "kind", "activation", "order", "w", "state_partition", "input_partition")
    return NeuronSpec(
        doc["kind"], doc["activation"], int(doc["order"]), float(doc["w"]),
        tuple(interval_from_json(o) for o in doc["state_partition"]),
        tuple(interval_from_json(o) for o in doc["input_partition"]),
        dict(doc.get("params", {})),
        None if doc.get("cayley") is None else np.asarray(doc["cayley"]),
    )


def grounding_to_json(g):
    return {
        "radius": g.radius,
        "regions": [interval_to_json(a, r) for a, r in zip(g.alphabet, g.regions)],
    }


def grounding_from_json(doc):
    _require(doc, "radius", "regions")
    pairs = [interval_from_json(o) for o in doc["regions"]]
    return SymbolGrounding([a for a, _ in pairs], [r for _, r in pairs], float(doc["radius"]))


def rnc_to_json(r):
    states = [n.state_names for n in r.neurons]
    neurons = []
    for i, (n, m) in enumerate(zip(r.neurons, r.maps)):
        doc = neuron_to_json(n)
        doc["name"] = r.names[i] if r.names else ""
        doc["reads"] = list(m.reads)
        values = m.reps[m.tabulated()]
        doc["input_map"] = {
            _key(r.alphabet[idx[0]], *[states[k][j] for k, j in zip(m.reads, idx[1:])]): float(values[idx])
            for idx in np.ndindex(*values.shape)
        }
        neurons.append(doc)
    doc = {
        "alphabet": list(r.alphabet),
        "architecture": r.architecture,
        "neurons": neurons,
        "initial": [float(x) for x in r.initial],
        "grounding": grounding_to_json(r.grounding),
        "approximator": None,
    }
    if r.output is not None:
        o = r.output
        doc["output_table"] = {
            "alphabet": list(o.alphabet),
            "reads": list(o.reads),
            "table": _table_to_json(o.tabulated(), r.alphabet, [states[k] for k in o.reads], list(o.alphabet)),
        }
    return doc


def rnc_from_json(doc):
    _require(doc, "alphabet", "neurons", "initial", "grounding")
    if doc.get("approximator") is not None:
        raise InvalidInputError("learned approximators are not supported; expected approximator: null")
    alphabet = list(doc["alphabet"])
    specs = [neuron_from_json(n) for n in doc["neurons"]]
    states = [s.state_names for s in specs]
    maps = []
    for i, (n, spec) in enumerate(zip(doc["neurons"], specs)):
        reads = tuple(n.get("reads", ()))
        if any(not 0 <= r < len(specs) for r in reads):
            raise InvalidInputError(f"neuron {i} reads a neuron that does not exist")
        shape = (len(alphabet),) + tuple(len(states[r]) for r in reads)
        values = np.empty(shape)
        for idx in np.ndindex(*shape):
            values[idx] = float(_lookup(n["input_map"], _key(alphabet[idx[0]], *[states[r][j] for r, j in zip(reads, idx[1:])])))
        reps, table = np.unique(values, return_inverse=True)
        targets = [_input_target(spec, v) for v in reps]
        maps.append(PiecewiseInputMap(reads, reps, targets, table.reshape(shape)))
    output = None
    if doc.get("output_table") is not None:
        o = doc["output_table"]
        _require(o, "alphabet", "reads", "table")
        reads = tuple(o["reads"])
        table = _table_from_json(o["table"], alphabet, [states[r] for r in reads], list(o["alphabet"]))
        output = OutputFunction(o["alphabet"], reads, table)
    names = tuple(n.get("name", "") for n in doc["neurons"])
    return RNC(alphabet, specs, maps, doc["initial"], grounding_from_json(doc["grounding"]), output,
               doc.get("architecture", "cascade"), names)


def _input_target(spec, v):
    for k, (_, iv) in enumerate(spec.input_partition):
        if v in iv:
            return k
    raise InvalidInputError(f"input map value {v} lies in no input interval")


# -- files -----------------------------------------------------------------

KINDS = {
    "semiautomaton": (semiautomaton_to_json, semiautomaton_from_json),
    "automaton": (automaton_to_json, automaton_from_json),
    "cascade": (cascade_to_json, cascade_from_json),
    "neuron": (neuron_to_json, neuron_from_json),
    "rnc": (rnc_to_json, rnc_from_json),
}


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False)


def save(kind, obj, path):
    Path(path).write_text(dumps(KINDS[kind][0](obj)) + "\n")


def load(kind, path):
    return KINDS[kind][1](read_json(path))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path}: not valid JSON ({e})") from None


def detect_kind(doc):
    """Best guess of which document type ``doc`` is."""
    if "neurons" in doc:
        return "rnc"
    if "components" in doc:
        return "cascade"
    if "outputs" in doc:
        return "automaton"
    if "transitions" in doc:
        return "semiautomaton"
    if "state_partition" in doc:
        return "neuron"
    raise InvalidInputError("unrecognised document")


def load_any(path):
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise InvalidInputError(f"{path}: expected a JSON object")
    kind = detect_kind(doc)
    return kind, KINDS[kind][1](doc)


# -- fixtures --------------------------------------------------------------

def save_prices(prices, path):
    Path(path).write_text(json.dumps([int(p) for p in prices]) + "\n")


def load_prices(path):
    doc = read_json(path)
    if not isinstance(doc, list) or not all(isinstance(p, int) and p >= 0 for p in doc):
        raise InvalidInputError(f"{path}: expected an array of non-negative integers")
    return doc


def save_episode(observations, path):
    lines = [json.dumps(o.to_json()) for o in observations]
    Path(path).write_text("\n".join(lines) + "\n")


def load_episode(path):
    from .patterns.cookie import CookieObservation

    out = []
    for n, line in enumerate(Path(path).read_text().splitlines()):
        if line.strip():
            try:
                out.append(CookieObservation.from_json(json.loads(line)))
            except (json.JSONDecodeError, TypeError) as e:
                raise InvalidInputError(f"{path}:{n + 1}: bad observation ({e})") from None
    return out

