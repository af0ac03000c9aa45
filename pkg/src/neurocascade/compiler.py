"""Compile cascades of prime semiautomata into recurrent neural cascades.

Input functions and the output function are realised as exact
piecewise-constant tables: a real input is grounded to a letter, the letter
and the interpreted states of the read neurons select a table entry, and
that entry is a representative point of the target input interval.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .automata import CascadeSpec, OutputFunction, Semiautomaton, _Lookup
from .errors import CapacityError, GroundingError, IntegrityError, InvalidInputError, ParameterError
from .neurons import (
    Interval,
    NeuronSpec,
    make_c2_sign,
    make_c2_tanh,
    make_sign_flipflop,
    make_sign_toggle,
    make_synthetic_group_neuron,
    make_tanh_flipflop,
    make_tanh_toggle,
)

MAX_WITNESSES = 20


@dataclass(frozen=True)
class SymbolGrounding:
    """Letter ``k`` owns the closed region ``regions[k]``."""

    alphabet: tuple
    regions: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "regions", tuple(self.regions))
        if len(self.alphabet) != len(self.regions) or not self.alphabet:
            raise InvalidInputError("every letter needs exactly one region")
        if not self.radius > 0:
            raise InvalidInputError("robustness radius must be positive")
        for k, r in enumerate(self.regions):
            if r.length < 2 * self.radius:
                raise InvalidInputError(f"region of {self.alphabet[k]!r} is shorter than 2 * radius")
        order = sorted(range(len(self.regions)), key=lambda k: self.regions[k].lo)
        for a, b in zip(order, order[1:]):
            if not self.regions[a].disjoint(self.regions[b]):
                raise InvalidInputError(f"regions of {self.alphabet[a]!r} and {self.alphabet[b]!r} overlap")

    def ground(self, u):
        k = self.ground_index(u)
        return None if k < 0 else self.alphabet[k]

    def ground_index(self, u):
        for k, r in enumerate(self.regions):
            if u in r:
                return k
        return -1

    def ground_indices(self, us):
        us = np.asarray(us, dtype=float)
        out = np.full(us.shape, -1, dtype=np.int64)
        for k, r in enumerate(self.regions):
            out[(us >= r.lo) & (us <= r.hi)] = k
        return out

    def midpoint(self, letter):
        return self.regions[self.alphabet.index(letter)].representative()

    def realise(self, word):
        return [self.midpoint(s) for s in word]


def default_grounding(alphabet):
    """Letter ``k`` owns ``[k - 0.25, k + 0.25]``."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise InvalidInputError("alphabet must be non-empty")
    return SymbolGrounding(alphabet, tuple(Interval(k - 0.25, k + 0.25) for k in range(len(alphabet))), 0.25)


def ground(g, u):
    return g.ground(u)


@dataclass(frozen=True, eq=False)
class PiecewiseInputMap(_Lookup):
    """Exact piecewise-constant input map of one neuron.

    ``table[letter, s_1..s_k]`` (or ``rule``) picks a symbol ``p``; the
    neuron then receives ``reps[p]``, a point strictly inside its input
    interval number ``targets[p]``.
    """

    reads: tuple
    reps: np.ndarray
    targets: np.ndarray
    table: np.ndarray = None
    rule: object = None
    shape: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "reads", tuple(int(r) for r in self.reads))
        object.__setattr__(self, "reps", np.asarray(self.reps, dtype=float))
        object.__setattr__(self, "targets", np.asarray(self.targets, dtype=np.int64))
        object.__setattr__(self, "_dtype", np.int64)
        if self.reps.shape != self.targets.shape:
            raise InvalidInputError("one target interval per representative value is required")
        if self.table is None:
            if self.rule is None or self.shape is None:
                raise InvalidInputError("input map needs a table or a rule with its shape")
            object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        else:
            table = np.asarray(self.table, dtype=np.int64)
            self._check_range(table)
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "shape", table.shape)
        if len(self.shape) != 1 + len(self.reads):
            raise InvalidInputError("input map rank does not match its reads")

    def _check_range(self, table):
        if table.size and (table.min() < 0 or table.max() >= len(self.reps)):
            raise InvalidInputError("input map points outside its representative values")

    def values_for(self, letters, *states):
        return self.reps[self.lookup(letters, *states)]

    @property
    def values(self):
        """Fully tabulated real values, ``values[letter, s_1..s_k]``."""
        return self.reps[self.tabulated()]

    def check(self, spec):
        names = spec.input_names
        for p, (v, k) in enumerate(zip(self.reps, self.targets)):
            if not 0 <= k < len(names):
                raise InvalidInputError(f"input map symbol {p} targets no input interval")
            iv = spec.input_interval(names[k])
            if not iv.lo < v < iv.hi:
                raise InvalidInputError(f"input map value {v} leaves the interior of {names[k]!r}")


@dataclass(frozen=True)
class NeuronChoice:
    """How to instantiate neurons: activation plus optional parameters.

    ``w`` is used as given for flip-flops; toggles use ``-|w|`` so one weight
    serves cascades mixing both kinds.
    """

    activation: str = "tanh"
    w: float = 2.0
    a: float = None
    b: float = None
    margin: float = None


def neuron_for(kind, choice, cayley=None):
    act, w, a, b = choice.activation, choice.w, choice.a, choice.b
    if kind == "flipflop":
        if act == "sign":
            return make_sign_flipflop(w, 0.5 if a is None else a)
        if act == "tanh":
            return make_tanh_flipflop(w, a, b)
    elif kind == "toggle":
        tw = -abs(w)
        if act == "sign":
            return make_sign_toggle(tw, 0.5 if a is None else a)
        if act == "tanh":
            return make_tanh_toggle(tw, a, b)
    elif kind == "group":
        n = len(cayley)
        if act == "synthetic":
            return make_synthetic_group_neuron(cayley, choice.margin)
        if act in ("sign", "tanh"):
            if n != 2:
                raise ParameterError(f"{act} C2 neuron requested for a group of order {n}")
            return make_c2_sign(w, a) if act == "sign" else make_c2_tanh(w, a)
    raise ParameterError(f"no {act!r} neuron for component kind {kind!r}")


@dataclass(frozen=True, eq=False)
class RNC:
    """Recurrent neural cascade (or network) with piecewise input maps.

    ``output`` reads interpreted neuron states, indexed exactly like the
    source components' states.
    """

    alphabet: tuple
    neurons: tuple
    maps: tuple
    initial: np.ndarray
    grounding: SymbolGrounding
    output: OutputFunction = None
    architecture: str = "cascade"
    names: tuple = ()
    _packed: dict = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "neurons", tuple(self.neurons))
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "initial", np.asarray(self.initial, dtype=float))
        if len(self.neurons) != len(self.maps) or len(self.initial) != len(self.neurons):
            raise InvalidInputError("neurons, maps and initial states must align")
        if not self.neurons:
            raise InvalidInputError("an RNC needs at least one neuron")
        if self.grounding.alphabet != self.alphabet:
            raise InvalidInputError("grounding alphabet differs from the RNC alphabet")
        for i, (spec, m) in enumerate(zip(self.neurons, self.maps)):
            for r in m.reads:
                if r == i or not 0 <= r < len(self.neurons):
                    raise InvalidInputError(f"neuron {i} reads invalid neuron {r}")
                if self.architecture == "cascade" and r > i:
                    raise InvalidInputError(f"cascade neuron {i} reads later neuron {r}")
            m.check(spec)
            if spec.interpret(self.initial[i]) is None:
                raise InvalidInputError(f"initial state of neuron {i} lies outside its state intervals")

    def interpret(self, xs):
        """Interval indices of a state vector (or a ``[..., d]`` batch)."""
        xs = np.asarray(xs, dtype=float)
        return np.stack([n.interpret_index(xs[..., i]) for i, n in enumerate(self.neurons)], axis=-1)

    def inputs_for(self, letters, interps):
        """Per-neuron input values for a batch of letters and interpretations."""
        cols = []
        for m in self.maps:
            cols.append(m.values_for(letters, *(interps[..., r] for r in m.reads)))
        return np.stack(cols, axis=-1)

    def step(self, xs, letters):
        """One synchronous update of a ``[..., d]`` batch of state vectors."""
        xs = np.asarray(xs, dtype=float)
        ps = self.interpret(xs)
        if (ps < 0).any():
            raise IntegrityError("state outside every interval")
        vs = self.inputs_for(letters, ps)
        return np.stack([n.step(xs[..., i], vs[..., i]) for i, n in enumerate(self.neurons)], axis=-1)

    def packed(self):
        """Flat arrays consumed by :func:`kernels.rnc_run`."""
        if self._packed is not None:
            return self._packed
        d = len(self.neurons)
        m = max(max(len(n.state_partition), len(n.input_partition)) for n in self.neurons)
        st_lo = np.zeros((d, m))
        st_hi = np.zeros((d, m))
        in_lo = np.zeros((d, m))
        in_hi = np.zeros((d, m))
        cay = np.zeros((d, m, m), dtype=np.int64)
        st_count = np.zeros(d, dtype=np.int64)
        in_count = np.zeros(d, dtype=np.int64)
        read_ptr = [0]
        reads, strides, letter_stride, tab_ptr, tables = [], [], [], [0], []
        for i, (n, mp) in enumerate(zip(self.neurons, self.maps)):
            st_count[i] = len(n.state_partition)
            for k, (_, iv) in enumerate(n.state_partition):
                st_lo[i, k], st_hi[i, k] = iv.lo, iv.hi
            if n.activation == "synthetic":
                by_name = dict(n.input_partition)
                in_count[i] = len(n.state_names)
                for k, name in enumerate(n.state_names):
                    in_lo[i, k], in_hi[i, k] = by_name[name].lo, by_name[name].hi
                k = n.cayley.shape[0]
                cay[i, :k, :k] = n.cayley
            vals = np.ascontiguousarray(mp.values, dtype=float)
            st = [s // vals.itemsize for s in vals.strides]
            letter_stride.append(st[0])
            reads.extend(mp.reads)
            strides.extend(st[1:])
            read_ptr.append(len(reads))
            tables.append(vals.ravel())
            tab_ptr.append(tab_ptr[-1] + vals.size)
        packed = {
            "codes": np.asarray([n.code for n in self.neurons], dtype=np.int64),
            "orders": np.asarray([n.order for n in self.neurons], dtype=np.int64),
            "ws": np.asarray([n.w for n in self.neurons], dtype=float),
            "st_lo": st_lo, "st_hi": st_hi, "st_count": st_count,
            "in_lo": in_lo, "in_hi": in_hi, "in_count": in_count, "cayley": cay,
            "read_ptr": np.asarray(read_ptr, dtype=np.int64),
            "reads": np.asarray(reads, dtype=np.int64),
            "strides": np.asarray(strides, dtype=np.int64),
            "letter_stride": np.asarray(letter_stride, dtype=np.int64),
            "tab_ptr": np.asarray(tab_ptr, dtype=np.int64),
            "tables": np.concatenate(tables),
        }
        object.__setattr__(self, "_packed", packed)
        return packed


def compile_cascade(spec, choice=None, grounding=None, output=None):
    """Build an RNC whose neuron ``i`` homomorphically represents component ``i``.

    ``choice`` is a :class:`NeuronChoice`, or a sequence with one
    ``NeuronChoice`` or ready-made ``NeuronSpec`` per component.
    """
    if not isinstance(spec, CascadeSpec):
        raise InvalidInputError("expected a CascadeSpec")
    choice = NeuronChoice() if choice is None else choice
    choices = list(choice) if isinstance(choice, (list, tuple)) else [choice] * len(spec.components)
    if len(choices) != len(spec.components):
        raise InvalidInputError("one neuron choice per component is required")
    grounding = default_grounding(spec.alphabet) if grounding is None else grounding
    output = spec.output if output is None else output
    neurons, maps, init = [], [], []
    for c, ch in zip(spec.components, choices):
        n = ch if isinstance(ch, NeuronSpec) else neuron_for(c.kind, ch, c.cayley)
        if n.kind != c.kind:
            raise InvalidInputError(f"neuron kind {n.kind!r} does not match component kind {c.kind!r}")
        if c.kind == "group" and (n.cayley.shape != c.cayley.shape or (n.cayley != c.cayley).any()):
            raise InvalidInputError("group neuron table differs from the component's group")
        reps = [n.input_interval(p).representative() for p in c.internal_alphabet]
        targets = [n.input_names.index(p) for p in c.internal_alphabet]
        try:
            maps.append(PiecewiseInputMap(c.reads, reps, targets, c.tabulated()))
        except CapacityError:
            maps.append(PiecewiseInputMap(c.reads, reps, targets, rule=c.rule, shape=c.shape))
        neurons.append(n)
        init.append(n.state_interval(c.initial_state).representative())
    return RNC(
        spec.alphabet, neurons, maps, init, grounding, output,
        spec.architecture, tuple(c.name for c in spec.components),
    )


compile = compile_cascade


@dataclass
class RunTrace:
    inputs: np.ndarray
    letters: np.ndarray
    states: np.ndarray
    interps: np.ndarray
    outputs: list

    def records(self, rnc):
        """JSON-lines records; step 0 is the initial state."""
        out = []
        for t in range(len(self.inputs) + 1):
            rec = {
                "t": t,
                "u": None if t == 0 else float(self.inputs[t - 1]),
                "letter": None if t == 0 else rnc.alphabet[self.letters[t - 1]],
                "state": [float(x) for x in self.states[t]],
                "interp": [n.state_names[p] for n, p in zip(rnc.neurons, self.interps[t])],
                "y": None if t == 0 else self.outputs[t - 1],
            }
            out.append(rec)
        return out


def rnc_run(r, inputs):
    """Ground real inputs, step all neurons, read outputs on pre-transition states."""
    us = np.asarray(inputs, dtype=float).reshape(-1)
    letters = r.grounding.ground_indices(us)
    bad = np.flatnonzero(letters < 0)
    if bad.size:
        t = int(bad[0])
        raise GroundingError(f"input {us[t]} at position {t} grounds to no letter", position=t)
    try:
        p = r.packed()
    except CapacityError:
        xs, ps, fail_t, fail_i = _run_stepwise(r, letters)
    else:
        xs, ps, fail_t, fail_i = kernels.rnc_run(
            p["codes"], p["orders"], p["ws"], r.initial, p["st_lo"], p["st_hi"], p["st_count"],
            p["in_lo"], p["in_hi"], p["in_count"], p["cayley"], p["read_ptr"], p["reads"],
            p["strides"], p["letter_stride"], p["tab_ptr"], p["tables"], letters,
        )
    if fail_t >= 0:
        name = r.names[fail_i] if r.names and r.names[fail_i] else str(fail_i)
        raise IntegrityError(
            f"neuron {name} left its state intervals at step {fail_t} (x={xs[fail_t, fail_i]})",
            neuron=int(fail_i), step=int(fail_t),
        )
    outputs = []
    if r.output is not None:
        ys = r.output.evaluate(letters, ps[:-1])
        outputs = [r.output.alphabet[y] for y in ys]
    return outputs, RunTrace(us, letters, xs, ps, outputs)


def _run_stepwise(r, letters):
    """Same contract as :func:`kernels.rnc_run`, for maps too large to tabulate."""
    n, d = len(letters), len(r.neurons)
    xs = np.empty((n + 1, d))
    ps = np.full((n + 1, d), -1, dtype=np.int64)
    xs[0] = r.initial
    ps[0] = r.interpret(r.initial)
    for t in range(1, n + 1):
        vs = r.inputs_for(letters[t - 1], ps[t - 1])
        xs[t] = [spec.step(xs[t - 1, i], vs[i]) for i, spec in enumerate(r.neurons)]
        ps[t] = r.interpret(xs[t])
        bad = np.flatnonzero(ps[t] < 0)
        if bad.size:
            return xs[: t + 1], ps[: t + 1], t, int(bad[0])
    return xs, ps, -1, -1


def run_letters(r, word):
    """Convenience: run on region midpoints of a letter sequence."""
    return rnc_run(r, r.grounding.realise(word))


# -- homomorphism ----------------------------------------------------------

@dataclass
class HomomorphismReport:
    checked: int
    violations: int
    witnesses: list
    equation: str = "psi(f(x, u)) == delta(psi(x), lambda(u))"

    @property
    def passed(self):
        return self.violations == 0

    def merge(self, other):
        room = MAX_WITNESSES - len(self.witnesses)
        return HomomorphismReport(
            self.checked + other.checked,
            self.violations + other.violations,
            self.witnesses + other.witnesses[: max(room, 0)],
            self.equation,
        )

    def to_json(self):
        return {
            "passed": self.passed,
            "checked": self.checked,
            "violations": self.violations,
            "witnesses": self.witnesses,
            "equation": self.equation,
        }


def _sample_intervals(rng, intervals, n):
    """Points drawn from a list of bounded intervals.

    The first rows walk through every endpoint; later rows pick an endpoint
    or a uniform interior point with equal odds.
    """
    k = len(intervals)
    lo = np.asarray([iv.lo for iv in intervals])
    hi = np.asarray([iv.hi for iv in intervals])
    which = rng.integers(0, k, size=n)
    kind = rng.integers(0, 4, size=n)
    head = min(n, 2 * k)
    which[:head] = np.arange(head) // 2
    kind[:head] = np.arange(head) % 2
    u = rng.uniform(0.0, 1.0, size=n)
    pts = np.where(kind == 0, lo[which], np.where(kind == 1, hi[which], lo[which] + u * (hi[which] - lo[which])))
    return pts


def _homomorphism_shard(r, target, X, U, offset):
    letters = r.grounding.ground_indices(U)
    ps = r.interpret(X)
    Y = r.step(X, letters)
    got = r.interpret(Y)
    if isinstance(target, CascadeSpec):
        expected = target.next_indices(ps, letters)
        bad = (expected != got).any(axis=1)
    else:
        single = len(r.neurons) == 1 and not isinstance(target.states[0], tuple)
        lookup = {q: i for i, q in enumerate(target.states)}

        def key(row):
            names = tuple(n.state_names[p] for n, p in zip(r.neurons, row))
            return names[0] if single else names

        src = np.asarray([lookup[key(row)] for row in ps], dtype=np.int64)
        exp_idx = target.delta[src, letters]
        got_key = [None if (row < 0).any() else key(row) for row in got]
        bad = np.asarray([g is None or lookup.get(g) != e for g, e in zip(got_key, exp_idx)], dtype=bool)
        expected = exp_idx
    witnesses = []
    for j in np.flatnonzero(bad)[:MAX_WITNESSES]:
        exp = expected[j]
        witnesses.append({
            "sample": int(offset + j),
            "x": [float(v) for v in X[j]],
            "u": float(U[j]),
            "letter": r.alphabet[letters[j]],
            "psi_x": [n.state_names[p] for n, p in zip(r.neurons, ps[j])],
            "next_x": [float(v) for v in Y[j]],
            "psi_next": [None if p < 0 else n.state_names[p] for n, p in zip(r.neurons, got[j])],
            "expected": (
                [c.states[k] for c, k in zip(target.components, exp)]
                if isinstance(target, CascadeSpec)
                else _state_json(target.states[exp])
            ),
        })
    return HomomorphismReport(len(U), int(bad.sum()), witnesses)


def _state_json(q):
    return list(q) if isinstance(q, tuple) else q


def check_homomorphism(r, target, samples=10_000, seed=0, threads=1):
    """Sample ``(x, u)`` pairs and compare ``psi(f(x, u))`` with ``delta(psi(x), lambda(u))``.

    ``target`` is the flattened semiautomaton (states are tuples of component
    states, or plain states for a single neuron) or the cascade itself,
    which is stepped component-wise.
    """
    rng = np.random.default_rng(seed)
    X = np.stack(
        [_sample_intervals(rng, [iv for _, iv in n.state_partition], samples) for n in r.neurons],
        axis=1,
    )
    U = _sample_intervals(rng, list(r.grounding.regions), samples)
    if isinstance(target, Semiautomaton) and target.alphabet != r.alphabet:
        raise InvalidInputError("target alphabet differs from the RNC alphabet")
    shards = max(1, int(threads))
    bounds = np.linspace(0, samples, shards + 1).astype(int)
    jobs = [(X[a:b], U[a:b], a) for a, b in zip(bounds, bounds[1:]) if b > a]
    if shards == 1:
        parts = [_homomorphism_shard(r, target, *job) for job in jobs]
    else:
        with ThreadPoolExecutor(shards) as pool:
            parts = list(pool.map(lambda job: _homomorphism_shard(r, target, *job), jobs))
    report = HomomorphismReport(0, 0, [])
    for part in parts:
        report = report.merge(part)
    return report


# -- equivalence -----------------------------------------------------------

@dataclass
class EquivalenceResult:
    equivalent: bool
    trials: int
    mismatch: dict = None

    def to_json(self):
        return {"equivalent": self.equivalent, "trials": self.trials, "mismatch": self.mismatch}


def noisy_inputs(rng, grounding, letters, endpoint_rate=0.1):
    """Region midpoints plus uniform noise within the robustness radius.

    A fraction ``endpoint_rate`` of positions is pushed to exactly
    ``+-radius``, the edge of the robust ball.
    """
    mids = np.asarray([r.representative() for r in grounding.regions])[letters]
    rad = grounding.radius
    noise = rng.uniform(-rad, rad, size=len(letters))
    edge = rng.random(len(letters)) < endpoint_rate
    noise[edge] = np.where(rng.random(int(edge.sum())) < 0.5, -rad, rad)
    return mids + noise


def check_equivalence(r, target, trials=500, max_len=100, seed=0, words=None):
    """Co-simulate on random strings with grounding noise; stop at the first mismatch.

    ``target`` is anything with ``run(word) -> outputs`` over the same
    alphabet (an :class:`Automaton` or a cascade with an output function).
    ``words`` replaces the random strings when given.
    """
    if tuple(target.alphabet) != r.alphabet:
        raise InvalidInputError("target alphabet differs from the RNC alphabet")
    rng = np.random.default_rng(seed)
    if words is None:
        words = []
        for _ in range(trials):
            n = int(rng.integers(0, max_len + 1))
            words.append(rng.integers(0, len(r.alphabet), size=n))
    else:
        words = [np.asarray([r.alphabet.index(s) for s in w], dtype=np.int64) for w in words]
    for k, idx in enumerate(words):
        word = [r.alphabet[i] for i in idx]
        us = noisy_inputs(rng, r.grounding, idx)
        got, _ = rnc_run(r, us)
        expected = [str(y) for y in target.run(word)]
        if got != expected:
            t = next((i for i, (a, b) in enumerate(zip(got, expected)) if a != b), min(len(got), len(expected)))
            return EquivalenceResult(False, k + 1, {
                "trial": k, "step": t, "word": word,
                "expected": expected[t] if t < len(expected) else None,
                "got": got[t] if t < len(got) else None,
            })
    return EquivalenceResult(True, len(words))


# -- probes ----------------------------------------------------------------

def alternation_probe(r, steps, neuron=0, input_name=None):
    """True iff a constant input flips the neuron's interpretation at every step.

    The input defaults to the ``toggle`` interval when the neuron has one and
    to ``read`` otherwise.
    """
    spec = r.neurons[neuron]
    if input_name is None:
        input_name = "toggle" if "toggle" in spec.input_names else "read"
    if steps <= 0:
        return True
    v = spec.input_interval(input_name).representative()
    xs = np.empty(steps + 1)
    xs[0] = r.initial[neuron]
    if spec.activation == "synthetic":
        for t in range(steps):
            xs[t + 1] = spec.step(xs[t], v)
    else:
        xs = kernels.iterate(spec.code, spec.order, spec.w, float(r.initial[neuron]), np.full(steps, v))
    ps = spec.interpret_index(xs)
    return bool((ps >= 0).all() and (ps[1:] != ps[:-1]).all())


def sabotage_read(r, neuron=None, fraction=0.1):
    """Copy of ``r`` whose read interval is stretched past its admissible upper end.

    The read entries of the input map move to the middle of the added
    sliver, so they stay inside the declared (now too wide) interval.
    ``neuron`` defaults to the first neuron whose map ever feeds it a read
    (or toggle) input.
    """
    if neuron is None:
        neuron = _first_reader(r)
    spec = r.neurons[neuron]
    name = "read" if "read" in spec.input_names else "toggle"
    iv = spec.input_interval(name)
    extra = fraction * iv.length
    widened = Interval(iv.lo, iv.hi + extra)
    bad = spec.with_input_interval(name, widened)
    m = r.maps[neuron]
    k = spec.input_names.index(name)
    reps = np.where(m.targets == k, iv.hi + 0.5 * extra, m.reps)
    maps = list(r.maps)
    maps[neuron] = PiecewiseInputMap(m.reads, reps, m.targets, m.table, m.rule, m.shape)
    neurons = list(r.neurons)
    neurons[neuron] = bad
    return RNC(r.alphabet, neurons, maps, r.initial, r.grounding, r.output, r.architecture, r.names)


def _first_reader(r):
    for i, (spec, m) in enumerate(zip(r.neurons, r.maps)):
        for name in ("read", "toggle"):
            if name in spec.input_names:
                k = spec.input_names.index(name)
                used = np.unique(m.tabulated()) if m.table is not None or np.prod(m.shape) < 1 << 22 else []
                if any(m.targets[p] == k for p in used):
                    return i
    raise InvalidInputError("no neuron ever receives a read or toggle input")


def is_finite(x):
    return not (math.isinf(x) or math.isnan(x))
