"""Finite semiautomata, prime components, cascades and networks.

Transition tables are integer arrays indexed ``[state, letter]``. Letters
are strings; prime components have string states, flattened products have
tuple states with one entry per component.
"""
from collections import deque
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .errors import CapacityError, InvalidInputError
from .semigroups import generate_semigroup, is_aperiodic

FLIPFLOP_STATES = ("low", "high")
FLIPFLOP_INPUTS = ("set", "reset", "read")
TOGGLE_INPUTS = ("set", "reset", "toggle")
KINDS = ("flipflop", "toggle", "group")


def _as_tuple(xs):
    return tuple(xs)


@dataclass(frozen=True, eq=False)
class Semiautomaton:
    """``table[q, k]`` is the successor of state ``q`` on internal letter ``k``.

    Without an input function the internal alphabet is the input alphabet.
    """

    alphabet: tuple
    states: tuple
    table: np.ndarray
    internal_alphabet: tuple = None
    input_fn: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _as_tuple(self.alphabet))
        object.__setattr__(self, "states", _as_tuple(self.states))
        table = np.asarray(self.table, dtype=np.int64)
        object.__setattr__(self, "table", table)
        internal = self.alphabet if self.internal_alphabet is None else _as_tuple(self.internal_alphabet)
        if self.internal_alphabet is not None:
            object.__setattr__(self, "internal_alphabet", internal)
        if table.shape != (len(self.states), len(internal)):
            raise InvalidInputError(
                f"transition table shape {table.shape} does not match "
                f"{len(self.states)} states x {len(internal)} letters"
            )
        if table.size and (table.min() < 0 or table.max() >= len(self.states)):
            raise InvalidInputError("transition table points outside the state set")
        if self.input_fn is not None:
            phi = np.asarray(self.input_fn, dtype=np.int64)
            if phi.shape != (len(self.alphabet),) or (phi.size and (phi.min() < 0 or phi.max() >= len(internal))):
                raise InvalidInputError("input function is not a total map into the internal alphabet")
            object.__setattr__(self, "input_fn", phi)
        if len(set(self.states)) != len(self.states) or len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidInputError("duplicate state or letter names")

    @property
    def delta(self):
        """Effective transition table over the input alphabet."""
        if self.input_fn is None:
            return self.table
        return self.table[:, self.input_fn]

    def state_index(self, q):
        try:
            return self.states.index(q)
        except ValueError:
            raise InvalidInputError(f"unknown state {q!r}") from None

    def letter_index(self, sigma):
        try:
            return self.alphabet.index(sigma)
        except ValueError:
            raise InvalidInputError(f"unknown letter {sigma!r}") from None

    def step(self, q, sigma):
        return self.states[self.delta[self.state_index(q), self.letter_index(sigma)]]

    def run(self, q, word):
        """States visited from ``q`` (inclusive) while reading ``word``."""
        letters = encode_word(self.alphabet, word)
        path = kernels.run_table(self.delta, letters, self.state_index(q))
        return [self.states[i] for i in path]

    def transformation(self, sigma):
        return tuple(int(i) for i in self.delta[:, self.letter_index(sigma)])

    @classmethod
    def from_core(cls, core_states, core_inputs, core_table, input_fn, alphabet=None):
        """Compose a core over ``core_inputs`` with ``input_fn``: letter -> core input.

        Internal letters that ``input_fn`` never produces are dropped.
        """
        alphabet = _as_tuple(alphabet if alphabet is not None else input_fn.keys())
        unknown = [k for k in alphabet if k not in input_fn]
        if unknown:
            raise InvalidInputError(f"input function undefined on {unknown}")
        bad = {v for v in input_fn.values() if v not in core_inputs}
        if bad:
            raise InvalidInputError(f"input function maps into {sorted(bad)}, expected {list(core_inputs)}")
        used = [p for p in core_inputs if p in {input_fn[s] for s in alphabet}]
        cols = [list(core_inputs).index(p) for p in used]
        table = np.asarray(core_table, dtype=np.int64)[:, cols]
        phi = [used.index(input_fn[s]) for s in alphabet]
        return cls(alphabet, core_states, table, tuple(used), np.asarray(phi, dtype=np.int64))


def encode_word(alphabet, word):
    lookup = {s: i for i, s in enumerate(alphabet)}
    out = np.empty(len(word), dtype=np.int64)
    for t, s in enumerate(word):
        try:
            out[t] = lookup[s]
        except KeyError:
            raise InvalidInputError(f"unknown letter {s!r} at position {t}") from None
    return out


@dataclass(frozen=True, eq=False)
class Automaton:
    """Semiautomaton plus initial state and output table ``outputs[q, letter]``."""

    semiautomaton: Semiautomaton
    initial: object
    output_alphabet: tuple
    outputs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "output_alphabet", _as_tuple(self.output_alphabet))
        outputs = np.asarray(self.outputs, dtype=np.int64)
        object.__setattr__(self, "outputs", outputs)
        s = self.semiautomaton
        if self.initial not in s.states:
            raise InvalidInputError(f"initial state {self.initial!r} is not a state")
        if outputs.shape != (len(s.states), len(s.alphabet)):
            raise InvalidInputError("output table must cover every (state, letter) pair")
        if outputs.size and (outputs.min() < 0 or outputs.max() >= len(self.output_alphabet)):
            raise InvalidInputError("output table points outside the output alphabet")

    @property
    def alphabet(self):
        return self.semiautomaton.alphabet

    @property
    def states(self):
        return self.semiautomaton.states

    def run(self, word):
        return run_automaton(self, word)


def run_automaton(a, word):
    """Output letters for ``word``; each reads the pre-transition state."""
    s = a.semiautomaton
    letters = encode_word(s.alphabet, word)
    path = kernels.run_table(s.delta, letters, s.state_index(a.initial))
    ys = a.outputs[path[:-1], letters]
    return [a.output_alphabet[y] for y in ys]


# -- prime components ------------------------------------------------------

def _flipflop_core():
    # rows: low, high; columns: set, reset, read
    return np.array([[1, 0, 0], [1, 0, 1]], dtype=np.int64)


def _toggle_core():
    # rows: low, high; columns: set, reset, toggle
    return np.array([[1, 0, 1], [1, 0, 0]], dtype=np.int64)


def validate_group_table(cayley):
    """Return the table as an array or raise naming the failed group axiom."""
    T = np.asarray(cayley)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise InvalidInputError("group table must be a non-empty square table")
    n = T.shape[0]
    if not np.issubdtype(T.dtype, np.integer) or T.min() < 0 or T.max() >= n:
        raise InvalidInputError("closure fails: entries must be element indices")
    T = T.astype(np.int64)
    if not (T[T, :] == T[:, T]).all():
        raise InvalidInputError("associativity fails")
    ar = np.arange(n)
    ids = [e for e in range(n) if (T[e] == ar).all() and (T[:, e] == ar).all()]
    if not ids:
        raise InvalidInputError("identity fails: no two-sided identity element")
    e = ids[0]
    for g in range(n):
        if not ((T[g] == e) & (T[:, g] == e)).any():
            raise InvalidInputError(f"inverses fail: element {g} has no inverse")
    return T


def cyclic_group(n):
    ar = np.arange(n)
    return (ar[:, None] + ar[None, :]) % n


def prime_core(kind, cayley=None):
    """``(states, internal alphabet, core table)`` of a prime kind."""
    if kind == "flipflop":
        return FLIPFLOP_STATES, FLIPFLOP_INPUTS, _flipflop_core()
    if kind == "toggle":
        return FLIPFLOP_STATES, TOGGLE_INPUTS, _toggle_core()
    if kind == "group":
        T = validate_group_table(cayley)
        names = tuple(str(i) for i in range(T.shape[0]))
        return names, names, T
    raise InvalidInputError(f"unknown component kind {kind!r}")


def flipflop_semiautomaton(input_fn):
    states, inputs, core = prime_core("flipflop")
    return Semiautomaton.from_core(states, inputs, core, dict(input_fn))


def toggle_semiautomaton(input_fn):
    states, inputs, core = prime_core("toggle")
    return Semiautomaton.from_core(states, inputs, core, dict(input_fn))


def group_semiautomaton(cayley, input_fn):
    """States are group elements; input ``j`` moves state ``i`` to ``i*j``."""
    states, inputs, core = prime_core("group", cayley)
    fn = {k: str(v) for k, v in dict(input_fn).items()}
    return Semiautomaton.from_core(states, inputs, core, fn)


# -- cascades and networks -------------------------------------------------

MAX_TABLE_ENTRIES = 1 << 26


def tabulate(rule, shape):
    """Evaluate a broadcasting ``rule(*indices)`` on every index of ``shape``."""
    size = int(np.prod(np.asarray(shape, dtype=object)))
    if size > MAX_TABLE_ENTRIES:
        raise CapacityError(f"table with {size} entries exceeds {MAX_TABLE_ENTRIES}")
    grids = np.ix_(*[np.arange(n) for n in shape])
    return np.broadcast_to(np.asarray(rule(*grids), dtype=np.int64), tuple(shape)).copy()


class _Lookup:
    """Shared table-or-rule access for input and output functions."""

    def lookup(self, letters, *states):
        if self.table is not None:
            return self.table[(letters,) + states]
        return np.asarray(self.rule(letters, *states), dtype=np.int64)

    def tabulated(self):
        """The exhaustive table, building it from the rule on first use."""
        if self.table is None:
            table = tabulate(self.rule, self.shape)
            self._check_range(table)
            object.__setattr__(self, "table", table.astype(self._dtype))
        return self.table


@dataclass(frozen=True, eq=False)
class Component(_Lookup):
    """A prime component with a tabulated input function.

    ``table[letter, s_1, ..., s_k]`` is the internal-letter index chosen when
    the external letter is ``letter`` and the components listed in ``reads``
    are in states ``s_1..s_k``. Large domains may instead give a vectorised
    ``rule`` with the same signature plus the table ``shape``; the table is
    then only built on demand.
    """

    kind: str
    reads: tuple
    table: np.ndarray = None
    name: str = ""
    cayley: np.ndarray = None
    initial: str = None
    rule: object = None
    shape: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "reads", tuple(int(r) for r in self.reads))
        states, inputs, core = prime_core(self.kind, self.cayley)
        if self.cayley is not None:
            object.__setattr__(self, "cayley", core)
        object.__setattr__(self, "_prime", (states, inputs, core))
        object.__setattr__(self, "_dtype", np.int8 if len(inputs) < 128 else np.int64)
        if self.table is None:
            if self.rule is None or self.shape is None:
                raise InvalidInputError(f"component {self.name!r} needs a table or a rule with its shape")
            object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        else:
            table = np.asarray(self.table)
            self._check_range(table)
            object.__setattr__(self, "table", table.astype(self._dtype))
            object.__setattr__(self, "shape", table.shape)
        if len(self.shape) != 1 + len(self.reads):
            raise InvalidInputError(
                f"component {self.name!r}: table has {len(self.shape)} axes, expected {1 + len(self.reads)}"
            )
        if self.initial is not None and self.initial not in states:
            raise InvalidInputError(f"component {self.name!r}: unknown initial state {self.initial!r}")

    def _check_range(self, table):
        if table.size and (table.min() < 0 or table.max() >= len(self.internal_alphabet)):
            raise InvalidInputError(f"component {self.name!r}: input function leaves its internal alphabet")

    @property
    def states(self):
        return self._prime[0]

    @property
    def internal_alphabet(self):
        return self._prime[1]

    @property
    def core(self):
        return self._prime[2]

    @property
    def initial_state(self):
        return self.initial if self.initial is not None else self.states[0]

    @classmethod
    def from_function(cls, kind, fn, alphabet, reads=(), pred_states=(), **kw):
        """Tabulate ``fn(letter, *read_states) -> internal letter name``."""
        states, inputs, _ = prime_core(kind, kw.get("cayley"))
        shape = (len(alphabet),) + tuple(len(p) for p in pred_states)
        table = np.empty(shape, dtype=np.int64)
        for idx in np.ndindex(*shape):
            args = [pred_states[k][j] for k, j in enumerate(idx[1:])]
            out = str(fn(alphabet[idx[0]], *args))
            if out not in inputs:
                raise InvalidInputError(f"input function returned {out!r}, expected one of {list(inputs)}")
            table[idx] = inputs.index(out)
        return cls(kind, reads, table, **kw)


@dataclass(frozen=True, eq=False)
class OutputFunction(_Lookup):
    """``table[letter, s_1, ..., s_k]`` indexes ``alphabet``; ``reads`` names the states consulted.

    As with :class:`Component`, a ``rule`` plus ``shape`` may stand in for
    the table.
    """

    alphabet: tuple
    reads: tuple
    table: np.ndarray = None
    rule: object = None
    shape: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _as_tuple(self.alphabet))
        object.__setattr__(self, "reads", tuple(int(r) for r in self.reads))
        object.__setattr__(self, "_dtype", np.int64)
        if self.table is None:
            if self.rule is None or self.shape is None:
                raise InvalidInputError("output function needs a table or a rule with its shape")
            object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        else:
            table = np.asarray(self.table, dtype=np.int64)
            self._check_range(table)
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "shape", table.shape)
        if len(self.shape) != 1 + len(self.reads):
            raise InvalidInputError("output table rank does not match its reads")

    def _check_range(self, table):
        if table.size and (table.min() < 0 or table.max() >= len(self.alphabet)):
            raise InvalidInputError("output table points outside the output alphabet")

    def evaluate(self, letters, states):
        """Vectorised lookup; ``states`` has one column per component."""
        return self.lookup(letters, *(states[..., r] for r in self.reads))


@dataclass(frozen=True, eq=False)
class CascadeSpec:
    """Ordered prime components over a shared external alphabet.

    ``architecture`` is ``"cascade"`` (component ``i`` reads only ``j < i``)
    or ``"network"`` (component ``i`` may read any ``j != i``).
    """

    alphabet: tuple
    components: tuple
    architecture: str = "cascade"
    output: OutputFunction = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _as_tuple(self.alphabet))
        object.__setattr__(self, "components", _as_tuple(self.components))
        if not self.components:
            raise InvalidInputError("a cascade needs at least one component")
        if self.architecture not in ("cascade", "network"):
            raise InvalidInputError(f"unknown architecture {self.architecture!r}")
        sizes = [len(c.states) for c in self.components]
        for i, c in enumerate(self.components):
            for r in c.reads:
                if not 0 <= r < len(self.components) or r == i:
                    raise InvalidInputError(f"component {i} reads invalid component {r}")
                if self.architecture == "cascade" and r > i:
                    raise InvalidInputError(f"cascade component {i} reads later component {r}")
            expected = (len(self.alphabet),) + tuple(sizes[r] for r in c.reads)
            if c.shape != expected:
                raise InvalidInputError(
                    f"component {i} input table has shape {c.shape}, expected {expected}"
                )
        if self.output is not None:
            expected = (len(self.alphabet),) + tuple(sizes[r] for r in self.output.reads)
            if self.output.shape != expected:
                raise InvalidInputError(f"output table has shape {self.output.shape}, expected {expected}")

    @property
    def sizes(self):
        return tuple(len(c.states) for c in self.components)

    @property
    def initial(self):
        return tuple(c.initial_state for c in self.components)

    def encode_state(self, q):
        return tuple(c.states.index(s) for c, s in zip(self.components, q))

    def decode_state(self, idx):
        return tuple(c.states[i] for c, i in zip(self.components, idx))

    def next_indices(self, states, letters):
        """Synchronous successor of integer state vectors (``[..., d]``)."""
        out = np.empty_like(states)
        for i, c in enumerate(self.components):
            pi = c.lookup(letters, *(states[..., r] for r in c.reads))
            out[..., i] = c.core[states[..., i], pi]
        return out

    def step(self, q, sigma):
        """Symbolic successor of the state tuple ``q`` on letter ``sigma``."""
        letter = self.alphabet.index(sigma)
        idx = np.asarray(self.encode_state(q), dtype=np.int64)
        return self.decode_state(self.next_indices(idx, letter))

    def run_states(self, word, initial=None):
        """Component-wise simulation; returns the visited state tuples."""
        q = self.initial if initial is None else tuple(initial)
        path = [q]
        for sigma in word:
            if sigma not in self.alphabet:
                raise InvalidInputError(f"unknown letter {sigma!r} at position {len(path) - 1}")
            q = self.step(q, sigma)
            path.append(q)
        return path

    def run(self, word):
        """Output letters computed by stepping components one at a time."""
        if self.output is None:
            raise InvalidInputError("this cascade has no output function")
        letters = encode_word(self.alphabet, word)
        idx = np.empty((len(word) + 1, len(self.components)), dtype=np.int64)
        idx[0] = self.encode_state(self.initial)
        for t, sigma in enumerate(letters):
            idx[t + 1] = self.next_indices(idx[t], sigma)
        ys = self.output.evaluate(letters, idx[:-1])
        return [self.output.alphabet[y] for y in ys]


def _flatten(spec, reachable):
    sizes = np.asarray(spec.sizes, dtype=np.int64)
    total = int(np.prod(sizes.astype(object)))
    if total >= 2**62:
        raise InvalidInputError("product state space too large to index")
    radix = np.ones(len(sizes), dtype=np.int64)
    for i in range(len(sizes) - 2, -1, -1):
        radix[i] = radix[i + 1] * sizes[i + 1]

    def decode(codes):
        return (codes[:, None] // radix[None, :]) % sizes[None, :]

    def successors(codes):
        digits = decode(codes)
        cols = [spec.next_indices(digits, s) @ radix for s in range(len(spec.alphabet))]
        return np.stack(cols, axis=1) if cols else np.empty((len(codes), 0), dtype=np.int64)

    if reachable:
        start = np.asarray([np.dot(spec.encode_state(spec.initial), radix)], dtype=np.int64)
        seen = start
        frontier = start
        while frontier.size:
            nxt = np.unique(successors(frontier))
            frontier = np.setdiff1d(nxt, seen, assume_unique=True)
            seen = np.union1d(seen, frontier)
        codes = seen
    else:
        codes = np.arange(total, dtype=np.int64)
    succ = successors(codes)
    delta = np.searchsorted(codes, succ)
    digits = decode(codes)
    return codes, digits, delta


def _compose(spec, reachable):
    _, digits, delta = _flatten(spec, reachable)
    states = [spec.decode_state(row) for row in digits]
    return Semiautomaton(spec.alphabet, states, delta), digits


def compose_cascade(spec, reachable=False):
    """Flatten a cascade into one semiautomaton over product states.

    With ``reachable=True`` only states reachable from the components'
    initial states are kept.
    """
    if spec.architecture != "cascade":
        raise InvalidInputError("compose_cascade expects a cascade; use compose_network")
    return _compose(spec, reachable)[0]


def compose_network(spec, reachable=False):
    """Flatten a network; all components update from the previous state vector."""
    return _compose(spec, reachable)[0]


def cascade_automaton(spec, reachable=True):
    """Automaton of a cascade or network that carries an output function."""
    if spec.output is None:
        raise InvalidInputError("the cascade has no output function")
    s, digits = _compose(spec, reachable)
    letters = np.arange(len(spec.alphabet))
    outputs = spec.output.evaluate(letters[None, :], digits[:, None, :])
    return Automaton(s, spec.initial, spec.output.alphabet, outputs)


# -- algebraic properties --------------------------------------------------

def characteristic_semigroup(s, max_elements=None):
    gens = [tuple(int(i) for i in col) for col in s.delta.T]
    kw = {} if max_elements is None else {"max_elements": max_elements}
    return generate_semigroup(gens, **kw)


def is_group_free(s, max_elements=None):
    return is_aperiodic(characteristic_semigroup(s, max_elements))


# -- canonical form --------------------------------------------------------

def reachable_states(a):
    s = a.semiautomaton
    delta = s.delta
    start = s.state_index(a.initial)
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for nxt in delta[q]:
            nxt = int(nxt)
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order


def canonicalize(a):
    """Reachable, reduced automaton computing the same string function.

    Equivalent states are merged by Moore partition refinement over the
    (output, successor block) signature. Each block keeps the name of its
    first state in breadth-first order.
    """
    s = a.semiautomaton
    keep = reachable_states(a)
    pos = {q: i for i, q in enumerate(keep)}
    delta = np.asarray([[pos[int(n)] for n in s.delta[q]] for q in keep], dtype=np.int64)
    delta = delta.reshape(len(keep), len(s.alphabet))
    outs = a.outputs[keep]
    block = _relabel([tuple(r) for r in outs])
    while True:
        sig = [(block[q],) + tuple(block[delta[q]]) for q in range(len(keep))]
        refined = _relabel(sig)
        if refined.max() == block.max():
            break
        block = refined
    n_blocks = int(block.max()) + 1
    rep = [None] * n_blocks
    for q in range(len(keep)):
        if rep[block[q]] is None:
            rep[block[q]] = q
    table = np.asarray([[block[delta[r, k]] for k in range(len(s.alphabet))] for r in rep], dtype=np.int64)
    table = table.reshape(n_blocks, len(s.alphabet))
    names = [s.states[keep[r]] for r in rep]
    semi = Semiautomaton(s.alphabet, names, table)
    return Automaton(semi, names[block[0]], a.output_alphabet, outs[rep])


def _relabel(signatures):
    ids = {}
    return np.asarray([ids.setdefault(sig, len(ids)) for sig in signatures], dtype=np.int64)


def equivalent(a, b):
    """Exact equivalence of two automata by exploring their synchronous product."""
    if a.alphabet != b.alphabet:
        return False
    da, db = a.semiautomaton.delta, b.semiautomaton.delta
    start = (a.semiautomaton.state_index(a.initial), b.semiautomaton.state_index(b.initial))
    seen = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for k in range(len(a.alphabet)):
            if a.output_alphabet[a.outputs[p, k]] != b.output_alphabet[b.outputs[q, k]]:
                return False
            nxt = (int(da[p, k]), int(db[q, k]))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)
