"""Concrete neuron cores and exact checks of their interval inclusions.

A first-order core computes ``act(w * x + v)``; a second-order core computes
``act(w * x * v)``. Interval partitions follow the constructions that make
sign and tanh neurons behave as flip-flops, toggles and C2 group elements.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .automata import FLIPFLOP_INPUTS, FLIPFLOP_STATES, TOGGLE_INPUTS, validate_group_table
from .errors import InvalidInputError, ParameterError

INF = math.inf
GRID_SPAN = 10.0
DEFAULT_TOL = 1e-12
ACTIVATION_CODES = {"sign": kernels.SIGN, "tanh": kernels.TANH, "synthetic": kernels.SYNTHETIC}


@dataclass(frozen=True)
class Interval:
    """Closed interval; either end may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise InvalidInputError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    @property
    def length(self):
        return self.hi - self.lo

    def representative(self):
        """Midpoint, or one unit inside the finite end of a half-line."""
        if math.isinf(self.lo) and math.isinf(self.hi):
            return 0.0
        if math.isinf(self.hi):
            return self.lo + 1.0
        if math.isinf(self.lo):
            return self.hi - 1.0
        return 0.5 * (self.lo + self.hi)

    def truncated(self):
        """Finite stand-in used by grid checks."""
        lo, hi = self.lo, self.hi
        if math.isinf(lo):
            lo = min(-GRID_SPAN, hi - GRID_SPAN)
        if math.isinf(hi):
            hi = max(GRID_SPAN, lo + GRID_SPAN)
        return lo, hi

    def disjoint(self, other):
        return self.hi < other.lo or other.hi < self.lo

    def within(self, other):
        return other.lo <= self.lo and self.hi <= other.hi


def _bound_json(x):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return x


def _bound_parse(x):
    # float() also reads the "inf" / "-inf" sentinels
    return float(x)


def interval_to_json(name, iv):
    return {"name": name, "lo": _bound_json(iv.lo), "hi": _bound_json(iv.hi)}


def interval_from_json(obj):
    return obj["name"], Interval(_bound_parse(obj["lo"]), _bound_parse(obj["hi"]))


@dataclass(frozen=True, eq=False)
class NeuronSpec:
    """Activation, weight and the state/input interval partitions of one neuron core.

    ``kind`` is the semiautomaton the core mimics (``flipflop``, ``toggle``
    or ``group``). For ``group`` the ``cayley`` table fixes the required
    transitions and the partitions are named ``"0".."n-1"``.
    """

    kind: str
    activation: str
    order: int
    w: float
    state_partition: tuple
    input_partition: tuple
    params: dict = field(default_factory=dict)
    cayley: np.ndarray = None

    def __post_init__(self):
        if self.activation not in ACTIVATION_CODES:
            raise InvalidInputError(f"unknown activation {self.activation!r}")
        if self.order not in (1, 2):
            raise InvalidInputError("order must be 1 or 2")
        object.__setattr__(self, "w", float(self.w))
        sp = tuple((str(n), iv) for n, iv in self.state_partition)
        ip = tuple((str(n), iv) for n, iv in self.input_partition)
        object.__setattr__(self, "state_partition", sp)
        object.__setattr__(self, "input_partition", ip)
        if self.cayley is not None:
            object.__setattr__(self, "cayley", validate_group_table(self.cayley))
        _check_disjoint("state", sp)
        _check_disjoint("input", ip)
        for name, iv in ip:
            if not iv.length > 0:
                raise InvalidInputError(f"input interval {name!r} has zero length")
        expected = _expected_names(self.kind, self.cayley)
        if tuple(n for n, _ in sp) != expected[0] or set(n for n, _ in ip) != set(expected[1]):
            raise InvalidInputError(
                f"{self.kind} neuron needs states {expected[0]} and inputs {expected[1]}"
            )

    @property
    def state_names(self):
        return tuple(n for n, _ in self.state_partition)

    @property
    def input_names(self):
        return tuple(n for n, _ in self.input_partition)

    def state_interval(self, name):
        return dict(self.state_partition)[name]

    def input_interval(self, name):
        return dict(self.input_partition)[name]

    @property
    def code(self):
        return ACTIVATION_CODES[self.activation]

    def step(self, x, v):
        """Raw dynamics; accepts scalars or broadcastable arrays."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.activation == "synthetic":
            out = self._synthetic(x, v)
        else:
            if self.order == 2:
                with np.errstate(invalid="ignore"):
                    p = x * v
                z = self.w * np.where(np.isnan(p), 0.0, p)
            else:
                z = self.w * x + v
            out = np.where(z >= 0.0, 1.0, -1.0) if self.activation == "sign" else np.tanh(z)
        return float(out) if out.ndim == 0 else out

    def _synthetic(self, x, v):
        sc = np.asarray([iv.representative() for _, iv in self.state_partition])
        by_name = dict(self.input_partition)
        ic = np.asarray([by_name[n].representative() for n in self.state_names])
        i = np.abs(x[..., None] - sc).argmin(axis=-1)
        j = np.abs(v[..., None] - ic).argmin(axis=-1)
        return sc[self.cayley[i, j]]

    def interpret(self, x):
        """Name of the state interval containing ``x``, or ``None``."""
        for name, iv in self.state_partition:
            if x in iv:
                return name
        return None

    def interpret_index(self, xs):
        """Vectorised interpretation: interval index per entry, -1 in gaps."""
        xs = np.asarray(xs, dtype=float)
        out = np.full(xs.shape, -1, dtype=np.int64)
        for k, (_, iv) in enumerate(self.state_partition):
            out[(xs >= iv.lo) & (xs <= iv.hi) & (out < 0)] = k
        return out

    def with_input_interval(self, name, interval):
        parts = tuple((n, interval if n == name else iv) for n, iv in self.input_partition)
        return replace(self, input_partition=parts)

    def with_state_interval(self, name, interval):
        parts = tuple((n, interval if n == name else iv) for n, iv in self.state_partition)
        return replace(self, state_partition=parts)


def _check_disjoint(label, parts):
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            if not parts[a][1].disjoint(parts[b][1]):
                raise InvalidInputError(f"{label} intervals {parts[a][0]!r} and {parts[b][0]!r} overlap")


def _expected_names(kind, cayley):
    if kind == "flipflop":
        return FLIPFLOP_STATES, FLIPFLOP_INPUTS
    if kind == "toggle":
        return FLIPFLOP_STATES, TOGGLE_INPUTS
    if kind == "group":
        if cayley is None:
            raise InvalidInputError("group neurons need a group table")
        names = tuple(str(i) for i in range(len(cayley)))
        return names, names
    raise InvalidInputError(f"unknown neuron kind {kind!r}")


def neuron_step(spec, x, v):
    return spec.step(x, v)


def state_interpretation(spec, x):
    return spec.interpret(x)


# -- constructors ----------------------------------------------------------

def _tanh_f(w):
    return lambda x: math.tanh(w * x)


def make_sign_flipflop(w, a=0.5):
    if not w > 0:
        raise ParameterError(f"sign flip-flop needs w > 0, got {w}")
    if not 0 < a < 1:
        raise ParameterError(f"sign flip-flop needs 0 < a < 1, got {a}")
    return NeuronSpec(
        "flipflop", "sign", 1, w,
        (("low", Interval(-1, -1)), ("high", Interval(1, 1))),
        (
            ("set", Interval(w * (a + 1), INF)),
            ("reset", Interval(-INF, w * (-a - 1))),
            ("read", Interval(w * (a - 1), w * (1 - a))),
        ),
        {"a": a},
    )


def optimal_tanh_ab(w):
    """``(a, b)`` where ``d/dx tanh(w x) = 1``; they maximise the read interval."""
    if not w > 1:
        raise ParameterError(f"optimal a, b need w > 1, got {w}")
    b = math.atanh(math.sqrt(1 - 1 / w)) / w
    return -b, b


def make_tanh_flipflop(w, a=None, b=None):
    if not w > 1:
        raise ParameterError(f"tanh flip-flop needs w > 1, got {w}")
    if a is None and b is None:
        a, b = optimal_tanh_ab(w)
    if not a < b:
        raise ParameterError(f"tanh flip-flop needs a < b, got a={a}, b={b}")
    f = _tanh_f(w)
    if not a - f(a) > b - f(b):
        raise ParameterError(
            f"tanh flip-flop needs a - tanh(w a) > b - tanh(w b); got {a - f(a)} <= {b - f(b)}"
        )
    return NeuronSpec(
        "flipflop", "tanh", 1, w,
        (("low", Interval(-1, f(a))), ("high", Interval(f(b), 1))),
        (
            ("set", Interval(w * (b + 1), INF)),
            ("reset", Interval(-INF, w * (a - 1))),
            ("read", Interval(w * (b - f(b)), w * (a - f(a)))),
        ),
        {"a": a, "b": b},
    )


def make_sign_toggle(w, a=0.5):
    if not w < 0:
        raise ParameterError(f"sign toggle needs w < 0, got {w}")
    if not 0 < a < 1:
        raise ParameterError(f"sign toggle needs 0 < a < 1, got {a}")
    return NeuronSpec(
        "toggle", "sign", 1, w,
        (("low", Interval(-1, -1)), ("high", Interval(1, 1))),
        (
            ("set", Interval(w * (-a - 1), INF)),
            ("reset", Interval(-INF, w * (a + 1))),
            ("toggle", Interval(w * (1 - a), w * (a - 1))),
        ),
        {"a": a},
    )


def make_tanh_toggle(w, a=None, b=None):
    if not w < -1:
        raise ParameterError(f"tanh toggle needs w < -1, got {w}")
    if a is None and b is None:
        a, b = optimal_tanh_ab(-w)
    if not a < b:
        raise ParameterError(f"tanh toggle needs a < b, got a={a}, b={b}")
    f = _tanh_f(w)
    if not a + f(a) > b + f(b):
        raise ParameterError(
            f"tanh toggle needs a + tanh(w a) > b + tanh(w b); got {a + f(a)} <= {b + f(b)}"
        )
    return NeuronSpec(
        "toggle", "tanh", 1, w,
        (("low", Interval(-1, f(b))), ("high", Interval(f(a), 1))),
        (
            ("set", Interval(w * (a - 1), INF)),
            ("reset", Interval(-INF, w * (b + 1))),
            ("toggle", Interval(w * (a - f(b)), w * (b - f(a)))),
        ),
        {"a": a, "b": b},
    )


C2 = np.array([[0, 1], [1, 0]])


def _c2_inputs(w, a, threshold):
    if a > 0 and w > 0:
        return (("0", Interval(threshold, INF)), ("1", Interval(-INF, -threshold)))
    if a < 0 and w < 0:
        return (("0", Interval(-INF, threshold)), ("1", Interval(-threshold, INF)))
    raise ParameterError(f"C2 neuron needs a and w of the same sign, got a={a}, w={w}")


def make_c2_sign(w, a=None):
    if a is None:
        a = math.copysign(0.5, w)
    if w == 0 or a == 0:
        raise ParameterError("C2 neuron needs non-zero w and a")
    inputs = _c2_inputs(w, a, a)
    return NeuronSpec(
        "group", "sign", 2, w,
        (("0", Interval(-1, -1)), ("1", Interval(1, 1))),
        inputs, {"a": a}, C2,
    )


def make_c2_tanh(w, a=None):
    if a is None:
        a = math.copysign(1.0, w)
    if w == 0 or a == 0:
        raise ParameterError("C2 neuron needs non-zero w and a")
    fa = math.tanh(w * a)
    inputs = _c2_inputs(w, a, a / fa)
    return NeuronSpec(
        "group", "tanh", 2, w,
        (("0", Interval(-1, -fa)), ("1", Interval(fa, 1))),
        inputs, {"a": a}, C2,
    )


def make_synthetic_group_neuron(cayley, margin=None):
    """Exact piecewise core for any finite group.

    State and input ``i`` own the interval of half-width ``margin`` centred
    at ``i / n``; the map sends the pair of nearest centres ``(i, j)`` to the
    centre of state ``cayley[i][j]``.
    """
    T = validate_group_table(cayley)
    n = T.shape[0]
    if margin is None:
        margin = 0.2 / n
    if not 0 < margin < 1 / (2 * n):
        raise ParameterError(f"margin must lie in (0, {1 / (2 * n)}), got {margin}")
    parts = tuple((str(i), Interval(i / n - margin, i / n + margin)) for i in range(n))
    return NeuronSpec("group", "synthetic", 1, 0.0, parts, parts, {"margin": margin}, T)


# -- condition checks ------------------------------------------------------

@dataclass
class Condition:
    """One required inclusion ``f(X_states, V_input) within X_target``."""

    label: str
    states: tuple
    input: str
    target: str
    corner_ok: bool = True
    grid_ok: bool = True
    witness: dict = None

    @property
    def ok(self):
        return self.corner_ok and self.grid_ok


@dataclass
class BoundCheck:
    """Declared interval against the admissible range of its construction."""

    name: str
    declared: Interval
    admissible: Interval

    @property
    def ok(self):
        return self.declared.within(self.admissible)


@dataclass
class CoreConditionReport:
    method: str
    conditions: list
    bounds: list
    grid: int

    @property
    def passed(self):
        return all(c.ok for c in self.conditions) and all(b.ok for b in self.bounds)

    def violations(self):
        out = [c for c in self.conditions if not c.ok]
        return out + [b for b in self.bounds if not b.ok]

    def to_json(self):
        return {
            "passed": self.passed,
            "method": self.method,
            "grid": self.grid,
            "conditions": [
                {
                    "label": c.label,
                    "corner_ok": c.corner_ok,
                    "grid_ok": c.grid_ok,
                    "witness": c.witness,
                }
                for c in self.conditions
            ],
            "bounds": [
                {
                    "name": b.name,
                    "ok": b.ok,
                    "declared": [_bound_json(b.declared.lo), _bound_json(b.declared.hi)],
                    "admissible": [_bound_json(b.admissible.lo), _bound_json(b.admissible.hi)],
                }
                for b in self.bounds
            ],
        }


def required_inclusions(spec):
    states = spec.state_names
    if spec.kind == "flipflop":
        return [
            Condition("set forces high", states, "set", "high"),
            Condition("reset forces low", states, "reset", "low"),
            Condition("read preserves high", ("high",), "read", "high"),
            Condition("read preserves low", ("low",), "read", "low"),
        ]
    if spec.kind == "toggle":
        return [
            Condition("toggle low to high", ("low",), "toggle", "high"),
            Condition("toggle high to low", ("high",), "toggle", "low"),
            Condition("set forces high", states, "set", "high"),
            Condition("reset forces low", states, "reset", "low"),
        ]
    T = spec.cayley
    return [
        Condition(f"{i} * {j} = {T[i, j]}", (str(i),), str(j), str(T[i, j]))
        for i in range(T.shape[0])
        for j in range(T.shape[0])
    ]


def admissible_partition(spec):
    """Widest input intervals the construction for ``spec`` allows, or ``None``.

    Only sign/tanh cores built by the constructors above have a closed-form
    admissible region; state intervals are fixed exactly by those
    constructions and are compared for equality through the same bounds.
    """
    w, p = spec.w, spec.params
    a, b = p.get("a"), p.get("b")
    if spec.activation == "synthetic" or a is None:
        return None
    if spec.kind == "flipflop" and spec.activation == "sign":
        return make_sign_flipflop(w, a)
    if spec.kind == "flipflop" and spec.activation == "tanh":
        return make_tanh_flipflop(w, a, b)
    if spec.kind == "toggle" and spec.activation == "sign":
        return make_sign_toggle(w, a)
    if spec.kind == "toggle" and spec.activation == "tanh":
        return make_tanh_toggle(w, a, b)
    if spec.kind == "group" and spec.activation == "sign":
        return make_c2_sign(w, a)
    if spec.kind == "group" and spec.activation == "tanh":
        return make_c2_tanh(w, a)
    return None


def _corner_points(X, V):
    return [(x, v) for x in (X.lo, X.hi) for v in (V.lo, V.hi)]


def verify_core_conditions(spec, grid=1000, tol=DEFAULT_TOL):
    """Check every inclusion at box corners and on a uniform grid.

    Corner checks are exact except for ``tol``: the tanh constructions map
    boundary corners exactly onto state boundaries, which floating point
    can miss by an ulp. Grid checks sample ``grid`` points per interval,
    substituting finite ranges for infinite ends. Bound checks compare each
    declared interval with the admissible range of its construction.
    """
    conditions = required_inclusions(spec)
    for cond in conditions:
        V = spec.input_interval(cond.input)
        T = spec.state_interval(cond.target)
        for s in cond.states:
            X = spec.state_interval(s)
            # The pre-activation is monotone (first order) or bilinear (second
            # order) and the activation is monotone, so the image of the box
            # is spanned by its corners. Infinite corners evaluate as limits.
            # Synthetic cores are constant on each box.
            for x, v in _corner_points(X, V):
                y = float(spec.step(x, v))
                if y < T.lo - tol or y > T.hi + tol:
                    cond.corner_ok = False
                    if cond.witness is None:
                        cond.witness = {"method": "corner", "state": s, "x": x, "v": v, "y": y}
            if grid:
                found, x, v, y = _grid_check(spec, X, V, T, grid, tol)
                if found:
                    cond.grid_ok = False
                    cond.witness = cond.witness or {"method": "grid", "state": s, "x": x, "v": v, "y": y}
    bounds = []
    ref = admissible_partition(spec)
    if ref is not None:
        for name, iv in spec.input_partition:
            bounds.append(BoundCheck(name, iv, ref.input_interval(name)))
        for name, iv in spec.state_partition:
            ref_iv = ref.state_interval(name)
            bounds.append(BoundCheck("state " + name, iv, ref_iv))
    method = "corner-exact" + ("+grid" if grid else "")
    return CoreConditionReport(method, conditions, bounds, grid)


def _grid_points(iv, n):
    lo, hi = iv.truncated()
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def _grid_check(spec, X, V, T, n, tol):
    xs = _grid_points(X, n)
    vs = _grid_points(V, n)
    if spec.activation == "synthetic":
        y = spec.step(xs[:, None], vs[None, :])
        bad = (y < T.lo - tol) | (y > T.hi + tol)
        if bad.any():
            i, j = np.unravel_index(np.argmax(bad), bad.shape)
            return True, float(xs[i]), float(vs[j]), float(y[i, j])
        return False, 0.0, 0.0, 0.0
    found, x, v, y = kernels.grid_violation(spec.code, spec.order, spec.w, xs, vs, T.lo, T.hi, tol)
    return bool(found), float(x), float(v), float(y)


# -- dynamics probes -------------------------------------------------------

def trajectory(activation, w, x0, inputs, order=1):
    """States ``x_0..x_n`` of a sign/tanh neuron driven by ``inputs``."""
    vs = np.ascontiguousarray(inputs, dtype=float)
    return kernels.iterate(ACTIVATION_CODES[activation], order, float(w), float(x0), vs)


def convergent_inputs(v_star, n):
    """``v_k = v_star + 2**-k`` for ``k = 0..n-1``."""
    return v_star + np.exp2(-np.arange(n, dtype=float))


def settles(xs, start=200, tol=1e-9):
    """True iff ``|x_{k+1} - x_k| < tol`` for every ``k >= start``."""
    d = np.abs(np.diff(xs[start:]))
    return bool((d < tol).all())


def interpretation_alternates(spec, xs):
    """True iff consecutive interpretations differ and none falls in a gap."""
    ps = spec.interpret_index(xs)
    return bool((ps >= 0).all() and (ps[1:] != ps[:-1]).all())
