"""Triple-top (TTOP) detection: a direct oracle and a cascade of flip-flops.

A TTOP is five consecutive local extrema E1..E5 where E1 is a maximum,
E1 > E3 > E5 and E2 < E4. Prices are N-bit unsigned integers and the
cascade letters are their decimal strings.

Component layout of :func:`ttop_cascade` (flip-flop indices):

* ``0 .. N-1``      Previous, most significant bit first
* ``N``             Slope (high = positive)
* ``N+1``           LastMax flag, then ``N+2 .. 2N+1`` its bits
* ``2N+2``          LastMin flag, then ``2N+3 .. 3N+2`` its bits
* ``3N+3 .. 3N+8``  Count 0..5, one-hot
"""
from dataclasses import dataclass

import numpy as np

from ..automata import CascadeSpec, Component, OutputFunction
from ..errors import InvalidInputError, ParameterError

MAX_BITS = 16
SET, RESET, READ = 0, 1, 2
LOW, HIGH = 0, 1


@dataclass(frozen=True)
class PriceSequence:
    """Stock prices representable with ``bits`` bits."""

    prices: tuple
    bits: int

    def __post_init__(self):
        prices = tuple(int(p) for p in self.prices)
        if any(p < 0 or p >= 2**self.bits for p in prices):
            raise InvalidInputError(f"prices must lie in [0, {2**self.bits})")
        object.__setattr__(self, "prices", prices)

    def __len__(self):
        return len(self.prices)

    def letters(self):
        return [str(p) for p in self.prices]


def random_prices(rng, bits, max_len=40, min_len=1):
    """A uniformly random price sequence; the length is uniform too."""
    n = int(rng.integers(min_len, max_len + 1))
    return PriceSequence(rng.integers(0, 2**bits, size=n), bits)


def planted_prices(rng, bits, max_len=40):
    """Five extrema shaped like a TTOP, padded with random prices on both sides.

    Earlier extrema in the random head can still veto the detection, which
    keeps both outcomes in mixed test corpora. Needs at least 3 bits: the
    five extrema need 4 distinct levels with room for the confirming step
    after E5.
    """
    top = 2**bits - 1
    if bits < 3:
        raise InvalidInputError("a TTOP needs at least 3 bits")
    while True:
        e1, e3, e5 = sorted(rng.choice(np.arange(2, top + 1), size=3, replace=False))[::-1]
        lows = np.arange(0, e5)
        if lows.size < 2:
            continue
        e2, e4 = sorted(rng.choice(lows, size=2, replace=False))
        after = int(rng.integers(0, e5))
        core = [int(e1), int(e2), int(e3), int(e4), int(e5), after]
        room = max_len - len(core)
        if room < 0:
            raise InvalidInputError("max_len is too short for a planted pattern")
        k = int(rng.integers(0, room + 1))
        head = int(rng.integers(0, k + 1))
        seq = list(rng.integers(0, top + 1, size=head)) + [e1 - 1] * (head > 0) + core
        seq = seq + list(rng.integers(0, top + 1, size=max(0, k - head - (head > 0))))
        return PriceSequence(seq[:max_len], bits)


def ttop_reference(prices):
    """Output bit per price, following the detection loop step by step.

    The first price only initialises ``prev`` and yields 0. ``IncrementCount``
    advances the one-hot count by one place (saturating at 5). The unset
    extremum trackers are ``None`` instead of out-of-range sentinels.
    """
    prices = list(prices.prices if isinstance(prices, PriceSequence) else prices)
    if not prices:
        return []
    last_max = last_min = None
    count = 0
    positive = True
    prev = prices[0]
    out = [0]
    for cur in prices[1:]:
        if positive and prev > cur:
            if last_max is None or prev < last_max:
                last_max = prev
                count = min(count + 1, 5)
            else:
                count = 1
        if not positive and prev < cur:
            if last_min is None or prev > last_min:
                last_min = prev
                count = min(count + 1, 5)
            else:
                count = 2
        if prev < cur:
            positive = True
        elif prev > cur:
            positive = False
        out.append(int(count == 5))
        prev = cur
    return out


# -- cascade ---------------------------------------------------------------

def _value(bits):
    """Integer from MSB-first 0/1 arrays (broadcasting)."""
    v = 0
    for b in bits:
        v = v * 2 + np.asarray(b, dtype=np.int64)
    return v


def _copy_bit(bit):
    return np.where(bit == HIGH, SET, RESET)


class _Layout:
    def __init__(self, n):
        self.n = n
        self.prev = tuple(range(n))
        self.slope = n
        self.max_flag = n + 1
        self.max_bits = tuple(range(n + 2, 2 * n + 2))
        self.min_flag = 2 * n + 2
        self.min_bits = tuple(range(2 * n + 3, 3 * n + 3))
        self.count = tuple(range(3 * n + 3, 3 * n + 9))

    @property
    def extrema_reads(self):
        """Everything the Count components consult besides their neighbour."""
        return tuple(range(3 * self.n + 3))


def _events(n, cur, args):
    """Extremum events from the Count reads ``prev, slope, max, min`` at t-1."""
    prev = _value(args[:n])
    slope = args[n]
    max_flag, max_val = args[n + 1], _value(args[n + 2: 2 * n + 2])
    min_flag, min_val = args[2 * n + 2], _value(args[2 * n + 3: 3 * n + 3])
    is_max = (slope == HIGH) & (prev > cur)
    is_min = (slope == LOW) & (prev < cur)
    ok_max = (max_flag == LOW) | (prev < max_val)
    ok_min = (min_flag == LOW) | (prev > min_val)
    inc = (is_max & ok_max) | (is_min & ok_min)
    return inc, is_max & ~ok_max, is_min & ~ok_min


def _previous_rule(n, i):
    def rule(cur):
        return _copy_bit((cur >> (n - 1 - i)) & 1)
    return rule


def _slope_rule(n):
    def rule(cur, *prev_bits):
        prev = _value(prev_bits)
        return np.where(prev < cur, SET, np.where(prev > cur, RESET, READ))
    return rule


def _flag_rule(n, maximum):
    def rule(cur, *args):
        prev, slope = _value(args[:n]), args[n]
        hit = (slope == HIGH) & (prev > cur) if maximum else (slope == LOW) & (prev < cur)
        return np.where(hit, SET, READ)
    return rule


def _tracker_rule(n, i, maximum):
    """Bit ``i`` of LastMax (keeps the minimum) or LastMin (keeps the maximum)."""

    def rule(cur, *args):
        prev_bits, slope, flag, stored = args[:n], args[n], args[n + 1], args[n + 2:]
        prev = _value(prev_bits)
        hit = (slope == HIGH) & (prev > cur) if maximum else (slope == LOW) & (prev < cur)
        bit = np.asarray(prev_bits[i], dtype=np.int64)
        q_prefix = _value(stored)
        p_prefix = _value(prev_bits[:i])
        if maximum:
            tie = np.where(bit == HIGH, READ, RESET)
            take = q_prefix > p_prefix
        else:
            tie = np.where(bit == LOW, READ, SET)
            take = q_prefix < p_prefix
        known = np.where(q_prefix == p_prefix, tie, np.where(take, _copy_bit(bit), READ))
        return np.where(hit, np.where(flag == LOW, _copy_bit(bit), known), READ)

    return rule


def _count_rule(n, i):
    def rule(cur, *args):
        inc, to_one, to_two = _events(n, cur, args)
        if i == 0:
            on_inc = RESET
        else:
            below = args[-1]
            on_inc = np.where(below == HIGH, SET, READ if i == 5 else RESET)
        out = np.where(inc, on_inc, READ)
        out = np.where(to_one, SET if i == 1 else RESET, out)
        return np.where(to_two, SET if i == 2 else RESET, out)
    return rule


def _shape(n, k):
    return (2**n,) + (2,) * k


def ttop_cascade(bits):
    """Flip-flop cascade whose output is 1 exactly when the count reached 5.

    The output reads the pre-transition state, so it recomputes Count 5's
    next state from Count 5's own inputs.
    """
    n = int(bits)
    if not 1 <= n <= MAX_BITS:
        raise ParameterError(f"bits must be in [1, {MAX_BITS}], got {bits}")
    lay = _Layout(n)
    comps = []
    for i in range(n):
        comps.append(Component("flipflop", (), rule=_previous_rule(n, i), shape=_shape(n, 0),
                               name=f"previous.bit{i + 1}", initial="low"))
    comps.append(Component("flipflop", lay.prev, rule=_slope_rule(n), shape=_shape(n, n),
                           name="slope", initial="high"))
    for label, maximum, flag, bit_idx in (("lastmax", True, lay.max_flag, lay.max_bits),
                                          ("lastmin", False, lay.min_flag, lay.min_bits)):
        base = lay.prev + (lay.slope,)
        comps.append(Component("flipflop", base, rule=_flag_rule(n, maximum), shape=_shape(n, n + 1),
                               name=f"{label}.flag", initial="low"))
        for i in range(n):
            reads = base + (flag,) + bit_idx[:i]
            comps.append(Component("flipflop", reads, rule=_tracker_rule(n, i, maximum),
                                   shape=_shape(n, len(reads)), name=f"{label}.bit{i + 1}",
                                   initial="low"))
    for i in range(6):
        reads = lay.extrema_reads + ((lay.count[i - 1],) if i else ())
        comps.append(Component("flipflop", reads, rule=_count_rule(n, i), shape=_shape(n, len(reads)),
                               name=f"count{i}", initial="high" if i == 0 else "low"))
    c5 = comps[lay.count[5]]
    count5_rule = _count_rule(n, 5)
    core = c5.core

    def output_rule(cur, *args):
        nxt = core[np.asarray(args[-1], dtype=np.int64), count5_rule(cur, *args[:-1])]
        return nxt == HIGH

    out_reads = c5.reads + (lay.count[5],)
    output = OutputFunction(("0", "1"), out_reads, rule=output_rule, shape=_shape(n, len(out_reads)))
    alphabet = tuple(str(p) for p in range(2**n))
    return CascadeSpec(alphabet, comps, "cascade", output)


def component_count(bits):
    """Previous + Slope + LastMax + LastMin + Count."""
    return bits + 1 + 2 * (bits + 1) + 6
