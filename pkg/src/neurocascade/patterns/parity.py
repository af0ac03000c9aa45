"""Odd-length acceptor over a one-letter alphabet, and two-flip-flop network fixtures."""
import numpy as np

from ..automata import (
    Automaton,
    CascadeSpec,
    Component,
    OutputFunction,
    toggle_semiautomaton,
)


def parity_spec():
    """The odd-length acceptor and its one-toggle cascade.

    The output reads the pre-transition state: ``low`` on ``a`` gives 1
    because the string read so far, including this ``a``, has odd length.
    """
    semi = toggle_semiautomaton({"a": "toggle"})
    automaton = Automaton(semi, "low", ("0", "1"), [[1], [0]])
    toggle = Component("toggle", (), [2], name="parity", initial="low")
    output = OutputFunction(("0", "1"), (0,), [[1, 0]])
    return automaton, CascadeSpec(("a",), [toggle], "cascade", output)


def rotation_network():
    """Two flip-flops over ``{a}``: F1 copies F2 and F2 copies the negation of F1.

    The state pair cycles through four values, so the flattening contains a
    cyclic group of order four and is not group-free.
    """
    copy = np.array([[1, 0]])        # reset when F2 low, set when F2 high
    negate = np.array([[0, 1]])      # set when F1 low, reset when F1 high
    return CascadeSpec(("a",), [
        Component("flipflop", (1,), copy, name="f1"),
        Component("flipflop", (0,), negate, name="f2"),
    ], "network")


def mutual_set_network():
    """Two flip-flops over ``{a, b}``; each sets when the other is high.

    Letter ``b`` resets both, so every product state is reachable.
    """
    read_or_set = np.array([[2, 0], [1, 1]])
    return CascadeSpec(("a", "b"), [
        Component("flipflop", (1,), read_or_set, name="f1"),
        Component("flipflop", (0,), read_or_set, name="f2"),
    ], "network")
