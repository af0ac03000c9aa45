"""Cookie domain: a simulator with exact belief tracking and a flip-flop cascade.

Three rooms (green, orange, blue) hang off a hallway. Pushing the button in
the orange room puts a cookie in the green or blue room with equal odds,
replacing any cookie already there. Entering (or staying in) the room with
the cookie eats it.

Letters name the location followed by the true flags, in the fixed order
``cookie``, ``cookieEaten``, ``buttonPushed``, joined by ``+``; for example
``green+cookie+cookieEaten``.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from ..automata import CascadeSpec, Component, OutputFunction
from ..errors import InvalidInputError

LOCATIONS = ("hallway", "green", "orange", "blue")
FLAGS = ("cookie", "cookieEaten", "buttonPushed")
OUTPUTS = ("0", "0.5", "1")
ROOM_PROPERTY = {"hallway": "hallway", "green": "greenRoom", "orange": "orangeRoom", "blue": "blueRoom"}


@dataclass(frozen=True)
class CookieObservation:
    """Boolean properties observed at one step; exactly one location holds."""

    cookie: bool = False
    cookieEaten: bool = False
    buttonPushed: bool = False
    greenRoom: bool = False
    orangeRoom: bool = False
    blueRoom: bool = False
    hallway: bool = False

    def __post_init__(self):
        if sum((self.greenRoom, self.orangeRoom, self.blueRoom, self.hallway)) != 1:
            raise InvalidInputError("exactly one location property must hold")

    @property
    def location(self):
        for loc, prop in ROOM_PROPERTY.items():
            if getattr(self, prop):
                return loc
        raise AssertionError("unreachable")

    @property
    def letter(self):
        return "+".join([self.location] + [f for f in FLAGS if getattr(self, f)])

    @classmethod
    def at(cls, location, **flags):
        if location not in ROOM_PROPERTY:
            raise InvalidInputError(f"unknown location {location!r}")
        return cls(**{ROOM_PROPERTY[location]: True}, **flags)

    @classmethod
    def from_letter(cls, letter):
        loc, *flags = letter.split("+")
        bad = [f for f in flags if f not in FLAGS]
        if bad:
            raise InvalidInputError(f"unknown flags {bad} in {letter!r}")
        return cls.at(loc, **{f: True for f in flags})

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj):
        return cls(**{k: bool(v) for k, v in obj.items()})


def cookie_alphabet():
    """All 32 letters: every location with every subset of flags."""
    out = []
    for loc in LOCATIONS:
        for bits in product((False, True), repeat=len(FLAGS)):
            out.append("+".join([loc] + [f for f, b in zip(FLAGS, bits) if b]))
    return tuple(out)


def _moves(location):
    if location == "hallway":
        return ("hallway", "green", "orange", "blue")
    if location == "orange":
        return ("orange", "hallway", "push")
    return (location, "hallway")


def simulate_episode(seed, steps):
    """Observations of a uniform random walk that starts in the hallway.

    The hallway leads to any room or stays put; a room is left for the
    hallway or kept; in the orange room the agent may also push the button.
    """
    if steps < 1:
        raise InvalidInputError("steps must be at least 1")
    rng = np.random.default_rng(seed)
    where = None
    loc = "hallway"
    out = []
    for t in range(steps):
        pushed = False
        if t > 0:
            options = _moves(loc)
            move = options[int(rng.integers(0, len(options)))]
            if move == "push":
                pushed = True
                where = ("green", "blue")[int(rng.integers(0, 2))]
            else:
                loc = move
        seen = where is not None and where == loc
        if seen:
            where = None
        out.append(CookieObservation.at(loc, cookie=seen, cookieEaten=seen, buttonPushed=pushed))
    return out


def cookie_probabilities(observations):
    """Exact probability that observation ``t`` shows a cookie.

    Conditions on observations ``0..t-1`` and the location at ``t``. The
    belief is a distribution over the cookie being absent, in green or in
    blue; a push at ``t`` resets it to an even split before predicting.
    """
    belief = {"none": 1.0, "green": 0.0, "blue": 0.0}
    probs = []
    for o in observations:
        if o.buttonPushed:
            belief = {"none": 0.0, "green": 0.5, "blue": 0.5}
        probs.append(belief.get(o.location, 0.0))
        belief = _condition(belief, o.location, o.cookie)
    return probs


def cookie_reference(seed, steps):
    """Simulated observations and the ground-truth next-cookie probabilities."""
    obs = simulate_episode(seed, steps)
    return obs, cookie_probabilities(obs)


def _condition(belief, loc, seen):
    if loc not in ("green", "blue"):
        return belief
    if seen:
        # the cookie was eaten on sight
        return {"none": 1.0, "green": 0.0, "blue": 0.0}
    post = dict(belief)
    post[loc] = 0.0
    total = sum(post.values())
    return {k: v / total for k, v in post.items()}


def _f1(o):
    if o.buttonPushed:
        return "set"
    if o.cookieEaten:
        return "reset"
    return "read"


def _f2(o):
    if o.buttonPushed:
        return "reset"
    if o.greenRoom or o.blueRoom:
        return "set"
    return "read"


def _f3(o):
    if o.greenRoom:
        return "set" if o.cookie else "reset"
    if o.blueRoom:
        return "reset" if o.cookie else "set"
    return "read"


def _predict(o, f1, f2, f3):
    if not (o.greenRoom or o.blueRoom) or f1 == "low":
        return "0"
    if f2 == "low":
        return "0.5"
    in_green = f3 == "high"
    return "1" if in_green == bool(o.greenRoom) else "0"


def cookie_cascade():
    """Three independent flip-flops F1 (cookie around), F2 (rooms visited), F3 (room with cookie)."""
    alphabet = cookie_alphabet()
    obs = [CookieObservation.from_letter(s) for s in alphabet]
    comps = []
    for name, fn in (("cookie_around", _f1), ("rooms_visited", _f2), ("room_with_cookie", _f3)):
        comps.append(Component.from_function("flipflop", lambda s, fn=fn: fn(CookieObservation.from_letter(s)),
                                             alphabet, name=name, initial="low"))
    states = ("low", "high")
    table = np.empty((len(alphabet), 2, 2, 2), dtype=np.int64)
    for k, o in enumerate(obs):
        for i, j, m in product(range(2), repeat=3):
            table[k, i, j, m] = OUTPUTS.index(_predict(o, states[i], states[j], states[m]))
    return CascadeSpec(alphabet, comps, "cascade", OutputFunction(OUTPUTS, (0, 1, 2), table))


def episode_letters(observations):
    return [o.letter for o in observations]
