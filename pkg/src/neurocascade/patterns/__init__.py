"""Worked constructions: TTOP detection, the Cookie domain and odd-length parity."""
from .cookie import (
    CookieObservation,
    cookie_alphabet,
    cookie_cascade,
    cookie_probabilities,
    cookie_reference,
    simulate_episode,
)
from .parity import mutual_set_network, parity_spec, rotation_network
from .ttop import PriceSequence, planted_prices, random_prices, ttop_cascade, ttop_reference

__all__ = [
    "CookieObservation",
    "PriceSequence",
    "cookie_alphabet",
    "cookie_cascade",
    "cookie_probabilities",
    "cookie_reference",
    "mutual_set_network",
    "parity_spec",
    "planted_prices",
    "random_prices",
    "rotation_network",
    "simulate_episode",
    "ttop_cascade",
    "ttop_reference",
]
