"""Transformation semigroups: generation, classification and group-freeness.

Products compose left to right, matching how input letters act on states:
``s * t`` applies ``s`` first and then ``t``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, InvalidInputError

DIVISOR_BOUND = 64
DEFAULT_MAX_ELEMENTS = 200_000


@dataclass(frozen=True)
class Transformation:
    """A total map on the state indices ``0..n-1``."""

    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        n = len(images)
        if n == 0:
            raise InvalidInputError("a transformation needs at least one state")
        bad = [i for i in images if not 0 <= i < n]
        if bad:
            raise InvalidInputError(f"image indices {bad} outside [0, {n})")
        object.__setattr__(self, "images", images)

    @property
    def n(self):
        return len(self.images)

    def __call__(self, q):
        return self.images[q]

    def then(self, other):
        """Apply ``self`` and then ``other``."""
        if other.n != self.n:
            raise InvalidInputError("state-set sizes differ")
        return Transformation(tuple(other.images[q] for q in self.images))

    def power(self, k):
        if k < 1:
            raise InvalidInputError("powers start at 1")
        out = self
        for _ in range(k - 1):
            out = out.then(self)
        return out

    def classify(self):
        return classify(self)

    def as_array(self):
        return np.asarray(self.images, dtype=np.int64)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))


def classify(t):
    """One of ``identity``, ``reset``, ``permutation`` or ``other``.

    Labels are checked in that order, so the identity on a single state is
    reported as ``identity`` even though its image is a singleton.
    """
    images = t.images
    if images == tuple(range(t.n)):
        return "identity"
    image = set(images)
    if len(image) == 1:
        return "reset"
    if len(image) == t.n:
        return "permutation"
    return "other"


def _key(row):
    return row.tobytes()


@dataclass(eq=False)
class TransformationSemigroup:
    """Closure of a generator set under composition.

    ``elements`` holds one transformation per row. ``generators`` lists the
    element indices of the (deduplicated) generators.
    """

    elements: np.ndarray
    generators: tuple
    _index: dict = field(default_factory=dict, repr=False)
    _table: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {_key(row): i for i, row in enumerate(self.elements)}

    def __len__(self):
        return self.elements.shape[0]

    @property
    def degree(self):
        return self.elements.shape[1]

    def element(self, i):
        return Transformation(tuple(self.elements[i]))

    def index(self, t):
        row = np.asarray(t.images if isinstance(t, Transformation) else t, dtype=self.elements.dtype)
        return self._index.get(_key(row))

    def multiply(self, i, j):
        return self._index[_key(self.elements[j][self.elements[i]])]

    @property
    def table(self):
        """Composition table; entry ``[i, j]`` is the index of ``e_i * e_j``."""
        if self._table is None:
            k = len(self)
            table = np.empty((k, k), dtype=np.int64)
            E = self.elements
            for j in range(k):
                prod = E[j][E]
                table[:, j] = [self._index[_key(r)] for r in prod]
            self._table = table
        return self._table


def generate_semigroup(generators, max_elements=DEFAULT_MAX_ELEMENTS):
    """Close ``generators`` under composition by breadth-first search."""
    gens = [g if isinstance(g, Transformation) else Transformation(tuple(g)) for g in generators]
    if not gens:
        raise InvalidInputError("at least one generator is required")
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise InvalidInputError("generators act on different state-set sizes")
    dtype = np.int32 if n < 2**31 else np.int64
    G = [np.asarray(g.images, dtype=dtype) for g in gens]

    rows, index, gen_idx = [], {}, []
    for g in G:
        k = _key(g)
        if k not in index:
            index[k] = len(rows)
            rows.append(g)
        gen_idx.append(index[k])
    gen_idx = tuple(dict.fromkeys(gen_idx))
    frontier = list(range(len(rows)))
    while frontier:
        F = np.stack([rows[i] for i in frontier])
        frontier = []
        for g in G:
            for row in g[F]:
                k = _key(row)
                if k not in index:
                    if len(rows) >= max_elements:
                        raise CapacityError(f"semigroup exceeds {max_elements} elements")
                    index[k] = len(rows)
                    rows.append(row)
                    frontier.append(index[k])
    return TransformationSemigroup(np.stack(rows), gen_idx, index)


def periodic_elements(s):
    """Indices of elements ``x`` with ``x^k != x^(k+1)`` for every ``k <= |s|``."""
    X = s.elements.astype(np.int64)
    P = X.copy()
    pending = np.ones(len(s), dtype=bool)
    # An aperiodic x stabilises once k reaches its index, which is at most
    # min(|s|, degree).
    for _ in range(min(len(s), s.degree) + 1):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        nxt = np.take_along_axis(X[idx], P[idx], axis=1)
        stable = (nxt == P[idx]).all(axis=1)
        pending[idx[stable]] = False
        P[idx] = nxt
    return np.flatnonzero(pending)


def is_aperiodic(s):
    return periodic_elements(s).size == 0


def maximal_subgroups(s):
    """Map each idempotent index to the group of units of its local monoid.

    The group at ``e`` is ``{x in eSe : xy = yx = e for some y in eSe}``.
    """
    T = s.table
    groups = {}
    for e in np.flatnonzero(T[np.arange(len(s)), np.arange(len(s))] == np.arange(len(s))):
        local = np.unique(T[T[e, :], e])
        sub = T[np.ix_(local, local)]
        units = [x for a, x in enumerate(local) if ((sub[a, :] == e) & (sub[:, a] == e)).any()]
        groups[int(e)] = sorted(int(u) for u in units)
    return groups


def has_nontrivial_group_divisor(s, bound=DIVISOR_BOUND):
    """True iff some non-trivial group divides ``s``.

    A group divides a finite semigroup exactly when it divides one of its
    maximal subgroups, so the search runs over idempotents and their local
    monoids using only the composition table (no power sequences).
    """
    if len(s) > bound:
        raise CapacityError(f"semigroup has {len(s)} elements, over the bound {bound}")
    return any(len(g) > 1 for g in maximal_subgroups(s).values())
