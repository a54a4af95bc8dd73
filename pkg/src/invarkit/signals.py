"""Unit-norm signals, finite permutation groups, and orbits.

Signals live on the unit sphere; group elements are permutations of the
coordinate indices, so every action preserves the Euclidean norm exactly.
Groups are stored as explicit element lists, which turns the group averages
used elsewhere into exact finite sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ZeroVector

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Signal:
    """A real vector of unit Euclidean norm."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise DimensionMismatch("signal must be a 1-d vector with d >= 1")
        if abs(np.linalg.norm(v) - 1.0) > _NORM_TOL:
            raise ValueError("signal is not unit-norm; use normalize()")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    def __array__(self, dtype=None):
        return np.asarray(self.values, dtype=dtype)


def normalize(v) -> Signal:
    """Scale a vector to unit norm.

    Raises ZeroVector for degenerate inputs.
    """
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < 1e-300:
        raise ZeroVector("cannot normalize a zero vector")
    return Signal(v / n)


@dataclass(frozen=True)
class FiniteGroup:
    """An explicit finite group of coordinate permutations.

    ``elements[k]`` is a permutation array ``p`` acting on a vector ``x`` as
    ``(g x)[j] = x[p[j]]``.
    """

    elements: np.ndarray  # (order, d) int array
    identity_index: int = 0

    def __post_init__(self):
        e = np.asarray(self.elements, dtype=np.intp)
        if e.ndim != 2:
            raise DimensionMismatch("elements must be an (order, d) array")
        e.setflags(write=False)
        object.__setattr__(self, "elements", e)

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class Orbit:
    """The set {g x : g in G}, one member per group element."""

    representative: Signal
    members: list = field(default_factory=list)


def cyclic_group(d: int) -> FiniteGroup:
    """The d circular shifts of coordinates; shift k maps index i to (i+k) mod d."""
    if d < 1:
        raise DimensionMismatch("d must be >= 1")
    idx = np.arange(d)
    elements = np.stack([(idx - k) % d for k in range(d)])
    return FiniteGroup(elements=elements, identity_index=0)


def apply(g: np.ndarray, x: Signal) -> Signal:
    """Apply one group element (a permutation array) to a signal."""
    g = np.asarray(g, dtype=np.intp)
    if g.size != x.dim:
        raise DimensionMismatch(f"element dim {g.size} != signal dim {x.dim}")
    return Signal(x.values[g])


def orbit(G: FiniteGroup, x: Signal) -> Orbit:
    """Assemble the full orbit of x under G (duplicates allowed)."""
    if G.dim != x.dim:
        raise DimensionMismatch(f"group dim {G.dim} != signal dim {x.dim}")
    return Orbit(representative=x, members=[apply(g, x) for g in G])


def compose(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Permutation for g∘h, i.e. apply h first, then g."""
    g = np.asarray(g, dtype=np.intp)
    h = np.asarray(h, dtype=np.intp)
    return h[g]


@dataclass(frozen=True)
class GroupAxiomReport:
    closure_ok: bool
    identity_ok: bool
    inverses_ok: bool
    failures: tuple = ()

    @property
    def all_ok(self) -> bool:
        return self.closure_ok and self.identity_ok and self.inverses_ok


def verify_group_axioms(G: FiniteGroup) -> GroupAxiomReport:
    """Exhaustively check closure, identity, and inverses over all element pairs."""
    elems = [tuple(g) for g in G.elements]
    table = set(elems)
    failures = []

    identity = tuple(range(G.dim))
    identity_ok = identity in table
    if not identity_ok:
        failures.append("identity missing")

    closure_ok = True
    for i, g in enumerate(G.elements):
        for j, h in enumerate(G.elements):
            if tuple(compose(g, h)) not in table:
                closure_ok = False
                failures.append(f"composition of elements {i},{j} not in group")

    inverses_ok = True
    for i, g in enumerate(G.elements):
        inv = np.empty_like(g)
        inv[g] = np.arange(G.dim)
        if tuple(inv) not in table:
            inverses_ok = False
            failures.append(f"inverse of element {i} not in group")

    return GroupAxiomReport(
        closure_ok=closure_ok,
        identity_ok=identity_ok,
        inverses_ok=inverses_ok,
        failures=tuple(failures),
    )
