"""Shared distribution types, entropy functionals, and sorting utilities.

States are numbered 1..n in all public inputs and outputs. Every type
validates its invariants on construction and is immutable afterwards, so
values can be shared freely across threads or processes. All entropies are
in bits (logarithm base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

# Sum-to-one checks on distributions.
EPS_SUM = 1e-9
# Agreement required when a coupling's marginal is compared to its target.
EPS_MARG = 1e-9
# Residual masses below this are snapped to exactly zero so floating-point
# dust cannot trigger spurious solver iterations.
EPS_ZERO = 1e-12


class DomainError(ValueError):
    """A value violates a domain invariant (negative mass, bad total, ...)."""


class DimensionError(ValueError):
    """Inputs that must share a length or shape do not."""


@dataclass(frozen=True)
class Marginal:
    """A discrete probability distribution over states 1..n.

    Entries must be nonnegative and sum to 1 within ``EPS_SUM``.
    """

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) == 0:
            raise DomainError("marginal needs at least one state")
        low = min(self.probs)
        if low < 0.0:
            raise DomainError(f"negative probability {low!r} in marginal")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > EPS_SUM:
            raise DomainError(f"marginal sums to {total!r}, expected 1.0")

    @classmethod
    def of(cls, values: Iterable[float]) -> "Marginal":
        return cls(tuple(float(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self) -> Iterator[float]:
        return iter(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


@dataclass(frozen=True)
class ResidualVector:
    """A sub-probability vector: nonnegative masses with a recorded total.

    Unlike :class:`Marginal` the masses need not sum to 1; ``total`` must
    equal the entry sum within ``EPS_SUM``.
    """

    masses: tuple[float, ...]
    total: float

    def __post_init__(self) -> None:
        if len(self.masses) == 0:
            raise DomainError("residual vector needs at least one entry")
        low = min(self.masses)
        if low < 0.0:
            raise DomainError(f"negative mass {low!r} in residual vector")
        actual = math.fsum(self.masses)
        if abs(actual - self.total) > EPS_SUM:
            raise DomainError(
                f"recorded total {self.total!r} differs from entry sum {actual!r}"
            )

    @classmethod
    def of(cls, values: Iterable[float]) -> "ResidualVector":
        masses = tuple(float(v) for v in values)
        return cls(masses, math.fsum(masses))

    @property
    def n(self) -> int:
        return len(self.masses)

    def __len__(self) -> int:
        return len(self.masses)

    def __iter__(self) -> Iterator[float]:
        return iter(self.masses)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.masses, dtype=float)


@dataclass(frozen=True)
class SparseCoupling:
    """A joint distribution over m variables stored as tuple -> mass.

    Index tuples are 1-based. Only strictly positive masses are stored;
    anything at or below ``EPS_ZERO`` is rejected. ``assignment_order``
    preserves the order in which a solver produced the entries (defaults
    to the mapping's iteration order).
    """

    num_vars: int
    cardinalities: tuple[int, ...]
    entries: Mapping[tuple[int, ...], float]
    assignment_order: tuple[tuple[tuple[int, ...], float], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.num_vars < 2:
            raise DomainError("coupling needs at least two variables")
        if len(self.cardinalities) != self.num_vars:
            raise DimensionError(
                f"{self.num_vars} variables but {len(self.cardinalities)} cardinalities"
            )
        if any(c < 1 for c in self.cardinalities):
            raise DomainError("cardinalities must be positive")
        if not self.entries:
            raise DomainError("coupling has no entries")
        object.__setattr__(self, "entries", dict(self.entries))
        for tup, mass in self.entries.items():
            if len(tup) != self.num_vars:
                raise DimensionError(f"index tuple {tup} does not have {self.num_vars} axes")
            for axis, state in enumerate(tup):
                if not 1 <= state <= self.cardinalities[axis]:
                    raise DomainError(f"state {state} out of range on axis {axis + 1}")
            if mass <= EPS_ZERO:
                raise DomainError(f"mass {mass!r} at {tup} is not above {EPS_ZERO}")
        total = math.fsum(self.entries.values())
        if abs(total - 1.0) > EPS_SUM:
            raise DomainError(f"coupling mass sums to {total!r}, expected 1.0")
        if not self.assignment_order:
            object.__setattr__(
                self, "assignment_order", tuple(self.entries.items())
            )
        elif {t for t, _ in self.assignment_order} != set(self.entries):
            raise DomainError("assignment order does not cover the coupling support")

    @property
    def num_entries(self) -> int:
        return len(self.entries)

    def masses(self) -> tuple[float, ...]:
        return tuple(self.entries.values())

    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.entries.keys())


MassLike = Marginal | ResidualVector | SparseCoupling | Mapping | Iterable[float]


def _mass_array(values: MassLike) -> np.ndarray:
    if isinstance(values, (Marginal, ResidualVector)):
        return values.as_array()
    if isinstance(values, SparseCoupling):
        return np.asarray(values.masses(), dtype=float)
    if isinstance(values, Mapping):
        return np.asarray(list(values.values()), dtype=float)
    return np.asarray(list(values), dtype=float)


def extended_entropy(values: MassLike) -> float:
    """-sum(v * log2 v) in bits over any nonnegative vector, with 0 log 0 = 0.

    Accepts a :class:`Marginal`, a :class:`ResidualVector`, a
    :class:`SparseCoupling` (its mass multiset), a mapping from indices to
    masses, or any iterable of floats. The input does not have to sum to 1.
    """
    arr = _mass_array(values)
    if arr.size == 0:
        return 0.0
    if float(arr.min()) < 0.0:
        raise DomainError(f"negative entry {arr.min()!r} passed to extended_entropy")
    pos = arr[arr > 0.0]
    if pos.size == 0:
        return 0.0
    return float(-np.sum(pos * np.log2(pos)))


def sort_decreasing(p: Marginal) -> tuple[Marginal, tuple[int, ...]]:
    """Sort a marginal into non-increasing order.

    Returns ``(sorted, perm)`` where ``perm[k]`` is the 1-based original
    index of the k-th largest mass. Ties keep their original order.
    """
    order = sorted(range(len(p)), key=lambda i: (-p.probs[i], i))
    sorted_marginal = Marginal(tuple(p.probs[i] for i in order))
    return sorted_marginal, tuple(i + 1 for i in order)


def total_variation_sorted(p: Marginal, q: Marginal) -> float:
    """Total variation distance between the decreasing rearrangements of p and q."""
    if len(p) != len(q):
        raise DimensionError(f"marginal lengths differ: {len(p)} vs {len(q)}")
    a, _ = sort_decreasing(p)
    b, _ = sort_decreasing(q)
    return 0.5 * math.fsum(abs(x - y) for x, y in zip(a.probs, b.probs))


def marginalize(coupling: SparseCoupling, axis: int) -> list[float]:
    """The marginal distribution a coupling implies along one axis (1-based)."""
    if not 1 <= axis <= coupling.num_vars:
        raise DimensionError(
            f"axis {axis} out of range for {coupling.num_vars} variables"
        )
    out = [0.0] * coupling.cardinalities[axis - 1]
    for tup, mass in coupling.entries.items():
        out[tup[axis - 1] - 1] += mass
    return out
