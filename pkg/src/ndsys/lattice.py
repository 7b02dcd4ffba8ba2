"""Multi-index arithmetic, axis-aligned boxes, and finitely supported signals.

Lattice points are plain tuples of Python ints.  The *order* of a point is the
sum of its coordinates; the set of points of one fixed order is a front.  All
enumeration here is lexicographic so that downstream assemblies are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ArityError, DomainError, ShapeError

__all__ = [
    "order",
    "unit",
    "as_index",
    "add",
    "sub",
    "Box",
    "SimulationWindow",
    "LatticeSignal",
]


def order(t: tuple[int, ...]) -> int:
    """Sum of the coordinates of ``t``."""
    return sum(t)


def unit(n: int, k: int) -> tuple[int, ...]:
    """The k-th coordinate unit vector in Z^n, k counted from 0."""
    if not 0 <= k < n:
        raise DomainError(f"coordinate index {k} outside 0..{n - 1}")
    return tuple(1 if i == k else 0 for i in range(n))


def as_index(t: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Coerce to an int tuple, checking length against ``n`` when given."""
    out = tuple(int(v) for v in t)
    if n is not None and len(out) != n:
        raise ArityError(f"expected a point of Z^{n}, got length {len(out)}")
    return out


def add(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a + b for a, b in zip(s, t))


def sub(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a - b for a, b in zip(s, t))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``lo <= t <= hi`` in Z^n (bounds inclusive)."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        lo = as_index(self.lo)
        hi = as_index(self.hi, len(lo))
        if any(a > b for a, b in zip(lo, hi)):
            raise DomainError(f"empty box: lo={lo} exceeds hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return len(self.lo)

    def contains(self, t: tuple[int, ...]) -> bool:
        return all(a <= v <= b for a, v, b in zip(self.lo, t, self.hi))

    def order_range(self) -> tuple[int, int]:
        """Smallest and largest front order meeting the box."""
        return order(self.lo), order(self.hi)

    def front(self, n: int) -> list[tuple[int, ...]]:
        """All box points of order ``n``, lexicographically."""
        out: list[tuple[int, ...]] = []
        self._walk(0, n, (), out)
        return out

    def _walk(self, i, remaining, prefix, out):
        if i == self.n:
            if remaining == 0:
                out.append(prefix)
            return
        # prune by what the remaining coordinates can still sum to
        rest_lo = sum(self.lo[i + 1 :])
        rest_hi = sum(self.hi[i + 1 :])
        lo = max(self.lo[i], remaining - rest_hi)
        hi = min(self.hi[i], remaining - rest_lo)
        for v in range(lo, hi + 1):
            self._walk(i + 1, remaining - v, prefix + (v,), out)

    def negated(self) -> "Box":
        """The reflection ``-t`` of the box through the origin."""
        return Box(tuple(-b for b in self.hi), tuple(-a for a in self.lo))

    def shrunk(self, margin: int) -> "Box":
        """The box with ``margin`` layers peeled off every face."""
        return Box(
            tuple(a + margin for a in self.lo),
            tuple(b - margin for b in self.hi),
        )


@dataclass(frozen=True)
class SimulationWindow:
    """A box together with the last front order to evaluate.

    Fronts 1..n_max of the box are computed; front 0 carries initial data.
    """

    box: Box
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def n(self) -> int:
        return self.box.n


def _freeze(vec: np.ndarray) -> np.ndarray:
    out = np.array(vec, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LatticeSignal:
    """Finitely supported map from Z^n into C^dim.

    Points absent from ``entries`` read as the zero vector; ``dim`` is kept
    explicitly so the empty signal still knows its value space.
    """

    n: int
    dim: int
    entries: Mapping[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"lattice dimension must be >= 1, got {self.n}")
        if self.dim < 0:
            raise DomainError(f"value dimension must be >= 0, got {self.dim}")
        clean: dict[tuple[int, ...], np.ndarray] = {}
        for t, v in self.entries.items():
            key = as_index(t, self.n)
            vec = _freeze(v)
            if vec.shape != (self.dim,):
                raise ShapeError(
                    f"value at {key} has shape {vec.shape}, expected ({self.dim},)"
                )
            clean[key] = vec
        object.__setattr__(self, "entries", clean)

    def value(self, t: tuple[int, ...]) -> np.ndarray:
        v = self.entries.get(tuple(t))
        if v is None:
            return np.zeros(self.dim, dtype=complex)
        return v

    @property
    def support(self) -> set[tuple[int, ...]]:
        return set(self.entries)

    def items(self) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
        return iter(sorted(self.entries.items()))

    def on_front(self, n: int) -> list[tuple[tuple[int, ...], np.ndarray]]:
        return [(t, v) for t, v in self.items() if order(t) == n]

    def restricted(self, points: Iterable[tuple[int, ...]]) -> "LatticeSignal":
        keep = set(points)
        return LatticeSignal(
            self.n, self.dim, {t: v for t, v in self.entries.items() if t in keep}
        )

    def octant_supported(self) -> bool:
        """Whether every support point has only nonnegative coordinates."""
        return all(min(t) >= 0 for t in self.entries) if self.entries else True

    def norm(self) -> float:
        return float(
            np.sqrt(sum(float(np.vdot(v, v).real) for v in self.entries.values()))
        )
