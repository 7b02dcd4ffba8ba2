"""Operator tuples, linear pencils, and symmetrized multipowers.

For a tuple ``A = (A_1, ..., A_n)`` of square matrices and a multi-index
``s`` the symmetrized multipower ``A^s`` averages the products
``A_{w_1} ... A_{w_|s|}`` over every word ``w`` spelling the letter multiset
``s``.  Bordered variants pin the first factor to a ``C`` tuple, the last to
a ``B`` tuple, or both.  Everything is evaluated through the first-letter
recursion

    A^s = sum_k (s_k / |s|) A_k A^(s - e_k),

never by enumerating words; the enumeration definition survives only as a
test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ArityError, DomainError, RangeError, ShapeError
from .lattice import as_index, order, sub, unit

__all__ = [
    "OperatorTuple",
    "eval_pencil",
    "multinomial",
    "sym_multipower",
    "bordered_multipower",
    "sym_multipower_table",
    "bordered_multipower_table",
]

_INT64_MAX = 2**63 - 1


def _as_matrix(m) -> np.ndarray:
    out = np.array(m, dtype=complex)
    if out.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim {out.ndim}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OperatorTuple:
    """A nonempty tuple of complex matrices sharing one shape.

    Parameters
    ----------
    mats : sequence of array_like
        The members, one per lattice direction.
    """

    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(_as_matrix(m) for m in self.mats)
        if not mats:
            raise ArityError("an operator tuple needs at least one member")
        shape = mats[0].shape
        for i, m in enumerate(mats):
            if m.shape != shape:
                raise ShapeError(
                    f"member {i} has shape {m.shape}, member 0 has {shape}"
                )
        object.__setattr__(self, "mats", mats)

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def rows(self) -> int:
        return self.mats[0].shape[0]

    @property
    def cols(self) -> int:
        return self.mats[0].shape[1]

    def __len__(self) -> int:
        return len(self.mats)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.mats[k]

    def __iter__(self):
        return iter(self.mats)

    def adjoint(self) -> "OperatorTuple":
        """Memberwise conjugate transpose."""
        return OperatorTuple(tuple(m.conj().T for m in self.mats))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(m.view(float))) for m in self.mats)


def eval_pencil(z: Sequence[complex], ops: OperatorTuple) -> np.ndarray:
    """The pencil value ``sum_k z_k ops_k``.

    Raises ArityError if ``z`` and ``ops`` disagree in length.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape != (ops.n,):
        raise ArityError(f"pencil point has shape {z.shape}, tuple has {ops.n} members")
    acc = np.zeros((ops.rows, ops.cols), dtype=complex)
    for zk, m in zip(z, ops):
        acc += zk * m
    return acc


def multinomial(s: Iterable[int]) -> int:
    """Exact multinomial coefficient ``|s|! / (s_1! ... s_n!)``.

    Computed in exact integer arithmetic; a value beyond the signed 64-bit
    range raises RangeError rather than wrapping.
    """
    s = as_index(s)
    if any(v < 0 for v in s):
        raise DomainError(f"multinomial needs nonnegative entries, got {s}")
    out = 1
    total = 0
    for v in s:
        total += v
        out *= math.comb(total, v)
    if out > _INT64_MAX:
        raise RangeError(f"multinomial({s}) = {out} exceeds 64-bit range")
    return out


def _closure(targets: Iterable[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    """Downward closure of ``targets`` under unit subtraction, ordered by
    front then lexicographically."""
    seen: set[tuple[int, ...]] = set()
    stack = [as_index(t, n) for t in targets]
    for t in stack:
        if any(v < 0 for v in t):
            raise DomainError(f"multipower index must be nonnegative, got {t}")
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        for k in range(n):
            if t[k] > 0:
                stack.append(sub(t, unit(n, k)))
    return sorted(seen, key=lambda t: (order(t), t))


def sym_multipower_table(
    a: OperatorTuple, targets: Iterable[tuple[int, ...]]
) -> dict[tuple[int, ...], np.ndarray]:
    """Symmetrized multipowers ``a^s`` for every ``s`` in the downward
    closure of ``targets``.

    Returns
    -------
    dict
        Maps each multi-index to a matrix; the zero index maps to the
        identity.
    """
    if a.rows != a.cols:
        raise ShapeError(f"multipower needs square members, got {a.rows}x{a.cols}")
    table: dict[tuple[int, ...], np.ndarray] = {}
    for s in _closure(targets, a.n):
        m = order(s)
        if m == 0:
            table[s] = np.eye(a.rows, dtype=complex)
            continue
        acc = np.zeros((a.rows, a.rows), dtype=complex)
        for k in range(a.n):
            if s[k] > 0:
                acc += (s[k] / m) * (a[k] @ table[sub(s, unit(a.n, k))])
        table[s] = acc
    return table


def _check_chain(kind: str, a: OperatorTuple, b: OperatorTuple | None, c: OperatorTuple | None):
    if a.rows != a.cols:
        raise ShapeError(f"inner tuple must be square, got {a.rows}x{a.cols}")
    if kind in ("right", "both"):
        if b is None:
            raise ArityError(f"kind {kind!r} needs the right border tuple")
        if b.n != a.n:
            raise ArityError(f"border tuple has {b.n} members, inner has {a.n}")
        if b.rows != a.rows:
            raise ShapeError(f"right border rows {b.rows} != inner size {a.rows}")
    if kind in ("left", "both"):
        if c is None:
            raise ArityError(f"kind {kind!r} needs the left border tuple")
        if c.n != a.n:
            raise ArityError(f"border tuple has {c.n} members, inner has {a.n}")
        if c.cols != a.rows:
            raise ShapeError(f"left border cols {c.cols} != inner size {a.rows}")


def bordered_multipower_table(
    kind: str,
    a: OperatorTuple,
    targets: Iterable[tuple[int, ...]],
    *,
    b: OperatorTuple | None = None,
    c: OperatorTuple | None = None,
) -> dict[tuple[int, ...], np.ndarray]:
    """Bordered multipowers over the downward closure of ``targets``.

    ``kind`` selects which factors are pinned: "right" draws the last factor
    from ``b``, "left" the first from ``c``, "both" pins both ends.  Indices
    below the minimum order of the kind (1, 1, and 2 respectively) are
    simply absent from the returned table.
    """
    if kind not in ("right", "left", "both"):
        raise DomainError(f"unknown bordered kind {kind!r}")
    _check_chain(kind, a, b, c)
    n = a.n
    closure = _closure(targets, n)

    if kind == "right":
        return _right_table(a, b, closure)
    if kind == "left":
        table: dict[tuple[int, ...], np.ndarray] = {}
        for s in closure:
            m = order(s)
            if m == 0:
                continue
            if m == 1:
                table[s] = c[s.index(1)]
                continue
            acc = np.zeros((c.rows, a.cols), dtype=complex)
            for k in range(n):
                if s[k] > 0:
                    # last-letter split keeps the pinned first factor intact
                    acc += (s[k] / m) * (table[sub(s, unit(n, k))] @ a[k])
            table[s] = acc
        return table

    right = _right_table(a, b, closure)
    table = {}
    for s in closure:
        m = order(s)
        if m < 2:
            continue
        acc = np.zeros((c.rows, b.cols), dtype=complex)
        for k in range(n):
            if s[k] > 0:
                acc += (s[k] / m) * (c[k] @ right[sub(s, unit(n, k))])
        table[s] = acc
    return table


def _right_table(a, b, closure):
    table = {}
    for s in closure:
        m = order(s)
        if m == 0:
            continue
        if m == 1:
            table[s] = b[s.index(1)]
            continue
        acc = np.zeros((a.rows, b.cols), dtype=complex)
        for k in range(a.n):
            if s[k] > 0:
                acc += (s[k] / m) * (a[k] @ table[sub(s, unit(a.n, k))])
        table[s] = acc
    return table


def sym_multipower(a: OperatorTuple, s: Iterable[int]) -> np.ndarray:
    """Single symmetrized multipower ``a^s``."""
    s = as_index(s, a.n)
    return sym_multipower_table(a, [s])[s]


def bordered_multipower(
    kind: str,
    a: OperatorTuple,
    s: Iterable[int],
    *,
    b: OperatorTuple | None = None,
    c: OperatorTuple | None = None,
) -> np.ndarray:
    """Single bordered multipower of the given kind at index ``s``.

    Raises DomainError when ``|s|`` is below the minimum order of the kind.
    """
    s = as_index(s, a.n)
    minimum = 2 if kind == "both" else 1
    if kind not in ("right", "left", "both"):
        raise DomainError(f"unknown bordered kind {kind!r}")
    if order(s) < minimum:
        raise DomainError(
            f"kind {kind!r} needs |s| >= {minimum}, got |{s}| = {order(s)}"
        )
    return bordered_multipower_table(kind, a, [s], b=b, c=c)[s]
