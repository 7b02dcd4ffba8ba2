"""Multiparametric linear stationary systems and their trajectories.

A system over Z^n carries four operator tuples acting between a state space
X and input/output value spaces.  States live on lattice points of
nonnegative front order; the recursion steps one unit along each coordinate
direction:

    x(t)   = sum_k ( A_k x(t - e_k) + B_k u(t - e_k) ),     |t| >= 1,
    y(t)   = sum_k ( C_k x(t - e_k) + D_k u(t - e_k) ),     |t| >= 1,

with initial state data prescribed on the zero-order front.  Two trajectory
evaluators are provided: the recursion itself (`simulate`) and the closed
multipower form (`closed_form`); they are independent code paths and must
agree on uncontaminated window points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DomainError, PreconditionError, ShapeError
from .lattice import Box, LatticeSignal, SimulationWindow, add, order, sub, unit
from .pencil import (
    OperatorTuple,
    bordered_multipower_table,
    multinomial,
    sym_multipower_table,
)

__all__ = [
    "MultiLSDS",
    "Violation",
    "SimulationResult",
    "validate",
    "conjugate",
    "simulate",
    "closed_form",
    "front_energy",
    "energy_balance_report",
    "EnergyRow",
    "EnergyReport",
]


@dataclass(frozen=True)
class Violation:
    """One well-formedness defect; ``kind`` is shape, arity, or finiteness."""

    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class MultiLSDS:
    """System aggregate: state, input, and output operator tuples.

    Construction is deliberately lenient about cross-tuple consistency so
    that `validate` can report defects as diagnostics; operations that need
    a well-formed system check first and raise.

    Parameters
    ----------
    a : OperatorTuple
        State-to-state members, square.
    b : OperatorTuple
        Input-to-state members.
    c : OperatorTuple
        State-to-output members.
    d : OperatorTuple
        Input-to-output members.
    """

    a: OperatorTuple
    b: OperatorTuple
    c: OperatorTuple
    d: OperatorTuple

    @property
    def n(self) -> int:
        return self.a.n

    @property
    def dim_x(self) -> int:
        return self.a.rows

    @property
    def dim_in(self) -> int:
        return self.b.cols

    @property
    def dim_out(self) -> int:
        return self.c.rows

    def block(self, k: int) -> np.ndarray:
        """The 2x2 block matrix pairing state and value spaces in direction k."""
        self.require_wellformed()
        top = np.hstack([self.a[k], self.b[k]])
        bot = np.hstack([self.c[k], self.d[k]])
        return np.vstack([top, bot])

    def blocks(self) -> OperatorTuple:
        return OperatorTuple(tuple(self.block(k) for k in range(self.n)))

    def require_wellformed(self):
        problems = validate(self)
        shapeish = [v for v in problems if v.kind in ("shape", "arity")]
        if shapeish:
            raise ShapeError("; ".join(str(v) for v in shapeish))
        if problems:
            raise PreconditionError("; ".join(str(v) for v in problems))


def validate(sys: MultiLSDS) -> list[Violation]:
    """Diagnose shape, arity, and finiteness defects without raising."""
    out: list[Violation] = []
    n = sys.a.n
    for name, t in (("b", sys.b), ("c", sys.c), ("d", sys.d)):
        if t.n != n:
            out.append(
                Violation("arity", f"tuple {name} has {t.n} members, a has {n}")
            )
    if sys.a.rows != sys.a.cols:
        out.append(
            Violation("shape", f"a members must be square, got {sys.a.rows}x{sys.a.cols}")
        )
    if sys.b.rows != sys.a.rows:
        out.append(
            Violation("shape", f"b has {sys.b.rows} rows, state dimension is {sys.a.rows}")
        )
    if sys.c.cols != sys.a.cols:
        out.append(
            Violation("shape", f"c has {sys.c.cols} cols, state dimension is {sys.a.cols}")
        )
    if sys.d.rows != sys.c.rows:
        out.append(
            Violation("shape", f"d has {sys.d.rows} rows, output dimension is {sys.c.rows}")
        )
    if sys.d.cols != sys.b.cols:
        out.append(
            Violation("shape", f"d has {sys.d.cols} cols, input dimension is {sys.b.cols}")
        )
    for name, t in (("a", sys.a), ("b", sys.b), ("c", sys.c), ("d", sys.d)):
        for k, m in enumerate(t):
            if not np.all(np.isfinite(m)):
                out.append(
                    Violation("finiteness", f"{name}[{k}] has non-finite entries")
                )
    return out


def conjugate(sys: MultiLSDS) -> MultiLSDS:
    """The adjoint system: value spaces swap roles, members conjugate-transpose.

    An exact involution: conjugating twice restores every entry bitwise.
    """
    return MultiLSDS(
        a=sys.a.adjoint(),
        b=sys.c.adjoint(),
        c=sys.b.adjoint(),
        d=sys.d.adjoint(),
    )


@dataclass(frozen=True)
class SimulationResult:
    """Trajectory on a window plus boundary-contamination masks.

    States cover fronts 0..n_max of the box (front 0 repeats the initial
    data), outputs cover fronts 1..n_max.  A masked point depended, directly
    or through earlier fronts, on a read outside the box that could not be
    proven zero.
    """

    window: SimulationWindow
    states: LatticeSignal
    outputs: LatticeSignal
    contaminated_states: frozenset[tuple[int, ...]]
    contaminated_outputs: frozenset[tuple[int, ...]]
    octant_exact: bool


def _check_signals(sys: MultiLSDS, window: SimulationWindow, input_signal, init):
    sys.require_wellformed()
    if input_signal.n != sys.n or init.n != sys.n:
        raise ShapeError(
            f"signals live on Z^{input_signal.n}/Z^{init.n}, system on Z^{sys.n}"
        )
    if input_signal.dim != sys.dim_in:
        raise ShapeError(
            f"input dimension {input_signal.dim} != system input dimension {sys.dim_in}"
        )
    if init.dim != sys.dim_x:
        raise ShapeError(
            f"initial-data dimension {init.dim} != state dimension {sys.dim_x}"
        )
    if window.n != sys.n:
        raise ShapeError(f"window lives in Z^{window.n}, system in Z^{sys.n}")
    for t in init.support:
        if order(t) != 0:
            raise DomainError(f"initial data off the zero-order front at {t}")
        if not window.box.contains(t):
            raise DomainError(f"initial data outside the window at {t}")


def _octant_exact(input_signal: LatticeSignal, init: LatticeSignal) -> bool:
    # Octant-supported data forces the whole trajectory to vanish at any
    # point with a negative coordinate, so such reads are exact zeros.
    return input_signal.octant_supported() and init.octant_supported()


def simulate(
    sys: MultiLSDS,
    window: SimulationWindow,
    input_signal: LatticeSignal,
    init: LatticeSignal,
) -> SimulationResult:
    """Evaluate the recursion front by front over the window.

    Off-window reads yield zero vectors; the result masks every point whose
    value depended on such a read, except reads at negative coordinates when
    all supplied data is supported in the nonnegative octant (those are
    exact zeros).
    """
    _check_signals(sys, window, input_signal, init)
    box = window.box
    octant = _octant_exact(input_signal, init)
    n, dim_x = sys.n, sys.dim_x

    states: dict[tuple[int, ...], np.ndarray] = {}
    outputs: dict[tuple[int, ...], np.ndarray] = {}
    dirty_states: set[tuple[int, ...]] = set()
    dirty_outputs: set[tuple[int, ...]] = set()

    for t in box.front(0):
        states[t] = init.value(t)

    def read_state(p):
        if box.contains(p):
            return states[p], p in dirty_states
        if octant and min(p) < 0:
            return np.zeros(dim_x, dtype=complex), False
        return np.zeros(dim_x, dtype=complex), True

    def read_input(p):
        if box.contains(p):
            return input_signal.value(p), False
        if octant and min(p) < 0:
            return np.zeros(sys.dim_in, dtype=complex), False
        return np.zeros(sys.dim_in, dtype=complex), True

    for front in range(1, window.n_max + 1):
        for t in box.front(front):
            x_acc = np.zeros(dim_x, dtype=complex)
            y_acc = np.zeros(sys.dim_out, dtype=complex)
            dirty = False
            for k in range(n):
                p = sub(t, unit(n, k))
                xv, dx = read_state(p)
                uv, du = read_input(p)
                dirty = dirty or dx or du
                x_acc += sys.a[k] @ xv + sys.b[k] @ uv
                y_acc += sys.c[k] @ xv + sys.d[k] @ uv
            states[t] = x_acc
            outputs[t] = y_acc
            if dirty:
                dirty_states.add(t)
                dirty_outputs.add(t)

    return SimulationResult(
        window=window,
        states=LatticeSignal(n, dim_x, states),
        outputs=LatticeSignal(n, sys.dim_out, outputs),
        contaminated_states=frozenset(dirty_states),
        contaminated_outputs=frozenset(dirty_outputs),
        octant_exact=octant,
    )


def closed_form(
    sys: MultiLSDS,
    window: SimulationWindow,
    input_signal: LatticeSignal,
    init: LatticeSignal,
) -> SimulationResult:
    """Evaluate the trajectory from the multipower sum instead of stepping.

    Each window point is assembled directly from initial data and inputs in
    its dependency cone, weighted by multinomially normalized multipowers.
    Contamination masks agree with `simulate` exactly: both reduce to
    whether the cone leaves the trusted region.
    """
    _check_signals(sys, window, input_signal, init)
    box = window.box
    octant = _octant_exact(input_signal, init)
    n, n_max = sys.n, window.n_max

    offsets = [
        d
        for d in itertools.product(range(n_max + 1), repeat=n)
        if 0 < sum(d) <= n_max
    ]
    pow_a = sym_multipower_table(sys.a, offsets)
    pow_ab = bordered_multipower_table("right", sys.a, offsets, b=sys.b)
    pow_ca = bordered_multipower_table("left", sys.a, offsets, c=sys.c)
    pow_cab = bordered_multipower_table("both", sys.a, offsets, b=sys.b, c=sys.c)

    states: dict[tuple[int, ...], np.ndarray] = {}
    outputs: dict[tuple[int, ...], np.ndarray] = {}
    dirty_states: set[tuple[int, ...]] = set()
    dirty_outputs: set[tuple[int, ...]] = set()

    for t in box.front(0):
        states[t] = init.value(t)

    def read_init(p):
        if box.contains(p):
            return init.value(p), False
        if octant and min(p) < 0:
            return np.zeros(sys.dim_x, dtype=complex), False
        return np.zeros(sys.dim_x, dtype=complex), True

    def read_input(p):
        if box.contains(p):
            return input_signal.value(p), False
        if octant and min(p) < 0:
            return np.zeros(sys.dim_in, dtype=complex), False
        return np.zeros(sys.dim_in, dtype=complex), True

    for front in range(1, n_max + 1):
        for t in box.front(front):
            x_acc = np.zeros(sys.dim_x, dtype=complex)
            y_acc = np.zeros(sys.dim_out, dtype=complex)
            dirty = False
            for d in offsets:
                nd = sum(d)
                if nd > front:
                    continue
                p = sub(t, d)
                weight = float(multinomial(d))
                if nd == front:
                    x0, dirty_read = read_init(p)
                    dirty = dirty or dirty_read
                    x_acc += weight * (pow_a[d] @ x0)
                    y_acc += weight * (pow_ca[d] @ x0)
                uv, dirty_read = read_input(p)
                dirty = dirty or dirty_read
                x_acc += weight * (pow_ab[d] @ uv)
                if nd == 1:
                    y_acc += sys.d[d.index(1)] @ uv
                elif nd >= 2:
                    y_acc += weight * (pow_cab[d] @ uv)
            states[t] = x_acc
            outputs[t] = y_acc
            if dirty:
                dirty_states.add(t)
                dirty_outputs.add(t)

    return SimulationResult(
        window=window,
        states=LatticeSignal(n, sys.dim_x, states),
        outputs=LatticeSignal(n, sys.dim_out, outputs),
        contaminated_states=frozenset(dirty_states),
        contaminated_outputs=frozenset(dirty_outputs),
        octant_exact=octant,
    )


def front_energy(signal: LatticeSignal, n: int) -> float:
    """Squared l2 mass of the signal on the order-n front."""
    return float(
        sum(np.vdot(v, v).real for t, v in signal.entries.items() if order(t) == n)
    )


@dataclass(frozen=True)
class EnergyRow:
    """One front of the energy ledger.

    lhs is incoming minus outgoing value-space energy across the front
    step, rhs is the change in stored state energy; a dissipative system
    keeps lhs >= rhs on clean fronts, a conservative one balances them.
    """

    n: int
    e_minus: float
    e_plus: float
    e_x: float
    e_x_prev: float
    contaminated: bool

    @property
    def lhs(self) -> float:
        return self.e_minus - self.e_plus

    @property
    def rhs(self) -> float:
        return self.e_x - self.e_x_prev


@dataclass(frozen=True)
class EnergyReport:
    rows: tuple[EnergyRow, ...]
    tol: float

    @property
    def clean_rows(self) -> tuple[EnergyRow, ...]:
        return tuple(r for r in self.rows if not r.contaminated)

    @property
    def dissipative_consistent(self) -> bool:
        """No clean front loses less than it stores (lhs >= rhs - tol)."""
        return all(r.lhs - r.rhs >= -self.tol for r in self.clean_rows)

    @property
    def conservative_consistent(self) -> bool:
        """Every clean front balances exactly up to tol."""
        return all(abs(r.lhs - r.rhs) <= self.tol for r in self.clean_rows)


def energy_balance_report(
    sys: MultiLSDS,
    window: SimulationWindow,
    input_signal: LatticeSignal,
    init: LatticeSignal,
    tol: float = 1e-9,
    result: SimulationResult | None = None,
) -> EnergyReport:
    """Simulate (or reuse ``result``) and tabulate per-front energies.

    A row is marked contaminated when any window point feeding its four
    energies is masked, or when the input carries mass on its front outside
    the window.
    """
    if result is None:
        result = simulate(sys, window, input_signal, init)
    box = window.box
    units = [unit(sys.n, k) for k in range(sys.n)]

    def leaks(t) -> bool:
        # mass here feeds window-external points on the next front
        return any(not box.contains(add(t, e)) for e in units)

    rows = []
    for front in range(1, window.n_max + 1):
        feed = [
            t for t in input_signal.support if order(t) == front - 1
        ]
        escaped = any(
            not box.contains(t) and np.any(input_signal.entries[t] != 0)
            for t in feed
        )
        e_minus = float(
            sum(
                np.vdot(input_signal.entries[t], input_signal.entries[t]).real
                for t in feed
                if box.contains(t)
            )
        )
        lost = any(
            np.any(v != 0) and leaks(t)
            for t, v in result.states.entries.items()
            if order(t) == front - 1
        ) or any(
            box.contains(t) and np.any(input_signal.entries[t] != 0) and leaks(t)
            for t in feed
        )
        contaminated = (
            escaped
            or lost
            or any(order(t) in (front - 1, front) for t in result.contaminated_states)
            or any(order(t) == front for t in result.contaminated_outputs)
        )
        rows.append(
            EnergyRow(
                n=front,
                e_minus=e_minus,
                e_plus=front_energy(result.outputs, front),
                e_x=front_energy(result.states, front),
                e_x_prev=front_energy(result.states, front - 1),
                contaminated=contaminated,
            )
        )
    return EnergyReport(rows=tuple(rows), tol=tol)
