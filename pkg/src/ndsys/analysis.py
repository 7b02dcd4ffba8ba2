"""Dissipativity, conservativity, and structure analysis of the block pencil.

The objects of study are the direction blocks ``G_k`` pairing state and
value spaces and the pencil ``G(z) = sum_k z_k G_k`` restricted to the unit
torus.  A system is dissipative when every torus value of the pencil is a
contraction and conservative when every torus value is unitary; the latter
is equivalent to four families of algebraic identities on the blocks, which
is what `conservativity_check` measures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .numerics import halton_torus, orth_basis, spectral_norm
from .pencil import OperatorTuple, eval_pencil
from .system import MultiLSDS

__all__ = [
    "TorusScanReport",
    "dissipativity_scan",
    "ConservativityCertificate",
    "conservativity_check",
    "BlockStructure",
    "block_structure",
    "closely_connected_subspace",
    "reduce_closely_connected",
    "CnuReport",
    "completely_nonunitary_check",
]

_GRID_CAP = 100_000
_AXIS_DEFAULT = 32


@dataclass(frozen=True)
class TorusScanReport:
    """Outcome of a torus scan of the pencil norm.

    This is a semi-decision: ``dissipative`` False comes with a certifying
    witness (a torus point where the norm exceeds 1 + tol), while True only
    says the sampled and refined points stayed contractive.
    """

    max_norm: float
    witness: tuple[complex, ...]
    samples: int
    refined: bool
    tol: float

    @property
    def dissipative(self) -> bool:
        return self.max_norm <= 1.0 + self.tol

    @property
    def margin(self) -> float:
        """Observed distance to the contractivity boundary (can be negative)."""
        return 1.0 - self.max_norm


def _torus_grid(n: int, samples: int | None) -> tuple[list[tuple[complex, ...]], int]:
    if samples is None:
        samples = min(_AXIS_DEFAULT**n, _GRID_CAP)
    if samples < 1:
        raise DomainError(f"sample budget must be >= 1, got {samples}")
    per_axis = round(samples ** (1.0 / n))
    if per_axis >= 1 and per_axis**n == samples:
        phases = [
            tuple(np.exp(2j * np.pi * j / per_axis) for j in idx)
            for idx in itertools.product(range(per_axis), repeat=n)
        ]
        return phases, samples
    return halton_torus(samples, n), samples


def _top_pair(m: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    u, s, vh = np.linalg.svd(m)
    return float(s[0]), u[:, 0], vh[0].conj()


def dissipativity_scan(
    sys: MultiLSDS,
    samples: int | None = None,
    refine: bool = True,
    tol: float = 1e-9,
) -> TorusScanReport:
    """Scan the torus for the largest pencil norm.

    Parameters
    ----------
    samples : int, optional
        Total budget; a perfect n-th power yields the full tensor grid,
        anything else a deterministic low-discrepancy set.  Defaults to
        32^n capped at 1e5.
    refine : bool
        Polish the best grid point with 50 gradient-ascent steps on the
        top singular value, stepping in torus phases.

    The grid maximum is taken with strict comparison in enumeration order,
    so ties resolve to the lexicographically smallest grid index.
    """
    blocks = sys.blocks()
    phases, count = _torus_grid(sys.n, samples)

    best = -1.0
    witness = phases[0]
    for z in phases:
        sigma = spectral_norm(eval_pencil(z, blocks))
        if sigma > best:
            best = sigma
            witness = z

    if refine:
        best, witness = _refine(blocks, witness, best)

    return TorusScanReport(
        max_norm=best, witness=witness, samples=count, refined=refine, tol=tol
    )


def _refine(blocks: OperatorTuple, z0, sigma0, steps: int = 50):
    # ascend sigma_max over torus phases; the gradient comes from the top
    # singular pair, d sigma = Re(u^H (i z_k G_k) v) d phi_k
    phi = np.array([np.angle(z) for z in z0], dtype=float)
    best_phi = phi.copy()
    best = sigma0
    eta = 0.1
    for _ in range(steps):
        z = np.exp(1j * phi)
        sigma, u, v = _top_pair(eval_pencil(z, blocks))
        if sigma > best:
            best = sigma
            best_phi = phi.copy()
        grad = np.array(
            [(u.conj() @ (1j * z[k] * blocks[k] @ v)).real for k in range(blocks.n)]
        )
        step = eta * grad
        trial = best_phi + step
        z_trial = np.exp(1j * trial)
        sigma_trial = spectral_norm(eval_pencil(z_trial, blocks))
        if sigma_trial > best:
            phi = trial
            eta *= 1.5
        else:
            phi = best_phi
            eta *= 0.5
    z_best = np.exp(1j * best_phi)
    return best, tuple(complex(v) for v in z_best)


@dataclass(frozen=True)
class ConservativityCertificate:
    """Residuals of the four block identities characterizing unitarity of
    the pencil on the whole torus.

    iso / iso_cross cover the adjoint-times-block family (pencil isometric),
    coiso / coiso_cross the block-times-adjoint family (pencil coisometric).
    Cross entries are maxima over distinct direction pairs and vanish
    vacuously for n = 1.
    """

    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.residuals.values()) <= self.tol

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def conservativity_check(sys: MultiLSDS, tol: float = 1e-9) -> ConservativityCertificate:
    """Measure how far the block family is from conservative."""
    blocks = sys.blocks()
    rows, cols = blocks.rows, blocks.cols
    gram = sum(g.conj().T @ g for g in blocks) - np.eye(cols)
    cogram = sum(g @ g.conj().T for g in blocks) - np.eye(rows)
    cross = 0.0
    cocross = 0.0
    for k in range(blocks.n):
        for j in range(blocks.n):
            if k == j:
                continue
            cross = max(cross, spectral_norm(blocks[k].conj().T @ blocks[j]))
            cocross = max(cocross, spectral_norm(blocks[k] @ blocks[j].conj().T))
    residuals = {
        "iso": spectral_norm(gram),
        "iso_cross": cross,
        "coiso": spectral_norm(cogram),
        "coiso_cross": cocross,
    }
    return ConservativityCertificate(residuals=residuals, tol=tol)


@dataclass(frozen=True)
class BlockStructure:
    """Direction-wise splitting of the value-plus-state spaces.

    For a conservative family each block is a partial isometry; its initial
    and final subspaces (columns of ``bases_in[k]`` / ``bases_out[k]``)
    split the two sides orthogonally, and the summed pencil becomes block
    diagonal with unitary diagonal blocks ``diag_blocks[k]``.
    """

    bases_in: tuple[np.ndarray, ...]
    bases_out: tuple[np.ndarray, ...]
    diag_blocks: tuple[np.ndarray, ...]
    dims: tuple[int, ...]
    orthogonality_residual: float
    completeness_defect: int
    coupling_residual: float
    unitarity_residual: float


def block_structure(sys: MultiLSDS, tol: float = 1e-9) -> BlockStructure:
    """Split the spaces along the partial-isometry ranges of the blocks.

    Requires a system passing `conservativity_check` at ``tol``; raises
    PreconditionError otherwise.
    """
    cert = conservativity_check(sys, tol)
    if not cert.passed:
        raise PreconditionError(
            f"block structure needs a conservative system; residual "
            f"{cert.max_residual:.3e} exceeds {tol:g}"
        )
    blocks = sys.blocks()
    n = blocks.n
    # Conservativity forces singular values of each block into {0, 1}, so
    # the rank cut sits at 0.5 with no ambiguity.
    bases_in = tuple(orth_basis(g.conj().T, rank_tol=0.5) for g in blocks)
    bases_out = tuple(orth_basis(g, rank_tol=0.5) for g in blocks)
    dims = tuple(q.shape[1] for q in bases_in)

    ortho = 0.0
    for k in range(n):
        for j in range(k + 1, n):
            ortho = max(ortho, spectral_norm(bases_in[k].conj().T @ bases_in[j]))
            ortho = max(ortho, spectral_norm(bases_out[k].conj().T @ bases_out[j]))

    defect = blocks.cols - sum(dims)

    coupling = 0.0
    diag = []
    for k in range(n):
        for i in range(n):
            for j in range(n):
                piece = bases_out[i].conj().T @ blocks[k] @ bases_in[j]
                if i == k and j == k:
                    continue
                coupling = max(coupling, spectral_norm(piece))
        diag.append(bases_out[k].conj().T @ blocks[k] @ bases_in[k])

    unit = 0.0
    for block in diag:
        if block.size:
            unit = max(
                unit,
                spectral_norm(block.conj().T @ block - np.eye(block.shape[1])),
            )
    return BlockStructure(
        bases_in=bases_in,
        bases_out=tuple(bases_out),
        diag_blocks=tuple(diag),
        dims=dims,
        orthogonality_residual=ortho,
        completeness_defect=defect,
        coupling_residual=coupling,
        unitarity_residual=unit,
    )


def closely_connected_subspace(sys: MultiLSDS, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the smallest subspace containing the ranges of
    all input maps and adjoint output maps that is invariant under every
    state map and its adjoint.

    Saturation sweeps apply the state members and then their adjoints in
    fixed direction order, so the basis is deterministic.
    """
    sys.require_wellformed()
    seed = np.hstack(
        [sys.b[k] for k in range(sys.n)]
        + [sys.c[k].conj().T for k in range(sys.n)]
    )
    q = orth_basis(seed, rank_tol)
    for _ in range(sys.dim_x + 1):
        if q.shape[1] in (0, sys.dim_x):
            break
        grown = [q]
        for k in range(sys.n):
            grown.append(sys.a[k] @ q)
        for k in range(sys.n):
            grown.append(sys.a[k].conj().T @ q)
        q_next = orth_basis(np.hstack(grown), rank_tol)
        if q_next.shape[1] == q.shape[1]:
            break
        q = q_next
    return q


def reduce_closely_connected(
    sys: MultiLSDS, rank_tol: float = 1e-10
) -> tuple[MultiLSDS, np.ndarray]:
    """Compress the system onto its closely connected subspace.

    Returns the compressed system and the basis used; the transfer function
    is preserved because the discarded complement is invariant and
    unreachable from inputs and unobservable to outputs.
    """
    q = closely_connected_subspace(sys, rank_tol)
    qh = q.conj().T
    reduced = MultiLSDS(
        a=OperatorTuple(tuple(qh @ sys.a[k] @ q for k in range(sys.n))),
        b=OperatorTuple(tuple(qh @ sys.b[k] for k in range(sys.n))),
        c=OperatorTuple(tuple(sys.c[k] @ q for k in range(sys.n))),
        d=sys.d,
    )
    return reduced, q


@dataclass(frozen=True)
class CnuReport:
    dim_x: int
    connected_dim: int

    @property
    def completely_nonunitary(self) -> bool:
        return self.connected_dim == self.dim_x


def completely_nonunitary_check(
    sys: MultiLSDS, tol: float = 1e-9, rank_tol: float = 1e-10
) -> CnuReport:
    """For a conservative system, close connectedness of the whole state
    space is equivalent to the state pencil having no unitary direct
    summand; this reports the two dimensions whose equality decides it.

    Raises PreconditionError when the system is not conservative at ``tol``
    (the equivalence does not hold without it).
    """
    cert = conservativity_check(sys, tol)
    if not cert.passed:
        raise PreconditionError(
            f"complete-nonunitarity test needs a conservative system; "
            f"residual {cert.max_residual:.3e} exceeds {tol:g}"
        )
    q = closely_connected_subspace(sys, rank_tol)
    return CnuReport(dim_x=sys.dim_x, connected_dim=q.shape[1])
