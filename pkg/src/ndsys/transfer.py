"""Transfer functions on the polydisc and their sampled operator calculus.

The transfer function of a system is

    theta(z) = zD + zC (I - zA)^(-1) zB,

where ``zA`` abbreviates the pencil value, so theta vanishes at the origin
by construction.  Maclaurin coefficients come in closed form from bordered
multipowers.  `schur_agler_sample_test` probes the defining property of the
generalized Schur class on tuples of commuting contractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ArityError,
    DivergenceError,
    DomainError,
    PreconditionError,
    ShapeError,
    SingularityError,
)
from .lattice import as_index, order
from .numerics import spectral_norm
from .pencil import bordered_multipower, eval_pencil, multinomial
from .system import MultiLSDS, conjugate

__all__ = [
    "MatrixPolynomial",
    "CommutingTuple",
    "transfer_eval",
    "transfer_eval_series",
    "maclaurin_coeff",
    "maclaurin_poly",
    "conjugate_transfer_check",
    "schur_agler_sample_test",
    "SchurSampleReport",
    "schwarz_split",
]

_SINGULAR_REL = 1e-13


def _freeze_matrix(m, shape) -> np.ndarray:
    out = np.array(m, dtype=complex)
    if out.shape != shape:
        raise ShapeError(f"coefficient has shape {out.shape}, expected {shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MatrixPolynomial:
    """Matrix-valued polynomial in n commuting variables, stored sparsely
    by exponent multi-index."""

    n: int
    shape: tuple[int, int]
    coeffs: Mapping[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"variable count must be >= 1, got {self.n}")
        shape = (int(self.shape[0]), int(self.shape[1]))
        clean = {}
        for t, m in self.coeffs.items():
            key = as_index(t, self.n)
            if any(v < 0 for v in key):
                raise DomainError(f"negative exponent {key}")
            clean[key] = _freeze_matrix(m, shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "coeffs", clean)

    def evaluate(self, z: Sequence[complex]) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.n,):
            raise ArityError(f"point has shape {z.shape}, polynomial has {self.n} variables")
        acc = np.zeros(self.shape, dtype=complex)
        for t, m in self.coeffs.items():
            acc += m * np.prod(z**np.array(t))
        return acc

    def degrees(self) -> tuple[int, ...]:
        """Largest exponent appearing per variable."""
        if not self.coeffs:
            return (0,) * self.n
        return tuple(max(t[k] for t in self.coeffs) for k in range(self.n))

    def term_items(self):
        return sorted(self.coeffs.items(), key=lambda kv: (order(kv[0]), kv[0]))


@dataclass(frozen=True)
class CommutingTuple:
    """A tuple of pairwise commuting square contractions.

    Commutation is checked to 1e-10 and norms to 1 + 1e-12 at construction;
    violations raise PreconditionError because downstream sampling results
    would be meaningless.
    """

    mats: tuple[np.ndarray, ...]
    comm_tol: float = 1e-10
    norm_tol: float = 1e-12

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=complex) for m in self.mats)
        if not mats:
            raise ArityError("a commuting tuple needs at least one member")
        size = mats[0].shape
        if size[0] != size[1]:
            raise ShapeError(f"members must be square, got {size}")
        for m in mats:
            if m.shape != size:
                raise ShapeError("members must share one shape")
            if spectral_norm(m) > 1.0 + self.norm_tol:
                raise PreconditionError(
                    f"member norm {spectral_norm(m):.6f} exceeds 1 + {self.norm_tol:g}"
                )
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                gap = spectral_norm(mats[i] @ mats[j] - mats[j] @ mats[i])
                if gap > self.comm_tol:
                    raise PreconditionError(
                        f"members {i} and {j} fail to commute: residual {gap:.3e}"
                    )
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "mats", mats)

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def size(self) -> int:
        return self.mats[0].shape[0]

    def power(self, t: tuple[int, ...]) -> np.ndarray:
        """Ordinary commuting multipower ``T_1^{t_1} ... T_n^{t_n}``."""
        t = as_index(t, self.n)
        acc = np.eye(self.size, dtype=complex)
        for k, e in enumerate(t):
            if e:
                acc = acc @ np.linalg.matrix_power(self.mats[k], e)
        return acc


def _resolvent_factor(sys: MultiLSDS, z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=complex)
    if z.shape != (sys.n,):
        raise ArityError(f"point has shape {z.shape}, system has {sys.n} directions")
    za = eval_pencil(z, sys.a)
    m = np.eye(sys.dim_x, dtype=complex) - za
    if sys.dim_x:
        s = np.linalg.svd(m, compute_uv=False)
        if s[-1] <= _SINGULAR_REL * max(1.0, s[0]):
            raise SingularityError(
                f"resolvent factor singular at z={tuple(z)}", sigma_min=float(s[-1])
            )
    return m, z


def transfer_eval(sys: MultiLSDS, z: Sequence[complex]) -> np.ndarray:
    """Transfer function value via a direct solve.

    Raises SingularityError (carrying the smallest singular value) when the
    resolvent factor I - zA is numerically singular at ``z``.
    """
    sys.require_wellformed()
    m, z = _resolvent_factor(sys, z)
    zb = eval_pencil(z, sys.b)
    zc = eval_pencil(z, sys.c)
    zd = eval_pencil(z, sys.d)
    if sys.dim_x == 0:
        return zd
    return zd + zc @ np.linalg.solve(m, zb)


def transfer_eval_series(sys: MultiLSDS, z: Sequence[complex], terms: int) -> np.ndarray:
    """Partial Neumann sum zD + sum_{i<=terms} zC (zA)^i zB.

    Requires the pencil value zA to be a strict contraction so the full
    series converges geometrically; otherwise DivergenceError.
    """
    sys.require_wellformed()
    if terms < 0:
        raise DomainError(f"terms must be >= 0, got {terms}")
    z = np.asarray(z, dtype=complex)
    if z.shape != (sys.n,):
        raise ArityError(f"point has shape {z.shape}, system has {sys.n} directions")
    za = eval_pencil(z, sys.a)
    norm_za = spectral_norm(za)
    if norm_za >= 1.0:
        raise DivergenceError(
            f"series needs ||zA|| < 1, got {norm_za:.6f} at z={tuple(z)}"
        )
    zb = eval_pencil(z, sys.b)
    zc = eval_pencil(z, sys.c)
    acc = eval_pencil(z, sys.d)
    cur = zb
    for _ in range(terms + 1):
        acc = acc + zc @ cur
        cur = za @ cur
    return acc


def maclaurin_coeff(sys: MultiLSDS, t: Iterable[int]) -> np.ndarray:
    """Maclaurin coefficient of the transfer function at exponent ``t``.

    Unit exponents give the corresponding D member; higher orders come from
    the doubly bordered multipower scaled by the multinomial weight.  The
    zero exponent is outside the domain (the transfer function vanishes at
    the origin identically) and raises DomainError.
    """
    sys.require_wellformed()
    t = as_index(t, sys.n)
    n_t = order(t)
    if any(v < 0 for v in t):
        raise DomainError(f"exponent must be nonnegative, got {t}")
    if n_t == 0:
        raise DomainError("the zero exponent has no coefficient; theta(0) = 0 identically")
    if n_t == 1:
        return sys.d[t.index(1)]
    weight = float(multinomial(t))
    return weight * bordered_multipower("both", sys.a, t, b=sys.b, c=sys.c)


def maclaurin_poly(sys: MultiLSDS, max_order: int) -> MatrixPolynomial:
    """All Maclaurin coefficients with 1 <= |t| <= max_order as one polynomial."""
    if max_order < 1:
        raise DomainError(f"max_order must be >= 1, got {max_order}")
    coeffs = {}
    for t in itertools.product(range(max_order + 1), repeat=sys.n):
        if 1 <= sum(t) <= max_order:
            coeffs[t] = maclaurin_coeff(sys, t)
    return MatrixPolynomial(
        n=sys.n, shape=(sys.dim_out, sys.dim_in), coeffs=coeffs
    )


def conjugate_transfer_check(
    sys: MultiLSDS, points: Sequence[Sequence[complex]]
) -> float:
    """Largest deviation of the adjoint-system transfer from the reflected
    adjoint value over the given points."""
    adj = conjugate(sys)
    worst = 0.0
    for z in points:
        z = np.asarray(z, dtype=complex)
        lhs = transfer_eval(adj, z)
        rhs = transfer_eval(sys, np.conj(z)).conj().T
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


@dataclass(frozen=True)
class SchurSampleReport:
    max_norm: float
    tuple_count: int
    radius: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_norm <= 1.0 + self.tol


def schur_agler_sample_test(
    theta: MatrixPolynomial,
    tuples: Sequence[CommutingTuple],
    r: float,
    tol: float = 1e-9,
) -> SchurSampleReport:
    """Sample the Schur-class contractivity property on commuting tuples.

    Each coefficient acts through a Kronecker product on the left factor,
    the tuple multipower (scaled by r^|t|) on the right.  Pass means the
    largest operator norm over the supplied tuples stayed within 1 + tol;
    this certifies nothing beyond the sample.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    if not tuples:
        raise DomainError("need at least one commuting tuple")
    worst = 0.0
    for ct in tuples:
        if ct.n != theta.n:
            raise ArityError(
                f"tuple has {ct.n} members, polynomial has {theta.n} variables"
            )
        acc = np.zeros(
            (theta.shape[0] * ct.size, theta.shape[1] * ct.size), dtype=complex
        )
        for t, m in theta.coeffs.items():
            acc += np.kron(m, (r ** order(t)) * ct.power(t))
        worst = max(worst, spectral_norm(acc))
    return SchurSampleReport(
        max_norm=worst, tuple_count=len(tuples), radius=r, tol=tol
    )


def schwarz_split(theta: MatrixPolynomial, tol: float = 0.0) -> MatrixPolynomial:
    """Divide a one-variable polynomial vanishing at the origin by z.

    The inverse of multiplying through by the variable; a nonzero constant
    term (beyond ``tol``) means the polynomial is outside the domain of the
    bijection and raises DomainError.
    """
    if theta.n != 1:
        raise DomainError(f"defined for one variable only, got {theta.n}")
    zero = (0,)
    const = theta.coeffs.get(zero)
    if const is not None and float(np.max(np.abs(const))) > tol:
        raise DomainError("constant term present; the polynomial does not vanish at 0")
    shifted = {
        (t[0] - 1,): m for t, m in theta.coeffs.items() if t != zero
    }
    return MatrixPolynomial(n=1, shape=theta.shape, coeffs=shifted)
