"""Random structured objects shared by the test modules.

Everything takes an explicit numpy Generator so individual tests stay
reproducible.
"""

import numpy as np

from ndsys import (
    AglerData,
    CommutingTuple,
    LatticeSignal,
    MatrixPolynomial,
    MultiLSDS,
    OperatorTuple,
)
from ndsys.numerics import halton_disc


def haar_unitary(rng, n):
    """Haar-distributed unitary via QR with the phase fix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def composition(rng, total, parts):
    """Split ``total`` into ``parts`` nonnegative summands, uniformly."""
    cuts = np.sort(rng.integers(0, total + 1, size=parts - 1))
    edges = np.concatenate([[0], cuts, [total]])
    return np.diff(edges)


def conservative_system(rng, n, dim_x, dim_io):
    """A random system whose member blocks are partial isometries with
    orthogonal initial and final subspaces filling the whole space.

    Each member is G_k = W P_k V* where P_k projects onto the k-th block
    of a random composition and V, W are Haar unitaries; the four
    orthogonality identities then hold exactly up to rounding.
    """
    m = dim_x + dim_io
    sizes = composition(rng, m, n)
    v = haar_unitary(rng, m)
    w = haar_unitary(rng, m)
    a, b, c, d = [], [], [], []
    start = 0
    for k in range(n):
        sel = np.zeros((m, m), dtype=complex)
        stop = start + sizes[k]
        sel[start:stop, start:stop] = np.eye(sizes[k])
        start = stop
        g = w @ sel @ v.conj().T
        a.append(g[:dim_x, :dim_x])
        b.append(g[:dim_x, dim_x:])
        c.append(g[dim_x:, :dim_x])
        d.append(g[dim_x:, dim_x:])
    return MultiLSDS(
        a=OperatorTuple(tuple(a)),
        b=OperatorTuple(tuple(b)),
        c=OperatorTuple(tuple(c)),
        d=OperatorTuple(tuple(d)),
    )


def dissipative_system(rng, n, dim_x, dim_io, mixtures=3):
    """Convex combination of conservative members: dissipative, and
    strictly so with probability one."""
    weights = rng.dirichlet(np.ones(mixtures))
    parts = [conservative_system(rng, n, dim_x, dim_io) for _ in range(mixtures)]
    blocks = {name: [] for name in "abcd"}
    for k in range(n):
        for name in "abcd":
            acc = sum(
                wt * getattr(p, name)[k] for wt, p in zip(weights, parts)
            )
            blocks[name].append(acc)
    return MultiLSDS(
        a=OperatorTuple(tuple(blocks["a"])),
        b=OperatorTuple(tuple(blocks["b"])),
        c=OperatorTuple(tuple(blocks["c"])),
        d=OperatorTuple(tuple(blocks["d"])),
    )


def random_system(rng, n, dim_x, dim_in, dim_out, scale=0.5):
    """Unstructured system with independent Gaussian entries."""

    def draw(rows, cols):
        return scale * (
            rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        )

    return MultiLSDS(
        a=OperatorTuple(tuple(draw(dim_x, dim_x) for _ in range(n))),
        b=OperatorTuple(tuple(draw(dim_x, dim_in) for _ in range(n))),
        c=OperatorTuple(tuple(draw(dim_out, dim_x) for _ in range(n))),
        d=OperatorTuple(tuple(draw(dim_out, dim_in) for _ in range(n))),
    )


def contraction_tuple(rng, n, dim, norm_cap=0.8):
    """Commuting strict contractions: polynomials of one random matrix."""
    t = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    t *= norm_cap / np.linalg.norm(t, 2)
    members = []
    for _ in range(n):
        coeffs = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        m = coeffs[0] * np.eye(dim) + coeffs[1] * t + coeffs[2] * t @ t
        nrm = np.linalg.norm(m, 2)
        if nrm > norm_cap:
            m *= norm_cap / nrm
        members.append(m)
    return CommutingTuple(tuple(members))


def random_signal(rng, n, dim, points):
    entries = {
        tuple(t): rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        for t in points
    }
    return LatticeSignal(n, dim, entries)


def inner_fixture(rng, n, q, max_degree=2, grid_points=60):
    """Inner rational-free fixture: theta = U1 diag(z^t_i) U2.

    Unitary on the torus by construction, so it admits a conservative
    realization with matching value-space dimensions.  The factor
    polynomials come from telescoping each diagonal monomial along a
    fixed spelling of its exponent: 1 - conj(l)^t z^t splits into one
    rank-one term per letter, each landing in the factor of that letter.
    """
    u1 = haar_unitary(rng, q)
    u2 = haar_unitary(rng, q)
    exponents = []
    for _ in range(q):
        while True:
            t = tuple(int(v) for v in rng.integers(0, max_degree + 1, size=n))
            if sum(t) >= 1:
                break
        exponents.append(t)

    theta_coeffs = {}
    for i, t in enumerate(exponents):
        term = np.outer(u1[:, i], u2[i, :])
        theta_coeffs[t] = theta_coeffs.get(t, np.zeros((q, q), dtype=complex)) + term
    theta = MatrixPolynomial(n, (q, q), theta_coeffs)

    factor_rows = {k: [] for k in range(n)}
    for i, t in enumerate(exponents):
        word = [k for k in range(n) for _ in range(t[k])]
        prefix = tuple(0 for _ in range(n))
        for letter in word:
            factor_rows[letter].append((prefix, u2[i, :].copy()))
            prefix = tuple(
                p + (1 if k == letter else 0) for k, p in enumerate(prefix)
            )
    factors = []
    for k in range(n):
        rows = factor_rows[k]
        coeffs = {}
        for row_index, (mono, vec) in enumerate(rows):
            block = coeffs.setdefault(
                mono, np.zeros((max(len(rows), 1), q), dtype=complex)
            )
            block[row_index, :] = vec
        if not rows:
            coeffs = {tuple(0 for _ in range(n)): np.zeros((1, q), dtype=complex)}
        factors.append(MatrixPolynomial(n, (max(len(rows), 1), q), coeffs))

    grid = halton_disc(grid_points, n, 0.75)
    return AglerData(theta=theta, factors=tuple(factors), grid=tuple(grid))
