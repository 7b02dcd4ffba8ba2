"""Pencils, multinomials, and symmetrized multipowers.

The production multipower path runs on the downward recursion; the oracle
here re-derives small cases by brute-force enumeration of typed words, the
defining sum itself.
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndsys import (
    ArityError,
    DomainError,
    OperatorTuple,
    RangeError,
    ShapeError,
    bordered_multipower,
    eval_pencil,
    multinomial,
    sym_multipower,
    sym_multipower_table,
)


def words_of(s):
    """Distinct arrangements of the multiset with s_k letters of type k."""
    letters = [k for k, count in enumerate(s) for _ in range(count)]
    return set(itertools.permutations(letters))


def enum_multipower(a, s, c=None, b=None):
    """Defining sum: optional first factor from c, last from b."""
    dim = a.mats[0].shape[0]
    words = words_of(s)
    rows = c.mats[0].shape[0] if c is not None else dim
    cols = b.mats[0].shape[1] if b is not None else dim
    acc = np.zeros((rows, cols), dtype=complex)
    for w in words:
        factors = [a.mats[k] for k in w]
        if c is not None:
            factors[0] = c.mats[w[0]]
        if b is not None:
            factors[-1] = b.mats[w[-1]]
        term = factors[0]
        for f in factors[1:]:
            term = term @ f
        acc += term
    return acc / len(words)


def random_tuple(rng, n, rows, cols):
    return OperatorTuple(
        tuple(
            rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
            for _ in range(n)
        )
    )


def test_eval_pencil_selects_member():
    rng = np.random.default_rng(0)
    t = random_tuple(rng, 3, 2, 2)
    assert np.allclose(eval_pencil((1, 0, 0), t), t.mats[0])
    assert np.allclose(eval_pencil((0, 0, 0), t), np.zeros((2, 2)))


def test_eval_pencil_on_swap_blocks():
    # G-tuple of the two-variable product example: zG = [[0, z2], [z1, 0]]
    g1 = np.array([[0, 0], [1, 0]], dtype=complex)
    g2 = np.array([[0, 1], [0, 0]], dtype=complex)
    z = (0.3 + 0.2j, -0.5j)
    out = eval_pencil(z, OperatorTuple((g1, g2)))
    assert np.allclose(out, [[0, z[1]], [z[0], 0]])


def test_eval_pencil_arity():
    t = random_tuple(np.random.default_rng(1), 2, 2, 2)
    with pytest.raises(ArityError):
        eval_pencil((1.0,), t)


@pytest.mark.parametrize(
    "s,expected",
    [((0, 0, 0), 1), ((2, 1), 3), ((1, 1, 1), 6), ((3,), 1), ((2, 2), 6)],
)
def test_multinomial_values(s, expected):
    assert multinomial(s) == expected


def test_multinomial_matches_factorials():
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = tuple(int(v) for v in rng.integers(0, 6, size=3))
        want = math.factorial(sum(s)) // math.prod(math.factorial(v) for v in s)
        assert multinomial(s) == want


def test_multinomial_rejects_negative():
    with pytest.raises(DomainError):
        multinomial((1, -1))


def test_multinomial_overflow_is_an_error():
    with pytest.raises(RangeError):
        multinomial((40, 40, 40))


@given(st.lists(st.integers(min_value=0, max_value=5), min_size=2, max_size=4))
def test_multinomial_pascal_recursion(s):
    s = tuple(s)
    if sum(s) == 0:
        return
    total = sum(
        multinomial(tuple(v - (1 if i == k else 0) for i, v in enumerate(s)))
        for k in range(len(s))
        if s[k] > 0
    )
    assert multinomial(s) == total


def test_sym_multipower_zero_is_identity():
    t = random_tuple(np.random.default_rng(3), 2, 3, 3)
    assert np.allclose(sym_multipower(t, (0, 0)), np.eye(3))


def test_sym_multipower_unit_selects_member():
    t = random_tuple(np.random.default_rng(4), 3, 2, 2)
    for k in range(3):
        s = tuple(1 if i == k else 0 for i in range(3))
        assert np.allclose(sym_multipower(t, s), t.mats[k])


def test_sym_multipower_pair_average():
    rng = np.random.default_rng(5)
    t = random_tuple(rng, 2, 3, 3)
    a1, a2 = t.mats
    want = (a1 @ a2 + a2 @ a1) / 2
    assert np.allclose(sym_multipower(t, (1, 1)), want)


@pytest.mark.parametrize("seed", range(6))
def test_sym_multipower_vs_enumeration(seed):
    rng = np.random.default_rng(10 + seed)
    n = 2 + seed % 2
    t = random_tuple(rng, n, 3, 3)
    for s in itertools.product(range(4), repeat=n):
        if not 1 <= sum(s) <= 4:
            continue
        got = sym_multipower(t, s)
        want = enum_multipower(t, s)
        assert np.allclose(got, want, atol=1e-10), s


def test_sym_multipower_commuting_case():
    rng = np.random.default_rng(6)
    base = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    t = OperatorTuple((base, base @ base - base))
    s = (2, 1)
    want = np.linalg.matrix_power(t.mats[0], 2) @ t.mats[1]
    assert np.allclose(sym_multipower(t, s), want)


def test_sym_multipower_permutation_invariance():
    rng = np.random.default_rng(7)
    t = random_tuple(rng, 3, 2, 2)
    s = (2, 0, 1)
    perm = (2, 0, 1)
    permuted = OperatorTuple(tuple(t.mats[p] for p in perm))
    s_permuted = tuple(s[p] for p in perm)
    assert np.allclose(sym_multipower(t, s), sym_multipower(permuted, s_permuted))


def test_generating_identity():
    # (z.A)^n equals the front sum of weighted multipowers
    rng = np.random.default_rng(8)
    t = random_tuple(rng, 2, 3, 3)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    for n in range(1, 6):
        lhs = np.linalg.matrix_power(eval_pencil(z, t), n)
        rhs = np.zeros((3, 3), dtype=complex)
        for s in itertools.product(range(n + 1), repeat=2):
            if sum(s) == n:
                rhs += multinomial(s) * np.prod(z**np.array(s)) * sym_multipower(t, s)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(lhs))


@pytest.mark.parametrize("seed", range(4))
def test_bordered_right_vs_enumeration(seed):
    rng = np.random.default_rng(20 + seed)
    a = random_tuple(rng, 2, 3, 3)
    b = random_tuple(rng, 2, 3, 2)
    for s in itertools.product(range(4), repeat=2):
        if not 1 <= sum(s) <= 4:
            continue
        got = bordered_multipower("right", a, s, b=b)
        want = enum_multipower(a, s, b=b)
        assert np.allclose(got, want, atol=1e-10), s


@pytest.mark.parametrize("seed", range(4))
def test_bordered_left_vs_enumeration(seed):
    rng = np.random.default_rng(30 + seed)
    a = random_tuple(rng, 2, 3, 3)
    c = random_tuple(rng, 2, 2, 3)
    for s in itertools.product(range(4), repeat=2):
        if not 1 <= sum(s) <= 4:
            continue
        got = bordered_multipower("left", a, s, c=c)
        want = enum_multipower(a, s, c=c)
        assert np.allclose(got, want, atol=1e-10), s


@pytest.mark.parametrize("seed", range(4))
def test_bordered_both_vs_enumeration(seed):
    rng = np.random.default_rng(40 + seed)
    a = random_tuple(rng, 2, 3, 3)
    b = random_tuple(rng, 2, 3, 2)
    c = random_tuple(rng, 2, 4, 3)
    for s in itertools.product(range(4), repeat=2):
        if not 2 <= sum(s) <= 4:
            continue
        got = bordered_multipower("both", a, s, b=b, c=c)
        want = enum_multipower(a, s, c=c, b=b)
        assert np.allclose(got, want, atol=1e-10), s


def test_bordered_right_unit_is_border_member():
    rng = np.random.default_rng(9)
    a = random_tuple(rng, 3, 2, 2)
    b = random_tuple(rng, 3, 2, 4)
    for k in range(3):
        s = tuple(1 if i == k else 0 for i in range(3))
        assert np.allclose(bordered_multipower("right", a, s, b=b), b.mats[k])


def test_bordered_pair_mixes_borders():
    rng = np.random.default_rng(11)
    a = random_tuple(rng, 2, 3, 3)
    b = random_tuple(rng, 2, 3, 1)
    c = random_tuple(rng, 2, 1, 3)
    want = (c.mats[0] @ b.mats[1] + c.mats[1] @ b.mats[0]) / 2
    assert np.allclose(bordered_multipower("both", a, (1, 1), b=b, c=c), want)


def test_bordered_identity_with_pencil():
    # (z.A)^{n-1} (z.B) = sum of c_s z^s (A#B)^s over the order-n front
    rng = np.random.default_rng(12)
    a = random_tuple(rng, 2, 3, 3)
    b = random_tuple(rng, 2, 3, 2)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    for n in range(1, 5):
        lhs = np.linalg.matrix_power(eval_pencil(z, a), n - 1) @ eval_pencil(z, b)
        rhs = np.zeros((3, 2), dtype=complex)
        for s in itertools.product(range(n + 1), repeat=2):
            if sum(s) == n:
                rhs += (
                    multinomial(s)
                    * np.prod(z**np.array(s))
                    * bordered_multipower("right", a, s, b=b)
                )
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(lhs))


def test_minimum_order_enforced():
    rng = np.random.default_rng(13)
    a = random_tuple(rng, 2, 2, 2)
    b = random_tuple(rng, 2, 2, 2)
    c = random_tuple(rng, 2, 2, 2)
    with pytest.raises(DomainError):
        bordered_multipower("right", a, (0, 0), b=b)
    with pytest.raises(DomainError):
        bordered_multipower("both", a, (1, 0), b=b, c=c)


def test_shape_chain_checked():
    rng = np.random.default_rng(14)
    a = random_tuple(rng, 2, 3, 3)
    bad_b = random_tuple(rng, 2, 2, 2)  # rows disagree with a's cols
    with pytest.raises(ShapeError):
        bordered_multipower("right", a, (1, 1), b=bad_b)


def test_nonsquare_multipower_rejected():
    t = random_tuple(np.random.default_rng(15), 2, 2, 3)
    with pytest.raises(ShapeError):
        sym_multipower(t, (1, 0))


def test_table_agrees_with_single_entry():
    rng = np.random.default_rng(16)
    t = random_tuple(rng, 2, 3, 3)
    offsets = [(1, 0), (0, 1), (1, 1), (2, 1)]
    table = sym_multipower_table(t, offsets)
    for s in offsets:
        assert np.allclose(table[s], sym_multipower(t, s))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
def test_sym_multipower_scaling(s1, s2):
    # scaling one member scales the multipower by the matching monomial factor
    if s1 + s2 == 0:
        return
    rng = np.random.default_rng(17)
    t = random_tuple(rng, 2, 2, 2)
    scaled = OperatorTuple((2.0 * t.mats[0], t.mats[1]))
    got = sym_multipower(scaled, (s1, s2))
    want = 2.0**s1 * sym_multipower(t, (s1, s2))
    assert np.allclose(got, want)
