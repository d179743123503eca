"""Kernel closed forms vs brute force, case analysis, the decomposition identity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qprog.field import get_field
from qprog.characters import additive_char, gauss_sum, quadratic_char
from qprog.kernels import (
    KernelCase,
    admissible_codes,
    classify_pair,
    classify_quad,
    decomposition_check,
    half_shift,
    pair_kernel_brute,
    pair_kernel_check,
    pair_kernel_closed,
    pair_kernel_coeffs,
    quad_kernel,
    quad_kernel_brute,
    quad_kernel_check,
    quad_kernel_table,
    ratio_kernel,
    ratio_kernel_table,
    twisted_pair_kernel,
    twisted_prefactor,
)

from conftest import Q_MEDIUM, field_for


# ---------------------------------------------------------------------------
# quad kernel
# ---------------------------------------------------------------------------


def test_quad_kernel_degenerate_cases(ctx_small):
    ctx = ctx_small
    assert quad_kernel(ctx, 0, 0) == 1
    for a in range(1, ctx.q):
        assert quad_kernel(ctx, a, 0) == 0
    assert abs(quad_kernel_brute(ctx, 0, 0) - 1) < 1e-12


def test_quad_kernel_f3_value():
    # brute oracle: (1/3) sum e(y^2) over F_3 equals i/sqrt(3)
    ctx = get_field(3, 1)
    assert abs(quad_kernel(ctx, 0, 1) - 1j / math.sqrt(3)) < 1e-12


def test_quad_kernel_closed_equals_brute(ctx_medium):
    res = quad_kernel_check(ctx_medium, tol=1e-9)
    assert res.passed, res
    assert res.cases == ctx_medium.q**2


def test_quad_kernel_modulus_on_generic(ctx_small):
    ctx = ctx_small
    tab = quad_kernel_table(ctx)
    generic = np.abs(tab[:, 1:])
    assert np.abs(generic - 1 / math.sqrt(ctx.q)).max() < 1e-12


def test_classify_quad():
    ctx = get_field(5, 1)
    assert classify_quad(ctx, 0, 0) is KernelCase.B_ZERO_A_ZERO
    assert classify_quad(ctx, 3, 0) is KernelCase.B_ZERO_A_NONZERO
    assert classify_quad(ctx, 0, 2) is KernelCase.GENERIC


# ---------------------------------------------------------------------------
# pair kernel
# ---------------------------------------------------------------------------


def test_pair_kernel_diagonal_and_antidiagonal():
    ctx = get_field(7, 1)
    assert abs(pair_kernel_brute(ctx, 1, 2, 2) - 7) < 1e-12
    assert abs(pair_kernel_closed(ctx, 1, 2, 2) - 7) == 0
    # h + y + z = 1 + 2 + 4 = 0 mod 7
    assert abs(pair_kernel_brute(ctx, 1, 2, 4)) < 1e-12
    assert pair_kernel_closed(ctx, 1, 2, 4) == 0


def test_pair_kernel_generic_modulus():
    ctx = get_field(7, 1)
    v = pair_kernel_brute(ctx, 1, 2, 3)
    assert abs(abs(v) - math.sqrt(7)) < 1e-12


def test_pair_kernel_rejections():
    ctx = get_field(7, 1)
    with pytest.raises(ValueError):
        pair_kernel_brute(ctx, 0, 2, 3)
    with pytest.raises(ValueError):
        pair_kernel_brute(ctx, 1, 0, 3)
    with pytest.raises(ValueError):
        pair_kernel_closed(ctx, 1, 2, 6)  # z = -h


@pytest.mark.parametrize("q", Q_MEDIUM)
def test_pair_kernel_closed_equals_brute_exhaustive(q):
    res = pair_kernel_check(field_for(q), tol=1e-6)
    assert res.passed, res
    n_adm = q - 2
    assert res.cases == (q - 1) * n_adm * n_adm


def test_pair_kernel_case_partition():
    ctx = get_field(5, 1)
    for h in range(1, 5):
        for y in admissible_codes(ctx, h):
            for z in admissible_codes(ctx, h):
                case = classify_pair(ctx, h, int(y), int(z))
                v = pair_kernel_closed(ctx, h, int(y), int(z))
                if case is KernelCase.DIAGONAL:
                    assert v == 5
                elif case is KernelCase.ANTIDIAGONAL_ZERO:
                    assert v == 0
                else:
                    assert abs(abs(v) - math.sqrt(5)) < 1e-12


def test_pair_kernel_coeffs_reconstruct_brute():
    """The summand phase really is A x^2 + B x + C: resumming the quadratic
    phase reproduces the kernel (independent reconstruction oracle)."""
    ctx = get_field(9 // 3, 2)  # F_9
    for h, y, z in [(1, 2, 5), (2, 4, 7), (5, 3, 8)]:
        if y in (0, ctx.neg(h)) or z in (0, ctx.neg(h)):
            continue
        A, B, C = pair_kernel_coeffs(ctx, h, y, z)
        total = 0j
        for x in range(ctx.q):
            phase = ctx.add(
                ctx.add(ctx.mul(A, ctx.mul(x, x)), ctx.mul(B, x)), C
            )
            total += additive_char(ctx, phase)
        assert abs(total - pair_kernel_brute(ctx, h, y, z)) < 1e-9


def test_recentering_substitution_identities():
    """h+y+z = Y+Z, y-z = Y-Z, (h+y)y = Y^2 - c^2 under Y = y+c, Z = z+c."""
    ctx = get_field(7, 2)
    rng = np.random.default_rng(17)
    for _ in range(200):
        h = int(rng.integers(1, ctx.q))
        y, z = int(rng.integers(0, ctx.q)), int(rng.integers(0, ctx.q))
        c = half_shift(ctx, h)
        Y, Z = ctx.add(y, c), ctx.add(z, c)
        assert ctx.add(ctx.add(h, y), z) == ctx.add(Y, Z)
        assert ctx.sub(y, z) == ctx.sub(Y, Z)
        assert ctx.mul(ctx.add(h, y), y) == ctx.sub(ctx.mul(Y, Y), ctx.mul(c, c))


# ---------------------------------------------------------------------------
# ratio kernel and twisted kernel
# ---------------------------------------------------------------------------


def test_ratio_kernel_zeros_and_modulus(ctx_small):
    ctx = ctx_small
    for h in (1, ctx.q - 1):
        assert ratio_kernel(ctx, h, 1) == 0
        assert ratio_kernel(ctx, h, ctx.neg(1)) == 0
        tab = ratio_kernel_table(ctx, h)
        mods = np.abs(tab)
        for r in range(ctx.q):
            if r in (1, ctx.neg(1)):
                assert mods[r] == 0
            else:
                assert abs(mods[r] - 1.0) < 1e-12


def test_ratio_kernel_f7_value():
    """L_1(2) = sigma chi(1) chi(-3) e(5) in F_7 (1/3 = 5, -3 = 4 a square)."""
    ctx = get_field(7, 1)
    sigma = gauss_sum(ctx).sigma
    expected = sigma * 1 * additive_char(ctx, 5)
    assert quadratic_char(ctx, 4) == 1
    assert abs(ratio_kernel(ctx, 1, 2) - expected) < 1e-12


def test_ratio_kernel_from_twisted_kernel():
    """Cross-check: sqrt(q) L_h(Z/Y) = B_{h,0}(Y,Z) off the diagonal."""
    ctx = get_field(7, 1)
    h = 1
    c = half_shift(ctx, h)
    for Y in range(1, 7):
        if Y in (c, ctx.neg(c)):
            continue
        for Z in range(1, 7):
            if Z in (c, ctx.neg(c)) or Z == Y:
                continue
            lhs = math.sqrt(7) * ratio_kernel(ctx, h, ctx.div(Z, Y))
            assert abs(twisted_pair_kernel(ctx, h, Y, Z) - lhs) < 1e-9


def test_twisted_kernel_diagonal_and_antidiagonal():
    ctx = get_field(11, 1)
    h = 3
    c = half_shift(ctx, h)
    for Y in range(ctx.q):
        if Y in (c, ctx.neg(c)):
            with pytest.raises(ValueError):
                twisted_pair_kernel(ctx, h, Y, 1)
            continue
        assert abs(twisted_pair_kernel(ctx, h, Y, Y) - ctx.q) < 1e-9
        negY = ctx.neg(Y)
        if Y != 0 and negY not in (c, ctx.neg(c)):
            assert abs(twisted_pair_kernel(ctx, h, Y, negY)) < 1e-9


@pytest.mark.parametrize("q", Q_MEDIUM)
def test_decomposition_identity_exhaustive(q):
    res = decomposition_check(field_for(q), tol=1e-6)
    assert res.passed, res


def test_twisted_prefactor_unimodular(ctx_small):
    ctx = ctx_small
    for h in range(1, ctx.q):
        assert abs(abs(twisted_prefactor(ctx, h)) - 1.0) < 1e-12


@given(st.integers(1, 12), st.integers(0, 12), st.integers(0, 12))
@settings(max_examples=60, deadline=None)
def test_pair_kernel_brute_matches_closed_random(h, y, z):
    ctx = get_field(13, 1)
    if y in (0, ctx.neg(h)) or z in (0, ctx.neg(h)):
        return
    assert abs(pair_kernel_brute(ctx, h, y, z) - pair_kernel_closed(ctx, h, y, z)) < 1e-9
