"""Mixed character-sum scans, the reindexing identity, the ratio-sum bridge."""

import math

import pytest

from qprog.field import get_field
from qprog.characters import (
    additive_char,
    mult_char,
    quadratic_char,
    quadratic_char_table,
    additive_char_table,
)
from qprog.weil import (
    envelope,
    envelope_check,
    mixed_char_sum,
    ratio_char_sum,
    ratio_sum_check,
    substitution_check,
    weil_scan,
)
from qprog.kernels import ratio_kernel
from qprog.reporting import fit_slope_vs_logq

from conftest import Q_MEDIUM, field_for


def test_empty_sum_at_q3():
    ctx = get_field(3, 1)
    assert mixed_char_sum(ctx, 0, 1) == 0
    assert mixed_char_sum(ctx, 1, 2) == 0
    rep = weil_scan(ctx)
    assert rep.max_abs_sum == 0 and rep.grid_count == 4


def test_mixed_sum_rejects_zero_lambda():
    ctx = get_field(7, 1)
    with pytest.raises(ValueError):
        mixed_char_sum(ctx, 1, 0)
    with pytest.raises(ValueError):
        mixed_char_sum(ctx, 7, 1)


def test_trivial_character_grouped_oracle(ctx_small):
    """Independent route for eta trivial: group terms by s = (r-1)/(r+1)."""
    ctx = ctx_small
    if ctx.q == 3:
        return
    for lam in (1, 2):
        direct = mixed_char_sum(ctx, 0, lam)
        groups: dict[int, complex] = {}
        for r in range(ctx.q):
            if r in (0, 1, ctx.neg(1)):
                continue
            s = ctx.div(ctx.sub(r, 1), ctx.add(r, 1))
            groups[s] = groups.get(s, 0) + quadratic_char(ctx, ctx.sub(1, ctx.mul(r, r)))
        regrouped = sum(c * additive_char(ctx, ctx.mul(lam, s)) for s, c in groups.items())
        assert abs(direct - regrouped) < 1e-12


def test_every_summand_is_unimodular(ctx_small):
    """Structural check: |eta chi phase| = 1, so |sum| <= q - 3 a priori."""
    ctx = ctx_small
    for r in range(ctx.q):
        if r in (0, 1, ctx.neg(1)):
            continue
        term = mult_char(ctx, 1, r) * quadratic_char(ctx, ctx.sub(1, ctx.mul(r, r)))
        assert abs(abs(term) - 1.0) < 1e-12
    assert abs(mixed_char_sum(ctx, 1, 1)) <= ctx.q - 3 + 1e-9


@pytest.mark.parametrize("q", Q_MEDIUM)
def test_substitution_identity_full_grid(q):
    res = substitution_check(field_for(q))
    assert res.passed, res
    assert res.cases == (q - 1) ** 2


def test_substitution_term_counts(ctx_small):
    ctx = ctx_small
    rs = [r for r in range(ctx.q) if r not in (0, 1, ctx.neg(1))]
    assert len(rs) == ctx.q - 3


def test_substitution_single_term_spot_check():
    """F_7: r = 2 maps to s = 1/3 = 5 with an identical summand."""
    ctx = get_field(7, 1)
    r, lam, t = 2, 3, 2
    s = ctx.div(ctx.sub(r, 1), ctx.add(r, 1))
    assert s == 5
    lhs = (
        mult_char(ctx, t, r)
        * quadratic_char(ctx, ctx.sub(1, ctx.mul(r, r)))
        * additive_char(ctx, ctx.mul(lam, s))
    )
    r_back = ctx.div(ctx.add(1, s), ctx.sub(1, s))
    assert r_back == r
    neg4 = ctx.neg(ctx.from_int(4))
    chi_arg = ctx.div(ctx.mul(neg4, s), ctx.mul(ctx.sub(1, s), ctx.sub(1, s)))
    rhs = (
        mult_char(ctx, t, r_back)
        * quadratic_char(ctx, chi_arg)
        * additive_char(ctx, ctx.mul(lam, s))
    )
    assert abs(lhs - rhs) < 1e-12


@pytest.mark.parametrize("q", [5, 7, 9, 13, 25, 27, 49])
def test_ratio_char_sum_identity(q):
    res = ratio_sum_check(field_for(q))
    assert res.passed, res


def test_ratio_char_sum_brute():
    """Scalar oracle: sum the ratio kernel against a character directly."""
    ctx = get_field(9 // 3, 2)
    for h, t in [(1, 0), (2, 3), (5, 7)]:
        expected = sum(
            ratio_kernel(ctx, h, r) * mult_char(ctx, t, r) for r in range(1, ctx.q)
        )
        assert abs(ratio_char_sum(ctx, h, t) - expected) < 1e-12


def test_ratio_char_sum_envelope(ctx_medium):
    ctx = ctx_medium
    for h in (1, ctx.q - 1):
        for t in range(ctx.q - 1):
            assert abs(ratio_char_sum(ctx, h, t)) <= envelope(ctx.q)


def test_scan_grid_and_envelope(ctx_medium):
    ctx = ctx_medium
    rep = weil_scan(ctx)
    assert rep.grid_count == (ctx.q - 1) ** 2
    assert rep.max_abs_sum <= envelope(ctx.q)
    assert rep.max_ratio < 4.0
    res = envelope_check(ctx)
    assert res.passed


def test_scan_chi_subgrid_cross_check():
    """The scan's eta = chi row matches a recomputation from the +-1 table."""
    ctx = get_field(13, 1)
    rep = weil_scan(ctx, keep_grid=True)
    t_chi = (ctx.q - 1) // 2
    chi = quadratic_char_table(ctx)
    e = additive_char_table(ctx)
    for j, lam in enumerate(ctx.units()):
        total = 0j
        for r in range(ctx.q):
            if r in (0, 1, ctx.neg(1)):
                continue
            total += (
                chi[r]
                * chi[ctx.sub(1, ctx.mul(r, r))]
                * e[ctx.mul(int(lam), ctx.div(ctx.sub(r, 1), ctx.add(r, 1)))]
            )
        assert abs(abs(total) - rep.grid[t_chi, j]) < 1e-9


def test_scan_argmax_is_lexicographically_first():
    ctx = get_field(5, 1)
    rep = weil_scan(ctx, keep_grid=True)
    best = rep.grid.max()
    hits = [
        (t, int(lam))
        for t in range(4)
        for j, lam in enumerate(ctx.units())
        if abs(rep.grid[t, j] - best) == 0
    ]
    assert (rep.argmax_t, rep.argmax_lambda) == min(hits)


def test_scan_ratio_behavior_across_q():
    """The grid maximum saturates near 3 sqrt(q); the small-q ratios are capped
    by the term count (q-3)/sqrt(q), so the raw cross-q slope stays positive
    while the saturated regime (q >= 25) is flat."""
    qs = [5, 7, 9, 11, 13, 25, 27, 49, 81, 101, 121]
    ratios = [weil_scan(field_for(q)).max_ratio for q in qs]
    for q, r in zip(qs, ratios):
        assert r < 4.0
        assert r <= (q - 3) / math.sqrt(q) + 1e-12
    saturated = [r for q, r in zip(qs, ratios) if q >= 25]
    assert fit_slope_vs_logq([q for q in qs if q >= 25], saturated) < 0.05
