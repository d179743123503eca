"""Averaging operator identities, sliced norms, progression counting, thresholds."""

import math

import numpy as np
import pytest

from qprog.field import get_field
from qprog.characters import ComplexFn, additive_char_table, random_fn
from qprog.kernels import quad_kernel
from qprog.operators import (
    alternating_max_ratio,
    averaging_apply,
    averaging_apply_fourier,
    count_progressions,
    density_threshold,
    deviation_norm,
    deviation_scan,
    sliced_operator_apply,
    sliced_operator_matrix,
    sliced_operator_norm,
    sliced_operator_norm_svd,
    sliced_square_form,
    triple_average_chain,
)

from conftest import field_for


# ---------------------------------------------------------------------------
# averaging operator
# ---------------------------------------------------------------------------


def test_averaging_of_constants(ctx_small):
    ctx = ctx_small
    one = ComplexFn(ctx, np.ones(ctx.q))
    out = averaging_apply(one, one)
    assert np.abs(out.values - 1.0).max() < 1e-12


def test_averaging_against_constant_gives_mean(ctx_small):
    ctx = ctx_small
    rng = np.random.default_rng(2)
    f = random_fn(ctx, rng)
    one = ComplexFn(ctx, np.ones(ctx.q))
    out = averaging_apply(f, one)
    assert np.abs(out.values - f.mean()).max() < 1e-12


def test_averaging_two_routes_random(ctx_medium):
    ctx = ctx_medium
    rng = np.random.default_rng(23)
    for _ in range(10):
        f1, f2 = random_fn(ctx, rng), random_fn(ctx, rng)
        d = averaging_apply(f1, f2).values
        v = averaging_apply_fourier(f1, f2).values
        assert np.abs(d - v).max() < 1e-9


def test_averaging_on_origin_indicators():
    """Independent enumeration: A(1_0, 1_0)(x) = #{y : x+y = 0 = x+y^2} / q."""
    ctx = get_field(7, 1)
    delta = np.zeros(7)
    delta[0] = 1.0
    f = ComplexFn(ctx, delta)
    direct = averaging_apply(f, f).values
    expected = np.zeros(7)
    for x in range(7):
        n = sum(
            1
            for y in range(7)
            if ctx.add(x, y) == 0 and ctx.add(x, ctx.mul(y, y)) == 0
        )
        expected[x] = n / 7
    assert np.abs(direct - expected).max() < 1e-12
    via = averaging_apply_fourier(f, f).values
    assert np.abs(via - expected).max() < 1e-9


def test_averaging_zero_and_bilinear():
    ctx = get_field(9 // 3, 2)
    zero = ComplexFn(ctx, np.zeros(ctx.q))
    rng = np.random.default_rng(4)
    f = random_fn(ctx, rng)
    assert np.abs(averaging_apply(zero, f).values).max() == 0
    g1, g2, h2 = random_fn(ctx, rng), random_fn(ctx, rng), random_fn(ctx, rng)
    lhs = averaging_apply(g1, ComplexFn(ctx, 2 * g2.values + 3j * h2.values)).values
    rhs = 2 * averaging_apply(g1, g2).values + 3j * averaging_apply(g1, h2).values
    assert np.abs(lhs - rhs).max() < 1e-12


# ---------------------------------------------------------------------------
# deviation norm
# ---------------------------------------------------------------------------


def test_deviation_vanishes_for_constant_second_argument(ctx_small):
    """A(f, const) averages f over a full orbit, so the deviation is 0; a
    constant FIRST argument leaves a quadratic-character convolution and the
    deviation generically survives."""
    ctx = ctx_small
    rng = np.random.default_rng(6)
    f = random_fn(ctx, rng)
    one = ComplexFn(ctx, np.ones(ctx.q))
    assert deviation_norm(f, one).direct < 1e-9
    both = deviation_norm(one, one)
    assert both.direct < 1e-9


def test_deviation_of_character_pair():
    """f1 = f2 = e(xi .): the deviation reduces to the single multiplier
    K(xi, xi), so its norm is exactly q^{-1/2}."""
    ctx = get_field(11, 1)
    e = additive_char_table(ctx)
    for xi in (1, 3):
        vals = e[ctx.mul_vec(xi, ctx.elements())]
        f = ComplexFn(ctx, vals)
        norms = deviation_norm(f, f)
        expected = abs(quad_kernel(ctx, xi, xi))
        assert abs(norms.direct - expected) < 1e-9
        assert abs(norms.fourier_side - expected) < 1e-9
        assert abs(expected - 1 / math.sqrt(11)) < 1e-12


def test_deviation_ratio_order_at_q49():
    ctx = get_field(7, 2)
    rng = np.random.default_rng(9)
    f1, f2 = random_fn(ctx, rng, "pm1"), random_fn(ctx, rng, "pm1")
    ratio = deviation_norm(f1, f2).direct / (f1.norm_avg(2) * f2.norm_avg(2))
    # scan statistic, no fixed ground truth; order q^{-1/4} ~ 0.38
    assert 0.0 < ratio < 1.0


# ---------------------------------------------------------------------------
# sliced expansion
# ---------------------------------------------------------------------------


def test_sliced_square_form_equals_deviation_square(ctx_medium):
    ctx = ctx_medium
    rng = np.random.default_rng(31)
    for _ in range(5):
        f1, f2 = random_fn(ctx, rng), random_fn(ctx, rng)
        norms = deviation_norm(f1, f2)
        form = sliced_square_form(f1, f2)
        assert abs(form.imag) < 1e-9
        target = norms.fourier_side**2
        assert abs(form.real - target) <= 1e-8 * max(1.0, target)


def test_sliced_square_form_zero_slice_bound(ctx_small):
    ctx = ctx_small
    rng = np.random.default_rng(37)
    from qprog.characters import fourier

    f1, f2 = random_fn(ctx, rng), random_fn(ctx, rng)
    _, slices = sliced_square_form(f1, f2, collect_slices=True)
    l1 = (np.abs(fourier(f1).values) ** 2).sum()
    l2 = (np.abs(fourier(f2).values) ** 2).sum()
    assert slices[0].real <= l1 * l2 / ctx.q + 1e-12
    assert abs(slices[0].imag) < 1e-12


def test_sliced_square_form_of_zero():
    ctx = get_field(5, 1)
    zero = ComplexFn(ctx, np.zeros(5))
    assert abs(sliced_square_form(zero, zero)) == 0


# ---------------------------------------------------------------------------
# sliced operator
# ---------------------------------------------------------------------------


def test_sliced_apply_zero_and_linearity():
    ctx = get_field(9 // 3, 2)
    zero = ComplexFn(ctx, np.zeros(ctx.q))
    assert np.abs(sliced_operator_apply(ctx, 2, zero).values).max() == 0
    rng = np.random.default_rng(41)
    g1, g2 = random_fn(ctx, rng), random_fn(ctx, rng)
    lhs = sliced_operator_apply(ctx, 2, ComplexFn(ctx, g1.values + 5 * g2.values)).values
    rhs = sliced_operator_apply(ctx, 2, g1).values + 5 * sliced_operator_apply(ctx, 2, g2).values
    assert np.abs(lhs - rhs).max() < 1e-12
    with pytest.raises(ValueError):
        sliced_operator_apply(ctx, 0, g1)


def test_sliced_apply_point_mass_modulus(ctx_small):
    """A point mass at v0 gives K(u,v0) conj(K(u-h, v0+h)), modulus 1/q."""
    ctx = ctx_small
    h = 1
    v0 = next(v for v in range(1, ctx.q) if v != ctx.neg(h))
    g = np.zeros(ctx.q)
    g[v0] = 1.0
    out = sliced_operator_apply(ctx, h, ComplexFn(ctx, g)).values
    expected = np.array(
        [
            quad_kernel(ctx, u, v0) * np.conj(quad_kernel(ctx, ctx.sub(u, h), ctx.add(v0, h)))
            for u in range(ctx.q)
        ]
    )
    assert np.abs(out - expected).max() < 1e-12
    assert np.abs(np.abs(out) - 1.0 / ctx.q).max() < 1e-12


@pytest.mark.parametrize("q", [9, 25])
def test_opnorm_iteration_matches_svd(q):
    ctx = field_for(q)
    for h in range(1, q):
        a = sliced_operator_norm(ctx, h)
        b = sliced_operator_norm_svd(ctx, h)
        assert abs(a - b) < 1e-8


def test_opnorm_bound_at_q9():
    ctx = get_field(3, 2)
    for h in range(1, 9):
        assert sliced_operator_norm(ctx, h) <= 4 / math.sqrt(9)


def test_opnorm_invariant_under_unimodular_column_twist():
    """Absorbing a unimodular v-dependent factor into G leaves the norm fixed."""
    from qprog.characters import quadratic_char_table

    ctx = get_field(7, 1)
    chi = quadratic_char_table(ctx)
    for h in (1, 3):
        M = sliced_operator_matrix(ctx, h)
        twist = np.ones(ctx.q, dtype=complex)
        for v in range(ctx.q):
            if v != 0 and v != ctx.neg(h):
                twist[v] = chi[v] * chi[ctx.add(v, h)]
        twisted = M * twist[None, :]
        a = np.linalg.svd(M, compute_uv=False)[0]
        b = np.linalg.svd(twisted, compute_uv=False)[0]
        assert abs(a - b) < 1e-10


def test_opnorm_rejects_h_zero():
    ctx = get_field(5, 1)
    with pytest.raises(ValueError):
        sliced_operator_norm(ctx, 0)


# ---------------------------------------------------------------------------
# progression counting
# ---------------------------------------------------------------------------


def test_count_progressions_full_field(ctx_small):
    ctx = ctx_small
    count, witness = count_progressions(ctx, np.ones(ctx.q, dtype=bool))
    assert count == ctx.q * (ctx.q - 1)
    assert witness == (0, 1)


def test_count_progressions_small_sets():
    ctx = get_field(7, 1)
    assert count_progressions(ctx, []) == (0, None)
    assert count_progressions(ctx, [4]) == (0, None)
    count, witness = count_progressions(ctx, [4, 5])
    assert count >= 1
    assert witness == (4, 1)  # (4, 5, 5)


def test_count_progressions_brute_oracle():
    """Independent triple-loop oracle on a random subset."""
    ctx = get_field(11, 1)
    rng = np.random.default_rng(53)
    members = set(int(x) for x in rng.choice(11, size=6, replace=False))
    expected = sum(
        1
        for x in range(11)
        for y in range(1, 11)
        if x in members
        and ctx.add(x, y) in members
        and ctx.add(x, ctx.mul(y, y)) in members
    )
    count, _ = count_progressions(ctx, members)
    assert count == expected


# ---------------------------------------------------------------------------
# threshold arithmetic
# ---------------------------------------------------------------------------


def test_threshold_exponent_values():
    res = density_threshold(0.25, 1.0, 121)
    assert abs(res.exponent - 5.0 / 6.0) < 1e-12
    res = density_threshold(0.75 - 1e-9, 1.0, 121)
    assert abs(res.exponent - 0.5) < 1e-8


def test_threshold_c_zero_limit():
    for q in (25, 121, 2197):
        res = density_threshold(0.25, 0.0, q)
        assert abs(res.alpha - q**-0.5) < 1e-12


def test_threshold_root_is_positivity_boundary():
    res = density_threshold(0.25, 1.0, 49)
    a, C, q = res.alpha, res.coefficient, res.q

    def lhs(alpha):
        return alpha**3 - C * q**-0.25 * alpha**1.5 - alpha / q

    assert abs(lhs(a)) < 1e-12
    assert lhs(a * 1.01) > 0 > lhs(a * 0.99)


def test_threshold_rejections():
    with pytest.raises(ValueError):
        density_threshold(0.0, 1.0, 49)
    with pytest.raises(ValueError):
        density_threshold(0.75, 1.0, 49)
    with pytest.raises(ValueError):
        density_threshold(0.5, -1.0, 49)


# ---------------------------------------------------------------------------
# the counting chain and the deviation scan
# ---------------------------------------------------------------------------


def test_triple_average_chain_on_random_sets():
    ctx = get_field(13, 1)
    rng = np.random.default_rng(61)
    for _ in range(5):
        members = rng.random(13) < 0.4
        rep = triple_average_chain(ctx, members)
        assert rep.holds
        assert rep.alpha == members.sum() / 13


def test_deviation_scan_reproducible_and_monotone():
    ctx = get_field(5, 2)
    a = deviation_scan(ctx, trials=6, seed=99)
    b = deviation_scan(ctx, trials=6, seed=99)
    assert a.max_ratio == b.max_ratio and a.witness == b.witness
    bigger = deviation_scan(ctx, trials=12, seed=99)
    assert bigger.max_ratio >= a.max_ratio  # same seed sequence, more trials
    assert abs(a.ratio_times_q_delta - a.max_ratio * 25**0.25) < 1e-12


def test_alternating_exceeds_random_lower_bound():
    ctx = get_field(5, 1)
    rng = np.random.default_rng(3)
    alt = alternating_max_ratio(ctx, rng, starts=4, rounds=8)
    scan = deviation_scan(ctx, trials=8, seed=3)
    assert alt >= scan.max_ratio * 0.9  # a certified lower envelope, usually larger
