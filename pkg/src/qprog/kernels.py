"""Kernels of the quadratic averaging operator, closed-form and brute-force.

Four kernels, each with an exhaustive two-route check:

* ``quad_kernel``       -- the Fourier multiplier avg_y e(a y + b y^2),
* ``pair_kernel``       -- the Gram sum over x of paired slice phases,
* ``twisted_pair_kernel`` -- the pair kernel conjugated by the square-shifted
  quadratic-character twist,
* ``ratio_kernel``      -- the rank-one profile of the twisted kernel as a
  function of the column/row ratio.

The pair kernel is evaluated with the rescaled phase -x^2/y + (x-h)^2/(y+h)
+ x^2/z - (x-h)^2/(z+h) (the additive character absorbed the invertible
factor 4); the decomposition identity and the ratio-kernel character sums
all live in this convention.

All closed forms share the single measured Gauss-sum unit ``sigma``; the
exhaustive equivalence checks double as the verification that one constant
serves every case.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .field import FieldCtx
from .characters import (
    additive_char_table,
    gauss_sum,
    quadratic_char,
    quadratic_char_table,
)
from .reporting import CheckResult


class KernelCase(Enum):
    """Disjoint input classes of the kernel case analyses."""

    GENERIC = "generic"
    B_ZERO_A_ZERO = "b-zero-a-zero"
    B_ZERO_A_NONZERO = "b-zero-a-nonzero"
    DIAGONAL = "diagonal"
    ANTIDIAGONAL_ZERO = "antidiagonal-zero"


# ---------------------------------------------------------------------------
# quad kernel K: the Fourier multiplier of the averaging operator
# ---------------------------------------------------------------------------


def classify_quad(ctx: FieldCtx, a: int, b: int) -> KernelCase:
    if b != 0:
        return KernelCase.GENERIC
    return KernelCase.B_ZERO_A_ZERO if a == 0 else KernelCase.B_ZERO_A_NONZERO


def quad_kernel(ctx: FieldCtx, a: int, b: int) -> complex:
    """Closed form: sigma q^{-1/2} chi(b) e(-a^2/(4b)) for b != 0; 1 at (0,0); else 0."""
    a, b = ctx.check_element(a), ctx.check_element(b)
    case = classify_quad(ctx, a, b)
    if case is KernelCase.B_ZERO_A_ZERO:
        return 1.0 + 0.0j
    if case is KernelCase.B_ZERO_A_NONZERO:
        return 0.0 + 0.0j
    sigma = gauss_sum(ctx).sigma
    phase_code = ctx.neg(ctx.div(ctx.mul(a, a), ctx.mul(ctx.from_int(4), b)))
    e = additive_char_table(ctx)
    return sigma / math.sqrt(ctx.q) * quadratic_char(ctx, b) * complex(e[phase_code])


def quad_kernel_brute(ctx: FieldCtx, a: int, b: int) -> complex:
    """Literal average (1/q) sum_y e(a y + b y^2)."""
    a, b = ctx.check_element(a), ctx.check_element(b)
    ys = ctx.elements()
    codes = ctx.add_vec(ctx.mul_vec(a, ys), ctx.mul_vec(b, ctx.sq_vec(ys)))
    return complex(additive_char_table(ctx)[codes].sum() / ctx.q)


def quad_kernel_table(ctx: FieldCtx) -> np.ndarray:
    """Closed-form K on the whole q x q grid (cached; rows a, columns b)."""
    tab = ctx._cache.get("quad_kernel_table")
    if tab is None:
        q = ctx.q
        codes = ctx.elements()
        e = additive_char_table(ctx)
        chi = quadratic_char_table(ctx)
        sigma = gauss_sum(ctx).sigma
        tab = np.zeros((q, q), dtype=complex)
        bs = ctx.units()
        inv4b = ctx.inv_vec(ctx.mul_vec(ctx.from_int(4), bs))
        phase = ctx.neg_vec(ctx.mul_vec(ctx.sq_vec(codes)[:, None], inv4b[None, :]))
        tab[:, 1:] = (sigma / math.sqrt(q)) * chi[bs][None, :] * e[phase]
        tab[0, 0] = 1.0
        ctx._cache["quad_kernel_table"] = tab
    return tab


def quad_kernel_table_brute(ctx: FieldCtx) -> np.ndarray:
    """Brute-force K grid, accumulated one y at a time (testing oracle)."""
    q = ctx.q
    codes = ctx.elements()
    e = additive_char_table(ctx)
    acc = np.zeros((q, q), dtype=complex)
    for y in range(q):
        ay = ctx.mul_vec(codes, y)
        by2 = ctx.mul_vec(codes, ctx.mul(y, y))
        acc += e[ctx.add_vec(ay[:, None], by2[None, :])]
    return acc / q


# ---------------------------------------------------------------------------
# pair kernel B: Gram sums of paired slice phases
# ---------------------------------------------------------------------------


def _check_pair_args(ctx: FieldCtx, h: int, y: int, z: int) -> tuple[int, int, int]:
    h, y, z = ctx.check_element(h), ctx.check_element(y), ctx.check_element(z)
    if h == 0:
        raise ValueError("pair kernel requires h != 0")
    neg_h = ctx.neg(h)
    if y in (0, neg_h) or z in (0, neg_h):
        raise ValueError("pair kernel requires y, z outside {0, -h}")
    return h, y, z


def classify_pair(ctx: FieldCtx, h: int, y: int, z: int) -> KernelCase:
    h, y, z = _check_pair_args(ctx, h, y, z)
    if y == z:
        return KernelCase.DIAGONAL
    if ctx.add(ctx.add(h, y), z) == 0:
        return KernelCase.ANTIDIAGONAL_ZERO
    return KernelCase.GENERIC


def _slice_phase_columns(ctx: FieldCtx, h: int, ys: np.ndarray) -> np.ndarray:
    """Matrix e(-x^2/y + (x-h)^2/(y+h)) with rows x in F_q, columns y in ys."""
    xs = ctx.elements()
    x2 = ctx.sq_vec(xs)
    xh2 = ctx.sq_vec(ctx.sub_vec(xs, h))
    neg_inv_y = ctx.neg_vec(ctx.inv_vec(ys))
    inv_yh = ctx.inv_vec(ctx.add_vec(ys, h))
    codes = ctx.add_vec(
        ctx.mul_vec(x2[:, None], neg_inv_y[None, :]),
        ctx.mul_vec(xh2[:, None], inv_yh[None, :]),
    )
    return additive_char_table(ctx)[codes]


def admissible_codes(ctx: FieldCtx, h: int) -> np.ndarray:
    """Codes outside {0, -h}, ascending."""
    out = ctx.elements()
    return out[(out != 0) & (out != ctx.neg(h))]


def pair_kernel_brute(ctx: FieldCtx, h: int, y: int, z: int) -> complex:
    """Literal q-term sum over x of e(-x^2/y + (x-h)^2/(y+h) + x^2/z - (x-h)^2/(z+h))."""
    h, y, z = _check_pair_args(ctx, h, y, z)
    cols = _slice_phase_columns(ctx, h, np.array([y, z]))
    return complex(cols[:, 0] @ cols[:, 1].conj())


def pair_kernel_grid_brute(ctx: FieldCtx, h: int) -> tuple[np.ndarray, np.ndarray]:
    """(codes, grid) with grid[i, j] the brute pair kernel at (codes[i], codes[j])."""
    ys = admissible_codes(ctx, h)
    cols = _slice_phase_columns(ctx, h, ys)
    return ys, cols.T @ cols.conj()


def pair_kernel_coeffs(ctx: FieldCtx, h: int, y: int, z: int) -> tuple[int, int, int]:
    """Quadratic-phase coefficients (A, B, C): the summand phase is A x^2 + B x + C."""
    h, y, z = _check_pair_args(ctx, h, y, z)
    ymz = ctx.sub(y, z)
    hy, hz = ctx.add(h, y), ctx.add(h, z)
    denom = ctx.mul(hy, hz)
    a = ctx.div(ctx.mul(ctx.mul(h, ymz), ctx.add(hy, z)), ctx.mul(denom, ctx.mul(y, z)))
    b = ctx.div(ctx.mul(ctx.from_int(2), ctx.mul(h, ymz)), denom)
    c = ctx.div(ctx.mul(ctx.mul(h, h), ctx.neg(ymz)), denom)
    return a, b, c


def pair_kernel_closed(ctx: FieldCtx, h: int, y: int, z: int) -> complex:
    """Case evaluation: q on the diagonal, 0 on the vanishing antidiagonal,
    sigma sqrt(q) chi(h(h+y+z)(y-z)/((h+y)(h+z)yz)) e(h(z-y)/(h+y+z)) otherwise."""
    case = classify_pair(ctx, h, y, z)
    if case is KernelCase.DIAGONAL:
        return complex(ctx.q)
    if case is KernelCase.ANTIDIAGONAL_ZERO:
        return 0.0 + 0.0j
    hyz = ctx.add(ctx.add(h, y), z)
    ymz = ctx.sub(y, z)
    denom = ctx.mul(ctx.mul(ctx.add(h, y), ctx.add(h, z)), ctx.mul(y, z))
    chi_arg = ctx.div(ctx.mul(ctx.mul(h, hyz), ymz), denom)
    phase = ctx.div(ctx.mul(h, ctx.neg(ymz)), hyz)
    sigma = gauss_sum(ctx).sigma
    e = additive_char_table(ctx)
    return sigma * math.sqrt(ctx.q) * quadratic_char(ctx, chi_arg) * complex(e[phase])


def pair_kernel_grid_closed(ctx: FieldCtx, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form grid over all admissible (y, z) for one h."""
    ys = admissible_codes(ctx, h)
    n = len(ys)
    Y = np.broadcast_to(ys[:, None], (n, n))
    Z = np.broadcast_to(ys[None, :], (n, n))
    hyz = ctx.add_vec(ctx.add_vec(h, Y), Z)
    ymz = ctx.sub_vec(Y, Z)
    diag = Y == Z
    anti = (hyz == 0) & ~diag
    generic = ~diag & ~anti

    out = np.zeros((n, n), dtype=complex)
    out[diag] = ctx.q
    if generic.any():
        Yg, Zg = Y[generic], Z[generic]
        hyzg, ymzg = hyz[generic], ymz[generic]
        denom = ctx.mul_vec(
            ctx.mul_vec(ctx.add_vec(h, Yg), ctx.add_vec(h, Zg)), ctx.mul_vec(Yg, Zg)
        )
        chi_arg = ctx.div_vec(ctx.mul_vec(ctx.mul_vec(h, hyzg), ymzg), denom)
        phase = ctx.div_vec(ctx.mul_vec(h, ctx.neg_vec(ymzg)), hyzg)
        sigma = gauss_sum(ctx).sigma
        chi = quadratic_char_table(ctx)
        e = additive_char_table(ctx)
        out[generic] = sigma * math.sqrt(ctx.q) * chi[chi_arg] * e[phase]
    return ys, out


# ---------------------------------------------------------------------------
# twisted kernel and its ratio profile
# ---------------------------------------------------------------------------


def twisted_prefactor(ctx: FieldCtx, h: int) -> complex:
    """The unimodular constant sigma * chi(h) carried by the twisted kernel."""
    h = ctx.check_element(h)
    if h == 0:
        raise ValueError("h must be nonzero")
    return gauss_sum(ctx).sigma * quadratic_char(ctx, h)


def ratio_kernel(ctx: FieldCtx, h: int, r: int) -> complex:
    """sigma chi(h) chi(1 - r^2) e(h (r-1)/(r+1)) away from r = +-1, zero there."""
    h, r = ctx.check_element(h), ctx.check_element(r)
    if h == 0:
        raise ValueError("h must be nonzero")
    one, neg_one = 1, ctx.neg(1)
    if r in (one, neg_one):
        return 0.0 + 0.0j
    chi_arg = ctx.sub(1, ctx.mul(r, r))
    phase = ctx.mul(h, ctx.div(ctx.sub(r, 1), ctx.add(r, 1)))
    e = additive_char_table(ctx)
    return twisted_prefactor(ctx, h) * quadratic_char(ctx, chi_arg) * complex(e[phase])


def ratio_kernel_table(ctx: FieldCtx, h: int) -> np.ndarray:
    """ratio_kernel on every code r (length-q vector; zeros at r = +-1)."""
    h = ctx.check_element(h)
    if h == 0:
        raise ValueError("h must be nonzero")
    rs = ctx.elements()
    one, neg_one = 1, ctx.neg(1)
    ok = (rs != one) & (rs != neg_one)
    rr = rs[ok]
    chi = quadratic_char_table(ctx)
    e = additive_char_table(ctx)
    chi_arg = ctx.sub_vec(1, ctx.sq_vec(rr))
    phase = ctx.mul_vec(h, ctx.div_vec(ctx.sub_vec(rr, 1), ctx.add_vec(rr, 1)))
    out = np.zeros(ctx.q, dtype=complex)
    out[ok] = twisted_prefactor(ctx, h) * chi[chi_arg] * e[phase]
    return out


def half_shift(ctx: FieldCtx, h: int) -> int:
    """c = h/2, the recentering shift of the twisted kernel."""
    return ctx.div(h, ctx.from_int(2))


def twisted_pair_kernel(ctx: FieldCtx, h: int, Y: int, Z: int) -> complex:
    """D(Y) B_h(Y-c, Z-c) D(Z) with D(Y) = chi(Y^2 - c^2), c = h/2.

    Defined for Y, Z outside {c, -c}; callers wanting the extension by zero
    at those two points apply it themselves.
    """
    h, Y, Z = ctx.check_element(h), ctx.check_element(Y), ctx.check_element(Z)
    if h == 0:
        raise ValueError("h must be nonzero")
    c = half_shift(ctx, h)
    if Y in (c, ctx.neg(c)) or Z in (c, ctx.neg(c)):
        raise ValueError("twisted kernel excludes Y, Z in {c, -c}")
    c2 = ctx.mul(c, c)
    dY = quadratic_char(ctx, ctx.sub(ctx.mul(Y, Y), c2))
    dZ = quadratic_char(ctx, ctx.sub(ctx.mul(Z, Z), c2))
    return dY * dZ * pair_kernel_closed(ctx, h, ctx.sub(Y, c), ctx.sub(Z, c))


# ---------------------------------------------------------------------------
# exhaustive equivalence checks
# ---------------------------------------------------------------------------


def quad_kernel_check(ctx: FieldCtx, tol: float = 1e-6) -> CheckResult:
    """Closed form vs literal average on every (a, b) pair."""
    closed = quad_kernel_table(ctx)
    brute = quad_kernel_table_brute(ctx)
    err = np.abs(closed - brute)
    max_err = float(err.max())
    passed = max_err < tol
    first = None
    if not passed:
        a, b = np.unravel_index(int(err.argmax()), err.shape)
        first = f"(a={a}, b={b}) err={max_err:.3e}"
    return CheckResult("quad-kernel-equivalence", passed, ctx.q * ctx.q, max_err, first)


def pair_kernel_check(ctx: FieldCtx, tol: float = 1e-6) -> CheckResult:
    """Closed form vs literal sum on every admissible (h, y, z) triple."""
    max_err = 0.0
    cases = 0
    first = None
    for h in range(1, ctx.q):
        ys, brute = pair_kernel_grid_brute(ctx, h)
        _, closed = pair_kernel_grid_closed(ctx, h)
        err = np.abs(closed - brute)
        cases += err.size
        m = float(err.max())
        if m > max_err:
            max_err = m
            if m >= tol and first is None:
                i, j = np.unravel_index(int(err.argmax()), err.shape)
                first = f"(h={h}, y={int(ys[i])}, z={int(ys[j])}) err={m:.3e}"
    return CheckResult("pair-kernel-equivalence", max_err < tol, cases, max_err, first)


def decomposition_check(ctx: FieldCtx, tol: float = 1e-6) -> CheckResult:
    """Twisted kernel (built on the brute pair kernel) against the rank-one
    profile: B_{h,0}(Y,Z) = q 1_{Y=Z} + sqrt(q) L_h(Z/Y) for Y, Z outside
    {0, c, -c}."""
    q = ctx.q
    chi = quadratic_char_table(ctx)
    max_err = 0.0
    cases = 0
    first = None
    for h in range(1, q):
        c = half_shift(ctx, h)
        neg_c = ctx.neg(c)
        Ys = ctx.elements()
        Ys = Ys[(Ys != 0) & (Ys != c) & (Ys != neg_c)]
        if Ys.size == 0:  # q = 3 leaves no admissible points
            continue
        ys_shifted = ctx.sub_vec(Ys, c)  # admissible for the pair kernel
        cols = _slice_phase_columns(ctx, h, ys_shifted)
        brute = cols.T @ cols.conj()
        d = chi[ctx.sub_vec(ctx.sq_vec(Ys), ctx.mul(c, c))].astype(float)
        twisted = d[:, None] * brute * d[None, :]

        lh = ratio_kernel_table(ctx, h)
        ratios = ctx.div_vec(Ys[None, :], Ys[:, None])  # r = Z/Y at [i, j] = (Y, Z)
        predicted = math.sqrt(q) * lh[ratios]
        predicted[Ys[:, None] == Ys[None, :]] += q

        err = np.abs(twisted - predicted)
        cases += err.size
        m = float(err.max())
        if m > max_err:
            max_err = m
            if m >= tol and first is None:
                i, j = np.unravel_index(int(err.argmax()), err.shape)
                first = f"(h={h}, Y={int(Ys[i])}, Z={int(Ys[j])}) err={m:.3e}"
    return CheckResult("twisted-decomposition", max_err < tol, cases, max_err, first)
