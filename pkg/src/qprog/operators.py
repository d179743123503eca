"""The quadratic averaging operator, its sliced pieces, and threshold arithmetic.

Normalization bookkeeping (every cross-route comparison below states its
conventions explicitly):

* ``averaging_apply`` returns the physical-side average
  (1/q) sum_y f1(x+y) f2(x+y^2); its norms are the averaged ||.||_2.
* Fourier coefficients always carry the counting l2 norm; the two-route
  deviation check equates an averaged physical norm with a counting
  frequency-side norm, which is exactly what the transform conventions give.
* the sliced operator acts on frequency-side vectors, so its operator norm is
  a plain spectral norm in the counting l2 on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from .field import FieldCtx
from .characters import ComplexFn, char_matrix, fourier, random_fn
from .kernels import quad_kernel_table


# ---------------------------------------------------------------------------
# the averaging operator, two routes
# ---------------------------------------------------------------------------


def averaging_apply(f1: ComplexFn, f2: ComplexFn) -> ComplexFn:
    """Direct route: (1/q) sum_y f1(x+y) f2(x+y^2) for every x (q^2 work)."""
    ctx = f1.ctx
    if f2.ctx is not ctx:
        raise ValueError("functions live on different fields")
    codes = ctx.elements()
    v1, v2 = f1.values, f2.values
    acc = np.zeros(ctx.q, dtype=complex)
    for y in range(ctx.q):
        acc += v1[ctx.add_vec(codes, y)] * v2[ctx.add_vec(codes, ctx.mul(y, y))]
    return ComplexFn(ctx, acc / ctx.q)


def averaging_apply_fourier(f1: ComplexFn, f2: ComplexFn) -> ComplexFn:
    """Fourier route: synthesize sum_m e(mx) sum_n fhat1(m-n) fhat2(n) K(m-n, n)."""
    ctx = f1.ctx
    if f2.ctx is not ctx:
        raise ValueError("functions live on different fields")
    fh1, fh2 = fourier(f1).values, fourier(f2).values
    Kt = quad_kernel_table(ctx)
    codes = ctx.elements()
    coeffs = np.zeros(ctx.q, dtype=complex)
    for n in range(ctx.q):
        mn = ctx.sub_vec(codes, n)
        coeffs += fh1[mn] * fh2[n] * Kt[mn, n]
    return ComplexFn(ctx, char_matrix(ctx) @ coeffs)


class DeviationNorms(NamedTuple):
    direct: float
    fourier_side: float


def deviation_norm(f1: ComplexFn, f2: ComplexFn, tol: float = 1e-8) -> DeviationNorms:
    """Averaged 2-norm of the mean-corrected average, by both routes.

    direct      = || A(f1,f2) - E[f1] E[f2] ||_2      (averaged, physical side)
    fourier_side = counting l2 norm over m of sum_{n != 0} fhat1(m-n) fhat2(n) K(m-n, n)

    The two agree identically in exact arithmetic; a mismatch beyond ``tol``
    raises (internal-consistency failure, not an input error).
    """
    ctx = f1.ctx
    dev = averaging_apply(f1, f2).values - f1.mean() * f2.mean()
    direct = float(np.sqrt((np.abs(dev) ** 2).mean()))

    fh1, fh2 = fourier(f1).values, fourier(f2).values
    Kt = quad_kernel_table(ctx)
    codes = ctx.elements()
    coeffs = np.zeros(ctx.q, dtype=complex)
    for n in range(1, ctx.q):
        mn = ctx.sub_vec(codes, n)
        coeffs += fh1[mn] * fh2[n] * Kt[mn, n]
    fourier_side = float(np.sqrt((np.abs(coeffs) ** 2).sum()))

    if abs(direct - fourier_side) > tol * max(1.0, direct, fourier_side):
        raise RuntimeError(
            f"deviation-norm routes disagree: direct={direct!r} fourier={fourier_side!r}"
        )
    return DeviationNorms(direct, fourier_side)


# ---------------------------------------------------------------------------
# sliced representation of the deviation square
# ---------------------------------------------------------------------------


def sliced_operator_matrix(ctx: FieldCtx, h: int) -> np.ndarray:
    """Matrix of K(u, v) conj(K(u-h, v+h)) with columns v in {0, -h} zeroed."""
    h = ctx.check_element(h)
    Kt = quad_kernel_table(ctx)
    codes = ctx.elements()
    rows = ctx.sub_vec(codes, h)
    cols = ctx.add_vec(codes, h)
    M = Kt * Kt[np.ix_(rows, cols)].conj()
    M[:, 0] = 0.0
    M[:, ctx.neg(h)] = 0.0
    return M


def sliced_square_form(f1: ComplexFn, f2: ComplexFn, collect_slices: bool = False):
    """The deviation square expanded over difference slices h:

    sum_h sum_{u; v outside {0,-h}} fhat1(u) conj(fhat1(u-h)) fhat2(v)
    conj(fhat2(v+h)) K(u,v) conj(K(u-h, v+h)).

    Equals || A(f1,f2) - E[f1] E[f2] ||_2^2 exactly (the averaged norm squared,
    which matches the counting-norm square of the deviation's coefficients).
    """
    ctx = f1.ctx
    fh1, fh2 = fourier(f1).values, fourier(f2).values
    codes = ctx.elements()
    slices = np.zeros(ctx.q, dtype=complex)
    for h in range(ctx.q):
        Fh = fh1 * fh1[ctx.sub_vec(codes, h)].conj()
        Gh = fh2 * fh2[ctx.add_vec(codes, h)].conj()
        M = sliced_operator_matrix(ctx, h)
        slices[h] = Fh @ (M @ Gh)
    total = complex(slices.sum())
    if collect_slices:
        return total, slices
    return total


def sliced_operator_apply(ctx: FieldCtx, h: int, G: ComplexFn) -> ComplexFn:
    """T_h G at u: sum over v outside {0, -h} of G(v) K(u,v) conj(K(u-h, v+h))."""
    h = ctx.check_element(h)
    if h == 0:
        raise ValueError("the h = 0 slice is handled inside sliced_square_form")
    return ComplexFn(ctx, sliced_operator_matrix(ctx, h) @ G.values)


def sliced_operator_norm_svd(ctx: FieldCtx, h: int) -> float:
    """Full-spectrum route: largest singular value via dense SVD."""
    if h == 0:
        raise ValueError("h must be nonzero")
    return float(np.linalg.svd(sliced_operator_matrix(ctx, h), compute_uv=False)[0])


def sliced_operator_norm(
    ctx: FieldCtx,
    h: int,
    tol: float = 1e-10,
    maxiter: int = 50_000,
) -> float:
    """Largest singular value of the sliced operator.

    Iterates M^H M from a fixed seeded start vector until the Rayleigh
    quotient stabilizes (relative change below ``tol``).  Falls back to the
    dense SVD for q <= 49 if the iteration stalls; for larger fields a stall
    raises with the last two iterates.
    """
    h = ctx.check_element(h)
    if h == 0:
        raise ValueError("h must be nonzero")
    M = sliced_operator_matrix(ctx, h)
    A = M.conj().T @ M
    rng = np.random.default_rng((ctx.q, h, 0x51CE))
    v = rng.standard_normal(ctx.q) + 1j * rng.standard_normal(ctx.q)
    v /= np.linalg.norm(v)
    rho_prev = -1.0
    for _ in range(maxiter):
        w = A @ v
        rho = float((v.conj() @ w).real)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if rho_prev >= 0 and abs(rho - rho_prev) <= tol * max(rho, 1e-300):
            return math.sqrt(max(rho, 0.0))
        rho_prev = rho
    if ctx.q <= 49:
        return sliced_operator_norm_svd(ctx, h)
    raise RuntimeError(
        f"power iteration did not stabilize for q={ctx.q}, h={h}: "
        f"last Rayleigh iterates {rho_prev!r}, {rho!r}"
    )


@dataclass
class SlicedNormReport:
    """Operator norms of every nonzero slice, with the sqrt(q) scaling."""

    q: int
    norms: list[float]
    max_norm: float
    max_norm_times_sqrt_q: float


def sliced_norm_scan(ctx: FieldCtx) -> SlicedNormReport:
    norms = [sliced_operator_norm(ctx, h) for h in range(1, ctx.q)]
    mx = max(norms)
    return SlicedNormReport(ctx.q, norms, mx, mx * math.sqrt(ctx.q))


# ---------------------------------------------------------------------------
# progression counting and density-threshold arithmetic
# ---------------------------------------------------------------------------


def membership_mask(ctx: FieldCtx, members) -> np.ndarray:
    if isinstance(members, np.ndarray) and members.dtype == bool:
        if members.shape != (ctx.q,):
            raise ValueError("membership mask has wrong length")
        return members
    mask = np.zeros(ctx.q, dtype=bool)
    idx = np.asarray(list(members), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= ctx.q):
        raise ValueError("member code out of range")
    mask[idx] = True
    return mask


def count_progressions(ctx: FieldCtx, members) -> tuple[int, tuple[int, int] | None]:
    """Exact number of pairs (x, y), y != 0, with x, x+y, x+y^2 all members.

    Repeated values are allowed (y = 1 gives the triple x, x+1, x+1).  Also
    returns the first witness in lexicographic (x, y) code order, if any.
    """
    mask = membership_mask(ctx, members)
    codes = ctx.elements()
    count = 0
    witness: tuple[int, int] | None = None
    for y in range(1, ctx.q):
        hit = mask & mask[ctx.add_vec(codes, y)] & mask[ctx.add_vec(codes, ctx.mul(y, y))]
        c = int(hit.sum())
        if c:
            count += c
            x0 = int(np.flatnonzero(hit)[0])
            if witness is None or (x0, y) < witness:
                witness = (x0, y)
    return count, witness


@dataclass
class ThresholdResult:
    """Density solving alpha^3 - C q^{-delta} alpha^{3/2} - alpha/q = 0.

    ``exponent`` is the asymptotic size exponent 1 - (2/3) delta; densities
    strictly above ``alpha`` make the restricted average positive.
    """

    delta: float
    coefficient: float
    q: int
    alpha: float
    size: float
    exponent: float


def density_threshold(delta: float, coefficient: float, q: int) -> ThresholdResult:
    if not 0.0 < delta < 0.75:
        raise ValueError(f"delta must lie in (0, 3/4), got {delta}")
    if coefficient < 0:
        raise ValueError("coefficient must be nonnegative")
    # substitute beta = sqrt(alpha): psi(beta) = beta^4 - C q^{-delta} beta - 1/q
    # has exactly one positive root (negative at 0+, eventually increasing).
    B = coefficient * q ** (-delta)

    def psi(beta: float) -> float:
        return beta**4 - B * beta - 1.0 / q

    hi = 1.0
    while psi(hi) <= 0.0:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    beta = 0.5 * (lo + hi)
    alpha = beta * beta
    return ThresholdResult(delta, coefficient, q, alpha, alpha * q, 1.0 - 2.0 * delta / 3.0)


@dataclass
class ChainReport:
    """The counting inequality chain instantiated on a concrete set.

    triple_average = E_x E_y 1_A(x) 1_A(x+y) 1_A(x+y^2), including y = 0;
    the lower bound alpha^3 - ||1_A||_2 * deviation is a Cauchy-Schwarz
    consequence and must hold up to float slack for every set.
    """

    q: int
    size: int
    alpha: float
    triple_average: float
    deviation: float
    lower_bound: float
    holds: bool


def triple_average_chain(ctx: FieldCtx, members) -> ChainReport:
    mask = membership_mask(ctx, members)
    size = int(mask.sum())
    alpha = size / ctx.q
    count_nonzero, _ = count_progressions(ctx, mask)
    triple_average = (count_nonzero + size) / (ctx.q * ctx.q)
    f = ComplexFn(ctx, mask.astype(complex))
    dev = deviation_norm(f, f).direct
    lower = alpha**3 - f.norm_avg(2.0) * dev
    return ChainReport(
        ctx.q, size, alpha, triple_average, dev, lower, triple_average >= lower - 1e-9
    )


# ---------------------------------------------------------------------------
# deviation-ratio scanning
# ---------------------------------------------------------------------------


@dataclass
class DeviationReport:
    """Scan record for the bilinear deviation ratio.

    ``max_ratio`` is a certified lower envelope of the true bilinear
    supremum: the best ratio seen over random trial pairs and (optionally)
    over alternating exact one-sided maximizations.
    """

    q: int
    trial_count: int
    max_ratio: float
    ratio_times_q_delta: float
    witness: dict
    seed: int
    per_trial: list = dc_field(default_factory=list)
    alternating_ratio: float | None = None


def _f1_side_matrix(ctx: FieldCtx, f2_vals: np.ndarray) -> np.ndarray:
    """N with (A(f1,f2) - E f1 E f2)(x) = sum_a N[x,a] f1(a), f2 fixed."""
    codes = ctx.elements()
    mean2 = f2_vals.mean()
    d = ctx.sub_vec(codes[None, :], codes[:, None])  # a - x at [x, a]
    idx = ctx.add_vec(codes[:, None], ctx.sq_vec(d))
    return (f2_vals[idx] - mean2) / ctx.q


def _f2_side_matrix(ctx: FieldCtx, f1_vals: np.ndarray) -> np.ndarray:
    """N with (A(f1,f2) - E f1 E f2)(x) = sum_b N[x,b] f2(b), f1 fixed."""
    from .field import sqrt_pairs

    codes = ctx.elements()
    mean1 = f1_vals.mean()
    r1, r2 = sqrt_pairs(ctx)
    d = ctx.sub_vec(codes[None, :], codes[:, None])  # b - x at [x, b]
    out = np.zeros((ctx.q, ctx.q), dtype=complex)
    for roots in (r1, r2):
        rv = roots[d]
        safe = np.where(rv < 0, 0, rv)
        vals = f1_vals[ctx.add_vec(codes[:, None], safe)]
        out += np.where(rv < 0, 0.0, vals)
    return (out - mean1) / ctx.q


def _top_right_singular(N: np.ndarray) -> tuple[float, np.ndarray]:
    _, s, vh = np.linalg.svd(N)
    return float(s[0]), vh[0].conj()


def alternating_max_ratio(
    ctx: FieldCtx, rng: np.random.Generator, starts: int = 32, rounds: int = 20
) -> float:
    """Lower bound for the bilinear deviation sup by alternating exact
    one-sided maximization (each half-step is a singular-value problem)."""
    best = 0.0
    for _ in range(starts):
        f2 = rng.standard_normal(ctx.q) + 1j * rng.standard_normal(ctx.q)
        for _ in range(rounds):
            s1, f1 = _top_right_singular(_f1_side_matrix(ctx, f2))
            n2 = float(np.sqrt((np.abs(f2) ** 2).mean()))
            best = max(best, s1 / n2)
            s2, f2 = _top_right_singular(_f2_side_matrix(ctx, f1))
            n1 = float(np.sqrt((np.abs(f1) ** 2).mean()))
            best = max(best, s2 / n1)
    return best


def deviation_scan(
    ctx: FieldCtx,
    trials: int,
    seed: int,
    kinds: tuple[str, ...] = ("pm1", "indicator"),
    include_alternating: bool = False,
    alternating_starts: int = 32,
    alternating_rounds: int = 20,
) -> DeviationReport:
    """Random-ensemble (and optionally alternating-maximization) scan of
    || A(f1,f2) - E f1 E f2 ||_2 / (||f1||_2 ||f2||_2)."""
    rng = np.random.default_rng(seed)
    per_trial = []
    max_ratio = 0.0
    witness: dict = {}
    for i in range(trials):
        for kind in kinds:
            f1 = random_fn(ctx, rng, kind)
            f2 = random_fn(ctx, rng, kind)
            denom = f1.norm_avg(2.0) * f2.norm_avg(2.0)
            if denom == 0.0:
                continue
            ratio = deviation_norm(f1, f2).direct / denom
            per_trial.append((kind, i, ratio))
            if ratio > max_ratio:
                max_ratio = ratio
                witness = {"source": f"random-{kind}", "trial": i}
    alt = None
    if include_alternating:
        alt = alternating_max_ratio(ctx, rng, alternating_starts, alternating_rounds)
        if alt > max_ratio:
            max_ratio = alt
            witness = {"source": "alternating", "starts": alternating_starts}
    return DeviationReport(
        q=ctx.q,
        trial_count=trials,
        max_ratio=max_ratio,
        ratio_times_q_delta=max_ratio * ctx.q**0.25,
        witness=witness,
        seed=seed,
        per_trial=per_trial,
        alternating_ratio=alt,
    )
