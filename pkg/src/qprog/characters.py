"""Characters and Fourier transforms on F_q, with both norm conventions.

Conventions (the highest-risk bookkeeping in this package, stated once):

* physical side carries the averaged norm  ||f||_r = ((1/q) sum |f|^r)^{1/r},
* frequency side carries the counting norm ||g||_l2 = (sum |g|^2)^{1/2},
* the transform is fhat(xi) = (1/q) sum_x f(x) e(-x xi), inversion is the
  plain sum f(x) = sum_xi fhat(xi) e(x xi), and Parseval reads
  ||f||_2 = ||fhat||_l2.

The additive character is fixed as e(x) = exp(2 pi i Tr(x)/p); any nontrivial
choice gives a unitarily equivalent theory, and fixing one keeps reports
deterministic.  Unit roots are computed from rational angles directly, never
by repeated multiplication, so q-term sums carry no accumulated phase error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldCtx

TAU = 2.0 * math.pi

FULL = "full"
MULTIPLICATIVE = "multiplicative"


# ---------------------------------------------------------------------------
# character tables
# ---------------------------------------------------------------------------


def additive_char_table(ctx: FieldCtx) -> np.ndarray:
    """e(x) for every code x, as a cached complex vector."""
    tab = ctx._cache.get("e_table")
    if tab is None:
        tab = np.exp((TAU * 1j / ctx.p) * ctx.trace_table)
        ctx._cache["e_table"] = tab
    return tab


def additive_char(ctx: FieldCtx, x: int) -> complex:
    """The fixed nontrivial additive character e(x) = exp(2 pi i Tr(x)/p)."""
    return complex(additive_char_table(ctx)[ctx.check_element(x)])


def unit_root_powers(ctx: FieldCtx) -> np.ndarray:
    """Powers of the primitive (q-1)-th root of unity, index k -> zeta^k."""
    tab = ctx._cache.get("root_powers")
    if tab is None:
        tab = np.exp((TAU * 1j / (ctx.q - 1)) * np.arange(ctx.q - 1))
        ctx._cache["root_powers"] = tab
    return tab


def mult_char(ctx: FieldCtx, t: int, x: int) -> complex:
    """eta_t(x) = zeta^{t log_g(x)} for nonzero x; t = 0 is trivial."""
    if not 0 <= t <= ctx.q - 2:
        raise ValueError(f"character index t={t} out of range 0..{ctx.q - 2}")
    x = ctx.check_element(x)
    if x == 0:
        raise ValueError("multiplicative characters are defined on nonzero elements only")
    k = (t * int(ctx.log_table[x])) % (ctx.q - 1)
    return complex(unit_root_powers(ctx)[k])


def mult_char_table(ctx: FieldCtx, t: int) -> np.ndarray:
    """eta_t on every code, extended by zero at 0 (length-q vector)."""
    if not 0 <= t <= ctx.q - 2:
        raise ValueError(f"character index t={t} out of range 0..{ctx.q - 2}")
    out = np.zeros(ctx.q, dtype=complex)
    units = ctx.units()
    k = (t * ctx.log_table[units]) % (ctx.q - 1)
    out[units] = unit_root_powers(ctx)[k]
    return out


def quadratic_char(ctx: FieldCtx, x: int) -> int:
    """+1 on nonzero squares, -1 on nonsquares, 0 at 0."""
    x = ctx.check_element(x)
    if x == 0:
        return 0
    return -1 if int(ctx.log_table[x]) & 1 else 1


def quadratic_char_table(ctx: FieldCtx) -> np.ndarray:
    tab = ctx._cache.get("chi_table")
    if tab is None:
        tab = np.zeros(ctx.q, dtype=np.int8)
        units = ctx.units()
        tab[units] = np.where(ctx.log_table[units] & 1, -1, 1)
        ctx._cache["chi_table"] = tab
    return tab


# ---------------------------------------------------------------------------
# functions on the field
# ---------------------------------------------------------------------------


@dataclass
class ComplexFn:
    """A complex-valued function on F_q as a dense length-q vector.

    ``domain`` distinguishes full-field functions from punctured ones that
    live on the multiplicative group and carry value 0 at code 0.
    """

    ctx: FieldCtx
    values: np.ndarray
    domain: str = FULL

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.ctx.q,):
            raise ValueError(f"expected {self.ctx.q} values, got shape {self.values.shape}")
        if self.domain not in (FULL, MULTIPLICATIVE):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        if self.domain == MULTIPLICATIVE and self.values[0] != 0:
            raise ValueError("punctured functions must vanish at 0")

    def mean(self) -> complex:
        return complex(self.values.sum() / self.ctx.q)

    def norm_avg(self, r: float = 2.0) -> float:
        return float((np.abs(self.values) ** r).mean() ** (1.0 / r))

    def norm_count(self) -> float:
        return float(np.sqrt((np.abs(self.values) ** 2).sum()))

    def to_json(self) -> list[list[float]]:
        return [[float(v.real), float(v.imag)] for v in self.values]

    @classmethod
    def from_json(cls, ctx: FieldCtx, data, domain: str = FULL) -> "ComplexFn":
        vals = np.array([complex(re, im) for re, im in data])
        return cls(ctx, vals, domain)


def random_fn(ctx: FieldCtx, rng: np.random.Generator, kind: str = "gaussian") -> ComplexFn:
    """Deterministic pseudo-random test functions (seeded by the caller)."""
    if kind == "gaussian":
        v = rng.standard_normal(ctx.q) + 1j * rng.standard_normal(ctx.q)
    elif kind == "pm1":
        v = rng.choice([-1.0, 1.0], size=ctx.q).astype(complex)
    elif kind == "indicator":
        v = (rng.random(ctx.q) < 0.5).astype(complex)
    else:
        raise ValueError(f"unknown random function kind {kind!r}")
    return ComplexFn(ctx, v)


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------


def char_matrix(ctx: FieldCtx) -> np.ndarray:
    """The q x q synthesis matrix E[x, xi] = e(x*xi), cached per field."""
    mat = ctx._cache.get("char_matrix")
    if mat is None:
        codes = ctx.elements()
        prods = ctx.mul_vec(codes[:, None], codes[None, :])
        mat = additive_char_table(ctx)[prods]
        ctx._cache["char_matrix"] = mat
    return mat


def fourier(f: ComplexFn) -> ComplexFn:
    """fhat(xi) = (1/q) sum_x f(x) e(-x xi); averaged analysis convention."""
    if f.domain != FULL:
        raise ValueError("fourier expects a full-field function")
    ctx = f.ctx
    vals = char_matrix(ctx).conj() @ f.values / ctx.q
    return ComplexFn(ctx, vals)


def fourier_inverse(fhat: ComplexFn) -> ComplexFn:
    """f(x) = sum_xi fhat(xi) e(x xi); plain-sum synthesis convention."""
    ctx = fhat.ctx
    return ComplexFn(ctx, char_matrix(ctx) @ fhat.values)


def mult_fourier(f: ComplexFn) -> np.ndarray:
    """Multiplicative coefficients M_f(t) = sum_{Y != 0} f(Y) conj(eta_t(Y)).

    Requires f(0) = 0.  Indexed by t = 0..q-2; counting normalization on both
    sides, so (1/(q-1)) sum_t |M_f(t)|^2 = sum_Y |f(Y)|^2.
    """
    ctx = f.ctx
    if f.values[0] != 0:
        raise ValueError("multiplicative transform requires f(0) = 0")
    n = ctx.q - 1
    by_log = f.values[ctx.exp_table]  # F[k] = f(g^k)
    t = np.arange(n)
    mat = unit_root_powers(ctx)[(-np.outer(t, np.arange(n))) % n]
    return mat @ by_log


def mult_fourier_inverse(ctx: FieldCtx, coeffs: np.ndarray) -> ComplexFn:
    """f(Y) = (1/(q-1)) sum_t M(t) eta_t(Y), extended by zero at 0."""
    n = ctx.q - 1
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (n,):
        raise ValueError(f"expected {n} coefficients")
    t = np.arange(n)
    mat = unit_root_powers(ctx)[np.outer(np.arange(n), t) % n]
    vals = np.zeros(ctx.q, dtype=complex)
    vals[ctx.exp_table] = mat @ coeffs / n
    return ComplexFn(ctx, vals, MULTIPLICATIVE)


# ---------------------------------------------------------------------------
# Gauss sum
# ---------------------------------------------------------------------------


@dataclass
class GaussSumInfo:
    """The measured quadratic Gauss sum: raw_sum = sigma * sqrt(q), |sigma| = 1."""

    raw_sum: complex
    sigma: complex


def gauss_sum(ctx: FieldCtx) -> GaussSumInfo:
    """Brute-force sum of e(y^2) over the field; sigma is measured, not assumed."""
    info = ctx._cache.get("gauss_sum")
    if info is None:
        codes = ctx.elements()
        raw = complex(additive_char_table(ctx)[ctx.sq_vec(codes)].sum())
        sigma = raw / math.sqrt(ctx.q)
        if abs(abs(sigma) - 1.0) > 1e-9:
            raise RuntimeError(f"gauss sum modulus check failed: |sigma| = {abs(sigma)}")
        info = GaussSumInfo(raw_sum=raw, sigma=sigma)
        ctx._cache["gauss_sum"] = info
    return info
