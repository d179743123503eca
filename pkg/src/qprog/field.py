"""Finite fields F_{p^s} of odd characteristic, backed by dense integer tables.

Field elements are plain integer codes in ``0..q-1``.  The base-p digits of a
code are the coefficients of the representative polynomial, constant term
first; code 0 is the additive identity and code 1 the multiplicative one.

Construction is fully deterministic so that every table is reproducible
bit-for-bit across runs and machines:

* the modulus is the monic irreducible polynomial of degree s whose
  non-leading coefficient code is smallest (for s=1 this degenerates to X),
* the generator is the smallest code of multiplicative order q-1.

Multiplication and inversion run through discrete-log tables; addition is
digitwise and is backed by a cached q x q table for small fields.  Vectorised
variants (``add_vec`` etc.) accept numpy integer arrays and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Largest field materialised by default; keeps every exhaustive scan in this
# package under ~1e8 primitive operations.
DESK_CAP = 10_000

# Fields up to this size get a dense q x q addition table (2197^2 int32 is
# ~19 MB); larger fields fall back to digitwise addition.
_ADD_TABLE_MAX = 2500


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk-scale inputs only)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Decompose q = p^s; raises ValueError if q is not a prime power."""
    f = factorize(q)
    if len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, s),) = f.items()
    return p, s


# ---------------------------------------------------------------------------
# Polynomial arithmetic over F_p (little-endian coefficient lists).  Only used
# during field construction; all later arithmetic goes through tables.
# ---------------------------------------------------------------------------


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = a[:]
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        k = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, c in enumerate(m):
            a[i + k] = (a[i + k] - factor * c) % p
        _trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def _poly_powmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(a[:], m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(a[:]), _trim(b[:])
    while b:
        a = _poly_mod(a, b, p)
        a, b = b, a
    return a


def _is_irreducible(m: list[int], p: int) -> bool:
    """Degree-s monic m is irreducible iff gcd(m, X^{p^i} - X) = 1 for i <= s/2."""
    s = len(m) - 1
    if s == 1:
        return True
    h = [0, 1]  # X
    for _ in range(s // 2):
        h = _poly_powmod(h, p, m, p)
        diff = h[:]
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(m, diff, p)
        if len(g) > 1:
            return False
    return True


def _smallest_irreducible(p: int, s: int) -> list[int]:
    if s == 1:
        return [0, 1]  # X
    for code in range(p**s):
        coeffs = _digits_int(code, p, s) + [1]
        if _is_irreducible(coeffs, p):
            return coeffs
    raise RuntimeError(f"no irreducible polynomial of degree {s} over F_{p}")  # unreachable


def _digits_int(code: int, p: int, s: int) -> list[int]:
    out = []
    for _ in range(s):
        out.append(code % p)
        code //= p
    return out


def _code_of(coeffs: list[int], p: int) -> int:
    code = 0
    for c in reversed(coeffs):
        code = code * p + c
    return code


# ---------------------------------------------------------------------------
# Field context
# ---------------------------------------------------------------------------


class FieldCtx:
    """A fully materialised finite field F_{p^s} of odd characteristic.

    Immutable after construction (lazy caches aside); safe to share across
    workers.  Use :func:`build_field` or :func:`get_field` instead of
    constructing directly.
    """

    def __init__(self, p: int, s: int, cap: int = DESK_CAP):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported (odd characteristic required)")
        if s < 1:
            raise ValueError(f"extension degree must be >= 1, got {s}")
        q = p**s
        if q > cap:
            raise ValueError(f"q = {p}^{s} = {q} exceeds the desk-scale cap {cap}")

        self.p = p
        self.s = s
        self.q = q
        self._cache: dict = {}
        self.modulus: tuple[int, ...] = tuple(_smallest_irreducible(p, s))
        self._pow_p = [p**i for i in range(s + 1)]

        # negation is digitwise
        codes = np.arange(q, dtype=np.int64)
        neg = np.zeros(q, dtype=np.int64)
        for i in range(s):
            digit = (codes // self._pow_p[i]) % p
            neg += ((p - digit) % p) * self._pow_p[i]
        self.neg_table = neg

        self.g = self._find_generator()
        self._build_log_exp()
        self._build_trace()

    # -- construction helpers ------------------------------------------------

    def _mul_poly(self, a: int, b: int) -> int:
        """Table-free product used to bootstrap the log/exp tables."""
        pa = _digits_int(a, self.p, self.s)
        pb = _digits_int(b, self.p, self.s)
        prod = _poly_mulmod(_trim(pa), _trim(pb), list(self.modulus), self.p)
        prod += [0] * (self.s - len(prod))
        return _code_of(prod, self.p)

    def _pow_poly(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        n = self.q - 1
        prime_divisors = list(factorize(n))
        for c in range(2, self.q):
            if all(self._pow_poly(c, n // r) != 1 for r in prime_divisors):
                return c
        raise RuntimeError("no generator found")  # unreachable for a field

    def _build_log_exp(self) -> None:
        n = self.q - 1
        exp = np.zeros(n, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for k in range(n):
            exp[k] = x
            log[x] = k
            x = self._mul_poly(x, self.g)
        if x != 1 or np.any(log[1:] < 0):
            raise RuntimeError("generator does not have full order")
        self.exp_table = exp
        self.log_table = log

    def _build_trace(self) -> None:
        tr = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            acc, b = a, a
            for _ in range(self.s - 1):
                b = self.pow(b, self.p)
                acc = self.add(acc, b)
            if acc >= self.p:
                raise RuntimeError("trace left the prime field")
            tr[a] = acc
        self.trace_table = tr

    # -- scalar arithmetic ----------------------------------------------------

    def check_element(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise ValueError(f"element code {a} out of range for q={self.q}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.s == 1:
            return (a + b) % self.p
        tab = self._cache.get("add_table")
        if tab is not None:
            return int(tab[a, b])
        out = 0
        for pi in self._pow_p[: self.s]:
            out += (((a // pi) + (b // pi)) % self.p) * pi
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, int(self.neg_table[b]))

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp_table[(-self.log_table[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return int(self.exp_table[(self.log_table[a] * k) % (self.q - 1)])

    def mul_direct(self, a: int, b: int) -> int:
        """Reference product bypassing the log/exp tables (testing oracle)."""
        return self._mul_poly(a, b)

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def from_int(self, n: int) -> int:
        """Code of the constant n*1 (image of the integer in the prime field)."""
        return n % self.p

    def trace(self, a: int) -> int:
        """Trace down to the prime field, as a residue in 0..p-1."""
        return int(self.trace_table[a])

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def units(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    # -- vectorised arithmetic -------------------------------------------------

    @property
    def add_table(self) -> np.ndarray | None:
        if self.q > _ADD_TABLE_MAX:
            return None
        tab = self._cache.get("add_table")
        if tab is None:
            codes = np.arange(self.q, dtype=np.int64)
            tab = self._add_digitwise(codes[:, None], codes[None, :])
            tab = tab.astype(np.int32 if self.q > 2**15 else np.int16)
            self._cache["add_table"] = tab
        return tab

    def _add_digitwise(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.s == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pi in self._pow_p[: self.s]:
            out += (((a // pi) + (b // pi)) % self.p) * pi
        return out

    def add_vec(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        tab = self.add_table
        if tab is not None:
            return tab[a, b].astype(np.int64)
        return self._add_digitwise(a, b)

    def neg_vec(self, a) -> np.ndarray:
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def sub_vec(self, a, b) -> np.ndarray:
        return self.add_vec(a, self.neg_vec(b))

    def mul_vec(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log_table[a]
        lb = self.log_table[b]
        k = (la + lb) % (self.q - 1)
        out = self.exp_table[k]
        return np.where((a == 0) | (b == 0), 0, out)

    def sq_vec(self, a) -> np.ndarray:
        return self.mul_vec(a, a)

    def inv_vec(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.exp_table[(-self.log_table[a]) % (self.q - 1)]

    def div_vec(self, a, b) -> np.ndarray:
        return self.mul_vec(a, self.inv_vec(b))

    def pow_vec(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        if k < 0:
            return self.inv_vec(self.pow_vec(a, -k))
        out = self.exp_table[(self.log_table[a] * k) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    # -- serialization ----------------------------------------------------------

    def descriptor(self) -> dict:
        return {
            "p": self.p,
            "s": self.s,
            "modulus": list(self.modulus),
            "generator": self.g,
        }

    def __repr__(self) -> str:  # pragma: no cover
        return f"FieldCtx(p={self.p}, s={self.s}, q={self.q})"


def build_field(p: int, s: int, cap: int = DESK_CAP) -> FieldCtx:
    """Construct F_{p^s} with deterministic modulus and generator."""
    return FieldCtx(p, s, cap=cap)


@lru_cache(maxsize=None)
def get_field(p: int, s: int) -> FieldCtx:
    """Cached field construction (contexts are immutable, sharing is safe)."""
    return build_field(p, s)


def field_from_descriptor(d: dict) -> FieldCtx:
    """Rebuild a field from its JSON descriptor, checking for drift."""
    ctx = get_field(int(d["p"]), int(d["s"]))
    if list(ctx.modulus) != list(d["modulus"]) or ctx.g != int(d["generator"]):
        raise ValueError("field descriptor does not match deterministic construction")
    return ctx


def sqrt_pairs(ctx: FieldCtx) -> tuple[np.ndarray, np.ndarray]:
    """Square-root lookup: for each code d, the (up to two) codes y with y^2 = d.

    Returns arrays (r1, r2) of length q with -1 where no root exists; r1 < r2
    where both exist, and r2 = -1 when d = 0 (the only double root).
    """
    cached = ctx._cache.get("sqrt_pairs")
    if cached is None:
        r1 = np.full(ctx.q, -1, dtype=np.int64)
        r2 = np.full(ctx.q, -1, dtype=np.int64)
        for y in range(ctx.q):
            d = ctx.mul(y, y)
            if r1[d] < 0:
                r1[d] = y
            elif r2[d] < 0 and y != r1[d]:
                r2[d] = y
        cached = (r1, r2)
        ctx._cache["sqrt_pairs"] = cached
    return cached


# ---------------------------------------------------------------------------
# Subfield embeddings
# ---------------------------------------------------------------------------


@dataclass
class SubfieldEmbedding:
    """An embedding of F_q into F_{q^m} (m = 2 or 3).

    ``map_[a]`` is the big-field code of the image of small-field code a.
    The image is exactly the fixed set of the m-fold Frobenius x -> x^q.
    """

    small: FieldCtx
    big: FieldCtx
    map_: np.ndarray
    inv_map: np.ndarray  # big code -> small code, -1 outside the image
    image_mask: np.ndarray  # bool, length big.q

    @property
    def degree(self) -> int:
        return self.big.s // self.small.s

    def apply(self, a: int) -> int:
        return int(self.map_[a])

    def contains(self, x: int) -> bool:
        return bool(self.image_mask[x])

    def pull_back(self, x: int) -> int:
        a = int(self.inv_map[x])
        if a < 0:
            raise ValueError(f"big-field code {x} is not in the embedded subfield")
        return a


def _min_poly_over_prime(ctx: FieldCtx, a: int) -> list[int]:
    """Monic minimal polynomial of a over F_p, little-endian coefficients.

    Solved by Gaussian elimination mod p on the digit vectors of the powers
    of a; for a multiplicative generator the degree is exactly s.
    """
    p, s = ctx.p, ctx.s
    powers = [1]
    for _ in range(s):
        powers.append(ctx.mul(powers[-1], a))
    for deg in range(1, s + 1):
        # try to express a^deg in the span of a^0 .. a^{deg-1}
        rows = [_digits_int(powers[i], p, s) for i in range(deg)]
        target = _digits_int(powers[deg], p, s)
        sol = _solve_mod_p(rows, target, p)
        if sol is not None:
            coeffs = [(-c) % p for c in sol] + [1]
            return coeffs
    raise RuntimeError("no minimal polynomial found")  # unreachable


def _solve_mod_p(rows: list[list[int]], target: list[int], p: int) -> list[int] | None:
    """Solve sum_i x_i * rows[i] = target over F_p, or None if inconsistent."""
    k, n = len(rows), len(target)
    # augmented matrix of the transposed system: n equations, k unknowns
    aug = [[rows[i][j] % p for i in range(k)] + [target[j] % p] for j in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        pivot = next((i for i in range(r, n) if aug[i][c] % p != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = pow(aug[r][c], p - 2, p)
        aug[r] = [(v * inv) % p for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(vi - f * vr) % p for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if aug[i][k] % p != 0:
            return None
    sol = [0] * k
    for row_idx, c in enumerate(pivots):
        sol[c] = aug[row_idx][k]
    # verify (guards against free variables picked as 0)
    for j in range(n):
        if sum(sol[i] * rows[i][j] for i in range(k)) % p != target[j] % p:
            return None
    return sol


def _eval_poly(ctx: FieldCtx, coeffs: list[int], x: int) -> int:
    """Evaluate a polynomial with prime-field coefficients at a field element."""
    acc = 0
    for c in reversed(coeffs):
        acc = ctx.add(ctx.mul(acc, x), c % ctx.p)
    return acc


def subfield_embed(small: FieldCtx, big: FieldCtx) -> SubfieldEmbedding:
    """Build the embedding F_q -> F_{q^m} for m in {2, 3}.

    The small generator is sent to the least-code root of its minimal
    polynomial inside the big field (subgroup generated by
    G^{(q^m-1)/(q-1)}), which makes the extension both additive and
    multiplicative; matching generator powers alone would only be
    multiplicative.
    """
    if small.p != big.p:
        raise ValueError("incompatible characteristics")
    m = big.s // small.s if small.s and big.s % small.s == 0 else 0
    if m not in (2, 3) or small.q**m != big.q:
        raise ValueError(
            f"big field must be a quadratic or cubic extension: got q={small.q}, Q={big.q}"
        )

    step = (big.q - 1) // (small.q - 1)
    sub_codes = [0] + [int(big.exp_table[(k * step) % (big.q - 1)]) for k in range(small.q - 1)]

    minpoly = _min_poly_over_prime(small, small.g)
    roots = sorted(x for x in sub_codes if x != 0 and _eval_poly(big, minpoly, x) == 0)
    if not roots:
        raise RuntimeError("minimal polynomial has no root in the subfield")  # unreachable
    r = roots[0]

    map_ = np.zeros(small.q, dtype=np.int64)
    lr = int(big.log_table[r])
    for k in range(small.q - 1):
        map_[small.exp_table[k]] = big.exp_table[(lr * k) % (big.q - 1)]

    inv_map = np.full(big.q, -1, dtype=np.int64)
    inv_map[map_] = np.arange(small.q)
    image_mask = np.zeros(big.q, dtype=bool)
    image_mask[map_] = True

    emb = SubfieldEmbedding(small, big, map_, inv_map, image_mask)
    _check_embedding(emb)
    return emb


def _check_embedding(emb: SubfieldEmbedding) -> None:
    small, big, f = emb.small, emb.big, emb.map_
    if f[0] != 0 or f[1] != 1:
        raise RuntimeError("embedding must fix 0 and 1")
    if len(np.unique(f)) != small.q:
        raise RuntimeError("embedding is not injective")
    # Frobenius-fixed image
    fixed = big.pow_vec(f, small.q)
    if not np.array_equal(fixed, f):
        raise RuntimeError("embedded image is not fixed by x -> x^q")
    # additive + multiplicative on a deterministic sample
    rng = np.random.default_rng(12345)
    a = rng.integers(0, small.q, 256)
    b = rng.integers(0, small.q, 256)
    if not np.array_equal(f[small.add_vec(a, b)], big.add_vec(f[a], f[b])):
        raise RuntimeError("embedding is not additive")
    if not np.array_equal(f[small.mul_vec(a, b)], big.mul_vec(f[a], f[b])):
        raise RuntimeError("embedding is not multiplicative")


def cubic_min_poly(emb: SubfieldEmbedding, y: int) -> tuple[int, int, int]:
    """Coefficients (A, B, C) over F_q with y^3 = A y^2 + B y + C in F_{q^3}.

    Computed from the Frobenius conjugates y, y^q, y^{q^2} via elementary
    symmetric functions.  Requires y outside the embedded subfield; then the
    constant term C = Norm(y) is nonzero.
    """
    if emb.degree != 3:
        raise ValueError("cubic extension required")
    big, q = emb.big, emb.small.q
    if emb.contains(y):
        raise ValueError("y lies in the subfield; its minimal polynomial has degree < 3")
    y1 = big.pow(y, q)
    y2 = big.pow(y1, q)
    e1 = big.add(big.add(y, y1), y2)
    e2 = big.add(big.add(big.mul(y, y1), big.mul(y, y2)), big.mul(y1, y2))
    e3 = big.mul(big.mul(y, y1), y2)
    A = emb.pull_back(e1)
    B = emb.pull_back(big.neg(e2))
    C = emb.pull_back(e3)
    if C == 0:
        raise RuntimeError("constant coefficient vanished for y outside the subfield")
    return A, B, C
