"""Arithmetic over F_p and F_{p^m}, plus the integer utilities the rest of the
package leans on.

Elements of F_q are stored as packed coordinate integers: the element
``x_0 + x_1 pi + ... + x_{m-1} pi^{m-1}`` is the integer ``sum x_k p^k``.  So 0
is the zero element, 1 is the unit and ``p**k`` is ``pi**k``.  The discrete log
tables translate between this form and powers of the primitive element pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
import sympy

DEFAULT_TABLE_LIMIT = 2**26


class FieldError(ValueError):
    pass


def is_odd_prime(p: int) -> bool:
    return p > 2 and bool(sympy.isprime(p))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, as -1, 0 or +1."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def p_weight(u: int, p: int) -> int:
    """Digit sum of u written in base p."""
    if u < 0:
        raise ValueError("p-weight is defined for u >= 0")
    s = 0
    while u:
        u, d = divmod(u, p)
        s += d
    return s


def nu2(b: int) -> int:
    """2-adic valuation of a positive integer."""
    if b <= 0:
        raise ValueError("nu2 needs b >= 1")
    return (b & -b).bit_length() - 1


def ord_mod(q: int, n: int) -> int:
    """Multiplicative order of q modulo n (n = 1 gives 1)."""
    if n < 1 or gcd(q, n) != 1:
        raise ValueError(f"ord_mod needs gcd(q, n) = 1, got q={q}, n={n}")
    if n == 1:
        return 1
    return int(sympy.n_order(q % n, n))


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    return int(sympy.totient(n))


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


# ---------------------------------------------------------------------------
# linear algebra over F_p


def rref_mod_p(M, p: int):
    """Reduced row echelon form of an integer matrix over F_p.

    Returns ``(R, pivots)`` where ``pivots`` lists the pivot column of each
    nonzero row of ``R``.
    """
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * inv_mod(int(A[r, c]), p)) % p
        others = np.nonzero(A[:, c])[0]
        for i in others:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(M, p: int) -> int:
    return len(rref_mod_p(M, p)[1])


def independent_rows(M, p: int) -> list[int]:
    """Indices of a maximal F_p-independent subset of the rows of M, greedily
    taken in order."""
    M = np.asarray(M, dtype=np.int64) % p
    chosen: list[int] = []
    basis = np.zeros((0, M.shape[1]), dtype=np.int64)
    for i in range(M.shape[0]):
        trial = np.vstack([basis, M[i : i + 1]])
        if rank_mod_p(trial, p) > len(chosen):
            chosen.append(i)
            basis = trial
    return chosen


def solve_mod_p(M, rhs, p: int):
    """One solution x of ``M x = rhs`` over F_p, or None if inconsistent."""
    M = np.asarray(M, dtype=np.int64) % p
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1, 1) % p
    aug = np.hstack([M, rhs])
    R, pivots = rref_mod_p(aug, p)
    ncols = M.shape[1]
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for row, c in enumerate(pivots):
        x[c] = R[row, ncols]
    return x


# ---------------------------------------------------------------------------
# the extension field


def _find_primitive_poly(p: int, m: int):
    """Lexicographically first monic primitive polynomial of degree m.

    Candidates ``x^m + c_{m-1} x^{m-1} + ... + c_0`` are scanned with the
    integer ``sum c_k p^k`` increasing.  A candidate is accepted when pi = x
    has multiplicative order exactly p^m - 1 in F_p[x]/(f), which forces f
    to be primitive (a reducible f has fewer than p^m - 1 units).
    Returns ``(coeffs, exp_table)``.
    """
    q = p**m
    n = q - 1
    for code in range(1, q):
        coeffs = [(code // p**k) % p for k in range(m)]
        if coeffs[0] == 0:
            continue
        exp = _power_table(coeffs, p, m, n)
        if exp is not None:
            return coeffs, exp
    raise FieldError(f"no primitive polynomial found for p={p}, m={m}")


def _power_table(coeffs, p: int, m: int, n: int):
    # pi^m = -sum c_k pi^k
    red = [(-c) % p for c in coeffs]
    weights = [p**k for k in range(m)]
    v = [1] + [0] * (m - 1)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        idx = sum(d * w for d, w in zip(v, weights))
        if i > 0 and idx == 1:
            return None
        out[i] = idx
        top = v[-1]
        v = [0] + v[:-1]
        if top:
            v = [(a + top * b) % p for a, b in zip(v, red)]
    if sum(d * w for d, w in zip(v, weights)) != 1:
        return None
    return out


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """Precomputed tables for F_{p^m} built on a fixed primitive element pi.

    ``exp[i]`` is pi^i, ``log[x]`` the discrete log of x (-1 for zero),
    ``coords[x]`` the coordinate vector of x in the basis 1, pi, ...,
    pi^{m-1}, ``trace_of[x]`` the absolute trace Tr(x) in F_p and
    ``trace_log[i] = Tr(pi^i)``.
    """

    p: int
    m: int
    poly: tuple
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    coords: np.ndarray = field(repr=False)
    trace_of: np.ndarray = field(repr=False)
    trace_log: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def n(self) -> int:
        return self.p**self.m - 1

    @property
    def basis(self) -> list[int]:
        return [self.p**k for k in range(self.m)]

    @property
    def half(self) -> int:
        return (self.p + 1) // 2

    # element arithmetic on packed ints
    def pack(self, vec) -> int:
        return int(sum(int(d) % self.p * self.p**k for k, d in enumerate(vec)))

    def add(self, x: int, y: int) -> int:
        return self.pack((self.coords[x] + self.coords[y]) % self.p)

    def neg(self, x: int) -> int:
        return self.pack((-self.coords[x]) % self.p)

    def scale(self, a: int, x: int) -> int:
        """Multiply x by the F_p scalar a."""
        return self.pack((a * self.coords[x]) % self.p)

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp[(self.log[x] + self.log[y]) % self.n])

    def power(self, x: int, e: int) -> int:
        if x == 0:
            if e == 0:
                return 1
            return 0
        return int(self.exp[(int(self.log[x]) * e) % self.n])

    def from_log(self, k: int) -> int:
        return int(self.exp[k % self.n])

    def trace(self, x: int) -> int:
        return int(self.trace_of[x])

    def elements(self) -> range:
        return range(self.q)


def trace_power_sum(ctx: FieldCtx, x: int) -> int:
    """Tr(x) = x + x^p + ... + x^{p^{m-1}} evaluated with field operations.

    Independent of the trace tables; raises if the sum leaves F_p.
    """
    acc = 0
    for i in range(ctx.m):
        acc = ctx.add(acc, ctx.power(x, ctx.p**i))
    if acc >= ctx.p:
        raise FieldError("power sum left the prime field")
    return acc


@lru_cache(maxsize=32)
def build_field(p: int, m: int, table_limit: int = DEFAULT_TABLE_LIMIT) -> FieldCtx:
    if not is_odd_prime(p):
        raise FieldError(f"p must be an odd prime, got {p}")
    if m < 2:
        raise FieldError(f"extension degree must be >= 2, got {m}")
    q = p**m
    if q > table_limit:
        raise FieldError(f"p^m = {q} exceeds the table limit {table_limit}")
    n = q - 1
    coeffs, exp = _find_primitive_poly(p, m)
    log = np.full(q, -1, dtype=np.int64)
    log[exp] = np.arange(n, dtype=np.int64)

    idx = np.arange(q, dtype=np.int64)
    coords = np.stack([(idx // p**k) % p for k in range(m)], axis=1)

    # trace of the basis elements through the power-sum definition; the rest
    # follows by F_p-linearity
    proto = FieldCtx(p, m, tuple(coeffs), exp, log, coords,
                     np.zeros(q, dtype=np.int64), np.zeros(n, dtype=np.int64))
    tr_basis = np.array([trace_power_sum(proto, p**k) for k in range(m)], dtype=np.int64)
    trace_of = (coords @ tr_basis) % p
    trace_log = trace_of[exp]
    for arr in (exp, log, coords, trace_of, trace_log):
        arr.setflags(write=False)
    return FieldCtx(p, m, tuple(coeffs), exp, log, coords, trace_of, trace_log)
