"""Quadratic trace forms Tr(sum_i alpha_i x^{p^i+1}), their symmetric matrices,
rank/discriminant classification and exact exponential-sum values.

Exponential sums are kept symbolic as ``ExpSumValue``:

    epsilon * zeta^c * g^surd * p^e,   g = sum_{x in F_p} zeta^{x^2}

where g is the quadratic Gauss sum, the square root of p* = (-1/p) p with
the standard sign.  ``CyclotomicInt`` is the exact integer carrier used by
the direct-summation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Mapping

import numpy as np

from .field import FieldCtx, inv_mod, legendre, nu2, solve_mod_p

# ---------------------------------------------------------------------------
# exact cyclotomic integers


@dataclass(frozen=True)
class CyclotomicInt:
    """Element of Z[zeta_p] in the basis zeta^0..zeta^{p-2}."""

    p: int
    coeffs: tuple

    @classmethod
    def from_histogram(cls, p: int, hist) -> "CyclotomicInt":
        """sum_v hist[v] zeta^v for v in 0..p-1."""
        h = [int(x) for x in hist]
        if len(h) != p:
            raise ValueError("histogram must have p entries")
        top = h[p - 1]
        return cls(p, tuple(h[k] - top for k in range(p - 1)))

    @classmethod
    def integer(cls, p: int, k: int) -> "CyclotomicInt":
        return cls(p, (int(k),) + (0,) * (p - 2))

    @classmethod
    def zeta(cls, p: int, c: int) -> "CyclotomicInt":
        hist = [0] * p
        hist[c % p] = 1
        return cls.from_histogram(p, hist)

    @classmethod
    def gauss(cls, p: int) -> "CyclotomicInt":
        hist = [0] * p
        for x in range(p):
            hist[x * x % p] += 1
        return cls.from_histogram(p, hist)

    def _full(self) -> list[int]:
        return list(self.coeffs) + [0]

    def __add__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        return CyclotomicInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CyclotomicInt":
        return CyclotomicInt(self.p, tuple(-a for a in self.coeffs))

    def scale(self, k: int) -> "CyclotomicInt":
        return CyclotomicInt(self.p, tuple(k * a for a in self.coeffs))

    def __mul__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        p = self.p
        acc = [0] * p
        for i, a in enumerate(self._full()):
            if a:
                for j, b in enumerate(other._full()):
                    if b:
                        acc[(i + j) % p] += a * b
        return CyclotomicInt.from_histogram(p, acc)

    def galois(self, a: int) -> "CyclotomicInt":
        """Image under zeta -> zeta^a."""
        acc = [0] * self.p
        for i, c in enumerate(self._full()):
            acc[(i * a) % self.p] += c
        return CyclotomicInt.from_histogram(self.p, acc)

    def as_integer(self):
        """The rational integer value if this element lies in Z, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]


# ---------------------------------------------------------------------------
# symbolic sum values


@dataclass(frozen=True)
class ExpSumValue:
    zero: bool = False
    epsilon: int = 1
    phase: int | None = None
    surd: bool = False
    exponent: int = 0

    @classmethod
    def Zero(cls) -> "ExpSumValue":
        return cls(zero=True)

    def with_phase(self, c: int, p: int) -> "ExpSumValue":
        if self.zero:
            return self
        return ExpSumValue(False, self.epsilon, c % p, self.surd, self.exponent)

    def to_cyclotomic(self, p: int) -> CyclotomicInt:
        if self.zero:
            return CyclotomicInt.integer(p, 0)
        v = CyclotomicInt.integer(p, self.epsilon * p**self.exponent)
        if self.surd:
            v = v * CyclotomicInt.gauss(p)
        if self.phase:
            v = v * CyclotomicInt.zeta(p, self.phase)
        return v


# ---------------------------------------------------------------------------
# symmetric matrices


def _pow_elems(ctx: FieldCtx, xs: np.ndarray, s: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros_like(xs)
    nz = xs != 0
    out[nz] = ctx.exp[(ctx.log[xs[nz]] * s) % ctx.n]
    return out


def _mul_elems(ctx: FieldCtx, a: int, xs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(xs)
    if a == 0:
        return out
    nz = xs != 0
    out[nz] = ctx.exp[(ctx.log[a] + ctx.log[xs[nz]]) % ctx.n]
    return out


def form_values(ctx: FieldCtx, coeffs: Mapping[int, int], xs, gamma: int = 0) -> np.ndarray:
    """Tr(sum_i alpha_i x^{p^i+1} + gamma x) for packed field elements xs."""
    xs = np.asarray(xs, dtype=np.int64)
    acc = np.zeros(xs.shape, dtype=np.int64)
    for i, a in coeffs.items():
        if a:
            acc += ctx.trace_of[_mul_elems(ctx, a, _pow_elems(ctx, xs, 1 + ctx.p**i))]
    if gamma:
        acc += ctx.trace_of[_mul_elems(ctx, gamma, xs)]
    return acc % ctx.p


def symmetric_matrix(ctx: FieldCtx, coeffs: Mapping[int, int]) -> np.ndarray:
    """H with X H X^T = Tr(f(x)) in the polynomial basis, built by polarization."""
    p, m = ctx.p, ctx.m
    e = np.array([p**j for j in range(m)], dtype=np.int64)
    diag = form_values(ctx, coeffs, e)
    H = np.diag(diag)
    inv2 = inv_mod(2, p)
    for j in range(m):
        pair = form_values(ctx, coeffs, e[j] + e[j + 1:])
        for off, k in enumerate(range(j + 1, m)):
            H[j, k] = H[k, j] = ((pair[off] - diag[j] - diag[k]) * inv2) % p
    return H % p


def quad_eval(H: np.ndarray, X: np.ndarray, p: int) -> np.ndarray:
    """X H X^T for each row of X."""
    X = np.atleast_2d(X)
    return np.einsum("ij,jk,ik->i", X, H, X) % p


def rank_and_disc_batch(Hs: np.ndarray, p: int):
    """Rank and Legendre symbol of the discriminant for a batch of symmetric
    matrices, by simultaneous row/column (congruence) reduction.

    Each step picks a nonzero diagonal pivot of the trailing block.  If the
    diagonal is zero but the block is not, adding row/column j to row/column
    i for a nonzero entry (i, j) creates the diagonal entry 2 h_ij != 0.
    Returns ``(ranks, eta)`` with eta = +1 when the rank is 0.
    """
    T = np.array(Hs, dtype=np.int64) % p
    N, m, _ = T.shape
    ranks = np.zeros(N, dtype=np.int64)
    delta = np.ones(N, dtype=np.int64)
    inv = np.array([0] + [inv_mod(a, p) for a in range(1, p)], dtype=np.int64)
    rows = np.arange(N)
    for _ in range(m):
        s = T.shape[1]
        nz = T.reshape(N, -1).any(axis=1)
        if not nz.any():
            break
        diag = T[:, np.arange(s), np.arange(s)]
        hasd = (diag != 0).any(axis=1)
        fix = np.nonzero(nz & ~hasd)[0]
        if len(fix):
            flat = (T[fix].reshape(len(fix), -1) != 0).argmax(axis=1)
            i, j = np.divmod(flat, s)
            sub = T[fix]
            r = np.arange(len(fix))
            sub[r, i, :] += sub[r, j, :]
            sub[r, :, i] += sub[r, :, j]
            T[fix] = sub % p
            diag = T[:, np.arange(s), np.arange(s)]
        piv = (diag != 0).argmax(axis=1)
        perm = np.tile(np.arange(s), (N, 1))
        perm[rows, 0] = piv
        perm[rows, piv] = 0
        T = T[rows[:, None, None], perm[:, :, None], perm[:, None, :]]
        a = np.where(nz, T[:, 0, 0], 1)
        ranks += nz
        delta = (delta * a) % p
        v = T[:, 1:, 0]
        T = (T[:, 1:, 1:] - v[:, :, None] * v[:, None, :] * inv[a][:, None, None]) % p
    eta = np.where(pow_mod_array(delta, (p - 1) // 2, p) == 1, 1, -1)
    return ranks, eta


def pow_mod_array(a: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            out = (out * base) % p
        base = (base * base) % p
        e >>= 1
    return out


def rank_and_disc(H, p: int) -> tuple[int, int]:
    r, eta = rank_and_disc_batch(np.asarray(H)[None], p)
    return int(r[0]), int(eta[0])


def sum_sign(r: int, eta_delta: int, p: int) -> int:
    """epsilon of sum_X zeta^{XHX^T} for rank r and discriminant class eta."""
    return eta_delta * legendre(-1, p) ** (r // 2)


def gauss_sum(H, p: int) -> ExpSumValue:
    m = np.asarray(H).shape[0]
    r, eta = rank_and_disc(H, p)
    return gauss_value(r, eta, m, p)


def gauss_value(r: int, eta: int, m: int, p: int) -> ExpSumValue:
    """eta(Delta) g^r p^{m-r} written in normal form."""
    eps = sum_sign(r, eta, p)
    if r % 2 == 0:
        return ExpSumValue(False, eps, None, False, m - r // 2)
    return ExpSumValue(False, eps, None, True, m - (r + 1) // 2)


def shifted_sum(H, A, p: int) -> ExpSumValue:
    """sum_X zeta^{XHX^T + A X^T}: zero unless 2 Y H + A = 0 is solvable,
    otherwise the Gauss sum times zeta^c with c = A B^T / 2."""
    H = np.asarray(H, dtype=np.int64) % p
    A = np.asarray(A, dtype=np.int64) % p
    B = solve_mod_p((2 * H).T, (-A) % p, p)
    if B is None:
        return ExpSumValue.Zero()
    c = int(A @ B) * inv_mod(2, p) % p
    return gauss_sum(H, p).with_phase(c, p)


def linear_vector(ctx: FieldCtx, gamma: int) -> np.ndarray:
    """A with A X^T = Tr(gamma x) in the polynomial basis."""
    return form_values(ctx, {}, np.array(ctx.basis, dtype=np.int64), gamma)


def direct_sum_oracle(ctx: FieldCtx, coeffs: Mapping[int, int], gamma: int = 0, b: int = 0,
                      budget: int = 2**22) -> CyclotomicInt:
    """sum over all x in F_q of zeta^{Tr(f(x) + gamma x) + b}, exactly."""
    if ctx.q > budget:
        raise ValueError(f"q = {ctx.q} exceeds the oracle budget {budget}")
    vals = (form_values(ctx, coeffs, np.arange(ctx.q), gamma) + b) % ctx.p
    return CyclotomicInt.from_histogram(ctx.p, np.bincount(vals, minlength=ctx.p))


def scaled_sum_oracle(ctx: FieldCtx, coeffs: Mapping[int, int], gamma: int = 0, b: int = 0) -> CyclotomicInt:
    """sum_{a=1}^{p-1} zeta^{ab} S'(a alpha, ..., a gamma) by direct summation."""
    p = ctx.p
    vals = form_values(ctx, coeffs, np.arange(ctx.q), gamma)
    acc = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        acc += np.bincount((a * vals + a * b) % p, minlength=p)
    return CyclotomicInt.from_histogram(p, acc)


# ---------------------------------------------------------------------------
# single-term sums


def classify_single_sum(ctx: FieldCtx, alpha: int, j: int) -> ExpSumValue:
    """Closed-form value of sum_x zeta^{Tr(alpha x^{p^j+1})}, alpha != 0."""
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if j < 0:
        raise ValueError("j must be >= 0")
    p, m = ctx.p, ctx.m
    vm = nu2(m)
    vj = nu2(j) if j else float("inf")
    la = int(ctx.log[alpha])
    if vm <= vj:
        eta_a = 1 if la % 2 == 0 else -1
        sign = eta_a * (-1) ** (m - 1)
        k = ((p - 1) // 2) ** 2 * m  # power of i
        if m % 2 == 0:
            sign *= (-1) ** (k // 2)
            return ExpSumValue(False, sign, None, False, m // 2)
        # odd m: i^k sqrt(p) expressed through g
        if p % 4 == 1:
            return ExpSumValue(False, sign, None, True, (m - 1) // 2)
        # p = 3 mod 4: k = m mod 4 and g = i sqrt(p), so i^m sqrt(p) = (-1)^{(m-1)/2} g
        return ExpSumValue(False, sign * (-1) ** ((m - 1) // 2), None, True, (m - 1) // 2)
    g = gcd(2 * j, m)
    E = (p**j - 1) * (p**m - 1) // (p**g - 1)
    power = ctx.from_log(la * E)
    minus_one = p - 1  # packed form of -1
    if vm == vj + 1:
        if power == minus_one:
            return ExpSumValue(False, 1, None, False, (m + g) // 2)
        return ExpSumValue(False, -1, None, False, m // 2)
    if power == 1:
        return ExpSumValue(False, -1, None, False, (m + g) // 2)
    return ExpSumValue(False, 1, None, False, m // 2)


# ---------------------------------------------------------------------------
# sums over scalar multiples


def R_from_S(s: ExpSumValue, p: int) -> int:
    if s.phase:
        raise ValueError("value carries a phase; use Rprime_from_Sprime")
    if s.zero or s.surd:
        return 0
    return s.epsilon * (p - 1) * p**s.exponent


def Rprime_from_Sprime(s: ExpSumValue, b: int, p: int) -> int:
    """sum_{a=1}^{p-1} zeta^{ab} sigma_a(S') for S' = eps zeta^c g^surd p^e."""
    if s.zero:
        return 0
    c = ((s.phase or 0) + b) % p
    if not s.surd:
        return s.epsilon * ((p - 1) if c == 0 else -1) * p**s.exponent
    if c == 0:
        return 0
    return s.epsilon * legendre(-c, p) * p ** (s.exponent + 1)


def reachable_phases(H, p: int) -> set[int]:
    """Phases c = A B^T / 2 attained by the solvable shifts A of H."""
    r, _ = rank_and_disc(H, p)
    if r == 0:
        return {0}
    if r >= 2:
        return set(range(p))
    H = np.asarray(H, dtype=np.int64) % p
    h = _rank_one_entry(H, p)
    return {(-b * b * h) % p for b in range(p)}


def _rank_one_entry(H: np.ndarray, p: int) -> int:
    """The nonzero entry a_1 of a diagonalization of a rank-one H."""
    d = np.diag(H)
    nz = np.nonzero(d)[0]
    # a rank-one symmetric matrix is h v^T v, so some diagonal entry is nonzero
    return int(d[nz[0]])


def phase_values(r: int, eta: int, p: int) -> set[int]:
    """Reachable phases from rank/discriminant data alone."""
    if r == 0:
        return {0}
    if r >= 2:
        return set(range(p))
    # rank one: class of h is eta
    return {(-b * b * h) % p for b in range(p) for h in range(1, p) if legendre(h, p) == eta}
