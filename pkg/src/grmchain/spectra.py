"""Weight distributions from rank classification of quadratic forms, closed
forms for single-label and paired codes, MacWilliams/Pless validators and
Singleton-type bounds.

Every codeword is b + Tr(gamma x) + Q(x) on x in F_q^*, with Q in the
F_p-span of the quadratic labels' forms.  Distinct codewords correspond to
distinct triples (b, A, H), so the distribution only depends on how many
forms fall into each (rank, discriminant class).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from math import comb, gcd
from typing import Mapping

import numpy as np
import sympy

from .code import BudgetExceeded, CodeSpec, WeightDistribution, generator_matrix
from .cyclotomic import T0, T1, Label
from .field import FieldCtx, build_field, independent_rows, inv_mod, legendre, nu2
from .quadforms import (ExpSumValue, Rprime_from_Sprime, gauss_value, phase_values,
                        rank_and_disc_batch, symmetric_matrix)

DEFAULT_FAST_BUDGET = 2**27


# ---------------------------------------------------------------------------
# rank classification


@dataclass(frozen=True)
class RankClassTally:
    """Number of distinct forms in the span for each (rank, eta(Delta))."""

    m: int
    p: int
    counts: Mapping[tuple, int]
    form_dim: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def classes(self):
        """Yield (r, epsilon, surd, count) with the sum value's normal form."""
        for (r, eta), cnt in sorted(self.counts.items()):
            v = gauss_value(r, eta, self.m, self.p)
            yield r, v.epsilon, v.surd, cnt


def form_space_basis(ctx: FieldCtx, labels) -> np.ndarray:
    """Independent symmetric matrices spanning the forms of the given
    quadratic labels, shape (D, m, m)."""
    mats = []
    for lab in sorted(labels):
        if not lab.is_quadratic:
            continue
        for beta in ctx.basis:
            mats.append(symmetric_matrix(ctx, {lab.index: beta}))
    if not mats:
        return np.zeros((0, ctx.m, ctx.m), dtype=np.int64)
    flat = np.stack(mats).reshape(len(mats), -1)
    keep = independent_rows(flat, ctx.p)
    return np.stack(mats)[keep]


def _digits(idx: np.ndarray, p: int, k: int) -> np.ndarray:
    out = np.empty((len(idx), k), dtype=np.int64)
    x = idx.copy()
    for j in range(k):
        x, out[:, j] = np.divmod(x, p)
    return out


def rank_tally(ctx: FieldCtx, labels, budget: int = DEFAULT_FAST_BUDGET,
               projective: bool = True, chunk: int = 1 << 16, workers: int = 1) -> RankClassTally:
    """Tally (rank, eta(Delta)) over every form in the span of the labels.

    With ``projective`` only forms whose last nonzero coordinate is 1 are
    classified; a multiple a*Q keeps the rank and multiplies eta by
    eta(a)^r, so the p-1 multiples are added analytically.  Chunks are
    independent, so ``workers`` > 1 classifies them on a thread pool and
    the merged tally does not depend on the schedule.
    """
    p, m = ctx.p, ctx.m
    basis = form_space_basis(ctx, labels)
    D = basis.shape[0]
    if p**D > budget:
        raise BudgetExceeded(f"{p}^{D} quadratic forms exceed the fast-path budget {budget}")
    counts: Counter = Counter({(0, 1): 1})
    if D == 0:
        return RankClassTally(m, p, dict(counts), 0)
    flat = basis.reshape(D, -1)
    half = (p - 1) // 2

    def coeffs(task):
        k, s, e = task
        idx = np.arange(s, e, dtype=np.int64)
        if not projective:
            return _digits(idx, p, D)
        # leading coordinate k equal to 1, coordinates above k zero
        C = np.zeros((len(idx), D), dtype=np.int64)
        if k:
            C[:, :k] = _digits(idx, p, k)
        C[:, k] = 1
        return C

    def run(task):
        C = coeffs(task)
        Hs = ((C @ flat) % p).reshape(len(C), m, m)
        r, eta = rank_and_disc_batch(Hs, p)
        out: Counter = Counter()
        for (rr, ee), c in Counter(zip(r.tolist(), eta.tolist())).items():
            if not projective:
                out[(rr, ee)] += c
            elif rr % 2 == 0:
                out[(rr, ee)] += (p - 1) * c
            else:
                out[(rr, ee)] += half * c
                out[(rr, -ee)] += half * c
        return out

    if projective:
        tasks = [(k, s, min(p**k, s + chunk)) for k in range(D) for s in range(0, p**k, chunk)]
    else:
        tasks = [(None, s, min(p**D, s + chunk)) for s in range(1, p**D, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, tasks))
    else:
        parts = map(run, tasks)
    for part in parts:
        counts.update(part)
    tally = RankClassTally(m, p, {k: v for k, v in counts.items() if v}, D)
    if tally.total != p**D:
        raise AssertionError("rank tally lost forms")
    return tally


# ---------------------------------------------------------------------------
# point counts of nondegenerate quadrics


def quadric_count(r: int, eta: int, c: int, p: int) -> int:
    """#{Y in F_p^r : Q(Y) = c} for a nondegenerate Q of rank r whose
    discriminant has Legendre symbol eta."""
    c %= p
    if r == 0:
        return 1 if c == 0 else 0
    if r % 2:
        h = (r - 1) // 2
        return p ** (r - 1) + p**h * eta * legendre((-1) ** h * c, p)
    v = p - 1 if c == 0 else -1
    return p ** (r - 1) + v * p ** ((r - 2) // 2) * eta * legendre(-1, p) ** (r // 2)


def quadric_count_direct(diag, c: int, p: int) -> int:
    """Exhaustive count of #{Y : sum d_k y_k^2 = c} used to validate
    ``quadric_count``."""
    r = len(diag)
    if r == 0:
        return 1 if c % p == 0 else 0
    sq = np.arange(p) ** 2 % p
    vals = np.zeros(1, dtype=np.int64)
    for d in diag:
        vals = (vals[:, None] + (d * sq)[None, :]).ravel() % p
    return int(np.count_nonzero(vals == c % p))


# ---------------------------------------------------------------------------
# fast distributions


def _spec_field(spec: CodeSpec) -> FieldCtx:
    return build_field(spec.p, spec.m)


def distribution_from_tally(tally: RankClassTally, p: int, m: int, has_constant: bool,
                            has_linear: bool) -> WeightDistribution:
    """Exact distribution from the (rank, eta) class counts.

    For b + A.X + Q(X) the zero count on F_p^m is p^{m-1} when A is outside
    the row space of H, and p^{m-r} N_r(Q(B) - b) when A = 2BH; as A runs
    over the row space, Q(B) takes the value k exactly N_r(k) times.  The
    weight on F_q^* is q - 1 + [b = 0] - zeros.
    """
    q = p**m
    n = q - 1
    acc: Counter = Counter()
    bs = range(p) if has_constant else [0]
    for (r, eta), cnt in tally.counts.items():
        N = [quadric_count(r, eta, k, p) for k in range(p)]
        for b in bs:
            base = n + (1 if b == 0 else 0)
            if has_linear:
                if q > p**r:
                    acc[base - p ** (m - 1)] += cnt * (q - p**r)
                for k in range(p):
                    if N[k]:
                        acc[base - p ** (m - r) * N[(k - b) % p]] += cnt * N[k]
            else:
                acc[base - p ** (m - r) * N[(-b) % p]] += cnt
    return WeightDistribution(dict(acc), n)


@lru_cache(maxsize=256)
def cached_tally(p: int, m: int, quad_labels: frozenset, budget: int = DEFAULT_FAST_BUDGET) -> RankClassTally:
    """rank_tally shared by every code with the same quadratic labels."""
    return rank_tally(build_field(p, m), quad_labels, budget)


def fast_weight_distribution(spec: CodeSpec, budget: int = DEFAULT_FAST_BUDGET,
                             projective: bool = True) -> WeightDistribution:
    if projective:
        tally = cached_tally(spec.p, spec.m, spec.quadratic_labels, budget)
    else:
        tally = rank_tally(_spec_field(spec), spec.quadratic_labels, budget, projective=False)
    dist = distribution_from_tally(tally, spec.p, spec.m, spec.has_constant, spec.has_linear)
    if dist.total != spec.p**spec.dimension:
        raise AssertionError(f"distribution total {dist.total} != p^{spec.dimension}")
    return dist


def candidate_weights(tally: RankClassTally, p: int, m: int, has_constant: bool,
                      has_linear: bool) -> set[int]:
    """Nonzero weights reachable per class through the phase rules for
    sum_a zeta^{ab} S'(a .), without point counts."""
    X = p ** (m - 1) * (p - 1)
    out = set()
    bs = range(p) if has_constant else [0]
    for (r, eta), cnt in tally.counts.items():
        base = gauss_value(r, eta, m, p)
        options = []
        if has_linear:
            options += [(base.with_phase(c, p), c) for c in phase_values(r, eta, p)]
            if r < m:
                options.append((ExpSumValue.Zero(), None))
        else:
            options.append((base.with_phase(0, p), 0))
        for s, c in options:
            for b in bs:
                if r == 0 and c == 0 and b == 0:
                    continue  # the zero codeword
                shift = (0 if b == 0 else -1) if has_constant else 0
                Rp = Rprime_from_Sprime(s, b, p)
                w = X + shift - Fraction(Rp, p)
                out.add(int(w))
    return out


def fast_min_distance(spec: CodeSpec, budget: int = DEFAULT_FAST_BUDGET) -> int:
    tally = cached_tally(spec.p, spec.m, spec.quadratic_labels, budget)
    cands = candidate_weights(tally, spec.p, spec.m, spec.has_constant, spec.has_linear)
    return min(cands)


# ---------------------------------------------------------------------------
# closed forms


class HypothesisError(ValueError):
    """The requested closed form does not apply to these parameters."""


def double_factorial_m(t_prime: int, s0: int) -> int:
    prod = 1
    for k in range(1, 2 * t_prime, 2):
        prod *= k
    return prod * 2**s0


def lemma15_indices(t_prime: int, s0: int) -> list[int]:
    return [k * 2 ** (s0 - 1) for k in range(1, 2 * t_prime, 2)]


def _check_double_factorial(m: int):
    """Return (t', s0) when m = 1*3*...*(2t'-1)*2^{s0} with t' >= 3, s0 >= 2."""
    if m < 2 or m % 2:
        raise HypothesisError("m must be even")
    s0 = nu2(m)
    odd = m >> s0
    prod, k = 1, 1
    while prod < odd:
        k += 2
        prod *= k
    if prod != odd or s0 < 2:
        raise HypothesisError(f"m = {m} is not of double-factorial shape")
    t_prime = (k + 1) // 2
    if t_prime < 3:
        raise HypothesisError("need t' >= 3")
    return t_prime, s0


def lemma15_pairs(p: int, m: int, i: int):
    """The two (weight, count) pairs given for the single-label code L_i on
    the double-factorial family, as exact rationals and without any
    hypothesis check."""
    X = Fraction(p ** (m - 1) * (p - 1))
    n = p**m - 1
    w1 = X + Fraction(p - 1, p) * p ** (m // 2)
    w2 = X - Fraction(p - 1, p) * p ** (m // 2 + i)
    c1 = Fraction(p**i, p**i + 1) * n
    c2 = Fraction(1, p**i + 1) * n
    return [(w1, c1), (w2, c2)]


def closed_form_distribution(labels, p: int, m: int) -> WeightDistribution:
    labels = frozenset(labels)
    X = p ** (m - 1) * (p - 1)
    q = p**m
    n = q - 1
    quad = sorted(lab for lab in labels if lab.is_quadratic)
    if labels == {T1}:
        return WeightDistribution({0: 1, X: n}, n)
    if len(labels) == 1 and len(quad) == 1:
        i = quad[0].index
        if m % 2:
            t = (m - 1) // 2
            if t < 2 or i > t:
                raise HypothesisError("odd-m single label needs t >= 2, i <= t")
            return WeightDistribution({0: 1, X: n}, n)
        t = (m - 2) // 2
        if t < 1:
            raise HypothesisError("need m >= 4")
        if i == t + 1:
            return WeightDistribution({0: 1, X + (p - 1) * p ** (m // 2 - 1): p ** (m // 2) - 1}, n)
        if i == 0:
            d = (p - 1) * p ** (m // 2 - 1)
            return WeightDistribution({0: 1, X + d: n // 2, X - d: n // 2}, n)
        t_prime, s0 = _check_double_factorial(m)
        if i not in lemma15_indices(t_prime, s0):
            raise HypothesisError(f"index {i} is not an odd multiple of 2^{s0 - 1} below {2 * t_prime}")
        pairs = lemma15_pairs(p, m, i)
        out = {0: 1}
        for w, c in pairs:
            if w.denominator != 1 or c.denominator != 1:
                raise HypothesisError("non-integral weight or count")
            out[int(w)] = out.get(int(w), 0) + int(c)
        return WeightDistribution(out, n)
    if T1 in labels and len(labels) == 2 and len(quad) == 1 and m % 2:
        t = (m - 1) // 2
        i = quad[0].index
        if t < 2 or i > t:
            raise HypothesisError("paired code needs m = 2t+1, t >= 2, 0 <= i <= t")
        pt = p**t
        return WeightDistribution({
            0: 1,
            X - pt: (p - 1) * n * (p ** (m - 1) + pt) // 2,
            X + pt: (p - 1) * n * (p ** (m - 1) - pt) // 2,
            X: n * (p ** (m - 1) + 1),
        }, n)
    raise HypothesisError(f"no closed form for labels {sorted(labels)} at p={p}, m={m}")


def single_label_weight_forms(p: int, m: int, i: int) -> set[int]:
    """Admissible nonzero weights X +/- (p-1) p^{m/2+u-1} for L_i, m even,
    with u in {0, gcd(2i, m)/2}."""
    if m % 2:
        raise HypothesisError("weight forms are stated for even m")
    t = (m - 2) // 2
    if not 0 <= i <= t:
        raise HypothesisError("need 0 <= i <= t")
    X = p ** (m - 1) * (p - 1)
    out = set()
    for u in {0, gcd(2 * i, m) // 2}:
        d = (p - 1) * p ** (m // 2 + u - 1)
        out |= {X + d, X - d}
    return out


# ---------------------------------------------------------------------------
# MacWilliams and Pless


def krawtchouk_column(n: int, p: int, x: int) -> list[int]:
    """K_j(x) for j = 0..n by the three-term recurrence."""
    K = [1, (p - 1) * n - p * x]
    for j in range(1, n):
        nxt = ((p - 1) * (n - j) + j - p * x) * K[j] - (p - 1) * (n - j + 1) * K[j - 1]
        assert nxt % (j + 1) == 0
        K.append(nxt // (j + 1))
    return K[: n + 1]


def macwilliams_transform(dist: WeightDistribution, n: int, k: int, p: int) -> WeightDistribution:
    """Distribution of the dual code of a length-n, dimension-k code."""
    if dist.total != p**k:
        raise ValueError(f"distribution total {dist.total} != p^{k}")
    acc = [0] * (n + 1)
    for w, c in dist.counts.items():
        col = krawtchouk_column(n, p, w)
        for j in range(n + 1):
            acc[j] += c * col[j]
    out = {}
    for j, v in enumerate(acc):
        if v % p**k:
            raise ArithmeticError("dual count not integral; input is not a linear code")
        if v:
            out[j] = v // p**k
    return WeightDistribution(out, n)


def dual_low_weight_counts(G: np.ndarray, p: int) -> tuple[int, int]:
    """(A'_1, A'_2) of the dual from the generator columns: weight-one dual
    words come from zero columns and weight-two words from columns that are
    both zero or proportional."""
    G = np.asarray(G, dtype=np.int64) % p
    cols = G.T
    zero = [i for i in range(cols.shape[0]) if not cols[i].any()]
    z = len(zero)
    groups: Counter = Counter()
    for col in cols:
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        norm = (col * inv_mod(int(col[nz[0]]), p)) % p
        groups[norm.tobytes()] += 1
    a1 = (p - 1) * z
    a2 = (p - 1) ** 2 * comb(z, 2) + (p - 1) * sum(comb(g, 2) for g in groups.values())
    return a1, a2


@dataclass
class MomentReport:
    first_lhs: int
    first_rhs: int
    second_lhs: int | None = None
    second_rhs: int | None = None

    @property
    def first_ok(self) -> bool:
        return self.first_lhs == self.first_rhs

    @property
    def second_ok(self) -> bool | None:
        if self.second_lhs is None:
            return None
        return self.second_lhs == self.second_rhs

    @property
    def ok(self) -> bool:
        return self.first_ok and self.second_ok is not False

    @property
    def residuals(self) -> tuple:
        r2 = None if self.second_lhs is None else self.second_lhs - self.second_rhs
        return self.first_lhs - self.first_rhs, r2


def pless_moment_checks(dist, n: int, k: int, p: int, A1_dual: int = 0,
                        A2_dual: int | None = 0) -> MomentReport:
    """First and second Pless power moments in exact integers.

    sum i A_i = p^{k-1}((p-1)n - A'_1) and
    sum i^2 A_i = p^{k-2}(n(n-1)(p-1)^2 - 2(n-1)(p-1)A'_1 + 2A'_2) + sum i A_i.
    ``dist`` is a WeightDistribution or an iterable of (weight, count) with
    possibly rational entries.  The second moment is skipped when A'_2 is None.
    """
    items = dist.counts.items() if isinstance(dist, WeightDistribution) else list(dist)
    s1 = sum(Fraction(w) * c for w, c in items)
    rhs1 = Fraction(p ** k * ((p - 1) * n - A1_dual), p)
    rep = MomentReport(s1, rhs1)
    if A2_dual is not None:
        s2 = sum(Fraction(w) ** 2 * c for w, c in items)
        rhs2 = Fraction(p**k, p**2) * (n * (n - 1) * (p - 1) ** 2 - 2 * (n - 1) * (p - 1) * A1_dual
                                       + 2 * A2_dual) + rhs1
        rep.second_lhs, rep.second_rhs = s2, rhs2
    return rep


def moment_report_for(ctx: FieldCtx, spec: CodeSpec, dist: WeightDistribution) -> MomentReport:
    G = generator_matrix(ctx, spec)
    a1, a2 = dual_low_weight_counts(G, spec.p)
    return pless_moment_checks(dist, spec.n, spec.dimension, spec.p, a1, a2)


# ---------------------------------------------------------------------------
# Singleton-type bounds on sets of matrices


@dataclass(frozen=True)
class BoundPair:
    skew_bound: int
    sym_bound: int
    skew_exact: bool = True
    sym_exact: bool = True


def _power_floor(p: int, num: int, den: int) -> tuple[int, bool]:
    """floor(p^{num/den}) and whether it is exact."""
    g = gcd(num, den)
    num, den = num // g, den // g
    root, exact = sympy.integer_nthroot(p**num, den)
    return int(root), bool(exact)


def singleton_bounds(m: int, d: int, p: int) -> BoundPair:
    """c^{n-d+1} with c = p^{m(m-1)/2n}, n = floor(m/2) for skew-symmetric
    sets and c = p^{m(m+1)/2n}, n = floor((m+1)/2) for symmetric sets."""
    n_skew = m // 2
    n_sym = (m + 1) // 2
    if not 1 <= d <= n_sym:
        raise ValueError(f"d must lie in 1..{n_sym}")
    if d <= n_skew:
        skew, se = _power_floor(p, m * (m - 1) * (n_skew - d + 1), 2 * n_skew)
    else:
        skew, se = 1, True  # no skew (m, d)-set beyond its class count but a single matrix
    sym, ye = _power_floor(p, m * (m + 1) * (n_sym - d + 1), 2 * n_sym)
    return BoundPair(skew, sym, se, ye)


def low_rank_count_check(m: int, d: int) -> bool:
    """p^{(m+1)(d-2)} < p^{(d-1)m} compared through exponents."""
    return (m + 1) * (d - 2) < (d - 1) * m
