"""Cyclic subcodes of GRM(2, m)* named by sets of primitive idempotents.

Codeword coordinates are indexed by i = 0..n-1 (the point pi^i).  A subcode
with label set S has codewords

    c_i = b + Tr(gamma pi^i) + sum_j Tr(alpha_j pi^{i (1 + p^j)})

with the terms of absent labels dropped.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping

import numpy as np

from .cyclotomic import T0, T1, Label, format_labels, grm2_labels, label_dimension
from .field import FieldCtx, build_field, independent_rows, is_odd_prime, p_weight, rank_mod_p

DEFAULT_ENUM_BUDGET = 2**28


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured size cap."""


@dataclass(frozen=True)
class CodeSpec:
    p: int
    m: int
    labels: frozenset

    def __post_init__(self):
        labels = frozenset(self.labels)
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if not labels:
            raise ValueError("a code needs at least one label")
        for lab in labels:
            lab.check(self.m)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, p: int, m: int, labels: Iterable[Label]) -> "CodeSpec":
        return cls(p, m, frozenset(labels))

    @classmethod
    def full(cls, p: int, m: int) -> "CodeSpec":
        return cls(p, m, frozenset(grm2_labels(m)))

    @property
    def n(self) -> int:
        return self.p**self.m - 1

    @property
    def dimension(self) -> int:
        return sum(label_dimension(lab, self.p, self.m) for lab in self.labels)

    @property
    def quadratic_labels(self) -> frozenset:
        return frozenset(lab for lab in self.labels if lab.is_quadratic)

    @property
    def has_constant(self) -> bool:
        return T0 in self.labels

    @property
    def has_linear(self) -> bool:
        return T1 in self.labels

    @property
    def token(self) -> str:
        return format_labels(self.labels)

    def sorted_labels(self) -> list[Label]:
        return sorted(self.labels)


@dataclass
class MessageParams:
    """Message coordinates: the constant b, the linear coefficient gamma and
    one field coefficient per quadratic label index."""

    b: int = 0
    gamma: int = 0
    alphas: dict = field(default_factory=dict)


@dataclass(frozen=True)
class WeightDistribution:
    counts: Mapping[int, int]
    n: int

    def __post_init__(self):
        clean = {int(w): int(c) for w, c in sorted(self.counts.items()) if c}
        for w, c in clean.items():
            if not 0 <= w <= self.n or c < 0:
                raise ValueError(f"bad entry weight={w} count={c} for length {self.n}")
        object.__setattr__(self, "counts", clean)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def min_distance(self) -> int:
        nz = [w for w in self.counts if w > 0]
        if not nz:
            raise ValueError("zero code has no minimum distance")
        return min(nz)

    @property
    def nonzero_weights(self) -> list[int]:
        return [w for w in self.counts if w > 0]

    def __getitem__(self, w: int) -> int:
        return self.counts.get(w, 0)

    def __eq__(self, other):
        if not isinstance(other, WeightDistribution):
            return NotImplemented
        return self.n == other.n and dict(self.counts) == dict(other.counts)

    def __hash__(self):
        return hash((self.n, tuple(self.counts.items())))

    def merged(self, other: "WeightDistribution") -> "WeightDistribution":
        acc = Counter(self.counts)
        acc.update(other.counts)
        return WeightDistribution(dict(acc), self.n)


# ---------------------------------------------------------------------------
# formulas for GRM(mu, m)


def grm_dimension(mu: int, m: int, p: int) -> int:
    if not 0 <= mu <= m * (p - 1):
        raise ValueError(f"order {mu} outside 0..{m * (p - 1)}")
    total = 0
    for i in range(mu + 1):
        for k in range(m + 1):
            low = i - k * p
            if low < 0:
                break
            total += (-1) ** k * comb(m, k) * comb(low + m - 1, low)
    return total


def grm_star_min_weight(mu: int, m: int, p: int) -> int:
    if not 0 <= mu < m * (p - 1):
        raise ValueError(f"need 0 <= mu < m(p-1), got mu={mu}")
    r, s = divmod(mu, p - 1)
    return (p - s) * p ** (m - r - 1) - 1


def grm_star_zero_test(u: int, mu: int, m: int, p: int) -> bool:
    """True iff pi^u is a root of the generator polynomial of GRM(mu, m)*."""
    if not 0 <= u <= p**m - 2:
        raise ValueError("u outside 0..p^m-2")
    w = p_weight(u, p)
    return 0 < w <= m * (p - 1) - 1 - mu


# ---------------------------------------------------------------------------
# codewords


def label_row(ctx: FieldCtx, label: Label, alpha: int) -> np.ndarray:
    """Codeword of the irreducible subcode of ``label`` for coefficient alpha
    (an F_p scalar for T0, a field element otherwise)."""
    n = ctx.n
    if label.kind == 0:
        return np.full(n, alpha % ctx.p, dtype=np.int64)
    if alpha == 0:
        return np.zeros(n, dtype=np.int64)
    s = label.exponent(ctx.p)
    la = int(ctx.log[alpha])
    i = np.arange(n, dtype=np.int64)
    return ctx.trace_log[(la + i * s) % n].astype(np.int64)


def eval_codeword(ctx: FieldCtx, spec: CodeSpec, params: MessageParams) -> np.ndarray:
    labels = spec.labels
    if params.b % ctx.p and T0 not in labels:
        raise ValueError("constant term given but T0 is not in the code")
    if params.gamma and T1 not in labels:
        raise ValueError("linear term given but T1 is not in the code")
    for i, a in params.alphas.items():
        if a and Label(2, i) not in labels:
            raise ValueError(f"coefficient for L{i} given but L{i} is not in the code")
    c = np.zeros(ctx.n, dtype=np.int64)
    if T0 in labels:
        c += params.b % ctx.p
    if T1 in labels:
        c += label_row(ctx, T1, params.gamma)
    for i, a in params.alphas.items():
        c += label_row(ctx, Label(2, i), a)
    return c % ctx.p


def label_basis(ctx: FieldCtx, label: Label) -> np.ndarray:
    """Independent generator rows of the irreducible subcode of a label."""
    if label.kind == 0:
        return np.ones((1, ctx.n), dtype=np.int64)
    rows = np.stack([label_row(ctx, label, b) for b in ctx.basis])
    keep = independent_rows(rows, ctx.p)
    return rows[keep]


def generator_matrix(ctx: FieldCtx, spec: CodeSpec) -> np.ndarray:
    G = np.vstack([label_basis(ctx, lab) for lab in spec.sorted_labels()])
    assert G.shape[0] == spec.dimension, (G.shape, spec.dimension)
    return G


def _digits(idx: np.ndarray, p: int, k: int) -> np.ndarray:
    out = np.empty((len(idx), k), dtype=np.int64)
    x = idx.copy()
    for j in range(k):
        x, out[:, j] = np.divmod(x, p)
    return out


def enumerate_codewords(G: np.ndarray, p: int, chunk: int = 1 << 14):
    """Yield blocks of all p^k codewords spanned by the rows of G."""
    k = G.shape[0]
    total = p**k
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        yield (_digits(idx, p, k) @ G) % p


def naive_weight_distribution(ctx: FieldCtx, spec: CodeSpec, budget: int = 2**22) -> WeightDistribution:
    """Weight distribution by listing every codeword explicitly."""
    G = generator_matrix(ctx, spec)
    if ctx.p ** G.shape[0] > budget:
        raise BudgetExceeded(f"{ctx.p}^{G.shape[0]} codewords exceed the naive budget {budget}")
    acc = np.zeros(ctx.n + 1, dtype=np.int64)
    for block in enumerate_codewords(G, ctx.p):
        acc += np.bincount(np.count_nonzero(block, axis=1), minlength=ctx.n + 1)
    return WeightDistribution({w: int(c) for w, c in enumerate(acc) if c}, ctx.n)


def _affine_rows(ctx: FieldCtx, spec: CodeSpec) -> np.ndarray:
    """All codewords of the T0 + T1 part of the code (just 0 if absent)."""
    parts = [lab for lab in (T0, T1) if lab in spec.labels]
    if not parts:
        return np.zeros((1, ctx.n), dtype=np.int64)
    G = np.vstack([label_basis(ctx, lab) for lab in parts])
    return np.vstack(list(enumerate_codewords(G, ctx.p)))


def brute_weight_distribution(ctx: FieldCtx, spec: CodeSpec, budget: int = DEFAULT_ENUM_BUDGET,
                              chunk: int = 2048) -> WeightDistribution:
    """Exhaustive weight distribution over every distinct codeword.

    Codewords are taken as v + a with v running over the span of the
    quadratic labels' generator rows and a over the T0/T1 part.  For every
    v the zero-coordinate counts of all v + a are obtained at once from a
    0/1 matrix product: Z[a, v] = #{i : v_i = -a_i}.
    """
    p, n = ctx.p, ctx.n
    k = spec.dimension
    if p**k > budget:
        raise BudgetExceeded(f"{p}^{k} codewords exceed the enumeration budget {budget}")
    quad = [lab for lab in spec.sorted_labels() if lab.is_quadratic]
    Gq = (np.vstack([label_basis(ctx, lab) for lab in quad])
          if quad else np.zeros((0, n), dtype=np.int64))
    aff = _affine_rows(ctx, spec)
    # onehot of -a: M[a, (i, c)] = [c == -a_i]
    neg = (-aff) % p
    M = np.zeros((aff.shape[0], n * p), dtype=np.float32)
    cols = np.arange(n) * p
    for r in range(aff.shape[0]):
        M[r, cols + neg[r]] = 1.0
    acc = np.zeros(n + 1, dtype=np.int64)
    block_iter = enumerate_codewords(Gq, p, chunk) if quad else [np.zeros((1, n), dtype=np.int64)]
    eye = np.eye(p, dtype=np.float32)
    for V in block_iter:
        onehot = eye[V].reshape(V.shape[0], n * p)
        Z = M @ onehot.T
        weights = n - np.rint(Z).astype(np.int64)
        acc += np.bincount(weights.ravel(), minlength=n + 1)
    dist = WeightDistribution({w: int(c) for w, c in enumerate(acc) if c}, n)
    if dist.total != p**k:
        raise AssertionError("enumeration lost codewords")
    return dist


def brute_min_distance(ctx: FieldCtx, spec: CodeSpec, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    return brute_weight_distribution(ctx, spec, budget).min_distance


def parameter_weight_distribution(ctx: FieldCtx, label: Label, chunk: int = 512) -> WeightDistribution:
    """Distribution of a single-label code by running its coefficient over all
    of F_q and discarding repeated codewords by hashing.

    This is the direct route for labels whose parameter map is not
    injective (theta_{l_{m/2}}^* has a p^{m/2}-element kernel).
    """
    n, p = ctx.n, ctx.p
    seen = {}
    i = np.arange(n, dtype=np.int64)
    s = label.exponent(p)
    values = range(p) if label.kind == 0 else range(ctx.q)
    values = list(values)
    for start in range(0, len(values), chunk):
        part = values[start:start + chunk]
        if label.kind == 0:
            block = np.repeat(np.array(part, dtype=np.int64)[:, None], n, axis=1)
        else:
            logs = np.array([ctx.log[a] if a else -1 for a in part], dtype=np.int64)
            block = ctx.trace_log[(logs[:, None] + i[None, :] * s) % n].astype(np.int8)
            block[logs < 0] = 0
        for row in block.astype(np.int8):
            key = hashlib.blake2b(row.tobytes(), digest_size=16).digest()
            if key not in seen:
                seen[key] = int(np.count_nonzero(row))
    return WeightDistribution(Counter(seen.values()), n)


def kernel_order(ctx: FieldCtx, label: Label) -> int:
    """Size of the set of coefficients giving the zero codeword."""
    if label.kind == 0:
        return 1
    rows = np.stack([label_row(ctx, label, b) for b in ctx.basis])
    return ctx.p ** (ctx.m - rank_mod_p(rows, ctx.p))


def field_for(spec: CodeSpec) -> FieldCtx:
    return build_field(spec.p, spec.m)
