"""Cyclotomic cosets, idempotent labels and chain-counting combinatorics."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Mapping

import sympy

from .field import p_weight


@dataclass(frozen=True, order=True)
class Label:
    """A primitive idempotent of GRM(2, m)*.

    ``kind`` is 0 for theta_0, 1 for theta_1^* and 2 for theta_{l_i}^* with
    ``index = i`` (exponent l_i = 1 + p^i).  The dataclass ordering gives
    T0 < T1 < L0 < L1 < ...
    """

    kind: int
    index: int = 0

    def __post_init__(self):
        if self.kind not in (0, 1, 2):
            raise ValueError(f"bad label kind {self.kind}")
        if self.kind != 2 and self.index != 0:
            raise ValueError("only L labels carry an index")
        if self.index < 0:
            raise ValueError("label index must be >= 0")

    @property
    def is_quadratic(self) -> bool:
        return self.kind == 2

    def exponent(self, p: int) -> int:
        """The exponent s with codeword entries Tr(alpha pi^{i s})."""
        if self.kind == 0:
            return 0
        if self.kind == 1:
            return 1
        return 1 + p**self.index

    @property
    def token(self) -> str:
        if self.kind == 0:
            return "T0"
        if self.kind == 1:
            return "T1"
        return f"L{self.index}"

    def __str__(self) -> str:
        return self.token

    def __repr__(self) -> str:
        return self.token

    def check(self, m: int) -> "Label":
        if self.kind == 2 and self.index > m // 2:
            raise ValueError(f"{self.token} is not a label of GRM(2,{m})* (index > {m // 2})")
        return self


T0 = Label(0)
T1 = Label(1)


def L(i: int) -> Label:
    return Label(2, i)


_TOKEN = re.compile(r"^(T0|T1|L(\d+))$")


def parse_label(token: str) -> Label:
    tok = token.strip().upper()
    mt = _TOKEN.match(tok)
    if not mt:
        raise ValueError(f"cannot parse label {token!r}; expected T0, T1 or Lk")
    if mt.group(1) == "T0":
        return T0
    if mt.group(1) == "T1":
        return T1
    return L(int(mt.group(2)))


def parse_labels(text: str | Iterable[str]) -> frozenset[Label]:
    if isinstance(text, str):
        parts = [t for t in text.split(",") if t.strip()]
    else:
        parts = list(text)
    labels = frozenset(parse_label(t) if isinstance(t, str) else t for t in parts)
    if not labels:
        raise ValueError("empty label set")
    return labels


def format_labels(labels: Iterable[Label]) -> str:
    return ",".join(lab.token for lab in sorted(labels))


def grm2_labels(m: int) -> tuple[Label, ...]:
    """All primitive idempotents in the idempotent of GRM(2, m)*."""
    return (T0, T1) + tuple(L(i) for i in range(m // 2 + 1))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CyclotomicCoset:
    rep: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def coset(p: int, m: int, s: int) -> CyclotomicCoset:
    n = p**m - 1
    if not 0 <= s < n:
        raise ValueError(f"exponent {s} outside 0..{n - 1}")
    members = [s]
    x = (s * p) % n
    while x != s:
        members.append(x)
        x = (x * p) % n
    members.sort()
    return CyclotomicCoset(members[0], tuple(members))


def all_cosets(p: int, m: int) -> list[CyclotomicCoset]:
    n = p**m - 1
    seen = bytearray(n)
    out = []
    for s in range(n):
        if not seen[s]:
            c = coset(p, m, s)
            for x in c.members:
                seen[x] = 1
            out.append(c)
    return out


def label_dimension(label: Label, p: int, m: int) -> int:
    """Dimension of the irreducible cyclic code of a label = its coset size."""
    label.check(m)
    s = label.exponent(p) % (p**m - 1)
    return coset(p, m, s).size


def spec_dimension(labels: Iterable[Label], p: int, m: int) -> int:
    return sum(label_dimension(lab, p, m) for lab in labels)


# ---------------------------------------------------------------------------
# chain counting


@dataclass(frozen=True)
class ChainStats:
    lam: int
    num_chains: int
    mu: int
    num_classes: int


def chain_stats_grm2(p: int, m: int) -> ChainStats:
    if m < 3:
        raise ValueError("GRM(2,m)* chain statistics need m >= 3")
    if m % 2 == 0:
        t = (m - 2) // 2
        lam = t + 4
        mu = factorial(t + 2)
    else:
        t = (m - 1) // 2
        lam = t + 3
        mu = factorial(t + 2)
    return ChainStats(lam, factorial(lam), mu, factorial(lam) // mu)


def coset_size_counts(n: int, q: int) -> dict[int, int]:
    """L(v): number of q-cyclotomic cosets mod n of each size v.

    Uses the divisor formula L(v) = sum over g | n with ord(q, n/g) = v of
    phi(n/g)/v, so nothing of size n is enumerated.
    """
    if n < 1 or sympy.gcd(n, q) != 1:
        raise ValueError("need n >= 1 and gcd(n, q) = 1")
    if n == 1:
        return {1: 1}
    m = int(sympy.n_order(q % n, n))
    mdivs = sorted(sympy.divisors(m))
    fac = sympy.factorint(n)
    primes = list(fac)
    counts: Counter = Counter()

    def rec(i, d, phi):
        if i == len(primes):
            # d = n/g runs over all divisors of n
            v = next(v for v in mdivs if pow(q, v, d) == 1 % d)
            counts[v] += phi
            return
        pr, e = primes[i], fac[primes[i]]
        rec(i + 1, d, phi)
        pk = 1
        for k in range(1, e + 1):
            pk *= pr
            rec(i + 1, d * pk, phi * (pk - pk // pr))

    rec(0, 1, 1)
    out = {}
    for v, total in counts.items():
        if total % v:
            raise ArithmeticError("coset count not integral")
        out[v] = total // v
    return dict(sorted(out.items()))


def chain_stats_general(n: int, q: int, zero_degree_counts: Mapping[int, int]) -> ChainStats:
    """Chain length and class counts of a cyclic code of length n over F_q.

    ``zero_degree_counts`` maps a degree v to J(v), the number of minimal
    polynomials of degree v dividing the generator polynomial.
    """
    Lv = coset_size_counts(n, q)
    free = {}
    for v, cnt in Lv.items():
        j = int(zero_degree_counts.get(v, 0))
        if j > cnt:
            raise ValueError(f"J({v}) = {j} exceeds L({v}) = {cnt}")
        free[v] = cnt - j
    extra = set(zero_degree_counts) - set(Lv)
    if any(zero_degree_counts[v] for v in extra):
        raise ValueError(f"degrees {sorted(extra)} have no cosets")
    lam = sum(free.values())
    mu = 1
    for c in free.values():
        mu *= factorial(c)
    return ChainStats(lam, factorial(lam), mu, factorial(lam) // mu)


def grm2_nonzero_exponents(p: int, m: int) -> list[int]:
    """Exponents u in 0..p^m-2 that are not zeros of GRM(2, m)*.

    The zeros are the u with 0 < w_p(u) <= m(p-1) - 3, so the nonzeros are
    u = 0 and the u whose p-ary digits sum to m(p-1)-1 or m(p-1)-2, that is
    u = n - p^i and u = n - p^i - p^j.
    """
    n = p**m - 1
    out = {0}
    for i in range(m):
        out.add(n - p**i)
        for j in range(i, m):
            out.add(n - p**i - p**j)
    top = m * (p - 1)
    for u in out:
        w = p_weight(u, p)
        assert u == 0 or w in (top - 1, top - 2)
    return sorted(out)


def grm2_zero_degree_counts(p: int, m: int) -> dict[int, int]:
    """J(v) for GRM(2, m)*: cosets of each size among the generator's zeros."""
    n = p**m - 1
    nonzero = Counter()
    seen = set()
    for u in grm2_nonzero_exponents(p, m):
        if u in seen:
            continue
        c = coset(p, m, u)
        seen.update(c.members)
        nonzero[c.size] += 1
    Lv = coset_size_counts(n, p)
    return {v: cnt - nonzero.get(v, 0) for v, cnt in Lv.items()}

