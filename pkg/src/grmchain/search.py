"""Optimum distance profiles of cyclic subcode chains in the inverse
dictionary order, bound-set families and certification.

Orientation: a chain is the accumulation order of labels.  Its profile is
indexed by tau: ``profile[u]`` is the distance of the code spanned by the
first lambda - u labels, so ``profile[-1]`` belongs to the first label and
``profile[0]`` to the whole code.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .code import BudgetExceeded, CodeSpec, brute_min_distance, field_for
from .cyclotomic import T0, T1, L, Label, grm2_labels, label_dimension
from .spectra import DEFAULT_FAST_BUDGET, double_factorial_m, fast_min_distance, lemma15_indices

DistanceFn = Callable[[frozenset], int]


def compare_inverse_dictionary(a: Sequence[int], b: Sequence[int]) -> int:
    """-1, 0 or 1 as a is smaller, equal or larger, scanning from the last
    index down."""
    if len(a) != len(b):
        raise ValueError("profiles must have equal length")
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return 1 if x > y else -1
    return 0


class DistanceOracle:
    """Memoized minimum distance keyed by the canonical label set."""

    def __init__(self, p: int, m: int, method: str = "fast", budget: int | None = None):
        if method not in ("fast", "brute"):
            raise ValueError("method must be 'fast' or 'brute'")
        self.p, self.m, self.method = p, m, method
        self.budget = budget
        self.memo: dict[frozenset, int] = {}
        self._lock = threading.Lock()

    def __call__(self, labels) -> int:
        key = frozenset(labels)
        with self._lock:
            if key in self.memo:
                return self.memo[key]
        spec = CodeSpec(self.p, self.m, key)
        if self.method == "fast":
            d = fast_min_distance(spec, self.budget or DEFAULT_FAST_BUDGET)
        else:
            kw = {} if self.budget is None else {"budget": self.budget}
            d = brute_min_distance(field_for(spec), spec, **kw)
        with self._lock:
            return self.memo.setdefault(key, d)


@dataclass
class SearchResult:
    profile: tuple
    chains: list
    step_tables: list = field(default_factory=list)
    complete: bool = True
    note: str = ""


def chain_profile(chain: Sequence[Label], distance_fn: DistanceFn) -> tuple:
    dists = [distance_fn(frozenset(chain[:k])) for k in range(1, len(chain) + 1)]
    return tuple(reversed(dists))


def chain_dimensions(chain: Sequence[Label], p: int, m: int) -> tuple:
    """Dimension profile in tau order (whole code first)."""
    dims, acc = [], 0
    for lab in chain:
        acc += label_dimension(lab, p, m)
        dims.append(acc)
    return tuple(reversed(dims))


def _increments(dim_profile: Sequence[int]) -> list[int]:
    seq = list(reversed(dim_profile))
    return [seq[0]] + [b - a for a, b in zip(seq, seq[1:])]


def greedy_search(labels: Sequence[Label], distance_fn: DistanceFn, p: int, m: int,
                  dim_profile: Sequence[int] | None = None) -> SearchResult:
    """Greedy accumulation with branching on ties.

    The distance of step k only depends on the set of the first k labels, so
    keeping every prefix set that attains the running maximum is exact for
    the inverse dictionary order.  ``step_tables`` lists, per step, the
    candidate sets that were evaluated with their distances.
    """
    labels = list(labels)
    lam = len(labels)
    need = _increments(dim_profile) if dim_profile is not None else None
    if need is not None and len(need) != lam:
        raise ValueError("dimension profile length differs from the chain length")
    frontier = {frozenset(): [()]}
    dists, tables = [], []
    try:
        for step in range(lam):
            cand: dict[frozenset, list] = {}
            for prefix, orders in frontier.items():
                for lab in labels:
                    if lab in prefix:
                        continue
                    if need is not None and label_dimension(lab, p, m) != need[step]:
                        continue
                    cand.setdefault(prefix | {lab}, []).extend(o + (lab,) for o in orders)
            if not cand:
                raise ValueError("dimension profile is not realizable")
            scored = {s: distance_fn(s) for s in cand}
            tables.append(scored)
            best = max(scored.values())
            dists.append(best)
            frontier = {s: cand[s] for s, d in scored.items() if d == best}
    except BudgetExceeded as exc:
        return SearchResult(tuple(reversed(dists)), [o for v in frontier.values() for o in v],
                            tables, False, f"stopped at step {len(dists) + 1}: {exc}")
    chains = sorted(o for v in frontier.values() for o in v)
    return SearchResult(tuple(reversed(dists)), chains, tables)


def exhaustive_search(labels: Sequence[Label], distance_fn: DistanceFn, p: int, m: int,
                      dim_profile: Sequence[int] | None = None) -> SearchResult:
    """Maximum profile over every permutation (memoized subset distances)."""
    best, chains = None, []
    for chain in itertools.permutations(sorted(labels)):
        if dim_profile is not None and chain_dimensions(chain, p, m) != tuple(dim_profile):
            continue
        prof = chain_profile(chain, distance_fn)
        c = 1 if best is None else compare_inverse_dictionary(prof, best)
        if c > 0:
            best, chains = prof, [chain]
        elif c == 0:
            chains.append(chain)
    if best is None:
        raise ValueError("dimension profile is not realizable")
    return SearchResult(best, sorted(chains))


def odpc_standard_II(p: int, m: int, distance_fn: DistanceFn, exhaustive: bool = False) -> SearchResult:
    labels = grm2_labels(m)
    fn = exhaustive_search if exhaustive else greedy_search
    return fn(labels, distance_fn, p, m)


def odpc_standard_I(p: int, m: int, dim_profile: Sequence[int], distance_fn: DistanceFn,
                    exhaustive: bool = False) -> SearchResult:
    labels = grm2_labels(m)
    fn = exhaustive_search if exhaustive else greedy_search
    return fn(labels, distance_fn, p, m, dim_profile)


def dimension_classes(p: int, m: int) -> dict[tuple, int]:
    """Distinct dimension profiles with the number of chains in each."""
    out: dict[tuple, int] = {}
    for chain in itertools.permutations(grm2_labels(m)):
        key = chain_dimensions(chain, p, m)
        out[key] = out.get(key, 0) + 1
    return out


# ---------------------------------------------------------------------------
# named chains and dimension profiles


def chain_even_standard_I(t: int, i: int, j: int) -> tuple:
    """T1, L_t..L_{t-i+2}, L_{t+1}, L_{t-i+1}..L_{t-j+3}, T0, L_{t-j+2}..L_0."""
    _check_even_ij(t, i, j)
    return ((T1,) + tuple(L(k) for k in range(t, t - i + 1, -1)) + (L(t + 1),)
            + tuple(L(k) for k in range(t - i + 1, t - j + 2, -1)) + (T0,)
            + tuple(L(k) for k in range(t - j + 2, -1, -1)))


def chain_even_standard_II(t: int) -> tuple:
    """T0, T1, L_{t+1}, ..., L_0."""
    return (T0, T1) + tuple(L(k) for k in range(t + 1, -1, -1))


def chain_odd_standard_I(t: int, i: int) -> tuple:
    """T1, L_0..L_{i-2}, T0, L_{i-1}..L_t."""
    _check_odd_i(t, i)
    return (T1,) + tuple(L(k) for k in range(i - 1)) + (T0,) + tuple(L(k) for k in range(i - 1, t + 1))


def chain_odd_standard_II(t: int) -> tuple:
    """T0, T1, L_0, ..., L_t."""
    return (T0, T1) + tuple(L(k) for k in range(t + 1))


def dimension_profile_even(t: int, i: int, j: int) -> tuple:
    """Dimension profile of the even-m Standard-I family, whole code first."""
    _check_even_ij(t, i, j)
    m = 2 * t + 2
    inc = [m] * i + [m // 2] + [m] * (j - i - 1) + [1] + [m] * (t + 3 - j)
    return _profile_from_increments(inc)


def dimension_profile_odd(t: int, i: int) -> tuple:
    _check_odd_i(t, i)
    m = 2 * t + 1
    inc = [m] * i + [1] + [m] * (t + 2 - i)
    return _profile_from_increments(inc)


def _profile_from_increments(inc) -> tuple:
    out, acc = [], 0
    for x in inc:
        acc += x
        out.append(acc)
    return tuple(reversed(out))


def _check_even_ij(t, i, j):
    if t < 2 or not 2 <= i < j <= t + 1:
        raise ValueError("need t >= 2 and 2 <= i < j <= t + 1")


def _check_odd_i(t, i):
    if t < 2 or not 2 <= i <= t:
        raise ValueError("need t >= 2 and 2 <= i <= t")


# ---------------------------------------------------------------------------
# bound sets


@dataclass(frozen=True)
class BoundSetFamily:
    """``sets[u]`` is the admissible set for d_{tau_u}; ``chain`` is the
    constructed accumulation order the family comes with."""

    name: str
    p: int
    m: int
    sets: tuple
    chain: tuple
    params: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def upper(self) -> tuple:
        return tuple(max(s) for s in self.sets)

    @property
    def lower(self) -> tuple:
        return tuple(min(s) for s in self.sets)


def _family(name, p, m, by_u: dict, chain, params) -> BoundSetFamily:
    lam = len(chain)
    if sorted(by_u) != list(range(lam)):
        raise AssertionError(f"bound sets cover {sorted(by_u)}, expected 0..{lam - 1}")
    return BoundSetFamily(name, p, m, tuple(frozenset(by_u[u]) for u in range(lam)), chain, params)


def bound_sets_theorem2(p: int, t: int, i: int, j: int) -> BoundSetFamily:
    """Even m = 2t+2, Standard I with the dimension profile indexed by (i, j)."""
    _check_even_ij(t, i, j)
    m = 2 * t + 2
    X = p ** (m - 1) * (p - 1)
    B = {t + 3: {X},
         t + 2: {X - (p - 1) * p ** (t + 1), X - p ** (t + 1), X - (p - 1) * p**t, X - p**t}}
    for d in range(3, i + 1):
        B[t - d + 4] = {X - p ** (t + d - 2), X - (p - 1) * p ** (t + d - 2),
                        X - p ** (t + d - 1), X - (p - 1) * p ** (t + d - 1)}
    for d in range(i + 1, j + 1):
        B[t - d + 4] = {X - p ** (t + d - 2), X - (p - 1) * p ** (t + d - 2)}
    for d in range(j + 1, t + 4):
        B[t - d + 4] = {X - 1 - (p - 1) * p ** (t + d - 3), X - 1 - p ** (t + d - 3)}
    B[0] = {p ** (m - 1) * (p - 2) - 1}
    return _family("even-standard-I", p, m, B, chain_even_standard_I(t, i, j),
                   {"t": t, "i": i, "j": j, "dim_profile": dimension_profile_even(t, i, j)})


def bound_sets_theorem3(p: int, t: int) -> BoundSetFamily:
    """Even m = 2t+2, Standard II."""
    if t < 1:
        raise ValueError("need t >= 1")
    m = 2 * t + 2
    X = p ** (m - 1) * (p - 1)
    B = {t + 3: {p**m - 1}, t + 2: {X - 1}, t + 1: {X - 1 - p**t}}
    for d in range(4, t + 4):
        B[t - d + 4] = {X - 1 - (p - 1) * p ** (t + d - 3), X - 1 - p ** (t + d - 3)}
    B[0] = {p ** (m - 1) * (p - 2) - 1}
    return _family("even-standard-II", p, m, B, chain_even_standard_II(t), {"t": t})


def bound_sets_prop2(p: int, t: int, i: int) -> BoundSetFamily:
    """Odd m = 2t+1, Standard I with the dimension profile indexed by i."""
    _check_odd_i(t, i)
    m = 2 * t + 1
    X = p ** (m - 1) * (p - 1)
    B = {t + 2: {X}, t + 1: {X - p**t}}
    for d in range(3, i + 1):
        B[t - d + 3] = {X - (p - 1) * p ** (t + d - 3), X - p ** (t + d - 3), X - p ** (t + d - 2)}
    for d in range(i + 1, t + 3):
        B[t - d + 3] = {X - 1 - p ** (t + d - 4), X - 1 - (p - 1) * p ** (t + d - 4),
                        X - 1 - p ** (t + d - 3)}
    B[0] = {p ** (m - 1) * (p - 2) - 1}
    return _family("odd-standard-I", p, m, B, chain_odd_standard_I(t, i),
                   {"t": t, "i": i, "dim_profile": dimension_profile_odd(t, i)})


def bound_sets_prop3(p: int, t: int) -> BoundSetFamily:
    """Odd m = 2t+1, Standard II."""
    if t < 2:
        raise ValueError("need t >= 2")
    m = 2 * t + 1
    X = p ** (m - 1) * (p - 1)
    B = {t + 2: {p**m - 1}, t + 1: {X - 1}, t: {X - 1 - p**t}}
    for d in range(4, t + 3):
        B[t - d + 3] = {X - 1 - p ** (t + d - 4), X - 1 - (p - 1) * p ** (t + d - 4),
                        X - 1 - p ** (t + d - 3)}
    B[0] = {p ** (m - 1) * (p - 2) - 1}
    return _family("odd-standard-II", p, m, B, chain_odd_standard_II(t), {"t": t})


# ---------------------------------------------------------------------------
# closed-form profile on the double-factorial family


@dataclass(frozen=True)
class ClosedProfile:
    p: int
    m: int
    profile: tuple
    chain: tuple


def theorem1_profile(p: int, t_prime: int, s0: int) -> ClosedProfile:
    """Distances of the chain T0, T1, L_0, L_{2^{s0-1}}, L_{3*2^{s0-1}}, ...,
    L_{(2t'-1)2^{s0-1}} for m = 1*3*...*(2t'-1)*2^{s0}, in tau order."""
    if t_prime < 3 or s0 < 2:
        raise ValueError("need t' >= 3 and s0 >= 2")
    m = double_factorial_m(t_prime, s0)
    X = p ** (m - 1) * (p - 1)
    by_step = [p**m - 1, X - 1]
    for d in range(3, t_prime + 4):
        u = 0 if d == 3 else (2 * (d - 3) - 1) * 2 ** (s0 - 1)
        val = X - 1 - Fraction(p - 1, p) * p ** (m // 2 + u)
        assert val.denominator == 1
        by_step.append(int(val))
    chain = (T0, T1, L(0)) + tuple(L(i) for i in lemma15_indices(t_prime, s0))
    return ClosedProfile(p, m, tuple(reversed(by_step)), chain)


# ---------------------------------------------------------------------------
# certification


@dataclass
class StepRecord:
    step: int
    u: int
    labels: tuple
    dimension: int
    distance: int | None
    bound_set: tuple
    verdict: str  # "in-set", "not-in-set", "not-computed"


@dataclass
class Certificate:
    family: BoundSetFamily
    records: list
    chains_checked: int = 0
    chains_violating: list = field(default_factory=list)
    gaps: list = field(default_factory=list)

    @property
    def constructed_ok(self) -> bool:
        return all(r.verdict != "not-in-set" for r in self.records)

    @property
    def upper_ok(self) -> bool:
        return not self.chains_violating

    @property
    def coverage(self) -> list:
        return [r.step for r in self.records if r.distance is not None]

    @property
    def complete(self) -> bool:
        return all(r.distance is not None for r in self.records)


def certify_bounds(family: BoundSetFamily, distance_fn: DistanceFn, all_chains: bool = True,
                   max_quadratic: int | None = None, chains: Iterable | None = None) -> Certificate:
    """Check the constructed chain against its sets and every other chain
    against the set maxima.  Standard-I families only compare chains of
    their own dimension class.

    With ``max_quadratic`` only subsets with at most that many quadratic
    labels are evaluated; other steps are recorded as not computed.
    """
    p, m = family.p, family.m
    lam = len(family.chain)

    def allowed(s):
        return max_quadratic is None or sum(1 for x in s if x.is_quadratic) <= max_quadratic

    def dist(s):
        if not allowed(s):
            return None
        try:
            return distance_fn(s)
        except BudgetExceeded:
            return None

    recs = []
    for k in range(1, lam + 1):
        pref = frozenset(family.chain[:k])
        u = lam - k
        d = dist(pref)
        bset = tuple(sorted(family.sets[u]))
        verdict = "not-computed" if d is None else ("in-set" if d in family.sets[u] else "not-in-set")
        dim = sum(label_dimension(x, p, m) for x in pref)
        recs.append(StepRecord(k, u, tuple(family.chain[:k]), dim, d, bset, verdict))
    cert = Certificate(family, recs)
    upper = family.upper
    for r in recs:
        if r.distance is not None:
            cert.gaps.append((r.u, min(family.sets[r.u]), r.distance, max(family.sets[r.u])))
    if all_chains or chains is not None:
        pool = chains if chains is not None else itertools.permutations(sorted(family.chain))
        cls = family.params.get("dim_profile")
        for chain in pool:
            if cls is not None and chain_dimensions(chain, p, m) != tuple(cls):
                continue
            cert.chains_checked += 1
            for k in range(1, lam + 1):
                d = dist(frozenset(chain[:k]))
                if d is not None and d > upper[lam - k]:
                    cert.chains_violating.append((tuple(chain), k, d, upper[lam - k]))
                    break
    return cert
