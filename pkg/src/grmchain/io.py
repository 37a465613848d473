"""Run configuration, JSON/CSV records and the distribution cache."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .code import CodeSpec, WeightDistribution
from .cyclotomic import ChainStats, format_labels, parse_label, parse_labels
from .field import is_odd_prime

SCHEMA = "grmchain/1"
CACHE_ENV = "GRMCHAIN_CACHE_DIR"
CODE_VERSION = __version__


@dataclass
class RunConfig:
    p: int
    m: int
    enum_budget: int = 2**28
    fast_budget: int = 2**27
    time_cap: float | None = None
    cache_dir: str | None = None
    fmt: str = "json"
    workers: int = 1
    i: int | None = None
    j: int | None = None
    t_prime: int | None = None
    s0: int | None = None

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.m < 3:
            raise ValueError(f"m must be >= 3, got {self.m}")
        if self.enum_budget <= 0 or self.fast_budget <= 0 or self.workers <= 0:
            raise ValueError("budgets and worker count must be positive")
        if self.time_cap is not None and self.time_cap <= 0:
            raise ValueError("time cap must be positive")
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    def resolved_cache_dir(self) -> Path | None:
        d = self.cache_dir or os.environ.get(CACHE_ENV)
        return Path(d) if d else None


# ---------------------------------------------------------------------------
# distribution cache


def cache_path(cache_dir: Path, spec: CodeSpec) -> Path:
    token = spec.token.replace(",", "-")
    return Path(cache_dir) / f"v{CODE_VERSION}" / f"p{spec.p}_m{spec.m}_{token}.txt"


def format_cache(spec: CodeSpec, dist: WeightDistribution) -> str:
    lines = [f"{spec.p} {spec.m} {spec.token} {spec.dimension} {spec.n}"]
    lines += [f"{w} {c}" for w, c in dist.counts.items()]
    return "\n".join(lines) + "\n"


def parse_cache(text: str) -> tuple[CodeSpec, WeightDistribution]:
    rows = [ln.split() for ln in text.strip().splitlines()]
    p, m, token, dim, n = rows[0]
    spec = CodeSpec(int(p), int(m), parse_labels(token))
    if spec.dimension != int(dim) or spec.n != int(n):
        raise ValueError("cache header disagrees with the label set")
    dist = WeightDistribution({int(w): int(c) for w, c in rows[1:]}, int(n))
    if dist.total != spec.p**spec.dimension:
        raise ValueError("cached distribution has the wrong total")
    return spec, dist


def cache_load(cache_dir: Path | None, spec: CodeSpec) -> WeightDistribution | None:
    if cache_dir is None:
        return None
    path = cache_path(cache_dir, spec)
    if not path.exists():
        return None
    got, dist = parse_cache(path.read_text())
    return dist if got == spec else None


def cache_store(cache_dir: Path | None, spec: CodeSpec, dist: WeightDistribution) -> None:
    if cache_dir is None:
        return
    path = cache_path(cache_dir, spec)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(format_cache(spec, dist))
    tmp.replace(path)


# ---------------------------------------------------------------------------
# records


def dist_record(spec: CodeSpec, dist: WeightDistribution, method: str, moments: dict | None = None) -> dict:
    rec = {"schema": SCHEMA, "kind": "weights", "p": spec.p, "m": spec.m, "labels": spec.token,
           "dimension": spec.dimension, "n": spec.n, "method": method,
           "distribution": [[w, c] for w, c in dist.counts.items()]}
    if moments is not None:
        rec["moments"] = moments
    return rec


def dist_from_record(rec: dict) -> tuple[CodeSpec, WeightDistribution]:
    _check(rec, "weights")
    spec = CodeSpec(rec["p"], rec["m"], parse_labels(rec["labels"]))
    return spec, WeightDistribution({int(w): int(c) for w, c in rec["distribution"]}, rec["n"])


def stats_record(p: int, m: int, s: ChainStats) -> dict:
    return {"schema": SCHEMA, "kind": "chain-stats", "p": p, "m": m, "lambda": s.lam,
            "num_chains": str(s.num_chains), "mu": str(s.mu), "num_classes": str(s.num_classes)}


def stats_from_record(rec: dict) -> ChainStats:
    _check(rec, "chain-stats")
    return ChainStats(int(rec["lambda"]), int(rec["num_chains"]), int(rec["mu"]), int(rec["num_classes"]))


def chain_tokens(chain) -> list[str]:
    return [lab.token for lab in chain]


def search_record(p: int, m: int, standard: str, result, certificate=None) -> dict:
    rec = {"schema": SCHEMA, "kind": "odpc", "p": p, "m": m, "standard": standard,
           "profile": list(result.profile), "complete": result.complete, "note": result.note,
           "chains": [chain_tokens(c) for c in result.chains],
           "step_tables": [[[format_labels(s), d] for s, d in sorted(tb.items(), key=lambda kv: format_labels(kv[0]))]
                           for tb in result.step_tables]}
    if certificate is not None:
        rec["certificate"] = certificate_record(certificate)
    return rec


def search_from_record(rec: dict):
    from .search import SearchResult
    _check(rec, "odpc")
    tables = [{parse_labels(tok): d for tok, d in tb} for tb in rec["step_tables"]]
    chains = [tuple(parse_label(x) for x in c) for c in rec["chains"]]
    return SearchResult(tuple(rec["profile"]), chains, tables, rec["complete"], rec["note"])


def certificate_record(cert) -> dict:
    return {
        "family": cert.family.name,
        "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in cert.family.params.items()},
        "sets": [sorted(s) for s in cert.family.sets],
        "records": [step_row(r) for r in cert.records],
        "chains_checked": cert.chains_checked,
        "chains_violating": [[chain_tokens(c), k, d, ub] for c, k, d, ub in cert.chains_violating],
        "constructed_in_sets": cert.constructed_ok,
        "upper_bound_holds": cert.upper_ok,
        "complete": cert.complete,
        "gaps": [list(g) for g in cert.gaps],
    }


def step_row(r) -> dict:
    return {"step": r.step, "u": r.u, "labels": format_labels(r.labels), "dimension": r.dimension,
            "distance": r.distance, "bound_set": list(r.bound_set), "verdict": r.verdict}


def _check(rec: dict, kind: str):
    if rec.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {rec.get('schema')!r}")
    if rec.get("kind") != kind:
        raise ValueError(f"expected a {kind} record, got {rec.get('kind')!r}")


def dumps(rec: dict) -> str:
    return json.dumps(rec, indent=2, sort_keys=False)


def to_csv(rows: list[dict]) -> str:
    """Flat CSV of a list of homogeneous dict rows; list cells are joined
    with spaces."""
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: " ".join(map(str, v)) if isinstance(v, (list, tuple)) else v for k, v in r.items()})
    return buf.getvalue()


def csv_rows(rec: dict) -> list[dict]:
    kind = rec["kind"]
    if kind == "weights":
        return [{"p": rec["p"], "m": rec["m"], "labels": rec["labels"], "weight": w, "count": c}
                for w, c in rec["distribution"]]
    if kind == "chain-stats":
        return [{k: rec[k] for k in ("p", "m", "lambda", "num_chains", "mu", "num_classes")}]
    if kind == "odpc":
        if "certificate" in rec:
            return rec["certificate"]["records"]
        rows = []
        for step, tb in enumerate(rec["step_tables"], 1):
            for tok, d in tb:
                rows.append({"step": step, "labels": tok, "distance": d})
        return rows
    if kind == "reproduce":
        return rec["cells"]
    raise ValueError(f"no CSV layout for {kind}")
