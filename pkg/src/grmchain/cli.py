"""Command-line entry point: weights, odpc, reproduce and chain-stats."""

from __future__ import annotations

import sys
import time

import click

from .code import (DEFAULT_ENUM_BUDGET, BudgetExceeded, CodeSpec, brute_weight_distribution,
                   field_for, parameter_weight_distribution)
from .cyclotomic import T0, T1, L, chain_stats_grm2, format_labels, parse_labels
from .io import (SCHEMA, RunConfig, cache_load, cache_store, csv_rows, dist_record, dumps,
                 search_record, stats_record, to_csv)
from .search import (DistanceOracle, bound_sets_prop2, bound_sets_prop3, bound_sets_theorem2,
                     bound_sets_theorem3, certify_bounds, odpc_standard_I, odpc_standard_II)
from .spectra import (DEFAULT_FAST_BUDGET, HypothesisError, closed_form_distribution,
                      fast_weight_distribution, moment_report_for)

EXIT_OK, EXIT_BUDGET, EXIT_MISMATCH, EXIT_BAD_ARGS = 0, 2, 3, 4
FORCE_FACTOR = 2**8


class TimedOracle:
    """Distance oracle that raises BudgetExceeded once the time cap passes."""

    def __init__(self, inner, time_cap):
        self.inner = inner
        self.deadline = None if time_cap is None else time.monotonic() + time_cap

    def __call__(self, labels):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("time cap reached")
        return self.inner(labels)


def _emit(cfg: RunConfig, rec: dict) -> None:
    click.echo(dumps(rec) if cfg.fmt == "json" else to_csv(csv_rows(rec)), nl=cfg.fmt == "json")


def _error(kind: str, msg: str) -> None:
    click.echo(dumps({"schema": SCHEMA, "kind": "error", "error": kind, "message": msg}), err=True)


@click.group()
@click.option("-p", type=int, default=3, show_default=True, help="Odd prime.")
@click.option("-m", type=int, default=4, show_default=True, help="Extension degree, at least 3.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--enum-budget", type=int, default=DEFAULT_ENUM_BUDGET, show_default=True,
              help="Cap on enumerated codeword-coordinate pairs.")
@click.option("--fast-budget", type=int, default=DEFAULT_FAST_BUDGET, show_default=True,
              help="Cap on the number of quadratic forms classified.")
@click.option("--time-cap", type=float, default=None, help="Seconds before a search stops.")
@click.option("--cache-dir", default=None, help="Distribution cache directory.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--force", is_flag=True, help="Raise both budgets by a factor of 256.")
@click.pass_context
def cli(ctx, p, m, fmt, enum_budget, fast_budget, time_cap, cache_dir, workers, force):
    if force:
        enum_budget *= FORCE_FACTOR
        fast_budget *= FORCE_FACTOR
        click.echo(f"warning: budgets raised to {enum_budget} / {fast_budget}", err=True)
    try:
        ctx.obj = RunConfig(p=p, m=m, enum_budget=enum_budget, fast_budget=fast_budget,
                            time_cap=time_cap, cache_dir=cache_dir, fmt=fmt, workers=workers)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def compute_distribution(cfg: RunConfig, spec: CodeSpec, method: str):
    """(distribution, provenance).  ``auto`` uses the cache, then the fast
    path."""
    cache_dir = cfg.resolved_cache_dir()
    if method == "auto":
        got = cache_load(cache_dir, spec)
        if got is not None:
            return got, "fast"
        method = "fast"
    if method == "fast":
        dist = fast_weight_distribution(spec, cfg.fast_budget)
        cache_store(cache_dir, spec, dist)
        return dist, "fast"
    if method == "brute":
        return brute_weight_distribution(field_for(spec), spec, cfg.enum_budget), "brute"
    return closed_form_distribution(spec.labels, spec.p, spec.m), "closed-form"


@cli.command()
@click.option("--labels", required=True, help="Comma-separated labels, e.g. T0,T1,L2.")
@click.option("--method", type=click.Choice(["auto", "fast", "brute", "closed"]), default="auto",
              show_default=True)
@click.pass_obj
def weights(cfg: RunConfig, labels, method):
    """Weight distribution of the cyclic code spanned by LABELS."""
    try:
        spec = CodeSpec(cfg.p, cfg.m, parse_labels(labels))
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--labels")
    dist, prov = compute_distribution(cfg, spec, method)
    rep = moment_report_for(field_for(spec), spec, dist)
    moments = {"first": rep.first_ok, "second": rep.second_ok}
    _emit(cfg, dist_record(spec, dist, prov, moments))
    return EXIT_OK


def theorem_family(p: int, m: int, standard: str, i, j):
    """The bound-set family for (p, m, standard), or None when no theorem
    covers it."""
    if m % 2 == 0:
        t = (m - 2) // 2
        if standard == "II":
            return bound_sets_theorem3(p, t) if t >= 1 else None
        if i is None or j is None:
            raise click.BadParameter("even m Standard I needs --i and --j")
        return bound_sets_theorem2(p, t, i, j)
    t = (m - 1) // 2
    if standard == "II":
        return bound_sets_prop3(p, t) if t >= 2 else None
    if i is None:
        raise click.BadParameter("odd m Standard I needs --i")
    return bound_sets_prop2(p, t, i)


@cli.command()
@click.option("--standard", type=click.Choice(["I", "II"]), default="II", show_default=True)
@click.option("--i", "i", type=int, default=None)
@click.option("--j", "j", type=int, default=None)
@click.option("--certify/--no-certify", default=True, show_default=True,
              help="Check the bound sets on every chain of the class.")
@click.option("--max-quadratic", type=int, default=None,
              help="Only certify steps with at most this many quadratic labels.")
@click.option("--method", type=click.Choice(["fast", "brute"]), default="fast", show_default=True)
@click.pass_obj
def odpc(cfg: RunConfig, standard, i, j, certify, max_quadratic, method):
    """Optimum distance profile in the inverse dictionary order."""
    cfg.i, cfg.j = i, j
    try:
        fam = theorem_family(cfg.p, cfg.m, standard, i, j)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    budget = cfg.fast_budget if method == "fast" else cfg.enum_budget
    fn = TimedOracle(DistanceOracle(cfg.p, cfg.m, method, budget), cfg.time_cap)
    if standard == "II":
        res = odpc_standard_II(cfg.p, cfg.m, fn)
    else:
        res = odpc_standard_I(cfg.p, cfg.m, fam.params["dim_profile"], fn)
    cert = certify_bounds(fam, fn, all_chains=True, max_quadratic=max_quadratic) if fam and certify else None
    _emit(cfg, search_record(cfg.p, cfg.m, standard, res, cert))
    return EXIT_OK if res.complete else EXIT_BUDGET


@cli.command("chain-stats")
@click.pass_obj
def chain_stats(cfg: RunConfig):
    """Chain count, number of GRM(2, m)* cyclic subcode chains and classes."""
    _emit(cfg, stats_record(cfg.p, cfg.m, chain_stats_grm2(cfg.p, cfg.m)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduction of the printed examples

EXPECTED_TABLES = {
    2: (3, 4, [
        {"T0": 80, "T1": 54, "L2": 60, "L1": 48, "L0": 48},
        {"T0,T1": 53, "T0,L2": 50, "T0,L1": 44, "T0,L0": 48},
        {"T0,T1,L2": 50, "T0,T1,L1": 44, "T0,T1,L0": 47},
        {"T0,T1,L2,L1": 44, "T0,T1,L2,L0": 35},
        {"T0,T1,L2,L1,L0": 26},
    ], (26, 44, 50, 53, 80), [[T0, T1, L(2), L(1), L(0)]]),
    3: (3, 5, [
        {"T0": 242, "T1": 162, "L0": 162, "L1": 162, "L2": 162},
        {"T0,T1": 161, "T0,L2": 152, "T0,L1": 152, "T0,L0": 152},
        {"T0,T1,L2": 152, "T0,T1,L1": 152, "T0,T1,L0": 152},
        {"T0,T1,L2,L1": 134, "T0,T1,L2,L0": 134, "T0,T1,L1,L0": 134},
        {"T0,T1,L2,L1,L0": 80},
    ], (80, 134, 152, 161, 242), None),
}
EXAMPLE1 = {"p": 3, "m": 8, "label": "L4", "weights": {0: 1, 4428: 80}}


def reproduce_report(example: int, method: str = "fast", budget: int | None = None) -> dict:
    cells = []

    def cell(where, expected, computed):
        cells.append({"cell": where, "expected": expected, "computed": computed,
                      "match": expected == computed})

    rec = {"schema": SCHEMA, "kind": "reproduce", "example": example}
    if example == 1:
        p, m = EXAMPLE1["p"], EXAMPLE1["m"]
        spec = CodeSpec(p, m, parse_labels(EXAMPLE1["label"]))
        exp = EXAMPLE1["weights"]
        for name, dist in (("closed-form", closed_form_distribution(spec.labels, p, m)),
                           ("parameters", parameter_weight_distribution(field_for(spec), L(4))),
                           ("fast", fast_weight_distribution(spec))):
            for w in sorted(set(exp) | set(dist.counts)):
                cell(f"{name}:A_{w}", exp.get(w, 0), dist[w])
        rec.update(p=p, m=m, labels=spec.token)
    else:
        p, m, tables, profile, chains = EXPECTED_TABLES[example]
        fn = DistanceOracle(p, m, method, budget)
        res = odpc_standard_II(p, m, fn)
        for step, exp in enumerate(tables, 1):
            exp = {format_labels(parse_labels(k)): v for k, v in exp.items()}
            got = {format_labels(s): d for s, d in res.step_tables[step - 1].items()} \
                if step <= len(res.step_tables) else {}
            for tok in sorted(set(exp) | set(got)):
                cell(f"step{step}:{tok}", exp.get(tok), got.get(tok))
        cell("profile", list(profile), list(res.profile))
        got_chains = [[x.token for x in c] for c in res.chains]
        if chains is not None:
            cell("chains", [[x.token for x in c] for c in chains], got_chains)
        else:
            cell("several optimum chains", True, len(got_chains) >= 2)
        rec.update(p=p, m=m, profile=list(res.profile), chains=got_chains,
                   step_tables=[[[format_labels(s), d] for s, d in tb.items()] for tb in res.step_tables])
    rec["cells"] = cells
    rec["ok"] = all(c["match"] for c in cells)
    return rec


@cli.command()
@click.argument("example", type=click.IntRange(1, 3))
@click.option("--method", type=click.Choice(["fast", "brute"]), default="fast", show_default=True)
@click.pass_obj
def reproduce(cfg: RunConfig, example, method):
    """Recompute a printed example and diff it cell by cell."""
    budget = cfg.fast_budget if method == "fast" else cfg.enum_budget
    rec = reproduce_report(example, method, budget)
    _emit(cfg, rec)
    for c in rec["cells"]:
        if not c["match"]:
            click.echo(f"mismatch at {c['cell']}: expected {c['expected']}, computed {c['computed']}", err=True)
    return EXIT_OK if rec["ok"] else EXIT_MISMATCH


def run(argv=None) -> int:
    """Run the CLI and return the exit code."""
    try:
        rv = cli.main(args=argv, prog_name="grmchain", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return EXIT_BAD_ARGS
    except click.UsageError as exc:
        _error("bad-arguments", exc.format_message())
        return EXIT_BAD_ARGS
    except BudgetExceeded as exc:
        _error("budget", str(exc))
        return EXIT_BUDGET
    except HypothesisError as exc:
        _error("bad-arguments", str(exc))
        return EXIT_BAD_ARGS
    return rv if isinstance(rv, int) else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
