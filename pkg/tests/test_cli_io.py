import json

import pytest

from grmchain import cli as climod
from grmchain.cli import EXIT_BAD_ARGS, EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, run
from grmchain.code import CodeSpec, WeightDistribution
from grmchain.cyclotomic import T0, T1, L, chain_stats_grm2
from grmchain.io import (CACHE_ENV, SCHEMA, RunConfig, cache_load, cache_path, cache_store, csv_rows,
                         dist_from_record, dist_record, dumps, format_cache, parse_cache,
                         search_from_record, search_record, stats_from_record, stats_record, to_csv)
from grmchain.spectra import fast_weight_distribution
from grmchain.search import DistanceOracle, odpc_standard_II


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


# ---------------------------------------------------------------------------
# records and cache


def test_dist_record_roundtrip():
    spec = CodeSpec(3, 4, frozenset({T0, L(2)}))
    d = WeightDistribution({0: 1, 60: 16, 80: 2, 20: 8}, 80)
    rec = json.loads(dumps(dist_record(spec, d, "fast")))
    assert rec["schema"] == SCHEMA and rec["kind"] == "weights"
    assert dist_from_record(rec) == (spec, d)


def test_stats_record_roundtrip_big():
    s = chain_stats_grm2(3, 60)
    assert stats_from_record(json.loads(dumps(stats_record(3, 60, s)))) == s


def test_search_record_roundtrip():
    res = odpc_standard_II(3, 4, DistanceOracle(3, 4))
    back = search_from_record(json.loads(dumps(search_record(3, 4, "II", res))))
    assert back.profile == res.profile and back.chains == res.chains
    assert back.step_tables == res.step_tables and back.complete


def test_record_kind_checked():
    rec = stats_record(3, 4, chain_stats_grm2(3, 4))
    with pytest.raises(ValueError):
        dist_from_record(rec)
    with pytest.raises(ValueError):
        stats_from_record({**rec, "schema": "other/0"})


def test_cache_roundtrip(tmp_path):
    spec = CodeSpec(3, 4, frozenset({T0, T1}))
    d = fast_weight_distribution(spec)
    assert cache_load(tmp_path, spec) is None
    cache_store(tmp_path, spec, d)
    assert cache_path(tmp_path, spec).exists()
    assert cache_load(tmp_path, spec) == d
    assert parse_cache(format_cache(spec, d)) == (spec, d)
    cache_store(None, spec, d)
    assert cache_load(None, spec) is None


def test_cache_rejects_corrupt_file():
    spec = CodeSpec(3, 4, frozenset({T0}))
    text = format_cache(spec, WeightDistribution({0: 1, 80: 2}, 80))
    with pytest.raises(ValueError):
        parse_cache(text.replace("80 2", "80 3"))


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert RunConfig(3, 4).resolved_cache_dir() == tmp_path
    assert run(["-m", "4", "weights", "--labels", "T0,L2"]) == EXIT_OK
    assert cache_path(tmp_path, CodeSpec(3, 4, frozenset({T0, L(2)}))).exists()


def test_runconfig_validation():
    for kw in ({"p": 4, "m": 4}, {"p": 3, "m": 2}, {"p": 3, "m": 4, "workers": 0},
               {"p": 3, "m": 4, "time_cap": -1}, {"p": 3, "m": 4, "fmt": "xml"}):
        with pytest.raises(ValueError):
            RunConfig(**kw)


def test_csv_layouts():
    spec = CodeSpec(3, 4, frozenset({T0}))
    txt = to_csv(csv_rows(dist_record(spec, WeightDistribution({0: 1, 80: 2}, 80), "fast")))
    assert txt.splitlines() == ["p,m,labels,weight,count", "3,4,T0,0,1", "3,4,T0,80,2"]
    assert to_csv([]) == ""
    with pytest.raises(ValueError):
        csv_rows({"kind": "nope"})


# ---------------------------------------------------------------------------
# commands and exit codes


def test_weights_command(capsys):
    assert run(["-m", "4", "weights", "--labels", "T0", "--method", "brute"]) == EXIT_OK
    rec = out_json(capsys)
    assert rec["distribution"] == [[0, 1], [80, 2]] and rec["moments"] == {"first": True, "second": True}


def test_weights_methods_agree(capsys):
    outs = []
    for method in ("fast", "brute", "closed"):
        assert run(["-m", "4", "weights", "--labels", "L2", "--method", method]) == EXIT_OK
        outs.append(out_json(capsys)["distribution"])
    assert outs[0] == outs[1] == outs[2] == [[0, 1], [60, 8]]


def test_weights_closed_at_m8(capsys):
    assert run(["-m", "8", "weights", "--labels", "L4", "--method", "closed"]) == EXIT_OK
    assert out_json(capsys)["distribution"] == [[0, 1], [4428, 80]]


def test_weights_csv(capsys):
    assert run(["-m", "4", "--format", "csv", "weights", "--labels", "T0"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "p,m,labels,weight,count"


@pytest.mark.parametrize("argv", [["-p", "4", "weights", "--labels", "T0"],
                                  ["-m", "4", "weights", "--labels", "L9"],
                                  ["-m", "4", "weights", "--labels", "X1"],
                                  ["-m", "4", "weights", "--labels", "L1", "--method", "closed"],
                                  ["-m", "4", "odpc", "--standard", "I"],
                                  ["nosuch"]])
def test_bad_arguments_exit_4(argv, capsys):
    assert run(argv) == EXIT_BAD_ARGS
    err = capsys.readouterr().err
    assert '"kind": "error"' in err and '"bad-arguments"' in err


def test_budget_exit_2(capsys):
    assert run(["-m", "5", "--fast-budget", "100", "weights", "--labels", "L0,L1,L2", "--method", "fast"]) == EXIT_BUDGET
    assert '"budget"' in capsys.readouterr().err


def test_odpc_partial_exit_2(capsys):
    rc = run(["-m", "5", "--enum-budget", "6561", "odpc", "--method", "brute", "--no-certify"])
    assert rc == EXIT_BUDGET
    rec = out_json(capsys)
    assert rec["complete"] is False and rec["note"]


def test_time_cap_exit_2(capsys):
    rc = run(["-m", "5", "--time-cap", "1e-9", "odpc", "--no-certify"])
    assert rc == EXIT_BUDGET
    assert out_json(capsys)["profile"] == []


def test_force_warns(capsys):
    assert run(["--force", "chain-stats"]) == EXIT_OK
    cap = capsys.readouterr()
    assert "warning" in cap.err
    assert json.loads(cap.out)["num_chains"] == "120"


def test_chain_stats_csv(capsys):
    assert run(["-m", "5", "--format", "csv", "chain-stats"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["p,m,lambda,num_chains,mu,num_classes", "3,5,5,120,24,5"]


def test_odpc_certified(capsys):
    assert run(["-m", "4", "odpc"]) == EXIT_OK
    rec = out_json(capsys)
    assert rec["profile"] == [26, 44, 50, 53, 80]
    assert rec["chains"] == [["T0", "T1", "L2", "L1", "L0"]]
    c = rec["certificate"]
    assert c["chains_checked"] == 120 and c["upper_bound_holds"] and c["constructed_in_sets"]


def test_odpc_standard_I_odd(capsys):
    assert run(["-m", "5", "odpc", "--standard", "I", "--i", "2"]) == EXIT_OK
    rec = out_json(capsys)
    assert rec["certificate"]["upper_bound_holds"] and rec["certificate"]["constructed_in_sets"]


def test_reproduce_ok(capsys):
    assert run(["reproduce", "2"]) == EXIT_OK
    rec = out_json(capsys)
    assert rec["ok"] and rec["profile"] == [26, 44, 50, 53, 80]


def test_reproduce_mismatch_exit_3(capsys, monkeypatch):
    tables = dict(climod.EXPECTED_TABLES)
    p, m, steps, prof, chains = tables[2]
    steps = [dict(s) for s in steps]
    steps[0]["T1"] = 55
    tables[2] = (p, m, steps, prof, chains)
    monkeypatch.setattr(climod, "EXPECTED_TABLES", tables)
    assert run(["reproduce", "2"]) == EXIT_MISMATCH
    cap = capsys.readouterr()
    assert "mismatch at step1:T1: expected 55, computed 54" in cap.err
    assert json.loads(cap.out)["ok"] is False


def test_reproduce_bad_example():
    assert run(["reproduce", "7"]) == EXIT_BAD_ARGS


def test_help_exit_0(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "reproduce" in capsys.readouterr().out
