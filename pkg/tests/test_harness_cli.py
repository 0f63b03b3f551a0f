import json
import subprocess
import sys

import pytest

from onlinecover.cli import main
from onlinecover.core import make_instance, save_instance, write_instance
from onlinecover.harness import gen_random, parse_report, ratio_sweep, run_cip, run_clp


def test_gen_random_deterministic():
    a = gen_random(6, 10, 3, u_max=2, seed=4)
    b = gen_random(6, 10, 3, u_max=2, seed=4)
    assert save_instance(a) == save_instance(b)


def test_gen_random_single_variable_rows():
    inst = gen_random(6, 30, 1, seed=0)
    assert all(len(r) == 1 for r in inst.rows)


def test_gen_random_rows_integrally_coverable():
    inst = gen_random(5, 40, 2, coeff_range=(0.05, 0.6), u_max=2, seed=1)
    for r in inst.rows:
        assert sum(a * inst.upper_bounds[i] for i, a in r.entries) >= 1


def test_gen_random_density():
    inst = gen_random(10, 30, 6, density=0.0, seed=2)
    assert all(len(r) == 1 for r in inst.rows)


@pytest.mark.parametrize("kwargs", [dict(n=0, m=1, k_max=1), dict(n=1, m=1, k_max=0),
                                    dict(n=2, m=1, k_max=1, coeff_range=(0.0, 1.0)),
                                    dict(n=2, m=1, k_max=1, u_max=0)])
def test_gen_random_validation(kwargs):
    with pytest.raises(ValueError):
        gen_random(**kwargs)


def test_clp_report_single_variable():
    rep = run_clp(make_instance([1.0], [([(0, 1.0)], 1.0)]), oracle=True)
    s = rep.summary
    assert s["primal_cost"] == pytest.approx(1.5)
    assert s["dual_total"] == pytest.approx(2.0)
    assert s["lp_opt"] == pytest.approx(1.0)
    assert s["ratio"] == pytest.approx(1.5)
    assert rep.exit_code == 0


def test_cip_report_gap_instance():
    inst = make_instance([1.0, 1e-9], [([(0, 1.0), (1, 0.9)], 1.0)], [1, 1])
    rep = run_cip(inst, seed=0, oracle=True)
    X = rep.summary["X"]
    assert X[0] + 0.9 * X[1] >= 1
    assert rep.summary["integral_cost"] >= rep.summary["ip_opt"] - 1e-12
    assert rep.summary["ip_opt"] == pytest.approx(1.0)


def test_report_arrivals_are_contiguous():
    rep = run_cip(gen_random(6, 12, 3, u_max=3, seed=3), seed=2)
    idx = [e["arrival"] for e in rep.events if e["kind"] == "arrival"]
    assert idx == list(range(12))
    rep = run_clp(gen_random(6, 12, 3, seed=3))
    idx = [e["arrival"] for e in rep.events if e["kind"] == "clp_arrival"]
    assert idx == list(range(12))


def test_report_counts_every_check():
    rep = run_clp(gen_random(5, 6, 2, seed=0), oracle=True)
    lines = parse_report(rep.dumps())
    summary = next(d for d in lines if d["kind"] == "summary")
    n_checks = sum(len(d.get("checks", {})) for d in lines if d["kind"] != "summary")
    n_checks += len(summary["checks"])
    assert summary["invariants"] == {"run": n_checks, "failed": 0}


def test_infeasible_run_still_reports():
    inst = make_instance([1.0], [([(0, 0.5)], 1.0)], [1])
    rep = run_cip(inst, seed=0)
    assert rep.status == "INFEASIBLE" and rep.exit_code == 2
    assert parse_report(rep.dumps())[-2]["status"] == "INFEASIBLE"


def test_mode_selection():
    with pytest.raises(ValueError):
        run_clp(gen_random(3, 3, 2, u_max=2, seed=0))
    with pytest.raises(ValueError):
        run_cip(gen_random(3, 3, 2, seed=0), seed=0)


def test_ratio_sweep_tables():
    assert ratio_sweep({"families": []}) == []
    rows = ratio_sweep({"families": [
        {"name": "single", "n": 6, "m": 8, "k_max": 1, "seeds": 3},
        {"name": "boxed", "n": 6, "m": 8, "k_max": 4, "u_max": 3, "seeds": 3,
         "rounding_seeds": 3},
    ]})
    assert rows[0]["frac_ratio_max"] <= rows[0]["frac_envelope"] == 48
    assert 0 < rows[1]["int_ratio_mean"] <= rows[1]["int_envelope"]


def test_cli_round_trip(tmp_path, capsys):
    inst_path = tmp_path / "i.json"
    assert main(["gen-random", "--n", "5", "--m", "8", "--k-max", "3", "--u-max", "2",
                 "--seed", "1", "--out", str(inst_path)]) == 0
    reports = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.jsonl"
        assert main(["solve-cip", "--instance", str(inst_path), "--seed", "3",
                     "--check-invariants", "--oracle", "--report", str(out)]) == 0
        reports.append([d for d in parse_report(out.read_text()) if d["kind"] != "timing"])
    assert reports[0] == reports[1]
    assert main(["oracle", "--instance", str(inst_path), "--mode", "ip"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "OPTIMAL"


def test_cli_byte_identical_modulo_timing(tmp_path):
    inst_path = tmp_path / "c.json"
    write_instance(gen_random(5, 8, 3, seed=7), inst_path)
    texts = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.jsonl"
        main(["solve-clp", "--instance", str(inst_path), "--oracle", "--report", str(out)])
        texts.append([l for l in out.read_text().splitlines() if '"timing"' not in l])
    assert texts[0] == texts[1]


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "c": [0], "rows": []}')
    assert main(["solve-clp", "--instance", str(bad)]) == 3
    assert main(["solve-clp", "--instance", str(tmp_path / "missing.json")]) == 3
    infeasible = tmp_path / "inf.json"
    write_instance(make_instance([1.0], [([(0, 0.5)], 1.0)], [1]), infeasible)
    assert main(["solve-cip", "--instance", str(infeasible), "--seed", "0"]) == 2
    assert main(["oracle", "--instance", str(infeasible), "--mode", "lp"]) == 2
    assert main(["solve-clp", "--instance", str(infeasible)]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 3
    assert main(["adversary", "--rho", "2"]) == 3
    big = tmp_path / "big.json"
    write_instance(gen_random(10, 4, 3, u_max=3, seed=0), big)
    assert main(["oracle", "--instance", str(big), "--mode", "ip", "--limit", "10"]) == 3


def test_cli_adversary(tmp_path):
    out = tmp_path / "adv.json"
    assert main(["adversary", "--rho", "8", "--greediness", "1/2", "--report", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["primal_over_dual"] >= 2


def test_cli_ratio_sweep(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"families": [{"n": 4, "m": 4, "k_max": 2, "seeds": 2}]}))
    out = tmp_path / "sweep.jsonl"
    assert main(["ratio-sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(parse_report(out.read_text())) == 1


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "onlinecover", "oracle", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "--mode" in res.stdout
