import subprocess
import sys
from pathlib import Path

import pytest

from eventcons import cli
from eventcons.config import dump_config, load_scenario, scenario_from_dict
from eventcons.costs import bisect_optimum
from eventcons.engine import ConfigError, prepare
from eventcons.io import read_summary

import tomli


def bundled_dict():
    from importlib import resources

    return tomli.loads((resources.files("eventcons") / "scenarios" / "paper_sec4.toml").read_text())


def test_bundled_scenario_values():
    sc = load_scenario("paper_sec4")
    cfg = sc.config
    assert cfg.graph.n == 4 and len(cfg.agents) == 4
    assert (cfg.generator.alpha, cfg.generator.beta) == (1.0, 10.0)
    assert (cfg.control.c0, cfg.control.c1, cfg.control.gamma) == (0.0, 5.0, 0.5)
    assert (cfg.comm.c0, cfg.comm.c1, cfg.comm.gamma) == (0.0, 5.0, 0.1)
    assert [c.label for c in cfg.costs.costs] == ["f1", "f2", "f3", "f4"]
    assert cfg.agents[2].K1.ravel().tolist() == [-2.7331, -2.3372, -3.5835]


def test_bundled_scenario_warns_on_gamma():
    setup = prepare(load_scenario("paper_sec4").config)
    assert any(w.startswith("Theorem 1: control gamma") for w in setup.warnings)
    assert any("alpha=1" in w for w in setup.warnings)
    assert setup.y_star == pytest.approx(0.692063067838, abs=1e-10)


def test_missing_C_names_agent():
    raw = bundled_dict()
    del raw["agents"][1]["C"]
    with pytest.raises(ConfigError, match="agent 2: missing C matrix"):
        scenario_from_dict(raw)


def test_errors_are_all_reported():
    raw = bundled_dict()
    del raw["agents"][1]["C"]
    raw["trigger"]["comm"]["gamma"] = -1.0
    raw["costs"][0]["name"] = "cubic"
    with pytest.raises(ConfigError) as exc:
        scenario_from_dict(raw)
    assert len(exc.value.errors) == 3


def test_chain_graph_warns():
    raw = bundled_dict()
    raw["graph"]["edges"] = [[1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0]]
    setup = prepare(scenario_from_dict(raw).config)
    assert "Assumption 2: graph is not strongly connected" in setup.warnings


def test_parse_error_has_line_info(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text('name = "x"\n[graph\nn = 2\n')
    with pytest.raises(ConfigError, match="line 2"):
        load_scenario(str(p))


def test_singular_agent3_variant_rejected():
    with pytest.raises(ConfigError, match="agent 3: Assumption 3"):
        prepare(load_scenario("reference_agent3_singular").config)


def test_round_trip(tmp_path):
    sc = load_scenario("paper_sec4")
    text = dump_config(sc.config, sc.checks)
    p = tmp_path / "rt.toml"
    p.write_text(text)
    back = load_scenario(str(p))
    assert dump_config(back.config, back.checks) == text
    assert back.checks == sc.checks
    assert bisect_optimum(back.config.costs) == bisect_optimum(sc.config.costs)


def run_cli(*args):
    return cli.main([str(a) for a in args])


def test_cli_check(capsys):
    assert run_cli("check", "paper_sec4") == 0
    out = capsys.readouterr().out
    assert "agent 3: K2=3.3166" in out
    assert "warning: Theorem 1" in out


def test_cli_optimum(capsys):
    assert run_cli("optimum", "paper_sec4") == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.692063067838, abs=1e-10)


def test_cli_recommend(capsys):
    assert run_cli("recommend", "--h-lo", 1, "--h-hi", 1, "--lambda2", 1, "--lambdaN", 2, "--eta", 0.5) == 0
    assert capsys.readouterr().out.split() == ["alpha", ">=", "6", "beta", ">=", "1008"]


def test_cli_config_error_exit_code(capsys):
    assert run_cli("check", "reference_agent3_singular") == 2
    assert "Assumption 3" in capsys.readouterr().err
    assert run_cli("run", "no/such/file.toml") == 2


def test_cli_run_artifacts(tmp_path):
    out = tmp_path / "r"
    assert run_cli("run", "paper_sec4", "--t-final", 2, "--out", out) == 0
    header = (out / "trace.csv").read_text().splitlines()[0].split(",")
    assert header == ["t"] + [f"{s}{i}" for s in "yzvu" for i in range(1, 5)]
    assert len((out / "trace.csv").read_text().splitlines()) == 2002
    assert (out / "events.csv").read_text().startswith("agent,kind,time\n")
    summary = read_summary(out / "summary.txt")
    assert summary["check.conservation_max"].startswith("pass")
    assert float(summary["y_star"]) == pytest.approx(0.692063067838, abs=1e-10)


def test_cli_continuous_has_no_events(tmp_path):
    out = tmp_path / "c"
    assert run_cli("run", "paper_sec4", "--mode", "continuous", "--t-final", 2, "--out", out) == 0
    assert (out / "events.csv").read_text() == "agent,kind,time\n"


def test_cli_seed_determinism(tmp_path):
    for name in ("a", "b"):
        assert run_cli("run", "paper_sec4", "--seed", 7, "--t-final", 1, "--out", tmp_path / name) == 0
    for f in ("trace.csv", "events.csv", "summary.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert run_cli("run", "paper_sec4", "--seed", 8, "--t-final", 1, "--out", tmp_path / "c") == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() != (tmp_path / "c" / "trace.csv").read_bytes()


def test_cli_failed_check_exit_code(tmp_path):
    raw = bundled_dict()
    raw["checks"] = {"final_error_max": 1e-12}
    raw["t_final"] = 0.5
    import tomli_w

    p = tmp_path / "strict.toml"
    p.write_text(tomli_w.dumps(raw))
    assert run_cli("run", p, "--out", tmp_path / "o") == 1


def test_cli_tail_check_on_short_horizon(tmp_path):
    raw = bundled_dict()
    raw["checks"] = {"tail_radius_max": 100.0, "min_interval_min": 0.0}
    import tomli_w

    p = tmp_path / "short.toml"
    p.write_text(tomli_w.dumps(raw))
    assert run_cli("run", p, "--t-final", 2, "--out", tmp_path / "o") == 0


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    raw = bundled_dict()
    raw["generator"]["alpha"] = 1e4
    raw["step"] = 1.0
    raw["t_final"] = 200.0
    import tomli_w

    p = tmp_path / "blowup.toml"
    p.write_text(tomli_w.dumps(raw))
    assert run_cli("run", p, "--mode", "continuous", "--out", tmp_path / "o") == 3
    assert "non-finite" in capsys.readouterr().err


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "s"
    assert run_cli("sweep", "paper_sec4", "--c0", "0,0.1", "--t-final", 2, "--out", out) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "c0,c_comm0,tail_radius,min_interval_ctrl,min_interval_comm,events_ctrl,events_comm"
    assert len(lines) == 3
    assert (out / "c0_0.1" / "trace.csv").exists()


def test_cli_sweep_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("sweep", "paper_sec4", "--c0", "")
    assert exc.value.code == 2
    assert run_cli("sweep", "paper_sec4", "--c0", "0.2,0.1", "--out", tmp_path) == 2
    assert "ascending" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "eventcons", "optimum", "paper_sec4"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("0.69206306")
