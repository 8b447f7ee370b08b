import json
import subprocess
import sys

import pytest

from curvecomplex import __version__, cli
from curvecomplex.classify import AuditReport

from oracles import torus_slope_curve


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 and out.strip() else None), err


def _curve(c):
    return ",".join(map(str, c))


REPORT_KEYS = {"schema", "schema_version", "tool_version", "command", "config", "universe", "seed", "wall_clock",
               "result", "result_sha256"}


@pytest.mark.parametrize("argv", [
    ["enumerate", "--surface", "0,5"],
    ["graph", "--surface", "0,5", "--edge-rule", "c0"],
    ["sphere", "--surface", "0,6", "--radius", "1"],
    ["census", "--surface", "0,6", "--radii", "0,1,2"],
    ["classify", "--surface", "0,5", "--check", "all"],
    ["project", "--surface", "1,2"],
    ["bgit", "--surface", "1,2", "--samples", "4", "--lipschitz"],
    ["push", "--surface", "2,2", "--origin", "first-nonseparating", "--radius", "1", "--samples", "2"],
    ["fill", "--surface", "0,6", "--radius", "2", "--samples", "3"],
])
def test_every_subcommand_reports(capsys, argv):
    code, rep, err = run(capsys, *argv)
    assert code == 0, err
    assert REPORT_KEYS <= set(rep)
    assert rep["tool_version"] == __version__ and rep["schema_version"] == 1
    assert rep["command"] == argv[0]
    assert rep["config"]["surface"] == [int(v) for v in argv[2].split(",")]
    assert rep["universe"]["fingerprint"] and rep["universe"]["curves"] > 0
    assert rep["wall_clock"]["seconds"] >= 0
    assert rep["result_sha256"] == cli.hashlib.sha256(cli._canonical(rep["result"]).encode()).hexdigest()


def test_enumerate_reports_cache_hit(capsys):
    run(capsys, "enumerate", "--surface", "1,2")
    code, rep, _ = run(capsys, "enumerate", "--surface", "1,2")
    assert code == 0 and rep["result"]["cache_hit"]
    assert rep["result"]["message"] == "cache hit, fingerprint verified"


def test_classify_reports_the_known_counterexamples(capsys):
    code, rep, _ = run(capsys, "classify", "--surface", "1,3", "--check", "good-vertices")
    assert code == 0
    assert rep["result"]["message"] == "162 violations"


def test_result_payload_is_bit_identical(capsys):
    argv = ["census", "--surface", "0,6", "--origin", "pants:1,2", "--radii", "0,1,2,3", "--seed", "4"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a["result_sha256"] == b["result_sha256"]
    assert json.dumps(a["result"], sort_keys=True) == json.dumps(b["result"], sort_keys=True)


def test_seeded_push_is_reproducible(capsys):
    argv = ["push", "--surface", "2,2", "--origin", "first-nonseparating", "--radius", "2", "--samples", "3",
            "--seed", "5"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a["result"] == b["result"]
    assert sum(a["result"]["status_counts"].values()) == a["result"]["loops_found"]


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nsurface = 0,5\nmax_weight = 3\nseed = 7\n")
    code, rep, _ = run(capsys, "enumerate", "--config", str(cfg), "--max-weight", "2")
    assert code == 0
    assert rep["config"]["max_weight"] == 2 and rep["seed"] == 7
    assert rep["universe"]["curves"] == 30


def test_graph_exports(capsys, tmp_path):
    dot, js = tmp_path / "g.dot", tmp_path / "g.json"
    code, rep, _ = run(capsys, "graph", "--surface", "0,5", "--dot", str(dot), "--graph-json", str(js))
    assert code == 0
    assert dot.read_text().count(" -- ") == rep["result"]["edges"]
    assert json.loads(js.read_text())["universe"] == rep["universe"]["fingerprint"]


def test_out_file(capsys, tmp_path):
    out = tmp_path / "sub" / "r.json"
    code, _, _ = run(capsys, "sphere", "--surface", "0,5", "--out", str(out))
    assert code == 0 and json.loads(out.read_text())["command"] == "sphere"


def test_farey_fill_of_an_explicit_loop(capsys):
    loop = ";".join(_curve(torus_slope_curve(p, q)) for p, q in ((1, 0), (0, 1), (1, 1)))
    code, rep, err = run(capsys, "fill", "--surface", "1,1", "--max-weight", "3", "--loop", loop)
    assert code == 0, err
    (row,) = rep["result"]["fills"]
    assert row["status"] == "FILLED" and row["faces"] == 1


@pytest.mark.parametrize("argv", [
    ["enumerate", "--surface", "0,3"],
    ["enumerate", "--surface", "x"],
    ["enumerate", "--surface", "0,5", "--max-weight", "0"],
    ["sphere", "--surface", "0,5", "--origin", "1,2,3"],
    ["sphere", "--surface", "0,5", "--origin", "pants:1,9"],
    ["census", "--surface", "0,5", "--radii", "a,b"],
    ["enumerate", "--surface", "0,6", "--ceiling", "5"],
    ["project", "--surface", "1,2", "--component", "7"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["exit_code"] == 2


def test_unknown_config_key_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("surfac = 0,5\n")
    assert run(capsys, "enumerate", "--config", str(cfg))[0] == 2


def test_io_errors_exit_3(capsys, tmp_path):
    assert run(capsys, "enumerate", "--surface", "0,5", "--config", str(tmp_path / "missing.cfg"))[0] == 3
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(capsys, "enumerate", "--surface", "0,5", "--out", str(blocker / "r.json"))[0] == 3


def test_c0_disagreement_exits_4(capsys, monkeypatch):
    def broken(cl, pairs):
        rep = AuditReport("c0_ambient", 1)
        rep.checked = 1
        rep.violations.append({"pair": "forced"})
        return rep
    monkeypatch.setattr(cli, "audit_c0_pairs", broken)
    code, _, err = run(capsys, "classify", "--surface", "0,5", "--check", "c0")
    assert code == 4 and "INVARIANT_VIOLATION" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "curvecomplex.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
