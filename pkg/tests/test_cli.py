import io
import json
import subprocess
import sys

import pytest

from eternal_pursuit.cli import EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, cmd_play, build_parser, run
from eternal_pursuit.graph import generate, parse_edge_list


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_solve_path():
    code, out, _ = call("solve", "path:6", "--t", "2")
    assert code == EXIT_OK and out.splitlines()[0] == "value 2"
    assert "fixpoint rounds" in out


def test_solve_json_and_decision():
    code, out, _ = call("solve", "spider:3x4", "--t", "5", "--k", "1", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["wins"] is False and doc["configs"] == 13
    code, out, _ = call("solve", "spider:3x4", "--t", "5", "--json")
    assert json.loads(out)["value"] == 2


def test_solve_writes_strategy(tmp_path):
    from eternal_pursuit.strategy import StrategyTable
    f = tmp_path / "s.json"
    code, _, err = call("solve", "path:5", "--t", "2", "--strategy-out", str(f))
    assert code == EXIT_OK and "written" in err
    table = StrategyTable.from_json(f.read_text(), graph=generate("path:5"))
    assert table.k == 2 and table.certified


def test_capt():
    assert call("capt", "cycle:4", "--k", "1")[1].strip() == "infinite"
    assert call("capt", "path:7", "--k", "1")[1].strip() == "3"


def test_bound_all_and_named():
    code, out, _ = call("bound", "spider:3x4", "--t", "5")
    assert code == EXIT_OK and "tree-decomposition" in out and "exact value 2" in out
    code, out, _ = call("bound", "grid:3x3", "--t", "2", "--which", "cartesian-grid-lower", "--json")
    doc = json.loads(out)
    assert [b["name"] for b in doc["bounds"]] == ["cartesian-grid-lower"]
    assert doc["bounds"][0]["consistent"]
    code, _, err = call("bound", "path:4", "--t", "2", "--which", "no-such-bound")
    assert code == EXIT_USAGE and "does not apply" in err


def test_bound_reports_violation():
    # the asymptotic Cartesian upper bound fails on a 2x2 grid with a long horizon
    code, out, _ = call("bound", "grid:2x2", "--t", "6")
    assert code == EXIT_MISMATCH and "VIOLATED" in out


def test_gen_round_trip(tmp_path):
    code, out, _ = call("gen", "spider:3x4")
    assert code == EXIT_OK
    g = parse_edge_list(out)
    assert g.digest() == generate("spider:3x4").digest()
    f = tmp_path / "g.txt"
    f.write_text(out)
    code, out, _ = call("gen", str(f), "--json")
    assert json.loads(out)["digest"] == g.digest()


def test_reduce(tmp_path):
    inst = tmp_path / "cover.txt"
    inst.write_text("2 2 1\n1\n1 2\n")
    roles = tmp_path / "roles.json"
    code, out, _ = call("reduce", str(inst), "--t", "2", "--roles", str(roles))
    assert code == EXIT_OK
    g = parse_edge_list(out)
    assert g.n == 10 and len(json.loads(roles.read_text())["roles"]) == 10
    code, _, err = call("reduce", str(tmp_path / "missing.txt"), "--t", "2")
    assert code == EXIT_USAGE


def test_verify_paths_suite():
    code, out, _ = call("verify", "--suite", "paths", "--max-n", "8", "--max-t", "4")
    assert code == EXIT_OK and out.strip().endswith("32 checks, 0 mismatches")
    code, out, _ = call("verify", "--suite", "cycles", "--max-n", "6", "--max-t", "2", "--json")
    doc = json.loads(out)
    assert doc["mismatches"] == 0 and len(doc["instances"]) == doc["checked"] == 8


def test_verify_is_identical_across_job_counts():
    one = call("verify", "--suite", "trees", "--max-n", "6", "--max-t", "2", "--json", "--jobs", "1")[1]
    two = call("verify", "--suite", "trees", "--max-n", "6", "--max-t", "2", "--json", "--jobs", "2")[1]
    assert one == two


def test_verify_exit_code_on_mismatch():
    # t = 5 takes the grid upper bound past its range of validity
    code, out, _ = call("verify", "--suite", "grids", "--max-n", "4", "--max-t", "5")
    assert code == EXIT_MISMATCH and "FAIL" in out


@pytest.mark.parametrize("argv", [
    ["solve", "path:3"],
    ["solve", "path:3", "--t", "0"],
    ["solve", "path:3", "--t", "1", "--json", "--text"],
    ["frobnicate"],
    ["solve", "nonsense:3", "--t", "1"],
    ["verify", "--suite", "everything"],
])
def test_usage_errors(argv):
    assert call(*argv)[0] == EXIT_USAGE


def test_budget_exit_code():
    code, _, err = call("solve", "grid:3x3", "--t", "1", "--budget", "10")
    assert code == EXIT_BUDGET and "budget" in err


def play(script, *argv):
    args = build_parser().parse_args(["play", *argv])
    out, err = io.StringIO(), io.StringIO()
    code = cmd_play(args, out, err, stdin=io.StringIO(script))
    return code, out.getvalue(), err.getvalue()


def test_play_worked_example():
    code, out, _ = play("12\n\n\n\n\nq\n", "spider:3x4", "--t", "5", "--k", "2")
    assert code == EXIT_OK
    assert "play 1: robber captured at 12 after 4 step(s)" in out


def test_play_rejects_illegal_input_without_changing_state():
    # one cop starts on vertex 0 of P7; the robber sits at 6 and tries to jump
    code, out, err = play("0\nfoo\n9\n6\n3\n6\n\n\n\n\n\nq\n", "path:7", "--t", "6", "--k", "1")
    assert code == EXIT_OK
    assert "occupied" in err and "not a vertex" in err and "no vertex 9" in err
    assert "not adjacent" in err
    lines = out.splitlines()
    assert sum("place:" in ln for ln in lines) == 1
    assert "play 1: robber captured at 6 after 6 step(s); cops [6]" in out


def test_play_many_plays_all_captured():
    script = "".join(f"{v}\n\n\n\n" for v in (0, 4, 2, 1, 3, 0, 4))
    code, out, _ = play(script + "q\n", "path:5", "--t", "2")
    captures = [ln for ln in out.splitlines() if "captured" in ln]
    assert captures and all("after 1 step" in ln or "after 2 step" in ln for ln in captures)
    assert "escaped" not in out


def test_play_falls_back_when_cops_cannot_win():
    code, out, err = play("12\n\n\n\n\n\n\nq\n", "spider:3,3,5", "--t", "5", "--k", "1")
    assert "single-play" in err


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "eternal_pursuit.cli", "solve", "path:6", "--t", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("value 2")
