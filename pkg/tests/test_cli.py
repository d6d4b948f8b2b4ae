import io
import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from fgab.cli import ParseError, job_from_args, build_parser, main, parse_group, run
from fgab.groups import FgGroup

from helpers import groups

sys.path.insert(0, str(Path(__file__).parent / "golden"))
from cases import CASES, HERE, run_case  # noqa: E402

G = FgGroup


# -- golden transcripts ----------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    case = CASES[name]
    out, err, code = run_case(case)
    assert code == case.get("exit", 0)
    assert out == (HERE / f"{name}.out").read_text()
    assert err == (HERE / f"{name}.err").read_text()


def test_goldens_cover_every_command():
    from fgab.cli import COMMANDS

    seen = set()
    for case in CASES.values():
        if "job" in case:
            seen.add(case["job"]["command"])
        else:
            ns = build_parser().parse_args(case["argv"])
            seen.add(ns.command)
    assert set(COMMANDS) <= seen


def test_json_output_is_byte_exact():
    for name, case in CASES.items():
        text = (HERE / f"{name}.out").read_text()
        if text.startswith("{"):
            obj = json.loads(text)
            assert text == json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


# -- argv and job documents agree ------------------------------------------------------


ARGV_JOBS = [
    ["classify", "Z/4 + Z/6"],
    ["classify", "--generators", "2", "--relators", "[[2, 6], [4, 8]]"],
    ["sum", "Z/2", "Z/3"],
    ["tor", "Z/12", "Z/18"],
    ["extension-of", "Z/4", "Z/4", "2"],
    ["localize", "Z + Z/12", "--invert", "2,3"],
    ["localize", "Z/6", "--all"],
    ["padic", "mul", "-p", "5", "-K", "4", "7", "9"],
    ["padic", "val", "-p", "2", "-K", "3", "8"],
    ["colim", "--mult-by", "2", "Z + Z/12"],
]


@pytest.mark.parametrize("argv", ARGV_JOBS)
def test_argv_matches_job_document(argv, capsys, monkeypatch):
    job = job_from_args(build_parser().parse_args(argv))
    assert main(argv) == 0
    direct = capsys.readouterr().out
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(job)))
    assert main(["--json", "-"]) == 0
    assert capsys.readouterr().out == direct
    assert run(job)[1] + "\n" == direct


def test_job_file_and_out_override(tmp_path, capsys):
    path = tmp_path / "job.json"
    path.write_text(json.dumps({"command": "ext", "operands": {"A": "Z/4", "B": "Z/6"}, "options": {"out": "json"}}))
    assert main(["--json", str(path)]) == 0
    assert json.loads(capsys.readouterr().out) == {"factors": [2], "rank": 0}


def test_padic_val_infinite(capsys):
    assert main(["padic", "val", "-p", "2", "-K", "3", "8"]) == 0
    assert capsys.readouterr().out.strip() == "INFINITE_AT_PRECISION"


@pytest.mark.parametrize("argv", [
    ["snake"],
    ["bogus"],
    [],
    ["padic", "add", "-p", "2", "-K", "3", "1"],
    ["classify", "--generators", "2", "--relators", "[[1,"],
    ["--json", "/nonexistent/job.json"],
])
def test_malformed_argv_exits_one(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err.startswith("error: ")


def test_malformed_json_document(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("{not json"))
    assert main(["--out", "json", "--json", "-"]) == 1
    err = json.loads(capsys.readouterr().out)["error"]
    assert err["kind"] == "input"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "fgab", "tensor", "Z/4", "Z/6"], capture_output=True, text=True)
    assert (r.returncode, r.stdout) == (0, "Z/2\n")


# -- the group expression parser ------------------------------------------------------


def test_parse_examples():
    assert parse_group("Z^2 + Z/12") == G(2, (12,))
    assert parse_group("Z/2+Z/3") == G(0, (6,))
    assert parse_group("  Z ") == G(1)
    assert parse_group("0").is_trivial
    assert parse_group("Z^0 + Z/1").is_trivial


@pytest.mark.parametrize("text,pos", [
    ("Z/0", 2),
    ("Z + + Z", 4),
    ("Q", 0),
    ("Z/", 2),
    ("Z Z", 2),
    ("", 0),
    ("Z^x", 2),
])
def test_parse_error_positions(text, pos):
    with pytest.raises(ParseError) as err:
        parse_group(text)
    assert err.value.position == pos


def test_z0_hint():
    with pytest.raises(ParseError) as err:
        parse_group("Z + Z/0")
    assert err.value.hint == "use Z" and "use Z" in str(err.value)


@settings(max_examples=100, deadline=None)
@given(groups())
def test_render_parse_round_trip(a):
    assert parse_group(str(a)) == a
