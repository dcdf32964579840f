import json

import pytest

from lambdagen import cli
from lambdagen.terms import is_closed, natural_size, parse_term
from lambdagen.simple_types import infer_type


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count(capsys):
    assert run(capsys, "count", "--class", "closed-typable", "--size", "10") == (0, "508\n", "")
    code, out, _ = run(capsys, "count", "--class", "plain-nf", "--size", "6", "--upto")
    assert out == "0,1,2,4,8,17,38\n"


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--class", "plain", "--size", "3")
    assert out.split() == ["s(s(0))", "l(s(0))", "l(l(0))", "a(0,0)"]
    code, out, _ = run(capsys, "enumerate", "--class", "closed-typable-nf", "--size", "5", "--with-types")
    assert out.splitlines() == ["l(l(l(s(0)))):(A->B->C->B)", "l(l(l(l(0)))):(A->B->C->D->D)",
                                "l(a(0,l(0))):(((A->A)->B)->B)"]
    code, _, err = run(capsys, "enumerate", "--class", "plain", "--size", "3", "--with-types")
    assert code == cli.EXIT_USAGE and "typable" in err


def test_densities_csv(capsys):
    code, out, _ = run(capsys, "densities", "--upto", "5")
    lines = out.splitlines()
    assert lines[0] == "size,A,B,C,D,E"
    assert lines[1] == "1,0,NA,0,NA,NA"
    assert lines[5] == "5,5,4.400,3,5.666,0.776"


def test_densities_text(capsys):
    code, out, _ = run(capsys, "densities", "--upto", "5", "--format", "text")
    assert code == 0 and "5.666" in out.splitlines()[-1]


def test_tune(capsys):
    code, out, _ = run(capsys, "tune", "--class", "plain", "--target-size", "120")
    assert code == 0
    x_line = next(l for l in out.splitlines() if l.startswith("x="))
    assert x_line.startswith("x=0.29558095907")
    assert "boltzmann_index=0.357000356964" in out


def test_tune_emit_round_trip(tmp_path, capsys):
    path = tmp_path / "nf.cfg"
    assert run(capsys, "tune", "--class", "nf", "--emit", "config", "--output", str(path))[0] == 0
    text = path.read_text()
    assert "boltzmann_nf_index=0.506275983749" in text
    code, out, _ = run(capsys, "sample", "--class", "typed-nf", "--min", "10", "--max", "20",
                       "--config", str(path), "--json")
    assert code == 0 and json.loads(out)["natural_size"] >= 11
    code, _, err = run(capsys, "sample", "--class", "typed", "--config", str(path))
    assert code == cli.EXIT_USAGE


def test_tune_bad_target(capsys):
    assert run(capsys, "tune", "--class", "plain", "--target-size", "0.5")[0] == cli.EXIT_USAGE


def test_sample_json(capsys):
    argv = ["sample", "--class", "typed", "--min", "5", "--max", "5", "--seed", "42", "--json"]
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    t = parse_term(doc["term"])
    assert code == 0 and is_closed(t) and infer_type(t) is not None
    assert doc["natural_size"] == natural_size(t) == 6
    assert set(doc) >= {"term", "type", "natural_size", "steps", "seed"}
    assert run(capsys, *argv)[1] == out


def test_sample_threads_json(capsys):
    code, out, _ = run(capsys, "sample", "--min", "20", "--max", "40", "--threads", "3", "--json")
    doc = json.loads(out)
    assert code == 0 and 0 <= doc["winner"] < 3 and doc["elapsed_ms"] >= 0


def test_sample_text(capsys):
    code, out, _ = run(capsys, "sample", "--class", "typed-nf", "--min", "8", "--max", "12", "--seed", "1")
    assert code == 0 and out.startswith("term=") and "natural_size=" in out


def test_sample_exhaustion(capsys):
    code, _, err = run(capsys, "sample", "--min", "150", "--max", "150", "--max-steps", "10")
    assert code == cli.EXIT_EXHAUSTED and "10 attempts" in err


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["count", "--class", "typed", "--size", "3"], ["count", "--class", "plain"],
    ["count", "--class", "plain", "--size", "-1"], ["sample", "--min", "9", "--max", "3"],
    ["sample", "--max-steps", "0"], ["densities", "--upto", "0"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == cli.EXIT_USAGE


def test_infer(capsys):
    assert run(capsys, "infer", "l(l(s(0)))") == (0, "(A->B->A)\n", "")
    assert run(capsys, "infer", "l(a(0,0))")[1] == "untypable\n"
    assert run(capsys, "infer", "--open", "a(0,s(0))")[1] == "A\n"
    code, _, err = run(capsys, "infer", "a(0")
    assert code == cli.EXIT_PARSE and "offset 4" in err


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    lines = out.splitlines()
    assert code == 0
    assert sum(l.startswith("PASS") for l in lines) == 16
    assert not any(l.startswith("FAIL") for l in lines)


def test_help_mentions_size_conventions(capsys):
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["--help"])
    out = capsys.readouterr().out
    assert "natural sizes" in out and "unit sizes" in out
