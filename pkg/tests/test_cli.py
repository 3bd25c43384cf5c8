import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from wordentropy.cli import run
from wordentropy.fileformats import parse_presentation


@pytest.fixture
def files(tmp_path):
    (tmp_path / "genus2.pres").write_text("m 4\nabABcdCD\n")
    (tmp_path / "uniform.json").write_text('{"m": 2, "weights": ["1/4", "1/4"], "normalized": true}')
    (tmp_path / "free.pres").write_text("m 2\n")
    return tmp_path


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    return code, capsys.readouterr()


def test_check_genus2_fails_with_witness(files, capsys):
    code, out = call(capsys, "check", "--presentation", files / "genus2.pres", "--lambda", "1/16")
    assert code == 1
    rep = json.loads(out.out)
    assert rep["holds"] is False
    assert len(rep["c_prime"]["witness"]["piece"]) == 1
    assert rep["params"]["lam"] == "1/16"


def test_check_variants(files, capsys):
    code, out = call(capsys, "check", "--presentation", files / "genus2.pres", "--lambda", "1/6",
                     "--condition", "cprime")
    assert code == 0 and json.loads(out.out)["holds"]
    code, out = call(capsys, "check", "--presentation", files / "free.pres", "--lambda", "1/16")
    assert code == 0 and "vacuously" in json.loads(out.out)["note"]


def test_entropy_free(files, capsys):
    code, out = call(capsys, "entropy", "free", "--m", "2", "--weights", files / "uniform.json",
                     "--format", "text")
    assert code == 0 and out.out.startswith("4.394449")
    code, out = call(capsys, "entropy", "free", "--m", "2", "--weights", "1,2")
    assert abs(json.loads(out.out)["h"] - 0.7563076126) < 1e-9


def test_entropy_bounds_and_ball(files, capsys):
    code, out = call(capsys, "entropy", "bounds", "--presentation", files / "genus2.pres",
                     "--lambda", "1/16")
    assert code == 1 and "fails" in json.loads(out.out)["error"]
    code, out = call(capsys, "entropy", "ball", "--presentation", files / "genus2.pres", "--radius", "2")
    assert code == 0 and json.loads(out.out)["ball_count"] == 65


def test_sample_presentation(files, capsys):
    target = files / "s.pres"
    code, out = call(capsys, "sample", "presentation", "--m", "2", "--ell", "100",
                     "--density", "1/20", "--seed", "7", "--output", target)
    assert code == 0
    p = parse_presentation(target.read_text())
    assert len(p.relators) == 243 and all(len(r) == 100 for r in p.relators)
    assert "seed=7" in target.read_text()


def test_count_growth_minimize(capsys):
    code, out = call(capsys, "count", "--m", "2", "--n-max", "3")
    assert json.loads(out.out)["g"] == [1, 5, 17, 53]
    code, out = call(capsys, "growth", "--m", "2", "--weights", "1,2")
    rep = json.loads(out.out)
    assert abs(rep["p_root"] - rep["automaton_growth"]) < 1e-6
    code, out = call(capsys, "minimize", "--m", "3")
    rep = json.loads(out.out)
    assert rep["converged"] and rep["w_rational"] == ["1/6"] * 3
    assert abs(rep["h"] - 6 * math.log(5)) < 1e-8


def test_experiment_csv(files, capsys):
    code, out = call(capsys, "experiment", "--ells", "40", "--trials", "4", "--seed", "1",
                     "--threads", "2")
    assert code == 0
    assert out.out.splitlines()[0].startswith("m,ell,lambda,trials")


def test_demo(capsys):
    code, out = call(capsys, "demo", "nonstrict")
    assert code == 0
    assert all(r["all_distances_equal_two_generator_metric"] for r in json.loads(out.out)["segment"])


def test_exit_codes(files, capsys):
    assert call(capsys, "check", "--presentation", files / "genus2.pres", "--lambda", "1/x")[0] == 2
    assert call(capsys, "check", "--presentation", files / "missing.pres", "--lambda", "1/2")[0] == 2
    assert call(capsys, "sample", "word", "--m", "2", "--ell", "5")[0] == 2  # no seed
    assert call(capsys, "count", "--m", "2", "--n-max", "3", "--weights", "1/2,1")[0] == 2
    assert call(capsys, "entropy", "ball", "--presentation", files / "genus2.pres",
                "--radius", "9", "--node-limit", "50")[0] == 3


def test_module_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "wordentropy", "entropy", "free", "--m", "3",
                          "--format", "text"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("9.656627")


@pytest.mark.property
@given(st.integers(0, 2**63 - 1), st.integers(1, 40), st.booleans())
def test_reports_carry_params_and_seed(seed, ell, cyclic):
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    argv = ["sample", "word", "--m", "2", "--ell", str(ell), "--seed", str(seed)]
    with redirect_stdout(buf):
        assert run(argv + (["--cyclic"] if cyclic else [])) == 0
    rep = json.loads(buf.getvalue())
    assert rep["params"]["seed"] == seed and rep["params"]["ell"] == ell
    assert len(rep["word"]) == ell
