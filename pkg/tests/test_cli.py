import io
import json
import math

import pytest

from fockspace.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_embed_decide_example():
    code, out, _ = call("embed-decide", "--n", 1, "--ell", 2, "--p", 2, "--q", 2, "--beta", 1,
                        "--gamma", 1, "--rho", 0, "--eta", 0)
    assert code == EXIT_OK
    assert json.loads(out) == {"decision": True, "branch": "2"}


def test_embed_decide_exact_rationals():
    # 2n(l-1)(1/p - 1/q) = 1/2 equals rho - eta exactly
    args = ["embed-decide", "--n", 1, "--ell", 2, "--p", 2, "--q", 4, "--beta", "1/3",
            "--gamma", "1/3", "--eta", "0.1"]
    assert json.loads(call(*args, "--rho", "0.6")[1])["decision"] is True
    assert json.loads(call(*args, "--rho", "0.59999")[1]) == {"decision": False, "branch": "none"}


def test_proj_decide_kappa_is_string():
    code, out, _ = call("proj-decide", "--n", 1, "--ell", 2, "--p", 2, "--q", 2, "--alpha", 1,
                        "--beta", "1/2", "--gamma", "2/3")
    assert code == EXIT_OK
    assert json.loads(out) == {"decision": True, "branch": "2", "kappa": "2/3"}


def test_ml_eval_exp():
    code, out, _ = call("ml-eval", "--a", 1, "--b", 1, "--m", 0, "--re", 1, "--im", 0)
    res = json.loads(out)
    assert code == EXIT_OK
    assert res["log_mag"] == pytest.approx(1.0, rel=1e-15)
    assert res["phase"] == 0.0 and res["branch"] == "series" and res["warn"] == []


def test_kernel_eval_accepts_negative_complex():
    code, out, _ = call("kernel-eval", "--n", 1, "--ell", 1, "--alpha", 1, "--z", -2,
                        "--w", "-0.5+1e-3j")
    res = json.loads(out)
    assert code == EXIT_OK
    # exp(z conj(w)) with z conj(w) = 1 + 0.002i
    assert res["log_mag"] == pytest.approx(1.0) and res["phase"] == pytest.approx(0.002)


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["embed-decide", "--n", "1"],
    ["embed-decide", "--n", "1", "--ell", "x", "--p", "2", "--q", "2", "--beta", "1", "--gamma", "1"],
    ["embed-decide", "--n", "1", "--ell", "1/2", "--p", "2", "--q", "2", "--beta", "1", "--gamma", "1"],
    ["kernel-eval", "--n", "2", "--ell", "1", "--alpha", "1", "--z", "1", "--w", "1"],
    ["verify-all", "--suites", "nope"],
])
def test_usage_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_USAGE
    assert "error" in err and "usage" in err


def test_help_exits_cleanly(capsys):
    assert run(["embed-decide", "--help"]) == EXIT_OK
    assert "--gamma" in capsys.readouterr().out


def test_kernel_verify_csv_and_failure_code():
    args = ("kernel-verify", "--n", 1, "--ell", 2, "--radii", "0.5:10:3", "--angles", 0, 0.1)
    code, out, _ = call(*args)
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "re,im,in_sector,ratio" and len(lines) == 7
    assert call(*args, "--c-max", 1.01)[0] == EXIT_FAIL


def test_lemma_check_trivial_sup():
    code, out, _ = call("lemma-check", "--which", "sup", "--alpha", 1, "--beta", 0,
                        "--grid", 0, 3, 10)
    assert code == EXIT_OK
    rows = out.splitlines()[1:]
    assert [float(r.split(",")[2]) for r in rows] == [1.0, 1.0, 1.0]


def test_norm_check_rkhs_and_band_failure():
    code, out, _ = call("norm-check", "--n", 1, "--ell", 1, "--p", 2, "--radii", "0:2:3")
    assert code == EXIT_OK
    ratios = [float(r.split(",")[3]) for r in out.splitlines()[1:]]
    assert all(abs(r - 1) < 1e-10 for r in ratios)
    code, _, _ = call("norm-check", "--n", 1, "--ell", 2, "--p", 4, "--radii", 0, 2,
                      "--c-max", 1.0001)
    assert code == EXIT_FAIL


def test_project_reproduces_monomial():
    code, out, _ = call("project", "--alpha", 1, "--ell", 2, "--f", "z^2", "--z", 0.5, "1+1j")
    vals = json.loads(out)
    assert code == EXIT_OK
    assert vals[0]["value"]["re"] == pytest.approx(0.25, rel=1e-12)
    assert vals[1]["value"]["im"] == pytest.approx(2.0, rel=1e-12)


def test_project_verify_divergence_branch():
    code, out, _ = call("project-verify", "--alpha", 1, "--beta", 2)
    assert code == EXIT_OK
    assert out.splitlines()[1].startswith("divergence,borderline,")


def test_project_rejects_inadmissible_sample():
    code, _, err = call("project", "--alpha", 1, "--beta", 2, "--f", "borderline", "--z", 0.5)
    assert code == EXIT_USAGE and "error" in err


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_counterexample_config_determinism(tmp_path):
    cfg = _write(tmp_path, "run.toml", """
seed = 5
[counterexample]
beta = 1
ell = 2
p = 4
q = 2
sizes = ["3:5:2"]
trials = 9
""")
    verdict = str(tmp_path / "v.json")
    a = call("counterexample", "--config", cfg, "--verdict", verdict)
    b = call("counterexample", "--config", cfg)
    assert a[0] == EXIT_OK and a[1] == b[1]
    lines = a[1].splitlines()
    assert lines[0] == "R_max,trial,ratio" and len(lines) == 1 + 2 * 9
    v = json.loads(open(verdict).read())
    assert v["verdict"] == "unbounded" and v["embeds"] is False and v["consistent"] is True
    assert json.loads(b[2]) == v
    c = call("counterexample", "--config", cfg, "--seed", 6)
    assert c[1] != a[1]


@pytest.mark.parametrize("text", [
    "sed = 1\n",
    "[counterexample]\nbogus = 2\n",
    "[norm-check]\nradii = 3\nwhatever = 1\n",
    "[quad]\nnodes = 12\n",
    "[quad]\nrel_tol = 2.0\n",
    "[embed-decide]\nell = 'x'\n",
    "seed = 'a'\n",
    "not toml = = 1\n",
])
def test_config_rejects_bad_input(tmp_path, text):
    cfg = _write(tmp_path, "bad.toml", text)
    code, _, err = call("ml-eval", "--config", cfg, "--a", 1, "--b", 1)
    assert code == EXIT_USAGE and "error" in err


def test_config_flags_override_file(tmp_path):
    cfg = _write(tmp_path, "c.toml", "[ml-eval]\na = 1\nb = 1\nre = 2\n")
    assert json.loads(call("ml-eval", "--config", cfg)[1])["log_mag"] == pytest.approx(2.0)
    assert json.loads(call("ml-eval", "--config", cfg, "--re", 3)[1])["log_mag"] == pytest.approx(3.0)


def test_jobs_do_not_change_output(tmp_path):
    args = ("lemma-check", "--which", "cm", "--a", 1, "--b", 2, "--ell", 2, "--n", 2,
            "--grid", "1:4:4")
    one = call(*args)
    two = call(*args, "--jobs", 2)
    assert one[0] == EXIT_OK and one[1] == two[1]


def test_output_file(tmp_path):
    path = tmp_path / "o.json"
    code, out, _ = call("ml-eval", "--a", "1/2", "--b", "1/2", "--re", 1, "--out", path)
    assert code == EXIT_OK and out == ""
    res = json.loads(path.read_text())
    # E_{1/2,1/2}(1) = 1/sqrt(pi) + E_{1/2,1}(1) with E_{1/2,1}(1) = e erfc(-1)
    ref = 1 / math.sqrt(math.pi) + math.e * math.erfc(-1.0)
    assert math.exp(res["log_mag"]) == pytest.approx(ref, rel=1e-13)


def test_verify_all_summary_schema():
    code, out, err = call("verify-all", "--suites", "decide", "mittag", "kernel")
    assert code == EXIT_OK
    summary = json.loads(out)
    assert [s["suite"] for s in summary] == ["decide", "mittag", "kernel"]
    for s in summary:
        assert set(s) == {"suite", "cases", "max_ratio", "stable", "pass"}
        assert s["pass"] is True
    assert err.count("PASS") == 3
