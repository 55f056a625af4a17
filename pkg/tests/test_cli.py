import io
import json

import pytest

from foliation_loci.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def job(tmp_path, text, name="case.job"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_sigma_catalog(jobs_dir):
    code, out, _ = call("sigma", str(jobs_dir / "sigma_xy_dx.job"))
    assert code == 0
    data = json.loads(out)
    assert set(data["metadata"]) >= {"k", "mu", "rigorous", "subsets_used", "max_degree", "sum_degree"}
    assert data["metadata"]["rigorous"] is False
    code, out, _ = call("sigma", "--mu", "3", str(jobs_dir / "sigma_xy_dx.job"))
    assert json.loads(out)["metadata"]["rigorous"] is True


def test_mult_ops(jobs_dir):
    code, out, _ = call("mult-ops", str(jobs_dir / "mult_x2y3.job"))
    assert code == 0
    data = json.loads(out)
    assert data["point"]["operators_vanish"] is True
    assert data["point"]["oracle_multiplicity"] == 6
    code, out, _ = call("mult-ops", "--k", "6", str(jobs_dir / "mult_x2y3.job"))
    assert json.loads(out)["point"]["operators_vanish"] is False


def test_commutation_failure_exit_code(jobs_dir):
    code, out, err = call("check-foliation", str(jobs_dir / "noncommuting.job"))
    assert code == 2
    assert "CommutationFailure" in err
    assert json.loads(out)["error"] == "CommutationFailure"


def test_check_foliation_with_jet(jobs_dir):
    code, out, _ = call("check-foliation", str(jobs_dir / "commuting.job"))
    assert code == 0 and "flow_jet" in json.loads(out)


@pytest.mark.parametrize("argv", [
    ["sigma"],
    ["frobnicate", "x.job"],
    ["sigma", "--k", "one", "x.job"],
])
def test_argument_errors(argv):
    code, _, err = call(*argv)
    assert code == 1


def test_malformed_job(tmp_path):
    code, _, err = call("sigma", job(tmp_path, "chart { vars: [x, y]"))
    assert code == 1 and "ParseError" in err
    code, _, err = call("sigma", job(tmp_path, "chart { vars: [x, y] }\nfields: [[1, 0]]\nvariety { ideal: [x] }\nextra: 1"))
    assert code == 1


def test_precondition_errors(tmp_path):
    code, out, _ = call("sigma", "--k", "3", job(tmp_path, "chart { vars: [x, y] }\nfields: [[1, 0]]\nvariety { ideal: [x] }"))
    assert code == 2 and json.loads(out)["error"] == "InvalidOrder"
    code, out, _ = call("periods", "--lambda", "0", str(job(tmp_path, "family { f: x^3 - x^2 - lam*x^2 + lam*x; base: [lam] }")))
    assert code == 2 and json.loads(out)["error"] == "BranchPointCollision"
    code, out, _ = call("pairing", job(tmp_path, "family { f: x^4 + lam; base: [lam] }"))
    assert code == 2 and json.loads(out)["error"] == "FamilyError"


def test_family_commands(jobs_dir):
    code, out, _ = call("picard-fuchs", str(jobs_dir / "legendre.job"))
    assert code == 0
    assert json.loads(out)["operator"]["order"] == 2
    code, out, _ = call("pairing", str(jobs_dir / "legendre.job"))
    data = json.loads(out)
    assert data["pairing"] == [["0", "4"], ["-4", "0"]] and data["checks"]["flat"]
    code, out, _ = call("normalize", str(jobs_dir / "genus2.job"))
    assert json.loads(out)["checks"]["sp_identity"] is True
    code, out, _ = call("gauss-manin", str(jobs_dir / "constant.job"))
    assert json.loads(out)["picard_fuchs"]["operator"]["text"] == "d"


def test_periods_output(jobs_dir):
    code, out, _ = call("periods", "--lambda", "1/3", "--prec", "15", str(jobs_dir / "legendre.job"))
    assert code == 0
    data = json.loads(out)
    assert data["kappa"] == -1
    assert data["riemann_residual"] < 1e-8
    assert data["siegel"]["min_imaginary_eigenvalue"] > 0
    assert len(data["periods"]) == 2 and len(data["periods"][0][0]) == 2


def test_output_is_deterministic(jobs_dir):
    for name, cmd in [("sigma_y_exp.job", "sigma"), ("alocus_exp.job", "a-locus"), ("genus2.job", "gauss-manin")]:
        first = call(cmd, str(jobs_dir / name))
        assert first == call(cmd, str(jobs_dir / name))
