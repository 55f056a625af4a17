"""``foliation-loci`` command line: one job file, one subcommand, JSON on stdout.

Exit status 0 on success, 1 for malformed input (arguments or job file),
2 when a mathematical precondition fails; the error class name is reported.
"""
from __future__ import annotations

import argparse
import json
import sys

import mpmath

from .algebra import format_poly, total_degree
from .connection import format_matrix, is_zero_matrix
from .errors import FoliationLociError, ParseError, SingularBBlock
from .foliation import flow_jet
from .gauss_manin import gauss_manin_matrix, picard_fuchs
from .jobfile import JobFile, parse_fraction
from .multiplicity import OrderBoundPolicy, leaf_multiplicity_oracle, multiplicity_operators, order_bound
from .periods import (
    KAPPA,
    beta_blocks,
    numeric_period_oracle,
    pairing_matrix,
    siegel_check,
    symplectic_normalize,
)
from .sigma import DEFAULT_SUBSET_CAP, a_locus, sigma_equations


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


def _int(value, name):
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name} must be an integer, got {value!r}") from exc


def _setting(args, job: JobFile, name, default=None):
    v = getattr(args, name, None)
    return v if v is not None else job.param(name, default)


def _policy(args, job) -> OrderBoundPolicy:
    mu = _setting(args, job, "mu")
    if mu is None or str(mu) == "heuristic":
        return OrderBoundPolicy("heuristic")
    return OrderBoundPolicy("fixed", _int(mu, "mu"))


def _k(args, job, default=None):
    k = _setting(args, job, "k", default)
    return None if k is None else _int(k, "k")


# ------------------------------------------------------------------ commands


def cmd_check_foliation(args, job: JobFile) -> dict:
    if "connection" in job.entries:
        job.require(["connection"])
        f = job.connection_foliation()
    else:
        job.require(["chart", "fields"])
        f = job.foliation()
    out = {
        "foliation": f.to_json(),
        "checks": {"commutation": "ok", "tangency": "ok", "independence": "ok"},
    }
    order = _setting(args, job, "order")
    if order is not None:
        out["flow_jet"] = flow_jet(f, _int(order, "order")).to_json()
    return out


def cmd_mult_ops(args, job: JobFile) -> dict:
    job.require(["chart", "fields", "polys"], ["point"])
    f = job.foliation()
    P = job.polys(f.chart)
    policy = _policy(args, job)
    k = _k(args, job)
    rigorous = True
    if k is None:
        k = order_bound(policy, f.n, f.degree(), max(total_degree(p) for p in P))
        rigorous = policy.rigorous
    ops = multiplicity_operators(P, f, k, rigorous=rigorous)
    out = {"polynomials": [format_poly(p) for p in ops.polynomials()], "metadata": ops.metadata()}
    point = job.point()
    if point is not None:
        m = leaf_multiplicity_oracle(P, f, point, 2 * k + 2)
        out["point"] = {
            "coordinates": [str(q) for q in point],
            "operators_vanish": ops.vanishes_at(point),
            "oracle_multiplicity": m if isinstance(m, int) else "above-cap",
        }
    return out


def _sigma_json(res) -> dict:
    return {
        "generators": res.generators.text(),
        "groebner": res.groebner().text(),
        "metadata": res.metadata(),
        "provenance": res.provenance,
    }


def cmd_sigma(args, job: JobFile) -> dict:
    job.require(["chart", "fields", "variety"])
    f = job.foliation()
    V = job.variety(f.chart)
    cap = _int(_setting(args, job, "subset_cap", DEFAULT_SUBSET_CAP), "subset_cap")
    res = sigma_equations(V, f, _k(args, job, 1), _policy(args, job), cap)
    return _sigma_json(res)


def cmd_a_locus(args, job: JobFile) -> dict:
    job.require(["chart", "fields", "variety"], ["params"])
    f = job.foliation()
    V = job.variety(f.chart)
    cap = _int(_setting(args, job, "subset_cap", DEFAULT_SUBSET_CAP), "subset_cap")
    res = a_locus(V, f, job.params(), _k(args, job, 1), _policy(args, job), cap)
    out = _sigma_json(res)
    out["parameters"] = job.params()
    return out


def cmd_gauss_manin(args, job: JobFile) -> dict:
    job.require(["family"], ["form"])
    fam = job.family()
    conn = gauss_manin_matrix(fam)
    out = {"family": fam.to_json(), "omega": conn.to_json()["omega"]}
    if "form" in job.entries and len(fam.base) == 1:
        form = job.form(fam)
        out["picard_fuchs"] = {"form": form.text(fam.xvar), "operator": picard_fuchs(fam, form, conn).to_json()}
    return out


def cmd_picard_fuchs(args, job: JobFile) -> dict:
    job.require(["family"], ["form"])
    fam = job.family()
    form = job.form(fam)
    return {"family": fam.to_json(), "form": form.text(fam.xvar), "operator": picard_fuchs(fam, form).to_json()}


def cmd_pairing(args, job: JobFile) -> dict:
    job.require(["family"], ["form"])
    fam = job.family()
    lam = pairing_matrix(fam)
    conn = gauss_manin_matrix(fam)
    flat = all(is_zero_matrix(D) for D in lam.flatness_defect(conn))
    return {"family": fam.to_json(), "pairing": format_matrix(lam.rows()), "checks": {"flat": flat}}


def cmd_normalize(args, job: JobFile) -> dict:
    job.require(["family"], ["form"])
    fam = job.family()
    lam = pairing_matrix(fam)
    nb = symplectic_normalize(fam, lam, gauss_manin_matrix(fam))
    sp = all(is_zero_matrix(D) for D in nb.sp_defect())
    out = nb.to_json()
    out["family"] = fam.to_json()
    out["checks"] = {"sp_identity": sp}
    return out


def _parse_lambda(text, dim) -> tuple:
    parts = [p for p in str(text).split(",")]
    if len(parts) != dim:
        raise ParseError(f"--lambda needs {dim} comma-separated rationals")
    return tuple(parse_fraction(p) for p in parts)


def cmd_periods(args, job: JobFile) -> dict:
    job.require(["family"], ["form"])
    fam = job.family()
    lam_text = _setting(args, job, "lambda")
    if lam_text is None:
        raise ParseError("periods needs --lambda")
    lam0 = _parse_lambda(lam_text, len(fam.base))
    prec = _int(_setting(args, job, "prec", 30), "prec")
    if prec < 5:
        raise ParseError("--prec must be at least 5")
    with mpmath.workdps(prec + 10):
        pm, _ = numeric_period_oracle(fam, lam0, prec)
        out = pm.to_json()
        out["kappa"] = KAPPA
        try:
            tau = beta_blocks(pm)
            sym, mineig = siegel_check(tau)
            out["beta"] = [[[float(mpmath.re(tau[i, j])), float(mpmath.im(tau[i, j]))]
                            for j in range(tau.cols)] for i in range(tau.rows)]
            out["siegel"] = {"symmetry_residual": sym, "min_imaginary_eigenvalue": mineig}
        except SingularBBlock as exc:
            out["beta"] = None
            out["siegel"] = {"error": type(exc).__name__}
    out["family"] = fam.to_json()
    return out


COMMANDS = {
    "check-foliation": (cmd_check_foliation, ["order"]),
    "mult-ops": (cmd_mult_ops, ["k", "mu"]),
    "sigma": (cmd_sigma, ["k", "mu", "subset-cap"]),
    "a-locus": (cmd_a_locus, ["k", "mu", "subset-cap"]),
    "gauss-manin": (cmd_gauss_manin, []),
    "picard-fuchs": (cmd_picard_fuchs, []),
    "pairing": (cmd_pairing, []),
    "normalize": (cmd_normalize, []),
    "periods": (cmd_periods, ["lambda", "prec"]),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foliation-loci", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name, (_, flags) in COMMANDS.items():
        p = sub.add_parser(name)
        for flag in flags:
            if flag == "mu":
                p.add_argument("--mu", help="integer or 'heuristic'")
            elif flag == "lambda":
                p.add_argument("--lambda", dest="lambda_", metavar="RAT")
            elif flag == "subset-cap":
                p.add_argument("--subset-cap", dest="subset_cap", type=int)
            else:
                p.add_argument(f"--{flag}", type=int)
        p.add_argument("job")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "lambda_"):
            args.__dict__["lambda"] = args.lambda_
        job = JobFile.load(args.job)
        result = COMMANDS[args.command][0](args, job)
    except ParseError as exc:
        print(f"error: ParseError: {exc}", file=stderr)
        return 1
    except FoliationLociError as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=stderr)
        stdout.write(json.dumps({"error": name, "message": str(exc)}, sort_keys=True) + "\n")
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=stderr)
        stdout.write(json.dumps({"error": name, "message": str(exc)}, sort_keys=True) + "\n")
        return 2
    stdout.write(json.dumps(result, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return 0


def main() -> None:
    sys.exit(run())
