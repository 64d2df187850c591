"""Command-line front end.

    higherfermi phi37 --upto 10
    higherfermi theta --form B --upto 20 --out theta.json
    higherfermi lseries eval --l 2 --s "3+0i" --coeffs f.txt --maass u.txt
    higherfermi mellin-check --random 20 --seed 1
    higherfermi unfold-check --l 2 --s 3 --upto 200 --synthetic-r 5
    higherfermi scatter --model model.json --s 0.7+3i
    higherfermi fermi track --model model.json --order 4 --radius 0.05
    higherfermi fermi golden-rule --model model.json --n 2
    higherfermi fermi cone --cone cone.json
    higherfermi hessian --random 1000 --g 2 --m 2
    higherfermi cone --cone cone.json

Reports are JSON with sorted keys and contain nothing run-dependent; wall
time goes to a ``<out>.timing.json`` sidecar.  ``--config file.json`` supplies
any flag by its destination name; flags given on the command line win.
Exit status: 0 success, 1 domain error or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FermiError, HigherFermiError, LSeriesError

THREADS_ENV = "HIGHERFERMI_THREADS"
_INTERNAL = {"func", "_parser", "out", "csv", "config", "command", "subcommand"}


class CheckFailed(HigherFermiError):
    """A verification ran to completion but missed its tolerance."""


# ---------------------------------------------------------------------------
# argument types and JSON encoding
# ---------------------------------------------------------------------------

def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def existing_file(text: str) -> str:
    if not Path(text).is_file():
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return text


def positive_int(text) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def positive_float(text) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def jsonable(obj):
    """Convert results to JSON-ready values: complex -> [re, im], non-finite -> strings."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


# ---------------------------------------------------------------------------
# config and report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters for one run."""

    command: str
    params: dict
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for key, val in self.params.items():
            if "tol" in key and val is not None and not val > 0:
                raise HigherFermiError(f"{key} must be positive", code="cli.config")
            if isinstance(val, list) and not val:
                raise HigherFermiError(f"{key} must not be empty", code="cli.config")
        if self.threads < 1:
            raise HigherFermiError("thread count must be positive", code="cli.config")


@dataclass
class Report:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    status: str = "ok"
    error: dict | None = None

    def to_json(self) -> str:
        body = {
            "tool": {"name": "higherfermi", "version": __version__},
            "command": self.command,
            "inputs": jsonable(self.inputs),
            "outputs": jsonable(self.outputs),
            "status": self.status,
            "error": self.error,
        }
        return json.dumps(body, sort_keys=True, indent=2) + "\n"


@dataclass
class Outcome:
    outputs: dict
    table: tuple | None = None  # (header, rows)
    passed: bool = True


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_theta(args, cfg: ExperimentConfig) -> Outcome:
    from .qform import GRAM_B, GRAM_C, QuadraticForm, theta_coefficients

    if args.gram is not None:
        try:
            gram = json.loads(args.gram)
        except json.JSONDecodeError as exc:
            raise HigherFermiError(f"--gram is not JSON: {exc}", code="cli.gram") from exc
    else:
        gram = GRAM_B if args.form == "B" else GRAM_C
    form = QuadraticForm(tuple(tuple(row) for row in gram))
    r = theta_coefficients(form, args.upto).r
    out = {"gram": form.gram, "determinant": form.determinant, "upto": args.upto, "r": list(r)}
    return Outcome(out, (["n", "r_n"], list(enumerate(r))))


def _cmd_phi37(args, cfg) -> Outcome:
    from .qform import phi37_coefficients

    a = phi37_coefficients(args.upto)
    return Outcome({"upto": args.upto, "a": a}, (["n", "a_n"], list(enumerate(a, start=1))))


def _holomorphic(path, upto):
    from .forms import HolomorphicCuspForm, gamma37_form, ingest_coefficients

    if path is None:
        return gamma37_form(upto)
    f = ingest_coefficients(path)
    if not isinstance(f, HolomorphicCuspForm):
        raise HigherFermiError(f"{path} does not hold holomorphic coefficients", code="cli.coeffs")
    return f


def _maass(args, upto):
    from .forms import MaassFormData, ingest_coefficients

    if getattr(args, "maass", None):
        u = ingest_coefficients(args.maass)
        if not isinstance(u, MaassFormData):
            raise HigherFermiError(f"{args.maass} does not hold Maass coefficients", code="cli.maass")
        return u
    decay = args.synthetic_decay
    return MaassFormData(
        args.synthetic_r, args.parity, tuple(float(n) ** (-decay) for n in range(1, upto + 1)), source="synthetic"
    )


def _cmd_lseries_eval(args, cfg) -> Outcome:
    from .lseries import convolution_coefficients, evaluate, gamma_prefactor

    u = _maass(args, args.upto or 200)
    upto = args.upto or u.n_max
    f = _holomorphic(args.coeffs, upto)
    series = convolution_coefficients(f, args.l, upto)
    val = evaluate(series, u, args.s, upto, sigma_abs=args.sigma_abs)
    pref = gamma_prefactor(val.s, u.spectral_point)
    consistency = abs(val.completed / val.raw - pref) / abs(pref) if val.raw != 0 else 0.0
    out = {
        "s": val.s,
        "raw": val.raw,
        "completed": val.completed,
        "truncation_bound": val.truncation_bound,
        "terms": val.terms,
        "envelope": {"C": val.envelope.C, "delta": val.envelope.delta},
        "residuals": {"prefactor_consistency": consistency},
    }
    return Outcome(out)


def _cmd_mellin(args, cfg) -> Outcome:
    from .lseries import mellin_bessel_check

    if args.random:
        rng = np.random.default_rng(cfg.seed)
        pts = [
            (complex(rng.uniform(1.5, 4.0), rng.uniform(-2.0, 2.0)), complex(0.0, rng.uniform(0.1, 15.0)))
            for _ in range(args.random)
        ]
    else:
        ss = args.s or [complex(2.5)]
        nus = args.nu or [0j]
        pts = [(s, nu) for s in ss for nu in nus]
    rows, out_pts = [], []
    worst = 0.0
    for s, nu in pts:
        chk = mellin_bessel_check(s, nu, method=args.method)
        worst = max(worst, chk.residual)
        out_pts.append({"s": s, "nu": nu, "quadrature": chk.quadrature, "closed_form": chk.closed_form,
                        "residual": chk.residual, "quadrature_error": chk.quadrature_error})
        rows.append((s.real, s.imag, nu.real, nu.imag, chk.residual))
    passed = worst < args.tol
    out = {"points": out_pts, "max_residual": worst, "tolerance": args.tol, "passed": passed}
    return Outcome(out, (["re_s", "im_s", "re_nu", "im_nu", "residual"], rows), passed)


def _cmd_unfold(args, cfg) -> Outcome:
    from .lseries import unfolding_check

    u = _maass(args, args.upto)
    f = _holomorphic(args.coeffs, args.upto)
    rep = unfolding_check(f, u, args.l, args.s, args.upto, workers=cfg.threads)
    passed = rep.residual < args.tol
    out = {
        "l": rep.l,
        "s": rep.s,
        "upto": rep.upto,
        "quadrature_side": rep.quadrature_side,
        "closed_side": rep.closed_side,
        "residual": rep.residual,
        "quadrature_error": rep.quadrature_error,
        "maass": {"r": u.r, "parity": u.parity, "source": u.source},
        "tolerance": args.tol,
        "passed": passed,
    }
    return Outcome(out, passed=passed)


def _load_model(path):
    from .scatter import ScatteringModel, load_model

    return load_model(path) if path else ScatteringModel.modular()


def _cmd_scatter(args, cfg) -> Outcome:
    from .scatter import identity_residuals, phi_modular_dirichlet

    model = _load_model(args.model)
    pts = list(args.s or [])
    if args.random:
        rng = np.random.default_rng(cfg.seed)
        pts += [complex(rng.uniform(-0.5, 1.5), rng.uniform(0.5, 30.0) * rng.choice([-1, 1])) for _ in range(args.random)]
    if not pts:
        pts = [complex(2.0)]
    rows, out_pts = [], []
    worst = 0.0
    for s in pts:
        phi = model(s, args.eps)
        try:
            r1, r2 = identity_residuals(model, s, args.eps)
            worst = max(worst, r1, r2)
        except HigherFermiError:
            r1 = r2 = None  # the reflected point 1 - s is singular
        entry = {"s": s, "phi": phi, "reflection_residual": r1, "conjugation_residual": r2}
        if model.kind == "closed_form_modular" and s.real > 1.0 and args.euler_terms:
            val, tail = phi_modular_dirichlet(s, args.euler_terms)
            entry["euler_sum"] = val
            entry["euler_tail"] = tail
            entry["euler_relative_error"] = abs(val - phi) / abs(phi)
        out_pts.append(entry)
        rows.append((s.real, s.imag, phi.real, phi.imag, r1, r2))
    out = {"kind": model.kind, "eps": args.eps, "points": out_pts, "max_identity_residual": worst}
    return Outcome(out, (["re_s", "im_s", "re_phi", "im_phi", "reflection", "conjugation"], rows))


def _toy_model(path):
    model = _load_model(path)
    if model.trajectory is None:
        raise FermiError("this command needs a blaschke_family model", code="fermi.model")
    return model


def _cmd_fermi_track(args, cfg) -> Outcome:
    from .fermi import ContourSpec, count_singular, eps_derivatives, weighted_mean_re

    model = _toy_model(args.model)
    sj = model.trajectory.s_j
    contour = ContourSpec(sj.s, args.radius, args.nodes)
    d = eps_derivatives(model, sj, contour, args.order, args.h)
    winding = count_singular(model, contour, 0.0)
    eps_grid = np.linspace(-model.eps_max / 2, model.eps_max / 2, args.curve_points)
    rows = []
    for e in eps_grid:
        e = float(e)
        rows.append((e, weighted_mean_re(model, sj, contour, e), model.rho(e).real))
    out = {
        "s_j": sj.s,
        "contour": {"radius": args.radius, "nodes": args.nodes},
        "winding_at_zero": winding.count,
        "winding_residual": winding.residual,
        "h": d.h,
        "derivatives": list(d.values),
        "derivative_errors": list(d.errors),
        "curve_max_deviation": max(abs(a - b) for _, a, b in rows),
    }
    return Outcome(out, (["eps", "re_s_hat", "re_rho"], rows))


def _cmd_fermi_golden(args, cfg) -> Outcome:
    from .fermi import golden_rule_check

    model = _toy_model(args.model)
    rep = golden_rule_check(model, args.n, radius=args.radius, nodes=args.nodes, h=args.h)
    odd_ok = all(abs(v) < 1e-6 for v in rep.odd_derivatives)
    passed = rep.mismatch_residue < args.tol and rep.mismatch_real_part < args.tol and odd_ok
    out = dict(asdict(rep))
    out.update({"tolerance": args.tol, "odd_derivatives_vanish": odd_ok, "passed": passed})
    return Outcome(out, passed=passed)


def _cmd_cone(args, cfg) -> Outcome:
    from .fermi import TaylorCone, cone_check

    try:
        data = json.loads(Path(args.cone).read_text())
    except json.JSONDecodeError as exc:
        raise FermiError(f"cone file is not valid JSON: {exc}", code="fermi.cone") from exc
    cone = TaylorCone.from_json(data)
    rep = cone_check(cone, args.b1, args.b2, args.samples, seed=cfg.seed)
    passed = rep.all_negative and rep.symmetric
    out = dict(asdict(rep))
    out["passed"] = passed
    return Outcome(out, passed=passed)


def _cmd_hessian(args, cfg) -> Outcome:
    from .fermi import ResidueVector, hessian, parity_sparsity

    out = {}
    passed = True
    if args.residues:
        data = json.loads(Path(args.residues).read_text())
        m = int(data["m"])
        vecs = [ResidueVector(tuple(complex(*c) for c in v)) for v in data["vectors"]]
        h = hessian(vecs, m)
        out.update({"m": m, "h": h.h, "max_eigenvalue": h.max_eigenvalue})
    if args.random:
        rng = np.random.default_rng(cfg.seed)
        worst = -math.inf
        for _ in range(args.random):
            v = rng.normal(size=(2 * args.g, args.m)) + 1j * rng.normal(size=(2 * args.g, args.m))
            v *= rng.uniform(0.0, 3.0)
            worst = max(worst, hessian([tuple(row) for row in v], args.m).max_eigenvalue)
        passed = worst <= 1e-10
        out.update({"random_sets": args.random, "g": args.g, "m": args.m, "max_eigenvalue_over_sets": worst})
    if args.u_parity:
        mask = parity_sparsity(args.g, args.u_parity)
        out["mask"] = mask.astype(int)
        out["u_parity"] = args.u_parity
    out["passed"] = passed
    return Outcome(out, passed=passed)


# ---------------------------------------------------------------------------
# self tests (trivial examples of each module)
# ---------------------------------------------------------------------------

def _expect_error(fn, exc_type) -> bool:
    try:
        fn()
    except exc_type:
        return True
    return False


def _selftests(name: str) -> list[tuple[str, bool]]:
    from . import fermi, forms, lseries, qform, scatter, special

    checks: list[tuple[str, object]] = []
    if name == "theta":
        b = qform.QuadraticForm(qform.GRAM_B)
        checks = [
            ("r(0) = 1", lambda: qform.theta_coefficients(b, 3).r[0] == 1),
            ("r_B(1) = 2", lambda: qform.theta_coefficients(b, 3).r[1] == 2),
            ("odd diagonal rejected",
             lambda: _expect_error(lambda: qform.QuadraticForm(((1, 0), (0, 2))), HigherFermiError)),
        ]
    elif name == "phi37":
        checks = [("first ten coefficients",
                   lambda: qform.phi37_coefficients(10) == [1, -2, -3, 2, -2, 6, -1, 0, 6, 4])]
    elif name == "lseries":
        checks = [
            ("zero series", lambda: lseries.evaluate(np.zeros(10), None, 3.0, 10).raw == 0),
            ("single term", lambda: abs(lseries.evaluate(np.array([0, 0, 0, 0, 2.0]), None, 2.5, 5,
                                                         sigma_abs=2.0).raw - 0.08) < 1e-15),
            ("zero completes to zero", lambda: lseries.complete(0.0, 3.0, forms.SpectralPoint(2.0)).completed == 0),
            ("pole at s_j", lambda: _expect_error(lambda: lseries.complete(1.0, 0.5 + 2j, forms.SpectralPoint(2.0)),
                                                  LSeriesError)),
        ]
    elif name == "mellin-check":
        checks = [("closed form even in nu",
                   lambda: abs(lseries.mellin_bessel_closed(3.0, 1j) - lseries.mellin_bessel_closed(3.0, -1j)) == 0)]
    elif name == "unfold-check":
        def zero_case():
            f = forms.gamma37_form(20)
            u = forms.MaassFormData(5.0, "even", (1.0,) + (0.0,) * 19)
            rep = lseries.unfolding_check(f, u, 2, 3.0, 20)
            return rep.quadrature_side == 0 and rep.closed_side == 0
        checks = [("vanishing d_n", zero_case)]
    elif name == "scatter":
        m = scatter.ScatteringModel.blaschke(0.5 + 10j, [0.3j, -0.5], 0.2)
        rho = m.rho(0.1)
        checks = [
            ("reflection identity", lambda: scatter.identity_residuals(m, 0.3 + 4j, 0.1)[0] < 1e-13),
            ("simple pole winding", lambda: fermi.count_singular(m, fermi.ContourSpec(rho, 0.004, 128), 0.1).count == -1),
            ("unitary at eps = 0", lambda: abs(abs(m(0.5 + 3j, 0.0)) - 1.0) < 1e-15),
        ]
    elif name == "fermi":
        sj = forms.SpectralPoint(10.0)
        m = scatter.ScatteringModel.blaschke(sj, [0.3j, -0.5], 0.2)
        rho = m.rho(0.1)
        c = fermi.ContourSpec(sj.s, 0.25, 128)
        static = scatter.ScatteringModel.blaschke(sj, [0.0], 0.2)
        vertical = scatter.ScatteringModel.blaschke(sj, [1j], 0.1)
        checks = [
            ("pole only", lambda: fermi.count_singular(m, fermi.ContourSpec(rho, 0.005, 128), 0.1).count == -1),
            ("zero only", lambda: fermi.count_singular(m, fermi.ContourSpec(1 - rho.conjugate(), 0.005, 128), 0.1).count == 1),
            ("neither", lambda: fermi.count_singular(m, fermi.ContourSpec(sj.s + 0.1, 0.005, 128), 0.1).count == 0),
            ("static mean", lambda: fermi.weighted_mean_re(static, sj, c, 0.05) == 0.5),
            ("vertical motion", lambda: abs(fermi.weighted_mean_re(vertical, sj, c, 0.05) - 0.5) < 1e-15),
            ("static golden rule", lambda: abs(fermi.golden_rule_check(static, 1).residue_norm) < 1e-10),
        ]
    elif name == "hessian":
        checks = [
            ("zero residues", lambda: not fermi.hessian([(0j,), (0j,)], 1).h.any()),
            ("genus-1 corner", lambda: fermi.hessian([(0,), (2 + 1j,)], 1).h.tolist() == [[0, 0], [0, -5]]),
            ("parity sign", lambda: fermi.parity_of_D([-1, 1], [1, 3]) == -1),
            ("even mask g = 1", lambda: fermi.parity_sparsity(1, "even").tolist() == [[False, False], [False, True]]),
        ]
    elif name == "cone":
        checks = [
            ("sum of negatives", lambda: fermi.cone_check(fermi.TaylorCone({(0, 2): -1, (4, 0): -1}, 2)).all_negative),
            ("c02 = 0 rejected", lambda: _expect_error(
                lambda: fermi.cone_check(fermi.TaylorCone({(0, 2): 0, (4, 0): -1}, 2)), FermiError)),
        ]
    results = []
    for label, fn in checks:
        try:
            ok = bool(fn())
        except Exception:  # a crashing self test is a failing self test
            ok = False
        results.append((label, ok))
    if name in ("special",):
        results.append(("gamma(1) = 1", special.gamma(1) == 1))
    return results


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="write the JSON report here (timing goes to <out>.timing.json)")
    p.add_argument("--csv", help="write tabular/plot data here")
    p.add_argument("--config", type=existing_file, help="JSON file with flag values by destination name")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    p.add_argument("--threads", type=positive_int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--selftest", action="store_true", help="run this command's built-in trivial checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="higherfermi", description="Resonance-dissolving numerics toolkit.")
    parser.add_argument("--version", action="version", version=f"higherfermi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parent=sub):
        p = parent.add_parser(name, help=help_text, description=help_text)
        _common(p)
        p.set_defaults(func=func, _parser=p, selftest_name=name)
        return p

    p = add("theta", _cmd_theta, "representation numbers of a quadratic form")
    p.add_argument("--form", choices=["B", "C"], default="B")
    p.add_argument("--gram", help="Gram matrix as JSON (overrides --form)")
    p.add_argument("--upto", type=int)

    p = add("phi37", _cmd_phi37, "coefficients of the level-37 weight-2 form from theta series")
    p.add_argument("--upto", type=positive_int)

    lp = sub.add_parser("lseries", help="convolution L-series")
    lsub = lp.add_subparsers(dest="subcommand", required=True)
    p = add("eval", _cmd_lseries_eval, "evaluate the convolution series with a tail bound", lsub)
    p.set_defaults(selftest_name="lseries")
    p.add_argument("--l", type=positive_int, default=2)
    p.add_argument("--s", type=parse_complex, default=complex(3.0))
    p.add_argument("--coeffs", type=existing_file, help="holomorphic coefficient file (default: level-37 theta form)")
    p.add_argument("--maass", type=existing_file)
    p.add_argument("--upto", type=positive_int)
    p.add_argument("--sigma-abs", type=float, default=2.5)
    p.add_argument("--synthetic-r", type=positive_float, default=5.0)
    p.add_argument("--synthetic-decay", type=float, default=0.1)
    p.add_argument("--parity", choices=["even", "odd"], default="even")

    p = add("mellin-check", _cmd_mellin, "K-Bessel Mellin transform: quadrature vs closed form")
    p.add_argument("--s", type=parse_complex, nargs="+")
    p.add_argument("--nu", type=parse_complex, nargs="+")
    p.add_argument("--random", type=int, default=0, help="number of random points in the acceptance range")
    p.add_argument("--method", choices=["line", "direct"], default="line")
    p.add_argument("--tol", type=positive_float, default=1e-8)

    p = add("unfold-check", _cmd_unfold, "unfolding identity: y-quadrature vs completed sum")
    p.add_argument("--l", type=positive_int, default=2)
    p.add_argument("--s", type=parse_complex, default=complex(3.0))
    p.add_argument("--upto", type=positive_int, default=200)
    p.add_argument("--coeffs", type=existing_file)
    p.add_argument("--maass", type=existing_file)
    p.add_argument("--synthetic-r", type=positive_float, default=5.0)
    p.add_argument("--synthetic-decay", type=float, default=0.1)
    p.add_argument("--parity", choices=["even", "odd"], default="even")
    p.add_argument("--tol", type=positive_float, default=1e-6)

    p = add("scatter", _cmd_scatter, "evaluate a scattering model and its identities")
    p.add_argument("--model", type=existing_file, help="model JSON (default: full modular group)")
    p.add_argument("--s", type=parse_complex, nargs="+")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--euler-terms", type=int, default=100_000)

    fp = sub.add_parser("fermi", help="resonance tracking and dissolving tests")
    fsub = fp.add_subparsers(dest="subcommand", required=True)
    p = add("track", _cmd_fermi_track, "track Re s_hat(eps) and its eps-derivatives", fsub)
    p.set_defaults(selftest_name="fermi")
    p.add_argument("--model", type=existing_file)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--radius", type=positive_float, default=0.05)
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--h", type=positive_float)
    p.add_argument("--curve-points", type=positive_int, default=41)
    p = add("golden-rule", _cmd_fermi_golden, "check the order-2n golden-rule relations", fsub)
    p.set_defaults(selftest_name="fermi")
    p.add_argument("--model", type=existing_file)
    p.add_argument("--n", type=positive_int, default=1)
    p.add_argument("--radius", type=positive_float, default=0.25)
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--h", type=positive_float)
    p.add_argument("--tol", type=positive_float, default=0.01)
    for parent, name in ((fsub, "cone"), (sub, "cone")):
        p = add(name, _cmd_cone, "Taylor-cone negativity test", parent)
        p.set_defaults(selftest_name="cone")
        p.add_argument("--cone", type=existing_file)
        p.add_argument("--b1", type=positive_float, default=10.0)
        p.add_argument("--b2", type=positive_float, default=0.1)
        p.add_argument("--samples", type=positive_int, default=4000)

    p = add("hessian", _cmd_hessian, "Hessian of the dissolving functional and parity mask")
    p.add_argument("--residues", type=existing_file)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--g", type=positive_int, default=1)
    p.add_argument("--m", type=positive_int, default=1)
    p.add_argument("--u-parity", choices=["even", "odd"])
    return parser


_REQUIRED = {
    "theta": ["upto"],
    "phi37": ["upto"],
    "eval": [],
    "track": ["model"],
    "golden-rule": ["model"],
    "cone": ["cone"],
}


def _apply_config(args, parser):
    if not args.config:
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        args._parser.error(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        args._parser.error("config file must hold a JSON object")
    sub = args._parser
    for key, val in data.items():
        dest = key.replace("-", "_")
        if dest in _INTERNAL or not hasattr(args, dest):
            sub.error(f"unknown config key {key!r}")
        if getattr(args, dest) == sub.get_default(dest):
            action = next((a for a in sub._actions if a.dest == dest), None)
            if action is not None and action.type is not None and val is not None:
                if isinstance(val, list):
                    val = [action.type(v) if not isinstance(v, list) else action.type(complex(*v)) for v in val]
                else:
                    val = action.type(val)
            setattr(args, dest, val)


def _inputs(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _INTERNAL and k != "selftest_name"}


def _command_name(args) -> str:
    return f"{args.command} {args.subcommand}" if getattr(args, "subcommand", None) else args.command


def run(argv=None) -> tuple[int, Report | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (int(exc.code) if isinstance(exc.code, int) else 2), None
    try:
        _apply_config(args, parser)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2, None

    name = _command_name(args)
    threads = args.threads or int(os.environ.get(THREADS_ENV, "1") or 1)
    report = Report(name, _inputs(args))
    start = time.perf_counter()
    code = 0
    outcome = None
    if args.selftest:
        results = _selftests(args.selftest_name)
        passed = all(ok for _, ok in results)
        report.outputs = {"selftest": [{"check": n, "passed": ok} for n, ok in results], "passed": passed}
        report.status = "ok" if passed else "failed"
        code = 0 if passed else 1
    else:
        missing = [k for k in _REQUIRED.get(args._parser.prog.split()[-1], []) if getattr(args, k, None) is None]
        if missing:
            try:
                args._parser.error("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
            except SystemExit as exc:
                return int(exc.code), None
        try:
            cfg = ExperimentConfig(name, _inputs(args), args.seed, threads)
            outcome = args.func(args, cfg)
            report.outputs = outcome.outputs
            if not outcome.passed:
                raise CheckFailed("verification missed its tolerance", code=f"{args.selftest_name}.check_failed")
        except HigherFermiError as exc:
            report.status = "failed" if isinstance(exc, CheckFailed) else "error"
            report.error = {"code": exc.code, "message": str(exc)}
            code = 1
        except (ValueError, ArithmeticError) as exc:
            report.status = "error"
            report.error = {"code": "cli.invalid_value", "message": str(exc)}
            code = 1
    elapsed = time.perf_counter() - start

    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
        Path(args.out + ".timing.json").write_text(
            json.dumps({"command": name, "wall_clock_seconds": elapsed}, sort_keys=True) + "\n"
        )
    if outcome is not None and outcome.table is not None and args.csv:
        _write_csv(args.csv, *outcome.table)
    if not args.out:
        if args.command == "phi37" and outcome is not None and report.error is None:
            header, rows = outcome.table
            sys.stdout.write(",".join(header) + "\n" + "".join(f"{n},{a}\n" for n, a in rows))
        else:
            sys.stdout.write(text)
    if report.error is not None:
        print(f"higherfermi: {report.error['code']}: {report.error['message']}", file=sys.stderr)
    return code, report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
