"""Command-line entry point.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numerical
failure, 4 geometry error. Output is written once, after the command has
succeeded, so a failing run leaves no partial report behind.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from . import calculus as calc
from . import operator as op
from . import slicefun as sf
from . import spectrum as spm
from . import verify
from .errors import (
    DivergenceError,
    GeometryError,
    NumericalFailure,
    SFCalcError,
    SpectrumError,
)
from .hypercomplex import Quaternion, basis_vector, imaginary_unit, quaternion_unit

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_GEOMETRY = 4

COMMANDS = ("spectrum", "verify", "funcalc", "riesz", "laplace")


@dataclass
class RunConfig:
    command: str
    input: list = field(default_factory=list)
    function: str = "exp"
    seed: int = 42
    instances: int = 20
    tol: Optional[float] = None
    nodes: int = 512
    slice_unit: Optional[str] = None
    radius: Optional[float] = None
    format: str = "json"
    output: Optional[str] = None
    subset: list = field(default_factory=list)
    side: str = "left"
    scalar: list = field(default_factory=list)
    verbosity: int = 0

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


class InputError(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="sfcalc", description="S-functional calculus toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", action="append", default=[], help="operator JSON file (repeatable)")
    p.add_argument("--function", default="exp", help="exp, sin, cos, one, x, x^k, poly:c0,c1,..., inv:a or inline JSON")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--tol", type=float, default=None, help="override every verification tolerance")
    p.add_argument("--nodes", type=int, default=512, help="quadrature nodes per circle")
    p.add_argument("--slice-unit", dest="slice_unit", default=None, help='"e1", "i" or a component list like "0.6,0.8"')
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None)
    p.add_argument("--subset", default="", help="comma separated sphere indices (riesz)")
    p.add_argument("--side", choices=("left", "right"), default="left")
    p.add_argument("--scalar", default="", help="comma separated components of s (laplace)")
    p.add_argument("-v", "--verbose", dest="verbosity", action="count", default=0)
    return p


def config_from_args(argv=None):
    a = build_parser().parse_args(argv)
    return RunConfig(
        command=a.command,
        input=list(a.input),
        function=a.function,
        seed=a.seed,
        instances=a.instances,
        tol=a.tol,
        nodes=a.nodes,
        slice_unit=a.slice_unit,
        radius=a.radius,
        format=a.format,
        output=a.output,
        subset=_int_list(a.subset),
        side=a.side,
        scalar=_float_list(a.scalar),
        verbosity=a.verbosity,
    )


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise SystemExit(f"sfcalc: bad index list {text!r}") from exc


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise SystemExit(f"sfcalc: bad number list {text!r}") from exc


# -- input helpers ---------------------------------------------------------


def load_operator(cfg):
    if not cfg.input:
        raise InputError("--input operator file is required")
    try:
        with open(cfg.input[0]) as fh:
            data = json.load(fh)
        return op.operator_from_json(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read operator from {cfg.input[0]}: {exc}") from exc


def slice_unit(cfg, T):
    text = cfg.slice_unit
    if text is None:
        return T.imaginary_units()[0]
    text = text.strip()
    if isinstance(T, op.QuaternionOperator):
        names = {"i": 0, "j": 1, "k": 2}
        if text in names:
            return T.imaginary_units()[names[text]]
        return quaternion_unit(_float_list(text), normalize=True)
    if text.startswith("e") and text[1:].isdigit():
        return basis_vector(int(text[1:]), T.n)
    parts = _float_list(text)
    if len(parts) != T.n:
        raise InputError(f"slice unit needs {T.n} components")
    return imaginary_unit(parts, normalize=True)


def _matrix_rows(M):
    return [[float(x) for x in row] for row in np.asarray(M)]


# -- commands --------------------------------------------------------------


def cmd_spectrum(cfg):
    T = load_operator(cfg)
    spec = spm.s_spectrum(T)
    bound = T.norm_bound()
    ok = spec.max_modulus() <= bound + 1e-9
    report = spec.to_json()
    report["norm_bound"] = bound
    report["norm_bound_ok"] = ok
    if isinstance(T, op.ParavectorOperator) and T.commuting:
        report["f_spectrum"] = spm.f_spectrum(T).to_json()["spheres"]
    if cfg.format == "csv":
        return EXIT_OK, _csv([("u", "v", "mult")] + [(sp.u, sp.v, sp.multiplicity) for sp in spec])
    return EXIT_OK, report


def cmd_verify(cfg):
    tol = verify.uniform_tolerances(cfg.tol) if cfg.tol is not None else None
    records = verify.run_suite(cfg.seed, cfg.instances, tol, cfg.nodes)
    failures = [r for r in records if not r["pass"]]
    code = EXIT_OK if not failures else EXIT_VERIFY
    if cfg.format == "csv":
        keys = ("instance", "seed", "n", "d", "identity", "residual", "tolerance", "pass")
        return code, _csv([keys] + [tuple(r[k] for k in keys) for r in records])
    report = {
        "seed": cfg.seed,
        "instances": cfg.instances,
        "nodes": cfg.nodes,
        "records": records,
        "failures": [{"instance": r["instance"], "identity": r["identity"]} for r in failures],
        "passed": not failures,
    }
    return code, report


def _function(cfg):
    try:
        return sf.parse_function(cfg.function)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc


def cmd_funcalc(cfg):
    T = load_operator(cfg)
    f = _function(cfg)
    spec = spm.s_spectrum(T)
    contour = calc.default_contour(T, slice_unit(cfg, T), cfg.nodes, cfg.radius, spec)
    result = calc.func_calc(f, T, contour, cfg.side, spec)
    report = result.to_json()
    report["function"] = f.to_json()
    if cfg.format == "csv":
        return EXIT_OK, _csv(_matrix_rows(result.value))
    return EXIT_OK, report


def cmd_riesz(cfg):
    T = load_operator(cfg)
    spec = spm.s_spectrum(T)
    subset = cfg.subset or list(range(len(spec)))
    bad = [k for k in subset if not 0 <= k < len(spec)]
    if bad:
        raise InputError(f"sphere indices {bad} out of range 0..{len(spec) - 1}")
    radius = cfg.radius if cfg.radius is not None else 0.25
    P, Tp = calc.riesz_projector(T, spec, subset, slice_unit(cfg, T), cfg.nodes, radius)
    res = calc.projector_residuals(T, P, Tp)
    if cfg.format == "csv":
        rows = [("subset", "idempotent", "commutes", "restriction")]
        rows.append((" ".join(map(str, subset)), res["idempotent"], res["commutes"], res["restriction"]))
        return EXIT_OK, _csv(rows)
    return EXIT_OK, {
        "subset": subset,
        "spectrum": spec.to_json()["spheres"],
        "P": _matrix_rows(P),
        "T_part": _matrix_rows(Tp),
        "residuals": res,
    }


def cmd_laplace(cfg):
    T = load_operator(cfg)
    if not cfg.scalar:
        raise InputError("--scalar is required")
    try:
        s = T.make_scalar(cfg.scalar)
    except (ValueError, SFCalcError) as exc:
        raise InputError(str(exc)) from exc
    value = calc.laplace_resolvent(T, s, cfg.side)
    closed = op.s_resolvent(T, s, cfg.side)
    if cfg.format == "csv":
        return EXIT_OK, _csv(_matrix_rows(value))
    return EXIT_OK, {
        "scalar": [float(x) for x in s.coeffs] if not isinstance(s, Quaternion) else s.to_json(),
        "side": cfg.side,
        "value": _matrix_rows(value),
        "closed_form_gap": op.opnorm(value - closed),
    }


HANDLERS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "funcalc": cmd_funcalc,
    "riesz": cmd_riesz,
    "laplace": cmd_laplace,
}


def _csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def run(cfg):
    """Run one command; returns ``(exit_code, payload, diagnostic)``."""
    try:
        code, payload = HANDLERS[cfg.command](cfg)
        return code, payload, None
    except InputError as exc:
        return EXIT_INPUT, None, str(exc)
    except GeometryError as exc:
        margins = getattr(exc, "margins", None)
        extra = f" margins={margins}" if margins else ""
        return EXIT_GEOMETRY, None, f"{exc}{extra}"
    except (SpectrumError, NumericalFailure, np.linalg.LinAlgError) as exc:
        return EXIT_NUMERIC, None, str(exc)
    except (DivergenceError, SFCalcError, ValueError) as exc:
        return EXIT_INPUT, None, str(exc)


def render(payload):
    if isinstance(payload, str):
        return payload
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def main(argv=None):
    cfg = config_from_args(argv)
    code, payload, diag = run(cfg)
    if diag:
        print(f"sfcalc: {diag}", file=sys.stderr)
    if payload is not None:
        text = render(payload)
        if cfg.output:
            with open(cfg.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if cfg.command == "spectrum" and code == EXIT_OK and isinstance(payload, dict):
        print(f"norm bound check: {'ok' if payload['norm_bound_ok'] else 'FAILED'}", file=sys.stderr)
    if cfg.command == "verify" and isinstance(payload, dict) and payload["failures"]:
        for f in payload["failures"]:
            print(f"sfcalc: failed {f['identity']} (instance {f['instance']})", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
