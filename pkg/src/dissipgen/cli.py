"""Command-line front end: ``dissipgen {verify,evolve,spectrum,enumerate,synth}``.

Every subcommand reads one JSON config (``--config``) and writes JSON or
CSV to ``--out`` (stdout when omitted). Exit status is 0 on success, 1
when an invariant or domain condition fails and 2 for usage or schema
errors. Output files are written atomically.
"""

import argparse
import json
import os
import sys

import jsonschema
import numpy as np

from .algebra import DEFAULT_TOL
from .errors import DissipgenError
from .extension import (
    Contraction,
    build_extension,
    is_unitary_generator,
    sample_contraction,
)
from .pencil import check_skew_symmetric, pencil_from_json, pencil_invariants, pencil_to_json
from .quadruple import (
    closure_report,
    quadruple_from_form,
    quadruple_from_json,
    synth_pencil,
    verify_quadruple,
)
from .sbp import KINDS, model_from_json
from .selfadjoint import spectrum_csv
from .semigroup import propagate_cn, propagate_exact
from .serialization import csv_text, decode_matrix, decode_vector, dumps, write_atomic

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_NUM = {"type": "number"}
_ENTRY = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]}
_MATRIX = {"oneOf": [
    {"type": "object", "additionalProperties": False, "required": ["rows", "cols", "data"],
     "properties": {"rows": {"type": "integer", "minimum": 0},
                    "cols": {"type": "integer", "minimum": 0},
                    "data": {"type": "array", "items": _ENTRY}}},
    {"type": "array", "items": {"type": "array", "items": _ENTRY}},
]}
_PENCIL = {"type": "object", "additionalProperties": False, "required": ["dim", "a_max"],
           "properties": {"dim": {"type": "integer", "minimum": 1}, "weight": _MATRIX,
                          "a_max": _MATRIX, "core": _MATRIX}}
_QUADRUPLE = {"type": "object", "additionalProperties": False, "required": ["gm", "gp"],
              "properties": {"gm": _MATRIX, "gp": _MATRIX, "meta": {"type": "string"},
                             "pencil_ref": {}}}
_SYNTH = {"type": "object", "additionalProperties": False, "required": ["k0", "kp", "km"],
          "properties": {"k0": {"type": "integer", "minimum": 0},
                         "kp": {"type": "integer", "minimum": 0},
                         "km": {"type": "integer", "minimum": 0},
                         "seed": {"type": "integer"}}}
_MODEL = {"type": "object", "additionalProperties": False, "required": ["kind", "n"],
          "properties": {"kind": {"enum": list(KINDS)}, "n": {"type": "integer", "minimum": 1},
                         "m": {"type": "integer", "minimum": 1}, "a": _NUM, "b": _NUM,
                         "phi": _MATRIX}}
_TOL = {"type": "number", "exclusiveMinimum": 0}
_SOURCE = {"pencil": _PENCIL, "synth": _SYNTH, "quadruple": _QUADRUPLE}
_ONE_SOURCE = {"oneOf": [{"required": ["pencil"]}, {"required": ["synth"]}, {"required": ["model"]}]}

_GAUSSIAN = {"type": "object", "additionalProperties": False,
             "required": ["profile", "center", "width"],
             "properties": {"profile": {"const": "gaussian"}, "center": _NUM,
                            "width": {"type": "number", "exclusiveMinimum": 0},
                            "components": {"type": "array", "items": _NUM}}}
_GRID = {"oneOf": [
    {"type": "array", "items": _NUM, "minItems": 1},
    {"type": "object", "additionalProperties": False, "required": ["t_end", "steps"],
     "properties": {"t_start": _NUM, "t_end": _NUM, "steps": {"type": "integer", "minimum": 1}}},
]}

SCHEMAS = {
    "verify": {"type": "object", "additionalProperties": False,
               "oneOf": [{"required": ["pencil"]}, {"required": ["synth"]}],
               "properties": {**_SOURCE, "tol": _TOL, "seed": {"type": "integer"}}},
    "evolve": {"type": "object", "additionalProperties": False, **_ONE_SOURCE,
               "required": ["u0", "times"],
               "properties": {**_SOURCE, "model": _MODEL, "phi": _MATRIX,
                              "u0": {"oneOf": [{"type": "array", "items": _ENTRY}, _GAUSSIAN]},
                              "times": _GRID, "method": {"enum": ["exact", "cn"]},
                              "tol": _TOL, "seed": {"type": "integer"}}},
    "spectrum": {"type": "object", "additionalProperties": False, **_ONE_SOURCE,
                 "properties": {**_SOURCE, "model": _MODEL, "phi": _MATRIX,
                                "tol": _TOL, "seed": {"type": "integer"}}},
    "enumerate": {"type": "object", "additionalProperties": False, **_ONE_SOURCE,
                  "required": ["samples"],
                  "properties": {**_SOURCE, "model": _MODEL,
                                 "samples": {"type": "integer", "minimum": 0},
                                 "tol": _TOL, "seed": {"type": "integer"}}},
    "synth": {"type": "object", "additionalProperties": False, "required": ["k0", "kp", "km"],
              "properties": {**_SYNTH["properties"]}},
}


class UsageError(Exception):
    pass


def _load(path, command):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise UsageError(f"config does not match the {command} schema at {where}: {exc.message}") from exc
    return cfg


def resolve_tol(flag, cfg):
    if flag is not None:
        return flag
    if "tol" in cfg:
        return float(cfg["tol"])
    env = os.environ.get("DISSIPGEN_TOL")
    if env:
        try:
            val = float(env)
        except ValueError as exc:
            raise UsageError(f"DISSIPGEN_TOL is not a number: {env!r}") from exc
        if not val > 0:
            raise UsageError("DISSIPGEN_TOL must be positive")
        return val
    return DEFAULT_TOL


def _seed(flag, cfg, default=0):
    if flag is not None:
        return flag
    return int(cfg.get("seed", default))


def _system(cfg, seed):
    """``(model or None, quadruple, phi matrix or None)`` from a config."""
    try:
        if "model" in cfg:
            model, phi = model_from_json(cfg["model"])
            if "phi" in cfg:
                raise UsageError("with a model, phi belongs inside the model document")
            return model, model.quadruple, phi
        if "synth" in cfg:
            s = cfg["synth"]
            pencil = synth_pencil(s["k0"], s["kp"], s["km"], s.get("seed", seed))
        else:
            pencil = pencil_from_json(cfg["pencil"])
        if "quadruple" in cfg:
            q = quadruple_from_json(cfg["quadruple"], pencil)
        else:
            q = quadruple_from_form(pencil)
        phi = decode_matrix(cfg["phi"], q.q, q.p) if "phi" in cfg else None
        return None, q, phi
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def cmd_verify(args, cfg):
    tol = resolve_tol(args.tol, cfg)
    _, q, _ = _system(cfg, _seed(args.seed, cfg))
    reports = {
        "pencil": pencil_invariants(q.pencil, tol),
        "skew_symmetric": check_skew_symmetric(q.pencil, tol),
        "quadruple": verify_quadruple(q, tol),
        "closure": closure_report(q, tol),
    }
    passed = all(r.passed for r in reports.values())
    doc = {"passed": passed, "tol": tol, "reports": {k: r.to_dict() for k, r in reports.items()}}
    _emit(dumps(doc), args.out)
    for r in reports.values():
        for c in r.failures():
            print(f"FAIL {r.subject}.{c.name}: residual {c.residual:.3g} > {c.tolerance:.3g}",
                  file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def _initial_state(cfg, model, n):
    u0 = cfg["u0"]
    if isinstance(u0, list):
        try:
            return decode_vector(u0, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if model is None:
        raise UsageError("profile initial data needs a model")
    x = model.sbp.x
    g = np.exp(-0.5 * ((x - u0["center"]) / u0["width"]) ** 2)
    weights = u0.get("components", [1.0] + [0.0] * (model.components - 1))
    if len(weights) != model.components:
        raise UsageError(f"model has {model.components} components, got {len(weights)} weights")
    return model.field([w * g for w in weights])


def _time_grid(spec):
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    t0 = float(spec.get("t_start", 0.0))
    return np.linspace(t0, float(spec["t_end"]), int(spec["steps"]) + 1)


def cmd_evolve(args, cfg):
    tol = resolve_tol(args.tol, cfg)
    model, q, phi = _system(cfg, _seed(args.seed, cfg))
    if phi is None:
        raise UsageError("evolve needs a coupling phi")
    e = build_extension(q, Contraction(phi), tol)
    u0 = _initial_state(cfg, model, q.pencil.n)
    times = _time_grid(cfg["times"])
    if cfg.get("method", "exact") == "cn":
        if times[0] != 0.0:
            raise UsageError("Crank-Nicolson runs start at t = 0")
        dts = np.diff(times)
        if dts.size == 0 or not np.allclose(dts, dts[0], rtol=1e-12, atol=0.0):
            raise UsageError("Crank-Nicolson needs a uniform grid")
        traj = propagate_cn(e, u0, float(dts[0]), dts.size)
    else:
        try:
            traj = propagate_exact(e, u0, times)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    _emit(traj.to_csv(), args.out)
    summary = {"initial_energy": float(traj.energies[0]), "final_energy": float(traj.energies[-1])}
    print(json.dumps(summary, sort_keys=True), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def sorted_spectrum(ev):
    ev = np.asarray(ev, dtype=np.complex128)
    order = np.lexsort((-ev.imag, -ev.real))
    return ev[order]


def cmd_spectrum(args, cfg):
    """Eigenvalues of the extension; for the second-derivative model those of ``-i gen``."""
    tol = resolve_tol(args.tol, cfg)
    model, q, phi = _system(cfg, _seed(args.seed, cfg))
    if phi is None:
        raise UsageError("spectrum needs a coupling phi")
    e = build_extension(q, Contraction(phi), tol)
    op = -1j * e.gen if model is not None and model.kind == "second-derivative" else e.gen
    ev = np.linalg.eigvals(op) if op.size else np.zeros(0)
    _emit(spectrum_csv(sorted_spectrum(ev)), args.out)
    return EXIT_OK


def cmd_enumerate(args, cfg):
    tol = resolve_tol(args.tol, cfg)
    seed = _seed(args.seed, cfg)
    _, q, _ = _system(cfg, seed)
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(int(cfg["samples"])):
        phi = sample_contraction(rng, q.q, q.p)
        e = build_extension(q, phi, tol)
        lam = e.lambda_max_herm
        rows.append([k, q.p, q.q, phi.sigma_max, phi.sigma_min, -lam, int(lam <= tol),
                     int(is_unitary_generator(e, tol, cross_check=False)), int(phi.is_unitary)])
    header = ["sample", "p", "q", "sigma_max", "sigma_min", "dissipativity_margin",
              "dissipative", "unitary_generator", "unitary_phi"]
    _emit(csv_text(header, rows), args.out)
    return EXIT_OK


def cmd_synth(args, cfg):
    seed = _seed(args.seed, cfg)
    try:
        pencil = synth_pencil(cfg["k0"], cfg["kp"], cfg["km"], seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(dumps(pencil_to_json(pencil)), args.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "enumerate": cmd_enumerate,
    "synth": cmd_synth,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="dissipgen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--seed", type=int, metavar="N")
        sp.add_argument("--tol", type=float, metavar="X")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _load(args.config, args.command)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DissipgenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
