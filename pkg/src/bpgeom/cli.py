"""Command line front end: ``bp <subcommand> [options]``.

Bodies are read from JSON files ``{"n": int, "shape": str, "params": {...}}``.
Results go to stdout (or ``--out``) as canonical JSON unless ``--format``
asks for csv or svg. Exit status: 0 success, 2 invalid input, 3 numerical
failure, with a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bodies import body_from_spec, validate_body
from .core import CurvatureModel, as_direction, basis_vector
from .engine import bp_compare, counterexample_hyperbolic, counterexample_sphere
from .errors import BPError, NumericalError, ValidationError
from .geometry import ConvexitySpec, classify_convexity
from .harmonic import (HomogeneousSpec, fourier_minkowski_power, parseval_pairing, spherical_radon,
                       zonal_fourier)
from .measures import parallel_section_profile, section_volume, volume
from .quadrature import QuadratureSpec
from .report import FORMATS, canonical_json, render_report
from .zonal import ZonalFunction

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_INTERNAL = 0, 2, 3, 1


def _load_body(path: str):
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"body file not found: {path}")
    try:
        spec = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return body_from_spec(spec)


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()], dtype=float)
    except ValueError:
        raise ValidationError(f"expected comma separated numbers, got {text!r}") from None


def _spec(args) -> QuadratureSpec:
    return QuadratureSpec(args.resolution) if args.resolution else QuadratureSpec()


def _xi(args, n: int) -> np.ndarray:
    return basis_vector(n, 0) if args.xi is None else as_direction(_floats(args.xi), n, tol=1e-9)


def _model_body(args):
    body = _load_body(args.body)
    model = CurvatureModel.from_flag(args.model)
    validate_body(body, model)
    return body, model


# -- subcommands -------------------------------------------------------------

def cmd_volume(args):
    body, model = _model_body(args)
    return {"model": model.name, "n": body.n, "volume": volume(body, model, _spec(args))}


def cmd_section(args):
    body, model = _model_body(args)
    xi = _xi(args, body.n)
    return {"model": model.name, "n": body.n, "xi": xi,
            "section_volume": section_volume(body, model, xi, _spec(args))}


def cmd_profile(args):
    body = _load_body(args.body)
    validate_body(body)
    xi = _xi(args, body.n)
    zs = _floats(args.zs) if args.zs else np.linspace(-0.5, 0.5, 11)
    prof = parallel_section_profile(body, xi, zs, QuadratureSpec(args.resolution or 32))
    return {"xi": xi, "z": prof.zs, "A": prof.values, "z_max": prof.z_max}


def cmd_radon(args):
    n = args.n
    coeffs = _floats(args.coeffs) if args.coeffs else np.array([1.0])
    axis = basis_vector(n, 0)
    f = ZonalFunction(axis, n, coeffs)
    xi = _xi(args, n)
    radon = spherical_radon(f, xi, _spec(args))
    fourier = float(zonal_fourier(f, HomogeneousSpec(n - 1, n))(xi[None])[0])
    return {"n": n, "xi": xi, "coeffs": coeffs, "radon": radon, "pi_radon": np.pi * radon,
            "fourier": fourier}


def cmd_fourier(args):
    body = _load_body(args.body)
    validate_body(body)
    k = body.n - 2 if args.k is None else args.k
    xi = _xi(args, body.n)
    val, info = fourier_minkowski_power(body, k, xi, QuadratureSpec(args.resolution or 32), details=True)
    return {"n": body.n, "k": k, "xi": xi, "value": val, "details": info}


def cmd_convexity(args):
    body = _load_body(args.body)
    validate_body(body)
    models = (CurvatureModel.from_flag(args.model).delta,) if args.model else (-1, 0, 1)
    verdict = classify_convexity(body, ConvexitySpec(pairs=args.grid or 2000, seed=args.seed), models)
    return verdict.to_dict()


def cmd_compare(args):
    K, L = _load_body(args.K), _load_body(args.L)
    model = CurvatureModel.from_flag(args.model)
    validate_body(K, model)
    validate_body(L, model)
    return bp_compare(K, L, model, args.grid or 128, _spec(args), seed=args.seed)


def cmd_counterexample(args):
    space = CurvatureModel.from_flag(args.space or args.model or "h")
    if space.delta == -1:
        return counterexample_hyperbolic(args.n or 3, grid=args.grid or 128, seed=args.seed,
                                         spec=_spec(args))
    if space.delta == 1:
        kw = {"resolution": args.resolution} if args.resolution else {}
        return counterexample_sphere(args.n or 5, grid=args.grid or 96, seed=args.seed, **kw)
    raise ValidationError("counterexample pipelines exist for --space h and --space s")


def cmd_parseval(args):
    K, L = _load_body(args.K), _load_body(args.L)
    validate_body(K)
    validate_body(L)
    lhs, rhs = parseval_pairing(K, L, spec=QuadratureSpec(args.resolution or 32))
    return {"lhs": lhs, "rhs": rhs, "relative_difference": abs(lhs - rhs) / abs(rhs)}


COMMANDS = {
    "volume": (cmd_volume, "delta-volume of a body"),
    "section": (cmd_section, "central section delta-volume orthogonal to --xi"),
    "profile": (cmd_profile, "Euclidean parallel section function A(z) along --xi"),
    "radon": (cmd_radon, "spherical Radon and multiplier transforms of a zonal series"),
    "fourier": (cmd_fourier, "Fourier transform of ||x||^(-n+k+1) at --xi"),
    "convexity": (cmd_convexity, "e-, h- and s-convexity certificates"),
    "compare": (cmd_compare, "Busemann-Petty comparison of --K against --L"),
    "counterexample": (cmd_counterexample, "run a counterexample pipeline"),
    "parseval": (cmd_parseval, "both sides of the Parseval pairing for zonal K, L"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", choices=("e", "h", "s"), default=None if name in
                       ("convexity", "counterexample") else "e")
        p.add_argument("--n", type=int, default=3 if name == "radon" else None)
        p.add_argument("--body")
        p.add_argument("--K")
        p.add_argument("--L")
        p.add_argument("--grid", type=int, help="direction count (convexity: segment pairs)")
        p.add_argument("--resolution", type=int, help="sphere quadrature resolution")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--format", choices=FORMATS, default="json")
        p.add_argument("--xi", help="direction as comma separated coordinates (default e1)")
        if name == "fourier":
            p.add_argument("--k", type=int)
        if name == "profile":
            p.add_argument("--zs", help="comma separated offsets")
        if name == "radon":
            p.add_argument("--coeffs", help="Gegenbauer coefficients of degrees 0, 2, 4, ...")
        if name == "counterexample":
            p.add_argument("--space", choices=("e", "h", "s"))
    return parser


def _required(args):
    need = {"volume": ("body",), "section": ("body",), "profile": ("body",), "fourier": ("body",),
            "convexity": ("body",), "compare": ("K", "L"), "parseval": ("K", "L")}
    missing = [f"--{a}" for a in need.get(args.command, ()) if getattr(args, a) is None]
    if missing:
        raise ValidationError(f"{args.command} needs {' and '.join(missing)}")


def _render(result, fmt: str) -> bytes:
    if hasattr(result, "bp") or hasattr(result, "section_K"):
        return render_report(result, fmt)
    if fmt != "json":
        raise ValidationError(f"--format {fmt} is only available for compare and counterexample")
    return (canonical_json(result) + "\n").encode()


def _error(exc: BaseException, code: str) -> str:
    return json.dumps({"error": code, "type": type(exc).__name__, "message": str(exc)}, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _required(args)
        result = COMMANDS[args.command][0](args)
        data = _render(result, args.format)
        if args.out:
            Path(args.out).write_bytes(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        return EXIT_OK
    except ValidationError as exc:
        print(_error(exc, exc.code), file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(_error(exc, exc.code), file=sys.stderr)
        return EXIT_NUMERICAL
    except BPError as exc:
        print(_error(exc, exc.code), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
