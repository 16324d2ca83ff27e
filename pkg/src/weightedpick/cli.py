"""Command-line interface.

Exit codes: 0 feasible / no violation found, 1 violation or infeasible,
2 input error. Reports are JSON on stdout; only the ``timing`` field varies
between runs with identical inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .disk import SchurChain, solve_disk
from .errors import PickError
from .instance import DomainKind, DomainSpec, SpaceKind, SpaceSpec, load_instance
from .kernels import ClosedFormKernel, kernel_eval
from .moments import BaseMeasure, MomentTable
from .pick import CertifyConfig, SweepConfig, certify_infeasible, family_sweep
from .polynomial import CPolynomial
from .weighted import (
    TruncationWarning,
    build_cyclic_model,
    build_weighted_model,
    omega_f_check,
    rescaled_cyclic_kernel,
    weighted_kernel_eval,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _report(command: str, result: dict, *, instance=None, seed=None, started: float) -> dict:
    out = {"tool": "weightedpick", "version": __version__, "command": command, "result": result}
    if instance is not None:
        out["instance"] = instance.to_json()
    if seed is not None:
        out["seed"] = seed
    out["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    return out


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2, sort_keys=True, default=_json_default)
    sys.stdout.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _is_disk_problem(inst) -> bool:
    return (
        inst.dim == 1
        and inst.domain.kind is DomainKind.POLYDISK
        and inst.space.kind is SpaceKind.HARDY
        and inst.algebra.is_full
    )


def _sweep_config(args) -> SweepConfig:
    return SweepConfig(samples=args.samples, fdeg=args.fdeg, seed=args.seed, degree=args.degree, tol=args.tol)


def _write_csv(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def cmd_check(args) -> int:
    started = time.perf_counter()
    inst = load_instance(args.instance)
    if _is_disk_problem(inst):
        out = solve_disk(inst.nodes[:, 0], inst.targets, args.tol)
        if isinstance(out, SchurChain):
            result = {"status": "feasible", "definitive": True, "interpolant": out.to_json()}
            code = EXIT_OK
        else:
            result = {"status": "infeasible", "definitive": True, **out.to_json()}
            code = EXIT_VIOLATION
    else:
        rep = family_sweep(inst, _sweep_config(args))
        _write_csv(args.csv, rep.to_csv())
        summary = rep.summary()
        if rep.consistent:
            status = f"no violation found (M={args.samples})"
            code = EXIT_OK
        else:
            status = "violation found"
            code = EXIT_VIOLATION
        result = {"status": status, "definitive": not rep.consistent, **summary}
    _emit(_report("check", result, instance=inst, seed=args.seed, started=started))
    return code


def cmd_solve(args) -> int:
    started = time.perf_counter()
    inst = load_instance(args.instance)
    if not _is_disk_problem(inst):
        raise PickError("unsupported", "solve handles the one-variable Hardy problem on the disk only")
    out = solve_disk(inst.nodes[:, 0], inst.targets, args.tol)
    feasible = isinstance(out, SchurChain)
    result = {"status": "feasible" if feasible else "infeasible", **out.to_json()}
    if feasible:
        result["residual"] = float(np.max(np.abs(out(inst.nodes[:, 0]) - inst.targets)))
    _emit(_report("solve", result, instance=inst, started=started))
    return EXIT_OK if feasible else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    inst = load_instance(args.instance)
    rep = family_sweep(inst, _sweep_config(args))
    _write_csv(args.csv, rep.to_csv())
    _emit(_report("sweep", rep.to_json(), instance=inst, seed=args.seed, started=started))
    return EXIT_OK if rep.consistent else EXIT_VIOLATION


def cmd_certify(args) -> int:
    started = time.perf_counter()
    inst = load_instance(args.instance)
    cfg = CertifyConfig(
        restarts=args.restarts, iterations=args.iterations, fdeg=args.fdeg, seed=args.seed,
        degree=args.degree, tol=args.tol,
    )
    cert = certify_infeasible(inst, cfg)
    result = {"status": "none found"} if cert is None else {"status": "certificate", "certificate": cert.to_json()}
    _emit(_report("certify", result, instance=inst, seed=args.seed, started=started))
    return EXIT_OK if cert is None else EXIT_VIOLATION


def _parse_point(text: str, dim: int) -> np.ndarray:
    parts = [complex(p.strip().replace(" ", "")) for p in text.split(",")]
    if len(parts) != dim:
        raise PickError("parse", f"point {text!r} does not have {dim} coordinates")
    return np.array(parts)


def _parse_poly(text: str, dim: int) -> CPolynomial:
    text = text.strip()
    if text == "1":
        return CPolynomial.constant(dim)
    if text.startswith("z^"):
        return CPolynomial.monomial([int(a) for a in text[2:].split(",")])
    path = Path(text)
    raw = path.read_text() if path.exists() else text
    try:
        return CPolynomial.from_json(json.loads(raw), dim)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise PickError("parse", f"cannot read polynomial {text!r}: {exc}") from exc


def _closed_domain(args) -> DomainSpec:
    return DomainSpec(DomainKind(args.domain), args.dim)


def cmd_kernel(args) -> int:
    started = time.perf_counter()
    domain = _closed_domain(args)
    space = SpaceSpec(SpaceKind(args.space))
    f = _parse_poly(args.f, args.dim)
    z = _parse_point(args.z, args.dim)
    w = _parse_point(args.w, args.dim)
    measure = BaseMeasure(domain, space)
    closed = kernel_eval(ClosedFormKernel(space, domain), z, w)
    gram_route = weighted_kernel_eval(build_weighted_model(measure, f, degree=args.degree), z, w)
    cyclic = build_cyclic_model(measure, f, degree=args.degree)
    result = {
        "domain": domain.to_json(), "space": space.kind.value, "f": f.to_json(), "degree": args.degree,
        "z": [[c.real, c.imag] for c in z], "w": [[c.real, c.imag] for c in w],
        "closed_form_ambient": [closed.real, closed.imag],
        "gram_route": [gram_route.real, gram_route.imag],
    }
    inside = [omega_f_check(cyclic, p) for p in (z, w)]
    result["omega_f"] = [{"inside": ok, "magnitude": mag} for ok, mag in inside]
    if all(ok for ok, _ in inside):
        resc = rescaled_cyclic_kernel(cyclic, z, w)
        result["cyclic_rescaled_route"] = [resc.real, resc.imag]
        result["delta_routes"] = abs(resc - gram_route)
        result["delta_gram_vs_closed"] = abs(gram_route - closed)
        result["delta_cyclic_vs_closed"] = abs(resc - closed)
        code = EXIT_OK
    else:
        result["cyclic_rescaled_route"] = None
        result["error"] = "outside Omega_f"
        code = EXIT_VIOLATION
    _emit(_report("kernel", result, started=started))
    return code


def cmd_moments(args) -> int:
    started = time.perf_counter()
    measure = BaseMeasure(_closed_domain(args), SpaceSpec(SpaceKind(args.space)))
    f = None if args.f is None else _parse_poly(args.f, args.dim)
    table = MomentTable.build(measure, args.max_degree, f)
    _write_csv(args.csv, table.to_csv())
    result = {
        "provenance": table.provenance,
        "entries": [
            {"alpha": list(a), "beta": list(b), "re": v.real, "im": v.imag}
            for (a, b), v in table.entries.items()
            if abs(v) > 0
        ],
    }
    _emit(_report("moments", result, started=started))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weightedpick", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, certify=False):
        p.add_argument("instance", help="instance JSON file")
        p.add_argument("--degree", type=int, default=None, help="truncation degree N (default by dimension)")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--fdeg", type=int, default=4, help="max degree of sampled weights f")
        if certify:
            p.add_argument("--restarts", type=int, default=20)
            p.add_argument("--iterations", type=int, default=200)
        else:
            p.add_argument("--samples", type=int, default=50)
            p.add_argument("--csv", default=None, help="write per-weight eigenvalue trace")

    common(sub.add_parser("check", help="decide (d=1) or sweep the weight family"))
    common(sub.add_parser("sweep", help="full per-weight sweep report"))
    common(sub.add_parser("certify", help="search for an infeasibility certificate"), certify=True)
    p = sub.add_parser("solve", help="Schur-algorithm interpolant on the disk")
    p.add_argument("instance")
    p.add_argument("--tol", type=float, default=1e-9)

    def closed(p):
        p.add_argument("--domain", choices=["polydisk", "ball"], default="polydisk")
        p.add_argument("--space", choices=["hardy", "bergman"], default="hardy")
        p.add_argument("--dim", type=int, default=1)

    p = sub.add_parser("kernel", help="compare closed-form, Gram-route and cyclic-route kernels")
    closed(p)
    p.add_argument("--f", default="1", help="'1', 'z^a,b,..', or JSON term list / file")
    p.add_argument("--degree", type=int, default=12)
    p.add_argument("--z", required=True, help="comma-separated complex coordinates, e.g. 0.5,0.1+0.2j")
    p.add_argument("--w", required=True)
    p = sub.add_parser("moments", help="dump a (weighted) moment table")
    closed(p)
    p.add_argument("--f", default=None)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--csv", default=None)
    return parser


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "kernel": cmd_kernel,
    "moments": cmd_moments,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default", TruncationWarning)
            return COMMANDS[args.command](args)
    except (PickError, OSError, ValueError) as exc:
        payload = exc.to_json() if isinstance(exc, PickError) else {"code": "input", "message": str(exc)}
        json.dump({"error": payload}, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
