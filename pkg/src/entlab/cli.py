"""Batch front-end: ingest state specs, run measures and identity suites.

State-spec documents are JSON, either a raw matrix

    {"dims": [2, 2], "matrix": [[{"re": 0.25, "im": 0.0}, ...], ...]}

(row-major, entries as {re, im} objects or plain numbers) or a family
reference

    {"family": "werner", "params": {"p": 0.8}}

Exit codes: 0 success, 1 verification failure, 2 usage/validation error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import __version__, measures as _measures, mcs as _mcs
from .errors import CapError, EntlabError, ParseError, UsageError
from .families import FAMILY_NAMES, state_family
from .measures import Decomposition
from .optim import OptimizerConfig
from .random import child_seed, haar_isometry
from .redistribution import (
    SplittingIsometry,
    cost_pair,
    entanglement_balance,
    split_purification,
    swap_sides,
)
from .states import DensityOperator, SystemLayout
from .verify import DEFAULT_THRESHOLD, identity_suite

DIM_CAP_DEFAULT = 64

MEASURE_NAMES = (
    "squashed_upper",
    "eof",
    "eof_via_mcs",
    "eoa_single",
    "eoa_asymptotic",
    "puffed_lower",
    "wootters_eof",
)


@dataclass
class RunSpec:
    command: str
    state_source: dict | None = None
    measure_names: list[str] = field(default_factory=list)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    d_a_prime: int | None = None
    d_c: int | None = None
    k: int | None = None
    output_path: str | None = None
    format: str = "json"
    max_dim: int = DIM_CAP_DEFAULT
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# state-spec ingestion
# ---------------------------------------------------------------------------


def _entry_to_complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, dict) and set(entry) <= {"re", "im"}:
        return complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
    raise ParseError(f"matrix entries must be numbers or {{re, im}} objects, got {entry!r}")


def parse_state_spec(document: str) -> DensityOperator:
    """Parse and validate a state-spec document into a DensityOperator."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("state spec must be a JSON object")
    if "family" in doc:
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise ParseError("params must be an object")
        return state_family(doc["family"], **params)
    if "dims" in doc and "matrix" in doc:
        dims = doc["dims"]
        if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims):
            raise ParseError("dims must be a list of positive integers")
        rows = doc["matrix"]
        if not isinstance(rows, list):
            raise ParseError("matrix must be a list of rows")
        try:
            matrix = np.array([[_entry_to_complex(e) for e in row] for row in rows])
        except (TypeError, ParseError) as exc:
            raise ParseError(str(exc)) from exc
        labels = [chr(ord("A") + i) for i in range(len(dims))]
        return DensityOperator(matrix, SystemLayout(zip(labels, dims)))
    raise ParseError("state spec needs either a family reference or dims + matrix")


def _load_state(spec: RunSpec) -> tuple[DensityOperator, str]:
    src = spec.state_source or {}
    if "document" in src:
        return parse_state_spec(src["document"]), src.get("label", "inline")
    if "path" in src:
        with open(src["path"], "r", encoding="utf-8") as fh:
            return parse_state_spec(fh.read()), src["path"]
    if "family" in src:
        doc = json.dumps({"family": src["family"], "params": src.get("params", {})})
        return parse_state_spec(doc), f"family:{src['family']}"
    raise UsageError("no state given: use --state or --family")


def state_fingerprint(rho: DensityOperator) -> str:
    """SHA-256 over the canonical 12-significant-digit matrix serialization."""
    parts = [f"{z.real:.12g},{z.imag:.12g}" for z in rho.matrix.reshape(-1)]
    payload = ("[" + ";".join(parts) + "]" + repr(rho.layout.dims)).encode()
    return hashlib.sha256(payload).hexdigest()


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _complex_doc(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _certificate_doc(cert) -> dict | None:
    if cert is None:
        return None
    if isinstance(cert, SplittingIsometry):
        return {
            "type": "splitting_isometry",
            "d_a_prime": cert.dims[0],
            "d_c": cert.dims[1],
            "matrix": [[_complex_doc(z) for z in row] for row in cert.matrix],
        }
    if isinstance(cert, Decomposition):
        return {
            "type": "decomposition",
            "entries": [
                {"p": float(p), "vector": [_complex_doc(z) for z in psi.vector]}
                for p, psi in cert
            ],
        }
    return {"type": type(cert).__name__}


def _report_header(spec: RunSpec, rho: DensityOperator | None, source: str | None) -> dict:
    header = {
        "tool": {"name": "entlab", "version": __version__},
        "command": spec.command,
        "seed": spec.optimizer.seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if rho is not None:
        header["state"] = {
            "source": source,
            "dims": list(rho.layout.dims),
            "fingerprint": state_fingerprint(rho),
        }
    return header


def _measure_result(name: str, rho: DensityOperator, spec: RunSpec) -> dict:
    cfg = spec.optimizer
    if name == "squashed_upper":
        rep = _measures.squashed_upper(rho, spec.d_a_prime, spec.d_c, cfg)
    elif name == "eof":
        rep = _measures.eof(rho, spec.k, cfg)
    elif name == "eof_via_mcs":
        rep = _mcs.eof_via_mcs(rho, spec.k, cfg)
    elif name == "eoa_single":
        rep = _measures.eoa_single(rho, spec.k, replace(cfg, mode=None))
    elif name == "puffed_lower":
        rep = _measures.puffed_lower(rho, spec.d_a_prime, spec.d_c, replace(cfg, mode=None))
    elif name == "eoa_asymptotic":
        value = _measures.eoa_asymptotic(rho)
        rep = _measures.MeasureReport(measure=name, value=value, bound="exact", tolerance=cfg.tolerance, seed=cfg.seed)
    elif name == "wootters_eof":
        value = _measures.wootters_eof(rho)
        rep = _measures.MeasureReport(measure=name, value=value, bound="exact", tolerance=cfg.tolerance, seed=cfg.seed)
    else:
        raise UsageError(f"unknown measure {name!r}; known: {MEASURE_NAMES}")
    return {
        "measure": rep.measure,
        "value": rep.value,
        "bound": rep.bound,
        "tolerance": rep.tolerance,
        "converged": rep.converged,
        "entanglement_at_optimum": rep.entanglement_at_optimum,
        "restarts_within_tolerance": rep.restarts_within_tolerance,
        "degenerate": rep.degenerate,
        "certificate": _certificate_doc(rep.certificate),
    }


def _cmd_measure(spec: RunSpec) -> tuple[dict, int]:
    rho, source = _load_state(spec)
    _check_cap(rho, spec)
    if not spec.measure_names:
        raise UsageError("measure command needs --measure")
    report = _report_header(spec, rho, source)
    report["results"] = [_measure_result(n, rho, spec) for n in spec.measure_names]
    return report, 0


def _cmd_redistribute(spec: RunSpec) -> tuple[dict, int]:
    rho, source = _load_state(spec)
    _check_cap(rho, spec)
    rank = rho.rank()
    d_ap = spec.d_a_prime or rank
    d_c = spec.d_c or rank
    v = haar_isometry(d_ap * d_c, rank, child_seed(spec.optimizer.seed, 77))
    splitting = SplittingIsometry(v, (d_ap, d_c))
    state = split_purification(rho, splitting)
    pair = cost_pair(state)
    report = _report_header(spec, rho, source)
    report["result"] = {
        "d_a_prime": d_ap,
        "d_c": d_c,
        "q_qubits": pair.q,
        "e_ebits": pair.e,
        "entanglement_balance": entanglement_balance(state),
        "q_swapped": cost_pair(swap_sides(state)).q,
        "certificate": _certificate_doc(splitting),
    }
    return report, 0


def _cmd_verify(spec: RunSpec) -> tuple[dict, int]:
    n_states = int(spec.params.get("states", 100))
    results = identity_suite(n_states=n_states, seed=spec.optimizer.seed)
    report = _report_header(spec, None, None)
    report["checks"] = [
        {
            "check": r.name,
            "cases": r.cases,
            "max_deviation": r.max_deviation,
            "threshold": r.threshold,
            "passed": r.passed,
        }
        for r in results
    ]
    passed = all(r.passed for r in results)
    report["passed"] = passed
    return report, 0 if passed else 1


def _parse_grid(value: str) -> list[float]:
    parts = value.split(":")
    if len(parts) != 3:
        raise UsageError("sweep grids use start:stop:count, e.g. p=0:1:11")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise UsageError("grid count must be >= 1")
    return [float(x) for x in np.linspace(start, stop, count)]


def _cmd_sweep(spec: RunSpec) -> tuple[dict, int]:
    src = spec.state_source or {}
    if "family" not in src:
        raise UsageError("sweep needs --family")
    grid_params = {k: v for k, v in spec.params.items() if isinstance(v, str) and v.count(":") == 2}
    if len(grid_params) != 1:
        raise UsageError("sweep needs exactly one ranged --param key=start:stop:count")
    (pname, grange), = grid_params.items()
    grid = _parse_grid(grange)
    fixed = {k: v for k, v in spec.params.items() if k != pname}
    report = _report_header(spec, None, None)
    report["family"] = src["family"]
    report["parameter"] = pname
    points = []
    for i, x in enumerate(grid):
        sub = replace(
            spec,
            command="measure",
            state_source={"family": src["family"], "params": {**fixed, pname: x}},
            optimizer=replace(spec.optimizer, seed=child_seed(spec.optimizer.seed, i)),
        )
        rho, _ = _load_state(sub)
        _check_cap(rho, spec)
        points.append(
            {
                pname: x,
                "fingerprint": state_fingerprint(rho),
                "results": [_measure_result(n, rho, sub) for n in spec.measure_names],
            }
        )
    report["points"] = points
    return report, 0


def _check_cap(rho: DensityOperator, spec: RunSpec):
    if rho.dim > spec.max_dim:
        raise CapError(f"total dimension {rho.dim} exceeds the cap {spec.max_dim}")


COMMANDS = {
    "measure": _cmd_measure,
    "redistribute": _cmd_redistribute,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def run(spec: RunSpec) -> tuple[dict, int]:
    """Execute a RunSpec; returns (report document, exit code)."""
    if spec.command not in COMMANDS:
        raise UsageError(f"unknown command {spec.command!r}")
    report, code = COMMANDS[spec.command](spec)
    return _round12(report), code


# ---------------------------------------------------------------------------
# rendering and argument handling
# ---------------------------------------------------------------------------


def _csv_rows(report: dict) -> list[list]:
    meta = [report["command"], report["seed"], report.get("state", {}).get("fingerprint", "")]
    rows = []
    if "results" in report:
        rows.append(["command", "seed", "fingerprint", "measure", "value", "bound",
                     "tolerance", "converged", "entanglement_at_optimum",
                     "restarts_within_tolerance", "degenerate"])
        for r in report["results"]:
            rows.append(meta + [r["measure"], r["value"], r["bound"], r["tolerance"],
                                r["converged"], r["entanglement_at_optimum"],
                                r["restarts_within_tolerance"], r["degenerate"]])
    elif "checks" in report:
        rows.append(["command", "seed", "check", "cases", "max_deviation", "threshold", "passed"])
        for r in report["checks"]:
            rows.append([report["command"], report["seed"], r["check"], r["cases"],
                         r["max_deviation"], r["threshold"], r["passed"]])
    elif "points" in report:
        pname = report["parameter"]
        rows.append(["command", "seed", pname, "measure", "value", "bound", "converged"])
        for pt in report["points"]:
            for r in pt["results"]:
                rows.append([report["command"], report["seed"], pt[pname], r["measure"],
                             r["value"], r["bound"], r["converged"]])
    elif "result" in report:
        r = report["result"]
        rows.append(["command", "seed", "fingerprint", "d_a_prime", "d_c", "q_qubits",
                     "e_ebits", "entanglement_balance", "q_swapped"])
        rows.append(meta + [r["d_a_prime"], r["d_c"], r["q_qubits"], r["e_ebits"],
                            r["entanglement_balance"], r["q_swapped"]])
    return rows


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(_csv_rows(report))
        return buf.getvalue()
    raise UsageError(f"unknown format {fmt!r}")


def _parse_param(raw: str):
    if "=" not in raw:
        raise UsageError(f"--param expects key=value, got {raw!r}")
    key, value = raw.split("=", 1)
    if value.count(":") == 2:
        return key, value  # kept as a range string; sweep parses it
    if value.lower() in ("true", "false"):
        return key, value.lower() == "true"
    if "x" in value and all(p.isdigit() for p in value.split("x")):
        return key, [int(p) for p in value.split("x")]
    try:
        return key, int(value)
    except ValueError:
        pass
    try:
        return key, float(value)
    except ValueError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entlab",
        description="Redistribution cost pairs and side-information entanglement measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", metavar="PATH", help="state-spec JSON document")
    state.add_argument("--family", choices=FAMILY_NAMES, help="named state family")
    state.add_argument("--param", action="append", default=[], metavar="K=V",
                       help="family/command parameter; repeatable; ranges as start:stop:count")

    opt = argparse.ArgumentParser(add_help=False)
    opt.add_argument("--da-prime", type=int, default=None, help="sender side-information dimension")
    opt.add_argument("--dc", type=int, default=None, help="receiver side-information dimension")
    opt.add_argument("--k", type=int, default=None, help="ensemble size for decomposition searches")
    opt.add_argument("--restarts", type=int, default=4)
    opt.add_argument("--tol", type=float, default=1e-7)
    opt.add_argument("--seed", type=int, default=0)

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    out.add_argument("--format", choices=("json", "csv"), default="json")
    out.add_argument("--max-dim", type=int, default=DIM_CAP_DEFAULT,
                     help="total-dimension cap (values above 64 are unsupported)")

    p_measure = sub.add_parser("measure", parents=[state, opt, out],
                               help="compute named measures on one state")
    p_measure.add_argument("--measure", required=True,
                           help="comma-separated measure names: " + ", ".join(MEASURE_NAMES))

    sub.add_parser("redistribute", parents=[state, opt, out],
                   help="cost pair at a seeded random splitting")

    sub.add_parser("verify", parents=[state, opt, out],
                   help="run the exact-identity suites on seeded random states")

    p_sweep = sub.add_parser("sweep", parents=[state, opt, out],
                             help="measures over a family parameter grid")
    p_sweep.add_argument("--measure", required=True)
    return parser


def _runspec_from_args(args) -> RunSpec:
    params = dict(_parse_param(raw) for raw in args.param)
    source = None
    if getattr(args, "state", None):
        source = {"path": args.state}
    elif getattr(args, "family", None):
        family_params = {k: v for k, v in params.items()
                         if not (isinstance(v, str) and v.count(":") == 2)}
        source = {"family": args.family, "params": family_params}
    names = []
    if getattr(args, "measure", None):
        names = [n.strip() for n in args.measure.split(",") if n.strip()]
    cfg = OptimizerConfig(restarts=args.restarts, tolerance=args.tol, seed=args.seed)
    return RunSpec(
        command=args.command,
        state_source=source,
        measure_names=names,
        optimizer=cfg,
        d_a_prime=args.da_prime,
        d_c=args.dc,
        k=args.k,
        output_path=args.out,
        format=args.format,
        max_dim=args.max_dim,
        params=params,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _runspec_from_args(args)
        report, code = run(spec)
    except EntlabError as exc:
        kind = type(exc).__name__
        print(f"error ({kind}): {exc}", file=sys.stderr)
        return 2
    text = render_report(report, spec.format)
    if spec.output_path:
        with open(spec.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
