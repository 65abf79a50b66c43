"""Command-line front end.

Three batch commands, all deterministic: ``decompose`` emits a JSON result
record, ``sweep`` emits a CSV curve (and optionally the JSON record), and
``check`` runs the bundled worked-example suite. Every command can run the
computation locally or delegate to a running service via ``--server``; both
paths produce byte-identical output. ``serve`` starts the HTTP service.

Exit codes: 0 success, 2 parse error, 3 physics error, 4 verification
failure, 1 anything else.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .dsl import evaluate_scalar, parse_state, with_param_defaults
from .errors import (EXIT_OK, EXIT_PARSE, EXIT_PHYSICS, EXIT_VERIFICATION,
                     NoLabelError, ParseError)
from .pipeline import (canonical_json, run_check, run_decompose, run_sweep,
                       sweep_csv, sweep_result_from_record)
from .schmidt import ZERO_TOL

_EXIT_BY_CATEGORY = {"parse": EXIT_PARSE, "physics": EXIT_PHYSICS,
                     "verification": EXIT_VERIFICATION}


class RemoteError(NoLabelError):
    """A service-side error replayed locally with the same code and exit."""

    def __init__(self, code: str, category: str, message: str):
        super().__init__(message)
        self.code = code
        self.category = category
        self.exit_code = _EXIT_BY_CATEGORY.get(category, 1)


def _make_client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server, timeout=60.0)


def _post(server: str, path: str, payload: dict) -> str:
    with _make_client(server) as client:
        response = client.post(path, json=payload)
    if response.status_code >= 400:
        try:
            error = response.json()["error"]
        except (ValueError, KeyError):
            raise RemoteError("E_HTTP", "internal",
                              f"{path} returned {response.status_code}")
        raise RemoteError(error.get("code", "E_HTTP"),
                          error.get("category", "internal"),
                          error.get("message", "request failed"))
    return response.text


def _load_state_text(value: str) -> str:
    path = Path(value)
    try:
        if path.is_file():
            return path.read_text(encoding="utf-8")
    except OSError:
        pass
    return value


def _real_scalar(text: str, what: str) -> float:
    value = evaluate_scalar(text)
    if abs(value.imag) > 1e-12:
        raise ParseError(f"{what} must be real, got {text!r}", 1, 1,
                         code="E_BAD_COEFFICIENT")
    return float(value.real)


def _parse_overrides(pairs: list[str] | None) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for pair in pairs or []:
        name, sep, expr = pair.partition("=")
        name = name.strip()
        if not sep or not name or not expr.strip():
            raise ParseError(f"--set expects NAME=VALUE, got {pair!r}", 1, 1,
                             code="E_BAD_PARAM")
        overrides[name] = _real_scalar(expr, f"parameter {name!r}")
    return overrides


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"--range expects START:END:STEPS, got {text!r}",
                         1, 1, code="E_BAD_RANGE")
    try:
        start = _real_scalar(parts[0], "range start")
        stop = _real_scalar(parts[1], "range end")
    except ParseError as exc:
        raise ParseError(f"bad --range bound: {exc.args[0]}", 1, 1,
                         code="E_BAD_RANGE") from None
    try:
        steps = int(parts[2])
    except ValueError:
        raise ParseError(f"range step count must be an integer, "
                         f"got {parts[2]!r}", 1, 1,
                         code="E_BAD_RANGE") from None
    return start, stop, steps


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands

def _cmd_decompose(args: argparse.Namespace) -> int:
    state_text = _load_state_text(args.state)
    overrides = _parse_overrides(args.set)
    oracle = args.oracle == "on"
    if args.server:
        payload = {"state": state_text, "params": overrides,
                   "trace": args.trace, "oracle": oracle,
                   "zero_tol": args.zero_tol}
        body = _post(args.server, "/decompose", payload)
    else:
        spec = parse_state(state_text)
        record = run_decompose(spec, args.trace, with_oracle=oracle,
                               zero_tol=args.zero_tol,
                               params=overrides or None)
        body = canonical_json(record)
    _emit(body + "\n", args.json)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    state_text = _load_state_text(args.state)
    overrides = _parse_overrides(args.set)
    oracle = args.oracle == "on"
    start, stop, steps = _parse_range(args.range)
    if args.server:
        payload = {"state": state_text, "params": overrides,
                   "trace": args.trace, "oracle": oracle,
                   "zero_tol": args.zero_tol, "param": args.param,
                   "start": start, "stop": stop, "steps": steps}
        body = _post(args.server, "/sweep", payload)
        result = sweep_result_from_record(json.loads(body))
    else:
        spec = with_param_defaults(parse_state(state_text), overrides)
        result = run_sweep(spec, args.param, start, stop, steps, args.trace,
                           with_oracle=oracle, zero_tol=args.zero_tol)
        body = canonical_json(result.to_record())
    if args.json:
        _emit(body + "\n", args.json)
    if args.csv:
        _emit(sweep_csv(result), args.csv)
    if not args.json and not args.csv:
        _emit(sweep_csv(result), None)
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    oracle = args.oracle == "on"
    if args.server:
        body = _post(args.server, "/check", {"oracle": oracle})
        record = json.loads(body)
    else:
        record = run_check(with_oracle=oracle)
        body = canonical_json(record)
    for fixture in record["fixtures"]:
        mark = "PASS" if fixture["passed"] else "FAIL"
        sys.stdout.write(f"{mark} {fixture['name']}: {fixture['detail']}\n")
    sys.stdout.write(f"{record['total'] - record['failures']}/"
                     f"{record['total']} fixtures passed\n")
    if args.json:
        _emit(body + "\n", args.json)
    return EXIT_OK if record["passed"] else EXIT_VERIFICATION


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_common(parser: argparse.ArgumentParser, *, needs_state: bool) -> None:
    if needs_state:
        parser.add_argument("--state", required=True,
                            help="state text, or a path to a file holding it")
        parser.add_argument("--trace", default="global",
                            help="global | local:<labels> | "
                                 "fixed:<observable=value>")
        parser.add_argument("--set", action="append", metavar="NAME=VALUE",
                            help="bind a parameter (repeatable; "
                                 "VALUE may use pi, e.g. pi/4)")
        parser.add_argument("--zero-tol", type=float, default=ZERO_TOL,
                            dest="zero_tol",
                            help="eigenvalues at or below this are zero")
    parser.add_argument("--oracle", choices=("on", "off"), default="on",
                        help="independent first-quantization cross-check")
    parser.add_argument("--json", metavar="PATH",
                        help="write the JSON result record to PATH")
    parser.add_argument("--server", metavar="URL",
                        help="delegate the computation to a running service")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nolabel",
        description="Schmidt decomposition toolkit for pairs of identical "
                    "particles (bosons and fermions).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dec = sub.add_parser(
        "decompose",
        help="trace, decompose, and verify one state; emit the JSON record")
    _add_common(p_dec, needs_state=True)
    p_dec.set_defaults(handler=_cmd_decompose)

    p_sweep = sub.add_parser(
        "sweep", help="scan one parameter over a grid; emit a CSV curve")
    _add_common(p_sweep, needs_state=True)
    p_sweep.add_argument("--param", required=True,
                         help="name of the parameter to scan")
    p_sweep.add_argument("--range", required=True, metavar="START:END:STEPS",
                         help="grid bounds and point count "
                              "(bounds may use pi)")
    p_sweep.add_argument("--csv", metavar="PATH",
                         help="write the CSV curve to PATH")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_check = sub.add_parser(
        "check", help="run the bundled worked-example suite")
    _add_common(p_check, needs_state=False)
    p_check.set_defaults(handler=_cmd_check)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except NoLabelError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return exc.exit_code
    except httpx.HTTPError as exc:
        sys.stderr.write(f"error[E_CONNECTION]: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
