"""End-to-end runs: parse, trace, decompose, verify, serialize.

This module glues the algebra/trace/schmidt layers into the three commands
exposed by the CLI and the service: ``decompose`` (one state, full result
record), ``sweep`` (one parameter over a grid, CSV curve), and ``check``
(bundled fixture suite). All output is deterministic: dictionaries serialize
with sorted keys and floats with 12 significant digits, so identical inputs
produce byte-identical text.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import labeled
from .algebra import Ket, TwoParticleState
from .dsl import StateSpec, build_state
from .errors import OracleMismatchError, ParseError, PhysicsError
from .schmidt import (ZERO_TOL, SchmidtDecomposition, eigendecompose,
                      schmidt_decompose, von_neumann_entropy)
from .trace import (FIXED, GLOBAL, LOCAL, ReducedDensity, _resolve_subspace,
                    reduce_fixed_observable, reduce_global, reduce_local)

ORACLE_TOL = 1e-10


# ---------------------------------------------------------------------------
# deterministic serialization

def _fmt_float(x: float) -> str:
    text = "%.12g" % float(x)
    return "0" if text == "-0" else text


def canonical_json(value) -> str:
    """Serialize with sorted keys and 12-significant-digit floats.

    The output is a fixed point: parsing it with ``json.loads`` and
    serializing again reproduces the same bytes.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{canonical_json(v)}"
                              for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _pairs(vector: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vector)]


def _matrix_pairs(matrix: np.ndarray) -> list[list[list[float]]]:
    return [_pairs(row) for row in np.asarray(matrix)]


# ---------------------------------------------------------------------------
# trace-mode descriptors

@dataclass(frozen=True)
class TraceMode:
    """Validated trace request: which partial trace to take, and of what."""

    kind: str
    text: str
    subspace: tuple[str, ...] = ()
    observable: int | None = None
    value: str | None = None


def parse_trace_mode(text: str, spec: StateSpec) -> TraceMode:
    """Parse ``global``, ``local:<labels>``, or ``fixed:<observable=value>``.

    A fixed value without an observable name is resolved automatically when
    it identifies exactly one label part position.
    """
    raw = text.strip()
    if raw == GLOBAL:
        return TraceMode(GLOBAL, GLOBAL)
    if raw.startswith("local:"):
        tokens = tuple(t.strip() for t in raw[len("local:"):].split(","))
        if not all(tokens):
            raise ParseError("empty subspace token", 1, 1, code="E_BAD_TRACE")
        try:
            _resolve_subspace(spec.basis, tokens)
        except ValueError as exc:
            raise ParseError(str(exc), 1, 1, code="E_UNKNOWN_LABEL") from None
        return TraceMode(LOCAL, "local:" + ",".join(tokens), subspace=tokens)
    if raw.startswith("fixed:"):
        rest = raw[len("fixed:"):].strip()
        if "=" in rest:
            obs_name, _, value = rest.partition("=")
            obs_name, value = obs_name.strip(), value.strip()
            if not obs_name or not value:
                raise ParseError("fixed trace needs observable=value", 1, 1,
                                 code="E_BAD_TRACE")
            obs = spec.observable_index(obs_name)
            if value not in spec.basis.observable_values(obs):
                raise ParseError(
                    f"{value!r} is not a value of observable {obs_name!r}",
                    1, 1, code="E_UNKNOWN_VALUE")
        else:
            value = rest
            if not value:
                raise ParseError("fixed trace needs a value", 1, 1,
                                 code="E_BAD_TRACE")
            hits = [k for k in range(spec.basis.arity)
                    if value in spec.basis.observable_values(k)]
            if not hits:
                raise ParseError(f"{value!r} is not a value of any observable",
                                 1, 1, code="E_UNKNOWN_VALUE")
            if len(hits) > 1:
                raise ParseError(
                    f"{value!r} occurs in more than one observable; "
                    "use fixed:<observable=value>", 1, 1,
                    code="E_AMBIGUOUS_VALUE")
            obs = hits[0]
            obs_name = (spec.observables[obs] if spec.observables
                        else str(obs))
        return TraceMode(FIXED, f"fixed:{obs_name}={value}",
                         observable=obs, value=value)
    raise ParseError(
        f"unknown trace mode {raw!r}", 1, 1,
        ("global", "local:<labels>", "fixed:<observable=value>"),
        code="E_BAD_TRACE")


def apply_trace(state: TwoParticleState, mode: TraceMode) -> ReducedDensity:
    if mode.kind == GLOBAL:
        return reduce_global(state)
    if mode.kind == LOCAL:
        return reduce_local(state, mode.subspace)
    return reduce_fixed_observable(state, mode.value, mode.observable)


# ---------------------------------------------------------------------------
# independent cross-check

def _oracle_check(state: TwoParticleState, rho: ReducedDensity,
                  eigenvalues: list[float], enabled: bool) -> dict:
    """Compare the pipeline spectrum against the first-quantization reference.

    Raises OracleMismatchError when the check runs and disagrees. For a
    fixed-observable trace whose input mixes amplitude inside and across the
    fixed block, no faithful reference reduction exists, so the check is
    skipped and the record says so.
    """
    if not enabled:
        return {"performed": False, "passed": None,
                "max_spectrum_deviation": None, "entropy_deviation": None,
                "detail": "oracle check disabled"}
    if rho.trace_kind == FIXED and rho.residual_support:
        return {"performed": False, "passed": None,
                "max_spectrum_deviation": None, "entropy_deviation": None,
                "detail": "fixed-observable trace with residual support "
                          "outside the block; no independent reference"}
    reference = labeled.from_state(state)
    if rho.trace_kind == GLOBAL:
        ref = labeled.reduce_global(reference)
    elif rho.trace_kind == LOCAL:
        ref = labeled.reduce_local(reference, rho.subspace)
    else:
        block = [lab for lab in state.basis.labels
                 if lab.parts[rho.observable] == rho.fixed_value]
        ref = labeled.reduce_local(reference, block)
    ref_spectrum = np.clip(labeled.spectrum(ref), 0.0, None)

    n = max(len(eigenvalues), len(ref_spectrum))
    mine = np.zeros(n)
    mine[:len(eigenvalues)] = eigenvalues
    theirs = np.zeros(n)
    theirs[:len(ref_spectrum)] = ref_spectrum
    deviation = float(np.abs(mine - theirs).max())
    entropy_dev = abs(von_neumann_entropy(mine) - von_neumann_entropy(theirs))
    if deviation > ORACLE_TOL:
        raise OracleMismatchError(
            f"reduced spectrum deviates from the first-quantization "
            f"reference by {deviation:.3e}")
    return {"performed": True, "passed": True,
            "max_spectrum_deviation": deviation,
            "entropy_deviation": float(entropy_dev),
            "detail": "spectrum agrees with the first-quantization reference"}


# ---------------------------------------------------------------------------
# decompose

def _ket_entry(ket: Ket) -> dict:
    return {"amplitudes": _pairs(ket.amplitudes),
            "label": str(ket.dominant_label())}


def decompose_record(spec: StateSpec, mode: TraceMode,
                     state: TwoParticleState, rho: ReducedDensity,
                     eigenvalues: list[float],
                     decomposition: SchmidtDecomposition, oracle: dict,
                     params: dict[str, float], zero_tol: float,
                     with_oracle: bool) -> dict:
    trace_result = {
        "kind": rho.trace_kind,
        "basis": [str(lab) for lab in rho.basis.labels],
        "matrix": _matrix_pairs(rho.matrix),
        "raw_trace": float(rho.raw_trace),
        "residual_support": (rho.residual_support
                             if rho.trace_kind == FIXED else None),
        "subspace": ([str(lab) for lab in rho.subspace]
                     if rho.subspace is not None else None),
        "observable": rho.observable,
        "fixed_value": rho.fixed_value,
    }
    terms = [{"eigenvalue": float(t.eigenvalue),
              "coefficient": float(t.coefficient),
              "ket": _ket_entry(t.ket),
              "partner": _ket_entry(t.partner)}
             for t in decomposition.terms]
    return {
        "command": "decompose",
        "input": {
            "state": spec.to_text(),
            "statistics": spec.statistics.name,
            "basis": [str(lab) for lab in spec.basis.labels],
            "params": {k: float(v) for k, v in sorted(params.items())},
            "trace": mode.text,
            "oracle": with_oracle,
            "zero_tol": float(zero_tol),
        },
        "state_norm": float(state.norm()),
        "trace_result": trace_result,
        "eigenvalues": [float(v) for v in eigenvalues],
        "entropy_bits": float(decomposition.entropy_bits),
        "schmidt_number": decomposition.schmidt_number,
        "schmidt_terms": terms,
        "prefactor": [float(decomposition.prefactor.real),
                      float(decomposition.prefactor.imag)],
        "reconstruction_fidelity": float(
            decomposition.reconstruction_fidelity),
        "oracle_check": oracle,
    }


def run_decompose(spec: StateSpec, trace_mode: str | TraceMode = GLOBAL,
                  with_oracle: bool = True, zero_tol: float = ZERO_TOL,
                  params: dict[str, float] | None = None) -> dict:
    """Trace, decompose, verify, and return the full result record."""
    mode = (trace_mode if isinstance(trace_mode, TraceMode)
            else parse_trace_mode(trace_mode, spec))
    state = build_state(spec, params)
    rho = apply_trace(state, mode)
    eigenvalues = [lam for lam, _ in eigendecompose(rho, zero_tol=zero_tol)]
    decomposition = schmidt_decompose(state, rho, zero_tol=zero_tol)
    oracle = _oracle_check(state, rho, eigenvalues, with_oracle)
    env = dict(spec.params)
    env.update(params or {})
    return decompose_record(spec, mode, state, rho, eigenvalues,
                            decomposition, oracle, env, zero_tol, with_oracle)


# ---------------------------------------------------------------------------
# sweep

@dataclass(frozen=True)
class SweepRow:
    param: float
    entropy_bits: float | None
    schmidt_number: int | None
    eigenvalues: tuple[float, ...]
    flag: str = ""


@dataclass(frozen=True)
class SweepResult:
    spec_text: str
    param: str
    trace_text: str
    spectrum_size: int
    rows: tuple[SweepRow, ...] = field(repr=False)

    def to_record(self) -> dict:
        return {
            "command": "sweep",
            "input": {"state": self.spec_text, "param": self.param,
                      "trace": self.trace_text},
            "spectrum_size": self.spectrum_size,
            "rows": [{"param": r.param, "entropy_bits": r.entropy_bits,
                      "schmidt_number": r.schmidt_number,
                      "eigenvalues": list(r.eigenvalues), "flag": r.flag}
                     for r in self.rows],
        }


def _spectrum_size(spec: StateSpec, mode: TraceMode) -> int:
    if mode.kind == FIXED:
        return len(spec.basis.observable_values(1 - mode.observable))
    return spec.basis.dim


def run_sweep(spec: StateSpec, param: str, start: float, stop: float,
              steps: int, trace_mode: str | TraceMode = GLOBAL,
              with_oracle: bool = True,
              zero_tol: float = ZERO_TOL) -> SweepResult:
    """Evaluate entropy and spectrum on a parameter grid.

    A grid point where the state degenerates (or a trace loses support)
    produces a flagged row and the sweep continues; a verification failure
    aborts the whole run.
    """
    mode = (trace_mode if isinstance(trace_mode, TraceMode)
            else parse_trace_mode(trace_mode, spec))
    if param not in spec.referenced_params:
        raise ParseError(f"parameter {param!r} does not occur in the state",
                         1, 1, code="E_UNKNOWN_PARAM")
    if steps < 1:
        raise ParseError("sweep needs at least one grid point", 1, 1,
                         code="E_BAD_RANGE")
    size = _spectrum_size(spec, mode)
    rows: list[SweepRow] = []
    for value in np.linspace(float(start), float(stop), int(steps)):
        value = float(value)
        try:
            state = build_state(spec, {param: value})
            rho = apply_trace(state, mode)
            eigenvalues = [lam for lam, _ in
                           eigendecompose(rho, zero_tol=zero_tol)]
            _oracle_check(state, rho, eigenvalues, with_oracle)
        except PhysicsError as exc:
            rows.append(SweepRow(value, None, None, (), exc.code))
            continue
        entropy = von_neumann_entropy(eigenvalues)
        number = sum(1 for lam in eigenvalues if lam > zero_tol)
        rows.append(SweepRow(value, float(entropy), number,
                             tuple(eigenvalues)))
    return SweepResult(spec.to_text(), param, mode.text, size, tuple(rows))


def sweep_csv(result: SweepResult) -> str:
    """Render a sweep as CSV, one row per grid point, trailing flag column."""
    columns = ["param", "entropy_bits", "schmidt_number"]
    columns += [f"lambda_{k}" for k in range(1, result.spectrum_size + 1)]
    columns.append("flag")
    lines = [",".join(columns)]
    for row in result.rows:
        if row.flag:
            cells = [_fmt_float(row.param)]
            cells += [""] * (2 + result.spectrum_size)
            cells.append(row.flag)
        else:
            cells = [_fmt_float(row.param), _fmt_float(row.entropy_bits),
                     str(row.schmidt_number)]
            cells += [_fmt_float(lam) for lam in row.eigenvalues]
            cells += [""] * (result.spectrum_size - len(row.eigenvalues))
            cells.append("")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def sweep_result_from_record(record: dict) -> SweepResult:
    """Rebuild a SweepResult from its JSON record (for remote CSV rendering)."""
    rows = tuple(
        SweepRow(float(r["param"]),
                 None if r["entropy_bits"] is None else float(r["entropy_bits"]),
                 None if r["schmidt_number"] is None else int(r["schmidt_number"]),
                 tuple(float(v) for v in r["eigenvalues"]),
                 str(r["flag"]))
        for r in record["rows"])
    return SweepResult(record["input"]["state"], record["input"]["param"],
                       record["input"]["trace"], int(record["spectrum_size"]),
                       rows)


# ---------------------------------------------------------------------------
# fixture check

def run_check(with_oracle: bool = True) -> dict:
    """Run the bundled worked-example suite and report each outcome."""
    from .fixtures import run_all
    results = run_all(with_oracle=with_oracle)
    entries = [{"name": r.name, "description": r.description,
                "passed": r.passed, "detail": r.detail} for r in results]
    failures = sum(1 for r in results if not r.passed)
    return {"command": "check", "fixtures": entries,
            "total": len(results), "failures": failures,
            "passed": failures == 0}
