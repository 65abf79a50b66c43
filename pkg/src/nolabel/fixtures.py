"""Bundled worked examples with embedded expected values.

Each fixture runs the full pipeline on a physically meaningful state and
asserts frozen eigenvalues, entropies, Schmidt pairings, prefactors, and
error behavior. The ``check`` command reports one line per fixture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dsl import parse_state
from .errors import DecompositionError
from .pipeline import run_decompose, run_sweep

BELL = ("fermion; basis L:up,L:dn,R:up,R:dn; obs site,spin; "
        "params a=0.6, b=0.8; a*|L:up,R:dn> + b*|L:dn,R:up>")
BELL_BOSON = BELL.replace("fermion", "boson")
BELL_TRIG = ("fermion; basis L:up,L:dn,R:up,R:dn; obs site,spin; "
             "params t=0.5; cos(t)*|L:up,R:dn> + sin(t)*|L:dn,R:up>")
SAME_SITE_QUBITS = ("boson; basis up,dn; params theta=1.5707963267948966, "
                    "phi=0.0; cos(theta/2)*|up,up> + "
                    "exp(i*phi)*sin(theta/2)*|up,dn>")
SAME_SITE_QUTRITS = ("boson; basis e1,e2,e3; params phi=0.3; "
                     "cos(phi)*|e1,e2> + sin(phi)*|e1,e3>")
SAME_SITE_FERMIONS = ("fermion; basis L:up,L:dn,R:up,R:dn; obs site,spin; "
                      "|L:up,L:dn>")
LINE_STATE = "fermion; basis x,y; params t=0.5; t*|x,y>"


class _Failure(Exception):
    pass


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise _Failure(message)


def _near(actual: float, expected: float, tol: float = 1e-10) -> bool:
    return abs(actual - expected) <= tol


def _near_seq(actual, expected, tol: float = 1e-10) -> bool:
    actual, expected = list(actual), list(expected)
    return (len(actual) == len(expected)
            and all(_near(a, e, tol) for a, e in zip(actual, expected)))


def _amplitude(entry: dict, labels: list[str], label: str) -> complex:
    return complex(*entry["amplitudes"][labels.index(label)])


def _binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def _decompose(text: str, trace: str, with_oracle: bool,
               params: dict | None = None) -> dict:
    return run_decompose(parse_state(text), trace, with_oracle=with_oracle,
                         params=params)


def _check_oracle(record: dict, with_oracle: bool) -> None:
    if with_oracle:
        _check(record["oracle_check"]["performed"]
               and record["oracle_check"]["passed"],
               "independent cross-check did not run clean")


def _spin_pairing(record: dict, expectations) -> None:
    """Verify eigenvalue, ket label, and signed partner amplitudes per term."""
    labels = record["input"]["basis"]
    terms = record["schmidt_terms"]
    _check(len(terms) == len(expectations),
           f"expected {len(expectations)} terms, got {len(terms)}")
    for term, (lam, ket_label, partner_label, partner_amp) in zip(
            terms, expectations):
        _check(_near(term["eigenvalue"], lam),
               f"eigenvalue {term['eigenvalue']} != {lam}")
        _check(term["ket"]["label"] == ket_label,
               f"ket {term['ket']['label']} != {ket_label}")
        amp = _amplitude(term["partner"], labels, partner_label)
        _check(abs(amp - partner_amp) < 1e-10,
               f"partner amplitude on {partner_label} is {amp}, "
               f"expected {partner_amp}")


# ---------------------------------------------------------------------------
# separated sites: two qubits, one per site

def _separated_local(text: str, eta: float,
                     with_oracle: bool) -> str:
    rec = _decompose(text, "local:L", with_oracle)
    _check(_near_seq(rec["eigenvalues"], [0.64, 0.36, 0.0, 0.0]),
           f"eigenvalues {rec['eigenvalues']}")
    _check(_near(rec["entropy_bits"], _binary_entropy(0.36)),
           f"entropy {rec['entropy_bits']}")
    _check(_near(rec["trace_result"]["raw_trace"], 0.5),
           f"raw trace {rec['trace_result']['raw_trace']}")
    _spin_pairing(rec, [
        (0.64, "R:up", "L:dn", eta),
        (0.36, "R:dn", "L:up", eta),
    ])
    _check(_near(complex(*rec["prefactor"]).real, 1.0)
           and _near(complex(*rec["prefactor"]).imag, 0.0),
           f"prefactor {rec['prefactor']}")
    _check(rec["reconstruction_fidelity"] >= 1 - 1e-10, "fidelity")
    _check_oracle(rec, with_oracle)
    return ("local trace leaves the other site: eigenvalues (0.64, 0.36), "
            f"partner sign {eta:+.0f}, entropy %.12g" % rec["entropy_bits"])


def _separated_global(text: str, eta: float, with_oracle: bool) -> str:
    rec = _decompose(text, "global", with_oracle)
    _check(_near_seq(rec["eigenvalues"], [0.32, 0.32, 0.18, 0.18]),
           f"eigenvalues {rec['eigenvalues']}")
    expected_s = 1.0 + _binary_entropy(0.36)
    _check(_near(rec["entropy_bits"], expected_s),
           f"entropy {rec['entropy_bits']} != {expected_s}")
    _spin_pairing(rec, [
        (0.32, "L:dn", "R:up", 1.0),
        (0.32, "R:up", "L:dn", eta),
        (0.18, "L:up", "R:dn", 1.0),
        (0.18, "R:dn", "L:up", eta),
    ])
    _check(_near(abs(complex(*rec["prefactor"])), 1 / math.sqrt(2)),
           f"prefactor {rec['prefactor']}")
    _check(rec["reconstruction_fidelity"] >= 1 - 1e-10, "fidelity")
    _check_oracle(rec, with_oracle)
    return ("global trace halves each weight: spectrum "
            "(0.32, 0.32, 0.18, 0.18), entropy %.12g" % rec["entropy_bits"])


def fx_separated_local_fermion(with_oracle: bool) -> str:
    return _separated_local(BELL, -1.0, with_oracle)


def fx_separated_local_boson(with_oracle: bool) -> str:
    return _separated_local(BELL_BOSON, +1.0, with_oracle)


def fx_separated_global_fermion(with_oracle: bool) -> str:
    return _separated_global(BELL, -1.0, with_oracle)


def fx_separated_global_boson(with_oracle: bool) -> str:
    return _separated_global(BELL_BOSON, +1.0, with_oracle)


def fx_separated_product(with_oracle: bool) -> str:
    params = {"a": 1.0, "b": 0.0}
    rec_g = _decompose(BELL, "global", with_oracle, params)
    _check(abs(rec_g["entropy_bits"] - 1.0) < 1e-12,
           f"global entropy {rec_g['entropy_bits']}")
    _check(_near_seq(rec_g["eigenvalues"], [0.5, 0.5, 0.0, 0.0], 1e-12),
           f"global eigenvalues {rec_g['eigenvalues']}")
    rec_l = _decompose(BELL, "local:L", with_oracle, params)
    _check(abs(rec_l["entropy_bits"]) < 1e-12,
           f"local entropy {rec_l['entropy_bits']}")
    _check(rec_l["schmidt_number"] == 1, "product state must give one term")
    _check_oracle(rec_g, with_oracle)
    _check_oracle(rec_l, with_oracle)
    return ("one particle per site, aligned weights: global entropy 1 "
            "(measurement-induced), local entropy 0 (unentangled)")


# ---------------------------------------------------------------------------
# same site: two boson qubits with tilted pseudospins

def _qubit_spectrum(theta: float) -> tuple[float, float]:
    norm = 1 + math.cos(theta / 2) ** 2
    plus = (1 + math.cos(theta / 2)) ** 2 / (2 * norm)
    minus = (1 - math.cos(theta / 2)) ** 2 / (2 * norm)
    return plus, minus


def fx_same_site_qubits_overlap(with_oracle: bool) -> str:
    theta = math.pi / 2
    rec = _decompose(SAME_SITE_QUBITS, "global", with_oracle,
                     {"theta": theta, "phi": 0.0})
    plus, minus = _qubit_spectrum(theta)
    _check(_near_seq(rec["eigenvalues"], [plus, minus]),
           f"eigenvalues {rec['eigenvalues']}")
    _check(_near(rec["entropy_bits"], 0.18729859856877246),
           f"entropy {rec['entropy_bits']}")
    labels = rec["input"]["basis"]
    ket1 = rec["schmidt_terms"][0]["ket"]
    c, s = math.cos(theta / 4), math.sin(theta / 4)
    _check(abs(_amplitude(ket1, labels, "up") - c) < 1e-10
           and abs(_amplitude(ket1, labels, "dn") - s) < 1e-10,
           "leading eigenket is not the bisecting spin direction")
    for term in rec["schmidt_terms"]:
        ket = np.array([complex(*a) for a in term["ket"]["amplitudes"]])
        partner = np.array([complex(*a) for a in term["partner"]["amplitudes"]])
        _check(abs(abs(np.vdot(ket, partner)) - 1.0) < 1e-10,
               "partner must match its eigenket up to phase")
    _check(_near(abs(complex(*rec["prefactor"])), 1 / math.sqrt(2)),
           f"prefactor {rec['prefactor']}")
    _check_oracle(rec, with_oracle)
    return ("half-overlapping pseudospins: spectrum (%.12g, %.12g), "
            "entropy %.12g" % (plus, minus, rec["entropy_bits"]))


def fx_same_site_qubits_phase(with_oracle: bool) -> str:
    theta = 2 * math.pi / 3
    rec = _decompose(SAME_SITE_QUBITS, "global", with_oracle,
                     {"theta": theta, "phi": 0.7})
    plus, minus = _qubit_spectrum(theta)
    _check(_near_seq(rec["eigenvalues"], [plus, minus]),
           f"eigenvalues {rec['eigenvalues']}")
    rec0 = _decompose(SAME_SITE_QUBITS, "global", with_oracle,
                      {"theta": theta, "phi": 0.0})
    _check(_near(rec["entropy_bits"], rec0["entropy_bits"]),
           "entropy must not depend on the azimuthal phase")
    _check(rec["reconstruction_fidelity"] >= 1 - 1e-10, "fidelity")
    _check_oracle(rec, with_oracle)
    return ("tilted pseudospin with complex phase: spectrum (0.9, 0.1), "
            "entropy independent of the azimuthal angle")


def fx_same_site_qubits_extremes(with_oracle: bool) -> str:
    rec0 = _decompose(SAME_SITE_QUBITS, "global", with_oracle,
                      {"theta": 0.0, "phi": 0.0})
    _check(abs(rec0["entropy_bits"]) < 1e-12 and rec0["schmidt_number"] == 1,
           "aligned pseudospins must be unentangled")
    rec_pi = _decompose(SAME_SITE_QUBITS, "global", with_oracle,
                        {"theta": math.pi, "phi": 0.0})
    _check(abs(rec_pi["entropy_bits"] - 1.0) < 1e-12
           and _near_seq(rec_pi["eigenvalues"], [0.5, 0.5], 1e-12),
           "opposite pseudospins must be maximally entangled")
    _check_oracle(rec0, with_oracle)
    _check_oracle(rec_pi, with_oracle)
    return ("aligned spins give entropy 0 (one term); opposite spins give "
            "entropy 1 with spectrum (1/2, 1/2)")


# ---------------------------------------------------------------------------
# same site: two boson qutrits

def fx_same_site_qutrits(with_oracle: bool) -> str:
    phi = 0.3
    rec = _decompose(SAME_SITE_QUTRITS, "global", with_oracle, {"phi": phi})
    _check(_near_seq(rec["eigenvalues"], [0.5, 0.5, 0.0]),
           f"eigenvalues {rec['eigenvalues']}")
    _check(_near(rec["entropy_bits"], 1.0), f"entropy {rec['entropy_bits']}")
    _check(rec["schmidt_number"] == 2, "two-term structure")
    labels = rec["input"]["basis"]
    first, second = rec["schmidt_terms"]
    _check(first["ket"]["label"] == "e1", "leading eigenket")
    partner = first["partner"]
    _check(abs(_amplitude(partner, labels, "e2") - math.cos(phi)) < 1e-10
           and abs(_amplitude(partner, labels, "e3") - math.sin(phi)) < 1e-10,
           "partner of the shared level must be the superposed level")
    _check(second["partner"]["label"] == "e1",
           "second term must pair back to the shared level")
    _check(_near(abs(complex(*rec["prefactor"])), 1 / math.sqrt(2)),
           f"prefactor {rec['prefactor']}")
    _check_oracle(rec, with_oracle)
    return ("three-level pair: spectrum (1/2, 1/2, 0), entropy 1 for any "
            "superposition angle, two cross-paired terms")


def fx_same_site_qutrits_axis(with_oracle: bool) -> str:
    rec = _decompose(SAME_SITE_QUTRITS, "global", with_oracle, {"phi": 0.0})
    labels = rec["input"]["basis"]
    first, second = rec["schmidt_terms"]
    _check(first["ket"]["label"] == "e1"
           and abs(_amplitude(first["partner"], labels, "e2") - 1.0) < 1e-10,
           "axis case pairing e1 -> e2")
    _check(second["ket"]["label"] == "e2"
           and abs(_amplitude(second["partner"], labels, "e1") - 1.0) < 1e-10,
           "axis case pairing e2 -> e1")
    _check(_near(rec["entropy_bits"], 1.0), "entropy 1")
    _check_oracle(rec, with_oracle)
    return "axis-aligned qutrit pair decomposes exactly as e1 <-> e2"


# ---------------------------------------------------------------------------
# fixed-observable traces

def fx_fixed_same_site_fermions(with_oracle: bool) -> str:
    rec = _decompose(SAME_SITE_FERMIONS, "fixed:site=L", with_oracle)
    tr = rec["trace_result"]
    _check(tr["basis"] == ["up", "dn"], f"reduced basis {tr['basis']}")
    _check(_near_seq(rec["eigenvalues"], [0.5, 0.5]),
           f"eigenvalues {rec['eigenvalues']}")
    _check(_near(tr["raw_trace"], 1.0), f"raw trace {tr['raw_trace']}")
    _check(tr["residual_support"] is False, "support stays in the block")
    _check(_near(rec["entropy_bits"], 1.0) and rec["schmidt_number"] == 2,
           "opposite-spin fermion pair is maximally entangled")
    _check(_near(abs(complex(*rec["prefactor"])), 1 / math.sqrt(2)),
           f"prefactor {rec['prefactor']}")
    labels = rec["input"]["basis"]
    first, second = rec["schmidt_terms"]
    _check(first["ket"]["label"] == "L:dn"
           and abs(_amplitude(first["partner"], labels, "L:up") + 1.0) < 1e-10,
           "antisymmetric pairing L:dn -> -L:up")
    _check(second["ket"]["label"] == "L:up"
           and abs(_amplitude(second["partner"], labels, "L:dn") - 1.0) < 1e-10,
           "antisymmetric pairing L:up -> +L:dn")
    _check_oracle(rec, with_oracle)
    return ("site held fixed on a same-site pair: spin spectrum (1/2, 1/2), "
            "entropy 1, antisymmetric pairing")


def fx_fixed_separated_sites(with_oracle: bool) -> str:
    spec = parse_state(BELL)
    from .pipeline import apply_trace, parse_trace_mode
    from .dsl import build_state
    state = build_state(spec)
    rho = apply_trace(state, parse_trace_mode("fixed:site=L", spec))
    diag = np.diag(rho.matrix).real
    _check([str(lab) for lab in rho.basis.labels] == ["up", "dn"],
           "reduced basis")
    _check(_near(diag[0], 0.64) and _near(diag[1], 0.36),
           f"conditional spin weights {diag.tolist()}")
    _check(_near(rho.raw_trace, 0.5), f"raw trace {rho.raw_trace}")
    _check(rho.residual_support is False, "no residual support")
    try:
        run_decompose(spec, "fixed:site=L", with_oracle=with_oracle)
    except DecompositionError as exc:
        _check(exc.code == "E_RECONSTRUCTION", f"unexpected code {exc.code}")
        return ("conditional spin state at one site is (0.64, 0.36); "
                "unbalanced weights cannot reconstruct the pair, so the "
                "decomposition correctly refuses (E_RECONSTRUCTION)")
    raise _Failure("decomposition along a lossy fixed trace must fail")


def fx_fixed_balanced_decomposes(with_oracle: bool) -> str:
    root_half = "0.7071067811865476"
    text = BELL.replace("a=0.6, b=0.8", f"a={root_half}, b={root_half}")
    rec = _decompose(text, "fixed:site=L", with_oracle)
    _check(_near(rec["entropy_bits"], 1.0) and rec["schmidt_number"] == 2,
           "balanced weights give entropy 1")
    _check(rec["reconstruction_fidelity"] >= 1 - 1e-10, "fidelity")
    _check(_near(abs(complex(*rec["prefactor"])), 1.0),
           f"prefactor {rec['prefactor']}")
    _check_oracle(rec, with_oracle)
    return ("balanced separated-site pair survives the fixed-site trace: "
            "entropy 1, fidelity 1")


# ---------------------------------------------------------------------------
# sweeps

def fx_sweep_same_site_curve(with_oracle: bool) -> str:
    spec = parse_state(SAME_SITE_QUBITS)
    result = run_sweep(spec, "theta", 0.0, math.pi, 101, "global",
                       with_oracle=with_oracle)
    rows = result.rows
    _check(len(rows) == 101, f"{len(rows)} rows")
    _check(not any(r.flag for r in rows), "no flagged rows")
    _check(abs(rows[0].entropy_bits) < 1e-10, f"S(0) = {rows[0].entropy_bits}")
    _check(abs(rows[-1].entropy_bits - 1.0) < 1e-10,
           f"S(pi) = {rows[-1].entropy_bits}")
    entropies = [r.entropy_bits for r in rows]
    _check(all(b >= a - 1e-12 for a, b in zip(entropies, entropies[1:])),
           "entropy must not decrease with the tilt angle")
    return ("tilt-angle sweep, 101 points: entropy rises monotonically "
            "from 0 to 1")


def fx_sweep_separated_local_curve(with_oracle: bool) -> str:
    spec = parse_state(BELL_TRIG)
    result = run_sweep(spec, "t", math.pi / 8, 3 * math.pi / 8, 5, "local:L",
                       with_oracle=with_oracle)
    for row in result.rows:
        weight = math.cos(row.param) ** 2
        _check(_near(row.entropy_bits, _binary_entropy(weight)),
               f"entropy at t={row.param}")
    middle = result.rows[2]
    _check(_near(middle.entropy_bits, 1.0),
           "balanced point must reach entropy 1")
    return ("weight-angle sweep under a local trace follows the binary "
            "entropy curve, peaking at 1 for balanced weights")


def fx_sweep_qutrit_constant(with_oracle: bool) -> str:
    spec = parse_state(SAME_SITE_QUTRITS)
    result = run_sweep(spec, "phi", 0.0, 2 * math.pi, 21, "global",
                       with_oracle=with_oracle)
    for row in result.rows:
        _check(_near(row.entropy_bits, 1.0) and row.schmidt_number == 2,
               f"entropy at phi={row.param}")
    return "superposition-angle sweep: entropy constant at 1, two terms"


def fx_sweep_flags_degenerate_point(with_oracle: bool) -> str:
    spec = parse_state(LINE_STATE)
    result = run_sweep(spec, "t", -1.0, 1.0, 5, "global",
                       with_oracle=with_oracle)
    flags = [r.flag for r in result.rows]
    _check(flags == ["", "", "E_ZERO_STATE", "", ""],
           f"flags {flags}")
    _check(all(_near(r.entropy_bits, 1.0)
               for r in result.rows if not r.flag),
           "orthogonal fermion pair entropy")
    return ("sweep through a vanishing state flags the zero point "
            "(E_ZERO_STATE) and continues")


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    run: Callable[[bool], str]


@dataclass(frozen=True)
class FixtureResult:
    name: str
    description: str
    passed: bool
    detail: str


FIXTURES: tuple[Fixture, ...] = (
    Fixture("separated-local-fermion",
            "two fermion qubits in separate sites, trace on one site",
            fx_separated_local_fermion),
    Fixture("separated-local-boson",
            "two boson qubits in separate sites, trace on one site",
            fx_separated_local_boson),
    Fixture("separated-global-fermion",
            "two fermion qubits in separate sites, trace on the full basis",
            fx_separated_global_fermion),
    Fixture("separated-global-boson",
            "two boson qubits in separate sites, trace on the full basis",
            fx_separated_global_boson),
    Fixture("separated-product",
            "single-weight pair: entangled globally, unentangled locally",
            fx_separated_product),
    Fixture("same-site-qubits-overlap",
            "boson pair with half-overlapping pseudospins",
            fx_same_site_qubits_overlap),
    Fixture("same-site-qubits-phase",
            "boson pair with a complex azimuthal phase",
            fx_same_site_qubits_phase),
    Fixture("same-site-qubits-extremes",
            "aligned and opposite pseudospins at the same site",
            fx_same_site_qubits_extremes),
    Fixture("same-site-qutrits",
            "two three-level bosons sharing a level",
            fx_same_site_qutrits),
    Fixture("same-site-qutrits-axis",
            "qutrit pair at the axis point with exact pairing",
            fx_same_site_qutrits_axis),
    Fixture("fixed-same-site-fermions",
            "fixed-site trace of an opposite-spin fermion pair",
            fx_fixed_same_site_fermions),
    Fixture("fixed-separated-sites",
            "fixed-site trace across separated sites refuses to decompose",
            fx_fixed_separated_sites),
    Fixture("fixed-balanced-decomposes",
            "balanced separated pair decomposes through a fixed-site trace",
            fx_fixed_balanced_decomposes),
    Fixture("sweep-same-site-curve",
            "tilt-angle entropy curve, 101 grid points",
            fx_sweep_same_site_curve),
    Fixture("sweep-separated-local-curve",
            "binary entropy curve under a local trace",
            fx_sweep_separated_local_curve),
    Fixture("sweep-qutrit-constant",
            "constant maximal entropy over the superposition angle",
            fx_sweep_qutrit_constant),
    Fixture("sweep-flags-degenerate-point",
            "sweep flags a vanishing state and continues",
            fx_sweep_flags_degenerate_point),
)


def run_all(with_oracle: bool = True) -> list[FixtureResult]:
    """Run every fixture, never raising; failures become results."""
    results = []
    for fixture in FIXTURES:
        try:
            detail = fixture.run(with_oracle)
            results.append(FixtureResult(fixture.name, fixture.description,
                                         True, detail))
        except _Failure as exc:
            results.append(FixtureResult(fixture.name, fixture.description,
                                         False, str(exc)))
        except Exception as exc:  # noqa: BLE001 - report, do not crash
            results.append(FixtureResult(
                fixture.name, fixture.description, False,
                f"{type(exc).__name__}: {exc}"))
    return results
