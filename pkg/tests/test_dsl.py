"""Unit tests for the state-text language: parsing, rendering, evaluation."""
from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from nolabel.dsl import (build_state, evaluate_scalar, parse_state,
                         with_param_defaults)
from nolabel.errors import (DegenerateStateError, ParseError,
                            PauliViolationError)

BELL = ("fermion; basis L:up,L:dn,R:up,R:dn; obs site,spin; "
        "params a=0.6, b=0.8; a*|L:up,R:dn> + b*|L:dn,R:up>")


def error_code(text: str) -> tuple[str, int, int]:
    with pytest.raises(ParseError) as info:
        parse_state(text)
    return info.value.code, info.value.line, info.value.column


class TestParsing:
    def test_full_spec(self):
        spec = parse_state(BELL)
        assert spec.statistics.name == "fermion"
        assert [str(lab) for lab in spec.basis.labels] == [
            "L:up", "L:dn", "R:up", "R:dn"]
        assert spec.observables == ("site", "spin")
        assert spec.declared_params == {"a": 0.6, "b": 0.8}
        assert len(spec.terms) == 2
        assert spec.observable_index("site") == 0
        assert spec.observable_index("spin") == 1
        assert spec.referenced_params == {"a", "b"}

    def test_sections_are_optional(self):
        spec = parse_state("boson; basis x,y; |x,y>")
        assert spec.observables is None
        assert spec.declared_params == {}
        assert spec.referenced_params == set()

    def test_leading_signs_and_division(self):
        spec = parse_state("boson; basis x,y; -|x,x> + |x,y>/2 - 0.5*|y,y>")
        state = build_state(spec)
        c = state.coeffs
        assert c[0, 0] == pytest.approx(-1.0)
        assert c[0, 1] == pytest.approx(0.25)
        assert c[1, 1] == pytest.approx(-0.5)

    def test_coefficient_grammar(self):
        assert evaluate_scalar("2^3^2") == pytest.approx(512.0)
        assert evaluate_scalar("-2^2") == pytest.approx(-4.0)
        assert evaluate_scalar("(1+2*i)*(1-2*i)") == pytest.approx(5.0)
        assert evaluate_scalar("exp(i*pi)") == pytest.approx(-1.0)
        assert evaluate_scalar("sqrt(2)/2") == pytest.approx(2 ** -0.5)
        assert evaluate_scalar("cos(pi/3)") == pytest.approx(0.5)
        assert evaluate_scalar("2e-3") == pytest.approx(0.002)
        assert evaluate_scalar("2**3") == pytest.approx(8.0)

    def test_scalar_with_environment(self):
        assert evaluate_scalar("sin(t)", {"t": math.pi / 2}) == (
            pytest.approx(1.0))

    def test_multiline_input(self):
        text = "fermion;\nbasis x, y;\nparams t=0.25;\nt*|x,y>"
        spec = parse_state(text)
        assert spec.declared_params == {"t": 0.25}

    def test_position_reported_on_unknown_label(self):
        code, line, column = error_code("boson;\nbasis x,y;\n|x,w>")
        assert code == "E_UNKNOWN_LABEL"
        assert (line, column) == (3, 4)


class TestParseErrors:
    @pytest.mark.parametrize("text,code", [
        ("plasma; basis x,y; |x,y>", "E_SYNTAX"),
        ("boson; basis x; |x,x>; extra", "E_SYNTAX"),
        ("boson; basis x, L:up; |x,x>", "E_BASIS_ARITY"),
        ("boson; basis x, x; |x,x>", "E_DUPLICATE_LABEL"),
        ("boson; basis L:up, R:up; obs site; |L:up,R:up>", "E_OBS_ARITY"),
        ("boson; basis L:up, R:up; obs site, site; |L:up,R:up>",
         "E_DUPLICATE_OBSERVABLE"),
        ("boson; basis x,y; obs o; obs p; |x,y>", "E_DUPLICATE_OBS"),
        ("boson; basis x,y; params t=1; params u=1; t*|x,y>",
         "E_DUPLICATE_PARAM"),
        ("boson; basis x,y; params t=1, t=2; t*|x,y>", "E_DUPLICATE_PARAM"),
        ("boson; basis x,y; params pi=3; |x,y>", "E_RESERVED_NAME"),
        ("boson; basis x,y; params t=1+i; t*|x,y>", "E_BAD_COEFFICIENT"),
        ("boson; basis x,y; 2*3", "E_MISSING_KET"),
        ("boson; basis x,y; frob(2)*|x,y>", "E_UNKNOWN_FUNCTION"),
        ("boson; basis x,y; |x,w>", "E_UNKNOWN_LABEL"),
        ("boson; basis x,y; (2+)*|x,y>", "E_BAD_COEFFICIENT"),
        ("boson; basis x,y; |x>", "E_SYNTAX"),
    ])
    def test_codes(self, text, code):
        got, _, _ = error_code(text)
        assert got == code

    def test_fermion_double_occupancy_rejected_at_parse(self):
        with pytest.raises(PauliViolationError):
            parse_state("fermion; basis x,y; |x,x>")

    def test_unknown_observable_name(self):
        spec = parse_state(BELL)
        with pytest.raises(ParseError) as info:
            spec.observable_index("flavor")
        assert info.value.code == "E_UNKNOWN_OBSERVABLE"


class TestBuildState:
    def test_coefficients_split_between_orders(self):
        state = build_state(parse_state("boson; basis x,y; 0.8*|x,y>"))
        assert state.coeffs[0, 1] == pytest.approx(0.4)
        assert state.coeffs[1, 0] == pytest.approx(0.4)
        state = build_state(parse_state("fermion; basis x,y; 0.8*|x,y>"))
        assert state.coeffs[0, 1] == pytest.approx(0.4)
        assert state.coeffs[1, 0] == pytest.approx(-0.4)

    def test_overrides_replace_defaults(self):
        spec = parse_state(BELL)
        state = build_state(spec, {"a": 0.8, "b": 0.6})
        assert 2.0 * state.coeffs[0, 3] == pytest.approx(0.8)

    def test_unbound_parameter_rejected(self):
        spec = parse_state("boson; basis x,y; t*|x,y>")
        with pytest.raises(ParseError) as info:
            build_state(spec)
        assert info.value.code == "E_UNBOUND_PARAMETER"
        state = build_state(spec, {"t": 0.5})
        assert state.coeffs[0, 1] == pytest.approx(0.25)

    def test_unknown_override_rejected(self):
        spec = parse_state(BELL)
        with pytest.raises(ParseError) as info:
            build_state(spec, {"c": 1.0})
        assert info.value.code == "E_UNKNOWN_PARAM"

    def test_cancelling_fermion_terms_degenerate(self):
        spec = parse_state("fermion; basis x,y; |x,y> + |y,x>")
        with pytest.raises(DegenerateStateError):
            build_state(spec)

    def test_zero_parameter_degenerate(self):
        spec = parse_state("fermion; basis x,y; params t=0.0; t*|x,y>")
        with pytest.raises(DegenerateStateError):
            build_state(spec)


class TestParamDefaults:
    def test_merges_and_sorts(self):
        spec = parse_state("boson; basis x,y; params b=2, a=1; a*b*|x,y>")
        merged = with_param_defaults(spec, {"b": 5.0})
        assert merged.declared_params == {"a": 1.0, "b": 5.0}
        rebuilt = parse_state(merged.to_text())
        assert rebuilt.declared_params == {"a": 1.0, "b": 5.0}

    def test_adds_missing_defaults(self):
        spec = parse_state("boson; basis x,y; t*u*|x,y>")
        merged = with_param_defaults(spec, {"u": 2.0, "t": 3.0})
        assert merged.declared_params == {"t": 3.0, "u": 2.0}
        state = build_state(merged)
        assert state.coeffs[0, 1] == pytest.approx(3.0)

    def test_unknown_name_rejected(self):
        spec = parse_state(BELL)
        with pytest.raises(ParseError) as info:
            with_param_defaults(spec, {"zz": 1.0})
        assert info.value.code == "E_UNKNOWN_PARAM"

    def test_empty_overrides_are_identity(self):
        spec = parse_state(BELL)
        assert with_param_defaults(spec, {}) == spec


class TestRendering:
    CASES = [
        BELL,
        "boson; basis x,y; |x,y>",
        "boson; basis x,y; -|x,x> + |x,y>/2 - 0.5*|y,y>",
        "boson; basis x,y; params t=0.5; (-0.6*t)*|x,y>",
        "boson; basis x,y; (0.866*i)*|x,y> + (0.5-0.5*i)*|y,y>",
        "boson; basis x,y; params t=0.7853981633974483; "
        "cos(t)*|x,x> + sin(t)*|x,y>",
        "fermion; basis e1,e2,e3; 2^3^2*|e1,e2> + (2^3)^2*|e2,e3>",
        "boson; basis up,dn; params theta=1.5, phi=0.2; "
        "cos(theta/2)*|up,up> + exp(i*phi)*sin(theta/2)*|up,dn>",
        "boson; basis x,y; params t=0.5; (t+1)*(t-2)*|x,y>",
        "boson; basis x,y; params t=0.5; 2^-t*|x,y> + (2*t)^t*|y,y>",
        "boson; basis x,y; params t=0.5; -t^2*|x,y> + t/(t+1)/2*|y,y>",
        "boson; basis x,y; params t=0.5; (1-t*i)*|x,y> - sin(t*pi/2)*|x,x>",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_round_trip_is_a_fixed_point(self, text):
        spec = parse_state(text)
        rendered = spec.to_text()
        again = parse_state(rendered)
        assert again == spec
        assert again.to_text() == rendered

    @pytest.mark.parametrize("text", CASES)
    def test_round_trip_preserves_the_state(self, text):
        spec = parse_state(text)
        env = {name: 1.0 for name in spec.referenced_params
               if name not in spec.params}
        first = build_state(spec, env or None)
        second = build_state(parse_state(spec.to_text()), env or None)
        assert second.coeffs == pytest.approx(first.coeffs)

    def test_numbers_render_with_full_precision(self):
        spec = parse_state("boson; basis x,y; params t=0.1; t*|x,y>")
        assert "t=0.1;" in spec.to_text()
        spec = parse_state(f"boson; basis x,y; {1 / 3!r}*|x,y>")
        assert repr(1 / 3) in spec.to_text()


class TestScalarEvaluation:
    def test_constants(self):
        assert evaluate_scalar("pi") == pytest.approx(math.pi)
        assert evaluate_scalar("i") == pytest.approx(1j)
        assert evaluate_scalar("tan(pi/4)") == pytest.approx(1.0)

    def test_unbound_name_rejected(self):
        with pytest.raises(ParseError) as info:
            evaluate_scalar("t+1")
        assert info.value.code == "E_UNBOUND_PARAMETER"

    def test_overflow_rejected(self):
        with pytest.raises(ParseError) as info:
            evaluate_scalar("exp(10000)")
        assert info.value.code == "E_BAD_COEFFICIENT"

    def test_division_by_zero_rejected(self):
        with pytest.raises(ParseError) as info:
            evaluate_scalar("1/0")
        assert info.value.code == "E_BAD_COEFFICIENT"
