"""Unit tests for the coefficient-matrix algebra layer."""
from __future__ import annotations

import numpy as np
import pytest

from conftest import (BOTH_STATISTICS, plain_basis, random_ket,
                      random_orthonormal_pair, random_state)
from nolabel.algebra import (BOSON, FERMION, Basis, BasisLabel, Ket,
                             Statistics, TwoParticleState, inner2, project1,
                             project1_partial, wedge)
from nolabel.errors import DegenerateStateError, UnsupportedBasisError


class TestBasis:
    def test_label_parse_and_str(self):
        lab = BasisLabel.parse("L:up")
        assert lab.parts == ("L", "up")
        assert lab.arity == 2
        assert str(lab) == "L:up"

    def test_label_rejects_empty_part(self):
        with pytest.raises(ValueError):
            BasisLabel(("L", ""))

    def test_parse_from_string_and_list(self):
        b1 = Basis.parse("x, y, z")
        b2 = Basis.parse(["x", "y", "z"])
        assert b1 == b2
        assert b1.dim == 3
        assert b1.arity == 1
        assert b1.index("y") == 1

    def test_rejects_duplicates_and_mixed_arity(self):
        with pytest.raises(ValueError):
            Basis.parse("x, x")
        with pytest.raises(ValueError):
            Basis.parse("x, L:up")

    def test_observable_values_keep_first_appearance_order(self):
        basis = Basis.parse("L:up, L:dn, R:up, R:dn")
        assert basis.observable_values(0) == ("L", "R")
        assert basis.observable_values(1) == ("up", "dn")
        assert basis.indices_where(0, "R") == (2, 3)
        assert basis.indices_where(1, "up") == (0, 2)

    def test_unknown_label_raises(self):
        basis = Basis.parse("x, y")
        with pytest.raises(ValueError):
            basis.index("w")


class TestStatistics:
    def test_named_constants(self):
        assert Statistics.from_name("boson") is BOSON
        assert Statistics.from_name("fermion") is FERMION
        assert BOSON.exchange_sign == +1
        assert FERMION.exchange_sign == -1

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            Statistics.from_name("anyon")


class TestKet:
    def test_basis_state_and_norm(self):
        basis = plain_basis(3)
        ket = Ket.basis_state(basis, "b1")
        assert ket.norm() == pytest.approx(1.0)
        assert ket.inner(ket) == pytest.approx(1.0)
        assert str(ket.dominant_label()) == "b1"

    def test_inner_conjugates_the_bra(self, rng):
        basis = plain_basis(4)
        x, y = random_ket(rng, basis), random_ket(rng, basis)
        assert x.inner(y) == pytest.approx(np.conj(y.inner(x)))

    def test_arithmetic(self):
        basis = plain_basis(2)
        x = Ket.basis_state(basis, "b0")
        y = Ket.basis_state(basis, "b1")
        z = 2.0 * x + 1j * y - x
        assert z.amplitudes == pytest.approx(np.array([1.0, 1j]))
        assert (-z).amplitudes == pytest.approx(np.array([-1.0, -1j]))

    def test_normalize_zero_ket_fails(self):
        basis = plain_basis(2)
        with pytest.raises(DegenerateStateError):
            Ket(basis, np.zeros(2)).normalized()

    def test_mismatched_bases_rejected(self):
        x = Ket.basis_state(plain_basis(2), "b0")
        y = Ket.basis_state(Basis.parse("p, q"), "p")
        with pytest.raises(ValueError):
            x.inner(y)


class TestTwoParticleState:
    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_matrix_is_symmetrized(self, statistics):
        basis = plain_basis(2)
        c = np.array([[0.0, 1.0], [statistics.exchange_sign * 1.0, 0.0]])
        state = TwoParticleState(statistics, basis, c)
        sign = statistics.exchange_sign
        assert state.coeffs == pytest.approx(sign * state.coeffs.T)

    def test_asymmetric_matrix_rejected(self):
        basis = plain_basis(2)
        with pytest.raises(ValueError):
            TwoParticleState(BOSON, basis, np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            TwoParticleState(BOSON, plain_basis(2), np.zeros((3, 3)))

    def test_norm_matches_scalar_product(self, rng):
        for statistics in BOTH_STATISTICS:
            state = random_state(rng, plain_basis(4), statistics)
            assert inner2(state, state).real == pytest.approx(state.norm2())
            assert state.norm() == pytest.approx(1.0)

    def test_zero_state_detection_and_normalize(self):
        basis = plain_basis(2)
        zero = TwoParticleState(FERMION, basis, np.zeros((2, 2)))
        assert zero.is_zero()
        with pytest.raises(DegenerateStateError):
            zero.normalized()


class TestWedge:
    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_exchange_sign_under_swap(self, rng, statistics):
        basis = plain_basis(3)
        x, y = random_ket(rng, basis), random_ket(rng, basis)
        forward = wedge(x, y, statistics)
        backward = wedge(y, x, statistics)
        assert backward.coeffs == pytest.approx(
            statistics.exchange_sign * forward.coeffs)

    def test_fermion_pair_in_same_ket_vanishes(self, rng):
        basis = plain_basis(3)
        x = random_ket(rng, basis)
        assert wedge(x, x, FERMION).is_zero()

    def test_boson_pair_in_same_ket_has_norm_sqrt2(self, rng):
        basis = plain_basis(3)
        x = random_ket(rng, basis)
        assert wedge(x, x, BOSON).norm() == pytest.approx(2 ** 0.5)

    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_orthonormal_pair_is_already_normalized(self, rng, statistics):
        basis = plain_basis(4)
        x, y = random_orthonormal_pair(rng, basis)
        assert wedge(x, y, statistics).norm() == pytest.approx(1.0)

    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_bilinearity(self, rng, statistics):
        basis = plain_basis(3)
        x, y, z = (random_ket(rng, basis) for _ in range(3))
        left = wedge(2.0 * x + 1j * y, z, statistics)
        right = 2.0 * wedge(x, z, statistics) + 1j * wedge(y, z, statistics)
        assert left.coeffs == pytest.approx(right.coeffs)


class TestScalarProduct:
    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_expansion_on_wedge_products(self, rng, statistics):
        basis = plain_basis(4)
        a, b = random_ket(rng, basis), random_ket(rng, basis)
        c, d = random_ket(rng, basis), random_ket(rng, basis)
        got = inner2(wedge(a, b, statistics), wedge(c, d, statistics))
        sign = statistics.exchange_sign
        want = (a.inner(c) * b.inner(d) + sign * a.inner(d) * b.inner(c))
        assert got == pytest.approx(want)

    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_conjugate_symmetry(self, rng, statistics):
        basis = plain_basis(3)
        s1 = random_state(rng, basis, statistics)
        s2 = random_state(rng, basis, statistics)
        assert inner2(s1, s2) == pytest.approx(np.conj(inner2(s2, s1)))

    def test_mixed_statistics_rejected(self, rng):
        basis = plain_basis(3)
        with pytest.raises(ValueError):
            inner2(random_state(rng, basis, BOSON),
                   random_state(rng, basis, FERMION))


class TestOneParticleProjection:
    @pytest.mark.parametrize("statistics", BOTH_STATISTICS)
    def test_projection_of_wedge(self, rng, statistics):
        basis = plain_basis(4)
        x = random_ket(rng, basis)
        phi, psi = random_ket(rng, basis), random_ket(rng, basis)
        got = project1(x, wedge(phi, psi, statistics))
        sign = statistics.exchange_sign
        want = x.inner(phi) * psi + sign * x.inner(psi) * phi
        assert got.amplitudes == pytest.approx(want.amplitudes)

    def test_linearity_in_the_state(self, rng):
        basis = plain_basis(3)
        x = random_ket(rng, basis)
        s1 = random_state(rng, basis, BOSON)
        s2 = random_state(rng, basis, BOSON)
        got = project1(x, s1 + 2.0 * s2)
        want = project1(x, s1) + 2.0 * project1(x, s2)
        assert got.amplitudes == pytest.approx(want.amplitudes)


class TestObservableProjection:
    BASIS = Basis.parse("L:up, L:dn, R:up, R:dn")

    def _bell(self, a: float = 0.6, b: float = 0.8) -> TwoParticleState:
        up_l = Ket.basis_state(self.BASIS, "L:up")
        dn_l = Ket.basis_state(self.BASIS, "L:dn")
        up_r = Ket.basis_state(self.BASIS, "R:up")
        dn_r = Ket.basis_state(self.BASIS, "R:dn")
        raw = a * wedge(up_l, dn_r, FERMION) + b * wedge(dn_l, up_r, FERMION)
        return raw.normalized()

    def test_fix_rest_matches_full_composite_projection(self):
        state = self._bell()
        mixed = project1_partial("up", state, observable=1)
        direct = project1(Ket.basis_state(self.BASIS, "L:up"), state)
        assert mixed.fix_rest("L").amplitudes == pytest.approx(
            direct.amplitudes)

    def test_terms_enumerates_nonzero_pairings(self):
        state = self._bell()
        mixed = project1_partial("L", state, observable=0)
        labels = {(str(rest), str(full)) for rest, full, _ in mixed.terms()}
        assert labels == {("up", "R:dn"), ("dn", "R:up")}

    def test_plain_basis_rejected(self, rng):
        state = random_state(rng, plain_basis(3), BOSON)
        with pytest.raises(UnsupportedBasisError):
            project1_partial("b0", state, observable=0)

    def test_unknown_token_rejected(self):
        with pytest.raises(ValueError):
            project1_partial("mid", self._bell(), observable=0)
