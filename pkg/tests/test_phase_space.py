import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qepsd.phase_space import (
    ComposedDisplacement,
    Displacement,
    PhasePoint,
    apply_reduced,
    compose_full,
    decompose,
    invert,
    reduce_displacement,
)

component = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)
points = st.builds(PhasePoint, component, component)


def c(p: PhasePoint) -> complex:
    return p.to_complex()


class TestPhasePoint:
    def test_amplitude_and_phase(self):
        p = PhasePoint(3.0, 4.0)
        assert p.amplitude() == pytest.approx(5.0)
        assert -cmath.pi < p.phase() <= cmath.pi

    @given(points)
    def test_polar_roundtrip(self, p):
        q = PhasePoint.make_polar(p.amplitude(), p.phase())
        tol = 1e-12 * max(1.0, p.amplitude())
        assert abs(c(q) - c(p)) <= tol

    def test_negative_real_axis_phase_is_pi(self):
        assert PhasePoint(-1.0, 0.0).phase() == pytest.approx(cmath.pi)


class TestComposeFull:
    def test_unit_pair_global_phase(self):
        # alpha*conj(beta) = 1*(-1j) = -1j, exponent -2j, angle -2
        out = compose_full(Displacement.of(1), Displacement.of(1j))
        assert c(out.net.param) == 1 + 1j
        assert out.global_phase == -2.0

    def test_equal_operands_have_zero_phase(self):
        a = Displacement.of(0.7 - 0.3j)
        out = compose_full(a, a)
        assert c(out.net.param) == 1.4 - 0.6j
        assert out.global_phase == 0.0

    def test_identity_operand(self):
        out = compose_full(Displacement.of(0), Displacement.of(2 - 1j))
        assert c(out.net.param) == 2 - 1j
        assert out.global_phase == 0.0

    @given(points, points)
    def test_reduced_composition_commutes_bit_exactly(self, a, b):
        da, db = Displacement(a), Displacement(b)
        ab = reduce_displacement(compose_full(da, db))
        ba = reduce_displacement(compose_full(db, da))
        assert ab == ba

    @given(points, points)
    def test_global_phase_antisymmetric(self, a, b):
        da, db = Displacement(a), Displacement(b)
        fwd = compose_full(da, db).global_phase
        rev = compose_full(db, da).global_phase
        assert abs(fwd + rev) <= 1e-12

    @given(points, points)
    def test_exponent_purely_imaginary(self, a, b):
        alpha, beta = c(a), c(b)
        exponent = alpha * beta.conjugate() - alpha.conjugate() * beta
        assert abs(exponent.real) <= 1e-12
        # and its imaginary part is what compose_full stores
        got = compose_full(Displacement(a), Displacement(b)).global_phase
        assert abs(got - exponent.imag) <= 1e-12


class TestReduce:
    def test_reduce_drops_phase(self):
        composed = compose_full(Displacement.of(1), Displacement.of(1j))
        assert c(reduce_displacement(composed).param) == 1 + 1j

    def test_inverse_pair_cancels(self):
        alpha = 1.25 - 0.5j
        out = compose_full(Displacement.of(alpha), Displacement.of(-alpha))
        assert c(reduce_displacement(out).param) == 0


class TestApplyAndInvert:
    def test_opposite_phase_cancellation(self):
        d = Displacement.of(1 + 1j)
        assert c(apply_reduced(d, PhasePoint(-1, -1))) == 0

    def test_two_unit_band_point(self):
        d = Displacement.of(1 + 1j)
        assert c(apply_reduced(d, PhasePoint(1, -1))) == 2 + 0j

    def test_identity_displacement(self):
        d = Displacement.of(0)
        state = PhasePoint(0.3, -0.7)
        assert apply_reduced(d, state) == state

    def test_invert_sign_flip_and_fixed_point(self):
        assert c(invert(Displacement.of(1 + 1j)).param) == -1 - 1j
        assert c(invert(Displacement.of(0)).param) == 0

    @given(points)
    def test_invert_is_involution(self, p):
        d = Displacement(p)
        assert invert(invert(d)) == d

    def test_invert_undoes_apply_exactly(self):
        d = Displacement.of(2 - 1j)
        state = PhasePoint(0.5, 0.5)
        back = apply_reduced(invert(d), apply_reduced(d, state))
        assert back == state

    @given(points, points, points)
    def test_group_additivity(self, a, b, state):
        via_two = apply_reduced(Displacement(a), apply_reduced(Displacement(b), state))
        via_sum = apply_reduced(Displacement(a + b), state)
        assert abs(c(via_two) - c(via_sum)) <= 1e-12


class TestDecompose:
    def test_equal_split_pair(self):
        parts = decompose(PhasePoint(2, 2), 2)
        assert [c(d.param) for d in parts] == [1 + 1j, 1 + 1j]

    @given(points)
    def test_three_way_sum_reconstructs(self, alpha):
        parts = decompose(alpha, 3)
        total = sum(c(d.param) for d in parts)
        assert abs(total - c(alpha)) <= 1e-12

    @pytest.mark.parametrize("m", [2, 3, 5])
    @given(alpha=points, state=points)
    @settings(max_examples=30)
    def test_sequential_apply_matches_direct(self, m, alpha, state):
        parts = decompose(alpha, m)
        acc = state
        for d in parts:
            acc = apply_reduced(d, acc)
        direct = apply_reduced(Displacement(alpha), state)
        assert abs(c(acc) - c(direct)) <= 1e-12

    def test_qam_phase_rule_snaps_first_part(self):
        parts = decompose(PhasePoint(0.8, 1.3), 2, split_rule="qam_phase")
        assert c(parts[0].param) == 1 + 1j
        assert abs(sum(c(d.param) for d in parts) - (0.8 + 1.3j)) <= 1e-12

    def test_too_few_parts_rejected(self):
        with pytest.raises(ValueError):
            decompose(PhasePoint(1, 0), 1)

    def test_unknown_rule_rejected(self):
        with pytest.raises(ValueError):
            decompose(PhasePoint(1, 0), 2, split_rule="nope")


def test_composed_displacement_is_value_like():
    a = ComposedDisplacement(Displacement.of(1), 0.5)
    b = ComposedDisplacement(Displacement.of(1), 0.5)
    assert a == b
