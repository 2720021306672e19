import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helixfield import symmetry as sym

angles = st.floats(-10.0, 10.0, allow_nan=False)
unit_quaternions = st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(
    lambda q: np.linalg.norm(q) > 1e-3
)

# integer-valued quarter-turn matrices written out by hand
RX90 = np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]])
RY90 = np.array([[0, 0, 1], [0, 1, 0], [-1, 0, 0]])
RZ90 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]])


def _su2(q):
    q = np.asarray(q) / np.linalg.norm(q)
    return sym._quat_to_su2(q)


class TestRotationAboutAxis:
    def test_zero_angle_is_identity(self):
        assert np.array_equal(sym.rotation_about_axis("x", 0.0), np.eye(3))

    def test_x_quarter_turn_takes_y_to_z(self):
        v = sym.rotation_about_axis("x", math.pi / 2) @ [0, 1, 0]
        assert np.allclose(v, [0, 0, 1], atol=1e-15)

    def test_y_quarter_turn_takes_x_to_minus_z(self):
        v = sym.rotation_about_axis("y", math.pi / 2) @ [1, 0, 0]
        assert np.allclose(v, [0, 0, -1], atol=1e-15)

    @pytest.mark.parametrize("axis,oracle", [("x", RX90), ("y", RY90), ("z", RZ90)])
    def test_matches_hand_written_quarter_turns(self, axis, oracle):
        assert np.allclose(sym.rotation_about_axis(axis, math.pi / 2), oracle, atol=1e-15)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            sym.rotation_about_axis("w", 1.0)

    @given(axis=st.sampled_from("xyz"), angle=angles)
    def test_is_rotation(self, axis, angle):
        assert sym.is_rotation(sym.rotation_about_axis(axis, angle))


class TestCompose:
    def test_identity_left(self):
        r = sym.rotation_about_axis("z", 0.3)
        assert np.array_equal(sym.compose(np.eye(3), r), r)

    def test_order_x_after_y(self):
        m = sym.compose(sym.rotation_about_axis("x", math.pi / 2), sym.rotation_about_axis("y", math.pi / 2))
        assert np.allclose(m @ [1, 0, 0], RX90 @ RY90 @ [1, 0, 0], atol=1e-12)
        assert np.allclose(m @ [1, 0, 0], [0, 1, 0], atol=1e-12)

    def test_order_y_after_x(self):
        m = sym.compose(sym.rotation_about_axis("y", math.pi / 2), sym.rotation_about_axis("x", math.pi / 2))
        assert np.allclose(m @ [1, 0, 0], [0, 0, -1], atol=1e-12)

    def test_group_closure_over_long_chain(self, rng):
        m = np.eye(3)
        for _ in range(10_000):
            m = sym.compose(sym.random_rotation(rng), m)
        assert sym.is_rotation(m, tol=1e-10)


class TestEuler:
    def test_zero_is_identity(self):
        assert np.allclose(sym.euler_to_matrix(sym.EulerAngles(0, 0, 0)), np.eye(3))

    @given(phi=angles)
    def test_single_factor(self, phi):
        assert np.allclose(sym.euler_to_matrix((phi, 0, 0)), sym.rotation_about_axis("z", phi), atol=1e-14)

    def test_two_quarter_turns(self):
        assert np.allclose(sym.euler_to_matrix((math.pi / 2, math.pi / 2, 0)), RZ90 @ RX90, atol=1e-15)

    def test_reduced_for_display(self):
        red = sym.EulerAngles(-math.pi / 2, 7.0, 2 * math.pi).reduced()
        assert red.phi == pytest.approx(1.5 * math.pi)
        assert red.theta == pytest.approx(7.0 - 2 * math.pi)
        assert 0 <= red.psi < 2 * math.pi


class TestCommutatorDefect:
    @given(a=angles, b=angles)
    def test_same_axis_commutes(self, a, b):
        r1, r2 = sym.rotation_about_axis("z", a), sym.rotation_about_axis("z", b)
        assert sym.commutator_defect(r1, r2) < 1e-12

    def test_with_identity(self):
        assert sym.commutator_defect(sym.rotation_about_axis("y", 0.7), np.eye(3)) == 0.0

    def test_quarter_turns_x_y(self):
        # integer oracle: Rx Ry - Ry Rx = [[0,-1,1],[1,0,1],[1,1,0]], Frobenius norm sqrt(6)
        diff = RX90 @ RY90 - RY90 @ RX90
        assert np.array_equal(diff, [[0, -1, 1], [1, 0, 1], [1, 1, 0]])
        value = sym.commutator_defect(sym.rotation_about_axis("x", math.pi / 2), sym.rotation_about_axis("y", math.pi / 2))
        assert value == pytest.approx(math.sqrt(6), abs=1e-12)
        assert value > 1


class TestSU2:
    @pytest.mark.parametrize("axis", [(1, 0, 0), (0, 0.6, 0.8)])
    def test_zero_angle_identity(self, axis):
        assert np.allclose(sym.su2_from_axis_angle(axis, 0.0), np.eye(2))

    def test_full_turn_is_minus_identity(self):
        assert np.allclose(sym.su2_from_axis_angle((0, 0, 1), 2 * math.pi), -np.eye(2), atol=1e-15)

    def test_half_turn_about_z(self):
        assert np.allclose(sym.su2_from_axis_angle((0, 0, 1), math.pi), np.diag([-1j, 1j]), atol=1e-15)

    def test_rejects_non_unit_axis(self):
        with pytest.raises(ValueError, match="unit norm"):
            sym.su2_from_axis_angle((1, 1, 0), 0.3)

    @given(q=unit_quaternions)
    def test_random_elements_are_su2(self, q):
        assert sym.is_su2(_su2(q))


class TestAdjointMap:
    def test_identity(self):
        assert np.allclose(sym.adjoint_map(np.eye(2)), np.eye(3))

    def test_minus_identity(self):
        assert np.allclose(sym.adjoint_map(-np.eye(2)), np.eye(3))

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_axis_angle_grid(self, axis):
        n = np.eye(3)["xyz".index(axis)]
        for theta in np.linspace(-2 * math.pi, 2 * math.pi, 33):
            r = sym.adjoint_map(sym.su2_from_axis_angle(n, theta))
            assert np.allclose(r, sym.rotation_about_axis(axis, theta), atol=1e-13)

    @given(q1=unit_quaternions, q2=unit_quaternions)
    def test_homomorphism(self, q1, q2):
        u1, u2 = _su2(q1), _su2(q2)
        lhs = sym.adjoint_map(u1 @ u2)
        rhs = sym.compose(sym.adjoint_map(u1), sym.adjoint_map(u2))
        assert np.max(np.abs(lhs - rhs)) < 1e-9

    @given(q=unit_quaternions)
    def test_double_cover(self, q):
        u = _su2(q)
        assert np.max(np.abs(sym.adjoint_map(u) - sym.adjoint_map(-u))) < 1e-12

    @given(q=unit_quaternions)
    def test_image_is_rotation(self, q):
        assert sym.is_rotation(sym.adjoint_map(_su2(q)), tol=1e-12)


class TestSpinorToVector:
    def test_up_spinor(self):
        assert np.allclose(sym.spinor_to_vector((1, 0)), [0.5j, -0.5j, 0])

    def test_zero(self):
        assert np.array_equal(sym.spinor_to_vector((0, 0)), np.zeros(3))

    def test_equal_components(self):
        assert np.allclose(sym.spinor_to_vector((1, 1)), [0, -1j, 1])

    @given(
        x1=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        x2=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        lam=st.floats(-5, 5),
    )
    def test_quadratic_scaling(self, x1, x2, lam):
        lhs = sym.spinor_to_vector((lam * x1, lam * x2))
        rhs = lam**2 * sym.spinor_to_vector((x1, x2))
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@given(axis=st.sampled_from("xyz"), angle=angles, v=st.lists(st.floats(-100, 100), min_size=3, max_size=3))
def test_rotation_preserves_norm(axis, angle, v):
    v = np.asarray(v)
    rv = sym.rotation_about_axis(axis, angle) @ v
    assert abs(np.linalg.norm(rv) - np.linalg.norm(v)) <= 1e-12 * max(1.0, np.linalg.norm(v))


def test_random_rotation_is_reproducible():
    a = sym.random_rotation(np.random.default_rng(3))
    b = sym.random_rotation(np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert sym.is_rotation(a)
