import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helixfield.errors import ConfigError
from helixfield.initial import InitialCondition, motion_velocity

X = np.arange(64) / 64


def parse(**desc):
    return InitialCondition.parse(desc)


class TestParse:
    def test_defaults(self):
        ic = parse(type="gaussian")
        assert (ic.center, ic.width, ic.amplitude, ic.direction) == (0.5, 0.05, 1.0, (1.0, 0.0, 0.0))

    def test_unknown_type_names_key(self):
        with pytest.raises(ConfigError) as info:
            InitialCondition.parse({"type": "square"}, "initial.c")
        assert info.value.key == "initial.c.type"

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse(type="gaussian", sigma=0.1)
        assert info.value.key == "initial.sigma"

    def test_direction_only_for_vectors(self):
        with pytest.raises(ConfigError):
            InitialCondition.parse({"type": "zero", "direction": [0, 1, 0]}, vector=False)

    @pytest.mark.parametrize("bad", [{"width": 0.0}, {"width": -1.0}, {"center": "a"}, {"amplitude": True}, {"direction": [1, 2]}])
    def test_bad_values(self, bad):
        with pytest.raises(ConfigError):
            parse(type="gaussian", **bad)

    def test_round_trip(self):
        desc = {
            "type": "sum",
            "terms": [
                {"type": "gaussian", "center": 0.2, "width": 0.1, "amplitude": 2.0, "direction": [0.0, 1.0, 0.0]},
                {"type": "plane_wave", "k": 6.0, "amplitude": 0.5, "phase": 0.1, "direction": [1.0, 0.0, 0.0]},
            ],
        }
        ic = InitialCondition.parse(desc)
        assert InitialCondition.parse(ic.to_dict()) == ic


class TestEvaluate:
    def test_zero(self):
        assert not np.any(parse(type="zero").vector(X, 1.0))

    def test_gaussian_is_periodic(self):
        ic = parse(type="gaussian", center=0.0, width=0.1)
        f = ic.scalar(X, 1.0)
        assert f[1] == pytest.approx(f[-1], rel=1e-12)

    def test_plane_wave_real_and_complex(self):
        ic = parse(type="plane_wave", k=2 * np.pi, amplitude=2.0, phase=0.3)
        assert np.allclose(ic.scalar(X, 1.0), 2 * np.cos(2 * np.pi * X + 0.3))
        assert np.allclose(ic.scalar(X, 1.0, complex_=True), 2 * np.exp(1j * (2 * np.pi * X + 0.3)))

    def test_direction(self):
        ic = parse(type="gaussian", direction=[0, 0, 2])
        v = ic.vector(X, 1.0)
        assert not np.any(v[:, :2]) and np.allclose(v[:, 2], 2 * ic.scalar(X, 1.0))

    @given(c1=st.floats(0, 1), c2=st.floats(0, 1), a=st.floats(-3, 3))
    def test_sum_composes(self, c1, c2, a):
        g1 = {"type": "gaussian", "center": c1, "amplitude": a}
        g2 = {"type": "plane_wave", "k": 4.0, "direction": [0.0, 1.0, 0.0]}
        total = InitialCondition.parse({"type": "sum", "terms": [g1, g2]}).vector(X, 1.0)
        assert np.allclose(total, InitialCondition.parse(g1).vector(X, 1.0) + InitialCondition.parse(g2).vector(X, 1.0))

    def test_derivative_matches_finite_difference(self):
        ic = parse(type="gaussian", width=0.1)
        h = 1e-6
        fd = (ic.scalar(X + h, 1.0) - ic.scalar(X - h, 1.0)) / (2 * h)
        assert np.allclose(ic.scalar(X, 1.0, derivative=True), fd, atol=1e-6)


class TestMotion:
    def test_standing(self):
        assert motion_velocity(parse(type="gaussian"), X, 1.0, 1.0, "standing", vector=True) is None

    def test_right_moving(self):
        ic = parse(type="gaussian")
        v = motion_velocity(ic, X, 1.0, 2.0, "right", vector=True)
        assert np.allclose(v, -2.0 * ic.vector(X, 1.0, derivative=True))

    def test_bad_motion(self):
        with pytest.raises(ConfigError):
            motion_velocity(parse(type="gaussian"), X, 1.0, 1.0, "up", vector=True)
