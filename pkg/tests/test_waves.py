import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helixfield import waves
from helixfield.errors import CourantError


def gaussian(center=0.5, width=0.05, length=1.0):
    def f(x):
        x = np.asarray(x, dtype=float)
        return sum(np.exp(-((x - center + m * length) ** 2) / (2 * width**2)) for m in range(-3, 4))

    return f


def params(nx=256, courant=0.5):
    dx = 1.0 / nx
    return waves.WaveParams(a=1.0, nx=nx, dx=dx, dt=courant * dx)


def pulse_state(p, component=0, velocity=None):
    c0 = np.zeros((p.nx, 3))
    c0[:, component] = gaussian()(p.grid())
    return waves.initial_state(c0, p, velocity)


class TestParams:
    def test_courant_violation(self):
        with pytest.raises(CourantError):
            waves.WaveParams(a=1.0, nx=64, dx=0.01, dt=0.011)

    def test_courant_rechecked_at_step(self):
        p = params(16)
        state = pulse_state(p)
        bad = object.__new__(waves.WaveParams)
        object.__setattr__(bad, "a", 3.0)
        for k in ("nx", "dx", "dt"):
            object.__setattr__(bad, k, getattr(p, k))
        with pytest.raises(CourantError):
            waves.step_wave(state, bad)

    @pytest.mark.parametrize("kwargs", [{"nx": 2}, {"dx": 0.0}, {"dt": -1.0}, {"a": float("inf")}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            waves.WaveParams(**kwargs)


class TestDalembert:
    @given(x=st.floats(-5, 5), a=st.floats(0.1, 3), d=st.sampled_from([1, -1]))
    def test_time_zero(self, x, a, d):
        assert waves.dalembert(np.sin, x, 0.0, a, d) == np.sin(x)

    def test_gaussian_translation(self):
        f = lambda x: np.exp(-np.asarray(x) ** 2)
        x = np.linspace(-3, 5, 17)
        assert np.array_equal(waves.dalembert(f, x, 2.0, 1.0, -1), f(x - 2.0))

    def test_step_profile(self):
        step = lambda x: np.where(np.asarray(x) >= 0, 1.0, 0.0)
        x = np.linspace(-4, 1, 11)
        assert np.array_equal(waves.dalembert(step, x, 4.0, 0.5, 1), step(x + 2.0))

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            waves.dalembert(np.sin, 0.0, 1.0, 1.0, 0)


class TestStep:
    def test_zero_state_stays_zero(self):
        p = params(32)
        s = waves.initial_state(np.zeros((32, 3)), p)
        for _ in range(10):
            s = waves.step_wave(s, p)
        assert not np.any(s.current)

    def test_componentwise_decoupling(self):
        p = params(64)
        s = pulse_state(p, component=1)
        for _ in range(200):
            s = waves.step_wave(s, p)
        assert np.all(s.current[:, [0, 2]] == 0.0)
        assert np.any(s.current[:, 1] != 0.0)

    def test_one_dimensional_input_fills_first_component(self):
        p = params(16)
        s = waves.initial_state(np.ones(16), p)
        assert np.array_equal(s.current[:, 0], np.ones(16))
        assert not np.any(s.current[:, 1:])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            waves.step_wave(pulse_state(params(16)), params(32))

    def test_second_order_convergence(self):
        errors = []
        for nx in (256, 512):
            p = params(nx)
            steps = 200 * nx // 256
            s = pulse_state(p)
            for _ in range(steps):
                s = waves.step_wave(s, p)
            exact = waves.periodic_dalembert(gaussian(), p.grid(), steps * p.dt, p)
            errors.append(waves.l2_norm(s.current[:, 0] - exact, p.dx))
        ratio = errors[0] / errors[1]
        assert 3.5 <= ratio <= 4.5
        # frozen from the reference run; guards against silent scheme changes
        assert ratio == pytest.approx(4.0016, abs=1e-3)

    @given(
        a=st.lists(st.floats(-1, 1), min_size=48, max_size=48),
        b=st.lists(st.floats(-1, 1), min_size=48, max_size=48),
    )
    def test_superposition(self, a, b):
        p = params(16)
        sa = waves.initial_state(np.reshape(a, (16, 3)), p)
        sb = waves.initial_state(np.reshape(b, (16, 3)), p)
        sab = waves.initial_state(np.reshape(a, (16, 3)) + np.reshape(b, (16, 3)), p)
        for _ in range(50):
            sa, sb, sab = (waves.step_wave(s, p) for s in (sa, sb, sab))
        assert np.max(np.abs(sab.current - sa.current - sb.current)) < 1e-12


class TestSimulate:
    def test_zero_steps(self):
        p = params(16)
        s = pulse_state(p)
        assert waves.simulate_wave(s, p, 0) == [s]

    def test_stride_keeps_final_state(self):
        p = params(16)
        out = waves.simulate_wave(pulse_state(p), p, 10, stride=4)
        assert [s.time_index for s in out] == [0, 4, 8, 10]

    def test_counter_propagating_pair(self):
        p = params(512)
        x, length = p.grid(), p.length
        right, left = gaussian(0.3, 0.04), gaussian(0.7, 0.04)
        c0 = np.zeros((p.nx, 3))
        c0[:, 0] = right(x) + left(x)
        h = 1e-6  # velocity from the analytic profile derivatives
        v = -(right(x + h) - right(x - h)) / (2 * h) + (left(x + h) - left(x - h)) / (2 * h)
        vel = np.zeros_like(c0)
        vel[:, 0] = v
        steps = 400
        final = waves.simulate_wave(waves.initial_state(c0, p, vel), p, steps, stride=steps)[-1]
        t = steps * p.dt
        exact = waves.dalembert(lambda z: right(np.mod(z, length)), x, t, 1.0, -1) + waves.dalembert(
            lambda z: left(np.mod(z, length)), x, t, 1.0, 1
        )
        err = waves.l2_norm(final.current[:, 0] - exact, p.dx)
        assert err < 2e-3 * waves.l2_norm(exact, p.dx)


class TestEnergy:
    def test_drift_over_ten_thousand_steps(self):
        p = params(256)
        s = pulse_state(p)
        e0 = waves.wave_energy(s, p)
        worst = 0.0
        for _ in range(10_000):
            s = waves.step_wave(s, p)
            worst = max(worst, abs(waves.wave_energy(s, p) - e0))
        assert worst / e0 < 1e-6

    def test_matches_continuum_energy(self):
        # energy of a standing Gaussian at rest: 0.5 * int f'(x)^2 dx = sqrt(pi) / (4 w)
        p = params(1024)
        w = 0.05
        s = waves.initial_state(gaussian(width=w)(p.grid()), p)
        assert waves.wave_energy(s, p) == pytest.approx(np.sqrt(np.pi) / (4 * w), rel=1e-3)
