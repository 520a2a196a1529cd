"""Propagation: waveforms, the two integration routes, and their invariants."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingbell.model import ControlSample, TripletAmplitudes
from isingbell.propagator import (
    ControlWaveform,
    MethodMismatch,
    NonUnitaryDrift,
    fidelity,
    hc_batch,
    population_trace,
    propagate,
    rk4_evolve,
    segment_propagators,
    write_trajectory_csv,
)

SPIN_DOWN = TripletAmplitudes.spin_down()


class TestControlWaveform:
    def test_piecewise_segments_sample_right_continuous(self):
        wf = ControlWaveform.piecewise_constant(2.0, [1.0, -1.0], delta=0.5)
        d, w = wf.sample(np.array([0.0, 0.99, 1.0, 1.99]))
        assert np.allclose(w, [1.0, 1.0, -1.0, -1.0])
        assert np.allclose(d, 0.5)

    def test_scalar_delta_broadcasts(self):
        wf = ControlWaveform.piecewise_constant(1.0, [0.3, 0.4, 0.5], delta=-0.11)
        assert wf.piece_delta.shape == (3,)

    def test_rejects_zero_duration(self):
        with pytest.raises(ValueError):
            ControlWaveform.piecewise_constant(0.0, [1.0])

    def test_rejects_nonfinite_segments(self):
        with pytest.raises(ValueError):
            ControlWaveform.piecewise_constant(1.0, [np.nan])

    def test_sampled_grid_interpolates(self):
        wf = ControlWaveform.from_samples([0.0, 1.0, 2.0], [0.0, 1.0, 0.0], [0.0, 2.0, 0.0])
        s = wf.evaluate(0.5)
        assert s.delta == pytest.approx(0.5) and s.omega == pytest.approx(1.0)

    def test_sampled_grid_must_start_at_zero(self):
        with pytest.raises(ValueError):
            ControlWaveform.from_samples([0.5, 1.0], [0, 0], [0, 0])

    def test_sampled_grid_must_increase(self):
        with pytest.raises(ValueError):
            ControlWaveform.from_samples([0.0, 1.0, 1.0], [0, 0, 0], [0, 0, 0])

    def test_evaluate_returns_control_sample(self):
        wf = ControlWaveform.from_callable(1.0, lambda ts: (np.zeros_like(ts), np.ones_like(ts)))
        assert isinstance(wf.evaluate(0.3), ControlSample)


class TestPropagate:
    def test_zero_controls_keep_populations(self):
        wf = ControlWaveform.piecewise_constant(3.0, [0.0], delta=0.0)
        traj = propagate(wf, SPIN_DOWN)
        assert np.allclose(traj.populations, np.tile([1.0, 0.0, 0.0], (traj.times.size, 1)), atol=1e-12)
        # only a global phase may have accumulated
        assert abs(abs(traj.states[-1, 0]) - 1.0) < 1e-12

    def test_grid_endpoints(self):
        wf = ControlWaveform.piecewise_constant(2.5, [1.0])
        traj = propagate(wf, SPIN_DOWN)
        assert traj.times[0] == 0.0 and traj.times[-1] == 2.5

    def test_constant_pulse_matches_exact_exponential(self):
        # one constant segment: rk4 against the closed-form exponential
        wf = ControlWaveform.piecewise_constant(1.0, [1.0], delta=0.0)
        traj = propagate(wf, SPIN_DOWN, steps=4000, method="rk4")
        h = hc_batch(np.array([0.0]), np.array([1.0]))[0]
        evals, evecs = np.linalg.eigh(h)
        u = evecs @ np.diag(np.exp(-1j * evals * 1.0)) @ evecs.T
        exact = u @ SPIN_DOWN.as_array()
        assert np.max(np.abs(traj.states[-1] - exact)) <= 1e-8

    def test_methods_agree_on_piecewise(self):
        rng = np.random.default_rng(3)
        wf = ControlWaveform.piecewise_constant(2.0, rng.uniform(-1, 1, 50), delta=-0.11)
        t_exp = propagate(wf, SPIN_DOWN, method="piecewise-exponential")
        t_rk4 = propagate(wf, SPIN_DOWN, method="rk4")
        assert np.max(np.abs(t_exp.states[-1] - t_rk4.states[-1])) <= 1e-7

    def test_exponential_route_requires_piecewise(self):
        wf = ControlWaveform.from_callable(1.0, lambda ts: (np.zeros_like(ts), np.ones_like(ts)))
        with pytest.raises(MethodMismatch):
            propagate(wf, SPIN_DOWN, method="piecewise-exponential")

    def test_unknown_method_rejected(self):
        wf = ControlWaveform.piecewise_constant(1.0, [1.0])
        with pytest.raises(ValueError):
            propagate(wf, SPIN_DOWN, method="magnus")

    def test_too_few_steps_rejected(self):
        wf = ControlWaveform.piecewise_constant(1.0, [1.0])
        with pytest.raises(ValueError):
            propagate(wf, SPIN_DOWN, steps=10)

    def test_coarse_steps_raise_drift(self):
        wf = ControlWaveform.piecewise_constant(10.0, np.full(4, 50.0))
        with pytest.raises(NonUnitaryDrift):
            propagate(wf, SPIN_DOWN, steps=100)

    def test_auto_steps_track_pulse_area(self):
        # max|omega|*T = 500 -> 500000 steps, and the drift guard passes
        wf = ControlWaveform.piecewise_constant(10.0, np.full(4, 50.0))
        traj = propagate(wf, SPIN_DOWN)
        assert traj.times.size - 1 == 500000

    def test_rk4_steps_align_with_segments(self):
        wf = ControlWaveform.piecewise_constant(1.0, np.ones(7))
        traj = propagate(wf, SPIN_DOWN)
        assert (traj.times.size - 1) % 7 == 0

    def test_time_reversal_returns_start(self):
        rng = np.random.default_rng(11)
        n = 40
        omega = rng.uniform(-1, 1, n)
        delta = rng.uniform(-0.5, 0.5, n)
        wf = ControlWaveform.piecewise_constant(2.0, omega, delta=delta)
        traj = propagate(wf, SPIN_DOWN, method="piecewise-exponential")
        # backward leg: reversed waveform with the Hamiltonian negated
        dt = 2.0 / n
        h_back = -hc_batch(delta[::-1], omega[::-1])
        back = rk4_evolve(np.repeat(h_back, 50, axis=0), traj.states[-1], dt / 50)
        assert np.max(np.abs(back[-1] - SPIN_DOWN.as_array())) <= 1e-8

    def test_linearity_in_the_state(self):
        wf = ControlWaveform.piecewise_constant(2.0, [1.0, -0.5, 0.8], delta=0.2)
        u = TripletAmplitudes(1.0, 0.0, 0.0)
        v = TripletAmplitudes(0.0, 1.0, 0.0)
        mix = TripletAmplitudes(1 / np.sqrt(2), 1j / np.sqrt(2), 0.0)
        f_u = propagate(wf, u, method="piecewise-exponential").states[-1]
        f_v = propagate(wf, v, method="piecewise-exponential").states[-1]
        f_mix = propagate(wf, mix, method="piecewise-exponential").states[-1]
        assert np.max(np.abs(f_mix - (f_u / np.sqrt(2) + 1j * f_v / np.sqrt(2)))) <= 1e-9

    @given(segs=st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=3, max_size=16))
    @settings(max_examples=25, deadline=None)
    def test_norm_conserved_and_methods_agree(self, segs):
        wf = ControlWaveform.piecewise_constant(2.0, segs, delta=0.1)
        t_rk4 = propagate(wf, SPIN_DOWN)
        assert np.max(np.abs(np.sum(t_rk4.populations, axis=1) - 1.0)) <= 1e-10
        t_exp = propagate(wf, SPIN_DOWN, method="piecewise-exponential")
        assert np.max(np.abs(t_exp.states[-1] - t_rk4.states[-1])) <= 1e-7


class TestSegmentPropagators:
    def test_unitary(self):
        rng = np.random.default_rng(5)
        u, _, _ = segment_propagators(rng.uniform(-1, 1, 8), rng.uniform(-1, 1, 8), 0.1)
        eye = np.broadcast_to(np.eye(3), (8, 3, 3))
        assert np.allclose(np.matmul(u.conj().transpose(0, 2, 1), u), eye, atol=1e-13)


class TestFidelityAndPopulations:
    def test_bell_state_scores_one(self):
        wf = ControlWaveform.piecewise_constant(1.0, [0.0])
        traj = propagate(wf, TripletAmplitudes(0.0, 1.0, 0.0))
        assert fidelity(traj) == pytest.approx(1.0, abs=1e-12)

    def test_spin_down_scores_zero(self):
        wf = ControlWaveform.piecewise_constant(1.0, [0.0])
        traj = propagate(wf, SPIN_DOWN)
        assert fidelity(traj) == pytest.approx(0.0, abs=1e-12)

    def test_population_trace_sums_to_one(self):
        wf = ControlWaveform.piecewise_constant(2.0, [1.0, -1.0, 1.0, -1.0])
        traj = propagate(wf, SPIN_DOWN)
        p1, p2, p3 = population_trace(traj)
        assert np.max(np.abs(p1 + p2 + p3 - 1.0)) <= 1e-10


class TestTrajectoryCsv:
    def test_layout_and_precision(self, tmp_path):
        wf = ControlWaveform.piecewise_constant(1.0, [1.0, -1.0])
        traj = propagate(wf, SPIN_DOWN, steps=100)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, path, config={"T": 1.0})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# config: ")
        assert json.loads(lines[0][len("# config: "):]) == {"T": 1.0}
        header = lines[1].split(",")
        assert header == ["t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3",
                          "pop1", "pop2", "pop3", "delta", "omega"]
        assert len(lines) == 2 + traj.times.size
        # values survive a parse round trip at 15 significant digits
        row = np.array([float(x) for x in lines[2].split(",")])
        assert row[0] == 0.0 and row[1] == 1.0
        last = np.array([float(x) for x in lines[-1].split(",")])
        assert abs(last[7] - np.abs(traj.states[-1, 0]) ** 2) < 1e-14
