"""Codebook-beamforming and auxiliary-beam-pair baseline trackers."""

import numpy as np
import pytest

from beamtrack.baselines import (
    AbpTracker,
    BeamPairConfig,
    CodebookTracker,
    abp_ratio_curve,
    abp_ratio_metric,
    build_codebook,
    codebook_jacobian,
    codebook_measurement,
    codebook_predicted,
)
from beamtrack.channel import ArrayConfig, PilotConfig, channel_matrix, ChannelRealization, complex_noise
from beamtrack.ekf import initial_state
from beamtrack.errors import MeasurementFailure
from beamtrack.geometry import SpatialState

from conftest import rank1_snapshot

NOISELESS = PilotConfig(snr_db=np.inf)


def _h_vec(u, v, arr, gain=1.0 + 0.0j):
    return rank1_snapshot(u, v, arr, gain).ravel()


class TestCodebook:
    def test_degenerate_single_beam(self):
        cb = build_codebook(1, ArrayConfig(2, 2))
        assert cb.m_dim == 2
        assert cb.beam_angles.shape == (1, 2)

    def test_k8_measurement_length(self):
        cb = build_codebook(8, ArrayConfig(8, 8))
        assert cb.m_dim == 128

    def test_unit_norm_weights(self):
        cb = build_codebook(4, ArrayConfig(4, 4))
        assert np.allclose(np.linalg.norm(cb.weights, axis=0), 1.0, atol=1e-12)

    def test_axis_angles_strictly_increasing(self):
        cb = build_codebook(8, ArrayConfig(8, 8))
        assert np.all(np.diff(cb.axis_angles) > 0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            build_codebook(0, ArrayConfig(4, 4))

    def test_nearest_axis_angle(self):
        cb = build_codebook(8, ArrayConfig(8, 8))
        target = cb.axis_angles[3]
        assert cb.nearest_axis_angle(target + 0.01) == pytest.approx(target)


class TestCodebookMeasurement:
    def test_aligned_beam_has_peak_magnitude(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        j = 5
        u, v = cb.beam_angles[j]
        z = codebook_measurement(_h_vec(u, v, arr), cb)
        mags = np.hypot(z[: cb.k**2], z[cb.k**2:])
        assert mags[j] == pytest.approx(np.sqrt(arr.n), abs=1e-10)
        assert j == int(np.argmax(mags))

    def test_length(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        assert codebook_measurement(_h_vec(0.1, 0.2, arr), cb).shape == (32,)

    def test_predicted_matches_noiseless_measurement(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        x = np.array([0.3, -0.8])
        z = codebook_measurement(_h_vec(x[0], x[1], arr, gain=0.7 - 0.1j), cb)
        z_hat = codebook_predicted(x, cb, 0.7 - 0.1j, 1.0 + 0.0j)
        assert np.allclose(z, z_hat, atol=1e-10)


class TestCodebookJacobian:
    def test_matches_finite_differences(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        rng = np.random.default_rng(3)
        h = 1e-6
        for _ in range(10):
            x = rng.uniform(-2, 2, 2)
            g = codebook_jacobian(x, cb)
            for i in range(2):
                xp, xm = x.copy(), x.copy()
                xp[i] += h
                xm[i] -= h
                fd = (codebook_predicted(xp, cb, 1.0, 1.0)
                      - codebook_predicted(xm, cb, 1.0, 1.0)) / (2 * h)
                denom = max(np.linalg.norm(fd), 1e-12)
                assert np.linalg.norm(g[:, i] - fd) / denom < 1e-5

    def test_stationary_at_beam_peak(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        j = 6
        x = cb.beam_angles[j].copy()
        g = codebook_jacobian(x, cb)
        k2 = cb.k**2
        # the aligned beam's response magnitude is at a pattern maximum, so
        # the derivative of |response_j|^2 vanishes: Re(conj(z_j) dz_j) = 0
        z = codebook_predicted(x, cb, 1.0, 1.0)
        zc = z[j] + 1j * z[j + k2]
        dz = g[j, :] + 1j * g[j + k2, :]
        assert np.all(np.abs((zc.conjugate() * dz).real) < 1e-8)

    def test_linear_in_symbol(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        x = np.array([0.4, 0.9])
        g1 = codebook_jacobian(x, cb, 1.0, 1.0)
        g2 = codebook_jacobian(x, cb, 2.0, 1.0)
        assert np.allclose(g2, 2.0 * g1, atol=1e-12)


class TestCodebookTracker:
    def test_noiseless_convergence_within_five_frames(self):
        arr = ArrayConfig(4, 4)
        cb = build_codebook(4, arr)
        truth = cb.beam_angles[5] + np.array([0.05, -0.03])
        tracker = CodebookTracker(
            cb, np.eye(2), np.eye(2) * 1e-8, NOISELESS,
            initial_state(truth + np.array([0.02, 0.02]), 0.05),
            gain_rho=1.0, gain_uncertainty_var=0.0,
        )
        y = _h_vec(truth[0], truth[1], arr)
        for _ in range(5):
            out = tracker.step(y)
        assert np.linalg.norm(out["state"].x - truth) < 1e-3

    def test_measurement_dimension(self):
        cb = build_codebook(8, ArrayConfig(8, 8))
        tracker = CodebookTracker(cb, np.eye(2), np.eye(2) * 1e-6, NOISELESS,
                                  initial_state(np.zeros(2), 0.01))
        assert tracker.m_dim == 128
        assert tracker.pilot_slots_per_frame == 64


class TestAbpRatio:
    def test_zero_at_center(self):
        assert abp_ratio_curve(0.5, 0.5, 0.2, 8) == pytest.approx(0.0, abs=1e-12)

    def test_positive_at_half_offset(self):
        delta = BeamPairConfig.for_array(8).offset
        assert abp_ratio_curve(0.1 + delta / 2, 0.1, delta, 8) > 0

    def test_strictly_monotone_over_beam_support(self):
        delta = BeamPairConfig.for_array(8).offset
        half_beam = np.pi / 8  # half the codebook beam spacing for K = 8
        grid = np.linspace(-half_beam, half_beam, 200)
        vals = [abp_ratio_curve(0.0 + g, 0.0, delta, 8) for g in grid]
        assert np.all(np.diff(vals) > 0)

    def test_metric_in_range_and_matches_curve(self):
        arr = ArrayConfig(8, 8)
        pair = BeamPairConfig.for_array(8)
        center = SpatialState(0.0, 0.0)
        y = _h_vec(0.1, -0.15, arr, gain=2.0j)
        zeta = abp_ratio_metric(y, center, pair, arr)
        assert np.all(np.abs(zeta) <= 1.0)
        assert zeta[0] == pytest.approx(abp_ratio_curve(0.1, 0.0, pair.offset, 8), abs=1e-10)
        assert zeta[1] == pytest.approx(abp_ratio_curve(-0.15, 0.0, pair.offset, 8), abs=1e-10)

    def test_gain_invariance(self):
        arr = ArrayConfig(8, 8)
        pair = BeamPairConfig.for_array(8)
        center = SpatialState(0.0, 0.0)
        z1 = abp_ratio_metric(_h_vec(0.1, 0.05, arr), center, pair, arr)
        z2 = abp_ratio_metric(7.7j * _h_vec(0.1, 0.05, arr), center, pair, arr)
        assert np.allclose(z1, z2, atol=1e-12)

    def test_mirror_symmetry(self):
        arr = ArrayConfig(8, 8)
        pair = BeamPairConfig.for_array(8)
        center = SpatialState(0.0, 0.0)
        zp = abp_ratio_metric(_h_vec(0.12, 0.07, arr), center, pair, arr)
        zm = abp_ratio_metric(_h_vec(-0.12, -0.07, arr), center, pair, arr)
        assert np.allclose(zp, -zm, atol=1e-10)

    def test_zero_power_raises(self):
        arr = ArrayConfig(8, 8)
        pair = BeamPairConfig.for_array(8)
        with pytest.raises(MeasurementFailure):
            abp_ratio_metric(np.zeros(64, dtype=complex), SpatialState(0, 0), pair, arr)

    def test_offset_validation(self):
        with pytest.raises(ValueError):
            BeamPairConfig(offset=0.0)


def _abp_tracker(arr, state, pilot=NOISELESS, **kw):
    cb = build_codebook(arr.n_x, arr)
    pair = BeamPairConfig.for_array(arr.n_x)
    return AbpTracker(cb, pair, np.eye(2), np.eye(2) * 1e-8, pilot, state, **kw)


class TestAbpTracker:
    def test_measurement_dimension(self):
        tracker = _abp_tracker(ArrayConfig(8, 8), initial_state(np.zeros(2), 0.01))
        assert tracker.m_dim == 2
        assert tracker.pilot_slots_per_frame == 64

    def test_update_beats_prediction_only(self):
        # paired trials: same noise, with and without the measurement update
        arr = ArrayConfig(8, 8)
        pilot = PilotConfig(snr_db=20.0, snr_reference="element")
        rng = np.random.default_rng(77)
        wins = 0
        trials = 100
        for _ in range(trials):
            truth = rng.uniform(-0.1, 0.1, 2)
            x0 = truth + rng.normal(0, 0.02, 2)
            tracker = _abp_tracker(arr, initial_state(x0, 0.02), pilot)
            h = _h_vec(truth[0], truth[1], arr)
            var = pilot.noise_variance(float(np.mean(np.abs(h) ** 2)), arr.n)
            err_upd, err_pred = None, np.linalg.norm(x0 - truth)
            for _ in range(5):
                y = h + complex_noise(h.shape, var, rng)
                out = tracker.step(y)
            err_upd = np.linalg.norm(out["state"].x - truth)
            if err_upd < err_pred:
                wins += 1
        assert wins / trials > 0.9

    def test_wrong_center_beam_stalls(self):
        # truth two beams away from the selected center: the ratio curve
        # carries no usable slope there, so the filter cannot converge fast
        arr = ArrayConfig(8, 8)
        cb = build_codebook(8, arr)
        beam_spacing = 2 * np.pi / 8
        truth = np.array([2 * beam_spacing + 0.05, 0.0])
        # initialize at zero so the center beam stays wrong
        tracker = _abp_tracker(arr, initial_state(np.zeros(2), 0.01))
        h = _h_vec(truth[0], truth[1], arr)
        for _ in range(5):
            out = tracker.step(h)
        assert np.linalg.norm(out["state"].x - truth) > 0.5

    def test_measurement_failure_falls_back_to_prediction(self):
        arr = ArrayConfig(8, 8)
        tracker = _abp_tracker(arr, initial_state(np.array([0.1, 0.1]), 0.01))
        out = tracker.step(np.zeros(arr.n, dtype=complex))
        assert out["meas_valid"] is False
        assert np.allclose(out["state"].x, [0.1, 0.1])

    def test_q_n_source_validation(self):
        arr = ArrayConfig(8, 8)
        with pytest.raises(ValueError):
            _abp_tracker(arr, initial_state(np.zeros(2), 0.01), q_n_source="bogus")
