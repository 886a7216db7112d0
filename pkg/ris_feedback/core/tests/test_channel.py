"""
Geometric channel synthesis
"""
import dataclasses

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from ris_feedback.core import channel
from ris_feedback.core.angular import sine_grid
from ris_feedback.core.config import SystemConfig
from ris_feedback.exceptions import InvalidPhaseConfiguration

from . import fixtures

angles = st.floats(min_value=-np.pi / 2, max_value=np.pi / 2, allow_nan=False, allow_infinity=False)


class SteeringVectorTests(SimpleTestCase):
    @given(angles, st.integers(min_value=1, max_value=64))
    @settings(max_examples=200, deadline=None)
    def test_ula_unit_norm(self, phi, M):
        self.assertAlmostEqual(np.linalg.norm(channel.ula_steering(phi, M)), 1.0, delta=1e-12)

    @given(angles, angles, st.integers(min_value=1, max_value=8), st.integers(min_value=1, max_value=8))
    @settings(max_examples=200, deadline=None)
    def test_upa_unit_norm(self, phi, theta, N1, N2):
        b = channel.upa_steering(phi, theta, N1, N2)
        self.assertEqual(b.shape, (N1 * N2,))
        self.assertAlmostEqual(np.linalg.norm(b), 1.0, delta=1e-12)

    def test_upa_index_order(self):
        u, v, N1, N2 = 0.3, -0.7, 4, 3
        b = channel.frequency_steering(u, v, N1, N2)
        scale = 1 / np.sqrt(N1 * N2)
        self.assertAlmostEqual(b[1], scale * np.exp(1j * np.pi * u))       # n1 = 1, n2 = 0
        self.assertAlmostEqual(b[N1], scale * np.exp(1j * np.pi * v))      # n1 = 0, n2 = 1
        self.assertAlmostEqual(b[N1 + 1], scale * np.exp(1j * np.pi * (u + v)))

    def test_ula_broadside(self):
        np.testing.assert_allclose(channel.ula_steering(0.0, 4), np.full(4, 0.5))

    @given(angles, angles, angles, angles, angles)
    @settings(max_examples=100, deadline=None)
    def test_cascaded_steering(self, aod, az1, el1, az2, el2):
        config = fixtures.SMALL
        bs_ris = channel.BsRisPath(gain=1, aod=aod, aoa_azimuth=az1, aoa_elevation=el1)
        ris_ue = channel.RisUePath(gain=1, aod_azimuth=az2, aod_elevation=el2)
        b = channel.cascaded_steering(ris_ue, bs_ris, config)
        np.testing.assert_allclose(np.abs(b), 1 / config.N, atol=1e-12)
        self.assertAlmostEqual(np.linalg.norm(b), 1 / np.sqrt(config.N), delta=1e-12)
        u, v = channel.cascaded_frequencies(ris_ue, bs_ris)
        self.assertTrue(-2 <= u <= 2 and -2 <= v <= 2)
        expected = channel.frequency_steering(u, v, config.N1, config.N2, scale=1 / config.N)
        np.testing.assert_allclose(b, expected, atol=1e-12)

    @given(angles, angles, angles, angles, angles)
    @settings(max_examples=100, deadline=None)
    def test_cascaded_steering_conjugation(self, aod, az1, el1, az2, el2):
        config = fixtures.SMALL
        b = channel.cascaded_steering(channel.RisUePath(gain=1, aod_azimuth=az2, aod_elevation=el2),
                                      channel.BsRisPath(gain=1, aod=aod, aoa_azimuth=az1, aoa_elevation=el1), config)
        mirrored = channel.cascaded_steering(channel.RisUePath(gain=1, aod_azimuth=-az2, aod_elevation=-el2),
                                             channel.BsRisPath(gain=1, aod=-aod, aoa_azimuth=-az1,
                                                               aoa_elevation=-el1), config)
        np.testing.assert_allclose(mirrored, np.conj(b), atol=1e-12)


class ChannelSynthesisTests(SimpleTestCase):
    def test_sample_paths(self):
        config = SystemConfig()
        paths = channel.sample_paths(config, fixtures.rng(3))
        self.assertEqual(len(paths.bs_ris_paths), config.L1)
        self.assertEqual([len(p) for p in paths.ris_ue_paths], [config.L2] * config.K)
        everything = [a for p in paths.bs_ris_paths for a in (p.aod, p.aoa_azimuth, p.aoa_elevation)] + \
                     [a for user in paths.ris_ue_paths for p in user for a in (p.aod_azimuth, p.aod_elevation)]
        self.assertTrue(all(-np.pi / 2 <= a <= np.pi / 2 for a in everything))
        self.assertEqual(paths.cascaded_gain(1, 2, 0),
                         paths.bs_ris_paths[1].gain * paths.ris_ue_paths[2][0].gain)

    def test_sample_paths_deterministic(self):
        config = SystemConfig()
        a = channel.sample_paths(config, fixtures.rng(7))
        b = channel.sample_paths(config, fixtures.rng(7))
        self.assertEqual(a, b)

    def test_on_grid(self):
        config = SystemConfig(G_t=128)
        paths = channel.sample_paths(config, fixtures.rng(1), on_grid=True)
        grid = sine_grid(config.G_t)
        for s in np.sin(paths.aods):
            self.assertLess(np.min(np.abs(grid - s)), 1e-12)

    def test_cascaded_identity(self):
        """ H_k equals diag(h_r^H) G for the separately built BS-RIS and RIS-UE channels """
        config = SystemConfig()
        for seed in range(100):
            paths = channel.sample_paths(config, fixtures.rng(seed))
            k = seed % config.K
            G = channel.bs_ris_channel(paths, config)
            h_r = channel.ris_ue_channel(paths, k, config)
            H = channel.cascaded_matrix(paths, k, config)
            np.testing.assert_allclose(H, h_r[:, None] * G, atol=1e-10)

    def test_linear_in_path_gains(self):
        """ Doubling one BS-RIS or RIS-UE gain adds exactly the paths it scales, and only to the users it feeds """
        config = fixtures.SMALL
        paths = channel.sample_paths(config, fixtures.rng(11))
        before = [channel.cascaded_matrix(paths, k, config) for k in range(config.K)]

        def steering(i):
            return np.conj(channel.ula_steering(paths.bs_ris_paths[i].aod, config.M, config.d_B_over_lambda))

        i = 1
        bs_ris = list(paths.bs_ris_paths)
        bs_ris[i] = dataclasses.replace(bs_ris[i], gain=2 * bs_ris[i].gain)
        doubled = dataclasses.replace(paths, bs_ris_paths=tuple(bs_ris))
        for k in range(config.K):
            column = sum(paths.cascaded_gain(i, k, j) * channel.cascaded_steering(ris_ue, paths.bs_ris_paths[i], config)
                         for j, ris_ue in enumerate(paths.ris_ue_paths[k]))
            np.testing.assert_allclose(channel.cascaded_matrix(doubled, k, config) - before[k],
                                       np.outer(column, steering(i)), atol=1e-12)

        k, j = 1, 0
        ris_ue = [list(user) for user in paths.ris_ue_paths]
        ris_ue[k][j] = dataclasses.replace(ris_ue[k][j], gain=2 * ris_ue[k][j].gain)
        doubled = dataclasses.replace(paths, ris_ue_paths=tuple(tuple(user) for user in ris_ue))
        change = sum(
            paths.cascaded_gain(i, k, j) *
            np.outer(channel.cascaded_steering(paths.ris_ue_paths[k][j], bs_ris_path, config), steering(i))
            for i, bs_ris_path in enumerate(paths.bs_ris_paths)
        )
        np.testing.assert_allclose(channel.cascaded_matrix(doubled, k, config) - before[k], change, atol=1e-12)
        np.testing.assert_allclose(channel.cascaded_matrix(doubled, 0, config), before[0], atol=0)

    def test_effective_downlink(self):
        config = fixtures.SMALL
        generator = fixtures.rng(5)
        paths, channels = fixtures.realization(config, seed=5)
        G = channel.bs_ris_channel(paths, config)
        for c in channels:
            phi = np.exp(2j * np.pi * generator.random(config.N))
            h_r = channel.ris_ue_channel(paths, c.user, config)
            expected = np.conj(c.h_d) + (h_r * phi) @ G
            np.testing.assert_allclose(channel.effective_downlink_channel(c, phi), expected, atol=1e-10)

    def test_direct_channel(self):
        config = fixtures.SMALL.replace(direct_channel=False)
        paths = channel.sample_paths(config, fixtures.rng(0))
        c = channel.build_cascaded_channel(paths, 1, config)
        self.assertFalse(np.any(c.h_d))
        self.assertEqual((c.N, c.M, c.user), (config.N, config.M, 1))
        with_direct = channel.build_cascaded_channel(paths, 1, fixtures.SMALL)
        self.assertEqual(with_direct.h_d.shape, (config.M,))
        self.assertTrue(np.all(with_direct.h_d != 0))
        with self.assertRaises(IndexError):
            channel.build_cascaded_channel(paths, config.K, config)

    def test_check_phases(self):
        channel.check_phases(np.exp(1j * np.arange(4)))
        with self.assertRaises(InvalidPhaseConfiguration):
            channel.check_phases([1, 0.5, 1j])
        with self.assertRaises(ValueError):
            channel.check_phases([0])
