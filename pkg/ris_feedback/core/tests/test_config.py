"""
SystemConfig, CeoParams and config file parsing
"""
import os
import tempfile

from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase

from ris_feedback.core import config


class SystemConfigTests(SimpleTestCase):
    def test_defaults(self):
        c = config.SystemConfig()
        self.assertEqual((c.M, c.N, c.K, c.L1, c.L2), (32, 64, 4, 4, 2))
        self.assertEqual((c.G_t, c.B0, c.coherence_ratio), (512, 7, 10))
        self.assertEqual(c.grid_index_bits, 9)
        self.assertAlmostEqual(c.gamma, 10 ** 0.5)
        self.assertEqual(c.appointed_users, 1)

    def test_invalid(self):
        for changes in (dict(M=0), dict(K=0), dict(G_t=2, L1=4), dict(N1=1, N2=1, L2=2),
                        dict(step1_user_fraction=0), dict(step1_user_fraction=1.5), dict(P=1),
                        dict(B=-1), dict(d_B_over_lambda=0), dict(coherence_ratio=0)):
            with self.assertRaises(ImproperlyConfigured, msg=str(changes)):
                config.SystemConfig(**changes)

    def test_replace_validates(self):
        c = config.SystemConfig().replace(B=13)
        self.assertEqual(c.B, 13)
        with self.assertRaises(ImproperlyConfigured):
            c.replace(L1=0)

    def test_appointed_users(self):
        self.assertEqual(config.SystemConfig(step1_user_fraction=0.5).appointed_users, 2)
        self.assertEqual(config.SystemConfig(step1_user_fraction=0.1).appointed_users, 1)
        self.assertEqual(config.SystemConfig(step1_user_fraction=1).appointed_users, 4)

    def test_ceo_params(self):
        self.assertEqual(config.CeoParams().elites, 40)
        for changes in (dict(S=5), dict(rho=0), dict(rho=1), dict(T=0), dict(smoothing=0)):
            with self.assertRaises(ImproperlyConfigured):
                config.CeoParams(**changes)


class ConfigFileTests(SimpleTestCase):
    def write(self, directory, text):
        path = os.path.join(directory, 'experiment.toml')
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_parse_text(self):
        values = config.parse_config_text(
            '# small system\n'
            'M = 16\n'
            'snr_db = 10.0   # high SNR\n'
            'direct_channel = false\n'
            'schemes = ["proposed", "perfect_csit"]\n'
            'label = "a # not a comment"\n'
        )
        self.assertEqual(values, dict(M=16, snr_db=10.0, direct_channel=False,
                                      schemes=['proposed', 'perfect_csit'], label='a # not a comment'))

    def test_parse_errors(self):
        with self.assertRaises(ImproperlyConfigured):
            config.parse_config_text('M = = 3\n')

    def test_load_config(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'M = 16\nsnr_db = 10\nB = 8\ntrials = 25\n')
            system, extra = config.load_config(path, extra_keys=('trials',))
        self.assertEqual((system.M, system.snr_db, system.B), (16, 10, 8))
        self.assertEqual(system.N, 64)
        self.assertEqual(extra, dict(trials=25))

    def test_load_config_base(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'G_t = 128\n')
            system, _ = config.load_config(path, base=config.SystemConfig(B=10, B0=6))
        self.assertEqual((system.G_t, system.B, system.B0), (128, 10, 6))

    def test_load_config_errors(self):
        for text in ('bogus = 1\n', 'M = "32"\n', 'M = true\n', 'direct_channel = 1\n', 'M = 0\n'):
            with tempfile.TemporaryDirectory() as directory:
                path = self.write(directory, text)
                with self.assertRaises(ImproperlyConfigured, msg=text):
                    config.load_config(path)

    def test_lists(self):
        self.assertEqual(config.parse_int_list('32, 128,512'), [32, 128, 512])
        self.assertEqual(config.parse_name_list('proposed, perfect_csit'), ['proposed', 'perfect_csit'])
        for text in ('a,b', '', '64;256', '-1'):
            with self.assertRaises(ImproperlyConfigured, msg=text):
                config.parse_int_list(text)

    def test_run_manifest(self):
        manifest = config.RunManifest(seed=3, trials=10, bits=(1, 4))
        self.assertEqual(manifest.out_dir, '.')
        with self.assertRaises(ImproperlyConfigured):
            config.RunManifest(seed=-1)
        with self.assertRaises(ImproperlyConfigured):
            config.RunManifest(trials=0)
