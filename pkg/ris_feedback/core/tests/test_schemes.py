"""
Feedback scheme Types and their registry
"""
import os
import subprocess
import sys

import numpy as np
from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase

from ris_feedback.core import feedback, schemes
from ris_feedback.core.config import SystemConfig
from ris_feedback.registry import get_scheme, register, schemes as scheme_types

from . import fixtures

built_codebooks = []


def recording_builder(quantized, column, config, codebook_seed=None):
    built_codebooks.append((quantized, column))
    return feedback.build_subspace_codebook(quantized, column, config, codebook_seed)


detected = schemes.ProposedFeedback.register(id='test.schemes.detected', label='Detected support',
                                             support_method='detect')
recorded = schemes.ProposedFeedback.register(id='test.schemes.recorded', codebook_builder=recording_builder)
unfinished = schemes.AbstractFeedbackScheme.register(id='test.schemes.unfinished', axes=('B',))


@register(id='test.schemes.decorated')
class Decorated(schemes.PerfectCsit):
    label = 'Decorated'


def mean_error(scheme, config, seeds=range(3)):
    errors = []
    for seed in seeds:
        paths, channels = fixtures.realization(config, seed=seed)
        csi = scheme.bs_side_csi(channels, paths, scheme.resolve_config(config, match_overhead=True))
        errors += [fixtures.relative_error(estimate.H, c.H) for estimate, c in zip(csi, channels)]
    return np.mean(errors)


class SchemeRegistryTests(SimpleTestCase):
    def test_builtin_schemes(self):
        for scheme_id in ('proposed', 'proposed_perfect_aod', 'conventional', 'perfect_csit'):
            self.assertEqual(scheme_types.get(scheme_id).id, scheme_id)
        self.assertIs(get_scheme('proposed'), schemes.Proposed)
        self.assertIs(get_scheme(schemes.Conventional), schemes.Conventional)
        self.assertEqual(schemes.PerfectCsitScheme.__name__, 'PerfectCsit')

    def test_unknown_scheme(self):
        with self.assertRaises(ImproperlyConfigured):
            get_scheme('no.such.scheme')

    def test_missing_id(self):
        with self.assertRaises(ImproperlyConfigured):
            schemes.AbstractFeedbackScheme.register(id='')

    def test_class_var_overrides(self):
        s = scheme_types.get('test.schemes.detected')
        self.assertEqual(s.get_label(), 'Detected support')
        self.assertEqual(s.support_method, 'detect')
        self.assertEqual(s.axes, schemes.ProposedFeedback.axes)
        self.assertEqual(scheme_types.get('test.schemes.recorded').get_label(), 'Proposed')
        self.assertEqual(unfinished.get_label(), 'test.schemes.unfinished')

    def test_decorator(self):
        self.assertIs(scheme_types.get('test.schemes.decorated'), Decorated)
        self.assertTrue(issubclass(Decorated, schemes.PerfectCsit))
        self.assertEqual(Decorated.get_label(), 'Decorated')

    def test_depends_on(self):
        self.assertTrue(schemes.Proposed.depends_on('G_t'))
        self.assertFalse(schemes.ProposedPerfectAodScheme.depends_on('G_t'))
        self.assertFalse(schemes.Conventional.depends_on('B0'))
        self.assertFalse(schemes.PerfectCsitScheme.depends_on('B'))
        self.assertTrue(unfinished.depends_on('B'))

    def test_unimplemented(self):
        with self.assertRaises(NotImplementedError):
            unfinished.bs_side_csi([], None, SystemConfig())

    def test_import_in_fresh_interpreter(self):
        """ Built-in registrations run while the scheme module is still initializing """
        root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
        script = ('from django.conf import settings; settings.configure(); '
                  'import ris_feedback.core.schemes; '
                  'from ris_feedback.registry import schemes; print(sorted(schemes))')
        result = subprocess.run([sys.executable, '-c', script], cwd=root, capture_output=True, text=True,
                                env=dict(os.environ, PYTHONPATH=root))
        self.assertEqual(result.returncode, 0, result.stderr)
        self.assertIn("'proposed_perfect_aod'", result.stdout)


class OverheadMatchingTests(SimpleTestCase):
    def test_matched_bits(self):
        self.assertEqual(schemes.overhead_matched_bits(SystemConfig()), 12)
        self.assertEqual(schemes.overhead_matched_bits(SystemConfig(B=1)), 3)
        self.assertEqual(schemes.overhead_matched_bits(SystemConfig(gain_bits=2)), 12)

    def test_conventional_overhead(self):
        report = schemes.conventional_overhead(SystemConfig(), 12)
        self.assertEqual((report.step2_bits, report.step3_bits), (0, 48))
        self.assertAlmostEqual(report.per_user_amortized_bits, 48.9)
        self.assertLessEqual(report.per_user_amortized_bits, feedback.overhead(SystemConfig()).per_user_amortized_bits)

    def test_resolve_config(self):
        config = SystemConfig()
        self.assertIs(schemes.Conventional.resolve_config(config), config)
        self.assertEqual(schemes.Conventional.resolve_config(config, match_overhead=True).B, 12)
        self.assertIs(schemes.Proposed.resolve_config(config, match_overhead=True), config)
        with self.assertRaises(ImproperlyConfigured):
            schemes.Conventional.resolve_config(config.replace(B=100), match_overhead=True)

    def test_scheme_overhead(self):
        config = SystemConfig()
        self.assertIsNone(schemes.PerfectCsitScheme.overhead(config))
        self.assertEqual(schemes.Proposed.overhead(config), feedback.overhead(config))
        self.assertEqual(schemes.Conventional.overhead(config.replace(B=12)).step3_bits, 48)


class BsSideCsiTests(SimpleTestCase):
    def test_perfect_csit(self):
        paths, channels = fixtures.realization()
        csi = schemes.PerfectCsitScheme.bs_side_csi(channels, paths, fixtures.SMALL)
        self.assertTrue(all(estimate is c for estimate, c in zip(csi, channels)))

    def test_estimates_keep_direct_channel(self):
        config = fixtures.SMALL.replace(G_t=512)
        paths, channels = fixtures.realization(config, seed=1)
        for scheme in (schemes.Proposed, schemes.ProposedPerfectAodScheme, schemes.Conventional, detected):
            csi = scheme.bs_side_csi(channels, paths, config)
            self.assertEqual(len(csi), config.K)
            for estimate, c in zip(csi, channels):
                self.assertEqual(estimate.H.shape, (config.N, config.M))
                self.assertIs(estimate.h_d, c.h_d)
                self.assertEqual(estimate.user, c.user)

    def test_proposed_beats_conventional(self):
        config = SystemConfig()
        self.assertLess(mean_error(schemes.Proposed, config), mean_error(schemes.Conventional, config))

    def test_perfect_aods_remove_grid_mismatch(self):
        coarse, fine = SystemConfig(G_t=32), SystemConfig(G_t=512)
        perfect = mean_error(schemes.ProposedPerfectAodScheme, coarse, seeds=(5, 6))
        self.assertAlmostEqual(perfect, mean_error(schemes.ProposedPerfectAodScheme, fine, seeds=(5, 6)), delta=1e-12)
        self.assertLess(perfect, mean_error(schemes.Proposed, coarse, seeds=(5, 6)))

    def test_injected_codebook_builder(self):
        config = fixtures.SMALL.replace(G_t=512)
        paths, channels = fixtures.realization(config, seed=2)
        del built_codebooks[:]
        recorded.bs_side_csi(channels, paths, config)
        self.assertEqual(len(built_codebooks), config.K * config.L1)
        self.assertEqual(sorted(column for _, column in built_codebooks), sorted(list(range(config.L1)) * config.K))
