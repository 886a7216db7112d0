"""
End-to-end use of the public proxy modules: one realization through feedback, the wire and beamforming
"""
import numpy as np
from django.test import SimpleTestCase

from ris_feedback import channels, experiments, feedback
from ris_feedback.registry import schemes


class FeedbackRoundTripTests(SimpleTestCase):
    config = channels.SystemConfig(M=8, N1=4, N2=2, K=2, L1=2, L2=2, G_t=256, B0=8, B=8)
    ceo = channels.CeoParams(S=20, T=3)

    def realization(self, seed=0):
        rng = np.random.default_rng(seed)
        paths = channels.sample_paths(self.config, rng)
        return paths, channels.build_channels(paths, self.config, rng)

    def test_feedback_over_the_wire(self):
        paths, users = self.realization()
        dictionary = channels.build_dictionary(self.config.M, self.config.G_t, L1=self.config.L1)
        sent = [feedback.encode_feedback(c, paths, c.user, self.config, c.user == 0, dictionary=dictionary)
                for c in users]
        received = [feedback.parse_payload(feedback.serialize_payload(p, self.config), self.config) for p in sent]
        self.assertEqual(received, sent)

        norms = [channels.extract_hybrid(c, received[0].step1, dictionary).column_norms for c in users]
        estimates = feedback.decode_feedback(received, self.config, true_column_norms=norms, dictionary=dictionary)
        self.assertEqual([H.shape for H in estimates], [(self.config.N, self.config.M)] * self.config.K)

        csi = [channels.CascadedChannel(H=H, h_d=c.h_d, source_paths=None, user=c.user)
               for H, c in zip(estimates, users)]
        phase_config = experiments.ceo_optimize(csi, self.config, self.ceo, np.random.default_rng(1))
        rows = np.array([channels.effective_downlink_channel(c, phase_config.phases) for c in csi])
        report = experiments.per_user_rate(users, phase_config, experiments.zf_precoder(rows), self.config.gamma)
        self.assertGreater(report.per_user_rate, 0)

    def test_registered_schemes(self):
        self.assertTrue(issubclass(schemes.get('proposed'), feedback.ProposedFeedback))
        self.assertTrue(issubclass(schemes.get('conventional'), feedback.ConventionalFeedback))
        self.assertTrue(issubclass(schemes.get('perfect_csit'), feedback.PerfectCsit))
        self.assertEqual(feedback.overhead_matched_bits(self.config), schemes.get('conventional').resolve_config(
            self.config, match_overhead=True).B)

    def test_operating_point(self):
        result = experiments.run_point(self.config, 'proposed', trials=2, seed=0, ceo=self.ceo)
        spec = experiments.SweepSpec(axis='B', values=(self.config.B,), trials=2, base=self.config,
                                     schemes=('proposed',), ceo=self.ceo)
        table = experiments.sweep(spec)
        self.assertAlmostEqual(table.for_scheme('proposed')[0].mean_rate, result.mean_rate, delta=1e-12)
