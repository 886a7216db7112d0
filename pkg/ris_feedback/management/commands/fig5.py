"""
    Rate versus AoD grid resolution G_t, with the perfect-AoD reference.
"""
from ris_feedback.core.harness import FIG5_DEFAULTS

from .fig4 import Command as Fig4Command


class Command(Fig4Command):
    help = 'Per-user rate against AoD grid resolution G_t (B=10, B0=6 unless configured); writes fig5.csv'
    output_name = 'fig5.csv'
    base_overrides = FIG5_DEFAULTS
    report_reduction = False

    def build_spec(self, manifest, system, ceo):
        from ris_feedback.core import harness
        return harness.fig5_spec(
            base=system, trials=manifest.trials, seed=self.seed(manifest, system),
            schemes=manifest.schemes or None, grids=manifest.gt or None,
            match_overhead=manifest.extras.get('match_overhead', True), ceo=ceo,
        )
