"""
    Rate versus per-user feedback overhead, codeword bits B swept.
"""
import logging
import os

from ris_feedback.cli import ExperimentCommand, format_table

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = 'Per-user rate against amortized per-user feedback overhead; writes fig4.csv'
    output_name = 'fig4.csv'
    report_reduction = True     # summarize the overhead each scheme needs to approach perfect CSIT

    def build_spec(self, manifest, system, ceo):
        from ris_feedback.core import harness
        return harness.fig4_spec(
            base=system, trials=manifest.trials, seed=self.seed(manifest, system),
            schemes=manifest.schemes or None, bits=manifest.bits or None,
            match_overhead=manifest.extras.get('match_overhead', True), ceo=ceo,
        )

    def run(self, manifest, system, ceo):
        from ris_feedback.core import harness
        spec = self.build_spec(manifest, system, ceo)
        table = harness.sweep(spec)
        path = os.path.join(manifest.out_dir, self.output_name)
        table.to_csv(path)
        logger.info('Wrote %d rows to %s', len(table), path)
        reduction = harness.overhead_reduction(table) \
            if self.report_reduction and table.for_scheme('perfect_csit') else None
        return format_table(table, reduction)
