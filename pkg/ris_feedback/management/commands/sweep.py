"""
    Generic sweep of one SystemConfig axis over any registered schemes.
"""
import os

from ris_feedback.cli import ExperimentCommand, format_table


class Command(ExperimentCommand):
    help = 'Sweep one axis (B, B0 or G_t) for the given schemes; writes sweep.csv'

    def add_arguments(self, parser):
        from ris_feedback.core.harness import AXES
        super().add_arguments(parser)
        parser.add_argument('--axis', default='B', choices=sorted(AXES), help='SystemConfig field to sweep')
        parser.add_argument('--values', help='comma-separated axis values (default: --bits or --gt)')
        parser.add_argument('--match-overhead', action='store_true',
                            help='run conventional rows at the overhead of the proposed scheme')

    def handle(self, *args, **options):
        self.axis = options['axis']
        self.values = options.get('values')
        self.match_overhead = options.get('match_overhead', False)
        super().handle(*args, **options)

    def axis_values(self, manifest):
        from django.core.exceptions import ImproperlyConfigured
        from ris_feedback.core.config import parse_int_list
        from ris_feedback.core.harness import AXES

        if self.values:
            return tuple(parse_int_list(self.values))
        field = AXES[self.axis]
        values = manifest.bits if field == 'B' else manifest.gt if field == 'G_t' else ()
        if not values:
            raise ImproperlyConfigured('No values given for sweep axis {a}.'.format(a=self.axis))
        return values

    def run(self, manifest, system, ceo):
        from ris_feedback import settings
        from ris_feedback.core import harness

        spec = harness.SweepSpec(
            axis=self.axis, values=self.axis_values(manifest),
            trials=manifest.trials or settings.RIS_FEEDBACK_TRIALS, base=system,
            schemes=manifest.schemes or harness.FIG4_SCHEMES, seed=self.seed(manifest, system),
            match_overhead=self.match_overhead or manifest.extras.get('match_overhead', False), ceo=ceo,
        )
        table = harness.sweep(spec)
        table.to_csv(os.path.join(manifest.out_dir, 'sweep.csv'))
        return format_table(table)
