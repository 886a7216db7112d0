"""
    Batch command-line front end.

    ``ris-sim <command> [options]`` runs the ris_feedback management commands (fig4, fig5, overhead, sweep)
    without a Django project: settings are configured on the fly unless DJANGO_SETTINGS_MODULE is set.
    Inside a project the same commands are available through ``manage.py``.
"""
import json
import logging
import os
import sys

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

import ris_feedback
from ris_feedback.exceptions import FeedbackError

logger = logging.getLogger(__name__)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {'format': '{levelname} {name}: {message}', 'style': '{'},
    },
    'handlers': {
        'console': {'class': 'logging.StreamHandler', 'formatter': 'simple'},   # stderr
    },
    'loggers': {
        'ris_feedback': {'handlers': ['console'], 'level': 'INFO', 'propagate': False},
    },
}

DEFAULT_SETTINGS = dict(
    INSTALLED_APPS=['ris_feedback'],
    LOGGING=LOGGING,
    USE_TZ=True,
)

# Config-file keys that are not SystemConfig fields
EXTRA_KEYS = ('trials', 'seed', 'schemes', 'gt', 'bits', 'match_overhead',
              'ceo_S', 'ceo_rho', 'ceo_T', 'ceo_smoothing')


def main(argv=None):
    """ console script entry point """
    argv = sys.argv if argv is None else argv
    if not os.environ.get('DJANGO_SETTINGS_MODULE') and not settings.configured:
        settings.configure(**DEFAULT_SETTINGS)
    from django.core.management import execute_from_command_line
    execute_from_command_line(argv)


def list_option(text, parser):
    """ Parse an optional comma-separated flag value, passing lists from config files through """
    if text is None or isinstance(text, (list, tuple)):
        return tuple(text) if text is not None else ()
    return tuple(parser(text))


class ExperimentCommand(BaseCommand):
    """
    Shared option handling for the experiment commands:
        resolve a RunManifest from flags and the config file, write manifest.json, translate errors to exit codes.
    Sub-classes implement run(manifest, config, ceo) and return a summary string.
    """
    # SystemConfig overrides applied before the config file is read
    base_overrides: dict = {}

    # Print the summary even with --quiet (when the summary is the output)
    always_summarize: bool = False

    def add_arguments(self, parser):
        parser.add_argument('--config', help='TOML file of SystemConfig fields and experiment keys')
        parser.add_argument('--out', default='.', help='output directory (created if missing)')
        parser.add_argument('--seed', type=int, help='run seed, defaults to rng_seed of the config')
        parser.add_argument('--trials', type=int, help='Monte-Carlo trials per point')
        parser.add_argument('--schemes', help='comma-separated scheme ids')
        parser.add_argument('--gt', help='comma-separated AoD grid resolutions')
        parser.add_argument('--bits', help='comma-separated codeword-index bit counts')
        parser.add_argument('--quiet', action='store_true', help='only log warnings and errors')

    def handle(self, *args, **options):
        from ris_feedback.core import config as core_config

        self.configure_logging(options)
        try:
            manifest, system, ceo = self.resolve(options, core_config)
            self.prepare_out_dir(manifest.out_dir)
            self.write_manifest(manifest, system, ceo)
        except (ImproperlyConfigured, ValueError, OSError) as e:
            raise CommandError(str(e), returncode=1)

        try:
            summary = self.run(manifest, system, ceo)
        except ImproperlyConfigured as e:
            raise CommandError(str(e), returncode=1)
        except (FeedbackError, ValueError, OSError) as e:
            raise CommandError('{cls}: {e}'.format(cls=type(e).__name__, e=e), returncode=2)
        if summary and (self.always_summarize or not manifest.quiet):
            self.stdout.write(summary)

    def configure_logging(self, options):
        verbosity = options.get('verbosity', 1)
        level = logging.WARNING if options.get('quiet') or verbosity == 0 else \
            logging.DEBUG if verbosity > 1 else logging.INFO
        logging.getLogger('ris_feedback').setLevel(level)

    def resolve(self, options, core_config):
        """ Return (RunManifest, SystemConfig, CeoParams); flags win over config file values """
        base = core_config.SystemConfig(**self.base_overrides)
        extras = {}
        if options.get('config'):
            try:
                system, extras = core_config.load_config(options['config'], base=base, extra_keys=EXTRA_KEYS)
            except OSError as e:
                raise ImproperlyConfigured('Cannot read config file: {e}'.format(e=e))
        else:
            system = base

        def pick(name):
            return options.get(name) if options.get(name) is not None else extras.get(name)

        manifest = core_config.RunManifest(
            config_path=options.get('config'),
            out_dir=options.get('out') or '.',
            seed=pick('seed'),
            trials=pick('trials'),
            schemes=list_option(pick('schemes'), core_config.parse_name_list),
            gt=list_option(pick('gt'), core_config.parse_int_list),
            bits=list_option(pick('bits'), core_config.parse_int_list),
            quiet=bool(options.get('quiet')),
            extras={k: v for k, v in extras.items() if k not in ('seed', 'trials', 'schemes', 'gt', 'bits')},
        )
        ceo_options = {name[len('ceo_'):]: extras[name] for name in EXTRA_KEYS
                       if name.startswith('ceo_') and name in extras}
        ceo = core_config.CeoParams(**ceo_options)
        return manifest, system, ceo

    def prepare_out_dir(self, out_dir):
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as e:
            raise ImproperlyConfigured('Cannot create output directory {d}: {e}'.format(d=out_dir, e=e))
        if not os.access(out_dir, os.W_OK):
            raise ImproperlyConfigured('Output directory {d} is not writable.'.format(d=out_dir))

    def write_manifest(self, manifest, system, ceo):
        """ manifest.json: the resolved inputs of this run """
        audit = dict(
            command=self.command_name(),
            version=ris_feedback.__version__,
            config_path=manifest.config_path,
            seed=self.seed(manifest, system),
            trials=manifest.trials,
            schemes=list(manifest.schemes),
            gt=list(manifest.gt),
            bits=list(manifest.bits),
            extras=manifest.extras,
            system=system.as_dict(),
            ceo=dict(S=ceo.S, rho=ceo.rho, T=ceo.T, smoothing=ceo.smoothing),
        )
        with open(os.path.join(manifest.out_dir, 'manifest.json'), 'w') as f:
            json.dump(audit, f, indent=2, sort_keys=True)
            f.write('\n')

    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    @staticmethod
    def seed(manifest, system):
        return manifest.seed if manifest.seed is not None else system.rng_seed

    def run(self, manifest, system, ceo):
        raise NotImplementedError


def format_table(table, reduction=None):
    """ Human-readable summary of a ResultTable """
    lines = ['{:<22} {:>10} {:>14} {:>12} {:>10}'.format('scheme', 'axis', 'bits/user', 'rate', 'stderr')]
    for row in table:
        axis = '' if row.axis_value is None else '{a}={v}'.format(a=row.axis, v=row.axis_value)
        bits = '' if row.per_user_bits is None else '{b:.1f}'.format(b=row.per_user_bits)
        lines.append('{:<22} {:>10} {:>14} {:>12.4f} {:>10.4f}'.format(row.scheme, axis, bits, row.mean_rate,
                                                                       row.stderr))
    if reduction is not None:
        for scheme, bits in sorted(reduction.required_bits.items()):
            reached = 'not reached' if bits is None else '{b:.1f} bits/user'.format(b=bits)
            lines.append('{s} reaches {f:.0%} of perfect CSIT at: {r}'.format(
                s=scheme, f=reduction.target_fraction, r=reached))
        if reduction.saving is not None:
            lines.append('Overhead saving of proposed over conventional: {s:.0%}'.format(s=reduction.saving))
    return '\n'.join(lines)
