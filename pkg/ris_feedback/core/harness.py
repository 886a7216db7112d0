"""
    Monte-Carlo experiment harness: rate versus per-user feedback overhead and versus AoD grid resolution.

    Every trial draws one channel realization from a seed derived from (run seed, trial index), so all schemes
    and axis values see the same realizations, and results do not depend on the order trials are executed in.
"""
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np
from django.core.exceptions import ImproperlyConfigured

from ris_feedback import settings
from ris_feedback.exceptions import DegenerateChannel, IllConditionedSupport
from ris_feedback.registry import get_scheme

from . import schemes as builtin_schemes  # noqa: F401 - registers the built-in schemes
from .beamforming import ceo_optimize, downlink_rows, per_user_rate, zf_precoder
from .channel import build_channels, sample_paths
from .config import CeoParams, SystemConfig

logger = logging.getLogger(__name__)

# Sweep axis aliases -> SystemConfig field
AXES = {
    'B': 'B',
    'codeword_bits': 'B',
    'G_t': 'G_t',
    'grid_resolution': 'G_t',
    'B0': 'B0',
}

FIG4_BITS = (1, 4, 7, 10, 13)
FIG4_SCHEMES = ('proposed', 'conventional', 'perfect_csit')
FIG5_GRIDS = (32, 128, 512)
FIG5_SCHEMES = ('proposed', 'proposed_perfect_aod', 'conventional', 'perfect_csit')
FIG5_DEFAULTS = dict(B=10, B0=6)

CSV_HEADER = ('scheme', 'axis', 'axis_value', 'per_user_bits', 'mean_rate', 'stderr', 'trials', 'seed')


#
# Single operating point
#

def trial_seed(seed, trial, attempt=0):
    """ Seed of one trial; resampled attempts get their own stream """
    spawn_key = (trial,) if attempt == 0 else (trial, attempt)
    return np.random.SeedSequence(seed, spawn_key=spawn_key)


def run_trial(config: SystemConfig, scheme, seed, trial, ceo: CeoParams = None, max_resamples=None):
    """ Per-user rate of one channel realization, resampled when the realization is degenerate """
    scheme = get_scheme(scheme)
    max_resamples = settings.RIS_FEEDBACK_MAX_RESAMPLES if max_resamples is None else max_resamples
    for attempt in range(max_resamples + 1):
        channel_seed, ceo_seed = trial_seed(seed, trial, attempt).spawn(2)
        rng = np.random.default_rng(channel_seed)
        try:
            paths = sample_paths(config, rng)
            channels = build_channels(paths, config, rng)
            csi = scheme.bs_side_csi(channels, paths, config)
            phase_config = ceo_optimize(csi, config, ceo, rng=np.random.default_rng(ceo_seed))
            precoders = zf_precoder(downlink_rows(csi, phase_config.phases))
            return per_user_rate(channels, phase_config, precoders, config.gamma).per_user_rate
        except (DegenerateChannel, IllConditionedSupport) as e:
            if attempt == max_resamples:
                raise
            logger.debug('Resampling trial %d of %s (attempt %d): %s', trial, scheme.id, attempt + 1, e)


class PointResult(NamedTuple):
    mean_rate: float
    stderr: float


def summarize(rates):
    """ mean and standard error of per-trial rates """
    rates = np.asarray(rates, dtype=float)
    stderr = float(np.std(rates, ddof=1) / math.sqrt(rates.size)) if rates.size > 1 else 0.0
    return PointResult(mean_rate=float(np.mean(rates)), stderr=stderr)


def run_point(config: SystemConfig, scheme, trials, seed, ceo: CeoParams = None, threads=None) -> PointResult:
    """
    Mean per-user rate and its standard error over the given number of trials.
    Trials run on a thread pool of at most RIS_FEEDBACK_THREADS workers; rates are gathered in trial order.
    """
    if trials < 1:
        raise ImproperlyConfigured('At least one trial is required.')
    scheme = get_scheme(scheme)
    threads = max(1, min(threads or settings.worker_threads(), trials))
    if threads == 1:
        rates = [run_trial(config, scheme, seed, t, ceo) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rates = list(pool.map(lambda t: run_trial(config, scheme, seed, t, ceo), range(trials)))
    return summarize(rates)


#
# Sweeps
#

@dataclass(frozen=True)
class SweepSpec:
    """ Schemes x values of one SystemConfig axis """
    axis: str
    values: Tuple[int, ...]
    trials: int
    base: SystemConfig = field(default_factory=SystemConfig)
    schemes: Tuple[str, ...] = FIG4_SCHEMES
    seed: int = 0
    match_overhead: bool = False    # run conventional rows at the proposed scheme's overhead
    ceo: CeoParams = field(default_factory=CeoParams)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ImproperlyConfigured('Unknown sweep axis {a}; choose from {c}.'.format(a=self.axis, c=', '.join(AXES)))
        if self.trials < 1:
            raise ImproperlyConfigured('Sweeps need at least one trial.')
        if any(int(v) != v or v < 1 for v in self.values):
            raise ImproperlyConfigured('Sweep axis values must be positive integers: {v}'.format(v=self.values))
        if self.seed < 0:
            raise ImproperlyConfigured('Seed must be >= 0.')
        for scheme in self.schemes:
            get_scheme(scheme)

    @property
    def field_name(self):
        return AXES[self.axis]

    def points(self, scheme):
        """ (axis value, config) pairs the scheme runs at; a single (None, base) when it ignores the axis """
        scheme = get_scheme(scheme)
        if not scheme.depends_on(self.field_name):
            return [(None, self.base)]
        return [(value, self.base.replace(**{self.field_name: value})) for value in self.values]


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    axis: str
    axis_value: Optional[int]
    per_user_bits: Optional[float]
    mean_rate: float
    stderr: float
    trials: int
    seed: int

    def sort_key(self):
        return self.scheme, self.axis_value is not None, self.axis_value or 0

    def as_csv(self):
        def number(x):
            return '' if x is None else '{x:.6g}'.format(x=x)

        return [self.scheme, self.axis, '' if self.axis_value is None else str(self.axis_value),
                number(self.per_user_bits), number(self.mean_rate), number(self.stderr),
                str(self.trials), str(self.seed)]

    @classmethod
    def from_csv(cls, record):
        def optional(text, convert):
            return convert(text) if text != '' else None

        return cls(
            scheme=record['scheme'], axis=record['axis'],
            axis_value=optional(record['axis_value'], int),
            per_user_bits=optional(record['per_user_bits'], float),
            mean_rate=float(record['mean_rate']), stderr=float(record['stderr']),
            trials=int(record['trials']), seed=int(record['seed']),
        )


@dataclass(frozen=True)
class ResultTable:
    rows: Tuple[ResultRow, ...] = ()

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def sorted(self):
        """ rows ordered by (scheme, axis value), axis-independent rows first """
        return ResultTable(tuple(sorted(self.rows, key=ResultRow.sort_key)))

    def for_scheme(self, scheme_id):
        return [row for row in self.rows if row.scheme == scheme_id]

    def to_csv(self, path_or_file):
        if hasattr(path_or_file, 'write'):
            return self._write_csv(path_or_file)
        with open(path_or_file, 'w', newline='') as f:
            return self._write_csv(f)

    def _write_csv(self, f):
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        writer.writerows(row.as_csv() for row in self.rows)

    @classmethod
    def from_csv(cls, path_or_file):
        if hasattr(path_or_file, 'read'):
            return cls(tuple(ResultRow.from_csv(r) for r in csv.DictReader(path_or_file)))
        with open(path_or_file, newline='') as f:
            return cls.from_csv(f)


def sweep(spec: SweepSpec, threads=None) -> ResultTable:
    """ Run every scheme at every axis value it depends on; rows sorted by (scheme, axis value) """
    if spec.trials < settings.RIS_FEEDBACK_LOW_TRIALS_WARNING:
        logger.warning('Only %d trials per point: expect high variance in the rates.', spec.trials)
    rows = []
    for scheme_id in spec.schemes:
        scheme = get_scheme(scheme_id)
        for value, config in spec.points(scheme):
            config = scheme.resolve_config(config, spec.match_overhead)
            report = scheme.overhead(config)
            result = run_point(config, scheme, spec.trials, spec.seed, spec.ceo, threads)
            bits = report.per_user_amortized_bits if report is not None else None
            logger.info('%s %s=%s: rate %.4f +/- %.4f bits/s/Hz at %s bits per user', scheme.id, spec.axis,
                        value, result.mean_rate, result.stderr, 'n/a' if bits is None else '{b:.1f}'.format(b=bits))
            rows.append(ResultRow(
                scheme=scheme.id, axis=spec.axis, axis_value=value, per_user_bits=bits,
                mean_rate=result.mean_rate, stderr=result.stderr, trials=spec.trials, seed=spec.seed,
            ))
    return ResultTable(tuple(rows)).sorted()


def fig4_spec(base: SystemConfig = None, trials=None, seed=0, schemes=None, bits=None, **kwargs) -> SweepSpec:
    """ Rate versus per-user overhead: B swept, conventional rows at matched overhead """
    return SweepSpec(
        axis='B', values=tuple(bits or FIG4_BITS), trials=trials or settings.RIS_FEEDBACK_TRIALS,
        base=base or SystemConfig(), schemes=tuple(FIG4_SCHEMES if schemes is None else schemes), seed=seed,
        match_overhead=kwargs.pop('match_overhead', True), **kwargs
    )


def fig5_spec(base: SystemConfig = None, trials=None, seed=0, schemes=None, grids=None, **kwargs) -> SweepSpec:
    """ Rate versus AoD grid resolution at B=10, B0=6, with the perfect-AoD reference """
    return SweepSpec(
        axis='G_t', values=tuple(grids or FIG5_GRIDS), trials=trials or settings.RIS_FEEDBACK_TRIALS,
        base=base or SystemConfig(**FIG5_DEFAULTS), schemes=tuple(FIG5_SCHEMES if schemes is None else schemes),
        seed=seed, match_overhead=kwargs.pop('match_overhead', True), **kwargs
    )


#
# Overhead comparison
#

@dataclass(frozen=True)
class OverheadReduction:
    """ Overhead each scheme needs to reach target_fraction of the perfect-CSIT rate """
    target_fraction: float
    perfect_rate: float
    required_bits: dict
    saving: Optional[float]     # 1 - proposed / conventional required overhead

    def as_dict(self):
        return dict(target_fraction=self.target_fraction, perfect_rate=self.perfect_rate,
                    required_bits=dict(self.required_bits), saving=self.saving)


def overhead_reduction(table: ResultTable, target_fraction=0.95, proposed='proposed', conventional='conventional'):
    """
    From a table holding a perfect_csit row, the smallest tabulated per-user overhead at which each feedback
    scheme reaches target_fraction of the perfect-CSIT rate (None if it never does), and the proposed scheme's
    relative saving over the conventional one.
    """
    perfect = table.for_scheme('perfect_csit')
    if not perfect:
        raise ValueError('Overhead reduction needs a perfect_csit row.')
    target = target_fraction * perfect[0].mean_rate
    required = {}
    for row in sorted(table, key=lambda r: (r.scheme, r.per_user_bits or 0)):
        if row.per_user_bits is None:
            continue
        required.setdefault(row.scheme, None)
        if required[row.scheme] is None and row.mean_rate >= target:
            required[row.scheme] = row.per_user_bits
    saving = None
    if required.get(proposed) is not None and required.get(conventional):
        saving = 1 - required[proposed] / required[conventional]
    return OverheadReduction(target_fraction=target_fraction, perfect_rate=perfect[0].mean_rate,
                             required_bits=required, saving=saving)
