"""
    Simulation parameters and the TOML config file format that mirrors them.

    Config files are flat TOML, one SystemConfig field (or experiment key) per line:

        M = 32
        snr_db = 5.0
        direct_channel = false
        schemes = ["proposed", "perfect_csit"]
"""
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import regex
import toml
from django.core.exceptions import ImproperlyConfigured

from .utils import index_bits


@dataclass(frozen=True)
class SystemConfig:
    """ All dimension / bit / path / grid parameters of one simulation point. Defaults give the reference scenario. """
    M: int = 32                     # BS antennas (ULA)
    N1: int = 8                     # RIS horizontal elements
    N2: int = 8                     # RIS vertical elements
    K: int = 4                      # single-antenna users
    L1: int = 4                     # BS-RIS paths
    L2: int = 2                     # RIS-UE paths per user
    d_B_over_lambda: float = 0.5
    d_R_over_lambda: float = 0.5
    snr_db: float = 5.0
    G_t: int = 512                  # AoD grid resolution
    B0: int = 7                     # bits per quantized cascaded-frequency component
    B: int = 10                     # codeword-index bits
    coherence_ratio: int = 10       # angle coherence time / channel coherence time
    step1_user_fraction: float = 0.25
    rng_seed: int = 0
    P: int = 4                      # RIS phase levels
    direct_channel: bool = True     # include the genie-known direct BS-UE channel
    on_grid: bool = False           # snap sampled AoDs onto the G_t grid
    gain_bits: int = 0              # Bg bits per column norm, 0 for genie norms
    gain_db_min: float = -40.0
    gain_db_max: float = 10.0
    codebook_seed: int = 0

    def __post_init__(self):
        self.validate()

    @property
    def N(self):
        return self.N1 * self.N2

    @property
    def gamma(self):
        """ linear transmit SNR (unit noise variance) """
        return 10 ** (self.snr_db / 10)

    @property
    def grid_index_bits(self):
        return index_bits(self.G_t)

    def validate(self):
        """ Raise ImproperlyConfigured if any parameter violates the model's invariants """
        counts = dict(M=self.M, N1=self.N1, N2=self.N2, K=self.K, L1=self.L1, L2=self.L2, G_t=self.G_t,
                      B0=self.B0, coherence_ratio=self.coherence_ratio)
        for name, value in counts.items():
            if int(value) != value or value < 1:
                raise ImproperlyConfigured('{name} must be an integer >= 1, got {v!r}.'.format(name=name, v=value))
        for name in ('B', 'gain_bits', 'rng_seed', 'codebook_seed'):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ImproperlyConfigured('{name} must be an integer >= 0, got {v!r}.'.format(name=name, v=value))
        if self.L1 > self.G_t:
            raise ImproperlyConfigured('L1={l} paths cannot fit on a grid of G_t={g}.'.format(l=self.L1, g=self.G_t))
        if self.L2 > self.N:
            raise ImproperlyConfigured('L2={l} exceeds the N={n} RIS elements.'.format(l=self.L2, n=self.N))
        if not 0 < self.step1_user_fraction <= 1:
            raise ImproperlyConfigured('step1_user_fraction must lie in (0, 1].')
        if self.P < 2:
            raise ImproperlyConfigured('At least 2 RIS phase levels are required.')
        if self.d_B_over_lambda <= 0 or self.d_R_over_lambda <= 0:
            raise ImproperlyConfigured('Element spacings must be positive.')
        if self.gain_bits and not self.gain_db_min < self.gain_db_max:
            raise ImproperlyConfigured('gain_db_min must be below gain_db_max.')
        return True

    def replace(self, **changes):
        """ Return a validated copy with the given fields changed """
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)

    @property
    def appointed_users(self):
        """ Number of users that repeat step 1 (at least the one appointed user) """
        return max(1, math.ceil(self.step1_user_fraction * self.K - 1e-9))


@dataclass(frozen=True)
class CeoParams:
    """ Cross-entropy optimizer settings for the RIS phases """
    S: int = 200            # population per iteration
    rho: float = 0.2        # elite fraction
    T: int = 30             # iterations
    smoothing: float = 0.7  # weight of the new elite frequencies
    seed: int = 0

    def __post_init__(self):
        if self.S < 10:
            raise ImproperlyConfigured('CEO population S must be at least 10.')
        if not 0 < self.rho < 1:
            raise ImproperlyConfigured('CEO elite fraction must lie in (0, 1).')
        if self.T < 1:
            raise ImproperlyConfigured('CEO needs at least one iteration.')
        if not 0 < self.smoothing <= 1:
            raise ImproperlyConfigured('CEO smoothing must lie in (0, 1].')

    @property
    def elites(self):
        return math.ceil(self.rho * self.S)


#
# Config file parsing
#

int_pattern = regex.compile(r'^[+-]?\d+$')
list_item_separator = regex.compile(r'\s*,\s*')


def parse_config_text(text):
    """ Return a dict of name -> value for the given TOML config file contents """
    try:
        return toml.loads(text)
    except toml.TomlDecodeError as e:
        raise ImproperlyConfigured('Invalid config file: {e}'.format(e=e))


def parse_int_list(text):
    """ Parse a comma-separated list of non-negative integers, e.g. '32,128,512' """
    items = [item for item in list_item_separator.split(text.strip()) if item]
    if not items or not all(int_pattern.match(item) for item in items):
        raise ImproperlyConfigured('Expected a comma-separated list of integers, got {t!r}.'.format(t=text))
    values = [int(item) for item in items]
    if any(v < 0 for v in values):
        raise ImproperlyConfigured('List values must not be negative: {t!r}.'.format(t=text))
    return values


def parse_name_list(text):
    """ Parse a comma-separated list of identifiers, e.g. 'proposed,perfect_csit' """
    return [item for item in list_item_separator.split(text.strip()) if item]


config_fields = {f.name for f in dataclasses.fields(SystemConfig)}
field_types = {f.name: f.type for f in dataclasses.fields(SystemConfig)}


def check_types(values):
    """ Raise ImproperlyConfigured if a SystemConfig value has the wrong type (ints are accepted for floats) """
    for name, value in values.items():
        expected = (int, float) if field_types[name] is float else field_types[name]
        if not isinstance(value, expected) or (isinstance(value, bool) and field_types[name] is not bool):
            raise ImproperlyConfigured('{name} must be of type {t}, got {v!r}.'.format(
                name=name, t=field_types[name].__name__, v=value))
    return values


def split_config(values, extra_keys=()):
    """
    Split parsed config values into SystemConfig kwargs and the extra (experiment) keys.
    Raise ImproperlyConfigured for keys that are neither.
    """
    unknown = set(values) - config_fields - set(extra_keys)
    if unknown:
        raise ImproperlyConfigured('Unknown config keys: {k}'.format(k=', '.join(sorted(unknown))))
    system = {k: v for k, v in values.items() if k in config_fields}
    extra = {k: v for k, v in values.items() if k not in config_fields}
    return system, extra


def load_config(path, base: Optional[SystemConfig] = None, extra_keys: Tuple[str, ...] = ()):
    """ Read a config file and return (SystemConfig, dict of extra keys) """
    with open(path) as f:
        values = parse_config_text(f.read())
    system, extra = split_config(values, extra_keys)
    base = base or SystemConfig()
    return base.replace(**check_types(system)), extra


@dataclass(frozen=True)
class RunManifest:
    """ Resolved inputs of one command-line run """
    config_path: Optional[str] = None
    out_dir: str = '.'
    seed: Optional[int] = None
    trials: Optional[int] = None
    schemes: Tuple[str, ...] = ()
    gt: Tuple[int, ...] = ()
    bits: Tuple[int, ...] = ()
    quiet: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seed is not None and self.seed < 0:
            raise ImproperlyConfigured('Seed must be >= 0.')
        if self.trials is not None and self.trials < 1:
            raise ImproperlyConfigured('Trials must be >= 1.')
