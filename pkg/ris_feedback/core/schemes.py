"""
    Feedback scheme Types: how the BS comes by the CSI it beamforms on.

    A scheme Type is a class, never instantiated, registered by id in ris_feedback.registry.schemes.
    Define and register new schemes with::

        MyScheme = ProposedFeedback.register('myapp.scheme', label='My codebook', codebook_builder=my_builder)
"""
import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from django.core.exceptions import ImproperlyConfigured

from . import angular, feedback, utils
from .channel import CascadedChannel, PathSet
from .config import SystemConfig

logger = logging.getLogger(__name__)

# Conventional codebooks hold 2**bits x N complex codewords; beyond this they no longer fit in memory.
MAX_CONVENTIONAL_BITS = 20


def with_estimates(channels: Sequence[CascadedChannel], estimates):
    """ BS-side copies of the true channels carrying the estimated cascaded matrices; h_d is genie-known """
    return [CascadedChannel(H=H, h_d=c.h_d, source_paths=c.source_paths, user=c.user)
            for c, H in zip(channels, estimates)]


class AbstractFeedbackScheme:
    """
    Defines the semantics of one way of delivering CSI to the BS
        - how it is labelled, which sweep axes it depends on, what it costs, and the CSI the BS ends up with
        - default attribute values can be overridden by subclasses or passed to the .register() factory
    """
    # id must be unique per type class, but human-legible, e.g. 'proposed' or 'myapp.scheme'
    id: str = 'scheme.abstract'

    # Label used in summaries and plot legends
    label: str = ''

    # SystemConfig fields the scheme's result depends on.  Sweeps over any other field run the scheme once.
    axes: Tuple[str, ...] = ()

    # Registration for scheme Types (sub-classes)

    @classmethod
    def register(cls, id, **kwargs):
        """
        Create, register, and return a new subclass of cls with overrides for given kwargs attributes
            MyScheme = AbstractFeedbackScheme.register('my_scheme', label='Mine', ...)
        """
        from ris_feedback import registry
        class_name = utils.id_to_camel(id)
        kwargs['id'] = id
        scheme_type = type(class_name, (cls,), kwargs)
        registry.schemes.register(scheme_type)
        return scheme_type

    @classmethod
    def validate(cls):
        """ Run any class validation that must pass before class can be registered.  Invoked by registry. """
        if not cls.id or cls.id == AbstractFeedbackScheme.id:
            raise ImproperlyConfigured('Feedback scheme {cls} must define a unique id.'.format(cls=cls.__name__))
        return True

    # Scheme Type behaviours

    @classmethod
    def get_label(cls):
        return cls.label or cls.id

    @classmethod
    def depends_on(cls, axis):
        return axis in cls.axes

    @classmethod
    def resolve_config(cls, config: SystemConfig, match_overhead=False) -> SystemConfig:
        """ The config this scheme actually runs with at the given operating point """
        return config

    @classmethod
    def overhead(cls, config: SystemConfig) -> Optional[feedback.OverheadReport]:
        """ Feedback cost at config, None when nothing is fed back """
        return None

    @classmethod
    def bs_side_csi(cls, channels: Sequence[CascadedChannel], paths: PathSet, config: SystemConfig):
        """ Return the CascadedChannel the BS believes each user has """
        raise NotImplementedError('Feedback scheme {id} does not define bs_side_csi.'.format(id=cls.id))


class PerfectCsit(AbstractFeedbackScheme):
    """ Upper bound: the BS beamforms on the true channels """
    label = 'Perfect CSIT'

    @classmethod
    def bs_side_csi(cls, channels, paths, config):
        return list(channels)


class ProposedFeedback(AbstractFeedbackScheme):
    """ Three-step feedback with angle-adaptive subspace codebooks on the nearest-grid column support """
    label = 'Proposed'
    axes = ('B', 'B0', 'G_t', 'gain_bits')
    support_method: str = 'nearest_grid'                            # or 'detect'
    codebook_builder: Callable = feedback.build_subspace_codebook   # injectable codebook construction

    @classmethod
    def overhead(cls, config):
        return feedback.overhead(config)

    @classmethod
    def dictionary(cls, paths: PathSet, config: SystemConfig):
        return angular.dictionary_for(config)

    @classmethod
    def encode(cls, channels, paths, config, dictionary):
        """ UE side: one EncodedUser per user """
        appointed = feedback.appointed_flags(config)
        return [
            feedback.encode_user(c, paths, c.user, config, appointed[c.user], dictionary=dictionary,
                                 support_method=cls.support_method)
            for c in channels
        ]

    @classmethod
    def bs_side_csi(cls, channels, paths, config):
        dictionary = cls.dictionary(paths, config)
        encoded = cls.encode(channels, paths, config, dictionary)
        estimates = feedback.decode_feedback(
            [e.payload for e in encoded], config,
            true_column_norms=[e.gains for e in encoded],
            dictionary=dictionary,
            codebook_builder=cls.codebook_builder,
        )
        return with_estimates(channels, estimates)


class ProposedPerfectAod(ProposedFeedback):
    """ Proposed feedback with the exact AoDs as dictionary: no grid mismatch, hence independent of G_t """
    label = 'Proposed (perfect AoDs)'
    axes = ('B', 'B0', 'gain_bits')

    @classmethod
    def dictionary(cls, paths, config):
        return angular.AodDictionary.from_angles(paths.aods, config.M, config.d_B_over_lambda)

    @classmethod
    def encode(cls, channels, paths, config, dictionary):
        appointed = feedback.appointed_flags(config)
        support = tuple(range(dictionary.G_t))
        return [
            feedback.encode_user(c, paths, c.user, config, appointed[c.user], dictionary=dictionary,
                                 support=support)
            for c in channels
        ]


def conventional_overhead(config: SystemConfig, bits) -> feedback.OverheadReport:
    """ Step 1 as in the proposed scheme, no angle feedback, bits (+ gains) per column """
    proposed = feedback.overhead(config)
    step3 = config.L1 * (bits + 2 * config.gain_bits)
    return feedback.OverheadReport(
        step1_bits=proposed.step1_bits, step2_bits=0, step3_bits=step3,
        step1_amortized=proposed.step1_amortized, step2_amortized=0.0,
        per_user_amortized_bits=proposed.step1_amortized + step3,
    )


def overhead_matched_bits(config: SystemConfig):
    """ The most bits per column whose conventional overhead does not exceed the proposed overhead at config """
    report = feedback.overhead(config)
    budget = report.per_user_amortized_bits - report.step1_amortized
    bits = math.floor(budget / config.L1 + 1e-9) - 2 * config.gain_bits
    return max(0, bits)


class ConventionalFeedback(AbstractFeedbackScheme):
    """
    Angle-agnostic baseline: each non-zero hybrid column is quantized with a plain N-dimensional RVQ codebook
        of B bits (same support and genie norms as the proposed scheme, no step 2).
    """
    label = 'Conventional'
    axes = ('B', 'G_t', 'gain_bits')

    @classmethod
    def resolve_config(cls, config, match_overhead=False):
        if not match_overhead:
            return config
        if overhead_matched_bits(config) > MAX_CONVENTIONAL_BITS:
            raise ImproperlyConfigured('Conventional codebooks are limited to {b} bits.'.format(b=MAX_CONVENTIONAL_BITS))
        matched = config.replace(B=overhead_matched_bits(config))
        logger.debug('Conventional feedback matched to %d bits per column at B=%d', matched.B, config.B)
        return matched

    @classmethod
    def overhead(cls, config):
        return conventional_overhead(config, config.B)

    @classmethod
    def bs_side_csi(cls, channels, paths, config):
        if config.B > MAX_CONVENTIONAL_BITS:
            raise ImproperlyConfigured('Conventional codebooks are limited to {b} bits.'.format(b=MAX_CONVENTIONAL_BITS))
        dictionary = angular.dictionary_for(config)
        support = angular.support_of_aods(paths.aods, dictionary)
        codebook = feedback.build_full_codebook(config, config.B)
        estimates = []
        for channel in channels:
            hybrid = angular.extract_hybrid(channel, support, dictionary)
            columns = []
            for column in hybrid.columns:
                index = feedback.select_codeword(column, codebook) if np.any(column) else 0
                direction = feedback.unit_codeword(codebook, index)
                gain = feedback.genie_gain(column, direction)
                if config.gain_bits:
                    gain = feedback.dequantize_gain(*feedback.quantize_gain(gain, config), config)
                columns.append(gain * direction)
            reconstructed = angular.HybridChannel(support=hybrid.support, columns=np.array(columns))
            estimates.append(angular.reconstruct_spatial(reconstructed, dictionary))
        return with_estimates(channels, estimates)


# Built-in scheme Types

Proposed = ProposedFeedback.register(id='proposed')
ProposedPerfectAodScheme = ProposedPerfectAod.register(id='proposed_perfect_aod')
Conventional = ConventionalFeedback.register(id='conventional')
PerfectCsitScheme = PerfectCsit.register(id='perfect_csit')
