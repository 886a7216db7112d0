"""
    Three-step dimension-reduced feedback of the hybrid-domain cascaded channel.

    Step 1: one appointed user (or a configured fraction) feeds back the L1 shared column indexes.
    Step 2: every user feeds back its quantized cascaded-AoA frequencies, from which UE and BS build
            an angle-adaptive subspace codebook per non-zero column.
    Step 3: every user feeds back one codeword index per non-zero column.

    Steps 1 and 2 depend only on angles, so they are sent once per angle coherence time.
"""
import functools
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ris_feedback.exceptions import MalformedPayload, ProtocolError, UndefinedAngle

from . import angular
from .channel import CascadedChannel, PathSet, cascaded_frequencies, frequency_steering
from .config import SystemConfig
from .utils import crandn, nearest_level

logger = logging.getLogger(__name__)

# Effective cascaded frequencies are differences of two sines, hence confined to [-2, 2].
FREQUENCY_RANGE = (-2.0, 2.0)


#
# Step 2: cascaded-frequency quantization
#

def frequency_step(B0):
    low, high = FREQUENCY_RANGE
    return (high - low) / 2 ** B0


def quantize_frequency(x, B0):
    """ Index of the nearest of 2**B0 uniform levels over [-2, 2] (level q centred at -2 + 4 (q + 0.5) / 2**B0) """
    x = np.clip(x, *FREQUENCY_RANGE)
    return nearest_level(x, FREQUENCY_RANGE[0], frequency_step(B0), 2 ** B0)


def dequantize_frequency(q, B0):
    return FREQUENCY_RANGE[0] + frequency_step(B0) * (np.asarray(q) + 0.5)


@dataclass(frozen=True)
class QuantizedAngles:
    """ Per non-zero column, L2 pairs of level indexes (q_az, q_el) of the cascaded (horizontal, vertical) frequencies """
    indexes: Tuple[Tuple[Tuple[int, int], ...], ...]
    B0: int

    def __post_init__(self):
        if any(not 0 <= q < 2 ** self.B0 for column in self.indexes for pair in column for q in pair):
            raise MalformedPayload('Quantized angle index out of range for B0={b}.'.format(b=self.B0))

    @property
    def array(self):
        """ integer array of shape (L1, L2, 2) """
        return np.array(self.indexes, dtype=int).reshape(len(self.indexes), -1, 2)

    def frequencies(self, column):
        """ dequantized (u, v) pairs of one column, shape (L2, 2) """
        return dequantize_frequency(self.array[column], self.B0)

    def reordered(self, order):
        return QuantizedAngles(indexes=tuple(self.indexes[i] for i in order), B0=self.B0)


def quantize_cascaded_angles(paths: PathSet, k, config: SystemConfig, path_order: Optional[Sequence[int]] = None):
    """
    Quantize user k's cascaded AoA pairs, one group of L2 pairs per BS-RIS path (in path_order, default path order).
    Each pair contributes its horizontal frequency u and vertical frequency v, B0 bits each.
    """
    path_order = range(len(paths.bs_ris_paths)) if path_order is None else path_order
    indexes = []
    for i in path_order:
        bs_ris = paths.bs_ris_paths[i]
        column = []
        for ris_ue in paths.ris_ue_paths[k]:
            u, v = cascaded_frequencies(ris_ue, bs_ris)
            column.append((int(quantize_frequency(u, config.B0)), int(quantize_frequency(v, config.B0))))
        indexes.append(tuple(column))
    return QuantizedAngles(indexes=tuple(indexes), B0=config.B0)


#
# Codebooks
#

@functools.lru_cache(maxsize=64)
def rvq_codebook(seed, bits, dim):
    """
    Random vector quantization codebook: 2**bits i.i.d. CN(0, 1) vectors of length dim, normalized to unit norm.
    Identical at the UE and the BS for the same (seed, bits, dim).  Returned array is read-only.
    """
    rng = np.random.default_rng([seed, bits, dim])
    codebook = crandn(rng, 2 ** bits, dim)
    codebook /= np.linalg.norm(codebook, axis=1, keepdims=True)
    codebook.flags.writeable = False
    return codebook


@dataclass(frozen=True, eq=False)
class SubspaceCodebook:
    """ Angle-adaptive codebook: codeword q = steering_matrix @ base_codebook[q] """
    steering_matrix: np.ndarray     # N x L2, cascaded steering vectors at the quantized frequencies
    base_codebook: np.ndarray       # 2**B x L2, unit-norm RVQ vectors
    codewords: Optional[np.ndarray] = field(default=None)   # 2**B x N

    def __post_init__(self):
        if self.codewords is None:
            object.__setattr__(self, 'codewords', self.base_codebook @ self.steering_matrix.T)

    def __len__(self):
        return len(self.codewords)

    def planted(self, index, vector):
        """ A copy with codeword index replaced by vector (e.g. to plant the true direction) """
        codewords = np.array(self.codewords)
        codewords[index] = vector
        return SubspaceCodebook(self.steering_matrix, self.base_codebook, codewords)


def steering_matrix(frequencies, config: SystemConfig):
    """ B^_{k,i}: cascaded steering vectors (magnitude 1/N entries) at the given (u, v) pairs, one per column """
    return np.array([
        frequency_steering(u, v, config.N1, config.N2, config.d_R_over_lambda, scale=1 / config.N)
        for u, v in frequencies
    ]).T


def build_subspace_codebook(quantized: QuantizedAngles, column, config: SystemConfig, codebook_seed=None):
    """ Codebook for one non-zero column from its quantized cascaded frequencies and the shared RVQ codebook """
    seed = config.codebook_seed if codebook_seed is None else codebook_seed
    return SubspaceCodebook(
        steering_matrix=steering_matrix(quantized.frequencies(column), config),
        base_codebook=rvq_codebook(seed, config.B, config.L2),
    )


def build_full_codebook(config: SystemConfig, bits, codebook_seed=None):
    """ Angle-agnostic codebook: plain N-dimensional RVQ """
    seed = config.codebook_seed if codebook_seed is None else codebook_seed
    base = rvq_codebook(seed, bits, config.N)
    return SubspaceCodebook(steering_matrix=np.eye(config.N), base_codebook=base, codewords=base)


#
# Step 3: codeword selection
#

def chordal_distance_sq(a, b):
    """ sin^2 of the angle between a and b: 1 - |a^H b|^2 / (|a|^2 |b|^2) """
    a, b = np.asarray(a), np.asarray(b)
    norms = np.vdot(a, a).real * np.vdot(b, b).real
    if norms == 0:
        raise UndefinedAngle('Chordal distance is undefined for a zero vector.')
    return float(min(1.0, max(0.0, 1 - abs(np.vdot(a, b)) ** 2 / norms)))


def codebook_distances(column, codebook: SubspaceCodebook):
    """ chordal distance from column to every codeword; zero codewords are at distance 1 """
    column = np.asarray(column)
    column_norm = np.vdot(column, column).real
    if column_norm == 0:
        raise UndefinedAngle('Cannot select a codeword for a zero column.')
    codeword_norms = np.sum(np.abs(codebook.codewords) ** 2, axis=1)
    correlation = np.abs(codebook.codewords.conj() @ column) ** 2
    with np.errstate(divide='ignore', invalid='ignore'):
        distances = 1 - correlation / (codeword_norms * column_norm)
    return np.clip(np.where(codeword_norms > 0, distances, 1.0), 0.0, 1.0)


def select_codeword(column, codebook: SubspaceCodebook):
    """ D = argmin_q sin^2(angle(column, c_q)), exhaustive, ties to the lowest index """
    return int(np.argmin(codebook_distances(column, codebook)))


def unit_codeword(codebook: SubspaceCodebook, index):
    codeword = codebook.codewords[index]
    norm = np.linalg.norm(codeword)
    return codeword / norm if norm > 0 else np.zeros_like(codeword)


#
# Column gains
#

def genie_gain(column, direction):
    """ The true column norm, carrying the phase that aligns the unit codeword direction with the column """
    phase = np.vdot(direction, column)
    return np.linalg.norm(column) * (phase / abs(phase) if abs(phase) > 0 else 1.0)


def quantize_gain(gain, config: SystemConfig):
    """ (magnitude, phase) level indexes of a complex column gain, gain_bits each; magnitude uniform in dB """
    levels = 2 ** config.gain_bits
    db_step = (config.gain_db_max - config.gain_db_min) / levels
    magnitude_db = 20 * np.log10(max(abs(gain), 1e-300))
    q_mag = nearest_level(np.clip(magnitude_db, config.gain_db_min, config.gain_db_max),
                          config.gain_db_min, db_step, levels)
    q_phase = nearest_level(np.mod(np.angle(gain), 2 * np.pi), 0.0, 2 * np.pi / levels, levels)
    return int(q_mag), int(q_phase)


def dequantize_gain(q_mag, q_phase, config: SystemConfig):
    levels = 2 ** config.gain_bits
    db_step = (config.gain_db_max - config.gain_db_min) / levels
    magnitude = 10 ** ((config.gain_db_min + db_step * (q_mag + 0.5)) / 20)
    return magnitude * np.exp(1j * 2 * np.pi * (q_phase + 0.5) / levels)


#
# Payload and overhead
#

@dataclass(frozen=True)
class FeedbackPayload:
    """ Everything one user feeds back: optional step-1 indexes, step-2 angles, step-3 codeword indexes """
    step1: Optional[Tuple[int, ...]]
    step2: QuantizedAngles
    step3: Tuple[int, ...]
    gains: Optional[Tuple[Tuple[int, int], ...]] = None     # (magnitude, phase) indexes when gain_bits > 0

    def validate(self, config: SystemConfig):
        """ Raise MalformedPayload unless every field has the shape and range config prescribes """
        if self.step1 is not None:
            if len(self.step1) != config.L1 or not all(0 <= g < config.G_t for g in self.step1):
                raise MalformedPayload('Step-1 must carry {l} grid indexes below {g}.'.format(l=config.L1, g=config.G_t))
            if any(b <= a for a, b in zip(self.step1, self.step1[1:])):
                raise MalformedPayload('Step-1 grid indexes must be strictly increasing.')
        angles = self.step2.array
        if angles.shape != (config.L1, config.L2, 2) or self.step2.B0 != config.B0:
            raise MalformedPayload('Step-2 must carry {l1} x {l2} frequency pairs.'.format(l1=config.L1, l2=config.L2))
        if len(self.step3) != config.L1 or not all(0 <= d < 2 ** config.B for d in self.step3):
            raise MalformedPayload('Step-3 must carry {l} codeword indexes below 2^{b}.'.format(l=config.L1, b=config.B))
        if config.gain_bits:
            levels = 2 ** config.gain_bits
            if self.gains is None or len(self.gains) != config.L1 or \
                    not all(0 <= q < levels for pair in self.gains for q in pair):
                raise MalformedPayload('Gain indexes missing or out of range.')
        return True


@dataclass(frozen=True)
class OverheadReport:
    """ Raw bits of each feedback step and the per-user cost amortized over the angle coherence time """
    step1_bits: int
    step2_bits: int
    step3_bits: int
    step1_amortized: float
    step2_amortized: float
    per_user_amortized_bits: float

    @property
    def raw_bits(self):
        return self.step1_bits + self.step2_bits + self.step3_bits


def overhead(config: SystemConfig) -> OverheadReport:
    """
    step1 = L1 ceil(log2 G_t), step2 = L1 L2 2 B0, step3 = L1 (B + 2 Bg);
    per user: step1 * fraction / ratio + step2 / ratio + step3
    """
    step1 = config.L1 * config.grid_index_bits
    step2 = config.L1 * config.L2 * 2 * config.B0
    step3 = config.L1 * (config.B + 2 * config.gain_bits)
    step1_amortized = step1 * config.step1_user_fraction / config.coherence_ratio
    step2_amortized = step2 / config.coherence_ratio
    return OverheadReport(
        step1_bits=step1, step2_bits=step2, step3_bits=step3,
        step1_amortized=step1_amortized, step2_amortized=step2_amortized,
        per_user_amortized_bits=step1_amortized + step2_amortized + step3,
    )


#
# UE side
#

def column_path_order(paths: PathSet, support, dictionary: angular.AodDictionary):
    """ For each support index (ascending), the BS-RIS path it belongs to: nearest AoD sine, one path per column """
    sines = np.sin(paths.aods)
    cost = np.abs(dictionary.grid[list(support)][:, None] - sines[None, :])
    _, order = linear_sum_assignment(cost)
    return tuple(int(i) for i in order)


def feedback_support(channel: CascadedChannel, paths: PathSet, config: SystemConfig,
                     dictionary: angular.AodDictionary, method='nearest_grid'):
    """
    The shared column support every UE works with:
        'nearest_grid' snaps the (estimated) AoDs to the grid, 'detect' ranks the hybrid projection of H.
    """
    if method == 'nearest_grid':
        return angular.support_of_aods(paths.aods, dictionary)
    if method == 'detect':
        return angular.detect_support(channel, dictionary, config.L1)
    raise ValueError('Unknown support method: {m}'.format(m=method))


@dataclass(frozen=True, eq=False)
class EncodedUser:
    """ A payload together with the UE-side intermediates that produced it """
    payload: FeedbackPayload
    hybrid: angular.HybridChannel
    codebooks: Tuple[SubspaceCodebook, ...]
    gains: Tuple[complex, ...]      # genie column gains for the chosen codewords


def encode_user(channel: CascadedChannel, paths: PathSet, k, config: SystemConfig, is_appointed,
                dictionary: Optional[angular.AodDictionary] = None, support=None, support_method='nearest_grid',
                codebook_seed=None) -> EncodedUser:
    """
    Run the three feedback steps for user k and keep the intermediates (see encode_feedback).
    An all-zero hybrid column has no direction to quantize: it is sent as codeword 0 with a zero gain.
    """
    dictionary = dictionary or angular.dictionary_for(config)
    support = tuple(support) if support is not None else \
        feedback_support(channel, paths, config, dictionary, support_method)
    hybrid = angular.extract_hybrid(channel, support, dictionary)
    order = column_path_order(paths, hybrid.support, dictionary)
    angles = quantize_cascaded_angles(paths, k, config, path_order=order)

    codebooks, step3, gains = [], [], []
    for i, column in enumerate(hybrid.columns):
        codebook = build_subspace_codebook(angles, i, config, codebook_seed)
        index = select_codeword(column, codebook) if np.any(column) else 0
        codebooks.append(codebook)
        step3.append(index)
        gains.append(genie_gain(column, unit_codeword(codebook, index)))

    quantized_gains = tuple(quantize_gain(g, config) for g in gains) if config.gain_bits else None
    payload = FeedbackPayload(
        step1=hybrid.support if is_appointed else None,
        step2=angles,
        step3=tuple(step3),
        gains=quantized_gains,
    )
    return EncodedUser(payload=payload, hybrid=hybrid, codebooks=tuple(codebooks), gains=tuple(gains))


def encode_feedback(channel: CascadedChannel, paths: PathSet, k, config: SystemConfig, is_appointed,
                    dictionary: Optional[angular.AodDictionary] = None, support=None,
                    support_method='nearest_grid', codebook_seed=None) -> FeedbackPayload:
    """
    Build user k's FeedbackPayload.
    step1 (appointed users only): shared column support; step2: quantized cascaded frequencies per column;
    step3: codeword index per extracted hybrid column.
    """
    return encode_user(channel, paths, k, config, is_appointed, dictionary, support, support_method,
                       codebook_seed).payload


def appointed_flags(config: SystemConfig):
    """ The first ceil(fraction K) users repeat step 1 """
    return [k < config.appointed_users for k in range(config.K)]


#
# BS side
#

def received_support(payloads: Sequence[FeedbackPayload]):
    """ The first step-1 report received; duplicates from other appointed users are ignored """
    for payload in payloads:
        if payload.step1 is not None:
            return tuple(payload.step1)
    raise ProtocolError('No user fed back the step-1 column indexes.')


def decode_feedback(payloads: Sequence[FeedbackPayload], config: SystemConfig, codebook_seed=None,
                    true_column_norms=None, dictionary: Optional[angular.AodDictionary] = None,
                    codebook_builder: Callable = build_subspace_codebook):
    """
    Reconstruct every user's spatial-domain cascaded channel at the BS.

    Each column is the unit-norm codeword picked in step 3, scaled by its column gain and placed at the shared
    step-1 support.  Gains come from the gain indexes when gain_bits > 0, otherwise from true_column_norms
    (per user, L1 values).  Real values fix only the column norm and leave the codeword's arbitrary phase in place;
    the complex genie gains of encode_user also rotate each codeword onto its column.
    """
    dictionary = dictionary or angular.dictionary_for(config)
    support = received_support(payloads)
    for payload in payloads:
        payload.validate(config)
    if not config.gain_bits and true_column_norms is None:
        raise ProtocolError('Column gains are neither fed back nor supplied.')

    reconstructed = []
    for k, payload in enumerate(payloads):
        columns = []
        for i, index in enumerate(payload.step3):
            codebook = codebook_builder(payload.step2, i, config, codebook_seed)
            gain = dequantize_gain(*payload.gains[i], config) if config.gain_bits else true_column_norms[k][i]
            columns.append(gain * unit_codeword(codebook, index))
        hybrid = angular.HybridChannel(support=support, columns=np.array(columns))
        reconstructed.append(angular.reconstruct_spatial(hybrid, dictionary))
    logger.debug('Decoded %d users on support %s', len(payloads), support)
    return reconstructed
