"""
    Bit-exact wire format for a FeedbackPayload.

    Layout (big-endian bit order, MSB first):

        byte 0        flags: bit 0 = step 1 present, bit 1 = column gains present, other bits zero
        step 1        L1 grid indexes, ceil(log2 G_t) bits each            (only when flagged)
        step 2        for each column i, for each path j: q_az, q_el, B0 bits each
        step 3        L1 codeword indexes, B bits each
        gains         for each column: magnitude then phase index, gain_bits each   (only when flagged)
        padding       zero bits up to the next byte boundary

    Field widths come from the SystemConfig shared by UE and BS; nothing else is transmitted.
"""
import numpy as np

from ris_feedback.exceptions import MalformedPayload

from .config import SystemConfig
from .feedback import FeedbackPayload, QuantizedAngles

STEP1_FLAG = 0x01
GAINS_FLAG = 0x02


def field_widths(config: SystemConfig, with_step1, with_gains=None):
    """ Bits occupied by each section of the stream """
    with_gains = bool(config.gain_bits) if with_gains is None else with_gains
    return dict(
        step1=config.L1 * config.grid_index_bits if with_step1 else 0,
        step2=config.L1 * config.L2 * 2 * config.B0,
        step3=config.L1 * config.B,
        gains=config.L1 * 2 * config.gain_bits if with_gains else 0,
    )


def to_bits(values, width):
    values = np.asarray(values, dtype=np.int64).ravel()
    if width == 0 or values.size == 0:
        return np.zeros(0, dtype=np.uint8)
    if np.any(values < 0) or np.any(values >> width):
        raise MalformedPayload('Value does not fit in {w} bits.'.format(w=width))
    shifts = np.arange(width - 1, -1, -1)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def from_bits(bits, width, count):
    if width == 0:
        return np.zeros(count, dtype=np.int64)
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits.reshape(count, width).astype(np.int64) @ weights


def serialize_payload(payload: FeedbackPayload, config: SystemConfig) -> bytes:
    """ Pack a validated payload into bytes """
    payload.validate(config)
    flags = (STEP1_FLAG if payload.step1 is not None else 0) | (GAINS_FLAG if payload.gains is not None else 0)
    sections = [
        to_bits(payload.step1 if payload.step1 is not None else [], config.grid_index_bits),
        to_bits(payload.step2.array, config.B0),
        to_bits(payload.step3, config.B),
        to_bits(payload.gains if payload.gains is not None else [], config.gain_bits),
    ]
    bits = np.concatenate(sections)
    return bytes([flags]) + np.packbits(bits).tobytes()


def payload_bit_length(config: SystemConfig, with_step1, with_gains=None):
    return sum(field_widths(config, with_step1, with_gains).values())


def parse_payload(data: bytes, config: SystemConfig) -> FeedbackPayload:
    """ Unpack bytes produced by serialize_payload; raise MalformedPayload on any inconsistency """
    if not data:
        raise MalformedPayload('Empty payload.')
    flags = data[0]
    if flags & ~(STEP1_FLAG | GAINS_FLAG):
        raise MalformedPayload('Unknown flag bits: {f:#04x}'.format(f=flags))
    with_step1, with_gains = bool(flags & STEP1_FLAG), bool(flags & GAINS_FLAG)
    if with_gains != bool(config.gain_bits):
        raise MalformedPayload('Gain section presence does not match gain_bits={g}.'.format(g=config.gain_bits))

    widths = field_widths(config, with_step1, with_gains)
    total = sum(widths.values())
    if len(data) != 1 + (total + 7) // 8:
        raise MalformedPayload('Expected {n} bytes, got {m}.'.format(n=1 + (total + 7) // 8, m=len(data)))
    bits = np.unpackbits(np.frombuffer(data[1:], dtype=np.uint8))
    if np.any(bits[total:]):
        raise MalformedPayload('Non-zero padding bits.')

    offset = 0
    fields = {}
    for name in ('step1', 'step2', 'step3', 'gains'):
        fields[name] = bits[offset:offset + widths[name]]
        offset += widths[name]

    step1 = tuple(int(g) for g in from_bits(fields['step1'], config.grid_index_bits, config.L1)) \
        if with_step1 else None
    angles = from_bits(fields['step2'], config.B0, config.L1 * config.L2 * 2).reshape(config.L1, config.L2, 2)
    step2 = QuantizedAngles(
        indexes=tuple(tuple((int(q[0]), int(q[1])) for q in column) for column in angles),
        B0=config.B0,
    )
    step3 = tuple(int(d) for d in from_bits(fields['step3'], config.B, config.L1))
    gains = None
    if with_gains:
        pairs = from_bits(fields['gains'], config.gain_bits, config.L1 * 2).reshape(config.L1, 2)
        gains = tuple((int(m), int(p)) for m, p in pairs)

    payload = FeedbackPayload(step1=step1, step2=step2, step3=step3, gains=gains)
    payload.validate(config)
    return payload
