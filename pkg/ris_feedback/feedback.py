"""
    Proxy for the feedback codec and scheme Types to simplify import statements
"""
from ris_feedback.core.feedback import (
    QuantizedAngles, SubspaceCodebook, FeedbackPayload, OverheadReport,
    quantize_cascaded_angles, build_subspace_codebook, chordal_distance_sq, select_codeword,
    encode_feedback, decode_feedback, overhead,
)

from ris_feedback.core.payload import (
    serialize_payload, parse_payload,
)

from ris_feedback.core.schemes import (
    AbstractFeedbackScheme, ProposedFeedback, ConventionalFeedback, PerfectCsit, overhead_matched_bits,
)
