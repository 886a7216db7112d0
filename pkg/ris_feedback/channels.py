"""
    Proxy for channel synthesis and the hybrid-domain view to simplify import statements
"""
from ris_feedback.core.config import (
    SystemConfig, CeoParams, load_config,
)

from ris_feedback.core.channel import (
    BsRisPath, RisUePath, PathSet, CascadedChannel,
    ula_steering, upa_steering, cascaded_steering, sample_paths,
    build_cascaded_channel, build_channels, effective_downlink_channel,
)

from ris_feedback.core.angular import (
    AodDictionary, HybridChannel,
    build_dictionary, aod_to_grid_index, extract_hybrid, reconstruct_spatial, detect_support, ris_row_support,
)
