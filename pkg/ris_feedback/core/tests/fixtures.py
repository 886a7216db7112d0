"""
Small configurations and channel realizations shared by the test suite
"""
import numpy as np

from ris_feedback.core.channel import CascadedChannel, build_channels, sample_paths
from ris_feedback.core.config import CeoParams, SystemConfig

# A scaled-down system that keeps every dimension distinct
SMALL = SystemConfig(M=8, N1=4, N2=2, K=2, L1=2, L2=2, G_t=64, B0=6, B=6)

# High-resolution feedback on a moderate array, used where quantization error must be small
FINE = SystemConfig(M=16, N1=4, N2=4, K=2, L1=2, L2=2, G_t=64, B0=12, B=10)

FAST_CEO = CeoParams(S=20, rho=0.2, T=3)


def rng(seed=0):
    return np.random.default_rng(seed)


def realization(config=SMALL, seed=0, on_grid=None):
    """ (paths, channels) of one seeded realization """
    generator = rng(seed)
    paths = sample_paths(config, generator, on_grid=on_grid)
    return paths, build_channels(paths, config, generator)


def channel_from(H, h_d, user=0):
    """ A CascadedChannel with no path bookkeeping, for hand-built matrices """
    return CascadedChannel(H=np.asarray(H, dtype=complex), h_d=np.asarray(h_d, dtype=complex), source_paths=None,
                           user=user)


def relative_error(estimate, truth):
    return np.linalg.norm(estimate - truth) / np.linalg.norm(truth)
