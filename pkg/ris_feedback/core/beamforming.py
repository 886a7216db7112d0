"""
    Joint beamforming on BS-side CSI and rate evaluation on the true channels.

    The BS picks RIS phases with cross-entropy optimization (CEO) and zero-forcing precoders, both computed from
    the CSI it has (fed back or perfect).  The per-user rate is always evaluated on the true channels, so any CSI
    mismatch shows up as residual interference.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ris_feedback.exceptions import DegenerateChannel

from .channel import CascadedChannel, check_phases, effective_downlink_channel
from .config import CeoParams, SystemConfig

logger = logging.getLogger(__name__)

# Stacked-channel Gram matrices above this condition number are treated as rank deficient.
MAX_ZF_CONDITION = 1e10


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    """ RIS phases phi_n = exp(j 2 pi p_n / P) with level p_n in 0..P-1 """
    levels: np.ndarray
    discretization: int
    objective: Optional[float] = None           # CEO objective of these phases on the BS-side CSI
    trace: Tuple[float, ...] = ()               # best-ever objective after each CEO iteration
    probabilities: Optional[np.ndarray] = None  # final N x P CEO sampling table

    @property
    def phases(self):
        return np.exp(2j * np.pi * np.asarray(self.levels) / self.discretization)

    @classmethod
    def uniform(cls, N, P=4):
        """ all elements at phase zero """
        return cls(levels=np.zeros(N, dtype=int), discretization=P)

    @classmethod
    def random(cls, N, P, rng: np.random.Generator):
        return cls(levels=rng.integers(0, P, size=N), discretization=P)


@dataclass(frozen=True)
class RateReport:
    """ Rates of one channel realization (bits/s/Hz); the harness averages them over trials """
    per_user_rate: float
    sum_rate: float
    user_rates: Tuple[float, ...] = ()
    overhead: Optional[object] = None
    metadata: dict = field(default_factory=dict)


#
# Zero forcing
#

def zf_precoder(channel_rows):
    """
    Unit-norm zero-forcing precoders for the K x M stack of channel rows h_k^H:
        columns of H^H (H H^H)^-1, each normalized.  Returned as an M x K matrix.
    """
    rows = np.atleast_2d(np.asarray(channel_rows))
    K, M = rows.shape
    if K > M:
        raise DegenerateChannel('Cannot zero-force {k} users with {m} antennas.'.format(k=K, m=M))
    gram = rows @ rows.conj().T
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > MAX_ZF_CONDITION:
        raise DegenerateChannel('Stacked user channels are rank deficient.')
    W = np.linalg.solve(gram, rows).conj().T
    return W / np.linalg.norm(W, axis=0, keepdims=True)


def batched_zf(rows):
    """
    ZF precoders for a batch of stacks, rows of shape (S, K, M).
    Returns (W of shape (S, M, K), mask of non-degenerate stacks); degenerate entries of W are zero.
    """
    S, K, M = rows.shape
    gram = rows @ np.conj(np.swapaxes(rows, 1, 2))
    ok = np.all(np.isfinite(gram), axis=(1, 2))
    if K <= M:
        ok &= np.linalg.cond(np.where(ok[:, None, None], gram, np.eye(K))) <= MAX_ZF_CONDITION
    else:
        ok[:] = False
    W = np.zeros((S, M, K), dtype=complex)
    if np.any(ok):
        solved = np.linalg.solve(gram[ok], rows[ok])
        Wk = np.conj(np.swapaxes(solved, 1, 2))
        W[ok] = Wk / np.linalg.norm(Wk, axis=1, keepdims=True)
    return W, ok


#
# Rates
#

def rates_from_gains(gains, gamma):
    """
    Per-user rates from the |h_k^H v_i|^2 matrix (..., K, K), equal power gamma / K per user:
        log2(1 + (gamma/K)|h_k v_k|^2 / (1 + (gamma/K) sum_{i != k} |h_k v_i|^2))
    """
    K = gains.shape[-1]
    signal = np.diagonal(gains, axis1=-2, axis2=-1)
    interference = np.sum(gains, axis=-1) - signal
    scale = gamma / K
    return np.log2(1 + scale * signal / (1 + scale * interference))


def downlink_rows(channels: Sequence[CascadedChannel], phases):
    return np.array([effective_downlink_channel(c, phases) for c in channels])


def per_user_rate(true_channels: Sequence[CascadedChannel], phases, precoders, gamma, overhead=None,
                  **metadata) -> RateReport:
    """ Rate of this realization with the given RIS phases and M x K precoders, evaluated on the true channels """
    phases = phases.phases if isinstance(phases, PhaseConfig) else check_phases(phases)
    rows = downlink_rows(true_channels, phases)
    gains = np.abs(rows @ np.asarray(precoders)) ** 2
    rates = rates_from_gains(gains, gamma)
    return RateReport(
        per_user_rate=float(np.mean(rates)),
        sum_rate=float(np.sum(rates)),
        user_rates=tuple(float(r) for r in rates),
        overhead=overhead,
        metadata=metadata,
    )


def csi_tensors(csi: Sequence[CascadedChannel]):
    """ stacked (K, N, M) cascaded channels and (K, M) direct rows h_d^H """
    return np.array([c.H for c in csi]), np.array([np.conj(c.h_d) for c in csi])


def phase_objective(levels, Hs, direct_rows, P, gamma):
    """
    Mean per-user ZF rate for a batch of phase-level vectors (S, N) on the given CSI tensors.
    Degenerate samples score -inf.
    """
    phases = np.exp(2j * np.pi * np.asarray(levels) / P)
    rows = direct_rows[None] + np.einsum('sn,knm->skm', phases, Hs)
    W, ok = batched_zf(rows)
    gains = np.abs(rows @ W) ** 2
    objective = np.mean(rates_from_gains(gains, gamma), axis=-1)
    return np.where(ok, objective, -np.inf)


#
# Cross-entropy optimization
#

def sample_levels(probabilities, S, rng: np.random.Generator):
    """ Draw S phase-level vectors, element n independently from row n of the N x P table """
    cdf = np.cumsum(probabilities, axis=1)
    u = rng.random((S, probabilities.shape[0], 1))
    levels = np.sum(u > cdf[None], axis=-1)
    return np.minimum(levels, probabilities.shape[1] - 1)


def ceo_optimize(csi_at_bs: Sequence[CascadedChannel], config: SystemConfig, ceo: CeoParams = None,
                 rng: Optional[np.random.Generator] = None) -> PhaseConfig:
    """
    Cross-entropy search for the RIS phase levels maximizing the mean per-user ZF rate on the given CSI.
    Returns the best configuration ever sampled, with its objective and the best-ever trace.
    """
    ceo = ceo or CeoParams()
    rng = rng if rng is not None else np.random.default_rng(ceo.seed)
    Hs, direct_rows = csi_tensors(csi_at_bs)
    N, P = Hs.shape[1], config.P
    probabilities = np.full((N, P), 1 / P)
    best_levels, best_objective = None, -np.inf
    trace = []

    for _ in range(ceo.T):
        levels = sample_levels(probabilities, ceo.S, rng)
        objective = phase_objective(levels, Hs, direct_rows, P, config.gamma)
        order = np.argsort(-objective, kind='stable')
        if objective[order[0]] > best_objective:
            best_objective, best_levels = float(objective[order[0]]), levels[order[0]].copy()
        trace.append(best_objective)

        finite = objective[np.isfinite(objective)]
        if finite.size == 0 or np.ptp(finite) == 0:
            continue    # nothing to learn from a flat or fully degenerate population
        elites = levels[order[:min(ceo.elites, finite.size)]]
        frequencies = np.stack([np.mean(elites == p, axis=0) for p in range(P)], axis=1)
        probabilities = ceo.smoothing * frequencies + (1 - ceo.smoothing) * probabilities

    if best_levels is None:
        raise DegenerateChannel('Every sampled RIS configuration gave a degenerate channel.')
    logger.debug('CEO best objective %.4f after %d iterations', best_objective, ceo.T)
    return PhaseConfig(levels=best_levels, discretization=P, objective=best_objective, trace=tuple(trace),
                       probabilities=probabilities)


def exhaustive_phases(csi_at_bs: Sequence[CascadedChannel], config: SystemConfig) -> PhaseConfig:
    """ Brute-force optimum over all P**N level vectors (tiny N only) """
    Hs, direct_rows = csi_tensors(csi_at_bs)
    N, P = Hs.shape[1], config.P
    grid = np.array(np.meshgrid(*[np.arange(P)] * N, indexing='ij')).reshape(N, -1).T
    objective = phase_objective(grid, Hs, direct_rows, P, config.gamma)
    best = int(np.argmax(objective))
    return PhaseConfig(levels=grid[best], discretization=P, objective=float(objective[best]))


def beamform(csi_at_bs: Sequence[CascadedChannel], config: SystemConfig, ceo: CeoParams = None,
             rng: Optional[np.random.Generator] = None):
    """ CEO phases and the ZF precoders for them, both from the BS-side CSI """
    phase_config = ceo_optimize(csi_at_bs, config, ceo, rng)
    precoders = zf_precoder(downlink_rows(csi_at_bs, phase_config.phases))
    return phase_config, precoders
