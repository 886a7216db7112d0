"""
    Hybrid-domain view of the cascaded channel.

    H_k = H~_k Theta_T^H, where Theta_T (M x G_t) is a dictionary of BS steering vectors on a uniform sine grid.
    For on-grid AoDs the hybrid channel H~_k has exactly L1 non-zero columns, at the grid indexes of the AoDs,
    and that column support is shared by every user (the AoDs belong to the user-independent BS-RIS channel).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg
from django.core.exceptions import ImproperlyConfigured

from ris_feedback.exceptions import IllConditionedSupport

from .channel import CascadedChannel, frequency_steering
from .config import SystemConfig
from .utils import nearest_level

# Gram matrices of the selected dictionary columns above this condition number signal colliding grid indexes.
MAX_SUPPORT_CONDITION = 1e8


def sine_grid(G_t):
    """ s_g = -1 + 2 g / G_t for g = 0..G_t-1 """
    return -1 + 2 * np.arange(G_t) / G_t


def sine_to_grid_index(s, G_t):
    """ Nearest grid index to sine value(s) s, exact midpoints going to the lower index """
    step = 2 / G_t
    return nearest_level(s, -1 - step / 2, step, G_t)


@dataclass(frozen=True, eq=False)
class AodDictionary:
    """ Theta_T: column g is the BS steering vector whose AoD sine is grid[g] """
    Theta_T: np.ndarray
    grid: np.ndarray
    spacing: float = 0.5

    @property
    def M(self):
        return self.Theta_T.shape[0]

    @property
    def G_t(self):
        return self.Theta_T.shape[1]

    def columns(self, support):
        return self.Theta_T[:, list(support)]

    @classmethod
    def from_sines(cls, sines, M, spacing=0.5):
        sines = np.asarray(sines, dtype=float)
        m = np.arange(M)
        Theta_T = np.exp(2j * np.pi * spacing * np.outer(m, sines)) / np.sqrt(M)
        return cls(Theta_T=Theta_T, grid=sines, spacing=spacing)

    @classmethod
    def from_angles(cls, aods, M, spacing=0.5):
        """ An exact (gridless) dictionary whose columns are the steering vectors of the given AoDs """
        return cls.from_sines(np.sin(np.asarray(aods, dtype=float)), M, spacing)


@dataclass(frozen=True, eq=False)
class HybridChannel:
    """ The non-zero columns of one user's hybrid-domain channel, columns[i] sitting at grid index support[i] """
    support: Tuple[int, ...]
    columns: np.ndarray     # shape (L1, N)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValueError('Hybrid channel support must be strictly increasing: {s}'.format(s=self.support))
        if len(self.columns) != len(self.support):
            raise ValueError('One column is required per support index.')

    @property
    def column_norms(self):
        return np.linalg.norm(self.columns, axis=1)


def build_dictionary(M, G_t, spacing=0.5, L1=1):
    """ Theta_T over the uniform sine grid of resolution G_t """
    if G_t < L1:
        raise ImproperlyConfigured('Grid resolution G_t={g} cannot hold L1={l} AoDs.'.format(g=G_t, l=L1))
    return AodDictionary.from_sines(sine_grid(G_t), M, spacing)


def dictionary_for(config: SystemConfig):
    return build_dictionary(config.M, config.G_t, config.d_B_over_lambda, config.L1)


def aod_to_grid_index(phi_aod, dictionary: AodDictionary):
    """ argmin_g |sin(phi_aod) - s_g| with ties going to the lower index """
    return int(sine_to_grid_index(np.sin(phi_aod), dictionary.G_t))


def support_of_aods(aods, dictionary: AodDictionary):
    """ Sorted nearest-grid indexes of the given AoDs (duplicates kept, so collisions stay visible) """
    return tuple(sorted(aod_to_grid_index(phi, dictionary) for phi in aods))


def check_support(Theta_S):
    """ Return the Gram matrix of the selected columns, or raise IllConditionedSupport """
    gram = Theta_S.conj().T @ Theta_S
    if np.linalg.cond(gram) > MAX_SUPPORT_CONDITION:
        raise IllConditionedSupport('Selected dictionary columns are nearly dependent (colliding grid indexes?).')
    return gram


def extract_hybrid(channel: CascadedChannel, support, dictionary: AodDictionary) -> HybridChannel:
    """
    Least-squares coefficients of H on the selected dictionary columns:
        columns = H Theta_S (Theta_S^H Theta_S)^-1, the best Frobenius fit H ~ sum_i columns[i] Theta_S[:, i]^H
    """
    H = channel.H if isinstance(channel, CascadedChannel) else np.asarray(channel)
    support = tuple(int(g) for g in support)
    if len(set(support)) != len(support):
        raise IllConditionedSupport('Support {s} has colliding grid indexes.'.format(s=support))
    order = np.argsort(support)
    support = tuple(support[i] for i in order)
    Theta_S = dictionary.columns(support)
    gram = check_support(Theta_S)
    projection = H @ Theta_S
    columns = linalg.solve(gram.T, projection.T)    # rows are the non-zero hybrid columns
    return HybridChannel(support=support, columns=columns)


def reconstruct_spatial(hybrid: HybridChannel, dictionary: AodDictionary):
    """ H = sum_i columns[i] Theta_T[:, support[i]]^H """
    Theta_S = dictionary.columns(hybrid.support)
    return hybrid.columns.T @ Theta_S.conj().T


def hybrid_energies(channel: CascadedChannel, dictionary: AodDictionary, rank=None):
    """
    Column energies of the hybrid projection of H's row space, ||V_s^H theta_g||^2 for every grid column,
        V_s spanning the row space of H (H with its non-zero singular values set to one).
    A dictionary column lying in the row space, i.e. an on-grid AoD, has energy exactly 1; all others less.
    """
    H = channel.H if isinstance(channel, CascadedChannel) else np.asarray(channel)
    _, s, Vh = np.linalg.svd(H, full_matrices=False)
    if not s.size or s[0] == 0:
        return np.zeros(dictionary.G_t)
    significant = int(np.sum(s > s[0] * 1e-10))
    rank = significant if rank is None else min(rank, significant)
    return np.sum(np.abs(Vh[:rank] @ dictionary.Theta_T) ** 2, axis=0)


def detect_support(channel: CascadedChannel, dictionary: AodDictionary, L1):
    """
    The L1 strongest grid columns of the hybrid projection, sorted ascending.
    Local peaks (circular neighbours on the sine grid) are preferred over the shoulders of a stronger peak.
    """
    energy = hybrid_energies(channel, dictionary, rank=L1)
    previous, following = np.roll(energy, 1), np.roll(energy, -1)
    peaks = (energy >= previous) & (energy >= following) & (energy > 0)
    ranking = np.lexsort((np.arange(energy.size), -energy, ~peaks))    # peaks first, then energy, then index
    return tuple(sorted(int(g) for g in ranking[:L1]))


def ris_dictionary(config: SystemConfig, oversampling=1):
    """ RIS-side diagnostic dictionary of UPA responses on a uniform (u, v) frequency grid over [-1, 1)^2 """
    spacing = config.d_R_over_lambda
    u_grid = -1 + 2 * np.arange(config.N1 * oversampling) / (config.N1 * oversampling)
    v_grid = -1 + 2 * np.arange(config.N2 * oversampling) / (config.N2 * oversampling)
    atoms = [frequency_steering(u / (2 * spacing), v / (2 * spacing), config.N1, config.N2, spacing)
             for v in v_grid for u in u_grid]
    return np.array(atoms).T


def ris_row_support(channel: CascadedChannel, config: SystemConfig, count=None, oversampling=1):
    """
    Diagnostic: indexes of the strongest rows of Theta_R^H H, i.e. the RIS-side angular support of one user.
    Unlike the column support these differ from user to user.
    """
    count = count or config.L1 * config.L2
    Theta_R = ris_dictionary(config, oversampling)
    energy = np.sum(np.abs(Theta_R.conj().T @ channel.H) ** 2, axis=1)
    ranking = np.lexsort((np.arange(energy.size), -energy))
    return tuple(sorted(int(r) for r in ranking[:count]))
