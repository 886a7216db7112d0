"""
    Geometric channel model for the RIS-assisted downlink.

    The BS carries a ULA of M antennas, the RIS a UPA of N = N1 x N2 elements.
    A user's cascaded channel H_k = diag(h_r,k^H) G is an N x M matrix; the RIS phase vector phi
    enters the downlink as phi^T H_k, so the equivalent channel is h_d^H + phi^T H_k.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ris_feedback.exceptions import InvalidPhaseConfiguration

from .config import SystemConfig
from .utils import crandn


@dataclass(frozen=True)
class BsRisPath:
    """ One user-independent BS-RIS path: complex gain, AoD at the BS and (azimuth, elevation) AoA at the RIS """
    gain: complex
    aod: float
    aoa_azimuth: float
    aoa_elevation: float


@dataclass(frozen=True)
class RisUePath:
    """ One user-specific RIS-UE path: complex gain and (azimuth, elevation) AoD at the RIS """
    gain: complex
    aod_azimuth: float
    aod_elevation: float


@dataclass(frozen=True)
class PathSet:
    """ Ground-truth path parameters for one channel realization of all K users """
    bs_ris_paths: Tuple[BsRisPath, ...]
    ris_ue_paths: Tuple[Tuple[RisUePath, ...], ...]   # indexed [user][path]

    @property
    def aods(self):
        return np.array([p.aod for p in self.bs_ris_paths])

    def cascaded_gain(self, i, k, j):
        """ g_{i,k,j} = alpha_i * beta_{k,j} """
        return self.bs_ris_paths[i].gain * self.ris_ue_paths[k][j].gain


@dataclass(frozen=True, eq=False)
class CascadedChannel:
    """ One user's spatial-domain cascaded channel H (N x M) and direct channel h_d (M), with their paths """
    H: np.ndarray
    h_d: np.ndarray
    source_paths: PathSet
    user: int = 0

    @property
    def N(self):
        return self.H.shape[0]

    @property
    def M(self):
        return self.H.shape[1]


#
# Steering vectors
#

def ula_steering(phi, M, spacing=0.5):
    """ BS array response a(phi): entry m = exp(j 2 pi spacing m sin(phi)) / sqrt(M) """
    m = np.arange(M)
    return np.exp(2j * np.pi * spacing * m * np.sin(phi)) / np.sqrt(M)


def frequency_steering(u, v, N1, N2, spacing=0.5, scale=None):
    """
    UPA response for horizontal spatial frequency u and vertical frequency v,
        vertical factor (kron) horizontal factor, so entry n2*N1 + n1 has phase 2 pi spacing (n1 u + n2 v).
    Scaled by 1/sqrt(N) unless a scale is given.
    """
    scale = 1 / np.sqrt(N1 * N2) if scale is None else scale
    vertical = np.exp(2j * np.pi * spacing * np.arange(N2) * v)
    horizontal = np.exp(2j * np.pi * spacing * np.arange(N1) * u)
    return scale * np.kron(vertical, horizontal)


def upa_steering(phi, theta, N1, N2, spacing=0.5):
    """ RIS array response b(phi, theta) for azimuth phi and elevation theta """
    return frequency_steering(np.cos(theta) * np.sin(phi), np.sin(theta), N1, N2, spacing)


def cascaded_frequencies(ris_ue_path: RisUePath, bs_ris_path: BsRisPath):
    """
    The (horizontal, vertical) spatial frequencies of a cascaded AoA pair,
        i.e. differences of the BS-RIS arrival and RIS-UE departure components.  Both lie in [-2, 2].
    """
    u = (np.cos(bs_ris_path.aoa_elevation) * np.sin(bs_ris_path.aoa_azimuth) -
         np.cos(ris_ue_path.aod_elevation) * np.sin(ris_ue_path.aod_azimuth))
    v = np.sin(bs_ris_path.aoa_elevation) - np.sin(ris_ue_path.aod_elevation)
    return u, v


def cascaded_steering(ris_ue_path: RisUePath, bs_ris_path: BsRisPath, config: SystemConfig):
    """ diag(b2^H) b1 computed as conj(b2) * b1; every entry has magnitude 1/N """
    b1 = upa_steering(bs_ris_path.aoa_azimuth, bs_ris_path.aoa_elevation, config.N1, config.N2,
                      config.d_R_over_lambda)
    b2 = upa_steering(ris_ue_path.aod_azimuth, ris_ue_path.aod_elevation, config.N1, config.N2,
                      config.d_R_over_lambda)
    return np.conj(b2) * b1


#
# Channel synthesis
#

def snap_to_grid(phi, G_t):
    """ Return the angle whose sine is the nearest point of the uniform G_t grid over [-1, 1) """
    from .angular import sine_grid, sine_to_grid_index
    return np.arcsin(sine_grid(G_t)[sine_to_grid_index(np.sin(phi), G_t)])


def sample_paths(config: SystemConfig, rng: np.random.Generator, on_grid: Optional[bool] = None) -> PathSet:
    """
    Draw one realization of all path parameters.
    Angles are i.i.d. uniform on [-pi/2, pi/2]; gains alpha ~ CN(0, 1/L1), beta ~ CN(0, 1/L2).
    With on_grid (default config.on_grid) the AoDs are snapped so their sines sit on the G_t grid.
    """
    on_grid = config.on_grid if on_grid is None else on_grid
    half_pi = np.pi / 2

    alpha = crandn(rng, config.L1, variance=1 / config.L1)
    bs_angles = rng.uniform(-half_pi, half_pi, size=(config.L1, 3))
    if on_grid:
        bs_angles[:, 0] = [snap_to_grid(phi, config.G_t) for phi in bs_angles[:, 0]]
    bs_ris = tuple(
        BsRisPath(gain=complex(a), aod=float(aod), aoa_azimuth=float(az), aoa_elevation=float(el))
        for a, (aod, az, el) in zip(alpha, bs_angles)
    )

    beta = crandn(rng, config.K, config.L2, variance=1 / config.L2)
    ue_angles = rng.uniform(-half_pi, half_pi, size=(config.K, config.L2, 2))
    ris_ue = tuple(
        tuple(RisUePath(gain=complex(beta[k, j]), aod_azimuth=float(ue_angles[k, j, 0]),
                        aod_elevation=float(ue_angles[k, j, 1]))
              for j in range(config.L2))
        for k in range(config.K)
    )
    return PathSet(bs_ris_paths=bs_ris, ris_ue_paths=ris_ue)


def cascaded_matrix(paths: PathSet, k, config: SystemConfig):
    """ H_k = sum_i sum_j g_{i,k,j} b(cascaded AoA) a^H(AoD_i) """
    H = np.zeros((config.N, config.M), dtype=complex)
    for i, bs_ris in enumerate(paths.bs_ris_paths):
        a = ula_steering(bs_ris.aod, config.M, config.d_B_over_lambda)
        column = sum(
            paths.cascaded_gain(i, k, j) * cascaded_steering(ris_ue, bs_ris, config)
            for j, ris_ue in enumerate(paths.ris_ue_paths[k])
        )
        H += np.outer(column, np.conj(a))
    return H


def build_cascaded_channel(paths: PathSet, k, config: SystemConfig, rng: Optional[np.random.Generator] = None):
    """
    Build user k's CascadedChannel.
    The direct channel is drawn CN(0, 1/M) per entry from rng (a generator seeded by (rng_seed, k) if omitted),
        or zero when config.direct_channel is off.
    """
    if not 0 <= k < config.K:
        raise IndexError('User {k} out of range for K={K}.'.format(k=k, K=config.K))
    rng = rng if rng is not None else np.random.default_rng([config.rng_seed, k])
    h_d = crandn(rng, config.M, variance=1 / config.M) if config.direct_channel else \
        np.zeros(config.M, dtype=complex)
    return CascadedChannel(H=cascaded_matrix(paths, k, config), h_d=h_d, source_paths=paths, user=k)


def build_channels(paths: PathSet, config: SystemConfig, rng: Optional[np.random.Generator] = None):
    """ Build the CascadedChannel of every user from one PathSet """
    return [build_cascaded_channel(paths, k, config, rng) for k in range(config.K)]


def bs_ris_channel(paths: PathSet, config: SystemConfig):
    """ User-independent BS-RIS channel G (N x M) """
    G = np.zeros((config.N, config.M), dtype=complex)
    for p in paths.bs_ris_paths:
        b1 = upa_steering(p.aoa_azimuth, p.aoa_elevation, config.N1, config.N2, config.d_R_over_lambda)
        a = ula_steering(p.aod, config.M, config.d_B_over_lambda)
        G += p.gain * np.outer(b1, np.conj(a))
    return G


def ris_ue_channel(paths: PathSet, k, config: SystemConfig):
    """ User k's RIS-UE channel as the row vector h_r^H (length N) """
    return sum(
        p.gain * np.conj(upa_steering(p.aod_azimuth, p.aod_elevation, config.N1, config.N2, config.d_R_over_lambda))
        for p in paths.ris_ue_paths[k]
    )


def check_phases(phi, tolerance=1e-9):
    """ Raise InvalidPhaseConfiguration unless every RIS phase entry has unit modulus """
    phi = np.asarray(phi)
    if np.any(np.abs(np.abs(phi) - 1) > tolerance):
        raise InvalidPhaseConfiguration('RIS phase entries must have unit modulus.')
    return phi


def effective_downlink_channel(channel: CascadedChannel, phi):
    """ h_DL^H = h_d^H + phi^T H, returned as a length-M row """
    phi = check_phases(phi)
    return np.conj(channel.h_d) + phi @ channel.H
