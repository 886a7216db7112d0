"""
Utility functions and classes
"""
import re

import numpy as np


id_separators = re.compile(r'[_\-.]')


def id_to_camel(name):
    """ Convert arbitrary identifier using dot or snake notation into CamelCase """
    return ''.join(el[:1].capitalize() + el[1:] for el in re.split(id_separators, name))


def index_bits(count):
    """ Number of bits needed to address one of count items, i.e. ceil(log2(count)), 0 for a single item """
    return (int(count) - 1).bit_length()


def nearest_level(x, low, step, levels):
    """
    Index of the uniform level closest to x, levels centred at low + step*(q + 0.5), q = 0..levels-1.
    Exact midpoints go to the lower index; values outside the range clamp to the end levels.
    Works elementwise on arrays.
    """
    t = (np.asarray(x, dtype=float) - low) / step - 0.5
    q = np.ceil(t - 0.5).astype(int)
    return np.clip(q, 0, levels - 1)


def crandn(rng, *shape, variance=1.0):
    """ i.i.d. circularly-symmetric complex Gaussian samples CN(0, variance) """
    scale = np.sqrt(variance / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
