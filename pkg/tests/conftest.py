import numpy as np
import pytest
import scipy.linalg as sla

from geoprec._rng import substream
from geoprec.group import GroupElement, LieDirection


def complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def hermitian(rng, n):
    M = complex_gaussian(rng, (n, n))
    return 0.5 * (M + M.conj().T)


def random_unitary(rng, n):
    q, r = np.linalg.qr(complex_gaussian(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def block_hermitian(rng, blocks, size):
    """Hermitian matrix supported on the scheme's block pattern."""
    out = np.zeros((size, size), dtype=complex)
    for a, b in blocks:
        out[a:b, a:b] = hermitian(rng, b - a)
    return out


def random_direction(rng, scheme, norm=None):
    H1 = block_hermitian(rng, scheme.left_blocks, scheme.m)
    H2 = None
    if scheme.side == "both":
        H2 = block_hermitian(rng, scheme.right_blocks, scheme.n)
    d = LieDirection(scheme, H1, H2)
    if norm is not None:
        d = d.scaled(norm / d.norm)
    return d


def random_element(rng, scheme, spread=0.5):
    """Random Hermitian PD block-diagonal group element."""
    X = sla.expm(spread * block_hermitian(rng, scheme.left_blocks, scheme.m))
    Y = None
    if scheme.side == "both":
        Y = sla.expm(spread * block_hermitian(rng, scheme.right_blocks, scheme.n))
    return GroupElement(scheme, X, Y)


def rng_for(*key):
    return substream(20240817, *key)


@pytest.fixture
def example1_matrix():
    """The 3x3 triangular worked example whose Jacobi scalings worsen kappa."""
    return np.array([[3, 0, 0], [1, 1, 0], [0, 3, 1]], dtype=complex)
