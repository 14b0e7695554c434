import numpy as np
import pytest

from tcmp.polynomials import ZBAR, Z
from tcmp.rdis import Rdis
from tcmp.solver import AtomicMeasure

WORKED_ATOMS = ((-1 + 0j, 0.5), (1 + 2j, 0.25), (1 - 2j, 0.25))


def worked_closed_form(i, j):
    return (-1) ** (i + j) / 2 + 0.5 * ((1 - 2j) ** i * (1 + 2j) ** j).real


@pytest.fixture
def worked():
    """Sequence with gamma_00 = 1, gamma_01 = 0, gamma_11 = 3 and P = z^2 + 2 zbar + 1."""
    return Rdis.from_entries({(0, 0): 1, (0, 1): 0, (1, 1): 3}, Z**2 + 2 * ZBAR + 1)


@pytest.fixture
def worked_measure():
    return AtomicMeasure.from_pairs(WORKED_ATOMS)


def random_measure(rng, max_atoms=7, radius=3.0, sep=0.3, n=None):
    """Random atomic measure in the closed disk with well separated atoms."""
    n = int(rng.integers(1, max_atoms + 1)) if n is None else n
    while True:
        z = radius * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        if n == 1 or min(abs(a - b) for k, a in enumerate(z) for b in z[k + 1 :]) > sep:
            break
    return AtomicMeasure(tuple(z), tuple(rng.uniform(0.1, 2.0, n)))


def hausdorff(a, b):
    a, b = np.asarray(a), np.asarray(b)
    d = np.abs(a[:, None] - b[None, :])
    return max(d.min(axis=1).max(), d.min(axis=0).max())
