"""Truncated complex moment problems with a column relation."""

from .errors import *  # noqa: F401,F403
from .polynomials import BivarPoly, Monomial, ONE, Z, ZBAR, reduce_degrees
from .rdis import InitialBlock, MomentTable, Rdis, is_characteristic, riesz
from .moment_matrix import MomentMatrix, PsdReport, bilinear, build, psd_check

__version__ = "0.1.0"
