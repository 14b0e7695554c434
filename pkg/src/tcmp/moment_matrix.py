"""
Hermitian moment matrices ``M(n)`` and their positivity / rank analysis.

Rows and columns are indexed by the monomials of total degree <= n in
degree-lex order.  The entry in row ``zbar^k z^l`` and column ``zbar^i z^j``
is ``gamma[i+l, j+k]``, so that ``<M p, q> = q^H M p = riesz(p * conj(q))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DegreeTooHigh, LevelMismatch
from .polynomials import BivarPoly, basis_size, monomials

__all__ = [
    "MomentMatrix",
    "PsdReport",
    "build",
    "bilinear",
    "apply",
    "psd_check",
    "flat_extension_check",
    "psd_power_collapse_test",
    "first_psd_failure",
    "PSD_TOL",
]

PSD_TOL = 1e-9


@dataclass(frozen=True)
class MomentMatrix:
    n: int
    entries: np.ndarray = field(repr=False)
    source: object = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return basis_size(self.n)

    def block(self, n: int) -> "MomentMatrix":
        """Leading principal block ``M(n)`` for ``n <= self.n``."""
        if n > self.n:
            raise LevelMismatch(f"cannot take level {n} block of M({self.n})")
        m = basis_size(n)
        sub = self.entries[:m, :m].copy()
        sub.setflags(write=False)
        return MomentMatrix(n, sub, self.source)

    def entry(self, row, col) -> complex:
        """Entry at row monomial ``(k, l)`` and column monomial ``(i, j)``."""
        from .polynomials import degree_lex_index

        return complex(self.entries[degree_lex_index(row), degree_lex_index(col)])


def build(source, n: int) -> MomentMatrix:
    """
    Fill ``M(n)`` from any object exposing ``gamma(i, j)``.

    Raises :class:`~tcmp.errors.MissingMoment` when an explicit table is too
    short.
    """
    mons = monomials(n)
    m = len(mons)
    out = np.empty((m, m), dtype=complex)
    for p, (k, l) in enumerate(mons):
        for q in range(p, m):
            i, j = mons[q]
            v = source.gamma(i + l, j + k)
            out[p, q] = v
            out[q, p] = np.conj(v)
    for p in range(m):
        out[p, p] = out[p, p].real
    out.setflags(write=False)
    return MomentMatrix(n, out, source)


def bilinear(M: MomentMatrix, p: BivarPoly, q: BivarPoly) -> complex:
    """``q^H M p``, which equals ``riesz(p * conj(q))``."""
    return complex(np.vdot(q.vector(M.n), M.entries @ p.vector(M.n)))


def apply(M: MomentMatrix, p: BivarPoly) -> np.ndarray:
    return M.entries @ p.vector(M.n)


@dataclass(frozen=True)
class PsdReport:
    is_psd: bool
    min_eigenvalue: float
    max_eigenvalue: float
    rank: int
    tolerance: float  # absolute threshold actually used
    eigenvalues: np.ndarray = field(repr=False, compare=False, default=None)
    level: int | None = None


def psd_check(M: MomentMatrix, tol: float = PSD_TOL) -> PsdReport:
    """
    Eigenvalue-based PSD and rank test.

    With ``t = tol * max(1, |lambda|_max)`` the matrix counts as PSD when
    ``lambda_min >= -t`` and its rank is the number of eigenvalues above ``t``.
    """
    w = linalg.eigvalsh(M.entries)
    top = float(np.max(np.abs(w)))
    t = tol * max(1.0, top)
    return PsdReport(
        is_psd=bool(w[0] >= -t),
        min_eigenvalue=float(w[0]),
        max_eigenvalue=float(w[-1]),
        rank=int(np.sum(w > t)),
        tolerance=t,
        eigenvalues=w,
        level=M.n,
    )


def first_psd_failure(M: MomentMatrix, tol: float = PSD_TOL):
    """
    Check the leading blocks ``M(0), M(1), ..., M(n)`` in turn.

    Returns ``(report_of_full_matrix, failing_report_or_None)``.  Since PSD
    passes to principal submatrices, the first failing block is the smallest
    witness of indefiniteness.
    """
    full = psd_check(M, tol)
    if full.is_psd:
        return full, None
    for n in range(M.n + 1):
        rep = psd_check(M.block(n), tol)
        if not rep.is_psd:
            return full, rep
    return full, full


def flat_extension_check(Mn: MomentMatrix, Mn1: MomentMatrix, tol: float = PSD_TOL) -> bool:
    """True when ``Mn1`` is PSD and has the same rank as ``Mn``."""
    if Mn1.n != Mn.n + 1:
        raise LevelMismatch(f"expected levels n and n+1, got {Mn.n} and {Mn1.n}")
    big = psd_check(Mn1, tol)
    if not big.is_psd:
        return False
    small = psd_check(Mn, tol)
    return small.rank == big.rank


def _vanishes(M: MomentMatrix, vec: np.ndarray, tol: float) -> bool:
    out = M.entries @ vec
    scale = (1.0 + np.max(np.abs(M.entries))) * max(1.0, np.max(np.abs(vec)))
    return bool(np.max(np.abs(out)) <= tol * scale)


def psd_power_collapse_test(M: MomentMatrix, p: BivarPoly, n_pow: int, tol: float = 1e-8) -> bool:
    """
    Numerical check of ``M p^k = 0  =>  M p = 0`` for a PSD moment matrix.

    Returns True when the implication held (vacuously when ``M p^k`` is not
    zero).
    """
    q = p**n_pow
    if q.degree > M.n:
        raise DegreeTooHigh(f"p^{n_pow} has degree {q.degree} > {M.n}")
    if not _vanishes(M, q.vector(M.n), tol):
        return True
    return _vanishes(M, p.vector(M.n), tol)
