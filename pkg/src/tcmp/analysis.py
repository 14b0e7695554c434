"""
Zero sets and characteristic-polynomial analysis.

Univariate polynomials in ``z`` are ascending numpy coefficient arrays
(``c[0] + c[1] z + ...``), matching :mod:`numpy.polynomial.polynomial`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import linalg

from .errors import (
    DuplicateRoots,
    InvariantViolation,
    NotAnalytic,
    NotCharacteristic,
    ZeroPolynomial,
)
from .moment_matrix import build, psd_check
from .polynomials import ONE, ZBAR, BivarPoly, Z, degree_lex_index, monomials
from .rdis import MEMBERSHIP_TOL, Rdis, is_characteristic

__all__ = [
    "CubicParams",
    "ZeroSet",
    "XiData",
    "CubicRegion",
    "harmonic_cubic_zeros",
    "cubic_region",
    "analytic_roots",
    "product_from_roots",
    "compute_xi",
    "minimal_analytic_charpoly",
    "minimal_divisor",
    "minimal_analytic_roots",
    "membership_level",
    "lagrange_basis",
    "flat_atoms",
    "recover_support",
    "rotate_poly",
    "ROOT_MERGE_TOL",
]

ROOT_MERGE_TOL = 1e-7
ROTATION = np.exp(-0.25j * np.pi)  # w = ROTATION * z for the (t, u) form


# ---------------------------------------------------------------------------
# harmonic cubics


@dataclass(frozen=True)
class CubicParams:
    """
    Harmonic cubic ``z^3 + a z + b zbar``.

    With ``rotated=True`` the polynomial is read in the original variable
    ``w`` of ``w^3 = i t w + u wbar``; ``z = w / ROTATION`` then satisfies
    ``z^3 + t z + u zbar = 0``, so ``a, b`` hold ``t, u``.
    """

    a: float
    b: float
    rotated: bool = False

    @classmethod
    def from_tu(cls, t: float, u: float) -> "CubicParams":
        return cls(float(t), float(u), rotated=True)

    @property
    def t(self) -> float:
        return self.a

    @property
    def u(self) -> float:
        return self.b

    @property
    def charpoly(self) -> BivarPoly:
        if self.rotated:
            return Z**3 - 1j * self.t * Z - self.u * ZBAR
        return Z**3 + self.a * Z + self.b * ZBAR

    @property
    def relation(self) -> dict:
        """Coefficients ``a_nm`` of the column relation ``Z^3 = sum a_nm Zbar^n Z^m``."""
        if self.rotated:
            return {(0, 1): 1j * self.t, (1, 0): complex(self.u)}
        return {(0, 1): complex(-self.a), (1, 0): complex(-self.b)}


@dataclass(frozen=True)
class ZeroSet:
    points: tuple
    multiplicities: tuple = None

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.multiplicities is None:
            object.__setattr__(self, "multiplicities", (1,) * len(pts))

    @property
    def count(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    def with_multiplicity(self) -> list[complex]:
        return [p for p, m in zip(self.points, self.multiplicities) for _ in range(m)]


def _merge_tol(points) -> float:
    mags = [abs(p) for p in points]
    return ROOT_MERGE_TOL * (1 + max(mags, default=0.0))


def _dedup(points: Sequence[complex]) -> ZeroSet:
    tol = _merge_tol(points)
    clusters: list[list[complex]] = []
    for p in points:
        for c in clusters:
            if abs(c[0] - p) < tol:
                c.append(p)
                break
        else:
            clusters.append([p])
    pts = [complex(np.mean(c)) for c in clusters]
    return ZeroSet(tuple(pts), tuple(len(c) for c in clusters))


def harmonic_cubic_zeros(params: CubicParams) -> ZeroSet:
    """
    All zeros of ``z^3 + a z + b zbar`` from the real system

        x (x^2 - 3 y^2 + a + b) = 0,   y (3 x^2 - y^2 + a - b) = 0.

    Branches: ``y = 0`` gives ``x^2 = -a - b``; ``x = 0`` gives ``y^2 = a - b``;
    ``x y != 0`` gives ``x^2 = (2b - a)/4`` and ``y^2 = (a + 2b)/4``.  A branch
    contributes only when its radicands are strictly positive; the origin is
    always a zero.
    """
    a, b = params.a, params.b
    pts = [0j]
    if -a - b > 0:
        x = math.sqrt(-a - b)
        pts += [complex(x, 0), complex(-x, 0)]
    if a - b > 0:
        y = math.sqrt(a - b)
        pts += [complex(0, y), complex(0, -y)]
    x2, y2 = (2 * b - a) / 4, (a + 2 * b) / 4
    if x2 > 0 and y2 > 0:
        x, y = math.sqrt(x2), math.sqrt(y2)
        pts += [complex(sx * x, sy * y) for sx in (1, -1) for sy in (1, -1)]
    zs = _dedup(pts)
    if params.rotated:
        return ZeroSet(tuple(ROTATION * p for p in zs.points), zs.multiplicities)
    return zs


@dataclass(frozen=True)
class CubicRegion:
    """
    One row of the root-count tables for ``z^3 + a z + b zbar``.

    ``table_count`` is the count printed in the tables.  ``h`` is the row's
    auxiliary polynomial (``None`` for the origin-only row), ``multipliers``
    the polynomials ``m`` with ``riesz(m h) = 0`` required, and ``level`` the
    moment-matrix level whose positivity is required.
    """

    name: str
    table: int
    table_count: int
    h: BivarPoly | None
    multipliers: tuple = field(default=())
    level: int = 3


def cubic_region(a: float, b: float) -> CubicRegion:
    """Classify ``(a, b)`` into its table row, using the printed inequalities."""
    if b > 0:
        if 2 * b <= a:
            return CubicRegion("2b<=a", 1, 3, Z + ZBAR, (ONE, Z, Z**2), 2)
        if b < a < 2 * b:
            return CubicRegion("b<a<2b", 1, 7, (Z + ZBAR) * (Z * ZBAR - b), (ONE, Z), 3)
        if -b <= a <= b:
            return CubicRegion("-b<=a<=b", 1, 1, Z, (ONE, Z, ZBAR, ZBAR * Z, ZBAR**2 * Z), 2)
        if b < -a < 2 * b:
            return CubicRegion("b<-a<2b", 1, 7, (Z - ZBAR) * (Z * ZBAR - b), (ONE, Z), 3)
        return CubicRegion("a<=-2b", 1, 3, Z - ZBAR, (ONE, Z, Z**2), 2)
    if b < 0:
        if -b <= a:
            return CubicRegion("-b<=a", 2, 3, Z + ZBAR, (ONE, Z, Z**2), 2)
        if abs(a) < -b:
            return CubicRegion(
                "|a|<-b", 2, 5, Z**2 * ZBAR + a * ZBAR + b * Z, (ONE, Z, ZBAR), 3
            )
        return CubicRegion("a<=b", 2, 3, Z - ZBAR, (ONE, Z, Z**2), 2)
    n = 1 if a == 0 else 3
    return CubicRegion("b=0", 0, n, None, (), 2)


def rotate_poly(p: BivarPoly, phase: complex) -> BivarPoly:
    """Substitute ``z -> phase * z`` (``|phase| = 1``) into ``p``."""
    return BivarPoly({m: c * phase ** (m.j - m.i) for m, c in p.items()})


# ---------------------------------------------------------------------------
# analytic polynomials


def _as_coeffs(q) -> np.ndarray:
    if isinstance(q, BivarPoly):
        if not q.is_analytic:
            raise NotAnalytic(f"{q} contains zbar")
        q = q.univariate()
    c = np.atleast_1d(np.asarray(q, dtype=complex))
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ZeroPolynomial("zero polynomial has no finite root set")
    return c[: nz[-1] + 1]


def _polish(c: np.ndarray, root: complex, steps: int = 3) -> complex:
    dc = npoly.polyder(c)
    for _ in range(steps):
        f = npoly.polyval(root, c)
        g = npoly.polyval(root, dc)
        if g == 0:
            break
        step = f / g
        new = root - step
        if abs(npoly.polyval(new, c)) >= abs(f):
            break
        root = new
    return root


def analytic_roots(q) -> ZeroSet:
    """
    Roots of a univariate polynomial as companion-matrix eigenvalues.

    Nearby eigenvalues are merged (recording multiplicity) and simple roots
    get a few Newton steps.
    """
    c = _as_coeffs(q)
    if len(c) == 1:
        return ZeroSet(())
    c = c / c[-1]
    if len(c) == 2:
        raw = [-c[0]]
    else:
        raw = list(linalg.eigvals(npoly.polycompanion(c)))
    zs = _dedup(raw)
    pts = [
        _polish(c, p) if m == 1 else p for p, m in zip(zs.points, zs.multiplicities)
    ]
    return ZeroSet(tuple(pts), zs.multiplicities)


def product_from_roots(zeros) -> np.ndarray:
    """Monic ascending coefficients of ``prod (z - lambda)`` (multiplicity kept)."""
    pts = zeros.with_multiplicity() if isinstance(zeros, ZeroSet) else list(zeros)
    if not pts:
        return np.array([1.0 + 0j])
    return np.asarray(npoly.polyfromroots(pts), dtype=complex)


def lagrange_basis(zeros) -> list[BivarPoly]:
    """Analytic interpolation polynomials ``L_j`` with ``L_j(lambda_k) = delta_jk``."""
    pts = list(zeros.points if isinstance(zeros, ZeroSet) else zeros)
    tol = _merge_tol(pts)
    for p, q in itertools.combinations(pts, 2):
        if abs(p - q) < tol:
            raise DuplicateRoots(f"roots {p} and {q} coincide within {tol:.1e}")
    out = []
    for j, lj in enumerate(pts):
        others = pts[:j] + pts[j + 1 :]
        num = npoly.polyfromroots(others) if others else np.array([1.0])
        den = np.prod([lj - o for o in others]) if others else 1.0
        out.append(BivarPoly.from_univariate(np.asarray(num, dtype=complex) / den))
    return out


# ---------------------------------------------------------------------------
# truncation level


@dataclass(frozen=True)
class XiData:
    d_h: int
    A_h: tuple
    c1: float
    c1p: float
    c2: float
    c2p: float
    c: float
    alpha_c: int
    xi: int


def compute_xi(h: BivarPoly, r: int) -> XiData:
    """
    Level ``xi = 2r - 2 - alpha_c`` at which positivity of ``M(xi)`` settles
    positivity of the whole moment matrix.

    ``h`` is the reduced remainder of ``Q`` modulo ``P`` (degree ``r`` in z).
    ``A_h`` are the top-degree monomials of ``h``; ``c1``/``c1p`` the largest
    z / zbar exponent in ``A_h``, ``c2``/``c2p`` the runner-up after removing
    that monomial (``-inf`` if ``A_h`` is a singleton).  The side with the
    larger leading exponent decides ``alpha``; on a tie the smaller of the two
    candidate values is used.  A zero ``h`` gives ``alpha_c = 0``.
    """
    if h.is_zero():
        ninf = float("-inf")
        return XiData(-1, (), ninf, ninf, ninf, ninf, ninf, 0, 2 * r - 2)
    if h.deg_z >= r or h.deg_zbar >= r:
        raise ValueError(f"h must have partial degrees < {r}, got {h}")
    d_h = h.degree
    A = tuple(sorted((m for m, _ in h.items() if m.i + m.j == d_h), key=degree_lex_index))
    c1 = max(m.j for m in A)
    c1p = max(m.i for m in A)
    if len(A) == 1:
        c2 = c2p = float("-inf")
    else:
        c2 = max(m.j for m in A if m != (d_h - c1, c1))
        c2p = max(m.i for m in A if m != (c1p, d_h - c1p))
    alpha_z = min(r - c1, c1 - c2)
    alpha_zb = min(r - c1p, c1p - c2p)
    if c1 > c1p:
        alpha = alpha_z
    elif c1p > c1:
        alpha = alpha_zb
    else:
        alpha = min(alpha_z, alpha_zb)
    alpha = int(alpha)
    return XiData(d_h, A, c1, c1p, c2, c2p, max(c1, c1p), alpha, 2 * r - 2 - alpha)


# ---------------------------------------------------------------------------
# minimal analytic characteristic polynomial


def membership_level(s) -> int:
    """Exhaustive membership level ``2d - 2`` for an :class:`Rdis` of degree ``d``."""
    if not isinstance(s, Rdis):
        raise TypeError("membership level is only defined for an Rdis")
    return 2 * s.degree - 2


def minimal_divisor(
    s, zeros: ZeroSet, level: int, tol: float = MEMBERSHIP_TOL, weighted: bool = False
):
    """
    Smallest-degree monic divisor ``prod (z - lambda)^e`` of the polynomial
    with root multiset ``zeros`` that passes :func:`is_characteristic`.

    Returns ``(coeffs, ZeroSet)``; ``None`` when no divisor passes.
    """
    pts, mult = zeros.points, zeros.multiplicities
    total = sum(mult)
    for size in range(1, total + 1):
        passing = []
        for exps in itertools.product(*(range(m + 1) for m in mult)):
            if sum(exps) != size:
                continue
            roots = [p for p, e in zip(pts, exps) for _ in range(e)]
            coeffs = np.asarray(npoly.polyfromroots(roots), dtype=complex)
            mem = is_characteristic(
                s, BivarPoly.from_univariate(coeffs), level, tol, weighted=weighted
            )
            if mem.ok:
                sub = ZeroSet(
                    tuple(p for p, e in zip(pts, exps) if e),
                    tuple(e for e in exps if e),
                )
                passing.append((coeffs, sub))
        if passing:
            passing.sort(key=lambda cs: [(v.real, v.imag) for v in cs[0]])
            return passing[0]
    return None


def minimal_analytic_charpoly(
    s, P, level: int | None = None, tol: float = MEMBERSHIP_TOL, weighted: bool = False
) -> np.ndarray:
    """
    Minimal monic analytic characteristic polynomial among the divisors of
    the analytic characteristic polynomial ``P``.

    Raises :class:`NotCharacteristic` when ``P`` itself fails the test.  When
    ``M(level)`` is PSD the result must have simple roots; a repeated root
    then raises :class:`InvariantViolation`.
    """
    coeffs, _ = minimal_analytic_roots(s, P, level, tol, weighted)
    return coeffs


def minimal_analytic_roots(s, P, level=None, tol=MEMBERSHIP_TOL, weighted=False):
    """As :func:`minimal_analytic_charpoly` but returns ``(coeffs, ZeroSet)``."""
    c = _as_coeffs(P)
    if level is None:
        level = membership_level(s)
    mem = is_characteristic(s, BivarPoly.from_univariate(c), level, tol, weighted=weighted)
    if not mem.ok:
        raise NotCharacteristic(
            f"P is not a characteristic polynomial of the sequence (residual {mem.residual:.2e})"
        )
    found = minimal_divisor(s, analytic_roots(c), level, tol, weighted)
    if found is None:
        raise NotCharacteristic("no divisor of P passed; root extraction too inaccurate")
    coeffs, zs = found
    if any(m > 1 for m in zs.multiplicities) and psd_check(build(s, level)).is_psd:
        raise InvariantViolation(f"PSD sequence with repeated roots in minimal polynomial {zs}")
    return coeffs, zs


# ---------------------------------------------------------------------------
# support recovery from a flat moment matrix


def flat_atoms(s, max_level: int) -> ZeroSet | None:
    """
    Candidate atoms of a PSD sequence of finite rank.

    Finds the lowest ``n <= max_level`` with ``rank M(n-1) = rank M(n)``,
    factors ``M(n) = W W^H`` on its range and solves ``W[z m] = W[m] N`` over
    rows of degree <= n-1; the eigenvalues of ``N`` are the conjugated atoms.
    Returns ``None`` when no such level exists, a block is not PSD or two
    atoms merge.
    """
    prev_rank = None
    for n in range(0, max_level + 1):
        M = build(s, n)
        rep = psd_check(M)
        if not rep.is_psd:
            return None
        if prev_rank is not None and rep.rank == prev_rank:
            break
        prev_rank = rep.rank
    else:
        return None
    r = rep.rank
    w, U = linalg.eigh(M.entries)
    W = U[:, -r:] * np.sqrt(w[-r:])
    low = monomials(n - 1)
    rows = [degree_lex_index(m) for m in low]
    shifted = [degree_lex_index((m.i, m.j + 1)) for m in low]
    N, *_ = linalg.lstsq(W[rows], W[shifted])
    zs = _dedup(list(np.conj(linalg.eigvals(N))))
    if any(m > 1 for m in zs.multiplicities):
        return None
    return zs


def recover_support(
    s, max_level: int, tol: float = MEMBERSHIP_TOL, weighted: bool = True, sequence=None
):
    """
    Atoms from :func:`flat_atoms`, accepted only if the monic polynomial with
    these roots passes :func:`is_characteristic` at the exhaustive level of
    ``sequence`` (an :class:`Rdis`, defaulting to ``s``).  Passing an explicit
    table as ``s`` and its recursive extension as ``sequence`` keeps the
    factorisation on measured data only.

    Returns ``(coeffs, ZeroSet)`` or ``None``.
    """
    seq = s if sequence is None else sequence
    level = membership_level(seq)
    zs = flat_atoms(s, max_level)
    if zs is None:
        return None
    coeffs = product_from_roots(zs)
    if not is_characteristic(seq, BivarPoly.from_univariate(coeffs), level, tol, weighted).ok:
        return None
    return coeffs, zs
