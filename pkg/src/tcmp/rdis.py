"""
Doubly indexed sequences ``gamma[i, j]`` (moment of ``zbar^i z^j``).

Two sources are provided:

* :class:`MomentTable` -- an explicit, finite table ``i + j <= degree``;
* :class:`Rdis` -- a recursive doubly indexed sequence, generated from an
  initial block ``{gamma_ij : 0 <= i <= j <= r}`` and a characteristic
  polynomial ``z^(r+1) - sum a_lk zbar^l z^k`` (``l + k <= r``).

Both expose ``gamma(i, j)`` and can be fed to :func:`riesz` and to the
moment-matrix builder.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .errors import InvariantViolation, MalformedCharPoly, MissingMoment, TcmpError
from .polynomials import BivarPoly, charpoly_tail

__all__ = [
    "InitialBlock",
    "MomentTable",
    "Rdis",
    "Membership",
    "riesz",
    "is_characteristic",
    "MEMBERSHIP_TOL",
]

MEMBERSHIP_TOL = 1e-8


def _check_hermitian_diagonal(entries, what):
    g00 = complex(entries.get((0, 0), np.nan))
    if not np.isfinite(g00.real) or g00.real <= 0 or abs(g00.imag) > 1e-12 * abs(g00):
        raise TcmpError(f"{what}: gamma_00 must be real and positive, got {g00}")


@dataclass(frozen=True)
class MomentTable:
    """
    Truncated moment table ``{gamma_ij : i + j <= degree}``.

    Entries are stored for ``i <= j`` only; the lower triangle is read back by
    conjugation, so the table is Hermitian by construction.
    """

    degree: int
    upper: Mapping = field(repr=False)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.upper.items():
            if i > j:
                continue
            if i + j > self.degree:
                continue
            clean[(int(i), int(j))] = complex(v)
        object.__setattr__(self, "upper", clean)

    @classmethod
    def from_entries(cls, degree: int, entries: Mapping, check=True, tol=1e-9):
        """Build from a mapping that may contain both triangles."""
        upper = {}
        for (i, j), v in entries.items():
            if i <= j:
                upper[(i, j)] = complex(v)
        if check:
            for (i, j), v in entries.items():
                if i > j and (j, i) in upper:
                    ref = upper[(j, i)]
                    if abs(np.conj(ref) - v) > tol * (1 + abs(v)):
                        raise TcmpError(
                            f"entry ({i},{j}) = {v} is not the conjugate of ({j},{i}) = {ref}"
                        )
                if i == j and abs(complex(v).imag) > tol * (1 + abs(v)):
                    raise TcmpError(f"diagonal entry ({i},{i}) = {v} is not real")
        return cls(degree, upper)

    @classmethod
    def from_function(cls, degree: int, fn: Callable[[int, int], complex]):
        upper = {
            (i, d - i): complex(fn(i, d - i))
            for d in range(degree + 1)
            for i in range(d // 2 + 1)
        }
        return cls(degree, upper)

    def gamma(self, i: int, j: int) -> complex:
        if i > j:
            return np.conj(self.gamma(j, i))
        try:
            return self.upper[(i, j)]
        except KeyError:
            raise MissingMoment(f"moment ({i},{j}) not in table of degree {self.degree}") from None

    __call__ = gamma

    def missing(self) -> list[tuple[int, int]]:
        return [
            (i, d - i)
            for d in range(self.degree + 1)
            for i in range(d // 2 + 1)
            if (i, d - i) not in self.upper
        ]

    def truncate(self, degree: int) -> "MomentTable":
        return MomentTable(degree, {k: v for k, v in self.upper.items() if sum(k) <= degree})

    def replace(self, i: int, j: int, value) -> "MomentTable":
        """Copy with one entry changed (and its conjugate partner)."""
        if i > j:
            i, j, value = j, i, np.conj(value)
        upper = dict(self.upper)
        upper[(i, j)] = complex(value)
        return MomentTable(self.degree, upper)

    def max_abs(self, degree: int | None = None) -> float:
        top = self.degree if degree is None else degree
        return max((abs(v) for k, v in self.upper.items() if sum(k) <= top), default=0.0)

    def rotated(self, phase: complex) -> "MomentTable":
        """Moments of the pushed-forward measure under ``z -> phase * z``, |phase| = 1."""
        return MomentTable(
            self.degree,
            {(i, j): v * phase ** (j - i) for (i, j), v in self.upper.items()},
        )


@dataclass(frozen=True)
class InitialBlock:
    """
    Initial conditions ``{gamma_ij : 0 <= i <= j <= r}``.

    ``square`` is the completed ``(r+1) x (r+1)`` Hermitian array.
    """

    r: int
    square: np.ndarray = field(repr=False)

    @classmethod
    def from_entries(cls, r: int, entries: Mapping) -> "InitialBlock":
        _check_hermitian_diagonal(entries, "initial block")
        sq = np.zeros((r + 1, r + 1), dtype=complex)
        for i in range(r + 1):
            for j in range(i, r + 1):
                if (i, j) not in entries:
                    raise MissingMoment(f"initial block lacks ({i},{j})")
                v = complex(entries[(i, j)])
                if i == j:
                    v = complex(v.real, 0.0)
                sq[i, j] = v
                sq[j, i] = np.conj(v)
        sq.setflags(write=False)
        return cls(r, sq)

    @classmethod
    def from_source(cls, r: int, source) -> "InitialBlock":
        return cls.from_entries(
            r, {(i, j): source.gamma(i, j) for i in range(r + 1) for j in range(i, r + 1)}
        )

    def entries(self) -> dict:
        return {
            (i, j): complex(self.square[i, j])
            for i in range(self.r + 1)
            for j in range(i, self.r + 1)
        }


class Rdis:
    """
    Recursive doubly indexed sequence.

    ``gamma(i, j)`` with ``i <= j`` is read from the initial block when
    ``j <= r`` and otherwise obtained from the recursion::

        gamma[i, n+1] = sum_{l+k <= r} a_lk gamma[i+l, n+k-r]

    with ``n = j - 1``; cells with ``i > j`` are conjugates of their mirror.
    Each recursion step lowers the total index ``i + j`` by at least one, so
    generation terminates.  Values are memoised.
    """

    def __init__(self, init: InitialBlock, charpoly: BivarPoly):
        d, tail = charpoly_tail(charpoly)
        if d != init.r + 1:
            raise MalformedCharPoly(
                f"characteristic polynomial has degree {d}, initial block needs {init.r + 1}"
            )
        self.init = init
        self.charpoly = charpoly
        self._coeffs = [((m.i, m.j), c) for m, c in tail.items()]
        self._memo: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def from_entries(cls, entries: Mapping, charpoly: BivarPoly) -> "Rdis":
        d = charpoly.deg_z
        return cls(InitialBlock.from_entries(d - 1, entries), charpoly)

    @classmethod
    def from_source(cls, source, charpoly: BivarPoly) -> "Rdis":
        d = charpoly.deg_z
        return cls(InitialBlock.from_source(d - 1, source), charpoly)

    @property
    def r(self) -> int:
        return self.init.r

    @property
    def degree(self) -> int:
        """Degree in z of the characteristic polynomial, ``r + 1``."""
        return self.init.r + 1

    @property
    def coefficients(self) -> dict:
        """The recursion coefficients ``a_lk`` keyed by ``(l, k)``."""
        return dict(self._coeffs)

    def gamma(self, i: int, j: int) -> complex:
        if i < 0 or j < 0:
            raise IndexError(f"negative index ({i},{j})")
        if i > j:
            return np.conj(self.gamma(j, i))
        r = self.init.r
        if j <= r:
            return complex(self.init.square[i, j])
        key = (i, j)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        shift = j - 1 - r
        total = 0j
        for (l, k), a in self._coeffs:
            u, v = i + l, shift + k
            if u + v >= i + j:
                raise InvariantViolation(f"recursion did not lower degree at ({i},{j})")
            total += a * self.gamma(u, v)
        with self._lock:
            self._memo.setdefault(key, total)
        return total

    __call__ = gamma

    def table(self, degree: int) -> MomentTable:
        return MomentTable.from_function(degree, self.gamma)

    def __repr__(self):
        return f"Rdis(r={self.r}, charpoly={self.charpoly})"


def riesz(s, p: BivarPoly) -> complex:
    """Riesz functional: ``sum c_ij zbar^i z^j -> sum c_ij gamma_ij``."""
    return complex(sum(c * s.gamma(m.i, m.j) for m, c in p.items()))


class Membership(NamedTuple):
    ok: bool
    residual: float  # max |riesz(zbar^i z^j q)| / (1 + scale)
    max_abs: float  # unscaled max |riesz(zbar^i z^j q)|
    scale: float  # max |gamma| touched, or max sum |c gamma| when weighted

    def __bool__(self):
        return self.ok


def is_characteristic(
    s, q: BivarPoly, level: int, tol: float = MEMBERSHIP_TOL, weighted: bool = False
) -> Membership:
    """
    Truncated test of ``M(gamma) q = 0``: checks ``riesz(zbar^i z^j q) = 0`` for
    every ``i + j <= level``.

    Residuals are divided by ``1 + max |gamma|`` over the cells touched.  With
    ``weighted=True`` the divisor is ``1 + max sum |c| |gamma|`` over the rows
    instead, which accounts for the size of the coefficients of ``q`` and is
    the appropriate backward-error scale for products of many linear factors.

    For an :class:`Rdis` with characteristic polynomial of degree ``d`` the
    level ``2d - 2`` is already exhaustive, because every monomial reduces
    modulo ``P`` and ``conj(P)`` into the span of ``zbar^i z^j`` with
    ``i, j < d``.
    """
    worst = 0.0
    gmax = 0.0
    rowmax = 0.0
    terms = list(q.items())
    for deg in range(level + 1):
        for i in range(deg + 1):
            j = deg - i
            acc = 0j
            mag = 0.0
            for m, c in terms:
                g = s.gamma(m.i + i, m.j + j)
                gmax = max(gmax, abs(g))
                mag += abs(c) * abs(g)
                acc += c * g
            rowmax = max(rowmax, mag)
            worst = max(worst, abs(acc))
    scale = rowmax if weighted else gmax
    rel = worst / (1.0 + scale)
    return Membership(bool(rel <= tol), rel, worst, scale)
