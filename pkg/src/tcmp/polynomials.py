"""
Sparse polynomials in the commuting symbols ``z`` and ``zbar``.

A monomial ``zbar^i z^j`` is stored under the key ``(i, j)``.  Columns of a
moment matrix are ordered degree-lexicographically::

    1, z, zbar, z^2, z zbar, zbar^2, z^3, ...

so that ``zbar^i z^j`` sits at position ``d(d+1)/2 + i`` with ``d = i + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import DegreeTooHigh, MalformedCharPoly

__all__ = [
    "Monomial",
    "BivarPoly",
    "ReductionCertificate",
    "degree_lex_index",
    "monomials",
    "basis_size",
    "conjugate",
    "add",
    "multiply",
    "scale",
    "evaluate",
    "reduce_degrees",
    "Z",
    "ZBAR",
    "ONE",
]

# relative threshold below which a coefficient is treated as cancelled
DROP_TOL = 1e-13


class Monomial(NamedTuple):
    i: int  # power of zbar
    j: int  # power of z

    @property
    def degree(self) -> int:
        return self.i + self.j


def degree_lex_index(m) -> int:
    i, j = m
    if i < 0 or j < 0:
        raise ValueError(f"negative exponent in monomial {m!r}")
    d = i + j
    return d * (d + 1) // 2 + i


def basis_size(n: int) -> int:
    """Number of monomials of total degree at most ``n``."""
    return (n + 1) * (n + 2) // 2


def monomials(n: int) -> list[Monomial]:
    """All monomials of total degree <= n in degree-lex order."""
    return [Monomial(i, d - i) for d in range(n + 1) for i in range(d + 1)]


def _clean(terms: Mapping) -> dict:
    if not terms:
        return {}
    big = max(abs(c) for c in terms.values())
    cut = DROP_TOL * max(big, 1.0)
    return {Monomial(*k): complex(c) for k, c in terms.items() if abs(c) > cut}


class BivarPoly:
    """Immutable sparse polynomial ``sum c_ij zbar^i z^j``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        object.__setattr__(self, "_terms", _clean(terms or {}))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("BivarPoly is immutable")

    # construction helpers

    @classmethod
    def constant(cls, c) -> "BivarPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1.0) -> "BivarPoly":
        return cls({(i, j): c})

    @classmethod
    def from_univariate(cls, coeffs: Iterable) -> "BivarPoly":
        """Analytic polynomial from ascending coefficients ``c0 + c1 z + ...``."""
        return cls({(0, j): c for j, c in enumerate(coeffs) if c != 0})

    @classmethod
    def from_vector(cls, vec, n: int | None = None) -> "BivarPoly":
        vec = np.asarray(vec, dtype=complex)
        mons = monomials(n if n is not None else _level_for_length(len(vec)))
        return cls({m: c for m, c in zip(mons, vec) if c != 0})

    # accessors

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coeff(self, i: int, j: int) -> complex:
        return self._terms.get((i, j), 0j)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def deg_z(self) -> int:
        return max((m.j for m in self._terms), default=-1)

    @property
    def deg_zbar(self) -> int:
        return max((m.i for m in self._terms), default=-1)

    @property
    def degree(self) -> int:
        return max((m.i + m.j for m in self._terms), default=-1)

    @property
    def is_analytic(self) -> bool:
        return all(m.i == 0 for m in self._terms)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def univariate(self) -> np.ndarray:
        """Ascending coefficient array of an analytic polynomial."""
        if not self.is_analytic:
            raise ValueError("polynomial contains zbar")
        out = np.zeros(max(self.deg_z, 0) + 1, dtype=complex)
        for m, c in self._terms.items():
            out[m.j] = c
        return out

    def vector(self, n: int) -> np.ndarray:
        """Dense coefficient vector of length ``(n+1)(n+2)/2`` in degree-lex order."""
        if self.degree > n:
            raise DegreeTooHigh(f"degree {self.degree} exceeds level {n}")
        out = np.zeros(basis_size(n), dtype=complex)
        for m, c in self._terms.items():
            out[degree_lex_index(m)] = c
        return out

    # algebra

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0j) + c
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return BivarPoly({m: c * other for m, c in self._terms.items()})
        other = _coerce(other)
        out: dict = {}
        for (a, b), c in self._terms.items():
            for (p, q), e in other._terms.items():
                key = (a + p, b + q)
                out[key] = out.get(key, 0j) + c * e
        return BivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "BivarPoly":
        return BivarPoly({(j, i): np.conj(c) for (i, j), c in self._terms.items()})

    def __call__(self, w):
        return self.evaluate(w)

    def evaluate(self, w):
        w = np.asarray(w, dtype=complex)
        wb = np.conj(w)
        total = np.zeros_like(w)
        for (i, j), c in self._terms.items():
            total = total + c * wb**i * w**j
        return total[()] if total.ndim == 0 else total

    def allclose(self, other, rtol=1e-9, atol=1e-12) -> bool:
        other = _coerce(other)
        keys = set(self._terms) | set(other._terms)
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), 1.0)
        return all(abs(self.coeff(*k) - other.coeff(*k)) <= atol + rtol * scale for k in keys)

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = BivarPoly.constant(other)
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"BivarPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=degree_lex_index, reverse=True):
            c = self._terms[m]
            mon = "*".join(
                s for s in (_power("zb", m.i), _power("z", m.j)) if s
            )
            coef = _fmt_complex(c)
            if not mon:
                parts.append(coef)
            elif coef == "1":
                parts.append(mon)
            elif coef == "-1":
                parts.append("-" + mon)
            else:
                parts.append(f"{coef}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


def _power(sym, k):
    if k == 0:
        return ""
    return sym if k == 1 else f"{sym}^{k}"


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:.12g}"
    if c.real == 0:
        return f"{c.imag:.12g}j"
    return f"({c.real:.12g}{c.imag:+.12g}j)"


def _coerce(x) -> BivarPoly:
    if isinstance(x, BivarPoly):
        return x
    return BivarPoly.constant(x)


def _level_for_length(length: int) -> int:
    n = 0
    while basis_size(n) < length:
        n += 1
    if basis_size(n) != length:
        raise ValueError(f"{length} is not a degree-lex basis size")
    return n


ONE = BivarPoly.constant(1.0)
Z = BivarPoly.monomial(0, 1)
ZBAR = BivarPoly.monomial(1, 0)


def conjugate(p: BivarPoly) -> BivarPoly:
    """Coefficient-conjugate and swap the roles of z and zbar."""
    return p.conjugate()


def add(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    return p + q


def multiply(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    return p * q


def scale(c, p: BivarPoly) -> BivarPoly:
    return p * complex(c)


def evaluate(p: BivarPoly, w):
    return p.evaluate(w)


# ---------------------------------------------------------------------------
# normal form modulo P and conj(P)


@dataclass(frozen=True)
class ReductionCertificate:
    """Multipliers with ``p = h + f1*P + f2*conj(P)``."""

    f1: BivarPoly
    f2: BivarPoly

    def residual(self, p, h, P, points) -> float:
        """Largest |p - h - f1 P - f2 Pbar| over ``points``."""
        lhs = p.evaluate(points)
        rhs = h.evaluate(points) + self.f1.evaluate(points) * P.evaluate(points)
        rhs = rhs + self.f2.evaluate(points) * P.conjugate().evaluate(points)
        return float(np.max(np.abs(lhs - rhs)))


def charpoly_tail(P: BivarPoly) -> tuple[int, BivarPoly]:
    """Split ``P = z^d - T`` and return ``(d, T)``; validates the shape."""
    d = P.deg_z
    if d < 1:
        raise MalformedCharPoly(f"{P} has no positive power of z")
    lead = P.coeff(0, d)
    if abs(lead - 1) > 1e-12:
        raise MalformedCharPoly(f"{P} is not monic in z^{d}")
    tail = {}
    for m, c in P.items():
        if m == (0, d):
            continue
        if m.i + m.j > d - 1:
            raise MalformedCharPoly(
                f"term zbar^{m.i} z^{m.j} of {P} has total degree >= {d}"
            )
        tail[m] = -c
    return d, BivarPoly(tail)


def reduce_degrees(p: BivarPoly, P: BivarPoly):
    """
    Rewrite ``p`` modulo ``P`` and its conjugate until both partial degrees
    drop below ``d = deg_z P``.

    Returns ``(h, certificate)`` with ``p = h + f1 P + f2 conj(P)``.  Offending
    monomials are processed in descending degree-lex order; a monomial with
    both exponents >= d is rewritten on the z side first.  Because ``{P,
    conj(P)}`` have coprime leading monomials the remainder ``h`` does not
    depend on this order, only the multipliers do.
    """
    d, tail = charpoly_tail(P)
    tail_items = list(tail.items())
    tail_bar_items = list(tail.conjugate().items())

    work = dict(p.items())
    f1: dict = {}
    f2: dict = {}

    def offending():
        return [m for m, c in work.items() if c != 0 and (m[0] >= d or m[1] >= d)]

    pending = offending()
    while pending:
        m = max(pending, key=degree_lex_index)
        i, j = m
        c = work.pop(m)
        if j >= d:
            key = (i, j - d)
            f1[key] = f1.get(key, 0j) + c
            for (a, b), e in tail_items:
                t = (i + a, j - d + b)
                work[t] = work.get(t, 0j) + c * e
        else:
            key = (i - d, j)
            f2[key] = f2.get(key, 0j) + c
            for (a, b), e in tail_bar_items:
                t = (i - d + a, j + b)
                work[t] = work.get(t, 0j) + c * e
        pending = offending()

    h = BivarPoly(work)
    return h, ReductionCertificate(BivarPoly(f1), BivarPoly(f2))
