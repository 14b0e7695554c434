"""
Solvability decisions and atomic measure construction.

The entry points return a :class:`SolveReport`.  ``Solved`` always carries a
measure that reproduces the data; ``Infeasible`` always carries a named
:class:`Certificate`; ``Indeterminate`` is used when floating point cannot
settle a boundary case.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import linalg

from .analysis import (
    CubicParams,
    ZeroSet,
    analytic_roots,
    compute_xi,
    cubic_region,
    flat_atoms,
    harmonic_cubic_zeros,
    lagrange_basis,
    membership_level,
    minimal_analytic_roots,
    product_from_roots,
    recover_support,
    rotate_poly,
)
from .errors import (
    DuplicateRoots,
    EmptyZeroSet,
    InconsistentExtension,
    InvariantViolation,
    MissingMoment,
    NotAnalytic,
    RelationViolated,
    TcmpError,
)
from .moment_matrix import (
    PsdReport,
    bilinear,
    build,
    first_psd_failure,
    flat_extension_check,
    psd_check,
)
from .polynomials import ONE, ZBAR, BivarPoly, Z, degree_lex_index, monomials, reduce_degrees
from .rdis import MEMBERSHIP_TOL, MomentTable, Rdis, is_characteristic, riesz

__all__ = [
    "AtomicMeasure",
    "Status",
    "Certificate",
    "SolveReport",
    "ColumnRelation",
    "ConditionReport",
    "solve_rsft",
    "solve_rdis",
    "solve_truncated",
    "solve_table",
    "check_cubic_conditions",
    "extract_column_relation",
    "verify_measure",
    "WEIGHT_FLOOR",
    "VERIFY_TOL",
    "GRAY_ZONE",
]

WEIGHT_FLOOR = 1e-10  # relative to total mass
VERIFY_TOL = 1e-7
GRAY_ZONE = 1e-5  # membership residuals in (tol, GRAY_ZONE] are indeterminate
RELATION_TOL = 1e-8
CONSISTENCY_TOL = 1e-7
# membership tolerance for supports recovered from data: Q has degree up to
# m(k) and the test reaches moments far beyond the data, where the recursion
# amplifies rounding in the extracted relation
SUPPORT_TOL = 1e-6


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite positive combination of point masses."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        wts = tuple(float(w) for w in self.weights)
        if len(pts) != len(wts):
            raise ValueError("points and weights differ in length")
        if not pts:
            raise EmptyZeroSet("measure has no atoms")
        total = sum(wts)
        if not total > 0:
            raise ValueError("total mass must be positive")
        floor = WEIGHT_FLOOR * total
        for p, w in zip(pts, wts):
            if not w > floor:
                raise ValueError(f"weight {w} at {p} is below the floor {floor:.1e}")
        scale = 1 + max(abs(p) for p in pts)
        for a in range(len(pts)):
            for b in range(a):
                if abs(pts[a] - pts[b]) <= 1e-12 * scale:
                    raise DuplicateRoots(f"atoms {pts[a]} and {pts[b]} coincide")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def from_pairs(cls, atoms) -> "AtomicMeasure":
        atoms = list(atoms)
        return cls(tuple(p for p, _ in atoms), tuple(w for _, w in atoms))

    @property
    def atoms(self) -> list[tuple[complex, float]]:
        return list(zip(self.points, self.weights))

    @property
    def total_mass(self) -> float:
        return float(sum(self.weights))

    def __len__(self):
        return len(self.points)

    def moment(self, i: int, j: int) -> complex:
        z = np.array(self.points)
        return complex(np.sum(np.array(self.weights) * np.conj(z) ** i * z**j))

    gamma = moment

    def table(self, degree: int) -> MomentTable:
        return MomentTable.from_function(degree, self.moment)

    def sorted(self) -> "AtomicMeasure":
        order = sorted(range(len(self)), key=lambda k: (self.points[k].real, self.points[k].imag))
        return AtomicMeasure(
            tuple(self.points[k] for k in order), tuple(self.weights[k] for k in order)
        )


def verify_measure(mu: AtomicMeasure, omega, degree: int) -> float:
    """Largest ``|int zbar^i z^j dmu - gamma_ij| / (1 + |gamma_ij|)`` over ``i + j <= degree``."""
    z = np.array(mu.points)
    w = np.array(mu.weights)
    zb = np.conj(z)
    worst = 0.0
    for d in range(degree + 1):
        for i in range(d + 1):
            j = d - i
            g = omega.gamma(i, j)
            m = np.sum(w * zb**i * z**j)
            worst = max(worst, abs(m - g) / (1 + abs(g)))
    return float(worst)


# ---------------------------------------------------------------------------
# reports


class Status(enum.Enum):
    SOLVED = "Solved"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Certificate:
    """Named failed test with its numeric evidence."""

    name: str
    message: str
    value: float = float("nan")

    def __str__(self):
        return f"{self.name}: {self.message}"


@dataclass
class SolveReport:
    status: Status
    measure: AtomicMeasure | None = None
    failed_test: Certificate | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.SOLVED and self.measure is None:
            raise InvariantViolation("solved report without a measure")
        if self.status is Status.INFEASIBLE and self.failed_test is None:
            raise InvariantViolation("infeasible report without a certificate")

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


def _psd_certificate(rep: PsdReport) -> Certificate:
    return Certificate(
        "psd",
        f"M({rep.level}) not PSD, lambda_min = {rep.min_eigenvalue:.6g}",
        rep.min_eigenvalue,
    )


def _psd_stage(s, level: int, diag: dict, key: str):
    M = build(s, level)
    full, failing = first_psd_failure(M)
    diag[key] = full
    if failing is not None:
        diag["psd_witness"] = failing
        return M, _psd_certificate(failing)
    return M, None


# ---------------------------------------------------------------------------
# analytic case


def _analytic_charpoly(s, analytic) -> BivarPoly:
    if analytic is None:
        P = s.charpoly
    elif isinstance(analytic, BivarPoly):
        P = analytic
    else:
        P = BivarPoly.from_univariate(analytic)
    if not P.is_analytic:
        raise NotAnalytic(f"{P} contains zbar")
    return P


def solve_rsft(
    s: Rdis, analytic=None, *, tol: float = MEMBERSHIP_TOL, check_psd: bool = True
) -> SolveReport:
    """
    Decide and solve the full moment problem of a sequence with an analytic
    characteristic polynomial.

    ``analytic`` defaults to the sequence's own characteristic polynomial; any
    other analytic characteristic polynomial of ``s`` may be passed instead.
    The minimal analytic characteristic polynomial ``P_min`` (degree ``r'``)
    is extracted by divisor search; ``M(2r' - 2)`` must be PSD, and then the
    weights are ``c_i = <M L_i, L_i>`` for the Lagrange polynomials at the
    roots of ``P_min``.

    ``check_psd=False`` skips the ``M(2r' - 2)`` test for callers that have
    already certified positivity at a lower level; deep levels built by
    recursion can lose the accuracy the eigenvalue tolerance needs.
    """
    P = _analytic_charpoly(s, analytic)
    diag: dict = {"charpoly": P}
    level = membership_level(s)
    coeffs, zs = minimal_analytic_roots(s, P, level, tol, weighted=True)
    diag["minimal_polynomial"] = BivarPoly.from_univariate(coeffs)
    diag["zeros"] = zs
    rp = len(coeffs) - 1
    if check_psd:
        _, cert = _psd_stage(s, max(2 * rp - 2, 0), diag, "psd")
        if cert is not None:
            return SolveReport(Status.INFEASIBLE, failed_test=cert, diagnostics=diag)
    if any(m > 1 for m in zs.multiplicities):
        raise InvariantViolation(f"PSD sequence with a repeated root in {zs}")

    Mr = build(s, max(rp - 1, 0))
    raw = [bilinear(Mr, L, L) for L in lagrange_basis(zs)]
    diag["raw_weights"] = raw
    mass = float(np.real(s.gamma(0, 0)))
    floor = WEIGHT_FLOOR * max(mass, abs(sum(raw)))
    for p, c in zip(zs.points, raw):
        if not c.real > floor:
            raise InvariantViolation(
                f"weight {c.real:.3e} at {p} below floor {floor:.1e}; P_min not minimal"
            )
    mu = AtomicMeasure(zs.points, tuple(c.real for c in raw))
    resid = verify_measure(mu, s, max(2 * rp - 2, 0))
    diag["verify_residual"] = resid
    if resid > VERIFY_TOL:
        return SolveReport(
            Status.INDETERMINATE,
            measure=mu,
            failed_test=Certificate("verify", f"reintegration residual {resid:.3e}", resid),
            diagnostics=diag,
        )
    return SolveReport(Status.SOLVED, measure=mu, diagnostics=diag)


# ---------------------------------------------------------------------------
# general recursive case with known zero set


def solve_rdis(s: Rdis, zeros, *, tol: float = MEMBERSHIP_TOL) -> SolveReport:
    """
    Decide solvability of an RDIS from the zero set of its characteristic
    polynomial.

    ``Q = prod (z - lambda)`` over ``zeros`` must be characteristic and
    ``M(xi)`` must be PSD, where ``xi`` comes from the remainder of ``Q``
    modulo the characteristic polynomial.  Zeros of non-cubic harmonic
    polynomials have to be supplied by the caller.
    """
    if not isinstance(zeros, ZeroSet):
        zeros = ZeroSet(tuple(zeros))
    if zeros.count == 0:
        raise EmptyZeroSet("zero set is empty; no measure can be supported")
    diag: dict = {"zeros": zeros}
    qc = product_from_roots(zeros)
    Q = BivarPoly.from_univariate(qc)
    h, _ = reduce_degrees(Q, s.charpoly)
    xi = compute_xi(h, s.degree)
    diag.update(Q=Q, h=h, xi=xi)

    _, cert = _psd_stage(s, xi.xi, diag, "psd_xi")
    mem = is_characteristic(s, Q, membership_level(s), tol, weighted=True)
    diag["membership"] = mem
    if cert is not None:
        return SolveReport(Status.INFEASIBLE, failed_test=cert, diagnostics=diag)
    if mem.residual > GRAY_ZONE:
        cert = Certificate(
            "membership", f"Q not characteristic, residual = {mem.residual:.3e}", mem.residual
        )
        return SolveReport(Status.INFEASIBLE, failed_test=cert, diagnostics=diag)
    if not mem.ok:
        cert = Certificate(
            "membership",
            f"Q membership residual {mem.residual:.3e} is in the undecidable band",
            mem.residual,
        )
        return SolveReport(Status.INDETERMINATE, failed_test=cert, diagnostics=diag)
    rep = solve_rsft(s, Q, tol=tol, check_psd=False)
    rep.diagnostics.update(diag)
    return rep


# ---------------------------------------------------------------------------
# truncated problems


@dataclass(frozen=True)
class ColumnRelation:
    """``Z^(k+1) = sum a_nm Zbar^n Z^m`` over ``n + m <= k``."""

    k: int
    coefficients: Mapping

    def __post_init__(self):
        clean = {}
        for (n, m), a in self.coefficients.items():
            if n < 0 or m < 0 or n + m > self.k:
                raise ValueError(f"relation term ({n},{m}) outside total degree {self.k}")
            clean[(int(n), int(m))] = complex(a)
        object.__setattr__(self, "coefficients", clean)

    @property
    def charpoly(self) -> BivarPoly:
        return Z ** (self.k + 1) - BivarPoly(self.coefficients)

    def coeff(self, n: int, m: int) -> complex:
        return self.coefficients.get((n, m), 0j)

    @property
    def is_analytic(self) -> bool:
        return self.charpoly.is_analytic

    def cubic_params(self, tol: float = 1e-9) -> CubicParams | None:
        """
        The harmonic cubic this relation expresses, if any.

        ``Z^3 = -a Z - b Zbar`` with real ``a, b`` gives the plain form;
        ``Z^3 = i t Z + u Zbar`` with real ``t, u`` gives the rotated form.
        """
        if self.k != 2:
            return None
        big = max((abs(a) for a in self.coefficients.values()), default=0.0)
        cut = tol * (1 + big)
        if any(abs(a) > cut for key, a in self.coefficients.items() if key not in {(0, 1), (1, 0)}):
            return None
        a01, a10 = self.coeff(0, 1), self.coeff(1, 0)
        if abs(a10.imag) > cut:
            return None
        if abs(a01.imag) <= cut:
            return CubicParams(-a01.real, -a10.real)
        if abs(a01.real) <= cut:
            return CubicParams.from_tu(a01.imag, a10.real)
        return None


def extract_column_relation(M, tol: float = RELATION_TOL) -> ColumnRelation | None:
    """
    Express column ``Z^(k+1)`` of ``M(k+1)`` through the columns of degree
    <= k by least squares.  Returns ``None`` when the residual exceeds
    ``tol`` times the column norm.
    """
    k = M.n - 1
    if k < 0:
        raise ValueError("need a moment matrix of level at least 1")
    m = len(monomials(k))
    col = M.entries[:, degree_lex_index((0, k + 1))]
    A = M.entries[:, :m]
    norm = float(np.linalg.norm(col))
    if norm == 0.0:
        return ColumnRelation(k, {})
    x, *_ = linalg.lstsq(A, col, cond=1e-12)
    resid = float(np.linalg.norm(A @ x - col))
    if resid > tol * norm:
        return None
    return ColumnRelation(k, {tuple(mon): x[p] for p, mon in enumerate(monomials(k)) if x[p] != 0})


def _relation_residual(omega, relation: ColumnRelation) -> float:
    M = build(omega, relation.k + 1)
    P = relation.charpoly
    v = M.entries @ P.vector(M.n)
    coef = sum(abs(c) for _, c in P.items())
    colnorm = float(np.max(np.linalg.norm(M.entries, axis=0)))
    return float(np.max(np.abs(v)) / ((1.0 + colnorm) * coef))


def _validate_table(omega, degree: int):
    g00 = omega.gamma(0, 0)
    if not (g00.real > 0 and abs(g00.imag) <= 1e-12 * abs(g00)):
        raise TcmpError(f"gamma_00 must be real and positive, got {g00}")
    if getattr(omega, "degree", degree) < degree:
        raise MissingMoment(f"table has degree {omega.degree}, need {degree}")
    for d in range(degree + 1):
        for i in range(d + 1):
            omega.gamma(i, d - i)


def _refit_weights(points, omega, degree: int):
    """Weighted least-squares weights for fixed atoms against the data."""
    z = np.array(points)
    rows, rhs = [], []
    for d in range(degree + 1):
        for i in range(d + 1):
            g = omega.gamma(i, d - i)
            s = 1.0 / (1.0 + abs(g))
            rows.append(s * np.conj(z) ** i * z ** (d - i))
            rhs.append(s * g)
    A = np.array(rows)
    b = np.array(rhs)
    A2 = np.vstack([A.real, A.imag])
    b2 = np.concatenate([b.real, b.imag])
    w, *_ = linalg.lstsq(A2, b2)
    return w


class _DataFirst:
    """Reads ``gamma_ij`` from the data up to degree ``D`` and from ``s`` beyond."""

    def __init__(self, omega, s, degree: int):
        self.omega, self.s, self.degree = omega, s, degree

    def gamma(self, i: int, j: int) -> complex:
        return self.omega.gamma(i, j) if i + j <= self.degree else self.s.gamma(i, j)


def _solve_generic(omega, s, k: int, flat: bool, tol: float, diag: dict) -> SolveReport:
    """Support recovery for relations that are neither analytic nor cubic."""
    stol = max(tol, SUPPORT_TOL)
    if flat:
        # atoms of the flat data; weights and acceptance come from the data
        zs = flat_atoms(omega, k + 1)
        if zs is not None:
            w = _refit_weights(zs.points, omega, 2 * k + 2)
            diag["zeros"] = zs
            if np.all(w > WEIGHT_FLOOR * np.sum(w)):
                mu = AtomicMeasure(zs.points, tuple(w))
                return SolveReport(Status.INDETERMINATE, measure=mu, diagnostics=diag)
    found = recover_support(omega, k + 1, stol, sequence=s)
    if found is None:
        found = recover_support(s, 2 * k + 1, stol)
    if found is None:
        cert = Certificate(
            "support", "no characteristic polynomial recovered from the flat part", math.nan
        )
        return SolveReport(Status.INDETERMINATE, failed_test=cert, diagnostics=diag)
    coeffs, zs = found
    diag["zeros"] = zs
    try:
        return solve_rsft(s, coeffs, tol=stol, check_psd=False)
    except TcmpError as exc:
        cert = Certificate("support", str(exc), math.nan)
        return SolveReport(Status.INDETERMINATE, failed_test=cert, diagnostics=diag)


def solve_truncated(
    omega, relation: ColumnRelation, *, tol: float = MEMBERSHIP_TOL
) -> SolveReport:
    """
    Truncated moment problem for ``{gamma_ij : i + j <= 2k+2}`` whose moment
    matrix ``M(k+1)`` satisfies ``relation``.

    The data determine a recursive sequence through the initial block
    ``i <= j <= k`` and the characteristic polynomial of the relation; a
    representing measure exists exactly when ``M(2k)`` of that sequence is
    PSD.  Harmonic cubics use their closed-form zero sets, analytic relations
    the Fibonacci-type construction and all other relations a support
    recovery from the flat part of the moment matrix.
    """
    k = relation.k
    D = 2 * k + 2
    _validate_table(omega, D)
    diag: dict = {"relation": relation}
    rel_res = _relation_residual(omega, relation)
    diag["relation_residual"] = rel_res
    if rel_res > RELATION_TOL:
        raise RelationViolated(f"column relation fails in M({k + 1}), residual {rel_res:.3e}")

    s = Rdis.from_source(omega, relation.charpoly)
    scale = 1.0 + max(abs(omega.gamma(i, d - i)) for d in range(D + 1) for i in range(d + 1))
    drift = max(
        abs(s.gamma(i, d - i) - omega.gamma(i, d - i)) for d in range(D + 1) for i in range(d + 1)
    )
    diag["extension_drift"] = drift / scale
    if drift > CONSISTENCY_TOL * scale:
        raise InconsistentExtension(
            f"recursive extension departs from the data by {drift:.3e} (scale {scale:.3e})"
        )

    params = relation.cubic_params()
    diag["cubic"] = params
    if params is not None and D >= 6:
        diag["conditions"] = check_cubic_conditions(omega, params)

    flat = flat_extension_check(build(omega, k), build(omega, k + 1))
    diag["flat_data"] = flat
    _, cert = _psd_stage(_DataFirst(omega, s, D), 2 * k, diag, "psd_2k")
    if cert is not None and flat and diag["psd_witness"].level > k + 1:
        # Blocks beyond M(k+1) exist only through the recursion, whose output
        # is very sensitive to the relation when its coefficients are large.
        # A flat PSD M(k+1) of the data already guarantees a measure, so such
        # a witness is not trusted and reintegration decides instead.
        diag["deep_witness_overridden"] = diag.pop("psd_witness")
        cert = None
    if cert is not None:
        return SolveReport(Status.INFEASIBLE, failed_test=cert, diagnostics=diag)

    if relation.is_analytic:
        rep = solve_rsft(s, tol=tol, check_psd=False)
    elif params is not None:
        zs = harmonic_cubic_zeros(params)
        rep = solve_rdis(s, zs, tol=tol)
    else:
        rep = _solve_generic(omega, s, k, flat, tol, diag)
    for key, value in diag.items():
        rep.diagnostics.setdefault(key, value)
    if rep.measure is None or rep.status is Status.INFEASIBLE:
        return rep

    # the data, not the deep recursion, decide acceptance
    mu = rep.measure
    resid = verify_measure(mu, omega, D)
    w = _refit_weights(mu.points, omega, D)
    if np.all(w > WEIGHT_FLOOR * np.sum(w)):
        refit = AtomicMeasure(mu.points, tuple(w))
        r2 = verify_measure(refit, omega, D)
        if r2 < resid:
            mu, resid = refit, r2
            rep.diagnostics["refit"] = True
    rep.measure = mu
    rep.diagnostics["verify_residual"] = resid
    if resid > VERIFY_TOL:
        rep.status = Status.INDETERMINATE
        rep.failed_test = Certificate("verify", f"reintegration residual {resid:.3e}", resid)
    else:
        rep.status = Status.SOLVED
        rep.failed_test = None
    return rep


def solve_table(omega, relation: ColumnRelation | None = None, *, tol: float = MEMBERSHIP_TOL):
    """
    Solve a truncated table, extracting the column relation when none is
    given.  The smallest ``k`` with a relation in ``M(k+1)`` and
    ``2k + 2 <= degree`` is used.
    """
    if relation is None:
        k = 0
        while 2 * k + 2 <= omega.degree:
            relation = extract_column_relation(build(omega, k + 1))
            if relation is not None:
                break
            k += 1
        if relation is None:
            raise RelationViolated(
                f"no column relation Z^(k+1) found for any 2k+2 <= {omega.degree}"
            )
    return solve_truncated(omega, relation, tol=tol)


# ---------------------------------------------------------------------------
# harmonic cubic condition sets


@dataclass
class ConditionReport:
    """
    Evaluation of a region's necessary and sufficient conditions.

    ``equalities`` holds the entrywise form, ``riesz`` the functional form
    ``riesz(m h) = 0`` for each multiplier ``m``.  Residuals are absolute;
    a residual passes when it is at most ``tol * scale``.
    """

    params: CubicParams
    region: str
    table: int
    table_count: int
    h: BivarPoly | None
    level: int
    equalities: list = field(default_factory=list)  # (label, residual)
    riesz: list = field(default_factory=list)  # (label, residual)
    psd: PsdReport | None = None
    supported: bool = True
    tol: float = 1e-8
    scale: float = 1.0  # 1 + max |gamma_ij| over i + j <= 4

    @property
    def equalities_hold(self) -> bool:
        return all(r <= self.tol * self.scale for _, r in self.equalities)

    @property
    def riesz_hold(self) -> bool:
        return all(r <= self.tol * self.scale for _, r in self.riesz)

    @property
    def agree(self) -> bool:
        return self.equalities_hold == self.riesz_hold

    @property
    def passed(self) -> bool:
        return self.supported and self.equalities_hold and self.psd is not None and self.psd.is_psd

    def failing(self) -> list:
        return [(lab, r) for lab, r in self.equalities if r > self.tol * self.scale]


def _region_equalities(region: str, a: float, b: float, g) -> list:
    re, im = np.real, np.imag
    if region == "b<-a<2b":
        return [
            ("Im g12 = b Im g01", im(g(1, 2)) - b * im(g(0, 1))),
            ("g22 + 2b Re g20 + (a-b) g11 = 0", g(2, 2) + 2 * b * re(g(2, 0)) + (a - b) * g(1, 1)),
        ]
    if region == "b<a<2b":
        return [
            ("Re g12 = b Re g01", re(g(1, 2)) - b * re(g(0, 1))),
            ("g22 = 2b Re g20 + (a+b) g11", g(2, 2) - 2 * b * re(g(2, 0)) - (a + b) * g(1, 1)),
        ]
    if region in ("2b<=a", "-b<=a"):
        return [
            ("Re g01 = 0", re(g(0, 1))),
            ("g11 + g02 = 0", g(1, 1) + g(0, 2)),
            ("g12 = a g01 + b g10", g(1, 2) - a * g(0, 1) - b * g(1, 0)),
        ]
    if region in ("a<=-2b", "a<=b"):
        return [
            ("g01 = g10", g(0, 1) - g(1, 0)),
            ("g02 = g11", g(0, 2) - g(1, 1)),
            ("a g01 + b g10 + g12 = 0", a * g(0, 1) + b * g(1, 0) + g(1, 2)),
        ]
    if region == "|a|<-b":
        return [
            ("g21 + a g01 + b g10 = 0", g(2, 1) + a * g(0, 1) + b * g(1, 0)),
            ("g20 = g02", g(2, 0) - g(0, 2)),
            ("g22 + a g20 + b g11 = 0", g(2, 2) + a * g(2, 0) + b * g(1, 1)),
        ]
    if region == "-b<=a<=b":
        return [
            (f"g{i}{j} = 0", g(i, j))
            for i in range(3)
            for j in range(i, 3)
            if (i, j) != (0, 0)
        ]
    return []


def _rotated_equalities(region: str, t: float, u: float, g) -> list | None:
    """Entrywise conditions stated directly in the (t, u) variable."""
    re, im = np.real, np.imag
    if region == "b<a<2b":  # u < t < 2u
        return [
            (
                "Re g12 - Im g12 = u (Re g01 - Im g01)",
                re(g(1, 2)) - im(g(1, 2)) - u * (re(g(0, 1)) - im(g(0, 1))),
            ),
            ("g22 = (t+u) g11 - 2u Im g02", g(2, 2) - (t + u) * g(1, 1) + 2 * u * im(g(0, 2))),
        ]
    if region == "b<-a<2b":  # u < -t < 2u
        return [
            (
                "Re g12 + Im g12 = u (Re g01 + Im g01)",
                re(g(1, 2)) + im(g(1, 2)) - u * (re(g(0, 1)) + im(g(0, 1))),
            ),
            ("g22 = (u-t) g11 + 2u Im g02", g(2, 2) - (u - t) * g(1, 1) - 2 * u * im(g(0, 2))),
        ]
    return None


def _label(m: BivarPoly) -> str:
    return "1" if m == ONE else str(m)


def check_cubic_conditions(omega, params: CubicParams, tol: float = 1e-8) -> ConditionReport:
    """
    Evaluate the root-count table conditions for ``z^3 + a z + b zbar``
    (or the rotated ``(t, u)`` form) on a table of degree >= 4 or 6.

    Residuals are compared with ``tol * (1 + max |gamma_ij|)`` over ``i + j <= 4``.
    """
    a, b = params.a, params.b
    reg = cubic_region(a, b)
    phase = np.exp(0.25j * np.pi)
    frame = omega.rotated(phase) if params.rotated else omega
    rep = ConditionReport(params, reg.name, reg.table, reg.table_count, reg.h, reg.level, tol=tol)
    need = 2 * reg.level
    if getattr(omega, "degree", need) < need:
        raise MissingMoment(f"region {reg.name} needs degree {need}, table has {omega.degree}")
    scale = 1.0 + max(abs(omega.gamma(i, d - i)) for d in range(5) for i in range(d + 1))
    rep.scale = scale
    if reg.h is None:
        rep.supported = False
        rep.psd = psd_check(build(omega, reg.level))
        return rep

    eqs = None
    h = reg.h
    if params.rotated:
        eqs = _rotated_equalities(reg.name, params.t, params.u, omega.gamma)
    if eqs is None:
        eqs = _region_equalities(reg.name, a, b, frame.gamma)
        src = frame
    else:
        src = omega
        h = rotate_poly(h, phase)
        rep.h = h
    rep.equalities = [(lab, float(abs(v))) for lab, v in eqs]
    mults = reg.multipliers if src is frame else tuple(rotate_poly(m, phase) for m in reg.multipliers)
    rep.riesz = [
        (f"L({_label(m)} h) = 0", abs(riesz(src, m * h))) for m in mults
    ]
    rep.psd = psd_check(build(omega, reg.level))
    return rep
