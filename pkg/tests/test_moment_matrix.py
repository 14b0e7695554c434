import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_measure
from tcmp.errors import DegreeTooHigh, LevelMismatch, MissingMoment
from tcmp.moment_matrix import (
    apply,
    bilinear,
    build,
    flat_extension_check,
    psd_check,
    psd_power_collapse_test,
)
from tcmp.polynomials import ONE, ZBAR, BivarPoly, Z, degree_lex_index, monomials
from tcmp.rdis import MomentTable, riesz
from tcmp.solver import AtomicMeasure


def test_level_one(worked, worked_measure):
    expected = np.array([[1, 0, 0], [0, 3, -1], [0, -1, 3]])
    assert np.allclose(build(worked, 1).entries, expected, atol=1e-12)
    assert np.allclose(build(worked_measure, 1).entries, expected, atol=1e-12)


def test_entry_rule(worked):
    M = build(worked, 2)
    assert M.entry((1, 1), (0, 2)) == pytest.approx(worked.gamma(1, 3))
    for row in monomials(2):
        for col in monomials(2):
            k, l = row
            i, j = col
            assert M.entry(row, col) == riesz(worked, BivarPoly.monomial(i + l, j + k))


def test_hermitian_and_head(worked):
    M = build(worked, 3)
    assert np.array_equal(M.entries, M.entries.conj().T)
    assert M.entries[0, 0] == 1


def test_delta_at_origin():
    delta = AtomicMeasure((0j,), (1.0,))
    M = build(delta, 3)
    expected = np.zeros((10, 10))
    expected[0, 0] = 1
    assert np.array_equal(M.entries, expected)
    rep = psd_check(M)
    assert rep.is_psd and rep.rank == 1


def test_bilinear(worked):
    M = build(worked, 1)
    assert bilinear(M, ONE, ONE) == 1
    assert bilinear(M, Z, Z) == pytest.approx(3)
    with pytest.raises(DegreeTooHigh):
        bilinear(M, Z**2, ONE)


def test_apply(worked):
    M = build(worked, 3)
    v = apply(M, Z**2 + 2 * ZBAR + 1)
    assert np.max(np.abs(v)) <= 1e-8 * (1 + np.max(np.abs(M.entries)))
    assert np.all(apply(M, BivarPoly()) == 0)
    w = apply(M, Z - 1)
    assert w[0] == pytest.approx(-1)


def test_psd_reports(worked):
    rep = psd_check(build(worked, 1))
    assert rep.is_psd and rep.rank == 3
    assert np.allclose(rep.eigenvalues, [1, 2, 4])
    rep3 = psd_check(build(worked, 3))
    assert rep3.is_psd and rep3.rank == 3


def test_flat_extension(worked):
    assert flat_extension_check(build(worked, 2), build(worked, 3))
    delta = AtomicMeasure((0j,), (1.0,))
    assert flat_extension_check(build(delta, 1), build(delta, 2))
    with pytest.raises(LevelMismatch):
        flat_extension_check(build(worked, 1), build(worked, 3))


def test_flat_extension_fails_for_indefinite_block():
    t = MomentTable(2, {(0, 0): 1, (0, 1): 0, (1, 1): 1, (0, 2): 2, (1, 2): 0, (0, 3): 0, (2, 2): 1})
    M1 = build(t, 1)
    assert np.allclose(M1.entries, [[1, 0, 0], [0, 1, 2], [0, 2, 1]])
    rep = psd_check(M1)
    assert not rep.is_psd and rep.min_eigenvalue == pytest.approx(-1)
    ext = MomentTable.from_function(4, lambda i, j: t.upper.get((i, j), 0.0) if i <= j else 0.0)
    assert not flat_extension_check(M1, build(ext, 2))


def test_missing_moment():
    with pytest.raises(MissingMoment):
        build(MomentTable(2, {(0, 0): 1, (0, 1): 0, (1, 1): 1, (0, 2): 0}), 2)


def test_power_collapse(worked):
    M = build(worked, 4)
    assert psd_power_collapse_test(M, Z**2 + 2 * ZBAR + 1, 2)
    assert psd_power_collapse_test(M, ONE, 3)
    with pytest.raises(DegreeTooHigh):
        psd_power_collapse_test(build(worked, 3), Z**2 + 2 * ZBAR + 1, 2)


def test_power_collapse_four_atoms():
    rng = np.random.default_rng(11)
    mu = random_measure(rng, n=4, radius=1.5)
    z = mu.points
    M = build(mu, 8)
    # product of two linear factors: neither p nor p^2 is characteristic
    p = (Z - z[0]) * (Z - z[1])
    assert psd_power_collapse_test(M, p, 2)
    # vanishing on the whole support: p^2 and p are both characteristic
    q = p * (Z - z[2]) * (Z - z[3])
    assert np.max(np.abs(apply(M, q**2))) < 1e-8 * np.max(np.abs(M.entries))
    assert psd_power_collapse_test(M, q, 2)


def test_vandermonde_factorization():
    rng = np.random.default_rng(5)
    for n_atoms in range(1, 8):
        mu = random_measure(rng, n=n_atoms, radius=1.5)
        n = n_atoms - 1
        M = build(mu, n)
        V = np.array([[np.conj(z) ** m.i * z**m.j for m in monomials(n)] for z in mu.points])
        # M = sum c conj(v) v^T with v the degree-lex evaluation vector
        G = sum(c * np.outer(np.conj(v), v) for c, v in zip(mu.weights, V))
        assert np.allclose(M.entries, G, atol=1e-9 * np.abs(G).max())
        rep = psd_check(M)
        assert rep.is_psd and rep.rank == n_atoms


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_submatrix_monotone(seed):
    rng = np.random.default_rng(seed)
    vals = {(i, d - i): complex(*rng.normal(size=2)) for d in range(7) for i in range(d // 2 + 1)}
    for i in range(4):
        vals[(i, i)] = complex(abs(vals[(i, i)].real) + 0.5)
    t = MomentTable(6, vals)
    for n in range(3):
        if not psd_check(build(t, n)).is_psd:
            assert not psd_check(build(t, n + 1)).is_psd


def _random_poly(rng, deg):
    mons = monomials(deg)
    return BivarPoly({m: complex(*rng.normal(size=2)) for m in mons})


def test_bilinear_shift_identity():
    rng = np.random.default_rng(2)
    mu = random_measure(rng, n=5, radius=1.2)
    M = build(mu, 3)
    for _ in range(30):
        p, q = _random_poly(rng, 2), _random_poly(rng, 2)
        lhs = bilinear(M, Z * p, q)
        rhs = bilinear(M, p, ZBAR * q)
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))
        assert abs(bilinear(M, p, q) - riesz(mu, p * q.conjugate())) <= 1e-9 * (1 + abs(lhs))
