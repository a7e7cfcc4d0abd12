from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest

from qcbounds.enumerators import (
    MomentMatrix,
    StabilizerCode,
    WeightEnumerator,
    code_distance,
    dense_projector,
    enumerator_from_moment_diagonal,
    gamma_moment_matrix,
    krawtchouk,
    macwilliams_transform,
    matrix_weights_from_code,
    shadow_transform,
    stabilizer_weight_distribution,
)
from qcbounds.pauli import PauliString, all_phaseless

from conftest import CORPUS_SMALL, load_code


def test_krawtchouk_values():
    for n in range(1, 6):
        for i in range(n + 1):
            assert krawtchouk(0, i, n) == 1
    assert krawtchouk(1, 1, 5) == 11  # 3*4 - 1
    for n in range(1, 7):
        for j in range(n + 1):
            assert krawtchouk(j, 0, n) == 3**j * comb(n, j)
    with pytest.raises(ValueError):
        krawtchouk(1, 7, 5)


def test_krawtchouk_orthogonality():
    # sum_i C(n,i) 3^i K_j(i;n) K_l(i;n) = delta_jl 4^n 3^j C(n,j)
    for n in range(1, 9):
        for j in range(n + 1):
            for l in range(j, n + 1):
                total = sum(
                    comb(n, i) * 3**i * krawtchouk(j, i, n) * krawtchouk(l, i, n)
                    for i in range(n + 1)
                )
                expect = 4**n * 3**j * comb(n, j) if j == l else 0
                assert total == expect


def test_macwilliams_involution():
    rng = random.Random(17)
    for n in range(1, 9):
        vals = [Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(n + 1)]
        a = WeightEnumerator(n, vals)
        scale = Fraction(2**n)
        # the coefficient transform of the substitution is K*A scaled by 2^-n;
        # applying it twice returns the original enumerator
        twice = macwilliams_transform(macwilliams_transform(a))
        assert list(twice) == [Fraction(v) for v in vals]


def test_five_qubit_weight_distribution():
    code = load_code("five_qubit")
    assert (code.n, code.k, code.K) == (5, 1, 2)
    a = stabilizer_weight_distribution(code)
    assert a == [4, 0, 0, 0, 60, 0]


def test_trivial_code_distribution():
    code = StabilizerCode.trivial(1)
    assert code.K == 2
    a = stabilizer_weight_distribution(code)
    assert a == [4, 0]
    # dense oracle agrees: projector is the identity, rho = I/2
    gamma = gamma_moment_matrix(code)
    rho_a = enumerator_from_moment_diagonal(gamma)
    assert [v * code.K**2 for v in rho_a] == list(a)


def test_bell_distribution():
    code = load_code("bell")
    assert (code.k, code.K) == (0, 1)
    assert stabilizer_weight_distribution(code) == [1, 0, 3]


def test_invalid_generators():
    with pytest.raises(ValueError):
        StabilizerCode.from_strings(["XX", "ZI"])  # anticommuting
    with pytest.raises(ValueError):
        StabilizerCode.from_strings(["XX", "YY", "ZZ"])  # dependent
    with pytest.raises(ValueError):
        StabilizerCode.from_strings(["iX"])  # non-Hermitian sign


def test_corpus_distances():
    for name, n, k, delta in CORPUS_SMALL:
        code = load_code(name)
        assert (code.n, code.k) == (n, k)
        assert code_distance(code) == delta


def test_steane_distance():
    code = load_code("steane")
    assert (code.n, code.k) == (7, 1)
    assert code_distance(code) == 3


def test_macwilliams_five_qubit():
    a = stabilizer_weight_distribution(load_code("five_qubit"))
    b = macwilliams_transform(a)
    assert b[0] == 2  # (4 + 60)/32 = K
    assert b[1] == 0  # K1(0;5)=15, K1(4;5)=-1: (4*15 - 60)/32


def test_state_enumerator_transform():
    a = WeightEnumerator(1, [1, 0])
    b = macwilliams_transform(a)
    assert list(b) == [Fraction(1, 2), Fraction(3, 2)]


def test_shadow_nonnegative_on_corpus():
    for name, *_ in CORPUS_SMALL:
        a = stabilizer_weight_distribution(load_code(name))
        s = shadow_transform(a)
        assert all(v >= 0 for v in s)


def test_shadow_single_term():
    for n in (2, 4):
        vals = [Fraction(0)] * (n + 1)
        vals[0] = Fraction(1)
        s = shadow_transform(WeightEnumerator(n, vals))
        assert list(s) == [Fraction(3**j * comb(n, j), 2**n) for j in range(n + 1)]
        assert all(v > 0 for v in s)


def test_shadow_bell():
    s = shadow_transform(WeightEnumerator(2, [1, 0, 3]))
    assert all(v >= 0 for v in s)


def test_knill_laflamme_rows_on_corpus():
    # K*B_j = A_j for j < delta and K*B_j >= A_j everywhere
    for name, n, k, delta in CORPUS_SMALL:
        code = load_code(name)
        a = stabilizer_weight_distribution(code)
        b = macwilliams_transform(a)
        for j in range(n + 1):
            lhs = code.K * b[j]
            if j < delta:
                assert lhs == a[j], (name, j)
            assert lhs >= a[j], (name, j)


# ---------------------------------------------------------------------------
# moment-matrix oracle
# ---------------------------------------------------------------------------


def test_projector_is_projector_and_trace():
    for name in ("bell", "repetition3"):
        code = load_code(name)
        proj = dense_projector(code)
        dim = len(proj)
        tr = sum((proj[i][i][0] for i in range(dim)), Fraction(0))
        assert tr == code.K
        # Pi^2 = Pi
        for i in range(dim):
            for j in range(dim):
                re = sum(
                    proj[i][l][0] * proj[l][j][0] - proj[i][l][1] * proj[l][j][1]
                    for l in range(dim)
                )
                im = sum(
                    proj[i][l][0] * proj[l][j][1] + proj[i][l][1] * proj[l][j][0]
                    for l in range(dim)
                )
                assert (re, im) == proj[i][j]


def test_gamma_normalization_and_row_sums():
    code = load_code("five_qubit")
    gamma = gamma_moment_matrix(code)
    n = code.n
    assert gamma.get(0, 0) == 1
    # row-sum identity: sum_b Gamma_ab = (2^n/K) Gamma_aa
    basis = list(all_phaseless(n))
    row_totals: dict[int, Fraction] = {}
    for (ia, ib), v in gamma.entries.items():
        row_totals[ia] = row_totals.get(ia, Fraction(0)) + v
    for ia in range(len(basis)):
        expect = Fraction(2**n, code.K) * gamma.get(ia, ia)
        assert row_totals.get(ia, Fraction(0)) == expect


def test_gamma_diagonal_recovers_enumerator():
    for name in ("bell", "four_two_two", "five_qubit"):
        code = load_code(name)
        gamma = gamma_moment_matrix(code)
        diag = enumerator_from_moment_diagonal(gamma)
        a = stabilizer_weight_distribution(code)
        # A_j(rho) = A_j(Pi)/K^2
        assert [v * code.K**2 for v in diag] == list(a)


def test_gamma_weight4_shell_five_qubit():
    code = load_code("five_qubit")
    gamma = gamma_moment_matrix(code)
    diag = enumerator_from_moment_diagonal(gamma)
    assert diag[4] == 15


def test_gamma_symmetric():
    code = load_code("five_qubit")
    gamma = gamma_moment_matrix(code)
    for (ia, ib), v in gamma.entries.items():
        assert gamma.get(ib, ia) == v


def test_matrix_weights_five_qubit_match_paper_example():
    code = load_code("five_qubit")
    lam = matrix_weights_from_code(code)
    expected = {
        (0, 0, 0, 0): Fraction(1),
        (4, 0, 0, 0): Fraction(15),
        (0, 4, 0, 0): Fraction(15),
        (4, 4, 4, 4): Fraction(15),
        (4, 4, 3, 1): Fraction(180),
        (4, 4, 4, 0): Fraction(30),
    }
    assert lam.values == expected


def test_matrix_weights_symmetric_and_diagonal_identities():
    for name in ("bell", "ghz3", "four_two_two", "five_qubit"):
        code = load_code(name)
        lam = matrix_weights_from_code(code)
        a = stabilizer_weight_distribution(code)
        k2 = Fraction(code.K) ** 2
        for (i, j, t, p), v in lam.values.items():
            assert lam.get(j, i, t, p) == v
        for i in range(code.n + 1):
            assert lam.get(i, 0, 0, 0) == a[i] / k2
            if i > 0:
                assert lam.get(i, i, i, i) == a[i] / k2


def test_matrix_weights_trivial_code_concentrated():
    code = StabilizerCode.trivial(2)
    lam = matrix_weights_from_code(code)
    assert lam.values == {(0, 0, 0, 0): Fraction(1)}
