from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest

from qcbounds.exactfield import (
    NotPSD,
    QExt,
    SymMatrixQ,
    is_psd,
    ldlt_decompose,
    ldlt_reconstruct,
    qext_pow_sqrt3,
    qext_sign,
    rat_from_str,
    rat_to_str,
)


def test_sign_examples():
    assert qext_sign(QExt(0, 0)) == 0
    assert qext_sign(QExt(-5, 3)) == 1  # -5 + 3*sqrt(3) ~ 0.196
    assert qext_sign(QExt(2, 0)) == 1
    assert qext_sign(QExt(-2, 1)) == -1  # sqrt(3) < 2
    assert qext_sign(QExt(Fraction(-17, 10), 1)) == 1  # sqrt(3) > 1.7
    assert qext_sign(QExt(2, -1)) == 1
    assert qext_sign(QExt(Fraction(17, 10), -1)) == -1


def test_sign_against_high_precision_decimal():
    rng = random.Random(7)
    mpmath.mp.dps = 110
    s3 = mpmath.sqrt(3)
    for _ in range(1000):
        a = Fraction(rng.randint(-(10**6), 10**6), rng.randint(1, 10**6))
        b = Fraction(rng.randint(-(10**6), 10**6), rng.randint(1, 10**6))
        v = QExt(a, b)
        approx = mpmath.mpf(a.numerator) / a.denominator + (
            mpmath.mpf(b.numerator) / b.denominator
        ) * s3
        expect = 0 if approx == 0 else (1 if approx > 0 else -1)
        assert qext_sign(v) == expect


def test_field_axioms_random():
    rng = random.Random(11)

    def rand():
        return QExt(
            Fraction(rng.randint(-50, 50), rng.randint(1, 9)),
            Fraction(rng.randint(-50, 50), rng.randint(1, 9)),
        )

    for _ in range(200):
        x, y, z = rand(), rand(), rand()
        assert (x + y) * z == x * z + y * z
        assert x * (y * z) == (x * y) * z
        assert x - y == -(y - x)
        if not y.is_zero():
            assert (x / y) * y == x
    assert QExt(0, 1) * QExt(0, 1) == 3


def test_division_by_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        QExt(1, 2) / QExt(0, 0)


def test_pow_sqrt3():
    assert qext_pow_sqrt3(0) == 1
    assert qext_pow_sqrt3(1) == QExt(0, 1)
    assert qext_pow_sqrt3(4) == 9
    assert qext_pow_sqrt3(5) == QExt(0, 9)


def test_rat_text_roundtrip():
    assert rat_to_str(Fraction(3, 2)) == "3/2"
    assert rat_to_str(Fraction(-4)) == "-4"
    assert rat_from_str("7/3") == Fraction(7, 3)
    assert rat_from_str("-5") == Fraction(-5)


def test_qext_pair_roundtrip():
    v = QExt(Fraction(-7, 3), Fraction(1, 9))
    assert QExt.from_pair(v.to_pair()) == v


def test_decimal_str_deterministic():
    v = QExt(Fraction(1, 7), Fraction(2, 3))
    s1 = v.decimal_str(30)
    s2 = v.decimal_str(30)
    assert s1 == s2
    mpmath.mp.dps = 50
    approx = mpmath.mpf(1) / 7 + mpmath.mpf(2) / 3 * mpmath.sqrt(3)
    assert abs(mpmath.mpf(s1) - approx) < mpmath.mpf(10) ** (-29)
    assert QExt(-1, 0).decimal_str(2) == "-1.00"


# ---------------------------------------------------------------------------
# LDL^T
# ---------------------------------------------------------------------------


def _mat(rows):
    return SymMatrixQ.from_dense([[QExt(x) if not isinstance(x, QExt) else x for x in r] for r in rows])


def test_ldlt_identity():
    res = ldlt_decompose(_mat([[1, 0], [0, 1]]))
    assert not isinstance(res, NotPSD)
    d, _ = res
    assert d == [QExt(1), QExt(1)]


def test_ldlt_hand_elimination():
    res = ldlt_decompose(_mat([[2, 1], [1, 2]]))
    assert not isinstance(res, NotPSD)
    d, low = res
    assert d == [QExt(2), QExt(Fraction(3, 2))]
    assert low[1][0] == QExt(Fraction(1, 2))


def test_ldlt_negative_pivot():
    res = ldlt_decompose(_mat([[1, 2], [2, 1]]))
    assert isinstance(res, NotPSD)
    assert res.pivot == 1 and res.sign == -1


def test_zero_matrix_psd():
    for dim in (0, 1, 3):
        assert is_psd(SymMatrixQ(dim))


def test_zero_pivot_with_nonzero_column():
    res = ldlt_decompose(_mat([[0, 1], [1, 0]]))
    assert isinstance(res, NotPSD)
    assert res.pivot == 0 and res.sign == 0


def test_rank_one_sqrt3_gram():
    # (1, sqrt(3)) (1, sqrt(3))^T
    g = _mat([[QExt(1), QExt(0, 1)], [QExt(0, 1), QExt(3)]])
    assert is_psd(g)


def test_random_gram_psd_and_reconstruction():
    rng = random.Random(3)
    for trial in range(12):
        dim = rng.randint(1, 5)
        g = [
            [
                QExt(
                    Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                    Fraction(rng.randint(-2, 2), rng.randint(1, 3)),
                )
                for _ in range(dim)
            ]
            for _ in range(dim)
        ]
        gram = SymMatrixQ(dim)
        for i in range(dim):
            for j in range(i + 1):
                acc = QExt(0)
                for k in range(dim):
                    acc = acc + g[i][k] * g[j][k]
                gram.set(i, j, acc)
        res = ldlt_decompose(gram)
        assert not isinstance(res, NotPSD)
        d, low = res
        assert all(qext_sign(x) >= 0 for x in d)
        assert ldlt_reconstruct(d, low) == gram


def test_gram_minus_epsilon_not_psd():
    rng = random.Random(5)
    for trial in range(8):
        dim = rng.randint(1, 4)
        g = [[QExt(Fraction(rng.randint(-5, 5))) for _ in range(dim)] for _ in range(dim)]
        gram = SymMatrixQ(dim)
        for i in range(dim):
            for j in range(i + 1):
                acc = QExt(0)
                for k in range(dim):
                    acc = acc + g[i][k] * g[j][k]
                gram.set(i, j, acc)
        # subtracting more than the largest eigenvalue makes the trace negative,
        # hence some pivot must go negative
        trace = sum((gram.get(i, i) for i in range(dim)), QExt(0))
        eps = trace + 1
        for i in range(dim):
            gram.set(i, i, gram.get(i, i) - eps)
        assert not is_psd(gram)


def test_from_dense_rejects_asymmetric():
    with pytest.raises(ValueError):
        SymMatrixQ.from_dense([[QExt(1), QExt(2)], [QExt(3), QExt(1)]])
