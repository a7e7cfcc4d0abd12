from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from qcbounds.pauli import (
    PairProfile,
    PauliString,
    all_phaseless,
    commute_sign,
    pair_profile,
    pauli_product,
)

# ---------------------------------------------------------------------------
# dense 2^n x 2^n oracle over exact complex rationals (tests only)
# ---------------------------------------------------------------------------

C0 = (Fraction(0), Fraction(0))
I_POW = {
    0: (Fraction(1), Fraction(0)),
    1: (Fraction(0), Fraction(1)),
    2: (Fraction(-1), Fraction(0)),
    3: (Fraction(0), Fraction(-1)),
}


def dense(p: PauliString):
    dim = 2**p.n
    mat = [[C0] * dim for _ in range(dim)]
    for col in range(dim):
        q = (p.phase_exp + (p.x & p.z).bit_count() + 2 * (p.z & col).bit_count()) & 3
        mat[col ^ p.x][col] = I_POW[q]
    return mat


def matmul(a, b):
    dim = len(a)
    out = [[C0] * dim for _ in range(dim)]
    for i in range(dim):
        for k in range(dim):
            are, aim = a[i][k]
            if are == 0 and aim == 0:
                continue
            for j in range(dim):
                bre, bim = b[k][j]
                if bre == 0 and bim == 0:
                    continue
                cre, cim = out[i][j]
                out[i][j] = (cre + are * bre - aim * bim, cim + are * bim + aim * bre)
    return out


def test_string_parse_format_roundtrip():
    for text in ("XZZXI", "-YY", "iZ", "-iXY", "IIII", "+X"):
        p = PauliString.from_str(text)
        assert PauliString.from_str(str(p)) == p
    assert str(PauliString.from_str("+X")) == "X"
    with pytest.raises(ValueError):
        PauliString.from_str("XQ")
    with pytest.raises(ValueError):
        PauliString.from_str("-i")


def test_single_qubit_products():
    X, Y, Z = (PauliString.from_str(s) for s in "XYZ")
    assert pauli_product(X, Y) == PauliString.from_str("iZ")
    assert pauli_product(Y, X) == PauliString.from_str("-iZ")
    assert pauli_product(Y, Z) == PauliString.from_str("iX")
    assert pauli_product(Z, X) == PauliString.from_str("iY")
    assert pauli_product(X, X) == PauliString.identity(1)


def test_identity_neutral():
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(1, 6)
        e = PauliString(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))
        ident = PauliString.identity(n)
        assert pauli_product(e, ident) == e
        assert pauli_product(ident, e) == e


def test_product_against_dense_oracle_n5():
    a = PauliString.from_str("XZZXI")
    b = PauliString.from_str("IXZZX")
    prod = pauli_product(a, b)
    assert dense(prod) == matmul(dense(a), dense(b))


def test_product_against_dense_oracle_random():
    rng = random.Random(9)
    for _ in range(30):
        n = rng.randint(1, 3)
        a = PauliString(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))
        b = PauliString(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))
        assert dense(pauli_product(a, b)) == matmul(dense(a), dense(b))


def test_dagger_is_conjugate_transpose():
    rng = random.Random(13)
    for _ in range(20):
        n = rng.randint(1, 3)
        a = PauliString(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))
        m = dense(a)
        md = dense(a.dagger())
        dim = len(m)
        for i in range(dim):
            for j in range(dim):
                re, im = m[i][j]
                assert md[j][i] == (re, -im)


def test_associativity_including_phase():
    rng = random.Random(4)
    for n in (1, 2, 3):
        for _ in range(700 if n == 3 else 200):
            ps = [
                PauliString(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))
                for _ in range(3)
            ]
            a, b, c = ps
            assert pauli_product(pauli_product(a, b), c) == pauli_product(a, pauli_product(b, c))


def test_commute_sign_matches_symplectic_form_exhaustive_n2():
    for a in all_phaseless(2):
        for b in all_phaseless(2):
            form = ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2
            assert commute_sign(a, b) == (1 if form == 0 else -1)


def test_commute_sign_against_dense_n4():
    rng = random.Random(21)
    for _ in range(40):
        a = PauliString(4, rng.getrandbits(4), rng.getrandbits(4), 0)
        b = PauliString(4, rng.getrandbits(4), rng.getrandbits(4), 0)
        ab = matmul(dense(a), dense(b))
        ba = matmul(dense(b), dense(a))
        if commute_sign(a, b) == 1:
            assert ab == ba
        else:
            neg = [[(-re, -im) for re, im in row] for row in ba]
            assert ab == neg


def test_self_commutes():
    rng = random.Random(6)
    for _ in range(20):
        n = rng.randint(1, 6)
        e = PauliString(n, rng.getrandbits(n), rng.getrandbits(n), 0)
        assert commute_sign(e, e) == 1


# ---------------------------------------------------------------------------
# pair profiles
# ---------------------------------------------------------------------------


def in_index_range(prof: PairProfile, n: int) -> bool:
    i, j, t, p = prof.as_tuple()
    return 0 <= p <= t <= min(i, j) and i + j <= t + n


def test_profile_trivial_identity():
    ident = PauliString.identity(5)
    assert pair_profile(ident, ident) == PairProfile(0, 0, 0, 0)


def test_profile_equal_strings():
    a = PauliString.from_str("XZZXI")
    assert pair_profile(a, a) == PairProfile(4, 4, 4, 4)


def test_profile_shifted_strings():
    a = PauliString.from_str("XZZXI")
    b = PauliString.from_str("IXZZX")
    prof = pair_profile(a, b)
    # supports {0,1,2,3} and {1,2,3,4}: t = 3; letters agree only at site 2 (Z,Z)
    assert prof == PairProfile(4, 4, 3, 1)
    assert prof.product_weight() == pauli_product(a.dagger(), b).weight()


def test_profiles_exhaustive_small_n():
    for n in (1, 2, 3):
        for a in all_phaseless(n):
            for b in all_phaseless(n):
                prof = pair_profile(a, b)
                assert in_index_range(prof, n)
                assert prof.product_weight() == pauli_product(a.dagger(), b).weight()


def test_length_mismatch_rejected():
    a = PauliString.identity(2)
    b = PauliString.identity(3)
    with pytest.raises(ValueError):
        pauli_product(a, b)
    with pytest.raises(ValueError):
        commute_sign(a, b)
    with pytest.raises(ValueError):
        pair_profile(a, b)


def test_basis_order_identity_first():
    basis = list(all_phaseless(2))
    assert basis[0] == PauliString.identity(2)
    assert [e.index() for e in basis] == sorted(e.index() for e in basis)
    assert len(set(e.index() for e in basis)) == 16
