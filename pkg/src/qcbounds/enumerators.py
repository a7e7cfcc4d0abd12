"""Quantum weight enumerators and the moment-matrix oracles.

The A-enumerator of a stabilizer code is computed exactly from the group
weight histogram (fast, n <= 12).  A dense-projector oracle provides the
moment matrix of triple trace products for n <= 5, from which the matrix
weights are obtained by summing over support-profile classes; it is the
ground truth that every symmetry-reduced quantity is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .exactfield import Rat
from .pauli import PairProfile, PauliString, all_phaseless, commute_sign, pair_profile, pauli_product


def krawtchouk(j: int, i: int, n: int) -> Rat:
    """Quaternary Krawtchouk polynomial K_j(i; n), exact."""
    if not (0 <= i <= n and 0 <= j <= n):
        raise ValueError(f"indices out of range: j={j}, i={i}, n={n}")
    total = 0
    for alpha in range(0, j + 1):
        c = comb(i, alpha) * comb(n - i, j - alpha)
        if c:
            total += (-1) ** alpha * 3 ** (j - alpha) * c
    return Fraction(total)


@dataclass
class WeightEnumerator:
    """Length-(n+1) exact rational vector of enumerator coefficients."""

    n: int
    values: list[Rat]

    def __post_init__(self):
        if len(self.values) != self.n + 1:
            raise ValueError("enumerator must have n+1 coefficients")
        self.values = [Fraction(v) for v in self.values]

    def __getitem__(self, j: int) -> Rat:
        return self.values[j]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        if isinstance(other, WeightEnumerator):
            return self.n == other.n and self.values == other.values
        return list(self.values) == [Fraction(v) for v in other]


def macwilliams_transform(a: WeightEnumerator) -> WeightEnumerator:
    """B_j = 2^-n sum_i K_j(i;n) A_i."""
    n = a.n
    scale = Fraction(1, 2**n)
    vals = [scale * sum(krawtchouk(j, i, n) * a[i] for i in range(n + 1)) for j in range(n + 1)]
    return WeightEnumerator(n, vals)


def shadow_transform(a: WeightEnumerator) -> WeightEnumerator:
    """S_j = 2^-n sum_i (-1)^i K_j(i;n) A_i."""
    n = a.n
    scale = Fraction(1, 2**n)
    vals = [
        scale * sum((-1) ** i * krawtchouk(j, i, n) * a[i] for i in range(n + 1))
        for j in range(n + 1)
    ]
    return WeightEnumerator(n, vals)


class StabilizerCode:
    """A stabilizer code given by a list of commuting, independent generators.

    Generators must carry real signs (+1/-1); the full group of 2^(n-k)
    signed elements is enumerated on construction (so n - k stays small).
    """

    def __init__(self, n: int, generators: list[PauliString]):
        if n < 1:
            raise ValueError("n must be positive")
        for g in generators:
            if g.n != n:
                raise ValueError("generator length mismatch")
            if g.phase_exp not in (0, 2):
                raise ValueError(f"generator {g} is not Hermitian with sign +-1")
        for idx, g in enumerate(generators):
            for h in generators[idx + 1 :]:
                if commute_sign(g, h) != 1:
                    raise ValueError(f"generators {g} and {h} anticommute")
        if _symplectic_rank(generators, n) != len(generators):
            raise ValueError("generators are not independent")
        self.n = n
        self.generators = list(generators)
        self.k = n - len(generators)
        self.K = 2**self.k
        self.group = _expand_group(n, generators)
        # independence of the generators rules out -1 in the group
        assert all(g.phase_exp in (0, 2) for g in self.group)

    @classmethod
    def from_strings(cls, lines: list[str]) -> "StabilizerCode":
        gens = [PauliString.from_str(s) for s in lines if s.strip()]
        if not gens:
            raise ValueError("no generators given")
        return cls(gens[0].n, gens)

    @classmethod
    def trivial(cls, n: int) -> "StabilizerCode":
        """The code with no generators: K = 2^n (the full space)."""
        code = cls.__new__(cls)
        code.n = n
        code.generators = []
        code.k = n
        code.K = 2**n
        code.group = [PauliString.identity(n)]
        return code

    @classmethod
    def from_file(cls, path) -> "StabilizerCode":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        return cls.from_strings(lines)


def _symplectic_rank(gens: list[PauliString], n: int) -> int:
    rows = [(g.x << n) | g.z for g in gens]
    rank = 0
    for bit in range(2 * n - 1, -1, -1):
        pivot = None
        for idx in range(rank, len(rows)):
            if (rows[idx] >> bit) & 1:
                pivot = idx
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for idx in range(len(rows)):
            if idx != rank and (rows[idx] >> bit) & 1:
                rows[idx] ^= rows[rank]
        rank += 1
    return rank


def _expand_group(n: int, gens: list[PauliString]) -> list[PauliString]:
    if len(gens) > 12:
        raise ValueError("group enumeration capped at 2^12 elements")
    group = [PauliString.identity(n)]
    for g in gens:
        group = group + [pauli_product(g, h) for h in group]
    return group


def stabilizer_weight_distribution(code: StabilizerCode) -> WeightEnumerator:
    """A_j(Pi) = K^2 * #(weight-j stabilizer elements), so A_0 = K^2."""
    if code.n - code.k > 12:
        raise ValueError("weight distribution capped at 2^12 group elements")
    hist = [0] * (code.n + 1)
    for g in code.group:
        hist[g.weight()] += 1
    k2 = Fraction(code.K) ** 2
    return WeightEnumerator(code.n, [k2 * h for h in hist])


def code_distance(code: StabilizerCode) -> int:
    """Brute-force distance over normalizer cosets (test support, n <= 7).

    For k >= 1 this is the minimum weight in N(S) \\ S; for k = 0 it is the
    minimum weight of a non-identity stabilizer element (pure convention).
    """
    if code.n > 7:
        raise ValueError("brute-force distance capped at n = 7")
    if code.k == 0:
        weights = [g.weight() for g in code.group if g.weight() > 0]
        return min(weights) if weights else code.n + 1
    in_group = {(g.x, g.z) for g in code.group}
    best = None
    for e in all_phaseless(code.n):
        if e.weight() == 0 or (e.x, e.z) in in_group:
            continue
        if all(commute_sign(e, g) == 1 for g in code.generators):
            if best is None or e.weight() < best:
                best = e.weight()
    return best if best is not None else code.n + 1


# ---------------------------------------------------------------------------
# Dense-projector oracle (n <= 5)
# ---------------------------------------------------------------------------

#: complex rationals as (re, im) Fraction pairs
_CZero = (Fraction(0), Fraction(0))

_I_POW = {
    0: (Fraction(1), Fraction(0)),
    1: (Fraction(0), Fraction(1)),
    2: (Fraction(-1), Fraction(0)),
    3: (Fraction(0), Fraction(-1)),
}


def _pauli_column_action(e: PauliString, basis: int) -> tuple[int, int]:
    """E|basis> = i^q |basis ^ x>; returns (target, q).

    Uses E = i^(phase + |x&z|) X^x Z^z and X^x Z^z |l> = (-1)^(z.l) |l^x>.
    """
    q = (e.phase_exp + (e.x & e.z).bit_count() + 2 * (e.z & basis).bit_count()) & 3
    return basis ^ e.x, q


def dense_projector(code: StabilizerCode):
    """The 2^n x 2^n code projector as exact complex rationals."""
    if code.n > 5:
        raise ValueError("dense projector capped at n = 5")
    dim = 2**code.n
    scale = Fraction(1, 2 ** (code.n - code.k))
    mat = [[_CZero] * dim for _ in range(dim)]
    for g in code.group:
        for col in range(dim):
            row, q = _pauli_column_action(g, col)
            re, im = _I_POW[q]
            cur = mat[row][col]
            mat[row][col] = (cur[0] + scale * re, cur[1] + scale * im)
    return mat


def _trace_pauli_times(e: PauliString, mat) -> tuple[Fraction, Fraction]:
    """tr(E * mat) for a dense complex-rational matrix, exactly."""
    re = Fraction(0)
    im = Fraction(0)
    dim = len(mat)
    for col in range(dim):
        row, q = _pauli_column_action(e, col)
        pre, pim = _I_POW[q]
        mre, mim = mat[col][row]  # (E*mat)_{rr} sums E_{r,c} mat_{c,r}; see below
        re += pre * mre - pim * mim
        im += pre * mim + pim * mre
    return re, im


@dataclass
class MomentMatrix:
    """Real part of the moment matrix of triple trace products, stored as a
    sparse map over ordered pairs of basis indices."""

    n: int
    entries: dict[tuple[int, int], Rat] = field(default_factory=dict)

    def get(self, a: int, b: int) -> Rat:
        return self.entries.get((a, b), Fraction(0))


def gamma_moment_matrix(code: StabilizerCode) -> MomentMatrix:
    """Exact moment matrix from the dense projector, with rho = Pi/K.

    Entry (a, b) is tr(Ea' rho) tr(Eb rho) tr(Ea Eb' rho) where ' denotes
    conjugation; only the real part is stored (the imaginary part lives
    entirely on anticommuting pairs).
    """
    if code.n > 5:
        raise ValueError("moment matrix oracle capped at n = 5")
    n = code.n
    basis = list(all_phaseless(n))
    proj = dense_projector(code)
    inv_k = Fraction(1, code.K)
    traces: list[Fraction] = []
    for e in basis:
        re, im = _trace_pauli_times(e, proj)
        if im != 0:
            raise AssertionError("Hermitian Pauli must have a real trace against Pi")
        traces.append(re * inv_k)
    support = [idx for idx, v in enumerate(traces) if v != 0]
    entries: dict[tuple[int, int], Fraction] = {}
    for ia in support:
        ea_dag = basis[ia].dagger()
        fa = traces[ia]  # tr(Ea' rho) = tr(Ea rho): Ea Hermitian
        for ib in support:
            prod = pauli_product(basis[ia], basis[ib].dagger())
            if prod.phase_exp in (1, 3):
                continue  # purely imaginary entry; real part is zero
            fc = traces[(prod.x << n) | prod.z]
            if fc == 0:
                continue
            sign = 1 if prod.phase_exp == 0 else -1
            val = fa * traces[ib] * (sign * fc)
            if val != 0:
                entries[(ia, ib)] = val
    return MomentMatrix(n, entries)


@dataclass
class MatrixWeights:
    """Orbit sums of the moment matrix over support profiles (i, j, t, p)."""

    n: int
    values: dict[tuple[int, int, int, int], Rat] = field(default_factory=dict)

    def get(self, i: int, j: int, t: int, p: int) -> Rat:
        return self.values.get((i, j, t, p), Fraction(0))


def matrix_weights_from_code(code: StabilizerCode) -> MatrixWeights:
    """Matrix weights by summing the oracle moment matrix over all ordered
    pairs with a given support profile (n <= 5)."""
    gamma = gamma_moment_matrix(code)
    n = code.n
    basis = list(all_phaseless(n))
    out: dict[tuple[int, int, int, int], Fraction] = {}
    for (ia, ib), val in gamma.entries.items():
        prof = pair_profile(basis[ia], basis[ib]).as_tuple()
        out[prof] = out.get(prof, Fraction(0)) + val
    return MatrixWeights(n, {k: v for k, v in out.items() if v != 0})


def enumerator_from_moment_diagonal(gamma: MomentMatrix) -> WeightEnumerator:
    """A_j(rho) recovered by summing the moment diagonal over weight shells."""
    n = gamma.n
    vals = [Fraction(0)] * (n + 1)
    for e in all_phaseless(n):
        idx = (e.x << n) | e.z
        vals[e.weight()] += gamma.get(idx, idx)
    return WeightEnumerator(n, vals)
