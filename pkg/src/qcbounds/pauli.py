"""n-qubit Pauli string algebra in the symplectic representation.

A string is stored as two bitmasks (x, z) plus a phase i^q, q in {0,1,2,3}.
Site k carries the letter I/X/Z/Y according to (x_k, z_k) being
(0,0)/(1,0)/(0,1)/(1,1).  Products, commutation signs and the support
profile of a pair are all O(n) bit operations; the dense 2^n x 2^n matrix
picture exists only in test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

_LETTER_FROM_BITS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS_FROM_LETTER = {v: k for k, v in _LETTER_FROM_BITS.items()}
_PHASE_STR = {0: "", 1: "i", 2: "-", 3: "-i"}


class PauliString:
    """Immutable signed Pauli string i^phase_exp * P_1 x ... x P_n.

    The phaseless part is Hermitian (a tensor product of I, X, Y, Z), so
    conjugation just negates the phase exponent mod 4.
    """

    __slots__ = ("n", "x", "z", "phase_exp")

    def __init__(self, n: int, x: int, z: int, phase_exp: int = 0):
        if n < 1:
            raise ValueError("need at least one site")
        mask = (1 << n) - 1
        if x & ~mask or z & ~mask:
            raise ValueError("bitmask exceeds the string length")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase_exp", phase_exp & 3)

    def __setattr__(self, name, value):
        raise AttributeError("PauliString is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse e.g. "XZZXI", "-YY", "iZ", "-iXY"."""
        s = text.strip()
        phase = 0
        for prefix, q in (("-i", 3), ("+i", 1), ("-", 2), ("+", 0), ("i", 1)):
            if s.startswith(prefix) and all(c in "IXYZ" for c in s[len(prefix):]) and len(s) > len(prefix):
                phase = q
                s = s[len(prefix):]
                break
        if not s or any(c not in "IXYZ" for c in s):
            raise ValueError(f"not a Pauli string: {text!r}")
        x = z = 0
        for k, c in enumerate(s):
            xb, zb = _BITS_FROM_LETTER[c]
            x |= xb << k
            z |= zb << k
        return cls(len(s), x, z, phase)

    # -- basic queries ---------------------------------------------------

    def letter(self, k: int) -> str:
        return _LETTER_FROM_BITS[((self.x >> k) & 1, (self.z >> k) & 1)]

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def support_mask(self) -> int:
        return self.x | self.z

    def phaseless(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, 0)

    def is_identity_up_to_phase(self) -> bool:
        return self.x == 0 and self.z == 0

    def __eq__(self, other):
        return (
            isinstance(other, PauliString)
            and self.n == other.n
            and self.x == other.x
            and self.z == other.z
            and self.phase_exp == other.phase_exp
        )

    def __hash__(self):
        return hash((self.n, self.x, self.z, self.phase_exp))

    def __repr__(self):
        return f"PauliString.from_str({str(self)!r})"

    def __str__(self):
        letters = "".join(self.letter(k) for k in range(self.n))
        return _PHASE_STR[self.phase_exp] + letters

    # -- algebra ----------------------------------------------------------

    def dagger(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, -self.phase_exp)

    def index(self) -> int:
        """Deterministic position of the phaseless part in the basis
        enumeration: identity first, then lexicographic in (x, z)."""
        return (self.x << self.n) | self.z


def pauli_product(a: PauliString, b: PauliString) -> PauliString:
    """Exact product a*b including the accumulated phase.

    Writing each string as i^(x.z) X^x Z^z, the per-site phase bookkeeping
    collapses to three popcounts.
    """
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    x3 = a.x ^ b.x
    z3 = a.z ^ b.z
    exp = (
        a.phase_exp
        + b.phase_exp
        + (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        + 2 * (a.z & b.x).bit_count()
        - (x3 & z3).bit_count()
    )
    return PauliString(a.n, x3, z3, exp)


def commute_sign(a: PauliString, b: PauliString) -> int:
    """+1 if ab = ba, -1 if ab = -ba (the only two possibilities)."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    form = ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1
    return -1 if form else 1


@dataclass(frozen=True, order=True)
class PairProfile:
    """Support profile (i, j, t, p) of an ordered pair (A, B):

    i = wt(A'), j = wt(B), t = |supp(A') ∩ supp(B)| and p the number of
    overlap sites where the letters agree, so wt(A'B) = i + j - t - p.
    Here A' denotes the conjugate of A (same weights and support).
    """

    i: int
    j: int
    t: int
    p: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.i, self.j, self.t, self.p)

    def product_weight(self) -> int:
        return self.i + self.j - self.t - self.p


def pair_profile(a: PauliString, b: PauliString) -> PairProfile:
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    sa = a.support_mask()
    sb = b.support_mask()
    i = sa.bit_count()
    j = sb.bit_count()
    t = (sa & sb).bit_count()
    m = ((a.x ^ b.x) | (a.z ^ b.z)).bit_count()
    return PairProfile(i, j, t, i + j - t - m)


def all_phaseless(n: int):
    """All 4^n phaseless strings in the deterministic basis order (identity
    first, lexicographic in (x, z))."""
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliString(n, x, z, 0)
