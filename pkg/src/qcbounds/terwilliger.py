"""Symmetry reduction of the moment-matrix SDP.

The 4^n-dimensional moment matrix collapses to small PSD blocks indexed by
pairs (a, k); the variables are orbit averages x over the support-profile
index set, the block coefficients live in Q(sqrt(3)), and every constraint
of the reduced program carries a provenance label.  Also hosts the graph
builder for the independence-number relaxation of self-dual codes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .enumerators import MatrixWeights, krawtchouk
from .exactfield import QExt, Rat, SymMatrixQ, qext_pow_sqrt3, rat_to_str
from .pauli import PauliString, all_phaseless, commute_sign, pauli_product

Quad = tuple[int, int, int, int]

VARIANTS = ("general", "pure", "selfdual", "additive_I", "additive_II", "additive_any")

#: Binomial orientation used inside the beta factor.  "printed" keeps the
#: C(u, t) form; "transposed" would flip it to C(t, u).  The choice is pinned
#: by the exact block-PSD oracle over the stabilizer corpus (see tests) and
#: recorded in every build's metadata.
BETA_BINOMIAL_ORIENTATION = "printed"


def in_index_set(q: Quad, n: int) -> bool:
    i, j, t, p = q
    return 0 <= p <= t <= min(i, j) and i <= n and j <= n and i + j <= t + n


def index_set(n: int) -> list[Quad]:
    """All valid (i, j, t, p), lexicographically ordered."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    for i in range(n + 1):
        for j in range(n + 1):
            for t in range(min(i, j) + 1):
                if i + j > t + n:
                    continue
                for p in range(t + 1):
                    out.append((i, j, t, p))
    return out


def product_weight(q: Quad) -> int:
    i, j, t, p = q
    return i + j - t - p


def class_members(q: Quad, n: int) -> list[Quad]:
    """All ordered quads equivalent to q: same (even) t - p and the triple
    (i, j, i+j-t-p) permuted.  For odd t - p the quad is forced to zero and
    has no class."""
    i, j, t, p = q
    if not in_index_set(q, n):
        raise ValueError(f"{q} is not in the index set for n={n}")
    d = t - p
    if d % 2 == 1:
        return []
    triple = (i, j, product_weight(q))
    members = set()
    seen_assignments = {
        (triple[a], triple[b], triple[c])
        for a, b, c in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
    }
    for ii, jj, mm in seen_assignments:
        tp_sum = ii + jj - mm
        if tp_sum < 0 or (tp_sum - d) % 2 != 0:
            continue
        tt = (tp_sum + d) // 2
        pp = tt - d
        cand = (ii, jj, tt, pp)
        if in_index_set(cand, n):
            members.add(cand)
    return sorted(members)


def canonical_class(q: Quad, n: int) -> Quad | None:
    """Lexicographically smallest member of q's class, or None when the quad
    is forced to zero by the parity rule (t - p odd)."""
    members = class_members(q, n)
    if not members:
        return None
    return members[0]


def all_classes(n: int) -> list[Quad]:
    """Canonical representatives of every non-forced-zero class."""
    reps = {canonical_class(q, n) for q in index_set(n)}
    reps.discard(None)
    return sorted(reps)  # type: ignore[arg-type]


def diag_class(i: int, n: int) -> Quad:
    """Canonical class carrying the weight-i diagonal average, i.e. the class
    of (i, 0, 0, 0), (0, i, 0, 0) and (i, i, i, i)."""
    if i == 0:
        return (0, 0, 0, 0)
    rep = canonical_class((0, i, 0, 0), n)
    assert rep is not None
    return rep


def orbit_size(q: Quad, n: int) -> Rat:
    """Number of ordered Pauli pairs with support profile q.

    Closed form: C(t,p) * 3^(i+j-t) * 2^(t-p) * n!/(t!(i-t)!(j-t)!(n-i-j+t)!).
    """
    i, j, t, p = q
    if not in_index_set(q, n):
        raise ValueError(f"{q} is not in the index set for n={n}")
    multinom = factorial(n) // (
        factorial(t) * factorial(i - t) * factorial(j - t) * factorial(n - i - j + t)
    )
    return Fraction(comb(t, p) * 3 ** (i + j - t) * 2 ** (t - p) * multinom)


def _binom(m: int, r: int) -> int:
    if r < 0 or m < 0 or r > m:
        return 0
    return comb(m, r)


@lru_cache(maxsize=None)
def _beta(m: int, t: int, i: int, j: int, k: int, orientation: str) -> int:
    total = 0
    for u in range(0, m + 1):
        if orientation == "printed":
            b0 = _binom(u, t)
        elif orientation == "transposed":
            b0 = _binom(t, u)
        else:
            raise ValueError(f"unknown beta orientation {orientation!r}")
        if b0 == 0:
            continue
        term = (
            b0
            * _binom(m - 2 * k, m - k - u)
            * _binom(m - k - u, i - u)
            * _binom(m - k - u, j - u)
        )
        if term:
            total += (-1) ** ((t - u) % 2) * term
    return total


@lru_cache(maxsize=None)
def alpha_coeff(
    i: int,
    j: int,
    t: int,
    p: int,
    a: int,
    k: int,
    n: int,
    orientation: str = BETA_BINOMIAL_ORIENTATION,
) -> QExt:
    """Block coefficient alpha(i,j,t,p,a,k) over Q(sqrt(3)).

    Rational when i + j is even; a pure sqrt(3) multiple when odd (the
    exponent of sqrt(q-1) is then half-integral).
    """
    beta = _beta(n - a, t - a, i - a, j - a, k - a, orientation)
    if beta == 0:
        return QExt(0, 0)
    gsum = 0
    for g in range(0, p + 1):
        term = _binom(a, g) * _binom(t - a, p - g)
        if term:
            gsum += (-1) ** ((a - g) % 2) * term * 2 ** (t - a - p + g)
    if gsum == 0:
        return QExt(0, 0)
    power = qext_pow_sqrt3(i + j - 2 * t)  # 3^((i+j)/2 - t), doubled exponent
    return power * (beta * gsum)


def block_index_list(n: int) -> list[tuple[int, int]]:
    """All (a, k) with 0 <= a <= k <= n + a - k; block rows run k..n+a-k."""
    out = []
    for a in range(n + 1):
        for k in range(a, (n + a) // 2 + 1):
            out.append((a, k))
    return sorted(out)


def block_kept_rows(a: int, k: int, n: int, delta: int | None) -> list[int]:
    """Row indices of block (a, k) surviving the pure-code reduction: the
    rows i with 0 < i < delta carry identically-zero variables and are
    removed.  With delta=None no reduction is applied."""
    rows = list(range(k, n + a - k + 1))
    if delta is None:
        return rows
    return [i for i in rows if i == 0 or i >= delta]


def assemble_blocks(
    x: dict[Quad, Rat], n: int, orientation: str = BETA_BINOMIAL_ORIENTATION
) -> list[tuple[tuple[int, int], SymMatrixQ]]:
    """The direct sum of (n+a-2k+1)-dimensional matrices whose (i, j) entry
    is  sum_(t,p) alpha(i,j,t,p,a,k) * x[class(i,j,t,p)].

    ``x`` must be defined on every canonical class it references.
    """
    out = []
    for a, k in block_index_list(n):
        rows = list(range(k, n + a - k + 1))
        dim = len(rows)
        mat = SymMatrixQ(dim)
        for ri, i in enumerate(rows):
            for rj, j in enumerate(rows[: ri + 1]):
                acc = QExt(0, 0)
                for t in range(min(i, j) + 1):
                    if i + j > t + n:
                        continue
                    for p in range(t + 1):
                        rep = canonical_class((i, j, t, p), n)
                        if rep is None:
                            continue
                        if rep not in x:
                            raise KeyError(f"missing x value for class {rep}")
                        xv = x[rep]
                        if xv == 0:
                            continue
                        coeff = alpha_coeff(i, j, t, p, a, k, n, orientation)
                        if not coeff.is_zero():
                            acc = acc + coeff * xv
                mat.set(ri, rj, acc)
        out.append(((a, k), mat))
    return out


def x_from_matrix_weights(lam: MatrixWeights, n: int) -> dict[Quad, Rat]:
    """Orbit averages x = lambda/gamma on every canonical class.

    Asserts that lambda is constant on classes (a structural property of
    moment matrices of real states), which doubles as an oracle check.
    """
    out: dict[Quad, Fraction] = {}
    for rep in all_classes(n):
        gamma = orbit_size(rep, n)
        val = Fraction(lam.get(*rep)) / gamma
        for member in class_members(rep, n):
            mv = Fraction(lam.get(*member)) / orbit_size(member, n)
            if mv != val:
                raise AssertionError(f"matrix weights not class-constant at {member}")
        out[rep] = val
    # forced-zero quads must indeed vanish
    for q in index_set(n):
        if canonical_class(q, n) is None and lam.get(*q) != 0:
            raise AssertionError(f"forced-zero quad {q} has nonzero weight")
    return out


# ---------------------------------------------------------------------------
# the symmetry-reduced feasibility program
# ---------------------------------------------------------------------------


@dataclass
class LinearRow:
    """One labeled constraint  sum coeffs[v]*x_v  (sense)  rhs."""

    label: str
    coeffs: dict[Quad, Rat]
    rhs: Rat
    sense: str = "=="  # "==" or ">="

    def evaluate(self, x: dict[Quad, Rat]) -> Rat:
        return sum((c * x[v] for v, c in self.coeffs.items()), Fraction(0)) - self.rhs


@dataclass
class BlockSpec:
    """PSD block (a, k) with rows `kept`; entry (ri, rj) of the assembled
    matrix is  sum over (class, coeff) pairs of coeff * x_class."""

    a: int
    k: int
    kept: list[int]
    entries: dict[tuple[int, int], list[tuple[Quad, QExt]]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.kept)

    def assemble(self, x: dict[Quad, Rat]) -> SymMatrixQ:
        mat = SymMatrixQ(self.dim)
        for (ri, rj), terms in self.entries.items():
            acc = QExt(0, 0)
            for rep, coeff in terms:
                xv = x[rep]
                if xv != 0:
                    acc = acc + coeff * xv
            mat.set(ri, rj, acc)
        return mat


@dataclass
class PrimalSDP:
    n: int
    K: int
    delta: int
    variant: str
    variables: list[Quad]
    equalities: list[LinearRow]
    inequalities: list[LinearRow]
    blocks: list[BlockSpec]
    meta: dict

    def check_point(self, x: dict[Quad, Rat]) -> dict[str, Rat]:
        """Exact residual of every labeled row at the point x."""
        res = {}
        for row in self.equalities + self.inequalities:
            res[row.label] = row.evaluate(x)
        return res

    def to_json_dict(self) -> dict:
        def quad_key(q: Quad) -> str:
            return ",".join(str(v) for v in q)

        return {
            "format": "qcbounds-primal-sdp",
            "version": 1,
            "n": self.n,
            "K": self.K,
            "delta": self.delta,
            "variant": self.variant,
            "variables": [quad_key(v) for v in self.variables],
            "equalities": [
                {
                    "label": r.label,
                    "coeffs": {quad_key(v): rat_to_str(c) for v, c in sorted(r.coeffs.items())},
                    "rhs": rat_to_str(r.rhs),
                }
                for r in self.equalities
            ],
            "inequalities": [
                {
                    "label": r.label,
                    "coeffs": {quad_key(v): rat_to_str(c) for v, c in sorted(r.coeffs.items())},
                    "rhs": rat_to_str(r.rhs),
                    "sense": r.sense,
                }
                for r in self.inequalities
            ],
            "blocks": [
                {
                    "a": b.a,
                    "k": b.k,
                    "kept": b.kept,
                    "entries": [
                        {
                            "row": ri,
                            "col": rj,
                            "terms": [[quad_key(v), c.to_pair()] for v, c in terms],
                        }
                        for (ri, rj), terms in sorted(b.entries.items())
                    ],
                }
                for b in self.blocks
            ],
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


def _validate_variant(n: int, K: int, delta: int, variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if not (1 <= delta <= n + 1):
        raise ValueError(f"delta must lie in [1, n+1], got {delta}")
    if K < 1:
        raise ValueError("K must be at least 1")
    if variant == "selfdual" and K != 1:
        raise ValueError("self-dual codes have K = 1")
    if variant.startswith("additive") and K & (K - 1):
        raise ValueError("additive codes have K a power of two")


def class_triple(q: Quad) -> tuple[int, int, int]:
    return tuple(sorted((q[0], q[1], product_weight(q))))  # type: ignore[return-value]


def build_primal_sdp(
    n: int,
    K: int,
    delta: int,
    variant: str = "general",
    lp_side_constraints: bool = False,
    orientation: str = BETA_BINOMIAL_ORIENTATION,
) -> PrimalSDP:
    """The symmetry-reduced feasibility SDP for an ((n, K, delta)) code of
    the given class.  Every equality is labeled with the constraint family
    that generated it; pure and self-dual variants additionally shrink the
    PSD blocks by deleting the identically-zero rows."""
    _validate_variant(n, K, delta, variant)
    classes = all_classes(n)
    class_set = set(classes)
    equalities: list[LinearRow] = []
    inequalities: list[LinearRow] = []

    gamma_diag = [orbit_size((i, 0, 0, 0), n) for i in range(n + 1)]

    def diag(i: int) -> Quad:
        return diag_class(i, n)

    equalities.append(LinearRow("norm", {(0, 0, 0, 0): Fraction(1)}, Fraction(1)))

    # projector rows: for each product weight k,
    #   sum_{m(q)=k} gamma_q x_q = (2^n / K) gamma_k x_diag(k)
    for kk in range(n + 1):
        coeffs: dict[Quad, Fraction] = {}
        for q in index_set(n):
            if product_weight(q) != kk:
                continue
            rep = canonical_class(q, n)
            if rep is None:
                continue
            coeffs[rep] = coeffs.get(rep, Fraction(0)) + orbit_size(q, n)
        rep_k = diag(kk)
        coeffs[rep_k] = coeffs.get(rep_k, Fraction(0)) - Fraction(2**n, K) * gamma_diag[kk]
        equalities.append(LinearRow(f"projector[{kk}]", {q: c for q, c in coeffs.items() if c != 0}, Fraction(0)))

    # Knill-Laflamme rows for 0 < j < delta
    for j in range(1, delta):
        coeffs = {}
        for i in range(n + 1):
            c = Fraction(K, 2**n) * krawtchouk(j, i, n) * gamma_diag[i]
            if c != 0:
                coeffs[diag(i)] = coeffs.get(diag(i), Fraction(0)) + c
        coeffs[diag(j)] = coeffs.get(diag(j), Fraction(0)) - gamma_diag[j]
        equalities.append(LinearRow(f"knill_laflamme[{j}]", {q: c for q, c in coeffs.items() if c != 0}, Fraction(0)))

    pure_like = variant in ("pure", "selfdual")
    if pure_like:
        forbidden = set(range(1, delta))
        for rep in classes:
            if forbidden & set(class_triple(rep)):
                equalities.append(LinearRow(f"pure_zero[{rep}]", {rep: Fraction(1)}, Fraction(0)))

    if variant == "selfdual":
        for j in range(n + 1):
            if (n - j) % 2 == 1:
                coeffs = {}
                for i in range(n + 1):
                    c = Fraction((-1) ** i) * krawtchouk(j, i, n) * gamma_diag[i]
                    if c != 0:
                        coeffs[diag(i)] = coeffs.get(diag(i), Fraction(0)) + c
                equalities.append(
                    LinearRow(f"selfdual_shadow[{j}]", {q: c for q, c in coeffs.items() if c != 0}, Fraction(0))
                )
        for j in range(n + 1):
            coeffs = {}
            for i in range(n + 1):
                c = Fraction(K, 2**n) * krawtchouk(j, i, n) * gamma_diag[i]
                if c != 0:
                    coeffs[diag(i)] = coeffs.get(diag(i), Fraction(0)) + c
            coeffs[diag(j)] = coeffs.get(diag(j), Fraction(0)) - gamma_diag[j]
            coeffs = {q: c for q, c in coeffs.items() if c != 0}
            if coeffs:
                equalities.append(LinearRow(f"selfdual_kl[{j}]", coeffs, Fraction(0)))

    if variant in ("additive_I", "additive_II"):
        shift = 1 if variant == "additive_I" else 0
        coeffs = {}
        for i in range(0, n + 1, 2):
            c = Fraction(K * 2**shift, 2**n) * gamma_diag[i]
            coeffs[diag(i)] = coeffs.get(diag(i), Fraction(0)) + c
        equalities.append(LinearRow("additive_type", coeffs, Fraction(1)))
    if variant.startswith("additive"):
        for rep in classes:
            inequalities.append(LinearRow(f"additive_nonneg[{rep}]", {rep: Fraction(1)}, Fraction(0), ">="))

    if lp_side_constraints:
        for j in range(n + 1):
            kb = {}
            for i in range(n + 1):
                c = Fraction(K, 2**n) * krawtchouk(j, i, n) * gamma_diag[i]
                if c != 0:
                    kb[diag(i)] = kb.get(diag(i), Fraction(0)) + c
            kb[diag(j)] = kb.get(diag(j), Fraction(0)) - gamma_diag[j]
            kb = {q: c for q, c in kb.items() if c != 0}
            if kb:
                inequalities.append(LinearRow(f"lp_kb[{j}]", kb, Fraction(0), ">="))
            sh = {}
            for i in range(n + 1):
                c = Fraction((-1) ** i, 2**n) * krawtchouk(j, i, n) * gamma_diag[i]
                if c != 0:
                    sh[diag(i)] = sh.get(diag(i), Fraction(0)) + c
            inequalities.append(LinearRow(f"lp_shadow[{j}]", sh, Fraction(0), ">="))

    blocks: list[BlockSpec] = []
    reduction_delta = delta if pure_like else None
    for a, k in block_index_list(n):
        kept = block_kept_rows(a, k, n, reduction_delta)
        if not kept:
            continue
        spec = BlockSpec(a, k, kept)
        for ri, i in enumerate(kept):
            for rj, j in enumerate(kept[: ri + 1]):
                terms = []
                for t in range(min(i, j) + 1):
                    if i + j > t + n:
                        continue
                    for p in range(t + 1):
                        rep = canonical_class((i, j, t, p), n)
                        if rep is None:
                            continue
                        coeff = alpha_coeff(i, j, t, p, a, k, n, orientation)
                        if not coeff.is_zero():
                            terms.append((rep, coeff))
                if terms:
                    spec.entries[(ri, rj)] = terms
        blocks.append(spec)

    return PrimalSDP(
        n=n,
        K=K,
        delta=delta,
        variant=variant,
        variables=classes,
        equalities=equalities,
        inequalities=inequalities,
        blocks=blocks,
        meta={
            "beta_orientation": orientation,
            "lp_side_constraints": lp_side_constraints,
            "block_reduction": "pure" if pure_like else "none",
        },
    )


# ---------------------------------------------------------------------------
# graph relaxation for self-dual codes
# ---------------------------------------------------------------------------


@dataclass
class LovaszGraph:
    """Simple graph on the Pauli strings of weight >= delta; two vertices are
    adjacent when they anticommute or their product has weight in (0, delta)."""

    n: int
    delta: int
    vertices: list[PauliString]

    def adjacent(self, u: int, v: int) -> bool:
        if u == v:
            return False
        a, b = self.vertices[u], self.vertices[v]
        if commute_sign(a, b) == -1:
            return True
        w = pauli_product(a, b.dagger()).weight()
        return 0 < w < self.delta

    def edge_count(self) -> int:
        cnt = 0
        for u in range(len(self.vertices)):
            for v in range(u + 1, len(self.vertices)):
                if self.adjacent(u, v):
                    cnt += 1
        return cnt

    def export_theta_sdp(self, path) -> None:
        """Write the independence-number SDP in SDPA sparse format.

        The matrix variable is Delta = [[1, m^T], [m, M]] >= 0; constraints
        pin Delta_00 = 1, tie the diagonal to the first row, and zero the
        adjacent entries.  The objective is tr(M).
        """
        nv = len(self.vertices)
        dim = nv + 1
        lines = []
        lines.append('"theta SDP: vertices are Pauli strings, weight >= delta"')
        constraints = []  # (rhs, [(row, col, value)]) with 1-based indices
        constraints.append((Fraction(1), [(1, 1, Fraction(1))]))
        for v in range(nv):
            constraints.append(
                (Fraction(0), [(v + 2, v + 2, Fraction(1)), (1, v + 2, Fraction(-1, 2))])
            )
        for u in range(nv):
            for v in range(u + 1, nv):
                if self.adjacent(u, v):
                    constraints.append((Fraction(0), [(u + 2, v + 2, Fraction(1))]))
        lines.append(f"{len(constraints)}")
        lines.append("1")
        lines.append(f"{dim}")
        lines.append(" ".join(_sdpa_num(rhs) for rhs, _ in constraints))
        for v in range(nv):
            lines.append(f"0 1 {v + 2} {v + 2} 1")
        for idx, (_, ents) in enumerate(constraints, start=1):
            for r, c, val in ents:
                lines.append(f"{idx} 1 {r} {c} {_sdpa_num(val)}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _sdpa_num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return repr(float(v))


def build_lovasz_graph(n: int, delta: int) -> LovaszGraph:
    if n > 8:
        raise ValueError("graph builder capped at n = 8")
    vertices = [e for e in all_phaseless(n) if e.weight() >= delta]
    return LovaszGraph(n, delta, vertices)
