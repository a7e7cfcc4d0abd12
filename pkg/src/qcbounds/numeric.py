"""Desk-scale numerical solving and rounding to exact certificates.

The dual instances are homogeneous cone programs whose equality rows have
coefficients in Q(sqrt(3)) but whose variables are real, so each row splits
into two rational rows.  Solving happens in an exactly-computed nullspace
parametrization: any point reconstructed from the reduced coordinates
satisfies every equality identically, which reduces certificate rounding
to rationalizing the reduced coordinates and re-verifying PSD-ness.

The built-in solver is a dense primal-dual interior-point method over
mpmath reals; it never touches the exact verification path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .dualcert import Certificate, DualInstance, verify_certificate
from .exactfield import QExt, Rat, rat_from_str, rat_to_str
from .terwilliger import PrimalSDP

# ---------------------------------------------------------------------------
# exact linear algebra over the rationals
# ---------------------------------------------------------------------------


def split_form(form: dict[int, QExt], nvars: int) -> tuple[list[Rat], list[Rat]]:
    """A Q(sqrt(3))-linear form on real variables is two rational forms."""
    ra = [Fraction(0)] * nvars
    rb = [Fraction(0)] * nvars
    for idx, c in form.items():
        ra[idx] = c.a
        rb[idx] = c.b
    return ra, rb


def split_equalities(
    rows: list[tuple[str, dict[int, QExt]]], nvars: int
) -> list[tuple[str, list[Rat], Rat]]:
    """Homogeneous Q(sqrt(3)) rows -> rational rows (label, coeffs, rhs=0)."""
    out = []
    for label, form in rows:
        ra, rb = split_form(form, nvars)
        if any(v != 0 for v in ra):
            out.append((label + ".rat", ra, Fraction(0)))
        if any(v != 0 for v in rb):
            out.append((label + ".irr", rb, Fraction(0)))
    return out


def affine_solution_space(
    rows: list[tuple[list[Rat], Rat]], nvars: int
) -> tuple[list[Rat], list[list[Rat]]] | None:
    """Exact solution set {v : A v = b} as (particular, nullspace basis);
    None when inconsistent.  Gauss-Jordan over Fractions."""
    mat = [list(coeffs) + [rhs] for coeffs, rhs in rows]
    m = len(mat)
    pivot_col_of_row: list[int] = []
    row = 0
    for col in range(nvars):
        piv = None
        for r in range(row, m):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = 1 / mat[row][col]
        mat[row] = [v * inv for v in mat[row]]
        for r in range(m):
            if r != row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[row])]
        pivot_col_of_row.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if mat[r][nvars] != 0:
            return None
    pivot_cols = set(pivot_col_of_row)
    free_cols = [c for c in range(nvars) if c not in pivot_cols]
    particular = [Fraction(0)] * nvars
    for r, col in enumerate(pivot_col_of_row):
        particular[col] = mat[r][nvars]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * nvars
        vec[fc] = Fraction(1)
        for r, col in enumerate(pivot_col_of_row):
            vec[col] = -mat[r][fc]
        basis.append(vec)
    return particular, basis


def random_row_feasible_point(inst: DualInstance, rng, bound: int = 5) -> list[QExt]:
    """A random exact point satisfying every equality of the instance (no
    PSD requirement); used by soundness tests."""
    rows = [(coeffs, rhs) for _, coeffs, rhs in split_equalities(inst.equalities, inst.nvars)]
    space = affine_solution_space(rows, inst.nvars)
    assert space is not None, "homogeneous system cannot be inconsistent"
    particular, basis = space
    point = list(particular)
    for vec in basis:
        c = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if c:
            point = [p + c * v for p, v in zip(point, vec)]
    return [QExt(v) for v in point]


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of an mpmath float."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    val = Fraction(int(man), 1) * (Fraction(2) ** exp)
    return -val if sign else val


# ---------------------------------------------------------------------------
# solver variable space: instance variables embedded into cone blocks
# ---------------------------------------------------------------------------


@dataclass
class _ConeBlock:
    name: str
    dim: int
    # maps solver variable -> list of (r, c) positions inside this block
    positions: dict[int, list[tuple[int, int]]] = field(default_factory=dict)


class SolverSpace:
    """Cone embedding of a dual instance plus solver-side rows.

    Free scalars (the C's and G) are split into differences of two
    non-negative halves so that every solver variable lives in exactly one
    cone block; a trace row with slack keeps the feasible set bounded.
    """

    def __init__(self, inst: DualInstance, extra_rows=(), normalization: int = 100):
        self.inst = inst
        self.normalization = normalization
        names: list[str] = []
        self.cones: list[_ConeBlock] = []
        # instance variable -> affine combo of solver variables
        self.vmap: list[list[tuple[int, int]]] = [[] for _ in range(inst.nvars)]

        def new_var(name: str) -> int:
            names.append(name)
            return len(names) - 1

        for bi, blk in enumerate(inst.blocks):
            cone = _ConeBlock(f"Y[{blk.a},{blk.k}]", blk.dim)
            for ri in range(blk.dim):
                for rj in range(ri + 1):
                    w = new_var(f"Y[{blk.a},{blk.k}][{ri},{rj}]")
                    vidx = inst.y_var_index(bi, ri, rj)
                    self.vmap[vidx].append((w, 1))
                    cone.positions[w] = [(ri, rj)] if ri == rj else [(ri, rj), (rj, ri)]
            self.cones.append(cone)
        for name, vidx in sorted(inst.scalar_indices().items()):
            wp = new_var(f"{name}+")
            cone = _ConeBlock(f"{name}+", 1, {wp: [(0, 0)]})
            self.cones.append(cone)
            wm = new_var(f"{name}-")
            cone = _ConeBlock(f"{name}-", 1, {wm: [(0, 0)]})
            self.cones.append(cone)
            self.vmap[vidx] = [(wp, 1), (wm, -1)]
        for quad, vidx in sorted(inst.g_indices().items()):
            w = new_var(f"g{quad}")
            self.cones.append(_ConeBlock(f"g{quad}", 1, {w: [(0, 0)]}))
            self.vmap[vidx] = [(w, 1)]
        self.slack = new_var("slack")
        self.cones.append(_ConeBlock("slack", 1, {self.slack: [(0, 0)]}))
        self.nw = len(names)
        self.w_names = names

        # rational rows over the solver variables
        rows: list[tuple[list[Rat], Rat]] = []
        for label, coeffs, rhs in split_equalities(inst.equalities, inst.nvars):
            rows.append((self._compose(coeffs), rhs))
        for label, form, rhs in extra_rows:
            rat = [Fraction(0)] * inst.nvars
            irr = [Fraction(0)] * inst.nvars
            for idx, c in form.items():
                rat[idx] = c.a
                irr[idx] = c.b
            rows.append((self._compose(rat), rhs.a))
            if any(v != 0 for v in irr) or rhs.b != 0:
                rows.append((self._compose(irr), rhs.b))
        trace = [Fraction(0)] * self.nw
        for cone in self.cones:
            for w, positions in cone.positions.items():
                if any(r == c for r, c in positions):
                    trace[w] += 1
        rows.append((trace, Fraction(normalization)))
        self.rows = rows
        space = affine_solution_space(rows, self.nw)
        self.consistent = space is not None
        if space is not None:
            self.w0, self.basis = space
        else:
            self.w0, self.basis = [Fraction(0)] * self.nw, []

    def _compose(self, v_coeffs: list[Rat]) -> list[Rat]:
        out = [Fraction(0)] * self.nw
        for vidx, c in enumerate(v_coeffs):
            if c:
                for w, sgn in self.vmap[vidx]:
                    out[w] += sgn * c
        return out

    # -- exact reconstruction ------------------------------------------

    def w_from_u(self, u: list[Fraction]) -> list[Fraction]:
        w = list(self.w0)
        for coeff, vec in zip(u, self.basis):
            if coeff:
                for idx, b in enumerate(vec):
                    if b:
                        w[idx] += coeff * b
        return w

    def v_from_w(self, w: list[Fraction]) -> list[Fraction]:
        return [sum((Fraction(sgn) * w[widx] for widx, sgn in combo), Fraction(0)) for combo in self.vmap]

    def objective_vector_u(self) -> tuple[list[tuple[Rat, Rat]], tuple[Rat, Rat]]:
        """The instance objective as a functional on the reduced coordinates.

        The value is (rat + irr*sqrt(3)) with both parts exact rational
        functionals; returns (per-u coefficient pairs, constant offset pair).
        """
        rat = [Fraction(0)] * self.inst.nvars
        irr = [Fraction(0)] * self.inst.nvars
        for idx, c in self.inst.objective.items():
            rat[idx] = c.a
            irr[idx] = c.b
        rat_w = self._compose(rat)
        irr_w = self._compose(irr)
        coeffs = [
            (
                sum((a * b for a, b in zip(rat_w, vec) if b), Fraction(0)),
                sum((a * b for a, b in zip(irr_w, vec) if b), Fraction(0)),
            )
            for vec in self.basis
        ]
        offset = (
            sum((a * b for a, b in zip(rat_w, self.w0) if b), Fraction(0)),
            sum((a * b for a, b in zip(irr_w, self.w0) if b), Fraction(0)),
        )
        return coeffs, offset

    def exact_objective(self, v: list[Fraction]) -> QExt:
        acc = QExt(0)
        for idx, c in self.inst.objective.items():
            if v[idx]:
                acc = acc + c * v[idx]
        return acc


# ---------------------------------------------------------------------------
# dense multiprecision barrier solver for  max c.u  s.t.  F0 + sum u_l F_l >= 0
# ---------------------------------------------------------------------------


class _LMI:
    """Block-diagonal LMI data: F0 dense per block, columns sparse."""

    def __init__(self, dims: list[int]):
        self.dims = dims
        self.f0 = [[[mp.mpf(0)] * d for _ in range(d)] for d in dims]
        self.cols: list[list[tuple[int, int, int, mpmath.mpf]]] = []

    def add_column(self, entries: list[tuple[int, int, int, Fraction]]) -> None:
        self.cols.append([(b, r, c, mp.mpf(v.numerator) / v.denominator) for b, r, c, v in entries])

    def eval_point(self, u: list[mpmath.mpf]):
        mats = [[row[:] for row in blk] for blk in self.f0]
        for coeff, col in zip(u, self.cols):
            if coeff:
                for b, r, c, v in col:
                    mats[b][r][c] += coeff * v
                    if r != c:
                        mats[b][c][r] += coeff * v
        return mats


def _chol(mat, dim):
    """Dense Cholesky; None when not positive definite."""
    low = [[mp.mpf(0)] * dim for _ in range(dim)]
    for j in range(dim):
        acc = mat[j][j]
        for k in range(j):
            acc -= low[j][k] * low[j][k]
        if acc <= 0:
            return None
        low[j][j] = mp.sqrt(acc)
        inv = 1 / low[j][j]
        for i in range(j + 1, dim):
            s = mat[i][j]
            for k in range(j):
                s -= low[i][k] * low[j][k]
            low[i][j] = s * inv
    return low


def _chol_inverse(low, dim):
    """Full inverse from a Cholesky factor: S^-1 = L^-T L^-1."""
    inv_l = [[mp.mpf(0)] * dim for _ in range(dim)]
    for j in range(dim):
        inv_l[j][j] = 1 / low[j][j]
        for i in range(j + 1, dim):
            s = mp.mpf(0)
            for k in range(j, i):
                s += low[i][k] * inv_l[k][j]
            inv_l[i][j] = -s / low[i][i]
    out = [[mp.mpf(0)] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1):
            s = mp.mpf(0)
            for k in range(i, dim):
                s += inv_l[k][i] * inv_l[k][j]
            out[i][j] = s
            out[j][i] = s
    return out


def _solve_spd(mat, rhs, dim):
    low = _chol(mat, dim)
    if low is None:
        return None
    y = [mp.mpf(0)] * dim
    for i in range(dim):
        s = rhs[i]
        for k in range(i):
            s -= low[i][k] * y[k]
        y[i] = s / low[i][i]
    x = [mp.mpf(0)] * dim
    for i in range(dim - 1, -1, -1):
        s = y[i]
        for k in range(i + 1, dim):
            s -= low[k][i] * x[k]
        x[i] = s / low[i][i]
    return x


@dataclass
class _BarrierResult:
    u: list
    objective: mpmath.mpf
    gap: mpmath.mpf
    newton_steps: int
    converged: bool


def _barrier_maximize(
    lmi: _LMI,
    c: list,
    u0: list,
    target_gap,
    max_newton: int = 6000,
    theta: int = 10,
) -> _BarrierResult:
    """Long-step path following for  max c.u  s.t.  S(u) >= 0.

    `u0` must be strictly feasible.  Working precision follows the current
    mpmath context; the caller ladders it with the barrier parameter.
    """
    nu = sum(lmi.dims)
    d = len(lmi.cols)
    u = [mp.mpf(x) for x in u0]
    cvec = [mp.mpf(x) for x in c]
    obj = lambda uu: mp.fsum(a * b for a, b in zip(cvec, uu))
    mu = max(mp.mpf(1), abs(obj(u)) / max(nu, 1))
    steps = 0
    while steps < max_newton:
        # inner: damped Newton on  c.u/mu + sum logdet S_b(u)
        for _ in range(60):
            if steps >= max_newton:
                break
            mats = lmi.eval_point(u)
            invs = []
            ok = True
            for blk, dim in zip(mats, lmi.dims):
                low = _chol(blk, dim)
                if low is None:
                    ok = False
                    break
                invs.append(_chol_inverse(low, dim))
            if not ok:
                raise AssertionError("barrier iterate left the cone")
            # gradient of the scaled potential
            grad = []
            for ell in range(d):
                s = cvec[ell] / mu
                for b, r, cc, v in lmi.cols[ell]:
                    s += invs[b][r][cc] * v * (2 if r != cc else 1)
                grad.append(s)
            # T_l = S^-1 F_l S^-1 per block, then H_lk = <T_l, F_k>
            tmats = []
            for ell in range(d):
                per_block: dict[int, list[list[mpmath.mpf]]] = {}
                for b, r, cc, v in lmi.cols[ell]:
                    dim = lmi.dims[b]
                    t = per_block.get(b)
                    if t is None:
                        t = [[mp.mpf(0)] * dim for _ in range(dim)]
                        per_block[b] = t
                    inv = invs[b]
                    for i in range(dim):
                        vi = inv[i][r] * v
                        vi2 = inv[i][cc] * v
                        row = t[i]
                        for j in range(dim):
                            row[j] += vi * inv[cc][j]
                            if r != cc:
                                row[j] += vi2 * inv[r][j]
                tmats.append(per_block)
            hess = [[mp.mpf(0)] * d for _ in range(d)]
            for ell in range(d):
                per_block = tmats[ell]
                for k in range(ell, d):
                    s = mp.mpf(0)
                    for b, r, cc, v in lmi.cols[k]:
                        t = per_block.get(b)
                        if t is not None:
                            s += t[r][cc] * v * (2 if r != cc else 1)
                    hess[ell][k] = s
                    hess[k][ell] = s
            step = _solve_spd(hess, grad, d)
            if step is None:
                raise AssertionError("barrier Hessian lost positive definiteness")
            lam2 = mp.fsum(g * s for g, s in zip(grad, step))
            lam = mp.sqrt(abs(lam2))
            alpha = mp.mpf(1) if lam <= mp.mpf("0.25") else 1 / (1 + lam)
            # fraction-to-boundary safeguard
            for _ in range(80):
                trial = [a + alpha * b for a, b in zip(u, step)]
                mats_t = lmi.eval_point(trial)
                if all(_chol(blk, dim) is not None for blk, dim in zip(mats_t, lmi.dims)):
                    break
                alpha *= mp.mpf("0.5")
            else:
                raise AssertionError("no feasible barrier step found")
            u = [a + alpha * b for a, b in zip(u, step)]
            steps += 1
            if lam <= mp.mpf("0.25"):
                break
        gap = mu * nu
        if gap <= target_gap:
            return _BarrierResult(u, obj(u), gap, steps, True)
        mu = mu / theta
    return _BarrierResult(u, obj(u), mu * nu, steps, False)


# ---------------------------------------------------------------------------
# public solver surface
# ---------------------------------------------------------------------------


@dataclass
class NumericPoint:
    """A numerical solve result: dense block values, scalar values, the
    achieved objective and bookkeeping.  Equality residuals are identically
    zero because points live in an exactly-computed nullspace
    parametrization."""

    status: str  # "ok" | "no-interior" | "inconsistent" | "not-converged"
    objective: float | None
    cone_margin: float | None
    blocks: dict[str, list[list[float]]]
    scalars: dict[str, float]
    gap: float | None
    newton_steps: int
    precision: int
    residual_norms: dict[str, float]

    @property
    def converged(self) -> bool:
        return self.status == "ok"


class RoundingFailed(Exception):
    """Rounding exhausted its denominator schedule; carries the sign of the
    best exactly-evaluated objective and the last rejection."""

    def __init__(self, message: str, best_objective_sign: int | None = None, last_reason: str | None = None):
        super().__init__(message)
        self.best_objective_sign = best_objective_sign
        self.last_reason = last_reason


@dataclass
class RoundingPolicy:
    """Escalating denominator bounds for certificate extraction."""

    denominator_schedule: tuple[int, ...] = (10**3, 10**6, 10**9, 10**12)
    projection_tolerance: float = 1e-12
    max_attempts: int = 4

    def __post_init__(self):
        sched = tuple(self.denominator_schedule)
        if not sched or any(b <= 0 for b in sched):
            raise ValueError("denominator schedule must be positive")
        if list(sched) != sorted(set(sched)):
            raise ValueError("denominator schedule must be strictly increasing")
        if self.max_attempts < 1:
            raise ValueError("need at least one rounding attempt")
        self.denominator_schedule = sched


def _lmi_from_space(space: SolverSpace, with_t: bool) -> _LMI:
    dims = [cone.dim for cone in space.cones]
    lmi = _LMI(dims)
    f0_w = space.w0
    for ci, cone in enumerate(space.cones):
        for w, positions in cone.positions.items():
            if f0_w[w]:
                val = mp.mpf(f0_w[w].numerator) / f0_w[w].denominator
                for r, c in positions:
                    lmi.f0[ci][r][c] = val
    for vec in space.basis:
        entries = []
        for ci, cone in enumerate(space.cones):
            for w, positions in cone.positions.items():
                if vec[w]:
                    for r, c in positions:
                        if r >= c:
                            entries.append((ci, r, c, vec[w]))
        lmi.add_column(entries)
    if with_t:
        entries = []
        for ci, dim in enumerate(dims):
            for r in range(dim):
                entries.append((ci, r, r, Fraction(-1)))
        lmi.add_column(entries)
    return lmi


def _gershgorin_floor(lmi: _LMI) -> mpmath.mpf:
    worst = mp.mpf(0)
    for blk, dim in zip(lmi.f0, lmi.dims):
        for i in range(dim):
            bound = blk[i][i] - mp.fsum(abs(blk[i][j]) for j in range(dim) if j != i)
            worst = min(worst, bound)
    return worst


def _center_max_t(space: SolverSpace, gap, max_newton: int):
    """Maximize the uniform cone margin t; always strictly feasible."""
    lmi = _lmi_from_space(space, with_t=True)
    d = len(space.basis)
    t0 = _gershgorin_floor(lmi) - 1
    u0 = [mp.mpf(0)] * d + [t0]
    c = [mp.mpf(0)] * d + [mp.mpf(1)]
    res = _barrier_maximize(lmi, c, u0, gap, max_newton=max_newton)
    return res.u[:d], res.u[d], res


def solve_numeric(
    inst: DualInstance,
    precision: int = 60,
    extra_rows=(),
    normalization: int = 100,
    max_newton: int = 8000,
) -> NumericPoint:
    """Maximize the dual objective over the instance's equality manifold and
    PSD cones, bounded by a total-trace cap.

    The achieved duality gap targets 10^-(precision-10); equality residuals
    are exactly zero by construction.  Infeasible sections (no interior
    point, as in deliberately conflicting toy rows) are reported via
    status to the caller rather than raised.
    """
    if precision < 15:
        raise ValueError("precision below 15 digits is not meaningful here")
    total_dim = sum(b.dim for b in inst.blocks)
    if total_dim > 600:
        raise ValueError("instance exceeds the desk-scale solver cap")
    with mp.workdps(40):
        space = SolverSpace(inst, extra_rows, normalization)
    if not space.consistent:
        return NumericPoint(
            "inconsistent", None, None, {}, {}, None, 0, precision, {"equalities": float("inf")}
        )

    with mp.workdps(50):
        u_c, t_star, res0 = _center_max_t(space, mp.mpf(10) ** (-12), max_newton)
        margin = float(t_star)
        if t_star <= mp.mpf(10) ** (-9) * space.normalization:
            return NumericPoint(
                "no-interior",
                None,
                margin,
                {},
                {},
                float(res0.gap),
                res0.newton_steps,
                precision,
                {"equalities": 0.0},
            )

    coeff_pairs, offset = space.objective_vector_u()
    steps_total = res0.newton_steps

    def stage(dps: int, gap, u_start, max_steps: int):
        nonlocal steps_total
        with mp.workdps(dps):
            lmi = _lmi_from_space(space, with_t=False)
            s3 = mp.sqrt(3)
            c = [
                mp.mpf(ra.numerator) / ra.denominator + s3 * rb.numerator / rb.denominator
                for ra, rb in coeff_pairs
            ]
            res = _barrier_maximize(lmi, c, [mp.mpf(x) for x in u_start], gap, max_newton=max_steps)
            steps_total += res.newton_steps
            return res

    target = mp.mpf(10) ** (-(precision - 10))
    res = stage(60, max(mp.mpf(10) ** (-40), target), u_c, max_newton)
    if mp.mpf(10) ** (-40) > target:
        res = stage(precision + 25, target, res.u, max_newton)

    with mp.workdps(precision + 25):
        s3 = mp.sqrt(3)
        obj = mp.fsum(
            (mp.mpf(ra.numerator) / ra.denominator + s3 * rb.numerator / rb.denominator) * uu
            for (ra, rb), uu in zip(coeff_pairs, res.u)
        )
        obj += mp.mpf(offset[0].numerator) / offset[0].denominator + s3 * offset[1].numerator / offset[1].denominator
        w = [mp.mpf(x.numerator) / x.denominator for x in space.w0]
        for coeff, vec in zip(res.u, space.basis):
            for idx, b in enumerate(vec):
                if b:
                    w[idx] += coeff * mp.mpf(b.numerator) / b.denominator
        blocks_out: dict[str, list[list[float]]] = {}
        scalars_out: dict[str, float] = {}
        pos = 0
        for bi, blk in enumerate(inst.blocks):
            dense = [[0.0] * blk.dim for _ in range(blk.dim)]
            for ri in range(blk.dim):
                for rj in range(ri + 1):
                    val = float(w[pos])
                    dense[ri][rj] = val
                    dense[rj][ri] = val
                    pos += 1
            blocks_out[f"{blk.a},{blk.k}"] = dense
        vvals = space.v_from_w([mpf_to_fraction(x) for x in w])
    for name, vidx in inst.scalar_indices().items():
        scalars_out[name] = float(vvals[vidx])

    status = "ok" if res.converged else "not-converged"
    point = NumericPoint(
        status,
        float(obj),
        margin,
        blocks_out,
        scalars_out,
        float(res.gap),
        steps_total,
        precision,
        {"equalities": 0.0},
    )
    point._space = space  # type: ignore[attr-defined]
    point._u = list(res.u)  # type: ignore[attr-defined]
    return point


def certificate_from_values(inst: DualInstance, v: list[Fraction]) -> Certificate:
    """Pack an exact instance-variable vector into a certificate."""
    from .exactfield import SymMatrixQ

    y = {}
    for bi, blk in enumerate(inst.blocks):
        mat = SymMatrixQ(blk.dim)
        for ri in range(blk.dim):
            for rj in range(ri + 1):
                mat.set(ri, rj, QExt(v[inst.y_var_index(bi, ri, rj)]))
        y[(blk.a, blk.k)] = mat
    scalars = inst.scalar_indices()
    c_count = sum(1 for s in scalars if s.startswith("C["))
    cert = Certificate(
        n=inst.n,
        K=inst.K,
        delta=inst.delta,
        variant=inst.variant,
        Y=y,
        C=[v[scalars[f"C[{i}]"]] for i in range(c_count)],
        G=v[scalars["G"]] if "G" in scalars else None,
        g={q: v[idx] for q, idx in inst.g_indices().items() if v[idx] != 0},
    )
    return cert


def round_to_exact(
    inst: DualInstance,
    pt: NumericPoint,
    policy: RoundingPolicy | None = None,
    normalization: int = 100,
    recenter_newton: int = 4000,
) -> Certificate:
    """Extract a verifier-accepted exact certificate from a numerical solve.

    Pins the objective at half the achieved value, re-centers to a
    max-margin interior point of that section (equalities hold exactly by
    the nullspace parametrization), then walks the denominator schedule:
    rationalize the reduced coordinates, reconstruct, verify exactly.
    Raises RoundingFailed when no schedule entry yields a verified
    certificate.
    """
    policy = policy or RoundingPolicy()
    if pt.objective is None or not pt.objective > 0:
        raise RoundingFailed(
            "numerical objective is not positive; nothing to certify",
            best_objective_sign=(0 if pt.objective == 0 else -1) if pt.objective is not None else None,
        )
    first_resolution = Fraction(1, policy.denominator_schedule[0])
    if not pt.objective > float(first_resolution):
        raise RoundingFailed(
            f"numerical objective {pt.objective} is below the resolution of the "
            f"first denominator bound {policy.denominator_schedule[0]}"
        )
    c_target = mpf_to_fraction(mp.mpf(pt.objective) / 2).limit_denominator(1000)
    if c_target <= 0:
        raise RoundingFailed("pinned objective target collapsed to zero")
    obj_row = ("objective_pin", dict(inst.objective), QExt(c_target))
    with mp.workdps(40):
        space = SolverSpace(inst, [obj_row], normalization)
    if not space.consistent:
        raise RoundingFailed("objective section is exactly inconsistent with the equalities")
    with mp.workdps(60):
        u_c, t_star, _ = _center_max_t(space, mp.mpf(10) ** (-15), recenter_newton)
        if float(t_star) <= 0:
            raise RoundingFailed(
                "no interior point at the pinned objective; the numerical optimum "
                "does not survive exact recentering",
                best_objective_sign=None,
            )
        u_float = [mp.mpf(x) for x in u_c]
    best_sign: int | None = None
    last_reason = None
    for attempt, bound in enumerate(policy.denominator_schedule):
        if attempt >= policy.max_attempts:
            break
        u_rat = [mpf_to_fraction(x).limit_denominator(bound) for x in u_float]
        w = space.w_from_u(u_rat)
        v = space.v_from_w(w)
        cert = certificate_from_values(inst, v)
        verdict = verify_certificate(inst, cert)
        if verdict.is_verified:
            return cert
        from .exactfield import qext_sign

        best_sign = qext_sign(space.exact_objective(v))
        last_reason = f"{verdict.location}: {verdict.reason}"
    raise RoundingFailed(
        f"denominator schedule exhausted ({last_reason})",
        best_objective_sign=best_sign,
        last_reason=last_reason,
    )


# ---------------------------------------------------------------------------
# sparse export (solver interchange) with an exact sidecar
# ---------------------------------------------------------------------------


def _dual_sidecar(inst: DualInstance) -> dict:
    names = inst.var_names
    return {
        "kind": "dual",
        "version": 1,
        "n": inst.n,
        "K": inst.K,
        "delta": inst.delta,
        "variant": inst.variant,
        "blocks": {f"{b.a},{b.k}": b.kept for b in inst.blocks},
        "variables": names,
        "equalities": [
            {"label": label, "terms": {names[idx]: c.to_pair() for idx, c in sorted(form.items())}}
            for label, form in inst.equalities
        ],
        "sign_vars": [label for label, _ in inst.sign_vars],
        "objective": {names[idx]: c.to_pair() for idx, c in sorted(inst.objective.items())},
    }


def _primal_sidecar(sdp: PrimalSDP) -> dict:
    data = sdp.to_json_dict()
    data["kind"] = "primal"
    return data


def instance_sidecar(inst) -> dict:
    if isinstance(inst, DualInstance):
        return _dual_sidecar(inst)
    if isinstance(inst, PrimalSDP):
        return _primal_sidecar(inst)
    raise TypeError(f"cannot export {type(inst).__name__}")


def parse_sidecar(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def export_sparse(inst, path, precision: int = 30) -> str:
    """Write the instance as an SDPA sparse problem plus an exact sidecar.

    Q(sqrt(3)) coefficients are evaluated to `precision` decimal digits with
    deterministic integer arithmetic, so re-exporting is byte-identical;
    the sidecar JSON at `<path>.exact.json` carries the exact pairs and
    parses back to the same instance serialization.
    """
    sidecar = instance_sidecar(inst)
    if isinstance(inst, DualInstance):
        var_names = inst.var_names
        nvars = inst.nvars
        psd_blocks = [(f"Y[{b.a},{b.k}]", b.dim) for b in inst.blocks]
        entry_of_var: dict[int, tuple[int, int, int]] = {}
        for bi, b in enumerate(inst.blocks):
            for ri in range(b.dim):
                for rj in range(ri + 1):
                    entry_of_var[inst.y_var_index(bi, ri, rj)] = (bi, rj, ri)  # upper triangle
        eq_rows = [(label, form, QExt(0)) for label, form in inst.equalities]
        sign_rows = [(label, {idx: QExt(1)}, QExt(0)) for label, idx in inst.sign_vars]
        objective = inst.objective
        header = f"dual n={inst.n} K={inst.K} delta={inst.delta} variant={inst.variant}"
    else:
        var_names = [",".join(str(v) for v in q) for q in inst.variables]
        var_index = {q: i for i, q in enumerate(inst.variables)}
        nvars = len(var_names)
        psd_blocks = [(f"M[{b.a},{b.k}]", b.dim) for b in inst.blocks]
        entry_of_var = {}
        eq_rows = [
            (r.label, {var_index[q]: QExt(c) for q, c in r.coeffs.items()}, QExt(r.rhs))
            for r in inst.equalities
        ]
        sign_rows = [
            (r.label, {var_index[q]: QExt(c) for q, c in r.coeffs.items()}, QExt(r.rhs))
            for r in inst.inequalities
        ]
        objective = {}
        header = f"primal n={inst.n} K={inst.K} delta={inst.delta} variant={inst.variant}"

    diag_dim = 2 * len(eq_rows) + len(sign_rows)
    lines = [f'"{header}"', f'"coefficients printed to {precision} decimal digits"']
    lines.append(str(nvars))
    nblocks = len(psd_blocks) + (1 if diag_dim else 0)
    lines.append(str(nblocks))
    dims = [str(d) for _, d in psd_blocks] + ([f"-{diag_dim}"] if diag_dim else [])
    lines.append(" ".join(dims))

    def fmt(v: QExt) -> str:
        return v.decimal_str(precision)

    cvec = []
    for idx in range(nvars):
        c = objective.get(idx, QExt(0))
        cvec.append(fmt(-c if not c.is_zero() else QExt(0)))  # SDPA minimizes
    lines.append(" ".join(cvec))

    entries: list[tuple[int, int, int, int, str]] = []
    if isinstance(inst, DualInstance):
        for idx, (bi, r, c) in sorted(entry_of_var.items()):
            entries.append((idx + 1, bi + 1, r + 1, c + 1, "1"))
    else:
        for bi, b in enumerate(inst.blocks):
            for (ri, rj), terms in sorted(b.entries.items()):
                for q, coeff in terms:
                    entries.append((var_index[q] + 1, bi + 1, min(ri, rj) + 1, max(ri, rj) + 1, fmt(coeff)))
    diag_block = len(psd_blocks) + 1
    slot = 1
    for label, form, rhs in eq_rows:
        for idx, c in sorted(form.items()):
            entries.append((idx + 1, diag_block, slot, slot, fmt(c)))
            entries.append((idx + 1, diag_block, slot + 1, slot + 1, fmt(-c)))
        if not rhs.is_zero():
            entries.append((0, diag_block, slot, slot, fmt(rhs)))
            entries.append((0, diag_block, slot + 1, slot + 1, fmt(-rhs)))
        slot += 2
    for label, form, rhs in sign_rows:
        for idx, c in sorted(form.items()):
            entries.append((idx + 1, diag_block, slot, slot, fmt(c)))
        if not rhs.is_zero():
            entries.append((0, diag_block, slot, slot, fmt(rhs)))
        slot += 1
    entries.sort(key=lambda e: (e[0], e[1], e[2], e[3]))
    for k, blk, i, j, v in entries:
        lines.append(f"{k} {blk} {i} {j} {v}")

    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    sidecar_path = str(path) + ".exact.json"
    with open(sidecar_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    return sidecar_path
