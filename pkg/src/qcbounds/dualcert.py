"""Dual SDPs and exact infeasibility certificates.

A certificate stores only the free dual variables: the PSD blocks Y^(a,k)
and the variant's scalars.  Everything else (the weighted block sums y,
the Krawtchouk combinations D, the projector multipliers Q, the trace
multiplier w) is recomputed by the verifier, which accepts only when every
equality residual is exactly zero, every block passes the exact LDL^T test,
every sign constraint holds and the objective is strictly positive.  An
accepted certificate plus the four parameters (n, K, delta, variant) is a
complete nonexistence proof for the corresponding code class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .enumerators import krawtchouk
from .exactfield import (
    NotPSD,
    QExt,
    Rat,
    SymMatrixQ,
    is_psd,
    ldlt_decompose,
    qext_sign,
    rat_from_str,
    rat_to_str,
)
from .terwilliger import (
    Quad,
    all_classes,
    alpha_coeff,
    block_index_list,
    block_kept_rows,
    canonical_class,
    class_members,
    class_triple,
    diag_class,
    index_set,
    orbit_size,
    product_weight,
)

VARIANTS = ("general", "pure", "selfdual", "additive_I", "additive_II", "additive_any")


class DegenerateDenominator(ValueError):
    """K = 2^(n-1) makes the projector-multiplier denominator vanish; the
    dual recipes of the Q-bearing variants are undefined there."""


def _quad_key(q: Quad) -> str:
    return ",".join(str(v) for v in q)


def _unordered(q: Quad) -> Quad:
    i, j, t, p = q
    return (i, j, t, p) if i <= j else (j, i, t, p)


LinForm = dict[int, QExt]  # variable index -> coefficient


def _add_into(acc: LinForm, form: LinForm, scale) -> None:
    if scale == 0:
        return
    for idx, c in form.items():
        cur = acc.get(idx)
        val = c * scale if cur is None else cur + c * scale
        if isinstance(val, QExt) and val.is_zero():
            if idx in acc:
                del acc[idx]
            continue
        acc[idx] = val


@dataclass
class DualBlock:
    a: int
    k: int
    kept: list[int]

    @property
    def dim(self) -> int:
        return len(self.kept)


class DualInstance:
    """The dual of the symmetry-reduced SDP at (n, K, delta, variant).

    Free variables are indexed 0..nvars-1 in a fixed layout: block entries
    first (lower triangles, blocks in (a, k) order), then C_0..C_{delta-1},
    then G, then the g multipliers.  All constraints are homogeneous linear
    forms over these variables with coefficients in Q(sqrt(3)).
    """

    def __init__(self, n: int, K: int, delta: int, variant: str):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if not (1 <= delta <= n + 1):
            raise ValueError(f"delta must lie in [1, n+1], got {delta}")
        if K < 1:
            raise ValueError("K must be at least 1")
        if variant == "selfdual":
            if K != 1:
                raise ValueError("self-dual codes have K = 1")
            if delta > n:
                raise ValueError("the self-dual dual needs delta <= n (the trace pairing uses weight n)")
        if variant.startswith("additive") and K & (K - 1):
            raise ValueError("additive codes have K a power of two")
        if variant != "selfdual" and 2**n == 2 * K:
            raise DegenerateDenominator(
                f"K = 2^(n-1) = {K} leaves the Q_i recipe undefined (n = {n})"
            )
        self.n = n
        self.K = K
        self.delta = delta
        self.variant = variant
        self.pure_like = variant in ("pure", "selfdual")
        self.typed_additive = variant in ("additive_I", "additive_II")
        self.is_additive = variant.startswith("additive")

        reduction = delta if self.pure_like else None
        self.blocks: list[DualBlock] = []
        for a, k in block_index_list(n):
            kept = block_kept_rows(a, k, n, reduction)
            if kept:
                self.blocks.append(DualBlock(a, k, kept))

        # ---- variable layout -------------------------------------------
        self._var_names: list[str] = []
        self._yvar: dict[tuple[int, int, int], int] = {}
        for bi, blk in enumerate(self.blocks):
            for ri in range(blk.dim):
                for rj in range(ri + 1):
                    self._yvar[(bi, ri, rj)] = len(self._var_names)
                    self._var_names.append(f"Y[{blk.a},{blk.k}][{blk.kept[ri]},{blk.kept[rj]}]")
        self._cvar: dict[int, int] = {}
        self._gvar_scalar: int | None = None
        self._gvars: dict[Quad, int] = {}
        if variant != "selfdual":
            for i in range(delta):
                self._cvar[i] = len(self._var_names)
                self._var_names.append(f"C[{i}]")
        if self.typed_additive:
            self._gvar_scalar = len(self._var_names)
            self._var_names.append("G")
        if self.is_additive:
            for q in index_set(n):
                u = _unordered(q)
                if u not in self._gvars and canonical_class(q, n) is not None:
                    self._gvars[u] = len(self._var_names)
                    self._var_names.append(f"g[{_quad_key(u)}]")
        self.nvars = len(self._var_names)

        self._quads = index_set(n)
        self._y_forms: dict[Quad, LinForm] = {}
        for q in self._quads:
            self._y_forms[q] = self._build_y_form(q)

        self.equalities: list[tuple[str, LinForm]] = []
        self.sign_vars: list[tuple[str, int]] = [
            (f"g[{_quad_key(u)}]>=0", idx) for u, idx in sorted(self._gvars.items())
        ]
        self._build_constraints()
        self.objective: LinForm = self._build_objective()

    # ---- linear forms of the derived quantities ------------------------

    def _block_entry_form(self, bi: int, i: int, j: int) -> LinForm | None:
        blk = self.blocks[bi]
        if i not in blk.kept or j not in blk.kept:
            return None
        ri = blk.kept.index(i)
        rj = blk.kept.index(j)
        if ri < rj:
            ri, rj = rj, ri
        return {self._yvar[(bi, ri, rj)]: QExt(1)}

    def _build_y_form(self, q: Quad) -> LinForm:
        i, j, t, p = q
        n = self.n
        inv_gamma = QExt(Fraction(1) / orbit_size(q, n))
        form: LinForm = {}
        block_pos = {(blk.a, blk.k): bi for bi, blk in enumerate(self.blocks)}
        for k in range(0, min(i, j) + 1):
            for a in range(max(0, max(i, j) + k - n), k + 1):
                bi = block_pos.get((a, k))
                if bi is None:
                    continue
                coeff = alpha_coeff(i, j, t, p, a, k, n)
                if coeff.is_zero():
                    continue
                entry = self._block_entry_form(bi, i, j)
                if entry is None:
                    continue
                _add_into(form, entry, inv_gamma * coeff)
        gidx = self._gvars.get(_unordered(q))
        if gidx is not None:
            _add_into(form, {gidx: QExt(1)}, QExt(1))
        return form

    def y_form(self, q: Quad) -> LinForm:
        return self._y_forms[q]

    def d_form(self, i: int) -> LinForm:
        form: LinForm = {}
        scale = Fraction(1, 2**self.n)
        for j in range(self.delta):
            c = scale * krawtchouk(j, i, self.n)
            if c != 0:
                _add_into(form, {self._cvar[j]: QExt(1)}, QExt(c))
        if self.typed_additive and i % 2 == 0:
            shift = 1 if self.variant == "additive_I" else 0
            _add_into(form, {self._gvar_scalar: QExt(1)}, QExt(Fraction(2**shift, 2**self.n)))
        return form

    def q_form(self, i: int) -> LinForm:
        """Projector multiplier Q_i; defined for 0 < i <= n (general and
        additive) or delta <= i <= n (pure)."""
        if self.variant == "selfdual":
            raise ValueError("the self-dual dual has no Q variables")
        if not (0 < i <= self.n):
            raise ValueError(f"Q_{i} is out of range")
        if self.pure_like and i < self.delta:
            raise ValueError(f"Q_{i} is removed in the pure dual")
        denom = Fraction(2**self.n, self.K) - 2
        form: LinForm = {}
        _add_into(form, self._y_forms[(i, 0, 0, 0)], QExt(2))
        _add_into(form, self._y_forms[(i, i, i, i)], QExt(1))
        _add_into(form, self.d_form(i), QExt(-self.K))
        if 0 < i < self.delta and not self.pure_like:
            _add_into(form, {self._cvar[i]: QExt(1)}, QExt(1))
        return {idx: c / denom for idx, c in form.items()}

    def w_form(self) -> LinForm:
        """Trace multiplier of the self-dual dual: w = -y(n,n;n,n) - 2 y(n,0;0,0)."""
        if self.variant != "selfdual":
            raise ValueError("w exists only in the self-dual dual")
        n = self.n
        form: LinForm = {}
        _add_into(form, self._y_forms[(n, n, n, n)], QExt(-1))
        _add_into(form, self._y_forms[(n, 0, 0, 0)], QExt(-2))
        return form

    # ---- constraints ----------------------------------------------------

    def _build_constraints(self) -> None:
        n, delta = self.n, self.delta
        if self.variant == "selfdual":
            w = self.w_form()
            for i in range(delta, n):
                form: LinForm = {}
                _add_into(form, w, QExt(-1))
                _add_into(form, self._y_forms[(i, i, i, i)], QExt(-1))
                _add_into(form, self._y_forms[(i, 0, 0, 0)], QExt(-2))
                self.equalities.append((f"w[{i}]", form))
            seen = set()
            for q in self._quads:
                i, j, t, p = q
                u = _unordered(q)
                if u in seen:
                    continue
                seen.add(u)
                if i == 0 or j == 0 or (t - p) % 2 == 1:
                    continue
                if product_weight(q) < delta:
                    continue
                self.equalities.append((f"yzero[{_quad_key(u)}]", dict(self._y_forms[u])))
            return

        for rep in all_classes(n):
            tri = class_triple(rep)
            if 0 in tri:
                continue
            if self.pure_like and min(tri) < delta:
                continue
            form = {}
            for member in class_members(rep, n):
                _add_into(form, self._y_forms[member], QExt(1))
                _add_into(form, self.q_form(product_weight(member)), QExt(1))
            self.equalities.append((f"class[{_quad_key(rep)}]", form))

    def _build_objective(self) -> LinForm:
        form: LinForm = {}
        if self.variant == "selfdual":
            _add_into(form, self.w_form(), QExt(2**self.n - 1))
        else:
            _add_into(form, self.d_form(0), QExt(self.K))
            _add_into(form, {self._cvar[0]: QExt(1)}, QExt(-1))
            if self.typed_additive:
                _add_into(form, {self._gvar_scalar: QExt(1)}, QExt(-1))
        _add_into(form, self._y_forms[(0, 0, 0, 0)], QExt(-1))
        return form

    # ---- layout queries --------------------------------------------------

    @property
    def var_names(self) -> list[str]:
        return list(self._var_names)

    def block_shapes(self) -> dict[str, int]:
        return {f"{b.a},{b.k}": b.dim for b in self.blocks}

    def y_var_index(self, bi: int, ri: int, rj: int) -> int:
        if ri < rj:
            ri, rj = rj, ri
        return self._yvar[(bi, ri, rj)]

    def scalar_indices(self) -> dict[str, int]:
        out = {f"C[{i}]": idx for i, idx in self._cvar.items()}
        if self._gvar_scalar is not None:
            out["G"] = self._gvar_scalar
        return out

    def g_indices(self) -> dict[Quad, int]:
        return dict(self._gvars)

    def describe(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "delta": self.delta,
            "variant": self.variant,
            "blocks": {f"{b.a},{b.k}": {"kept": b.kept, "dim": b.dim} for b in self.blocks},
            "scalars": sorted(self.scalar_indices()),
            "g_count": len(self._gvars),
            "equalities": [label for label, _ in self.equalities],
            "nvars": self.nvars,
        }


def build_dual(n: int, K: int, delta: int, variant: str = "general") -> DualInstance:
    """Dual instance for the given parameters; raises DegenerateDenominator
    when K = 2^(n-1) with a Q-bearing variant."""
    return DualInstance(n, K, delta, variant)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    n: int
    K: int
    delta: int
    variant: str
    Y: dict[tuple[int, int], SymMatrixQ] = field(default_factory=dict)
    C: list[Rat] = field(default_factory=list)
    G: Rat | None = None
    g: dict[Quad, Rat] = field(default_factory=dict)
    version: int = 1

    def to_json_dict(self) -> dict:
        out: dict = {
            "version": self.version,
            "n": self.n,
            "K": self.K,
            "delta": self.delta,
            "variant": self.variant,
            "field": ["sqrt", 3],
            "Y": {
                f"{a},{k}": [[e.to_pair() for e in row] for row in mat.lower_rows()]
                for (a, k), mat in sorted(self.Y.items())
            },
        }
        if self.variant != "selfdual":
            out["C"] = [rat_to_str(c) for c in self.C]
        if self.G is not None:
            out["G"] = rat_to_str(self.G)
        if self.g:
            out["g"] = {_quad_key(q): rat_to_str(v) for q, v in sorted(self.g.items())}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json_dict(cls, data: dict) -> "Certificate":
        if not isinstance(data, dict):
            raise ValueError("certificate must be a JSON object")
        if data.get("version") != 1:
            raise ValueError(f"unsupported certificate version {data.get('version')!r}")
        if data.get("field") != ["sqrt", 3]:
            raise ValueError("certificate field descriptor must be ['sqrt', 3]")
        for key in ("n", "K", "delta", "variant", "Y"):
            if key not in data:
                raise ValueError(f"certificate is missing {key!r}")
        y = {}
        for key, rows in data["Y"].items():
            a_str, k_str = key.split(",")
            mat_rows = [[QExt.from_pair(e) for e in row] for row in rows]
            y[(int(a_str), int(k_str))] = SymMatrixQ(len(mat_rows), mat_rows)
        g = {}
        for key, val in data.get("g", {}).items():
            parts = tuple(int(v) for v in key.split(","))
            if len(parts) != 4:
                raise ValueError(f"bad g key {key!r}")
            g[parts] = rat_from_str(val)
        return cls(
            n=int(data["n"]),
            K=int(data["K"]),
            delta=int(data["delta"]),
            variant=str(data["variant"]),
            Y=y,
            C=[rat_from_str(v) for v in data.get("C", [])],
            G=rat_from_str(data["G"]) if "G" in data else None,
            g=g,
        )

    @classmethod
    def read(cls, path) -> "Certificate":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass
class Verdict:
    status: str  # "verified" | "rejected"
    objective: QExt | None = None
    reason: str | None = None
    location: str | None = None

    @property
    def is_verified(self) -> bool:
        return self.status == "verified"

    def to_json_dict(self) -> dict:
        if self.is_verified:
            return {"status": "verified", "objective": self.objective.to_pair()}
        return {"status": "rejected", "reason": self.reason, "location": self.location}


def _certificate_vector(inst: DualInstance, cert: Certificate) -> list[QExt]:
    """Flatten the stored free variables into the instance layout, checking
    shapes along the way."""
    if (cert.n, cert.K, cert.delta, cert.variant) != (inst.n, inst.K, inst.delta, inst.variant):
        raise ValueError("certificate parameters do not match the instance")
    values = [QExt(0)] * inst.nvars
    seen = set()
    for bi, blk in enumerate(inst.blocks):
        key = (blk.a, blk.k)
        mat = cert.Y.get(key)
        if mat is None:
            raise ValueError(f"certificate is missing block {key}")
        if mat.dim != blk.dim:
            raise ValueError(f"block {key} has dimension {mat.dim}, expected {blk.dim}")
        seen.add(key)
        for ri in range(blk.dim):
            for rj in range(ri + 1):
                values[inst.y_var_index(bi, ri, rj)] = mat.get(ri, rj)
    extra = set(cert.Y) - seen
    if extra:
        raise ValueError(f"certificate carries unknown blocks {sorted(extra)}")
    scalars = inst.scalar_indices()
    c_expected = sum(1 for name in scalars if name.startswith("C["))
    if inst.variant != "selfdual":
        if len(cert.C) != c_expected:
            raise ValueError(f"expected {c_expected} C scalars, got {len(cert.C)}")
        for i in range(c_expected):
            values[scalars[f"C[{i}]"]] = QExt(cert.C[i])
    if "G" in scalars:
        values[scalars["G"]] = QExt(cert.G if cert.G is not None else 0)
    elif cert.G is not None:
        raise ValueError("certificate carries G but the variant has no type row")
    gvars = inst.g_indices()
    for q, val in cert.g.items():
        u = _unordered(q)
        if u not in gvars:
            raise ValueError(f"certificate carries g for unknown quad {q}")
        values[gvars[u]] = QExt(val)
    return values


def _eval_form(form: LinForm, values: list[QExt]) -> QExt:
    acc = QExt(0)
    for idx, c in form.items():
        v = values[idx]
        if not v.is_zero():
            acc = acc + c * v
    return acc


def evaluate_certificate(inst: DualInstance, cert: Certificate) -> dict:
    """Exact values of every derived quantity and every constraint residual."""
    values = _certificate_vector(inst, cert)
    report: dict = {
        "y": {},
        "equality_residuals": {},
        "sign_values": {},
        "objective": _eval_form(inst.objective, values),
    }
    for q in index_set(inst.n):
        report["y"][_quad_key(q)] = _eval_form(inst.y_form(q), values)
    if inst.variant == "selfdual":
        report["w"] = _eval_form(inst.w_form(), values)
    else:
        report["D"] = {
            i: _eval_form(inst.d_form(i), values) for i in range(inst.n + 1)
        }
        q_lo = inst.delta if inst.pure_like else 1
        report["Q"] = {
            i: _eval_form(inst.q_form(i), values) for i in range(q_lo, inst.n + 1)
        }
    for label, form in inst.equalities:
        report["equality_residuals"][label] = _eval_form(form, values)
    for label, idx in inst.sign_vars:
        report["sign_values"][label] = values[idx]
    return report


def verify_certificate(inst: DualInstance, cert: Certificate) -> Verdict:
    """Total, deterministic exact verification.

    Failures are reported in a fixed order: equalities, then signs, then
    block PSD, then the strict objective sign.
    """
    try:
        values = _certificate_vector(inst, cert)
    except ValueError as exc:
        return Verdict("rejected", reason=str(exc), location="shape")
    for label, form in inst.equalities:
        res = _eval_form(form, values)
        if not res.is_zero():
            return Verdict(
                "rejected",
                reason=f"equality residual {res} is nonzero",
                location=label,
            )
    for label, idx in inst.sign_vars:
        if qext_sign(values[idx]) < 0:
            return Verdict("rejected", reason="sign constraint violated", location=label)
    for blk in inst.blocks:
        mat = cert.Y[(blk.a, blk.k)]
        res = ldlt_decompose(mat)
        if isinstance(res, NotPSD):
            return Verdict(
                "rejected",
                reason=f"block is not PSD (pivot {res.pivot}, sign {res.sign})",
                location=f"Y[{blk.a},{blk.k}]",
            )
    objective = _eval_form(inst.objective, values)
    if qext_sign(objective) != 1:
        return Verdict(
            "rejected",
            reason=f"objective {objective} is not strictly positive",
            location="objective",
        )
    return Verdict("verified", objective=objective)


def zero_certificate(inst: DualInstance) -> Certificate:
    """The all-zero certificate (every residual vanishes, objective 0)."""
    return Certificate(
        n=inst.n,
        K=inst.K,
        delta=inst.delta,
        variant=inst.variant,
        Y={(b.a, b.k): SymMatrixQ(b.dim) for b in inst.blocks},
        C=[Fraction(0)] * len([s for s in inst.scalar_indices() if s.startswith("C[")]),
        G=Fraction(0) if "G" in inst.scalar_indices() else None,
    )
