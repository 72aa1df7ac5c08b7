"""Checkable inequality predicates, one per verified statement.

Every check evaluates both sides of one operator inequality on a concrete
instance and returns an :class:`InequalityReport` with signed margins.
Margins are oriented so that nonnegative means "holds": for scalar norm
comparisons ``margin = rhs - lhs``, for PSD-order comparisons it is the
smallest eigenvalue of ``rhs - lhs``.  Unitarily-invariant-norm claims are
certified through the full Ky Fan family (Fan dominance), with a
Hilbert-Schmidt value recorded as a redundant spot check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    DEFAULT_TOL, ToleranceConfig, adjoint, hermitian_part, herm_eig,
    matrix_abs, op_norm, psd_power,
)
from .errors import (
    BadExponents, BallViolated, CtxMismatch, NotContractive, NotNormal,
)
from .hmodule import (
    GrussContext, ModuleElement, conjugate, gruss_inner, inner, is_normal,
    left_act, module_norm, right_mul,
)
from .norms import ky_fan_profile, norm, schatten, HILBERT_SCHMIDT, OPERATOR, TRACE
from .transformer import (
    ElementaryOperator, apply, defect_operator, fractional_power_apply,
    operator_norm_T, spectral_radius,
)

# Contractive hypotheses are enforced with this much slack below 1 so the
# boundary case ||x|| = 1 is kept strictly out of scope.
CONTRACTION_MARGIN = 1e-3

# Registry of check names and the display anchors they certify; the order
# here is the canonical suite order.
CHECK_ANCHORS = {
    "check_cs": "Eq. (CS)",
    "check_basic": "Eq. (1infty)",
    "check_hs": "Eq. (C2)",
    "check_refinement": "Eq. (Refinement)",
    "check_uin": "Eq. (UIN1)",
    "check_interp": "Eq. (InterP)",
    "check_naopaka": "Theorem (Naopaka)",
    "check_alpha": "Eq. (AOTalpha)",
    "check_defect": "Eq. (Defekt)",
    "check_gruss": "Eqs. (Gruss3)/(GrussMm)",
    "check_radius_submult": "Remark (spectral radius)",
}


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check on one instance.

    ``margin`` and ``scale`` are raw: ``holds`` is equivalent to
    ``margin >= -tol_rel * scale`` over every branch.  ``norm_detail``
    entries are per-branch margins already divided by that branch's scale,
    so a consumer can compare them against a relative tolerance directly.
    ``instance`` carries ``{seed, dim, len, params}`` for replay.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    holds: bool
    scale: float
    norm_detail: dict = field(default_factory=dict)
    instance: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.instance.get("seed"),
            "dim": self.instance.get("dim"),
            "len": self.instance.get("len"),
            "params": self.instance.get("params", {}),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "norm_detail": self.norm_detail,
        }


def _digest(x: ModuleElement, digest: dict | None, params: dict | None = None) -> dict:
    out = {"seed": None, "dim": x.ctx.dim, "len": x.ctx.length, "params": {}}
    if params:
        out["params"].update(params)
    if digest:
        extra = dict(digest)
        out["params"].update(extra.pop("params", {}))
        out.update(extra)
    return out


class _Branch(NamedTuple):
    lhs: float
    rhs: float
    margin: float
    scale: float


def _scalar_branch(lhs: float, rhs: float) -> _Branch:
    scale = max(abs(lhs), abs(rhs), 1.0)
    return _Branch(float(lhs), float(rhs), float(rhs - lhs), scale)


def _psd_branch(lo: np.ndarray, hi: np.ndarray) -> _Branch:
    gap = hermitian_part(hi) - hermitian_part(lo)
    margin = float(np.linalg.eigvalsh(gap)[0])
    scale = max(op_norm(lo), op_norm(hi), 1.0)
    return _Branch(op_norm(lo), op_norm(hi), margin, scale)


def _ky_branches(lo: np.ndarray, hi: np.ndarray, prefix: str = "") -> tuple[dict, _Branch]:
    """Ky Fan profile margins of |||lo||| <= |||hi|||, worst k as headline."""
    pl, ph = ky_fan_profile(lo), ky_fan_profile(hi)
    scale = max(float(pl[-1]), float(ph[-1]), 1.0)
    gaps = ph - pl
    detail = {f"{prefix}ky_fan_{k + 1}": float(g) / scale for k, g in enumerate(gaps)}
    detail[f"{prefix}hilbert_schmidt"] = (
        norm(hi, HILBERT_SCHMIDT) - norm(lo, HILBERT_SCHMIDT)
    ) / scale
    worst = int(np.argmin(gaps))
    head = _Branch(float(pl[worst]), float(ph[worst]), float(gaps[worst]), scale)
    return detail, head


def _finish(name: str, branches: dict[str, _Branch], tol: ToleranceConfig,
            digest: dict, extra_detail: dict | None = None) -> InequalityReport:
    """Assemble a report: headline is the branch with the worst margin/scale."""
    detail = {label: b.margin / b.scale for label, b in branches.items()}
    if extra_detail:
        detail.update(extra_detail)
    worst_label = min(branches, key=lambda lb: branches[lb].margin / branches[lb].scale)
    head = branches[worst_label]
    holds = all(b.margin >= -tol.tol_rel * b.scale for b in branches.values())
    return InequalityReport(
        name=name, lhs=head.lhs, rhs=head.rhs, margin=head.margin,
        holds=holds, scale=head.scale, norm_detail=detail, instance=digest,
    )


def _sqrt_gram(x: ModuleElement) -> np.ndarray:
    return psd_power(hermitian_part(inner(x, x)), 0.5)


def check_cs(x: ModuleElement, y: ModuleElement, *,
             tol: ToleranceConfig = DEFAULT_TOL,
             digest: dict | None = None) -> InequalityReport:
    """|<x,y>|^2 <= ||x||^2 <y,y> in the PSD order, plus its square root."""
    m = inner(x, y)
    nx2 = module_norm(x) ** 2
    gy = hermitian_part(inner(y, y))
    sq = _psd_branch(adjoint(m) @ m, nx2 * gy)
    rt = _psd_branch(matrix_abs(m), np.sqrt(nx2) * psd_power(gy, 0.5))
    return _finish("check_cs", {"squared": sq, "sqrt": rt}, tol, _digest(x, digest))


def check_basic(x: ModuleElement, y: ModuleElement, a, *,
                tol: ToleranceConfig = DEFAULT_TOL,
                digest: dict | None = None) -> InequalityReport:
    """Operator- and trace-norm bounds for <x, ay>; no normality needed.

    The operator branch is ||<x,ay>|| <= ||x|| ||y|| ||a||; the trace
    branch compares against the conjugated Gram square roots,
    ||<xbar,xbar>^(1/2) a <ybar,ybar>^(1/2)||_1.
    """
    val = inner(x, left_act(a, y))
    op = _scalar_branch(norm(val, OPERATOR),
                        module_norm(x) * module_norm(y) * norm(a, OPERATOR))
    rhs_tr = _sqrt_gram(conjugate(x)) @ np.asarray(a) @ _sqrt_gram(conjugate(y))
    tr = _scalar_branch(norm(val, TRACE), norm(rhs_tr, TRACE))
    return _finish("check_basic", {"op": op, "tr": tr}, tol, _digest(x, digest))


def check_hs(x: ModuleElement, y: ModuleElement, a, *,
             tol: ToleranceConfig = DEFAULT_TOL,
             digest: dict | None = None) -> InequalityReport:
    """Hilbert-Schmidt bounds ||<x,ay>||_2 <= ||x|| ||a <ybar,ybar>^(1/2)||_2
    and the mirrored ||y|| ||<xbar,xbar>^(1/2) a||_2."""
    a = np.asarray(a)
    lhs = norm(inner(x, left_act(a, y)), HILBERT_SCHMIDT)
    bx = _scalar_branch(lhs, module_norm(x) * norm(a @ _sqrt_gram(conjugate(y)), HILBERT_SCHMIDT))
    by = _scalar_branch(lhs, module_norm(y) * norm(_sqrt_gram(conjugate(x)) @ a, HILBERT_SCHMIDT))
    return _finish("check_hs", {"x_weighted": bx, "y_weighted": by}, tol, _digest(x, digest))


def check_refinement(x: ModuleElement, y: ModuleElement, a, *,
                     tol: ToleranceConfig = DEFAULT_TOL,
                     digest: dict | None = None) -> InequalityReport:
    """|<x,ay>|^2 <= ||x||^2 <y, a*a y> in the PSD order."""
    a = np.asarray(a)
    m = inner(x, left_act(a, y))
    rhs = module_norm(x) ** 2 * inner(y, left_act(adjoint(a) @ a, y))
    branch = _psd_branch(adjoint(m) @ m, rhs)
    return _finish("check_refinement", {"psd": branch}, tol, _digest(x, digest))


def _require_normal(z: ModuleElement, tag: str, tol: ToleranceConfig) -> None:
    ok, defect = is_normal(z, tol)
    if not ok:
        raise NotNormal(f"{tag} has normality defect {defect:.3e}")


def check_uin(x: ModuleElement, y: ModuleElement, a, *,
              tol: ToleranceConfig = DEFAULT_TOL, strict: bool = True,
              digest: dict | None = None) -> InequalityReport:
    """|||<x,ay>||| <= |||<x,x>^(1/2) a <y,y>^(1/2)||| for normal x, y,
    certified over the whole Ky Fan family.

    With ``strict=False`` the normality preconditions are skipped so a
    counterexample search can probe instances outside the hypotheses.
    """
    if strict:
        _require_normal(x, "x", tol)
        _require_normal(y, "y", tol)
    lo = inner(x, left_act(a, y))
    hi = _sqrt_gram(x) @ np.asarray(a) @ _sqrt_gram(y)
    detail, head = _ky_branches(lo, hi)
    branches = {"family": head}
    return _finish("check_uin", branches, tol, _digest(x, digest), extra_detail=detail)


def _validate_pqr(p: float, q: float, r: float) -> None:
    if min(p, q, r) <= 1:
        raise BadExponents("exponents must satisfy p, q, r > 1")
    if abs(1 / q + 1 / r - 2 / p) > 1e-12:
        raise BadExponents(f"1/q + 1/r != 2/p for (p, q, r) = ({p}, {q}, {r})")


def check_interp(x: ModuleElement, y: ModuleElement, a,
                 p: float, q: float, r: float, *,
                 tol: ToleranceConfig = DEFAULT_TOL,
                 digest: dict | None = None) -> InequalityReport:
    """Schatten-p interpolation bound for exponents with 1/q + 1/r = 2/p.

    lhs = ||<x,ay>||_p, rhs = ||K_x^(1/2q) a K_y^(1/2r)||_p with
    K_x = <<x,x>^(q-1) xbar, xbar>.  The outer powers are evaluated at
    ``epsilon_reg`` and at ten times it; the relative shift is reported as
    ``sensitivity`` together with the smallest inner eigenvalue, so
    near-singular instances can be recognized downstream.
    """
    _validate_pqr(p, q, r)
    a = np.asarray(a)
    d = x.ctx.dim
    eye = np.eye(d)

    def inner_power(z: ModuleElement, s: float) -> np.ndarray:
        gz = hermitian_part(inner(z, z))
        zb = conjugate(z)
        return hermitian_part(inner(left_act(psd_power(gz, s), zb), zb))

    kx, ky = inner_power(x, q - 1), inner_power(y, r - 1)
    min_eig = min(float(np.linalg.eigvalsh(kx)[0]), float(np.linalg.eigvalsh(ky)[0]))
    lhs = norm(inner(x, left_act(a, y)), schatten(p))

    def rhs_at(eps: float) -> float:
        fx = psd_power(kx + eps * eye, 1 / (2 * q))
        fy = psd_power(ky + eps * eye, 1 / (2 * r))
        return norm(fx @ a @ fy, schatten(p))

    rhs = rhs_at(tol.epsilon_reg)
    sensitivity = abs(rhs_at(10 * tol.epsilon_reg) - rhs) / max(rhs, 1.0)
    branch = _scalar_branch(lhs, rhs)
    extra = {"sensitivity": float(sensitivity), "min_inner_eig": min_eig}
    dig = _digest(x, digest, params={"p": p, "q": q, "r": r})
    return _finish("check_interp", {schatten(p).label: branch}, tol, dig, extra_detail=extra)


def _require_contractive(z: ModuleElement, tag: str, tol: ToleranceConfig) -> None:
    top = float(np.linalg.eigvalsh(hermitian_part(inner(z, z)))[-1])
    if top > 1.0 - CONTRACTION_MARGIN + tol.tol_abs:
        raise NotContractive(
            f"<{tag},{tag}> has top eigenvalue {top:.6f}, above 1 - {CONTRACTION_MARGIN:g}")


def check_naopaka(x: ModuleElement, y: ModuleElement, a, *,
                  tol: ToleranceConfig = DEFAULT_TOL, strict: bool = True,
                  digest: dict | None = None) -> InequalityReport:
    """|||(1-<x,x>)^(1/2) a (1-<y,y>)^(1/2)||| <= |||a - <x,ay>||| for
    normal contractive x, y, over the whole Ky Fan family."""
    if strict:
        _require_normal(x, "x", tol)
        _require_normal(y, "y", tol)
        _require_contractive(x, "x", tol)
        _require_contractive(y, "y", tol)
    a = np.asarray(a)
    eye = np.eye(x.ctx.dim)
    gx = hermitian_part(inner(x, x))
    gy = hermitian_part(inner(y, y))
    lo = psd_power(hermitian_part(eye - gx), 0.5) @ a @ psd_power(hermitian_part(eye - gy), 0.5)
    hi = a - apply(ElementaryOperator(x, y), a)
    detail, head = _ky_branches(lo, hi)
    return _finish("check_naopaka", {"family": head}, tol, _digest(x, digest),
                   extra_detail=detail)


def check_alpha(x: ModuleElement, y: ModuleElement, a, alpha: float, *,
                tol: ToleranceConfig = DEFAULT_TOL, strict: bool = True,
                digest: dict | None = None) -> InequalityReport:
    """|||(1-<x,x>)^(a/2) a (1-<y,y>)^(a/2)||| <= |||(I-T)^alpha a|||.

    At alpha = 1 this coincides with check_naopaka branch for branch.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if strict:
        _require_normal(x, "x", tol)
        _require_normal(y, "y", tol)
        _require_contractive(x, "x", tol)
        _require_contractive(y, "y", tol)
    a = np.asarray(a)
    eye = np.eye(x.ctx.dim)
    gx = hermitian_part(inner(x, x))
    gy = hermitian_part(inner(y, y))
    lo = (psd_power(hermitian_part(eye - gx), alpha / 2) @ a
          @ psd_power(hermitian_part(eye - gy), alpha / 2))
    hi = fractional_power_apply(ElementaryOperator(x, y), alpha, a, tol)
    detail, head = _ky_branches(lo, hi)
    dig = _digest(x, digest, params={"alpha": alpha})
    return _finish("check_alpha", {"family": head}, tol, dig, extra_detail=detail)


def check_defect(x: ModuleElement, y: ModuleElement, a,
                 p: float, q: float, r: float, *,
                 tol: ToleranceConfig = DEFAULT_TOL,
                 digest: dict | None = None) -> InequalityReport:
    """Defect-operator bound in Schatten-p norm, no normality required:

    ||D_x^(1-1/q) a D_y^(1-1/r)||_p <= ||D_xbar^(-1/q) (a - <x,ay>) D_ybar^(-1/r)||_p
    """
    _validate_pqr(p, q, r)
    a = np.asarray(a)
    dx, dy = defect_operator(x, tol), defect_operator(y, tol)
    dxb, dyb = defect_operator(conjugate(x), tol), defect_operator(conjugate(y), tol)
    lhs = norm(psd_power(dx, 1 - 1 / q) @ a @ psd_power(dy, 1 - 1 / r), schatten(p))
    resid = a - apply(ElementaryOperator(x, y), a)
    rhs = norm(psd_power(dxb, -1 / q) @ resid @ psd_power(dyb, -1 / r), schatten(p))
    branch = _scalar_branch(lhs, rhs)
    dig = _digest(x, digest, params={"p": p, "q": q, "r": r})
    return _finish("check_defect", {schatten(p).label: branch}, tol, dig)


def _gruss_family_defect(x: ModuleElement, y: ModuleElement, g: GrussContext,
                         tol: ToleranceConfig) -> None:
    """Verify the structural hypotheses of the covariance bounds.

    Each of x and y must be a normal element whose parts mutually commute,
    and every part of the reference e must be a scalar multiple of the
    identity.  A scalar reference keeps the centered elements x - e<e,x>
    inside the module's normal cone, which is what the covariance bound
    actually consumes; a merely commuting non-scalar reference is not
    enough.
    """
    d = g.e.ctx.dim
    worst, scale = 0.0, 1.0
    for z, tag in ((x, "x"), (y, "y")):
        ok, defect = is_normal(z, tol)
        nz = module_norm(z)
        scale = max(scale, nz * nz)
        if not ok:
            raise NotNormal(f"{tag} has normality defect {defect:.3e}")
        for i, pi in enumerate(z.parts):
            for pj in z.parts[i + 1:]:
                worst = max(worst, op_norm(pi @ pj - pj @ pi))
    for part in g.e.parts:
        diag = np.trace(part) / d
        worst = max(worst, op_norm(part - diag * np.eye(d)))
    if worst > tol.tol_rel * scale:
        raise NotNormal(f"instance leaves the scalar-reference commuting family "
                        f"by {worst:.3e}")


def check_gruss(x: ModuleElement, y: ModuleElement, a, g: GrussContext,
                ball=None, *, tol: ToleranceConfig = DEFAULT_TOL,
                strict: bool = True, digest: dict | None = None) -> InequalityReport:
    """Covariance (Gruss-type) bounds for Phi(x, ay) = <x,ay> - <x,e><e,ay>.

    The main branch compares |||Phi(x,ay)||| with
    |||Phi(x,x)^(1/2) a Phi(y,y)^(1/2)||| over the Ky Fan family.  When
    ``ball = (m, M, p, P)`` is given, membership of x in the ball [me, Me]
    and y in [pe, Pe] is verified first, and the diameter bound
    |||Phi(x,ay)||| <= (1/4) |||a||| |M-m| |P-p| is reported as well.
    """
    if x.ctx != g.e.ctx or y.ctx != g.e.ctx:
        raise CtxMismatch("x, y and the reference element live in different contexts")
    if strict:
        _gruss_family_defect(x, y, g, tol)
    a = np.asarray(a)
    d = x.ctx.dim
    if ball is not None:
        m, big_m, p, big_p = (float(v) for v in ball)
        for z, lo, hi, tag in ((x, m, big_m, "x"), (y, p, big_p, "y")):
            center = right_mul(g.e, (hi + lo) / 2 * np.eye(d))
            radius = abs(hi - lo) / 2
            dist = module_norm(z - center)
            if dist > radius + tol.tol_abs + tol.tol_rel * max(radius, 1.0):
                raise BallViolated(
                    f"{tag} sits {dist:.6f} from the ball center, radius {radius:.6f}")

    lo_mat = gruss_inner(x, left_act(a, y), g)
    phi_x = hermitian_part(gruss_inner(x, x, g))
    phi_y = hermitian_part(gruss_inner(y, y, g))
    hi_mat = psd_power(phi_x, 0.5, tol) @ a @ psd_power(phi_y, 0.5, tol)
    detail, head = _ky_branches(lo_mat, hi_mat, prefix="g3_")
    branches = {"g3": head}
    if ball is not None:
        diam = 0.25 * abs(big_m - m) * abs(big_p - p)
        mm_detail, mm_head = _ky_branches(lo_mat, diam * a, prefix="mm_")
        detail.update(mm_detail)
        branches["mm"] = mm_head
    dig = _digest(x, digest, params={"ball": list(ball) if ball is not None else None})
    return _finish("check_gruss", branches, tol, dig, extra_detail=detail)


def check_radius_submult(x: ModuleElement, y: ModuleElement, *,
                         tol: ToleranceConfig = DEFAULT_TOL,
                         digest: dict | None = None) -> InequalityReport:
    """r(T_{x,y})^2 <= r(T_{x,x}) r(T_{y,y}) via the vectorized spectra,
    with the probe/product bracket on ||T_{x,y}|| as a companion branch."""
    r_xy = spectral_radius(ElementaryOperator(x, y))
    r_xx = spectral_radius(ElementaryOperator(x, x))
    r_yy = spectral_radius(ElementaryOperator(y, y))
    radius = _scalar_branch(r_xy ** 2, r_xx * r_yy)
    bounds = operator_norm_T(ElementaryOperator(x, y))
    bracket = _scalar_branch(bounds.lower, bounds.upper)
    return _finish("check_radius_submult", {"radius_sq": radius, "opnorm_gap": bracket},
                   tol, _digest(x, digest))
