"""Weighted tuples of matrices with a matrix-valued inner product.

A context fixes the square-matrix dimension d, the tuple length n and
strictly positive weights.  An element is an n-tuple of d x d complex
matrices; the inner product

    <x, y> = sum_t w_t x_t* y_t

together with componentwise left/right multiplication and the
componentwise-adjoint conjugation x -> (x_1*, ..., x_n*) provides the
bimodule structure the transformer calculus and the inequality suite
are built on.  Elements are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, ToleranceConfig, as_matrix, op_norm
from .errors import CtxMismatch, DimMismatch, NotUnital


@dataclass(frozen=True)
class ModuleContext:
    dim: int
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        w = tuple(float(v) for v in self.weights)
        if len(w) < 1:
            raise ValueError("length must be >= 1")
        if any(not np.isfinite(v) or v <= 0 for v in w):
            raise ValueError("weights must be strictly positive and finite")
        object.__setattr__(self, "weights", w)

    @property
    def length(self) -> int:
        return len(self.weights)


def uniform_context(dim: int, length: int) -> ModuleContext:
    return ModuleContext(dim, (1.0,) * length)


@dataclass(frozen=True, eq=False)
class ModuleElement:
    ctx: ModuleContext
    parts: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.parts) != self.ctx.length:
            raise DimMismatch(
                f"expected {self.ctx.length} parts, got {len(self.parts)}"
            )
        frozen = []
        for p in self.parts:
            a = as_matrix(p)
            if a.shape[0] != self.ctx.dim:
                raise DimMismatch(
                    f"part of shape {a.shape} in a dim-{self.ctx.dim} context"
                )
            a = a.copy()
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "parts", tuple(frozen))

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        _same_ctx(self, other)
        return ModuleElement(self.ctx, tuple(p + q for p, q in zip(self.parts, other.parts)))

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        _same_ctx(self, other)
        return ModuleElement(self.ctx, tuple(p - q for p, q in zip(self.parts, other.parts)))

    def __neg__(self) -> "ModuleElement":
        return ModuleElement(self.ctx, tuple(-p for p in self.parts))

    def __mul__(self, c) -> "ModuleElement":
        if not isinstance(c, (int, float, complex, np.number)):
            return NotImplemented
        return ModuleElement(self.ctx, tuple(c * p for p in self.parts))

    __rmul__ = __mul__


def element(parts, weights=None) -> ModuleElement:
    """Build an element from a list of matrices, uniform weights by default."""
    mats = [as_matrix(p) for p in parts]
    if not mats:
        raise DimMismatch("an element needs at least one part")
    d = mats[0].shape[0]
    if weights is None:
        ctx = uniform_context(d, len(mats))
    else:
        ctx = ModuleContext(d, tuple(weights))
    return ModuleElement(ctx, tuple(mats))


def _same_ctx(x: ModuleElement, y: ModuleElement) -> None:
    if x.ctx != y.ctx:
        raise CtxMismatch("elements belong to different module contexts")


def inner(x: ModuleElement, y: ModuleElement) -> np.ndarray:
    """<x, y> = sum_t w_t x_t* y_t."""
    _same_ctx(x, y)
    d = x.ctx.dim
    acc = np.zeros((d, d), dtype=complex)
    for w, xt, yt in zip(x.ctx.weights, x.parts, y.parts):
        acc += w * (xt.conj().T @ yt)
    return acc


def right_mul(x: ModuleElement, a) -> ModuleElement:
    """Module action x.a = (x_t a)."""
    m = as_matrix(a)
    if m.shape[0] != x.ctx.dim:
        raise DimMismatch(f"matrix of shape {m.shape} in a dim-{x.ctx.dim} context")
    return ModuleElement(x.ctx, tuple(p @ m for p in x.parts))


def left_act(a, x: ModuleElement) -> ModuleElement:
    """Algebra action a.x = (a x_t)."""
    m = as_matrix(a)
    if m.shape[0] != x.ctx.dim:
        raise DimMismatch(f"matrix of shape {m.shape} in a dim-{x.ctx.dim} context")
    return ModuleElement(x.ctx, tuple(m @ p for p in x.parts))


def conjugate(x: ModuleElement) -> ModuleElement:
    """Componentwise adjoint, the modular conjugation of the tuple module."""
    return ModuleElement(x.ctx, tuple(p.conj().T for p in x.parts))


def module_norm(x: ModuleElement) -> float:
    """||x|| = ||<x, x>||^(1/2) in the operator norm."""
    return float(np.sqrt(op_norm(inner(x, x))))


def is_normal(x: ModuleElement, cfg: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether x commutes with its Gram matrix and conjugation preserves it.

    The defect is the larger of max_t ||<x,x> x_t - x_t <x,x>|| and
    ||<x,x> - <xbar,xbar>||; it is compared against tol_rel at the scale
    of ||x||^3 (the natural size of the commutator term).
    """
    g = inner(x, x)
    gbar = inner(conjugate(x), conjugate(x))
    comm = max(op_norm(g @ p - p @ g) for p in x.parts)
    defect = max(comm, op_norm(g - gbar))
    nx = float(np.sqrt(op_norm(g)))
    scale = max(1.0, nx**2, nx**3)
    return bool(defect <= cfg.tol_rel * scale), float(defect)


@dataclass(frozen=True, eq=False)
class GrussContext:
    """A unit reference element e with <e, e> = I.

    Construction rejects non-unit candidates instead of renormalizing
    them, so every downstream covariance quantity can rely on the exact
    hypothesis.
    """

    e: ModuleElement

    def __post_init__(self) -> None:
        g = inner(self.e, self.e)
        defect = op_norm(g - np.eye(self.e.ctx.dim))
        if defect > DEFAULT_TOL.tol_rel:
            raise NotUnital(f"<e, e> deviates from the identity by {defect:.3e}")


def gruss_inner(x: ModuleElement, y: ModuleElement, g: GrussContext) -> np.ndarray:
    """Covariance form Phi(x, y) = <x, y> - <x, e><e, y>."""
    _same_ctx(x, g.e)
    _same_ctx(y, g.e)
    return inner(x, y) - inner(x, g.e) @ inner(g.e, y)


def element_to_json(x: ModuleElement) -> dict:
    """Serialize as {dim, weights, parts} with row-major [re, im] entry pairs."""
    return {
        "dim": x.ctx.dim,
        "weights": list(x.ctx.weights),
        "parts": [
            [[float(v.real), float(v.imag)] for v in p.reshape(-1)] for p in x.parts
        ],
    }


def element_from_json(obj) -> ModuleElement:
    """Exact inverse of element_to_json."""
    d = int(obj["dim"])
    weights = tuple(float(w) for w in obj["weights"])
    parts = []
    for flat in obj["parts"]:
        if len(flat) != d * d:
            raise DimMismatch(f"part with {len(flat)} entries in a dim-{d} context")
        arr = np.array([complex(re, im) for re, im in flat], dtype=complex).reshape(d, d)
        parts.append(arr)
    return ModuleElement(ModuleContext(d, weights), tuple(parts))
