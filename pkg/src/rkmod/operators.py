"""Adjointable operators on a finite-span module.

An operator is stored by its coefficient action: per algebra summand one
matrix acting on stacked coefficient columns, assembled from the images of
the kernel sections. Construction verifies that the action annihilates null
coefficient vectors (otherwise it is not well defined on the quotient, and
not adjointable). Adjoints are computed through the Gram pseudo-inverse,
T* = G^+ T^H G, which agrees with the trace-realization adjoint.

Multiplication operators M_f resolve the value tables t -> f(t) K(t, s) into
span coefficients; the Berezin transform B_T(s) = <k_s, T k_s> K(s,s)^{-1}
recovers the symbol of a multiplication operator wherever K(s,s) is
invertible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .algebra import AlgebraElement, invert, operator_norm
from .errors import (
    NotAMultiplierError,
    NotInvertibleError,
    SpaceMismatchError,
)
from .modules import ModuleSpace, ModuleVector, evaluate, inner_product, vector_norm
from .tolerances import INVERT_EPS, PSD_TOL, RESIDUAL_TOL

__all__ = [
    "AdjointableOp",
    "MultiplierSymbol",
    "RecoveredSymbol",
    "adjoint",
    "apply",
    "berezin",
    "multiplication_operator",
    "multiplier_adjoint_check",
    "op_distance",
    "recover_symbol",
]


class AdjointableOp:
    """An algebra-linear adjointable operator, stored per summand."""

    __slots__ = ("space", "mats")

    def __init__(self, space: ModuleSpace, mats, *, tol: float = PSD_TOL):
        self.space = space
        self.mats = tuple(np.asarray(m, dtype=np.complex128) for m in mats)
        n = len(space.points)
        for k, (nk, m) in enumerate(zip(space.signature, self.mats)):
            if m.shape != (n * nk, n * nk):
                raise ValueError(f"summand {k} action has shape {m.shape}")
        for k, (g, m) in enumerate(zip(space.grams, self.mats)):
            null = space._null_basis[k]
            if null.shape[1] == 0:
                continue
            defect = float(np.linalg.norm(g @ (m @ null), 2))
            scale = tol * (1.0 + float(np.linalg.norm(g @ m, 2)))
            if defect > scale:
                raise ValueError(
                    f"action is inconsistent across null identifications on summand {k} "
                    f"(defect {defect:.3e}); no adjoint exists"
                )

    @classmethod
    def identity(cls, space: ModuleSpace) -> "AdjointableOp":
        n = len(space.points)
        return cls(space, [np.eye(n * nk) for nk in space.signature])

    @classmethod
    def zero(cls, space: ModuleSpace) -> "AdjointableOp":
        n = len(space.points)
        return cls(space, [np.zeros((n * nk, n * nk)) for nk in space.signature])

    @classmethod
    def from_action(
        cls, space: ModuleSpace, action: Mapping[str, ModuleVector], tol: float = PSD_TOL
    ) -> "AdjointableOp":
        """Build from the table s -> T(k_s)."""
        n = len(space.points)
        mats = [np.zeros((n * nk, n * nk), dtype=np.complex128) for nk in space.signature]
        for s in space.points:
            try:
                image = action[s]
            except KeyError:
                raise ValueError(f"action table is missing the section at {s!r}") from None
            if image.space is not space:
                raise SpaceMismatchError(f"image at {s!r} lives in a different space")
            i = space.points.index(s)
            for k, nk in enumerate(space.signature):
                mats[k][:, i * nk : (i + 1) * nk] = image.stacks[k]
        return cls(space, mats, tol=tol)

    def section_image(self, s: str) -> ModuleVector:
        """T(k_s)."""
        i = self.space.points.index(s)
        stacks = [
            m[:, i * nk : (i + 1) * nk] for nk, m in zip(self.space.signature, self.mats)
        ]
        return ModuleVector(self.space, stacks)

    def action(self) -> dict[str, ModuleVector]:
        return {s: self.section_image(s) for s in self.space.points}

    def __call__(self, xi: ModuleVector) -> ModuleVector:
        if xi.space is not self.space:
            raise SpaceMismatchError("vector belongs to a different module space")
        return ModuleVector(self.space, [m @ a for m, a in zip(self.mats, xi.stacks)])

    def __add__(self, other: "AdjointableOp") -> "AdjointableOp":
        if not isinstance(other, AdjointableOp):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatchError("operators act on different spaces")
        return AdjointableOp(self.space, [a + b for a, b in zip(self.mats, other.mats)])

    def __sub__(self, other: "AdjointableOp") -> "AdjointableOp":
        if not isinstance(other, AdjointableOp):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatchError("operators act on different spaces")
        return AdjointableOp(self.space, [a - b for a, b in zip(self.mats, other.mats)])

    def __matmul__(self, other: "AdjointableOp") -> "AdjointableOp":
        if not isinstance(other, AdjointableOp):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatchError("operators act on different spaces")
        return AdjointableOp(self.space, [a @ b for a, b in zip(self.mats, other.mats)])

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return AdjointableOp(self.space, [complex(other) * m for m in self.mats])
        return NotImplemented

    __rmul__ = __mul__

    def adjoint(self) -> "AdjointableOp":
        """The module adjoint T* = G^+ T^H G per summand."""
        mats = []
        for k, (g, m) in enumerate(zip(self.space.grams, self.mats)):
            mats.append(self.space.gram_pinv(k) @ m.conj().T @ g)
        return AdjointableOp(self.space, mats)

    def realized(self) -> list[np.ndarray]:
        """Realization matrices, one r_k x r_k block per summand."""
        real = self.space.realization
        return [real.operator_matrix(k, m) for k, m in enumerate(self.mats)]

    def __repr__(self) -> str:
        return f"AdjointableOp(points={len(self.space.points)})"


def apply(op: AdjointableOp, xi: ModuleVector) -> ModuleVector:
    """Extend the section action algebra-linearly to xi."""
    return op(xi)


def adjoint(op: AdjointableOp) -> AdjointableOp:
    return op.adjoint()


def op_distance(a: AdjointableOp, b: AdjointableOp) -> float:
    """max_s ||A(k_s) - B(k_s)|| — zero iff the operators agree on the module."""
    if a.space is not b.space:
        raise SpaceMismatchError("operators act on different spaces")
    return max(
        vector_norm(a.section_image(s) - b.section_image(s)) for s in a.space.points
    )


class MultiplierSymbol:
    """A function S -> algebra acting by pointwise left multiplication."""

    __slots__ = ("space", "values")

    def __init__(self, space: ModuleSpace, values: Mapping[str, AlgebraElement]):
        table = {}
        for s in space.points:
            try:
                el = values[s]
            except KeyError:
                raise ValueError(f"symbol is missing a value at point {s!r}") from None
            if el.signature != space.signature:
                raise SpaceMismatchError(
                    f"symbol value at {s!r} has signature {el.signature}, "
                    f"expected {space.signature}"
                )
            table[s] = el
        self.space = space
        self.values = table

    def value(self, s: str) -> AlgebraElement:
        return self.values[s]

    def diag(self, k: int) -> np.ndarray:
        """Block-diagonal matrix of the summand-k values along the point order."""
        space = self.space
        nk = space.signature[k]
        n = len(space.points)
        d = np.zeros((n * nk, n * nk), dtype=np.complex128)
        for i, s in enumerate(space.points):
            d[i * nk : (i + 1) * nk, i * nk : (i + 1) * nk] = self.values[s].blocks[k]
        return d

    def __repr__(self) -> str:
        return f"MultiplierSymbol(points={len(self.space.points)})"


def multiplication_operator(
    symbol: MultiplierSymbol, tol: float = RESIDUAL_TOL
) -> AdjointableOp:
    """The operator M_f, or NotAMultiplierError when f does not preserve the span.

    For each s the value table t -> f(t) K(t, s) is resolved into span
    coefficients by least squares; the symbol is certified iff every residual
    is at most tol * (1 + value-table norm).
    """
    space = symbol.space
    n = len(space.points)
    mats = []
    worst_point, worst_residual, certified = None, 0.0, True
    for k, nk in enumerate(space.signature):
        g = space.grams[k]
        target = symbol.diag(k) @ g
        coeff = space.gram_pinv(k) @ target
        misfit = g @ coeff - target
        for i, s in enumerate(space.points):
            block = misfit[:, i * nk : (i + 1) * nk]
            res = float(np.linalg.norm(block, 2))
            scale = 1.0 + float(np.linalg.norm(target[:, i * nk : (i + 1) * nk], 2))
            if res > tol * scale and res > worst_residual:
                worst_point, worst_residual, certified = s, res, False
        mats.append(coeff)
    if not certified:
        raise NotAMultiplierError(worst_point, worst_residual)
    return AdjointableOp(space, mats)


def multiplier_adjoint_check(
    symbol: MultiplierSymbol, tol: float = PSD_TOL, residual_tol: float = RESIDUAL_TOL
) -> bool:
    """Verify M_f*(k_s) = k_s f(s)* at every point."""
    op = multiplication_operator(symbol, residual_tol)
    adj = op.adjoint()
    for s in symbol.space.points:
        expected = symbol.space.section(s) * symbol.value(s).star
        if vector_norm(adj.section_image(s) - expected) > tol:
            return False
    return True


def berezin(op: AdjointableOp, s: str, eps: float = INVERT_EPS) -> AlgebraElement:
    """B_T(s) = <k_s, T(k_s)> K(s,s)^{-1}; NotInvertibleError outside the domain."""
    section = op.space.section(s)
    corner = op.space.kernel.value(s, s)
    return inner_product(section, op(section)) * invert(corner, eps)


@dataclass(frozen=True)
class RecoveredSymbol:
    symbol: MultiplierSymbol
    is_multiplication: bool
    worst_deviation: float
    admissible_points: tuple[str, ...]


def recover_symbol(
    op: AdjointableOp, tol: float = RESIDUAL_TOL, eps: float = INVERT_EPS
) -> RecoveredSymbol:
    """Candidate symbol from Berezin values; zero where K(s,s) is not invertible.

    ``is_multiplication`` is true iff the candidate is a certified multiplier
    and M_f agrees with the operator on every section within tol.
    """
    space = op.space
    values, admissible = {}, []
    for s in space.points:
        try:
            values[s] = berezin(op, s, eps)
            admissible.append(s)
        except NotInvertibleError:
            values[s] = AlgebraElement.zero(space.signature)
    symbol = MultiplierSymbol(space, values)
    try:
        candidate = multiplication_operator(symbol, tol)
    except NotAMultiplierError as err:
        return RecoveredSymbol(symbol, False, err.residual, tuple(admissible))
    deviation = op_distance(op, candidate)
    return RecoveredSymbol(symbol, deviation <= tol, deviation, tuple(admissible))
