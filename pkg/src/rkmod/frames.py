"""Frames in finite-span Hilbert modules.

The frame operator of a family {x_j} is x -> sum_j x_j <x_j, x>; on stacked
coefficients (per summand) it acts as W G with W = sum_j X_j X_j^H, so its
realization is the Hermitian PSD matrix D U^H W U D with G = U diag(lam) U^H
and D = diag(sqrt(lam)). Sharp frame bounds are the extreme eigenvalues of
that realization across summands; a family is Parseval iff the realization is
the identity. The reconstruction identity K(s,t) = sum_j f_j(s) f_j(t)* holds
exactly for Parseval families and fails otherwise, which is what
``papadakis_identity_check`` tests pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotAFrameError, SpaceMismatchError
from .modules import ModuleSpace, ModuleVector
from .operators import AdjointableOp
from .tolerances import RANK_CUTOFF, RESIDUAL_TOL

__all__ = [
    "Frame",
    "FrameBounds",
    "canonical_tight",
    "frame_bounds",
    "frame_operator",
    "is_parseval",
    "papadakis_identity_check",
]


class Frame:
    """A nonempty finite family of module vectors."""

    __slots__ = ("space", "members")

    def __init__(self, space: ModuleSpace, members: Sequence[ModuleVector]):
        members = tuple(members)
        if not members:
            raise ValueError("a frame needs at least one member")
        for x in members:
            if x.space is not space:
                raise SpaceMismatchError("all members must live in the given space")
        self.space = space
        self.members = members

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"Frame(members={len(self.members)}, points={len(self.space.points)})"


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float


def _weight(frame: Frame, k: int) -> np.ndarray:
    """W_k = sum_j X_j X_j^H on summand k."""
    n = len(frame.space.points)
    nk = frame.space.signature[k]
    w = np.zeros((n * nk, n * nk), dtype=np.complex128)
    for x in frame.members:
        w += x.stacks[k] @ x.stacks[k].conj().T
    return w


def _realized_frame_op(frame: Frame, k: int) -> np.ndarray:
    space = frame.space
    u = space._range_basis[k]
    d = np.sqrt(space._range_values[k])
    core = u.conj().T @ _weight(frame, k) @ u
    mat = (d[:, None] * core) * d[None, :]
    return (mat + mat.conj().T) / 2.0


def frame_operator(frame: Frame) -> AdjointableOp:
    """The positive self-adjoint operator x -> sum_j x_j <x_j, x>."""
    space = frame.space
    mats = [_weight(frame, k) @ g for k, g in enumerate(space.grams)]
    return AdjointableOp(space, mats)


def frame_bounds(frame: Frame) -> FrameBounds:
    """Sharp constants: extreme eigenvalues of the realized frame operator."""
    lower, upper = np.inf, -np.inf
    dimension = 0
    for k in range(len(frame.space.signature)):
        mat = _realized_frame_op(frame, k)
        if mat.shape[0] == 0:
            continue
        dimension += mat.shape[0]
        eigs = np.linalg.eigvalsh(mat)
        lower = min(lower, float(eigs.min()))
        upper = max(upper, float(eigs.max()))
    if dimension == 0:
        raise ValueError("frame bounds are undefined on a zero-dimensional module")
    return FrameBounds(lower=lower, upper=upper)


def is_parseval(frame: Frame, tol: float = RESIDUAL_TOL) -> bool:
    """Whether the realized frame operator is the identity within tol."""
    for k in range(len(frame.space.signature)):
        mat = _realized_frame_op(frame, k)
        if mat.shape[0] == 0:
            continue
        if float(np.linalg.norm(mat - np.eye(mat.shape[0]), 2)) > tol:
            return False
    return True


def papadakis_identity_check(frame: Frame, tol: float = RESIDUAL_TOL) -> bool:
    """Pointwise reconstruction test K(s,t) = sum_j f_j(s) f_j(t)*.

    Each (s,t) defect must have operator norm at most tol * (1 + ||K||).
    """
    space = frame.space
    scale = tol * (1.0 + space.kernel.gram_norm())
    n = len(space.points)
    for k, nk in enumerate(space.signature):
        g = space.grams[k]
        acc = np.zeros_like(g)
        for x in frame.members:
            values = g @ x.stacks[k]  # stacked f(s) blocks
            acc += values @ values.conj().T
        defect = g - acc
        for i in range(n):
            for j in range(n):
                block = defect[i * nk : (i + 1) * nk, j * nk : (j + 1) * nk]
                if float(np.linalg.norm(block, 2)) > scale:
                    return False
    return True


def canonical_tight(frame: Frame, tol: float = RANK_CUTOFF) -> Frame:
    """The Parseval family {T^{-1/2} x_j}; NotAFrameError if the family does not frame."""
    space = frame.space
    bounds = frame_bounds(frame)
    if bounds.lower <= tol * (1.0 + bounds.upper):
        raise NotAFrameError(bounds.lower)
    real = space.realization
    roots = []
    for k in range(len(space.signature)):
        mat = _realized_frame_op(frame, k)
        if mat.shape[0] == 0:
            n = len(space.points) * space.signature[k]
            roots.append(np.zeros((n, n), dtype=np.complex128))
            continue
        lam, u = np.linalg.eigh(mat)
        inv_root = (u / np.sqrt(lam)) @ u.conj().T
        roots.append(real.lift_matrix(k, inv_root))
    members = [
        ModuleVector(space, [r @ a for r, a in zip(roots, x.stacks)])
        for x in frame.members
    ]
    return Frame(space, members)
