"""Scaled companions of feature functions inside a feature-built module.

Given a kernel assembled from a feature family, a central-valued function psi
on a set of uniqueness X and a constant c > 0, the contraction condition

    sum_{i,j} a_i* K(x_i, x_j) (c^2 - psi(x_i)* psi(x_j)) a_j >= 0

guarantees that each feature e_a has a companion element of the module whose
values on X are e_a(x) psi(x). The companion is realized directly by solving
the interpolation problem over X (exact at finite scale). Downstream checks
verify the companion family: the pairwise intertwining relation and, when the
features have central values and every K(s,s) is invertible, the pointwise
modulus bound |phi_a(s)| <= c |e_a(s)|.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .algebra import (
    AlgebraElement,
    block_psd,
    invert,
    is_central,
    modulus,
    is_positive,
    operator_norm,
)
from .errors import NoExtensionError, NotCentralError
from .kernels import FeatureFamily, kernel_from_features
from .modules import ModuleSpace, ModuleVector, evaluate, is_set_of_uniqueness, membership
from .tolerances import INVERT_EPS, PSD_TOL, RESIDUAL_TOL

__all__ = [
    "PsiContractionInstance",
    "contraction_check",
    "construct_phi",
    "intertwining_check",
    "modulus_bound_check",
]


class PsiContractionInstance:
    """Kernel-from-features, a central psi on a set of uniqueness, and c > 0.

    Validation is eager: psi values must be central, the subset must be a set
    of uniqueness of the module, and the kernel is built from the features so
    the provenance invariant holds by construction.
    """

    def __init__(
        self,
        features: FeatureFamily,
        psi: Mapping[str, AlgebraElement],
        c: float,
        uniqueness_set: Sequence[str],
        *,
        central_tol: float = PSD_TOL,
        uniqueness_tol: float = RESIDUAL_TOL,
    ):
        if not c > 0:
            raise ValueError(f"c must be positive, got {c}")
        self.features = features
        self.kernel = kernel_from_features(features)
        self.space = ModuleSpace(self.kernel)
        self.c = float(c)

        subset = list(uniqueness_set)
        for x in subset:
            features.points.index(x)  # raises on unknown labels
        if len(set(subset)) != len(subset):
            raise ValueError("uniqueness set contains duplicate points")
        if not subset:
            raise ValueError("uniqueness set must be nonempty")
        self.uniqueness_set = tuple(subset)

        table = {}
        for x in subset:
            try:
                el = psi[x]
            except KeyError:
                raise ValueError(f"psi is missing a value at point {x!r}") from None
            if el.signature != features.signature:
                raise ValueError(
                    f"psi({x!r}) has signature {el.signature}, expected {features.signature}"
                )
            if not is_central(el, central_tol):
                raise NotCentralError(f"psi({x!r}) is not central")
            table[x] = el
        self.psi = table

        if not is_set_of_uniqueness(self.space, subset, uniqueness_tol):
            raise ValueError("the given subset is not a set of uniqueness of the module")

    def __repr__(self) -> str:
        return (
            f"PsiContractionInstance(features={len(self.features)}, "
            f"c={self.c}, X={list(self.uniqueness_set)!r})"
        )


def contraction_check(inst: PsiContractionInstance, tol: float = PSD_TOL) -> bool:
    """Positivity of the block array K(x_i,x_j) (c^2 - psi(x_i)* psi(x_j))."""
    c2 = AlgebraElement.from_scalar(inst.features.signature, inst.c * inst.c)
    xs = inst.uniqueness_set
    grid = []
    for xi in xs:
        row = []
        for xj in xs:
            factor = c2 - inst.psi[xi].star * inst.psi[xj]
            row.append(inst.kernel.value(xi, xj) * factor)
        grid.append(row)
    return block_psd(grid, tol)


def construct_phi(
    inst: PsiContractionInstance, alpha: int, tol: float = RESIDUAL_TOL
) -> ModuleVector:
    """The module element with values e_alpha(x) psi(x) on the uniqueness set.

    Uniqueness of X makes the element unique; NoExtensionError reports the
    least-squares residual when the prescribed values do not extend, which
    flags a violated hypothesis.
    """
    values = {x: inst.features.value(alpha, x) * inst.psi[x] for x in inst.uniqueness_set}
    result = membership(inst.space, values, inst.uniqueness_set, tol)
    if not result.is_member:
        raise NoExtensionError(result.residual)
    return result.vector


def intertwining_check(
    inst: PsiContractionInstance, alpha: int, beta: int, tol: float = RESIDUAL_TOL
) -> bool:
    """Whether e_alpha(s) phi_beta(s) = e_beta(s) phi_alpha(s) on all of S."""
    phi_a = construct_phi(inst, alpha, tol)
    phi_b = construct_phi(inst, beta, tol)
    for s in inst.space.points:
        lhs = inst.features.value(alpha, s) * evaluate(phi_b, s)
        rhs = inst.features.value(beta, s) * evaluate(phi_a, s)
        if operator_norm(lhs - rhs) > tol:
            return False
    return True


def modulus_bound_check(
    inst: PsiContractionInstance,
    alpha: int,
    eps: float = INVERT_EPS,
    tol: float = PSD_TOL,
) -> bool:
    """Pointwise bound |phi_alpha(s)| <= c |e_alpha(s)| over all of S.

    Preconditions are reported distinctly: every feature value must be
    central (NotCentralError) and every K(s,s) must pass the invertibility
    threshold (NotInvertibleError).
    """
    for a in range(len(inst.features)):
        for s in inst.space.points:
            if not is_central(inst.features.value(a, s), tol):
                raise NotCentralError(f"feature {a} has a non-central value at {s!r}")
    for s in inst.space.points:
        invert(inst.kernel.value(s, s), eps)

    phi = construct_phi(inst, alpha)
    c = inst.c
    for s in inst.space.points:
        bound = c * modulus(inst.features.value(alpha, s)) - modulus(evaluate(phi, s))
        if not is_positive(bound, tol):
            return False
    return True
