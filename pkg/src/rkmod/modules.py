"""Finite-span Hilbert modules built from a positive definite kernel.

A validated kernel K on points S over the algebra A spans a module whose
elements are finite combinations xi = sum_s k_s a_s of kernel sections with
algebra coefficients. Over a finite point set and a finite-dimensional
algebra the span is already complete, so every "dense span" statement of the
underlying theory becomes an exact statement here.

Representation. The algebra splits into matrix summands, and so does all of
the linear algebra: per summand k (block size n_k) a vector is stored as the
(n*n_k) x n_k complex matrix obtained by stacking its coefficient blocks, and
the kernel contributes the realized Gram matrix G_k. Then

    <xi, eta>_k = A_k^H G_k B_k          (algebra-valued inner product)
    xi(t)_k     = (rows of G_k at t) A_k (evaluation)

Coefficient matrices in the null space of G_k represent the zero element;
equality of vectors is seminorm equality. Least-squares solves use a
pseudo-inverse with a fixed relative rank cutoff so rank decisions are
deterministic.

The trace functional turns the quotiented coefficient space into a genuine
Hilbert space (the *realization*), used to compute spectra of operators and
sharp frame bounds: columns of a coefficient matrix transform independently,
so the realization of summand k is rank(G_k) coordinates with multiplicity
n_k, and module adjoints coincide with realization adjoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import AlgebraElement, operator_norm
from .errors import NotInRangeError, SpaceMismatchError
from .kernels import Kernel, kernel_tensor, validate_kernel
from .tolerances import PSD_TOL, RANK_CUTOFF, RESIDUAL_TOL

__all__ = [
    "HilbertRealization",
    "InterpolationResult",
    "MembershipResult",
    "ModuleSpace",
    "ModuleVector",
    "evaluate",
    "exterior_norm",
    "hilbert_realization",
    "inner_product",
    "is_set_of_uniqueness",
    "membership",
    "minimal_norm_interpolant",
    "projection",
    "tensor_embed",
    "vector_norm",
]


class ModuleSpace:
    """The span of the kernel sections of a validated PD kernel.

    Construction validates the kernel (Hermitian + PSD within ``tol``) and
    caches, per algebra summand, the Hermitized Gram, its eigendecomposition
    split at the rank cutoff, the range projector and the pseudo-inverse.
    Immutable afterwards; all operations on it are pure.
    """

    def __init__(self, kernel: Kernel, tol: float = PSD_TOL):
        report = validate_kernel(kernel, tol)
        if not report.positive_definite:
            raise ValueError(
                "kernel is not positive definite "
                f"(hermitian defect {report.hermitian_defect:.3e}, "
                f"min eigenvalue {report.min_eigenvalue:.3e})"
            )
        self.kernel = kernel
        self.points = kernel.points
        self.signature = kernel.signature
        self.report = report
        self.grams = tuple((m + m.conj().T) / 2.0 for m in kernel.mats)

        basis, values, nulls, pinvs = [], [], [], []
        for g in self.grams:
            lam, u = np.linalg.eigh(g)
            lam_max = float(lam.max(initial=0.0))
            threshold = RANK_CUTOFF * lam_max if lam_max > 0.0 else np.inf
            keep = lam > threshold
            basis.append(u[:, keep])
            values.append(lam[keep])
            nulls.append(u[:, ~keep])
            pinvs.append((u[:, keep] / lam[keep]) @ u[:, keep].conj().T)
        self._range_basis = tuple(basis)  # per summand: (n*n_k) x r_k
        self._range_values = tuple(values)  # per summand: eigenvalues on the range
        self._null_basis = tuple(nulls)
        self._gram_pinv = tuple(pinvs)
        self._realization: HilbertRealization | None = None

    # -- construction of vectors -------------------------------------------

    def zero(self) -> "ModuleVector":
        n = len(self.points)
        return ModuleVector(
            self, [np.zeros((n * nk, nk), dtype=np.complex128) for nk in self.signature]
        )

    def section(self, s: str) -> "ModuleVector":
        """The kernel section k_s (unit coefficient at s)."""
        i = self.points.index(s)
        n = len(self.points)
        stacks = []
        for nk in self.signature:
            a = np.zeros((n * nk, nk), dtype=np.complex128)
            a[i * nk : (i + 1) * nk] = np.eye(nk)
            stacks.append(a)
        return ModuleVector(self, stacks)

    def vector(self, coefficients: Mapping[str, AlgebraElement]) -> "ModuleVector":
        """Vector with the given coefficients; missing points mean zero."""
        n = len(self.points)
        stacks = [np.zeros((n * nk, nk), dtype=np.complex128) for nk in self.signature]
        for s, el in coefficients.items():
            i = self.points.index(s)
            if el.signature != self.signature:
                raise SpaceMismatchError(
                    f"coefficient at {s!r} has signature {el.signature}, "
                    f"expected {self.signature}"
                )
            for k, nk in enumerate(self.signature):
                stacks[k][i * nk : (i + 1) * nk] = el.blocks[k]
        return ModuleVector(self, stacks)

    def null_dimensions(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self._null_basis)

    def gram_pinv(self, k: int) -> np.ndarray:
        return self._gram_pinv[k]

    def project_range(self, k: int, mat: np.ndarray) -> np.ndarray:
        u = self._range_basis[k]
        return u @ (u.conj().T @ mat)

    @property
    def realization(self) -> "HilbertRealization":
        if self._realization is None:
            self._realization = HilbertRealization(self)
        return self._realization

    def __repr__(self) -> str:
        return f"ModuleSpace({self.kernel!r})"


class ModuleVector:
    """A finite combination of kernel sections, stored per summand.

    Supports ``+``, ``-``, scaling by complex numbers and the right module
    action ``xi * a`` for an algebra element ``a``. Two vectors represent the
    same module element iff their difference has vector_norm ~ 0; use
    ``isclose`` rather than ``==``.
    """

    __slots__ = ("space", "stacks")

    def __init__(self, space: ModuleSpace, stacks: Sequence[np.ndarray]):
        self.space = space
        self.stacks = tuple(np.asarray(a, dtype=np.complex128) for a in stacks)
        n = len(space.points)
        for nk, a in zip(space.signature, self.stacks):
            if a.shape != (n * nk, nk):
                raise ValueError(f"coefficient stack has shape {a.shape}, expected {(n * nk, nk)}")

    def _require_same_space(self, other: "ModuleVector") -> None:
        if self.space is not other.space:
            raise SpaceMismatchError("vectors belong to different module spaces")

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        if not isinstance(other, ModuleVector):
            return NotImplemented
        self._require_same_space(other)
        return ModuleVector(self.space, [a + b for a, b in zip(self.stacks, other.stacks)])

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        if not isinstance(other, ModuleVector):
            return NotImplemented
        self._require_same_space(other)
        return ModuleVector(self.space, [a - b for a, b in zip(self.stacks, other.stacks)])

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.space, [-a for a in self.stacks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            if other.signature != self.space.signature:
                raise SpaceMismatchError(
                    f"algebra element signature {other.signature} does not match "
                    f"space signature {self.space.signature}"
                )
            return ModuleVector(
                self.space, [a @ b for a, b in zip(self.stacks, other.blocks)]
            )
        if isinstance(other, (int, float, complex)):
            return ModuleVector(self.space, [complex(other) * a for a in self.stacks])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return ModuleVector(self.space, [complex(other) * a for a in self.stacks])
        return NotImplemented

    def coefficient(self, s: str) -> AlgebraElement:
        i = self.space.points.index(s)
        blocks = [
            a[i * nk : (i + 1) * nk] for nk, a in zip(self.space.signature, self.stacks)
        ]
        return AlgebraElement(self.space.signature, blocks)

    def coefficients(self) -> dict[str, AlgebraElement]:
        return {s: self.coefficient(s) for s in self.space.points}

    def isclose(self, other: "ModuleVector", tol: float = PSD_TOL) -> bool:
        return vector_norm(self - other) <= tol

    def norm(self) -> float:
        return vector_norm(self)

    def __repr__(self) -> str:
        return f"ModuleVector(points={len(self.space.points)}, norm={self.norm():.6g})"


def inner_product(xi: ModuleVector, eta: ModuleVector) -> AlgebraElement:
    """Algebra-valued inner product sum_{i,j} a_i* K(s_i, t_j) b_j."""
    xi._require_same_space(eta)
    blocks = [
        a.conj().T @ g @ b for a, g, b in zip(xi.stacks, xi.space.grams, eta.stacks)
    ]
    return AlgebraElement(xi.space.signature, blocks)


def vector_norm(xi: ModuleVector) -> float:
    """Module norm ||<xi, xi>||^(1/2)."""
    return float(np.sqrt(operator_norm(inner_product(xi, xi))))


def evaluate(xi: ModuleVector, t: str) -> AlgebraElement:
    """The function value xi(t) = <k_t, xi>."""
    i = xi.space.points.index(t)
    blocks = [
        g[i * nk : (i + 1) * nk, :] @ a
        for nk, g, a in zip(xi.space.signature, xi.space.grams, xi.stacks)
    ]
    return AlgebraElement(xi.space.signature, blocks)


@dataclass(frozen=True)
class MembershipResult:
    coefficients: dict[str, AlgebraElement]
    residual: float
    is_member: bool
    vector: ModuleVector


def membership(
    space: ModuleSpace,
    values: Mapping[str, AlgebraElement],
    basis_points: Sequence[str],
    tol: float = RESIDUAL_TOL,
) -> MembershipResult:
    """Least-squares resolution of a value table into span coefficients.

    Solves sum_{p' in basis_points} K(p, p') b_{p'} ~ values(p) over the
    points p carrying values, one ordinary complex least-squares problem per
    algebra summand. The residual is the largest realized 2-norm misfit over
    summands; membership is declared iff residual <= tol * (1 + ||values||).
    """
    basis_points = list(basis_points)
    order = [s for s in space.points if s in values]
    if len(order) != len(values):
        unknown = set(values) - set(space.points.labels)
        raise KeyError(f"values given at unknown points {sorted(unknown)!r}")
    if not basis_points:
        raise ValueError("basis_points must be nonempty")
    rows = [space.points.index(p) for p in order]
    cols = [space.points.index(p) for p in basis_points]

    n = len(space.points)
    residual = 0.0
    value_norm = 0.0
    coeff_stacks = []
    for k, nk in enumerate(space.signature):
        g = space.grams[k]
        row_idx = np.concatenate([np.arange(i * nk, (i + 1) * nk) for i in rows])
        col_idx = np.concatenate([np.arange(j * nk, (j + 1) * nk) for j in cols])
        sub = g[np.ix_(row_idx, col_idx)]
        rhs = np.vstack([values[p].blocks[k] for p in order])
        b = np.linalg.pinv(sub, rcond=RANK_CUTOFF) @ rhs
        misfit = sub @ b - rhs
        residual = max(residual, float(np.linalg.norm(misfit, 2)) if misfit.size else 0.0)
        value_norm = max(value_norm, float(np.linalg.norm(rhs, 2)) if rhs.size else 0.0)
        coeff_stacks.append(b)

    coefficients = {}
    for pos, p in enumerate(basis_points):
        blocks = [
            coeff_stacks[k][pos * nk : (pos + 1) * nk]
            for k, nk in enumerate(space.signature)
        ]
        coefficients[p] = AlgebraElement(space.signature, blocks)
    vec = space.vector(coefficients)
    is_member = residual <= tol * (1.0 + value_norm)
    return MembershipResult(coefficients, residual, is_member, vec)


def projection(xi: ModuleVector, points_subset: Iterable[str]) -> ModuleVector:
    """Orthogonal projection onto span{k_s : s in the subset}.

    The projected vector matches xi at every subset point and the difference
    is orthogonal to all subset sections. An empty subset projects to zero.
    """
    subset = list(points_subset)
    space = xi.space
    if not subset:
        return space.zero()
    rows = [space.points.index(p) for p in subset]
    stacks = []
    n = len(space.points)
    for k, nk in enumerate(space.signature):
        g = space.grams[k]
        idx = np.concatenate([np.arange(i * nk, (i + 1) * nk) for i in rows])
        sub = g[np.ix_(idx, idx)]
        rhs = (g @ xi.stacks[k])[idx]
        c = np.linalg.pinv(sub, rcond=RANK_CUTOFF) @ rhs
        full = np.zeros((n * nk, nk), dtype=np.complex128)
        full[idx] = c
        stacks.append(full)
    return ModuleVector(space, stacks)


@dataclass(frozen=True)
class InterpolationResult:
    vector: ModuleVector
    norm: float
    residual: float


def minimal_norm_interpolant(
    space: ModuleSpace,
    points: Sequence[str],
    targets: Sequence[AlgebraElement],
    tol: float = RESIDUAL_TOL,
) -> InterpolationResult:
    """The minimal-norm element interpolating targets on the given points.

    Solves the Gram system (K(s_i, s_j)) b = a per summand by pseudo-inverse.
    When the residual certifies the targets lie in the Gram range, returns
    f = sum_j k_{s_j} b_j (the unique minimal-norm interpolant) with reported
    norm ||<b, a>||^(1/2); otherwise raises NotInRangeError.
    """
    points = list(points)
    if len(set(points)) != len(points):
        raise ValueError("interpolation points must be distinct")
    if len(points) != len(targets):
        raise ValueError("one target per point is required")
    for s, a in zip(points, targets):
        if a.signature != space.signature:
            raise SpaceMismatchError(
                f"target at {s!r} has signature {a.signature}, expected {space.signature}"
            )
    result = membership(space, dict(zip(points, targets)), points, tol)
    if not result.is_member:
        raise NotInRangeError(result.residual)
    pairing_blocks = []
    for k, nk in enumerate(space.signature):
        b = np.vstack([result.coefficients[p].blocks[k] for p in points])
        a = np.vstack([t.blocks[k] for t in targets])
        pairing_blocks.append(b.conj().T @ a)
    pairing = AlgebraElement(space.signature, pairing_blocks)
    norm = float(np.sqrt(operator_norm(pairing)))
    return InterpolationResult(result.vector, norm, result.residual)


def is_set_of_uniqueness(
    space: ModuleSpace, subset: Iterable[str], tol: float = RESIDUAL_TOL
) -> bool:
    """Whether the sections over the subset span the whole module.

    True iff every section k_s resolves into span{k_x : x in subset} with
    membership residual within tolerance.
    """
    subset = list(subset)
    if not subset:
        return all(v.size == 0 or not v.any() for v in space._range_values)
    cols = [space.points.index(p) for p in subset]
    n = len(space.points)
    for k, nk in enumerate(space.signature):
        g = space.grams[k]
        col_idx = np.concatenate([np.arange(j * nk, (j + 1) * nk) for j in cols])
        sub = g[:, col_idx]
        b = np.linalg.pinv(sub, rcond=RANK_CUTOFF) @ g
        misfit = sub @ b - g
        for i in range(n):
            block = misfit[:, i * nk : (i + 1) * nk]
            target = g[:, i * nk : (i + 1) * nk]
            res = float(np.linalg.norm(block, 2))
            if res > tol * (1.0 + float(np.linalg.norm(target, 2))):
                return False
    return True


class HilbertRealization:
    """Faithful Hilbert-space picture of the quotiented coefficient space.

    The scalar product is the unnormalized trace of the module inner product.
    Columns of a coefficient matrix are orthogonal to each other, so summand k
    contributes rank(G_k) coordinates for each of its n_k columns; operators
    act identically on every column, which keeps spectra free of artificial
    multiplicity when computed per summand.
    """

    def __init__(self, space: ModuleSpace):
        self.space = space
        self._sqrt = tuple(np.sqrt(v) for v in space._range_values)
        self.ranks = tuple(v.size for v in space._range_values)
        self.dimension = int(
            sum(r * nk for r, nk in zip(self.ranks, space.signature))
        )

    def coords(self, xi: ModuleVector) -> np.ndarray:
        """Flat coordinate vector of length ``dimension``."""
        if xi.space is not self.space:
            raise SpaceMismatchError("vector belongs to a different module space")
        parts = []
        for k, a in enumerate(xi.stacks):
            u = self.space._range_basis[k]
            parts.append(((self._sqrt[k][:, None]) * (u.conj().T @ a)).ravel())
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.complex128)

    def basis_vectors(self) -> list[ModuleVector]:
        """Module vectors whose coordinate images are the standard basis."""
        out = []
        n = len(self.space.points)
        for k, nk in enumerate(self.space.signature):
            u = self.space._range_basis[k]
            for i in range(self.ranks[k]):
                for c in range(nk):
                    stacks = [
                        np.zeros((n * m, m), dtype=np.complex128)
                        for m in self.space.signature
                    ]
                    stacks[k][:, c] = u[:, i] / self._sqrt[k][i]
                    out.append(ModuleVector(self.space, stacks))
        return out

    def operator_matrix(self, k: int, action: np.ndarray) -> np.ndarray:
        """Realized r_k x r_k matrix of a coefficient-action matrix."""
        u = self.space._range_basis[k]
        core = u.conj().T @ action @ u
        return (self._sqrt[k][:, None] * core) / self._sqrt[k][None, :]

    def lift_matrix(self, k: int, mat: np.ndarray) -> np.ndarray:
        """Coefficient-action matrix whose realization is ``mat``."""
        u = self.space._range_basis[k]
        core = (mat * self._sqrt[k][None, :]) / self._sqrt[k][:, None]
        return u @ core @ u.conj().T


def hilbert_realization(space: ModuleSpace) -> HilbertRealization:
    """The cached trace realization of the space."""
    return space.realization


def tensor_embed(
    pairs: Sequence[tuple[ModuleVector, ModuleVector]],
    product: ModuleSpace | None = None,
) -> ModuleVector:
    """Embed a finite sum of elementary tensors into the product module.

    For u = sum_i (f_i, g_i) the image has coefficient sum_i a_x^i (x) b_s^i
    at the product point (x, s); the embedding is isometric for the exterior
    norm (see ``exterior_norm``). A prebuilt product space may be passed to
    avoid reconstructing it.
    """
    if not pairs:
        if product is None:
            raise ValueError("an empty sum needs an explicit product space")
        return product.zero()
    space1 = pairs[0][0].space
    space2 = pairs[0][1].space
    for f, g in pairs:
        if f.space is not space1 or g.space is not space2:
            raise SpaceMismatchError("all pairs must come from one pair of spaces")
    if product is None:
        product = ModuleSpace(kernel_tensor(space1.kernel, space2.kernel))
    expected = tuple(nk * ml for nk in space1.signature for ml in space2.signature)
    if product.signature != expected or len(product.points) != len(space1.points) * len(
        space2.points
    ):
        raise SpaceMismatchError("product space does not match the factors")

    n1, n2 = len(space1.points), len(space2.points)
    stacks = []
    for k, nk in enumerate(space1.signature):
        for letter, ml in enumerate(space2.signature):
            acc = None
            for f, g in pairs:
                term = np.kron(f.stacks[k], g.stacks[letter])
                acc = term if acc is None else acc + term
            # kron stacks rows as (x, r, s, q); the product space is point-pair major
            acc = acc.reshape(n1, nk, n2, ml, nk * ml)
            acc = acc.transpose(0, 2, 1, 3, 4).reshape(n1 * n2 * nk * ml, nk * ml)
            stacks.append(acc)
    return ModuleVector(product, stacks)


def exterior_norm(pairs: Sequence[tuple[ModuleVector, ModuleVector]]) -> float:
    """Norm of sum_i f_i (x) g_i via || sum_{ij} <f_i,f_j> (x) <g_i,g_j> ||^(1/2)."""
    from .algebra import tensor as algebra_tensor

    if not pairs:
        return 0.0
    acc = None
    for fi, gi in pairs:
        for fj, gj in pairs:
            term = algebra_tensor(inner_product(fi, fj), inner_product(gi, gj))
            acc = term if acc is None else acc + term
    return float(np.sqrt(operator_norm(acc)))
