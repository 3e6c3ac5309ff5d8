"""Algebra-valued kernels on finite labeled point sets.

A kernel maps ordered point pairs to elements of one block matrix algebra.
Internally each kernel keeps, per algebra summand, the fully assembled
(n*n_k) x (n*n_k) complex Gram matrix; the (s, t) table entry is the
corresponding block. Constructors cover the four ways kernels arise here:

* an explicit table of values,
* a feature family via K(s,t) = sum_a e_a(s)* e_a(t),
* the tensor product of two kernels on the product point set,
* conjugation K'(s,t) = g(s) K(s,t) g(t)* and point deflation by the
  Schur complement at a base point.

``validate_kernel`` reports Hermitian symmetry, positive (semi)definiteness,
strict positivity and the Schwarz inequality in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import AlgebraElement, Signature, as_signature, invert, operator_norm
from .errors import SignatureMismatchError
from .tolerances import INVERT_EPS, PSD_TOL

PRODUCT_SEPARATOR = "⋈"  # joins product point labels
TABLE_SEPARATOR = "|"  # joins (s, t) keys in kernel files; banned in labels

__all__ = [
    "FeatureFamily",
    "Kernel",
    "KernelReport",
    "PointSet",
    "kernel_conjugate",
    "kernel_deflate",
    "kernel_from_features",
    "kernel_tensor",
    "validate_kernel",
]


class PointSet:
    """Ordered, distinct string labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("point set must be nonempty")
        seen = set()
        for s in labels:
            if not isinstance(s, str) or not s:
                raise ValueError(f"point labels must be nonempty strings, got {s!r}")
            if TABLE_SEPARATOR in s:
                raise ValueError(f"point label {s!r} contains reserved character '|'")
            if s in seen:
                raise ValueError(f"duplicate point label {s!r}")
            seen.add(s)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(labels)})

    def __setattr__(self, name, value):
        raise AttributeError("PointSet is immutable")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, s) -> bool:
        return s in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def index(self, s: str) -> int:
        try:
            return self._index[s]
        except KeyError:
            raise KeyError(f"unknown point {s!r}") from None

    def __repr__(self) -> str:
        return f"PointSet({list(self.labels)!r})"


class Kernel:
    """A complete table S x S -> algebra, stored realized per summand."""

    __slots__ = ("points", "signature", "mats")

    def __init__(self, points: PointSet, signature: Iterable[int], mats: Sequence[np.ndarray]):
        signature = as_signature(signature)
        n = len(points)
        mats = tuple(np.array(m, dtype=np.complex128, copy=True) for m in mats)
        if len(mats) != len(signature):
            raise ValueError(f"expected {len(signature)} realized matrices, got {len(mats)}")
        for k, (nk, m) in enumerate(zip(signature, mats)):
            if m.shape != (n * nk, n * nk):
                raise ValueError(
                    f"summand {k} matrix has shape {m.shape}, expected {(n * nk, n * nk)}"
                )
            m.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "mats", mats)

    def __setattr__(self, name, value):
        raise AttributeError("Kernel is immutable")

    @classmethod
    def from_table(
        cls,
        points: PointSet | Iterable[str],
        signature: Iterable[int],
        table: Mapping[tuple[str, str], AlgebraElement],
    ) -> "Kernel":
        """Build from a complete {(s, t): element} table."""
        if not isinstance(points, PointSet):
            points = PointSet(points)
        signature = as_signature(signature)
        n = len(points)
        mats = [np.zeros((n * nk, n * nk), dtype=np.complex128) for nk in signature]
        for i, s in enumerate(points):
            for j, t in enumerate(points):
                try:
                    el = table[(s, t)]
                except KeyError:
                    raise ValueError(f"kernel table is missing entry ({s!r}, {t!r})") from None
                if el.signature != signature:
                    raise SignatureMismatchError(
                        f"kernel entry ({s!r}, {t!r}) has signature {el.signature}, "
                        f"expected {signature}"
                    )
                for k, nk in enumerate(signature):
                    mats[k][i * nk : (i + 1) * nk, j * nk : (j + 1) * nk] = el.blocks[k]
        return cls(points, signature, mats)

    @classmethod
    def from_callable(
        cls,
        points: PointSet | Iterable[str],
        signature: Iterable[int],
        fn: Callable[[str, str], AlgebraElement],
    ) -> "Kernel":
        if not isinstance(points, PointSet):
            points = PointSet(points)
        table = {(s, t): fn(s, t) for s in points for t in points}
        return cls.from_table(points, signature, table)

    def value(self, s: str, t: str) -> AlgebraElement:
        i, j = self.points.index(s), self.points.index(t)
        blocks = [
            m[i * nk : (i + 1) * nk, j * nk : (j + 1) * nk]
            for nk, m in zip(self.signature, self.mats)
        ]
        return AlgebraElement(self.signature, blocks)

    def table(self) -> dict[tuple[str, str], AlgebraElement]:
        return {(s, t): self.value(s, t) for s in self.points for t in self.points}

    def gram_norm(self) -> float:
        """Largest realized 2-norm over summands."""
        return max(float(np.linalg.norm(m, 2)) if m.size else 0.0 for m in self.mats)

    def __repr__(self) -> str:
        return (
            f"Kernel(points={len(self.points)}, signature={self.signature}, "
            f"norm={self.gram_norm():.6g})"
        )


class FeatureFamily:
    """A finite indexed family of functions S -> algebra, each a complete table."""

    __slots__ = ("points", "signature", "members")

    def __init__(
        self,
        points: PointSet | Iterable[str],
        signature: Iterable[int],
        members: Sequence[Mapping[str, AlgebraElement]],
    ):
        if not isinstance(points, PointSet):
            points = PointSet(points)
        signature = as_signature(signature)
        frozen = []
        for a, member in enumerate(members):
            row = {}
            for s in points:
                try:
                    el = member[s]
                except KeyError:
                    raise ValueError(f"feature {a} is missing a value at point {s!r}") from None
                if el.signature != signature:
                    raise SignatureMismatchError(
                        f"feature {a} at {s!r} has signature {el.signature}, expected {signature}"
                    )
                row[s] = el
            frozen.append(row)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "members", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("FeatureFamily is immutable")

    def __len__(self) -> int:
        return len(self.members)

    def value(self, alpha: int, s: str) -> AlgebraElement:
        return self.members[alpha][s]

    def _stacked(self, alpha: int) -> list[np.ndarray]:
        """Per summand, the n_k x (n * n_k) row of blocks [e(s_1) ... e(s_n)]."""
        out = []
        for k, nk in enumerate(self.signature):
            row = np.hstack([self.members[alpha][s].blocks[k] for s in self.points])
            out.append(row)
        return out


@dataclass(frozen=True)
class KernelReport:
    """Outcome of validate_kernel, with the numbers behind each flag."""

    hermitian: bool
    positive_definite: bool
    strictly_positive: bool
    schwarz_ok: bool
    hermitian_defect: float
    min_eigenvalue: float
    gram_norm: float
    schwarz_slack: float

    def as_dict(self) -> dict:
        return {
            "hermitian": self.hermitian,
            "positive_definite": self.positive_definite,
            "strictly_positive": self.strictly_positive,
            "schwarz_ok": self.schwarz_ok,
            "hermitian_defect": self.hermitian_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "gram_norm": self.gram_norm,
            "schwarz_slack": self.schwarz_slack,
        }


def validate_kernel(kernel: Kernel, tol: float = PSD_TOL) -> KernelReport:
    """Check Hermitian symmetry, PSD-ness, strict positivity and Schwarz.

    hermitian: max ||K(s,t) - K(t,s)*|| over the realized Gram <= tol*(1+norm).
    positive_definite: every realized summand is Hermitian-PSD within the same
    relative tolerance. strictly_positive: smallest realized eigenvalue is
    >= tol*(1+norm). schwarz_ok: ||K(s,t)||^2 <= ||K(s,s)||*||K(t,t)|| + tol.
    """
    gram_norm = kernel.gram_norm()
    scale = tol * (1.0 + gram_norm)

    hermitian_defect = max(
        float(np.linalg.norm(m - m.conj().T, 2)) if m.size else 0.0 for m in kernel.mats
    )
    hermitian = hermitian_defect <= scale

    min_eigenvalue = min(
        float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min()) for m in kernel.mats
    )
    positive_definite = hermitian and min_eigenvalue >= -scale
    strictly_positive = positive_definite and min_eigenvalue >= scale

    schwarz_slack = 0.0
    labels = kernel.points.labels
    diag = {s: operator_norm(kernel.value(s, s)) for s in labels}
    for s in labels:
        for t in labels:
            lhs = operator_norm(kernel.value(s, t)) ** 2
            schwarz_slack = max(schwarz_slack, lhs - diag[s] * diag[t])
    schwarz_ok = schwarz_slack <= tol

    return KernelReport(
        hermitian=hermitian,
        positive_definite=positive_definite,
        strictly_positive=strictly_positive,
        schwarz_ok=schwarz_ok,
        hermitian_defect=hermitian_defect,
        min_eigenvalue=min_eigenvalue,
        gram_norm=gram_norm,
        schwarz_slack=schwarz_slack,
    )


def kernel_from_features(family: FeatureFamily) -> Kernel:
    """K(s,t) = sum_a e_a(s)* e_a(t); positive definite by construction."""
    n = len(family.points)
    mats = [np.zeros((n * nk, n * nk), dtype=np.complex128) for nk in family.signature]
    for alpha in range(len(family)):
        for k, row in enumerate(family._stacked(alpha)):
            mats[k] += row.conj().T @ row
    return Kernel(family.points, family.signature, mats)


def kernel_tensor(k1: Kernel, k2: Kernel) -> Kernel:
    """The kernel K1(x,y) (x) K2(s,t) on the product point set.

    Product labels are joined with the reserved separator; input labels must
    not already contain it so that product labels stay unambiguous.
    """
    for s in list(k1.points) + list(k2.points):
        if PRODUCT_SEPARATOR in s:
            raise ValueError(
                f"point label {s!r} contains the reserved product separator "
                f"{PRODUCT_SEPARATOR!r}"
            )
    labels = [x + PRODUCT_SEPARATOR + s for x in k1.points for s in k2.points]
    points = PointSet(labels)
    n1, n2 = len(k1.points), len(k2.points)
    mats = []
    for nk, g1 in zip(k1.signature, k1.mats):
        for ml, g2 in zip(k2.signature, k2.mats):
            big = np.kron(g1, g2)
            # kron index order is (x, r, s, q); realized order is (x, s, r, q)
            big = big.reshape(n1, nk, n2, ml, n1, nk, n2, ml)
            big = big.transpose(0, 2, 1, 3, 4, 6, 5, 7)
            mats.append(big.reshape(n1 * n2 * nk * ml, n1 * n2 * nk * ml))
    signature = tuple(nk * ml for nk in k1.signature for ml in k2.signature)
    return Kernel(points, signature, mats)


def kernel_conjugate(
    kernel: Kernel, g: Callable[[str], AlgebraElement] | Mapping[str, AlgebraElement]
) -> Kernel:
    """K'(s,t) = g(s) K(s,t) g(t)*; preserves positive definiteness."""
    lookup = g.__getitem__ if isinstance(g, Mapping) else g
    values = {}
    for s in kernel.points:
        el = lookup(s)
        if el.signature != kernel.signature:
            raise SignatureMismatchError(
                f"g({s!r}) has signature {el.signature}, expected {kernel.signature}"
            )
        values[s] = el
    mats = []
    for k, (nk, m) in enumerate(zip(kernel.signature, kernel.mats)):
        d = np.zeros_like(m)
        for i, s in enumerate(kernel.points):
            d[i * nk : (i + 1) * nk, i * nk : (i + 1) * nk] = values[s].blocks[k]
        mats.append(d @ m @ d.conj().T)
    return Kernel(kernel.points, kernel.signature, mats)


def kernel_deflate(kernel: Kernel, s0: str, eps: float = INVERT_EPS) -> Kernel:
    """Schur complement at s0: K(s,t) - K(s,s0) K(s0,s0)^{-1} K(s0,t).

    The result keeps s0 in the point set with a zero row and column. Raises
    NotInvertibleError when K(s0,s0) fails the invertibility threshold.
    """
    i = kernel.points.index(s0)
    corner_inv = invert(kernel.value(s0, s0), eps)
    mats = []
    for k, (nk, m) in enumerate(zip(kernel.signature, kernel.mats)):
        col = m[:, i * nk : (i + 1) * nk]
        row = m[i * nk : (i + 1) * nk, :]
        mats.append(m - col @ corner_inv.blocks[k] @ row)
    return Kernel(kernel.points, kernel.signature, mats)
