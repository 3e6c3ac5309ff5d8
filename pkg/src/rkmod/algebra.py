"""Finite-dimensional block matrix algebras.

An algebra is a direct sum of full complex matrix algebras, described by a
*signature*: the tuple of block sizes (n_1, ..., n_K). Elements are stored as
one dense complex matrix per block. Every finite-dimensional C*-algebra is of
this form, so adjoints, moduli, positivity and tensor products all reduce to
exact dense linear algebra:

* involution      - blockwise conjugate transpose
* modulus |a|     - Hermitian square root of a*a per block
* operator norm   - largest singular value over all blocks
* positivity      - Hermitian within tolerance and spectrum >= -tolerance
* tensor product  - blockwise Kronecker products, block pairs in
                    lexicographic order

Tolerances are relative (scaled by 1 + norm) so checks behave uniformly
across magnitude scales. All values are immutable after construction and all
operations are pure.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import NotInvertibleError, SignatureMismatchError
from .tolerances import INVERT_EPS, PSD_TOL

Signature = tuple[int, ...]

__all__ = [
    "AlgebraElement",
    "Signature",
    "as_signature",
    "block_psd",
    "invert",
    "is_central",
    "is_positive",
    "modulus",
    "operator_norm",
    "tensor",
]


def as_signature(blocks: Iterable[int]) -> Signature:
    """Normalize and validate a sequence of block sizes."""
    sig = tuple(int(n) for n in blocks)
    if not sig:
        raise ValueError("signature must contain at least one block")
    if any(n < 1 for n in sig):
        raise ValueError(f"block sizes must be >= 1, got {sig}")
    return sig


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


class AlgebraElement:
    """One element of a block matrix algebra.

    ``blocks[k]`` is the dense n_k x n_k complex matrix of the k-th summand.
    Supports ``+``, ``-``, ``*`` (algebra product, or scaling by a complex
    number) and ``.star`` for the involution.
    """

    __slots__ = ("signature", "blocks")

    def __init__(self, signature: Iterable[int], blocks: Sequence[np.ndarray]):
        sig = as_signature(signature)
        blocks = tuple(_freeze(b) for b in blocks)
        if len(blocks) != len(sig):
            raise ValueError(f"expected {len(sig)} blocks, got {len(blocks)}")
        for k, (n, b) in enumerate(zip(sig, blocks)):
            if b.shape != (n, n):
                raise ValueError(f"block {k} has shape {b.shape}, expected ({n}, {n})")
        object.__setattr__(self, "signature", sig)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def zero(cls, signature: Iterable[int]) -> "AlgebraElement":
        sig = as_signature(signature)
        return cls(sig, [np.zeros((n, n)) for n in sig])

    @classmethod
    def unit(cls, signature: Iterable[int]) -> "AlgebraElement":
        sig = as_signature(signature)
        return cls(sig, [np.eye(n) for n in sig])

    @classmethod
    def from_scalar(cls, signature: Iterable[int], z: complex) -> "AlgebraElement":
        """The central element z * unit."""
        sig = as_signature(signature)
        return cls(sig, [z * np.eye(n) for n in sig])

    @classmethod
    def diag(cls, signature: Iterable[int], entries: Sequence[complex]) -> "AlgebraElement":
        """Element with diagonal blocks; ``entries`` runs through all diagonal slots."""
        sig = as_signature(signature)
        entries = [complex(e) for e in entries]
        if len(entries) != sum(sig):
            raise ValueError(f"expected {sum(sig)} diagonal entries, got {len(entries)}")
        blocks, pos = [], 0
        for n in sig:
            blocks.append(np.diag(entries[pos : pos + n]))
            pos += n
        return cls(sig, blocks)

    def _require_same_signature(self, other: "AlgebraElement") -> None:
        if self.signature != other.signature:
            raise SignatureMismatchError(
                f"signature {self.signature} does not match {other.signature}"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._require_same_signature(other)
        return AlgebraElement(self.signature, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._require_same_signature(other)
        return AlgebraElement(self.signature, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.signature, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._require_same_signature(other)
            return AlgebraElement(
                self.signature, [a @ b for a, b in zip(self.blocks, other.blocks)]
            )
        if isinstance(other, (int, float, complex)):
            return AlgebraElement(self.signature, [complex(other) * a for a in self.blocks])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return AlgebraElement(self.signature, [complex(other) * a for a in self.blocks])
        return NotImplemented

    @property
    def star(self) -> "AlgebraElement":
        """The involution: conjugate transpose of every block."""
        return AlgebraElement(self.signature, [b.conj().T for b in self.blocks])

    def norm(self) -> float:
        return operator_norm(self)

    def __repr__(self) -> str:
        return f"AlgebraElement(signature={self.signature}, norm={self.norm():.6g})"


def operator_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in a.blocks)


def is_positive(a: AlgebraElement, tol: float = PSD_TOL) -> bool:
    """Whether ``a`` is Hermitian and has spectrum >= -tol*(1+norm)."""
    scale = tol * (1.0 + operator_norm(a))
    for b in a.blocks:
        if np.linalg.norm(b - b.conj().T, 2) > scale:
            return False
        herm = (b + b.conj().T) / 2.0
        if np.linalg.eigvalsh(herm).min() < -scale:
            return False
    return True


def modulus(a: AlgebraElement) -> AlgebraElement:
    """The positive square root of a*a.

    Computed from the Hermitian eigendecomposition of a*a per block; tiny
    negative eigenvalues from roundoff are clamped to zero before the sqrt.
    """
    blocks = []
    for b in a.blocks:
        prod = b.conj().T @ b
        w, v = np.linalg.eigh((prod + prod.conj().T) / 2.0)
        w = np.clip(w, 0.0, None)
        blocks.append((v * np.sqrt(w)) @ v.conj().T)
    return AlgebraElement(a.signature, blocks)


def invert(a: AlgebraElement, eps: float = INVERT_EPS) -> AlgebraElement:
    """Blockwise inverse.

    Raises NotInvertibleError naming the first block whose smallest singular
    value falls below eps*(1+norm).
    """
    threshold = eps * (1.0 + operator_norm(a))
    blocks = []
    for k, b in enumerate(a.blocks):
        smallest = float(np.linalg.svd(b, compute_uv=False).min())
        if smallest < threshold:
            raise NotInvertibleError(k, smallest)
        blocks.append(np.linalg.inv(b))
    return AlgebraElement(a.signature, blocks)


def is_central(a: AlgebraElement, tol: float = PSD_TOL) -> bool:
    """Whether every block is within tol*(1+norm) of a scalar matrix."""
    scale = tol * (1.0 + operator_norm(a))
    for b in a.blocks:
        n = b.shape[0]
        mean = np.trace(b) / n
        if np.linalg.norm(b - mean * np.eye(n), 2) > scale:
            return False
    return True


def tensor(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Tensor product element; signature is (n_k * m_l) in lexicographic (k, l) order."""
    sig = tuple(n * m for n in a.signature for m in b.signature)
    blocks = [np.kron(p, q) for p in a.blocks for q in b.blocks]
    return AlgebraElement(sig, blocks)


def tensor_signature(sig_a: Iterable[int], sig_b: Iterable[int]) -> Signature:
    sig_a, sig_b = as_signature(sig_a), as_signature(sig_b)
    return tuple(n * m for n in sig_a for m in sig_b)


def block_psd(grid: Sequence[Sequence[AlgebraElement]], tol: float = PSD_TOL) -> bool:
    """Positivity of a square array of algebra elements.

    Per algebra summand, the n x n array of n_k x n_k blocks is assembled into
    one (n*n_k) x (n*n_k) complex matrix and checked for Hermitian positive
    semidefiniteness within tol (same relative semantics as is_positive).
    """
    n = len(grid)
    if any(len(row) != n for row in grid):
        raise ValueError("block array must be square")
    if n == 0:
        return True
    sig = grid[0][0].signature
    for row in grid:
        for el in row:
            if el.signature != sig:
                raise SignatureMismatchError("block array entries must share one signature")
    for mat in realize_grid(grid):
        scale = tol * (1.0 + (float(np.linalg.norm(mat, 2)) if mat.size else 0.0))
        if np.linalg.norm(mat - mat.conj().T, 2) > scale:
            return False
        herm = (mat + mat.conj().T) / 2.0
        if np.linalg.eigvalsh(herm).min() < -scale:
            return False
    return True


def realize_grid(grid: Sequence[Sequence[AlgebraElement]]) -> list[np.ndarray]:
    """Assemble an n x n array of elements into one complex matrix per summand."""
    n = len(grid)
    sig = grid[0][0].signature
    out = []
    for k, nk in enumerate(sig):
        mat = np.empty((n * nk, n * nk), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                mat[i * nk : (i + 1) * nk, j * nk : (j + 1) * nk] = grid[i][j].blocks[k]
        out.append(mat)
    return out
