"""Built-in conformance checks with independently derived expected values.

Each check recomputes a small worked example through the public API and
compares against values obtained from closed forms (characteristic
polynomials, 2x2 inverse formula, Schur complements, Kronecker eigenvalue
products). The suite is deterministic and fast; the CLI exposes it as the
``selftest`` subcommand.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, invert, is_positive, modulus, operator_norm, tensor
from .errors import NotInvertibleError
from .frames import Frame, frame_bounds, is_parseval, papadakis_identity_check
from .kernels import Kernel, kernel_deflate, kernel_tensor, validate_kernel
from .modules import (
    ModuleSpace,
    evaluate,
    inner_product,
    minimal_norm_interpolant,
    vector_norm,
)
from .operators import MultiplierSymbol, multiplication_operator, recover_symbol

__all__ = ["run_selftest"]


def _scalar_kernel(entries, labels=None):
    entries = np.asarray(entries, dtype=np.complex128)
    n = entries.shape[0]
    labels = labels or [f"s{i + 1}" for i in range(n)]
    table = {
        (labels[i], labels[j]): AlgebraElement([1], [entries[i : i + 1, j : j + 1]])
        for i in range(n)
        for j in range(n)
    }
    return Kernel.from_table(labels, [1], table)


def _check_modulus():
    rot = AlgebraElement([2], [np.array([[0.0, -1.0], [1.0, 0.0]])])
    defect = operator_norm(modulus(rot) - AlgebraElement.unit([2]))
    return defect <= 1e-12, f"|rotation| vs identity: defect {defect:.3e}"


def _check_inverse():
    a = AlgebraElement([2], [np.array([[2.0, 1.0], [1.0, 2.0]])])
    expected = AlgebraElement(
        [2], [np.array([[2.0, -1.0], [-1.0, 2.0]]) / 3.0]
    )
    defect = operator_norm(invert(a) - expected)
    return defect <= 1e-12, f"2x2 inverse formula: defect {defect:.3e}"


def _check_indefinite():
    a = AlgebraElement([2], [np.array([[1.0, 2.0], [2.0, 1.0]])])
    ok = not is_positive(a)
    return ok, "eigenvalues {3, -1} rejected by positivity"


def _check_tensor_norm():
    a = AlgebraElement.diag([2], [1.0, 2.0])
    b = AlgebraElement([1], [np.array([[5.0]])])
    t = tensor(a, b)
    ok = t.signature == (2,) and abs(operator_norm(t) - 10.0) <= 1e-12
    return ok, f"diag(1,2) (x) (5): norm {operator_norm(t):.6g}"


def _check_deflation():
    kernel = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    deflated = kernel_deflate(kernel, "s1")
    expected = np.array([[0.0, 0.0], [0.0, 1.5]])
    defect = float(np.linalg.norm(deflated.mats[0] - expected, 2))
    report = validate_kernel(deflated)
    return (
        defect <= 1e-12 and report.positive_definite,
        f"Schur complement table: defect {defect:.3e}",
    )


def _check_interpolation():
    kernel = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    space = ModuleSpace(kernel)
    result = minimal_norm_interpolant(space, ["s1"], [AlgebraElement.unit([1])])
    norm_defect = abs(result.norm - np.sqrt(0.5))
    val = evaluate(result.vector, "s2")
    value_defect = operator_norm(val - 0.5 * AlgebraElement.unit([1]))
    ok = norm_defect <= 1e-12 and value_defect <= 1e-12 and result.residual <= 1e-12
    return ok, f"norm defect {norm_defect:.3e}, f(s2) defect {value_defect:.3e}"


def _check_reproduction():
    kernel = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    space = ModuleSpace(kernel)
    worst = 0.0
    for s in space.points:
        for t in space.points:
            got = inner_product(space.section(s), space.section(t))
            worst = max(worst, operator_norm(got - kernel.value(s, t)))
    return worst <= 1e-12, f"<k_s, k_t> round trip: worst defect {worst:.3e}"


def _check_berezin():
    kernel = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    space = ModuleSpace(kernel)
    f = MultiplierSymbol(
        space,
        {
            "s1": AlgebraElement([1], [np.array([[2.0]])]),
            "s2": AlgebraElement([1], [np.array([[3.0]])]),
        },
    )
    op = multiplication_operator(f)
    recovered = recover_symbol(op)
    worst = max(
        operator_norm(recovered.symbol.value(s) - f.value(s)) for s in space.points
    )
    return (
        recovered.is_multiplication and worst <= 1e-9,
        f"symbol round trip: worst defect {worst:.3e}",
    )


def _check_frame_bounds():
    kernel = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    space = ModuleSpace(kernel)
    frame = Frame(space, [space.section("s1"), space.section("s2")])
    bounds = frame_bounds(frame)
    defect = max(abs(bounds.lower - 1.0), abs(bounds.upper - 3.0))
    return defect <= 1e-10, f"bounds vs eigenvalues (1, 3): defect {defect:.3e}"


def _check_parseval_pair():
    kernel = _scalar_kernel([[1.0]])
    space = ModuleSpace(kernel)
    half = AlgebraElement([1], [np.array([[1.0 / np.sqrt(2.0)]])])
    member = space.section("s1") * half
    frame = Frame(space, [member, member])
    ok = is_parseval(frame) and papadakis_identity_check(frame)
    return ok, "two half-weight copies of k_s are Parseval and reconstruct K"


def _check_papadakis_negative():
    kernel = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    space = ModuleSpace(kernel)
    frame = Frame(space, [space.section("s1")])
    ok = (not is_parseval(frame)) and (not papadakis_identity_check(frame))
    return ok, "single section fails both Parseval and reconstruction"


def _check_kron_eigenvalues():
    k1 = _scalar_kernel([[2.0, 1.0], [1.0, 2.0]])
    k2 = _scalar_kernel([[3.0]], labels=["t1"])
    product = kernel_tensor(k1, k2)
    got = np.sort(np.linalg.eigvalsh(product.mats[0]))
    expected = np.sort(
        [a * b for a in np.linalg.eigvalsh(k1.mats[0]) for b in np.linalg.eigvalsh(k2.mats[0])]
    )
    defect = float(np.abs(got - expected).max())
    return defect <= 1e-10, f"Kronecker eigenvalue products: defect {defect:.3e}"


def _check_singular_inverse():
    a = AlgebraElement.diag([2], [1.0, 0.0])
    try:
        invert(a)
    except NotInvertibleError as err:
        return err.block_index == 0, f"singular block rejected (sv {err.smallest_sv:.1e})"
    return False, "singular block was not rejected"


_CHECKS = [
    ("modulus_of_rotation", _check_modulus),
    ("two_by_two_inverse", _check_inverse),
    ("indefinite_rejected", _check_indefinite),
    ("tensor_norm", _check_tensor_norm),
    ("deflation_table", _check_deflation),
    ("interpolation_norm", _check_interpolation),
    ("kernel_reproduction", _check_reproduction),
    ("berezin_round_trip", _check_berezin),
    ("frame_bounds", _check_frame_bounds),
    ("parseval_positive", _check_parseval_pair),
    ("parseval_negative", _check_papadakis_negative),
    ("kronecker_eigenvalues", _check_kron_eigenvalues),
    ("singular_inverse_rejected", _check_singular_inverse),
]


def run_selftest() -> dict:
    """Run every built-in check; returns {checks: [...], passed: bool}."""
    results = []
    for name, fn in _CHECKS:
        try:
            ok, detail = fn()
        except Exception as err:  # a crash is a failed check, not a crash of the tool
            ok, detail = False, f"raised {type(err).__name__}: {err}"
        results.append({"name": name, "passed": bool(ok), "detail": detail})
    return {"checks": results, "passed": all(r["passed"] for r in results)}
