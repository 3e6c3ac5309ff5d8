"""Batch front-end: parse instance files, run checks, emit JSON reports.

Exit codes: 0 when every requested check passed, 1 when a mathematical check
failed (the report says which), 2 on malformed input or usage errors. Reports
are deterministic for fixed input and tolerances up to the wall-clock field;
floats are rounded to 12 significant digits so reports are byte-stable.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import operator_norm
from .contraction import (
    PsiContractionInstance,
    construct_phi,
    contraction_check,
    intertwining_check,
    modulus_bound_check,
)
from .errors import (
    InstanceError,
    NoExtensionError,
    NotAMultiplierError,
    NotCentralError,
    NotInRangeError,
    NotInvertibleError,
    RkmodError,
)
from .frames import Frame, frame_bounds, is_parseval, papadakis_identity_check
from .io import (
    Tolerances,
    decode_element,
    encode_element,
    instance_to_dict,
    kernel_instance,
    parse_instance,
    serialize_instance,
)
from .kernels import kernel_deflate, kernel_tensor, validate_kernel
from .modules import ModuleSpace, minimal_norm_interpolant
from .operators import (
    MultiplierSymbol,
    multiplication_operator,
    multiplier_adjoint_check,
    op_distance,
    recover_symbol,
)
from .selftest import run_selftest
from .tolerances import RANK_CUTOFF

SUBCOMMANDS = (
    "check-kernel",
    "interpolate",
    "deflate",
    "tensor",
    "multiplier",
    "berezin",
    "frame-bounds",
    "parseval",
    "papadakis",
    "psi-multiplier",
    "selftest",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rkmod", description="kernel and module checks over block matrix algebras"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="instance file (JSON)")
        p.add_argument("--output", help="report destination (default: stdout)")
        p.add_argument("--tol-psd", type=float, default=None)
        p.add_argument("--tol-residual", type=float, default=None)
        p.add_argument("--eps-invert", type=float, default=None)

    p = sub.add_parser("check-kernel", help="validate a kernel table")
    common(p)
    p.add_argument("--strict", action="store_true", help="also require strict positivity")

    p = sub.add_parser("interpolate", help="minimal-norm interpolation")
    common(p)
    p.add_argument("--points", nargs="+", help="override the instance interpolation points")
    p.add_argument("--targets", help="override targets (JSON list of elements)")

    p = sub.add_parser("deflate", help="Schur-complement deflation at a point")
    common(p)
    p.add_argument("--point", required=True)
    p.add_argument("--emit", help="write the deflated kernel instance here")

    p = sub.add_parser("tensor", help="tensor product of two kernels")
    common(p)
    p.add_argument("--input2", required=True, help="second kernel instance")
    p.add_argument("--emit", help="write the product kernel instance here")

    p = sub.add_parser("multiplier", help="certify a multiplication operator")
    common(p)

    p = sub.add_parser("berezin", help="Berezin transform and symbol recovery")
    common(p)
    p.add_argument("--point", help="restrict the transform to one point")

    p = sub.add_parser("frame-bounds", help="sharp frame bounds")
    common(p)

    p = sub.add_parser("parseval", help="Parseval (normalized tight) test")
    common(p)

    p = sub.add_parser("papadakis", help="pointwise reconstruction identity test")
    common(p)

    p = sub.add_parser("psi-multiplier", help="contraction condition and companions")
    common(p)

    p = sub.add_parser("selftest", help="run the built-in oracle suite")
    common(p, needs_input=False)
    return parser


def _round_floats(obj, digits=12):
    if isinstance(obj, float):
        if obj == 0.0 or not math.isfinite(obj):
            return obj
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def _tolerances(args, instance=None) -> Tolerances:
    base = instance.tolerances if instance is not None else Tolerances()
    return Tolerances(
        psd=args.tol_psd if args.tol_psd is not None else base.psd,
        residual=args.tol_residual if args.tol_residual is not None else base.residual,
        eps_invert=args.eps_invert if args.eps_invert is not None else base.eps_invert,
    )


def _space_or_report(instance, tols):
    """Build the module space, or a failure payload when the kernel is not PD."""
    kernel = instance.realized_kernel()
    try:
        return ModuleSpace(kernel, tols.psd), None
    except ValueError:
        report = validate_kernel(kernel, tols.psd)
        return None, {
            "kernel_positive_definite": False,
            "kernel_report": report.as_dict(),
        }


def _cmd_check_kernel(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    kernel = instance.realized_kernel()
    report = validate_kernel(kernel, tols.psd)
    results = report.as_dict()
    results["source"] = "kernel" if instance.kernel is not None else "features"
    passed = report.hermitian and report.positive_definite and report.schwarz_ok
    if args.strict:
        passed = passed and report.strictly_positive
    return results, passed, tols


def _cmd_interpolate(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    if args.points is not None or args.targets is not None:
        if args.points is None or args.targets is None:
            raise InstanceError("--points/--targets", "both overrides must be given together")
        try:
            raw = json.loads(args.targets)
        except json.JSONDecodeError as err:
            raise InstanceError("--targets", f"invalid JSON: {err}") from None
        if not isinstance(raw, list) or len(raw) != len(args.points):
            raise InstanceError("--targets", "need one target per point")
        targets = [
            decode_element(t, instance.signature, f"--targets[{i}]")
            for i, t in enumerate(raw)
        ]
        points = list(args.points)
        for s in points:
            if s not in instance.points:
                raise InstanceError("--points", f"unknown point {s!r}")
    elif instance.interpolation is not None:
        points, targets = list(instance.interpolation[0]), list(instance.interpolation[1])
    else:
        raise InstanceError("interpolation", "instance has no interpolation block")

    space, failure = _space_or_report(instance, tols)
    if failure is not None:
        return failure, False, tols
    try:
        result = minimal_norm_interpolant(space, points, targets, tols.residual)
    except NotInRangeError as err:
        return {"in_range": False, "residual": err.residual}, False, tols
    coeffs = {s: encode_element(result.vector.coefficient(s)) for s in points}
    results = {
        "in_range": True,
        "residual": result.residual,
        "norm": result.norm,
        "coefficients": coeffs,
    }
    return results, True, tols


def _cmd_deflate(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    kernel = instance.realized_kernel()
    if args.point not in kernel.points:
        raise InstanceError("--point", f"unknown point {args.point!r}")
    base_report = validate_kernel(kernel, tols.psd)
    if not base_report.positive_definite:
        return (
            {"kernel_positive_definite": False, "kernel_report": base_report.as_dict()},
            False,
            tols,
        )
    try:
        deflated = kernel_deflate(kernel, args.point, tols.eps_invert)
    except NotInvertibleError as err:
        return (
            {
                "invertible": False,
                "block_index": err.block_index,
                "smallest_singular_value": err.smallest_sv,
            },
            False,
            tols,
        )
    report = validate_kernel(deflated, tols.psd)
    i = deflated.points.index(args.point)
    row_col = 0.0
    for nk, m in zip(deflated.signature, deflated.mats):
        row_col = max(row_col, float(np.linalg.norm(m[i * nk : (i + 1) * nk, :], 2)))
        row_col = max(row_col, float(np.linalg.norm(m[:, i * nk : (i + 1) * nk], 2)))
    emitted = kernel_instance(deflated, tols)
    passed = report.positive_definite and row_col <= 1e-9 * (1.0 + kernel.gram_norm())
    if args.emit:
        Path(args.emit).write_text(serialize_instance(emitted), encoding="utf-8")
    results = {
        "invertible": True,
        "positive_definite": report.positive_definite,
        "zeroed_row_col_norm": row_col,
        "instance": instance_to_dict(emitted),
    }
    return results, passed, tols


def _cmd_tensor(args):
    instance1 = parse_instance(args.input)
    instance2 = parse_instance(args.input2)
    tols = _tolerances(args, instance1)
    k1, k2 = instance1.realized_kernel(), instance2.realized_kernel()
    rep1, rep2 = validate_kernel(k1, tols.psd), validate_kernel(k2, tols.psd)
    if not (rep1.positive_definite and rep2.positive_definite):
        return (
            {
                "factors_positive_definite": False,
                "first": rep1.as_dict(),
                "second": rep2.as_dict(),
            },
            False,
            tols,
        )
    product = kernel_tensor(k1, k2)
    report = validate_kernel(product, tols.psd)
    emitted = kernel_instance(product, tols)
    if args.emit:
        Path(args.emit).write_text(serialize_instance(emitted), encoding="utf-8")
    results = {
        "factors_positive_definite": True,
        "product_points": len(product.points),
        "positive_definite": report.positive_definite,
        "instance": instance_to_dict(emitted),
    }
    return results, report.positive_definite, tols


def _cmd_multiplier(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    if instance.multiplier is None:
        raise InstanceError("multiplier", "instance has no multiplier block")
    space, failure = _space_or_report(instance, tols)
    if failure is not None:
        return failure, False, tols
    symbol = MultiplierSymbol(space, instance.multiplier)
    try:
        op = multiplication_operator(symbol, tols.residual)
    except NotAMultiplierError as err:
        return (
            {"is_multiplier": False, "worst_point": err.point, "residual": err.residual},
            False,
            tols,
        )
    adjoint_ok = multiplier_adjoint_check(symbol, tols.psd, tols.residual)
    results = {"is_multiplier": True, "adjoint_identity": adjoint_ok}
    passed = adjoint_ok
    if instance.multiplier_g is not None:
        symbol_g = MultiplierSymbol(space, instance.multiplier_g)
        try:
            op_g = multiplication_operator(symbol_g, tols.residual)
        except NotAMultiplierError as err:
            results["g_is_multiplier"] = False
            results["g_residual"] = err.residual
            return results, False, tols
        product = MultiplierSymbol(
            space,
            {s: symbol.value(s) * symbol_g.value(s) for s in space.points},
        )
        op_fg = multiplication_operator(product, tols.residual)
        distance = op_distance(op @ op_g, op_fg)
        results["g_is_multiplier"] = True
        results["composition_identity"] = distance <= tols.psd * 10.0
        results["composition_defect"] = distance
        passed = passed and results["composition_identity"]
    return results, passed, tols


def _cmd_berezin(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    if instance.multiplier is None:
        raise InstanceError("multiplier", "instance has no multiplier block")
    space, failure = _space_or_report(instance, tols)
    if failure is not None:
        return failure, False, tols
    symbol = MultiplierSymbol(space, instance.multiplier)
    try:
        op = multiplication_operator(symbol, tols.residual)
    except NotAMultiplierError as err:
        return (
            {"is_multiplier": False, "worst_point": err.point, "residual": err.residual},
            False,
            tols,
        )
    if args.point is not None and args.point not in space.points:
        raise InstanceError("--point", f"unknown point {args.point!r}")
    recovered = recover_symbol(op, tols.residual, tols.eps_invert)
    values = {}
    worst_match = 0.0
    for s in space.points:
        if args.point is not None and s != args.point:
            continue
        if s in recovered.admissible_points:
            values[s] = encode_element(recovered.symbol.value(s))
            worst_match = max(
                worst_match,
                operator_norm(recovered.symbol.value(s) - symbol.value(s)),
            )
        else:
            values[s] = None
    matches = worst_match <= tols.psd
    results = {
        "values": values,
        "admissible": list(recovered.admissible_points),
        "is_multiplication": recovered.is_multiplication,
        "symbol_matches": matches,
        "worst_symbol_defect": worst_match,
    }
    return results, recovered.is_multiplication and matches, tols


def _frame_from_instance(instance, tols):
    if instance.frame is None:
        raise InstanceError("frame", "instance has no frame block")
    space, failure = _space_or_report(instance, tols)
    if failure is not None:
        return None, failure
    members = [space.vector(coeffs) for coeffs in instance.frame]
    return Frame(space, members), None


def _cmd_frame_bounds(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    frame, failure = _frame_from_instance(instance, tols)
    if failure is not None:
        return failure, False, tols
    try:
        bounds = frame_bounds(frame)
    except ValueError as err:
        return {"error": str(err)}, False, tols
    is_frame = bounds.lower > RANK_CUTOFF * (1.0 + bounds.upper)
    results = {
        "lower": bounds.lower,
        "upper": bounds.upper,
        "realization_dimension": frame.space.realization.dimension,
        "is_frame": is_frame,
    }
    return results, is_frame, tols


def _cmd_parseval(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    frame, failure = _frame_from_instance(instance, tols)
    if failure is not None:
        return failure, False, tols
    parseval = is_parseval(frame, tols.residual)
    results = {"is_parseval": parseval}
    try:
        bounds = frame_bounds(frame)
        results["lower"] = bounds.lower
        results["upper"] = bounds.upper
    except ValueError:
        pass
    return results, parseval, tols


def _cmd_papadakis(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    frame, failure = _frame_from_instance(instance, tols)
    if failure is not None:
        return failure, False, tols
    identity = papadakis_identity_check(frame, tols.residual)
    results = {
        "identity_holds": identity,
        "is_parseval": is_parseval(frame, tols.residual),
    }
    return results, identity, tols


def _cmd_psi_multiplier(args):
    instance = parse_instance(args.input)
    tols = _tolerances(args, instance)
    if instance.features is None:
        raise InstanceError("features", "psi-multiplier needs a feature family")
    if instance.psi is None:
        raise InstanceError("psi", "instance has no psi block")
    try:
        inst = PsiContractionInstance(
            instance.features,
            instance.psi.values,
            instance.psi.c,
            instance.psi.uniqueness_set,
            central_tol=tols.psd,
            uniqueness_tol=tols.residual,
        )
    except (NotCentralError, ValueError) as err:
        return {"instance_valid": False, "reason": str(err)}, False, tols

    results = {"instance_valid": True}
    contraction = contraction_check(inst, tols.psd)
    results["contraction"] = contraction

    phis, phi_residuals, phis_ok = [], {}, True
    for alpha in range(len(inst.features)):
        try:
            phis.append(construct_phi(inst, alpha, tols.residual))
            phi_residuals[str(alpha)] = 0.0
        except NoExtensionError as err:
            phis.append(None)
            phi_residuals[str(alpha)] = err.residual
            phis_ok = False
    results["companions_constructed"] = phis_ok
    results["companion_residuals"] = phi_residuals

    intertwining = None
    if phis_ok:
        intertwining = all(
            intertwining_check(inst, a, b, tols.residual)
            for a in range(len(inst.features))
            for b in range(a, len(inst.features))
        )
    results["intertwining"] = intertwining

    modulus_ok = None
    if phis_ok:
        try:
            modulus_ok = all(
                modulus_bound_check(inst, a, tols.eps_invert, tols.psd)
                for a in range(len(inst.features))
            )
        except NotCentralError as err:
            results["modulus_bound_skipped"] = f"non-central feature range: {err}"
        except NotInvertibleError as err:
            results["modulus_bound_skipped"] = f"K(s,s) not invertible: {err}"
    results["modulus_bound"] = modulus_ok

    passed = (
        contraction
        and phis_ok
        and (intertwining is not False)
        and (modulus_ok is not False)
    )
    return results, passed, tols


def _cmd_selftest(args):
    report = run_selftest()
    return report, report["passed"], Tolerances()


_HANDLERS = {
    "check-kernel": _cmd_check_kernel,
    "interpolate": _cmd_interpolate,
    "deflate": _cmd_deflate,
    "tensor": _cmd_tensor,
    "multiplier": _cmd_multiplier,
    "berezin": _cmd_berezin,
    "frame-bounds": _cmd_frame_bounds,
    "parseval": _cmd_parseval,
    "papadakis": _cmd_papadakis,
    "psi-multiplier": _cmd_psi_multiplier,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code else 0

    start = time.perf_counter()
    try:
        results, passed, tols = _HANDLERS[args.command](args)
    except (InstanceError, OSError) as err:
        sys.stderr.write(f"rkmod: {err}\n")
        return 2
    except RkmodError as err:
        sys.stderr.write(f"rkmod: {err}\n")
        return 2

    report = {
        "command": [args.command] + argv[1:],
        "version": __version__,
        "parameters": {
            "tol_psd": tols.psd,
            "tol_residual": tols.residual,
            "eps_invert": tols.eps_invert,
        },
        "results": _round_floats(results),
        "passed": bool(passed),
        "elapsed_seconds": round(time.perf_counter() - start, 6),
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
