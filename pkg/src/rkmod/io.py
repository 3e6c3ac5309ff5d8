"""Instance file parsing and canonical serialization.

Instances are UTF-8 JSON objects. Complex numbers are two-element arrays
[re, im] (a bare number is accepted and read as its real part); an algebra
element is the list of its row-major blocks matching the signature; a kernel
table is an object keyed "s|t". Exactly one of "kernel" / "features" must be
present. Validation is strict: unknown fields, incomplete tables, duplicate
labels and non-finite entries are rejected with the offending field path.

Serialization is canonical (sorted keys, two-space indent, complex entries
always [re, im]), so parse followed by serialize is a byte-stable
normal form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .algebra import AlgebraElement, Signature, as_signature
from .errors import InstanceError
from .kernels import FeatureFamily, Kernel, PointSet, TABLE_SEPARATOR
from .tolerances import INVERT_EPS, PSD_TOL, RESIDUAL_TOL

__all__ = [
    "Instance",
    "PsiBlock",
    "Tolerances",
    "canonicalize",
    "decode_element",
    "encode_element",
    "instance_to_dict",
    "parse_instance",
    "serialize_instance",
]

_TOP_LEVEL_FIELDS = {
    "signature",
    "points",
    "kernel",
    "features",
    "multiplier",
    "multiplier_g",
    "frame",
    "interpolation",
    "psi",
    "tolerances",
}


@dataclass(frozen=True)
class Tolerances:
    psd: float = PSD_TOL
    residual: float = RESIDUAL_TOL
    eps_invert: float = INVERT_EPS


@dataclass(frozen=True)
class PsiBlock:
    values: dict[str, AlgebraElement]
    c: float
    uniqueness_set: tuple[str, ...]


@dataclass(frozen=True)
class Instance:
    signature: Signature
    points: PointSet
    kernel: Kernel | None
    features: FeatureFamily | None
    multiplier: dict[str, AlgebraElement] | None
    multiplier_g: dict[str, AlgebraElement] | None
    frame: tuple[dict[str, AlgebraElement], ...] | None
    interpolation: tuple[tuple[str, ...], tuple[AlgebraElement, ...]] | None
    psi: PsiBlock | None
    tolerances: Tolerances

    def realized_kernel(self) -> Kernel:
        """The kernel table, or the one assembled from the feature family."""
        if self.kernel is not None:
            return self.kernel
        from .kernels import kernel_from_features

        return kernel_from_features(self.features)


def _decode_complex(obj, path: str) -> complex:
    if isinstance(obj, bool):
        raise InstanceError(path, "expected a number or [re, im], got a boolean")
    if isinstance(obj, (int, float)):
        z = complex(float(obj), 0.0)
    elif (
        isinstance(obj, list)
        and len(obj) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        z = complex(float(obj[0]), float(obj[1]))
    else:
        raise InstanceError(path, f"expected a number or [re, im], got {obj!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InstanceError(path, "complex entries must be finite")
    return z


def decode_element(obj, signature: Signature, path: str) -> AlgebraElement:
    if not isinstance(obj, list) or len(obj) != len(signature):
        raise InstanceError(path, f"expected {len(signature)} blocks")
    blocks = []
    for k, (nk, block) in enumerate(zip(signature, obj)):
        where = f"{path}.block {k}"
        if not isinstance(block, list) or len(block) != nk:
            raise InstanceError(where, f"expected {nk} rows")
        rows = []
        for r, row in enumerate(block):
            if not isinstance(row, list) or len(row) != nk:
                raise InstanceError(f"{where}.row {r}", f"expected {nk} entries")
            rows.append([_decode_complex(v, f"{where}.row {r}") for v in row])
        blocks.append(np.array(rows, dtype=np.complex128))
    return AlgebraElement(signature, blocks)


def encode_element(el: AlgebraElement) -> list:
    out = []
    for block in el.blocks:
        out.append([[[float(v.real), float(v.imag)] for v in row] for row in block])
    return out


def _decode_symbol_table(obj, points: PointSet, signature, path: str):
    if not isinstance(obj, dict):
        raise InstanceError(path, "expected an object keyed by point label")
    table = {}
    for s in obj:
        if s not in points:
            raise InstanceError(f"{path}.{s}", "unknown point label")
    for s in points:
        if s not in obj:
            raise InstanceError(path, f"missing value at point {s!r}")
        table[s] = decode_element(obj[s], signature, f"{path}.{s}")
    return table


def parse_instance(source: str | Path | Mapping) -> Instance:
    """Parse and validate an instance file (or an already-loaded object)."""
    if isinstance(source, Mapping):
        data = source
    else:
        text = Path(source).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise InstanceError("<file>", f"invalid JSON: {err}") from None
    if not isinstance(data, dict):
        raise InstanceError("<file>", "top level must be a JSON object")
    unknown = set(data) - _TOP_LEVEL_FIELDS
    if unknown:
        raise InstanceError(sorted(unknown)[0], "unknown field")

    if "signature" not in data:
        raise InstanceError("signature", "missing required field")
    sig_raw = data["signature"]
    if (
        not isinstance(sig_raw, list)
        or not sig_raw
        or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in sig_raw)
    ):
        raise InstanceError("signature", "expected a nonempty list of integers >= 1")
    signature = as_signature(sig_raw)

    if "points" not in data:
        raise InstanceError("points", "missing required field")
    pts_raw = data["points"]
    if not isinstance(pts_raw, list) or not all(isinstance(s, str) for s in pts_raw):
        raise InstanceError("points", "expected a list of strings")
    try:
        points = PointSet(pts_raw)
    except ValueError as err:
        raise InstanceError("points", str(err)) from None

    has_kernel = "kernel" in data
    has_features = "features" in data
    if has_kernel == has_features:
        raise InstanceError(
            "kernel/features", "exactly one of 'kernel' and 'features' must be present"
        )

    kernel = None
    features = None
    if has_kernel:
        raw = data["kernel"]
        if not isinstance(raw, dict):
            raise InstanceError("kernel", "expected an object keyed 's|t'")
        table = {}
        for key, value in raw.items():
            parts = key.split(TABLE_SEPARATOR)
            if len(parts) != 2:
                raise InstanceError(f"kernel.{key}", "key must be of the form 's|t'")
            s, t = parts
            if s not in points or t not in points:
                raise InstanceError(f"kernel.{key}", "unknown point label in key")
            table[(s, t)] = decode_element(value, signature, f"kernel.{key}")
        for s in points:
            for t in points:
                if (s, t) not in table:
                    raise InstanceError("kernel", f"missing entry '{s}{TABLE_SEPARATOR}{t}'")
        kernel = Kernel.from_table(points, signature, table)
    else:
        raw = data["features"]
        if not isinstance(raw, list):
            raise InstanceError("features", "expected a list of value tables")
        members = []
        for a, member in enumerate(raw):
            members.append(
                _decode_symbol_table(member, points, signature, f"features[{a}]")
            )
        features = FeatureFamily(points, signature, members)

    multiplier = None
    if "multiplier" in data:
        multiplier = _decode_symbol_table(data["multiplier"], points, signature, "multiplier")
    multiplier_g = None
    if "multiplier_g" in data:
        multiplier_g = _decode_symbol_table(
            data["multiplier_g"], points, signature, "multiplier_g"
        )

    frame = None
    if "frame" in data:
        raw = data["frame"]
        if not isinstance(raw, list) or not raw:
            raise InstanceError("frame", "expected a nonempty list of coefficient tables")
        frame = tuple(
            _decode_symbol_table(member, points, signature, f"frame[{j}]")
            for j, member in enumerate(raw)
        )

    interpolation = None
    if "interpolation" in data:
        raw = data["interpolation"]
        if not isinstance(raw, dict) or set(raw) != {"points", "targets"}:
            raise InstanceError("interpolation", "expected {'points': [...], 'targets': [...]}")
        ipts = raw["points"]
        if not isinstance(ipts, list) or not all(isinstance(s, str) for s in ipts):
            raise InstanceError("interpolation.points", "expected a list of labels")
        for s in ipts:
            if s not in points:
                raise InstanceError("interpolation.points", f"unknown point {s!r}")
        if len(set(ipts)) != len(ipts):
            raise InstanceError("interpolation.points", "labels must be distinct")
        tgts = raw["targets"]
        if not isinstance(tgts, list) or len(tgts) != len(ipts):
            raise InstanceError("interpolation.targets", "need one target per point")
        targets = tuple(
            decode_element(t, signature, f"interpolation.targets[{i}]")
            for i, t in enumerate(tgts)
        )
        interpolation = (tuple(ipts), targets)

    psi = None
    if "psi" in data:
        raw = data["psi"]
        if not isinstance(raw, dict) or set(raw) != {"values", "c", "uniqueness_set"}:
            raise InstanceError(
                "psi", "expected {'values': {...}, 'c': number, 'uniqueness_set': [...]}"
            )
        c = raw["c"]
        if not isinstance(c, (int, float)) or isinstance(c, bool) or not c > 0:
            raise InstanceError("psi.c", "expected a positive number")
        uset = raw["uniqueness_set"]
        if not isinstance(uset, list) or not uset or not all(isinstance(s, str) for s in uset):
            raise InstanceError("psi.uniqueness_set", "expected a nonempty list of labels")
        for s in uset:
            if s not in points:
                raise InstanceError("psi.uniqueness_set", f"unknown point {s!r}")
        if len(set(uset)) != len(uset):
            raise InstanceError("psi.uniqueness_set", "labels must be distinct")
        vals = raw["values"]
        if not isinstance(vals, dict):
            raise InstanceError("psi.values", "expected an object keyed by point label")
        table = {}
        for s in vals:
            if s not in uset:
                raise InstanceError(f"psi.values.{s}", "point is not in the uniqueness set")
        for s in uset:
            if s not in vals:
                raise InstanceError("psi.values", f"missing value at point {s!r}")
            table[s] = decode_element(vals[s], signature, f"psi.values.{s}")
        psi = PsiBlock(values=table, c=float(c), uniqueness_set=tuple(uset))

    tolerances = Tolerances()
    if "tolerances" in data:
        raw = data["tolerances"]
        if not isinstance(raw, dict) or set(raw) - {"psd", "residual", "eps_invert"}:
            raise InstanceError("tolerances", "allowed keys: psd, residual, eps_invert")
        vals = {}
        for key in ("psd", "residual", "eps_invert"):
            if key in raw:
                v = raw[key]
                if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                    raise InstanceError(f"tolerances.{key}", "expected a positive number")
                vals[key] = float(v)
        tolerances = Tolerances(
            psd=vals.get("psd", PSD_TOL),
            residual=vals.get("residual", RESIDUAL_TOL),
            eps_invert=vals.get("eps_invert", INVERT_EPS),
        )

    return Instance(
        signature=signature,
        points=points,
        kernel=kernel,
        features=features,
        multiplier=multiplier,
        multiplier_g=multiplier_g,
        frame=frame,
        interpolation=interpolation,
        psi=psi,
        tolerances=tolerances,
    )


def instance_to_dict(instance: Instance) -> dict:
    """Canonical plain-object form of an instance."""
    out: dict = {
        "signature": list(instance.signature),
        "points": list(instance.points.labels),
    }
    if instance.kernel is not None:
        table = {}
        for s in instance.points:
            for t in instance.points:
                table[f"{s}{TABLE_SEPARATOR}{t}"] = encode_element(instance.kernel.value(s, t))
        out["kernel"] = table
    if instance.features is not None:
        out["features"] = [
            {s: encode_element(member[s]) for s in instance.points}
            for member in instance.features.members
        ]
    if instance.multiplier is not None:
        out["multiplier"] = {
            s: encode_element(instance.multiplier[s]) for s in instance.points
        }
    if instance.multiplier_g is not None:
        out["multiplier_g"] = {
            s: encode_element(instance.multiplier_g[s]) for s in instance.points
        }
    if instance.frame is not None:
        out["frame"] = [
            {s: encode_element(member[s]) for s in instance.points}
            for member in instance.frame
        ]
    if instance.interpolation is not None:
        pts, targets = instance.interpolation
        out["interpolation"] = {
            "points": list(pts),
            "targets": [encode_element(t) for t in targets],
        }
    if instance.psi is not None:
        out["psi"] = {
            "values": {
                s: encode_element(instance.psi.values[s])
                for s in instance.psi.uniqueness_set
            },
            "c": instance.psi.c,
            "uniqueness_set": list(instance.psi.uniqueness_set),
        }
    out["tolerances"] = {
        "psd": instance.tolerances.psd,
        "residual": instance.tolerances.residual,
        "eps_invert": instance.tolerances.eps_invert,
    }
    return out


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), sort_keys=True, indent=2) + "\n"


def canonicalize(text: str) -> str:
    """Normal form of an instance document: parse, then serialize."""
    return serialize_instance(parse_instance(json.loads(text)))


def kernel_instance(kernel: Kernel, tolerances: Tolerances | None = None) -> Instance:
    """Wrap a kernel as a standalone instance (used when emitting results)."""
    return Instance(
        signature=kernel.signature,
        points=kernel.points,
        kernel=kernel,
        features=None,
        multiplier=None,
        multiplier_g=None,
        frame=None,
        interpolation=None,
        psi=None,
        tolerances=tolerances or Tolerances(),
    )
