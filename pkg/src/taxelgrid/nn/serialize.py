"""Model files: one JSON envelope for networks, forests and linear models.

Envelope: {"format_version": 1, "kind": ..., "parameters": ...} plus
kind-specific fields. Floats are written with shortest round-trip repr, so
save followed by load reproduces forward outputs bitwise.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ParseError, ShapeMismatch, VersionMismatch
from .model import ModelSpec, TrainedModel

FORMAT_VERSION = 1


def _encode_array(name: str, arr: np.ndarray) -> dict:
    return {
        "name": name,
        "shape": list(arr.shape),
        "data": [float(v) for v in arr.ravel()],
    }


def _decode_array(entry: dict) -> np.ndarray:
    shape = tuple(entry["shape"])
    data = np.array(entry["data"], dtype=np.float64)
    if data.size != int(np.prod(shape)):
        raise ShapeMismatch(
            f"parameter {entry.get('name', '?')}: {data.size} values do not "
            f"fill shape {shape}"
        )
    return data.reshape(shape)


def model_to_payload(model: TrainedModel) -> dict:
    params = []
    for i, pdict in enumerate(model.parameters):
        for key in sorted(pdict):
            entry = _encode_array(f"layer{i}.{key}", pdict[key])
            entry["layer"] = i
            entry["param"] = key
            params.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "nn",
        "spec": model.spec.to_dict(),
        "parameters": params,
        "training_meta": model.training_meta,
    }


def model_from_payload(doc: dict) -> TrainedModel:
    spec = ModelSpec.from_dict(doc["spec"])
    params = [dict() for _ in spec.layers]
    for entry in doc["parameters"]:
        params[entry["layer"]][entry["param"]] = _decode_array(entry)
    return TrainedModel(
        spec=spec,
        parameters=tuple(params),
        training_meta=doc.get("training_meta", {}),
    )


def save_model(model, path) -> None:
    """Write any supported model (nn, forest, linear svm) to a JSON file."""
    if isinstance(model, TrainedModel):
        payload = model_to_payload(model)
    elif hasattr(model, "to_payload"):
        payload = model.to_payload()
        payload["format_version"] = FORMAT_VERSION
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_model(path):
    """Read a model file back; dispatches on its "kind" field."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})")
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ParseError(f"{path}: missing format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(
            f"{path}: format_version {doc['format_version']} unsupported "
            f"(expected {FORMAT_VERSION})"
        )
    kind = doc.get("kind")
    if kind == "nn":
        return model_from_payload(doc)
    if kind == "forest":
        from ..baselines.forest import RandomForestModel

        return RandomForestModel.from_payload(doc)
    if kind == "linear_svm":
        from ..baselines.svm import LinearModel

        return LinearModel.from_payload(doc)
    raise ParseError(f"{path}: unknown model kind {kind!r}")
