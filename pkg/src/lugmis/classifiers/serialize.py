"""Versioned JSON model files.

Floats are written with ``repr`` precision by the json module, so a
round trip reproduces every parameter, and therefore every prediction,
bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

from .base import ModelSpec, TrainedModel, model_class

FORMAT = "lugmis.model"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "spec": model.spec.to_dict(),
        "dim": int(model.dim),
        "label_names": list(model.label_names),
        "params": model._params_json(),
    }


def model_from_dict(d) -> TrainedModel:
    if d.get("format") != FORMAT:
        raise ModelFormatError(f"not a model file (format={d.get('format')!r})")
    if d.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model version {d.get('version')!r}")
    spec = ModelSpec.from_dict(d["spec"])
    if spec.kind != d["kind"]:
        raise ModelFormatError("kind does not match the stored spec")
    cls = model_class(d["kind"])
    return cls._from_params_json(spec, int(d["dim"]), tuple(d["label_names"]), d["params"])


def dumps(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), allow_nan=False)


def loads(text: str) -> TrainedModel:
    return model_from_dict(json.loads(text))


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


def load_model(path) -> TrainedModel:
    return loads(Path(path).read_text(encoding="utf-8"))
