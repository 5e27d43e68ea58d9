"""Metric specification files (JSON) and their conversion to geometry objects."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import exprdsl
from .errors import InputError
from .geometry import MetricField, WeylStructure

CLASSIFICATIONS = ("flat", "einstein", "non_einstein", "weyl_nonclosed")


def _schema():
    text = resources.files("curvlab").joinpath("schemas/metric_spec.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class MetricSpec:
    dimension: int
    coordinates: tuple
    metric: tuple  # n x n grid of expression strings (lower triangle may be None)
    sample_box: tuple
    params: dict = field(default_factory=dict)
    weyl_one_form: tuple | None = None
    label: str = ""
    id: str | None = None
    classification: str | None = None
    validity_hint: str | None = None

    def __post_init__(self):
        n = self.dimension
        if len(self.coordinates) != n:
            raise InputError(f"{len(self.coordinates)} coordinates for dimension {n}")
        if len(self.metric) != n or any(len(row) != n for row in self.metric):
            raise InputError(f"metric grid must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                entry = self.metric[i][j]
                if i <= j and entry is None:
                    raise InputError(f"metric[{i}][{j}] (upper triangle) is required")
                if entry is not None:
                    try:
                        exprdsl.parse(entry)
                    except InputError as exc:
                        raise InputError(f"metric[{i}][{j}]: {exc}") from exc
                if i > j and entry is not None and exprdsl.parse(entry) != exprdsl.parse(self.metric[j][i]):
                    raise InputError(f"metric[{i}][{j}] does not match metric[{j}][{i}]")
        if self.weyl_one_form is not None:
            if len(self.weyl_one_form) != n:
                raise InputError(f"weyl_one_form needs {n} entries")
            for k, entry in enumerate(self.weyl_one_form):
                try:
                    exprdsl.parse(entry)
                except InputError as exc:
                    raise InputError(f"weyl_one_form[{k}]: {exc}") from exc
        if len(self.sample_box) != n:
            raise InputError(f"sample_box needs {n} [lo, hi] pairs")
        for k, (lo, hi) in enumerate(self.sample_box):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise InputError(f"sample_box[{k}] = [{lo}, {hi}] must be finite with lo < hi")
        if self.classification is not None and self.classification not in CLASSIFICATIONS:
            raise InputError(f"unknown classification {self.classification!r}")
        free = set()
        for row in self.metric:
            for entry in row:
                if entry is not None:
                    free |= exprdsl.symbols(exprdsl.parse(entry))
        for entry in self.weyl_one_form or ():
            free |= exprdsl.symbols(exprdsl.parse(entry))
        unbound = free - set(self.coordinates) - set(self.params)
        if unbound:
            raise InputError(f"unbound names in expressions: {sorted(unbound)}")

    @property
    def n(self):
        return self.dimension

    def with_params(self, **params):
        unknown = set(params) - set(self.params)
        if unknown:
            raise InputError(f"unknown parameters {sorted(unknown)}; spec declares {sorted(self.params)}")
        data = self.to_dict()
        data["params"] = {**self.params, **{k: float(v) for k, v in params.items()}}
        return MetricSpec.from_dict(data)

    def metric_field(self):
        return MetricField.from_grid(self.coordinates, self.metric, self.params, self.validity_hint)

    def weyl_structure(self):
        return WeylStructure(self.metric_field(), self.weyl_one_form)

    def source(self):
        """MetricField for metric-only specs, WeylStructure when a nonzero 1-form is given."""
        ws = self.weyl_structure()
        return ws.metric if ws.is_metric_only else ws

    def box(self):
        return np.array(self.sample_box, dtype=float)

    @classmethod
    def from_dict(cls, data):
        try:
            jsonschema.validate(data, _schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise InputError(f"spec file invalid at {where}: {exc.message}") from None
        return cls(
            dimension=data["dimension"],
            coordinates=tuple(data["coordinates"]),
            metric=tuple(tuple(row) for row in data["metric"]),
            sample_box=tuple(tuple(float(v) for v in pair) for pair in data["sample_box"]),
            params={k: float(v) for k, v in data.get("params", {}).items()},
            weyl_one_form=tuple(data["weyl_one_form"]) if "weyl_one_form" in data else None,
            label=data.get("label", ""),
            id=data.get("id"),
            classification=data.get("classification"),
            validity_hint=data.get("validity_hint"),
        )

    def to_dict(self):
        out = {}
        if self.id is not None:
            out["id"] = self.id
        out["label"] = self.label
        if self.classification is not None:
            out["classification"] = self.classification
        if self.validity_hint is not None:
            out["validity_hint"] = self.validity_hint
        out["dimension"] = self.dimension
        out["coordinates"] = list(self.coordinates)
        out["metric"] = [list(row) for row in self.metric]
        out["params"] = dict(self.params)
        out["weyl_one_form"] = list(self.weyl_one_form) if self.weyl_one_form else ["0"] * self.dimension
        out["sample_box"] = [list(pair) for pair in self.sample_box]
        return out


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read spec file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"spec file {path} is not valid JSON: {exc}") from None
    return MetricSpec.from_dict(data)


def diagonal_grid(entries):
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else "0" for j in range(n)) for i in range(n))
