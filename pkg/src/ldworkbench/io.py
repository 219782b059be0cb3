"""JSON input parsing and deterministic JSON/CSV report emission.

Input formats::

    measure     {"outcomes": ["H", "T"], "weights": [0.5, 0.5]}
                {"outcomes": {"product": [["H", "T"], ["H", "T"]]}, "weights": [...]}
                {"product": [<measure>, <measure>]}
    rv          {"values": [1, -1]}  or a bare list
    map         {"from": [...], "to": [...], "rows": [[...], ...]}
    involution  {"perm": [1, 0]}  or a bare list
    constraint  {"kind": "ball", "center": [...], "radius": r, "closed": true}
                {"kind": "halfspace", "x": [...], "threshold": t, "direction": "ge"}
    family      {"kind": "bernoulli", "interval": [a, b]}
                {"kind": "exponential", "rv": [...], "interval": [a, b], "base": [...]}
                {"kind": "table", "thetas": [...], "measures": [[...], ...]}
                {"kind": "segment", "p": [...], "q": [...]}
    sample      a list of outcome indices or labels, or {"sample": [...]}
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import families
from .empirical_sanov import ConstraintSet
from .errors import InvalidInput
from .fluctuation import Involution
from .measures import OutcomeSpace, ProbMeasure, RandomVar, StochasticMap, product

SCHEMA_VERSION = 1


class InputFormatError(InvalidInput):
    """A data file could not be read or decoded."""


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: malformed JSON at line {exc.lineno}, "
                               f"column {exc.colno}: {exc.msg}") from None


def _require(obj: dict, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InvalidInput(f"{what} needs a {key!r} field")
    return obj[key]


def parse_space(obj) -> OutcomeSpace:
    if isinstance(obj, dict):
        factors = _require(obj, "product", "a product space")
        if len(factors) != 2:
            raise InvalidInput("product spaces are declared with exactly two factors")
        return OutcomeSpace.product(parse_space(factors[0]), parse_space(factors[1]))
    if not isinstance(obj, list):
        raise InvalidInput("outcomes must be a list of labels")
    return OutcomeSpace(obj)


def parse_measure(obj) -> ProbMeasure:
    if isinstance(obj, dict) and "product" in obj and "weights" not in obj:
        parts = obj["product"]
        if len(parts) != 2:
            raise InvalidInput("a product measure needs exactly two factors")
        return product(parse_measure(parts[0]), parse_measure(parts[1]))
    if isinstance(obj, list):
        return ProbMeasure(obj)
    weights = _require(obj, "weights", "a measure")
    space = parse_space(obj["outcomes"]) if "outcomes" in obj else None
    return ProbMeasure(weights, space)


def parse_rv(obj, space: OutcomeSpace | None = None) -> RandomVar:
    values = obj["values"] if isinstance(obj, dict) else obj
    if not isinstance(values, list):
        raise InvalidInput("a random variable is a list of values")
    return RandomVar(values, space)


def parse_map(obj) -> StochasticMap:
    rows = _require(obj, "rows", "a stochastic map")
    src = OutcomeSpace(obj["from"]) if "from" in obj else None
    dst = OutcomeSpace(obj["to"]) if "to" in obj else None
    return StochasticMap(rows, src, dst)


def parse_involution(obj) -> Involution:
    perm = obj["perm"] if isinstance(obj, dict) else obj
    if not isinstance(perm, list):
        raise InvalidInput("an involution is a list of indices")
    return Involution(tuple(perm))


def parse_constraint(obj) -> ConstraintSet:
    kind = _require(obj, "kind", "a constraint")
    closed = bool(obj.get("closed", True))
    if kind == "ball":
        return ConstraintSet.ball(_require(obj, "center", "a ball"),
                                  _require(obj, "radius", "a ball"), closed)
    if kind == "halfspace":
        return ConstraintSet.halfspace(_require(obj, "x", "a halfspace"),
                                       _require(obj, "threshold", "a halfspace"),
                                       obj.get("direction", "ge"), closed)
    raise InvalidInput(f"unknown constraint kind {kind!r}")


def parse_family(obj) -> families.ParametricFamily:
    kind = _require(obj, "kind", "a family")
    if kind == "bernoulli":
        a, b = obj.get("interval", [0.0, 1.0])
        return families.bernoulli(a, b)
    if kind == "exponential":
        return families.exponential(_require(obj, "rv", "an exponential family"),
                                    tuple(_require(obj, "interval", "an exponential family")),
                                    obj.get("base"))
    if kind == "table":
        return families.table(_require(obj, "thetas", "a table family"),
                              _require(obj, "measures", "a table family"))
    if kind == "segment":
        return families.segment(_require(obj, "p", "a segment"), _require(obj, "q", "a segment"))
    raise InvalidInput(f"unknown family kind {kind!r}")


def parse_sample(obj, space: OutcomeSpace) -> list[int]:
    items = obj["sample"] if isinstance(obj, dict) else obj
    if not isinstance(items, list):
        raise InvalidInput("a sample is a list of outcomes")
    out = []
    for it in items:
        if isinstance(it, bool):
            raise InvalidInput("sample outcomes must be indices or labels")
        if isinstance(it, int):
            if not 0 <= it < space.size:
                raise InvalidInput(f"sample index {it} is out of range")
            out.append(it)
        else:
            out.append(space.index(it))
    return out


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, step = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise InvalidInput(f"bad grid {text!r}")
            n = int(math.floor((b - a) / step + 1e-9))
            return [round(a + k * step, 12) for k in range(n + 1)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InvalidInput(f"cannot parse grid {text!r}") from None


def parse_int_grid(text: str) -> list[int]:
    vals = parse_grid(text)
    if any(v != int(v) or v < 1 for v in vals):
        raise InvalidInput(f"grid {text!r} must contain positive integers")
    return [int(v) for v in vals]


def _clean(value):
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return value


def json_report(command: str, payload: dict) -> str:
    body = {"schema": SCHEMA_VERSION, "command": command}
    body.update(_clean(payload))
    return json.dumps(body, indent=2, allow_nan=False) + "\n"


def validate_report(text: str) -> dict:
    """Parse an emitted JSON report and check the envelope fields."""
    obj = json.loads(text)
    if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_VERSION:
        raise InvalidInput("report is missing schema version 1")
    if not isinstance(obj.get("command"), str):
        raise InvalidInput("report is missing its command name")
    return obj


def _csv_cell(v) -> str:
    v = _clean(v)
    return repr(v) if isinstance(v, float) else str(v)


def csv_report(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def rows_to_json(command: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    return json_report(command, {"rows": [dict(zip(header, r)) for r in rows]})
