"""File formats: model parameters, moment vectors, price series, reports."""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import InsufficientData, NonPositivePrice
from .model import ModelParams


def load_params(path) -> ModelParams:
    with open(path) as fh:
        return ModelParams.from_dict(json.load(fh))


def _parse_number(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"not a number: {v!r}")
    return v


def parse_moments(doc) -> list:
    """Accept a bare list, ``{"moments": [...]}`` or a report envelope."""
    if isinstance(doc, dict):
        if "outputs" in doc and isinstance(doc["outputs"], dict):
            doc = doc["outputs"]
        for key in ("moments", "values"):
            if key in doc:
                doc = doc[key]
                break
        else:
            raise ValueError("no 'moments' list in moments document")
    if not isinstance(doc, list):
        raise ValueError("moments must be a list")
    return [_parse_number(v) for v in doc]


def load_moments(path) -> list:
    with open(path) as fh:
        return parse_moments(json.load(fh))


def read_prices(path) -> list:
    """Read a ``t,price`` CSV with strictly increasing integer ``t``."""
    prices = []
    last_t = None
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "price"]:
            raise ValueError("price file must have the header 't,price'")
        for lineno, row in enumerate(reader, 2):
            t = int(row["t"])
            if last_t is not None and t <= last_t:
                raise ValueError(f"line {lineno}: t must be strictly increasing")
            last_t = t
            prices.append(float(row["price"]))
    return prices


def ingest(prices: Sequence[float], stride: int, max_order: int) -> list:
    """Raw sample moments of log returns over non-overlapping windows.

    Window i spans prices[(i-1)*stride] .. prices[i*stride]; trailing prices
    that do not complete a window are ignored.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    for i, p in enumerate(prices):
        if not p > 0:
            raise NonPositivePrice(f"price #{i} is {p!r}")
    windows = (len(prices) - 1) // stride if prices else 0
    if windows < 2:
        raise InsufficientData(f"{len(prices)} prices give {max(windows, 0)} windows at stride {stride}; need 2")
    returns = [math.log(prices[i * stride] / prices[(i - 1) * stride])
               for i in range(1, windows + 1)]
    return [math.fsum(x ** n for x in returns) / windows for n in range(1, max_order + 1)]


def jsonable(obj):
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj


def write_report(report: dict, path) -> None:
    text = json.dumps(jsonable(report), indent=2)
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")
