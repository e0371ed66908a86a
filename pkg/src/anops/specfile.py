"""Strict JSON reader for operator description files.

One file describes exactly one operator:

* ``{"kind": "diagonal", "strands": [...], "overrides": {...}}``
* ``{"kind": "shift", "strands": [...], "overrides": {...}, "phases": {...}}``
* ``{"kind": "composite", "alpha": "p/q", "k_diag": {...}, "f_terms": [...]}``

Rationals are integers or ``"p/q"`` strings; floats are rejected so no
exactness is lost at the boundary.  Unknown fields, duplicate keys and
duplicate override indices are errors; validation stops at the first
violated invariant and names it.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .classify import CompositeOperator
from .errors import InvalidSpec
from .rationals import parse_rational
from .seqmodel import SequenceSpec, Strand
from .shiftapp import WeightedShift

__all__ = ["parse_spec", "parse_spec_data"]

_INDEX_RE = re.compile(r"^[1-9][0-9]*$")


def _no_duplicate_keys(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise InvalidSpec(f"duplicate key {key!r}")
        seen.add(key)
        out[key] = value
    return out


def _rational(value, what: str) -> Fraction:
    if isinstance(value, float):
        raise InvalidSpec(
            f"{what} must be an integer or a 'p/q' string, not a float ({value!r})"
        )
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise InvalidSpec(f"{what}: {exc}") from None


def _check_keys(obj: dict, allowed: set[str], required: set[str], what: str):
    if not isinstance(obj, dict):
        raise InvalidSpec(f"{what} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise InvalidSpec(f"unknown field {sorted(unknown)[0]!r} in {what}")
    missing = required - set(obj)
    if missing:
        raise InvalidSpec(f"missing field {sorted(missing)[0]!r} in {what}")


def _parse_strand(obj, position: int) -> Strand:
    what = f"strand {position}"
    _check_keys(obj, {"limit", "approach", "amplitude", "ratio"}, {"limit", "approach"}, what)
    approach = obj["approach"]
    if not isinstance(approach, str) or approach not in ("below", "exact", "above"):
        raise InvalidSpec(f"{what}: approach must be one of below/exact/above")
    limit = _rational(obj["limit"], f"{what} limit")
    amplitude = obj.get("amplitude")
    ratio = obj.get("ratio")
    if approach == "exact":
        if amplitude is not None or ratio is not None:
            raise InvalidSpec(f"{what}: exact strands take no amplitude or ratio")
        return Strand(limit, approach)
    if amplitude is None or ratio is None:
        raise InvalidSpec(f"{what}: geometric strands need both amplitude and ratio")
    return Strand(
        limit,
        approach,
        _rational(amplitude, f"{what} amplitude"),
        _rational(ratio, f"{what} ratio"),
    )


def _parse_index(key, what: str) -> int:
    if not isinstance(key, str) or not _INDEX_RE.match(key):
        raise InvalidSpec(f"{what}: indices must be positive integer strings, got {key!r}")
    return int(key)


def _parse_overrides(obj) -> dict[int, Fraction]:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise InvalidSpec("overrides must be a JSON object")
    overrides = {}
    for key, value in obj.items():
        n = _parse_index(key, "overrides")
        overrides[n] = _rational(value, f"override value at index {n}")
    return overrides


def _parse_sequence(obj, what: str) -> SequenceSpec:
    _check_keys(obj, {"strands", "overrides"}, {"strands"}, what)
    strands = obj["strands"]
    if not isinstance(strands, list) or not strands:
        raise InvalidSpec(f"{what}: strands must be a nonempty list")
    return SequenceSpec(
        tuple(_parse_strand(s, i + 1) for i, s in enumerate(strands)),
        _parse_overrides(obj.get("overrides")),
    )


def _parse_phases(obj) -> dict[int, float]:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise InvalidSpec("phases must be a JSON object")
    phases = {}
    for key, value in obj.items():
        n = _parse_index(key, "phases")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidSpec(f"phase at index {n} must be a number (radians)")
        phases[n] = float(value)
    return phases


def _parse_f_terms(obj) -> tuple[tuple[Fraction, dict[int, Fraction]], ...]:
    if obj is None:
        return ()
    if not isinstance(obj, list):
        raise InvalidSpec("f_terms must be a list")
    terms = []
    for i, term in enumerate(obj, start=1):
        what = f"f_terms[{i}]"
        _check_keys(term, {"coef", "vector"}, {"coef", "vector"}, what)
        coef = _rational(term["coef"], f"{what} coef")
        vector_obj = term["vector"]
        if not isinstance(vector_obj, dict):
            raise InvalidSpec(f"{what}: vector must be a JSON object")
        vector = {}
        for key, value in vector_obj.items():
            n = _parse_index(key, f"{what} vector")
            vector[n] = _rational(value, f"{what} vector value at index {n}")
        terms.append((coef, vector))
    return tuple(terms)


def parse_spec_data(data) -> SequenceSpec | WeightedShift | CompositeOperator:
    """Validate an already-decoded spec object into a model value."""
    if not isinstance(data, dict):
        raise InvalidSpec("spec file must hold a JSON object")
    kind = data.get("kind")
    if kind not in ("diagonal", "shift", "composite"):
        raise InvalidSpec('kind must be one of "diagonal", "shift", "composite"')
    if kind == "diagonal":
        _check_keys(data, {"kind", "strands", "overrides"}, {"kind", "strands"}, "diagonal spec")
        return _parse_sequence(
            {"strands": data["strands"], "overrides": data.get("overrides")},
            "diagonal spec",
        )
    if kind == "shift":
        _check_keys(
            data,
            {"kind", "strands", "overrides", "phases"},
            {"kind", "strands"},
            "shift spec",
        )
        moduli = _parse_sequence(
            {"strands": data["strands"], "overrides": data.get("overrides")},
            "shift spec",
        )
        return WeightedShift(moduli, _parse_phases(data.get("phases")))
    _check_keys(
        data,
        {"kind", "alpha", "k_diag", "f_terms"},
        {"kind", "alpha", "k_diag"},
        "composite spec",
    )
    alpha = _rational(data["alpha"], "alpha")
    if alpha < 0:
        raise InvalidSpec("alpha must be nonnegative")
    k_diag = _parse_sequence(data["k_diag"], "k_diag")
    return CompositeOperator(alpha, k_diag, _parse_f_terms(data.get("f_terms")))


def parse_spec(path) -> SequenceSpec | WeightedShift | CompositeOperator:
    """Read and validate an operator spec file.

    Raises InvalidSpec with a diagnostic naming the first violated
    invariant; the CLI maps that to exit code 1.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except InvalidSpec:
        raise
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"not well-formed JSON: {exc}") from None
    return parse_spec_data(data)
