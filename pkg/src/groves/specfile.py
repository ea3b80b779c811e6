"""Mechanism spec files: a JSON document with domain, grid, and redistribution.

Rationals travel as "p/q" strings (or "p" for integers) so files stay
exact.  Export is canonical — sorted object keys, table entries sorted by
key, two-space indent, trailing newline — so exporting an imported
canonical file is byte-identical.  Parse errors carry a dotted location
into the document.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Union

from .domains import (
    Domain,
    MultiUnit,
    PublicProjectEqual,
    PublicProjectGeneral,
    SingleItem,
    TypeGrid,
)
from .errors import ContractViolation, GrovesError, SpecFileError
from .mechanisms import (
    AnonymousTabulated,
    GrovesMechanism,
    LinearAnonymous,
    Redistribution,
    Tabulated,
)
from .numerics import format_rational, parse_rational


def _fmt(value: Fraction) -> str:
    return format_rational(value)


def _domain_to_dict(domain: Domain) -> dict:
    if isinstance(domain, SingleItem):
        return {"kind": "single_item"}
    if isinstance(domain, MultiUnit):
        return {"kind": "multi_unit", "units": domain.units}
    if isinstance(domain, PublicProjectEqual):
        return {"kind": "public_project_equal", "cost": _fmt(domain.cost)}
    if isinstance(domain, PublicProjectGeneral):
        return {
            "kind": "public_project_general",
            "shares": [_fmt(s) for s in domain.shares],
        }
    raise ContractViolation(f"unknown domain {domain!r}")


def _table_entries(table: dict) -> list:
    return [
        {"key": [_fmt(v) for v in key], "value": _fmt(value)}
        for key, value in sorted(table.items())
    ]


def _redistribution_to_dict(red: Redistribution) -> dict:
    if isinstance(red, LinearAnonymous):
        return {
            "kind": "linear_anonymous",
            "c0": _fmt(red.c0),
            "coeffs": [_fmt(c) for c in red.coeffs],
        }
    if isinstance(red, AnonymousTabulated):
        return {"kind": "anonymous_tabulated", "table": _table_entries(red.table)}
    if isinstance(red, Tabulated):
        return {"kind": "tabulated", "tables": [_table_entries(t) for t in red.tables]}
    raise ContractViolation(f"unknown redistribution {red!r}")


def to_dict(mech: GrovesMechanism) -> dict:
    return {
        "domain": _domain_to_dict(mech.domain),
        "grid": {
            "n": mech.grid.n,
            "values": [_fmt(v) for v in mech.grid.values],
            "L": _fmt(mech.grid.L),
            "U": _fmt(mech.grid.U),
        },
        "redistribution": _redistribution_to_dict(mech.redistribution),
    }


def dumps(mech: GrovesMechanism) -> str:
    return json.dumps(to_dict(mech), indent=2, sort_keys=True) + "\n"


def dump_path(mech: GrovesMechanism, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(mech))


def _expect(obj, key, kind, loc):
    if not isinstance(obj, dict):
        raise SpecFileError(f"expected an object, got {type(obj).__name__}", loc)
    if key not in obj:
        raise SpecFileError(f"missing field {key!r}", loc)
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise SpecFileError(
            f"field {key!r} must be {kind.__name__}, got {type(value).__name__}",
            loc,
        )
    return value


def _rational_at(text, loc) -> Fraction:
    if not isinstance(text, str):
        raise SpecFileError(
            f"rationals must be strings like \"3/4\", got {type(text).__name__}", loc
        )
    try:
        return parse_rational(text)
    except ContractViolation as exc:
        raise SpecFileError(str(exc), loc) from None


def _rational_list(values, loc) -> list:
    if not isinstance(values, list):
        raise SpecFileError("expected an array of rationals", loc)
    return [_rational_at(v, f"{loc}[{idx}]") for idx, v in enumerate(values)]


def _parse_domain(obj) -> Domain:
    kind = _expect(obj, "kind", str, "domain")
    if kind == "single_item":
        return SingleItem()
    if kind == "multi_unit":
        return MultiUnit(_expect(obj, "units", int, "domain"))
    if kind == "public_project_equal":
        return PublicProjectEqual(_rational_at(_expect(obj, "cost", None, "domain"), "domain.cost"))
    if kind == "public_project_general":
        shares = _rational_list(_expect(obj, "shares", list, "domain"), "domain.shares")
        return PublicProjectGeneral(tuple(shares))
    raise SpecFileError(f"unknown domain kind {kind!r}", "domain.kind")


def _parse_grid(obj) -> TypeGrid:
    n = _expect(obj, "n", int, "grid")
    values = _rational_list(_expect(obj, "values", list, "grid"), "grid.values")
    try:
        grid = TypeGrid(n, tuple(values))
    except ContractViolation as exc:
        raise SpecFileError(str(exc), "grid") from None
    for bound, actual in (("L", grid.L), ("U", grid.U)):
        if bound in obj and _rational_at(obj[bound], f"grid.{bound}") != actual:
            raise SpecFileError(
                f"declared {bound} does not match the grid endpoint {actual}",
                f"grid.{bound}",
            )
    return grid


def _parse_table(entries, loc) -> dict:
    if not isinstance(entries, list):
        raise SpecFileError("expected an array of {key, value} entries", loc)
    table = {}
    for idx, entry in enumerate(entries):
        eloc = f"{loc}[{idx}]"
        key = tuple(_rational_list(_expect(entry, "key", list, eloc), f"{eloc}.key"))
        value = _rational_at(_expect(entry, "value", None, eloc), f"{eloc}.value")
        if key in table and table[key] != value:
            raise SpecFileError(f"duplicate key {key} with conflicting values", eloc)
        table[key] = value
    return table


def _parse_redistribution(obj) -> Redistribution:
    kind = _expect(obj, "kind", str, "redistribution")
    loc = "redistribution"
    if kind == "linear_anonymous":
        c0 = _rational_at(_expect(obj, "c0", None, loc), f"{loc}.c0")
        coeffs = _rational_list(_expect(obj, "coeffs", list, loc), f"{loc}.coeffs")
        return LinearAnonymous(c0, tuple(coeffs))
    if kind == "anonymous_tabulated":
        return AnonymousTabulated(
            _parse_table(_expect(obj, "table", list, loc), f"{loc}.table")
        )
    if kind == "tabulated":
        tables = _expect(obj, "tables", list, loc)
        return Tabulated(
            tuple(
                _parse_table(t, f"{loc}.tables[{idx}]") for idx, t in enumerate(tables)
            )
        )
    raise SpecFileError(f"unknown redistribution kind {kind!r}", f"{loc}.kind")


def from_dict(doc: dict) -> GrovesMechanism:
    if not isinstance(doc, dict):
        raise SpecFileError("spec document must be a JSON object")
    domain = _parse_domain(_expect(doc, "domain", dict, ""))
    grid = _parse_grid(_expect(doc, "grid", dict, ""))
    red = _parse_redistribution(_expect(doc, "redistribution", dict, ""))
    try:
        return GrovesMechanism(domain, grid, red)
    except GrovesError as exc:
        raise SpecFileError(str(exc)) from None


def loads(text: str) -> GrovesMechanism:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON: {exc}") from None
    return from_dict(doc)


def load_path(path) -> GrovesMechanism:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)
