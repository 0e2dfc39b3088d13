"""Helpers for parsing structured-text (JSON) documents with field-path errors."""

from __future__ import annotations

from .errors import SchemaError


def require(doc: dict, key: str, path: str = ""):
    """Fetch a required field, raising a SchemaError naming the missing path."""
    where = f"{path}.{key}" if path else key
    if not isinstance(doc, dict):
        raise SchemaError(f"expected an object at {path or '<root>'}", field_path=path)
    if key not in doc:
        raise SchemaError(f"missing required field {where}", field_path=where)
    return doc[key]


def require_number(doc: dict, key: str, path: str = "") -> float:
    v = require(doc, key, path)
    where = f"{path}.{key}" if path else key
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"field {where} must be a number", field_path=where)
    return float(v)


def require_int(doc: dict, key: str, path: str = "") -> int:
    v = require(doc, key, path)
    where = f"{path}.{key}" if path else key
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"field {where} must be an integer", field_path=where)
    return v


def require_str(doc: dict, key: str, path: str = "") -> str:
    v = require(doc, key, path)
    where = f"{path}.{key}" if path else key
    if not isinstance(v, str):
        raise SchemaError(f"field {where} must be a string", field_path=where)
    return v


def require_list(doc: dict, key: str, path: str = "") -> list:
    v = require(doc, key, path)
    where = f"{path}.{key}" if path else key
    if not isinstance(v, list):
        raise SchemaError(f"field {where} must be a list", field_path=where)
    return v
