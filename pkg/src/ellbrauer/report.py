"""Versioned JSON reports: lossless, deterministic serialization of the
pipeline outputs (classification, tangents, generators, relations, flags)."""

from __future__ import annotations

import json

from gmpy2 import mpq

from .engine import FreeParameter, KummerPair, Presentation, Symbol, SymbolTensor
from .fields import (
    ExtensionField,
    FieldDescriptor,
    FieldElement,
    PrimeField,
    RationalField,
)
from .funcfield import CurveFunction

SCHEMA_VERSION = 1


def payload_to_json(field: FieldDescriptor, payload):
    if isinstance(field, RationalField):
        return str(payload)
    if isinstance(field, PrimeField):
        return payload
    assert isinstance(field, ExtensionField)
    return [payload_to_json(field.base, c) for c in payload]


def payload_from_json(field: FieldDescriptor, data):
    if isinstance(field, RationalField):
        return mpq(data)
    if isinstance(field, PrimeField):
        return int(data)
    assert isinstance(field, ExtensionField)
    return tuple(payload_from_json(field.base, c) for c in data)


def element_to_json(elem: FieldElement):
    return {
        "field": elem.field.describe(),
        "coeffs": payload_to_json(elem.field, elem.payload),
        "display": repr(elem),
    }


def poly_to_json(field, poly):
    return [payload_to_json(field, c) for c in poly.coeffs]


def function_to_json(fn: CurveFunction):
    return {
        "field": fn.field.describe(),
        "u": poly_to_json(fn.field, fn.u),
        "v": poly_to_json(fn.field, fn.v),
        "w": poly_to_json(fn.field, fn.w),
        "display": repr(fn),
    }


def slot_to_json(slot):
    if isinstance(slot, FreeParameter):
        return {"parameter": slot.name, "domain": slot.field_label, "constraint": slot.constraint}
    if isinstance(slot, CurveFunction):
        if slot.is_constant():
            return element_to_json(slot.constant_value())
        return function_to_json(slot)
    return element_to_json(slot)


def symbol_to_json(sym: Symbol):
    out = {
        "coeff": slot_to_json(sym.coeff),
        "func": slot_to_json(sym.func),
        "field": sym.label,
    }
    if sym.cor_pending:
        out["cor_pending"] = sym.cor_pending
    return out


def tensor_to_json(tensor: SymbolTensor):
    return [symbol_to_json(t) for t in tensor.terms]


def pair_to_json(pair: KummerPair):
    return {"a": element_to_json(pair.a), "b": element_to_json(pair.b)}


def point_to_json(p):
    if p is None:
        return None
    if p.infinity:
        return "O"
    return {"x": element_to_json(p.x), "y": element_to_json(p.y)}


class Report:
    def __init__(self, data: dict):
        self.data = data

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2)

    @staticmethod
    def from_json(text: str) -> "Report":
        return Report(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, Report) and self.data == other.data

    def caveats(self):
        return self.data.get("caveats", [])

    def summary_lines(self):
        d = self.data
        lines = [
            f"case: {d['classification']['case']}",
            f"splitting field: {d['classification']['L']} "
            f"(degree {d['classification']['degree_over_base']} over the base)",
            d["decomposition"],
        ]
        lines.append("generators:")
        for g in d["generators"]:
            lines.append(f"  {_tensor_display(g)}")
        lines.append("relations:")
        for r in d["relations"]:
            if r.get("tensor") is None:
                lines.append(f"  [{r.get('note', 'not represented')}]")
            elif not r["tensor"]:
                lines.append("  1 (trivial class)")
            else:
                lines.append(f"  {_tensor_display(r['tensor'])}")
        for c in d.get("caveats", []):
            lines.append(f"caveat: {c}")
        for n in d.get("notes", []):
            lines.append(f"note: {n}")
        return lines


def _slot_display(s):
    if "parameter" in s:
        return s["parameter"]
    return s.get("display", "?")


def _tensor_display(tensor_json):
    if not tensor_json:
        return "1 (trivial class)"
    parts = []
    for s in tensor_json:
        wrap = "Cor" * s.get("cor_pending", 0)
        parts.append(f"{wrap}({_slot_display(s['coeff'])}, {_slot_display(s['func'])})_{{{s['field']}}}")
    return " (x) ".join(parts)


def presentation_to_json(pres: Presentation):
    relations = []
    for entry in pres.relations:
        item = {
            "point": point_to_json(entry.get("point")),
            "pair": pair_to_json(entry["pair"]) if entry.get("pair") is not None else None,
            "tensor": tensor_to_json(entry["tensor"]) if entry.get("tensor") is not None else None,
        }
        if entry.get("note"):
            item["note"] = entry["note"]
        if entry.get("restricted_tensor") is not None:
            item["restricted_tensor"] = tensor_to_json(entry["restricted_tensor"])
        relations.append(item)
    return {
        "case": pres.case,
        "decomposition": pres.decomposition,
        "generators": [tensor_to_json(g) for g in pres.generators],
        "relations": relations,
        "caveats": list(pres.caveats),
        "notes": list(pres.notes),
        "mw_provenance": pres.mw_provenance,
    }
