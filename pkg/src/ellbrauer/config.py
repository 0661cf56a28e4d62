"""Job configuration: a strict, typed TOML document.

Field elements are written as arithmetic expressions in the declared
generator names ("4*w + 4"); unknown keys anywhere are rejected.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigInvalid
from .fields import (
    FieldDescriptor,
    FieldElement,
    extend_field,
    locate_rho,
    make_prime_field,
    make_rationals,
    parse_element,
)

_TOP_KEYS = {"field", "curve", "torsion", "mordell_weil", "mordell_weil_L", "output", "mode"}
_FIELD_KEYS = {"q", "base", "extension", "rho"}
_EXT_KEYS = {"name", "min_poly"}
_CURVE_KEYS = {"A", "B"}
_TORSION_KEYS = {"mode", "extension", "P", "Q"}
_MW_KEYS = {"mode", "points", "complete", "bound"}
_OUTPUT_KEYS = {"path"}
_MODE_KEYS = {"case_override", "lenient", "degree_cap"}


def _check_keys(table: dict, allowed: set, context: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigInvalid(f"unknown keys in [{context}]: {sorted(unknown)}")


class JobConfig:
    """Parsed and semantically validated job description."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigInvalid("top-level structure must be a table")
        _check_keys(raw, _TOP_KEYS, "top level")
        if "field" not in raw or "curve" not in raw:
            raise ConfigInvalid("[field] and [curve] tables are required")
        self.raw = raw
        self.field_spec = raw["field"]
        _check_keys(self.field_spec, _FIELD_KEYS, "field")
        self.curve_spec = raw["curve"]
        _check_keys(self.curve_spec, _CURVE_KEYS, "curve")
        self.torsion_spec = raw.get("torsion")
        if self.torsion_spec is not None:
            _check_keys(self.torsion_spec, _TORSION_KEYS, "torsion")
        self.mw_spec = raw.get("mordell_weil")
        if self.mw_spec is not None:
            _check_keys(self.mw_spec, _MW_KEYS, "mordell_weil")
        self.mw_L_spec = raw.get("mordell_weil_L")
        if self.mw_L_spec is not None:
            _check_keys(self.mw_L_spec, _MW_KEYS, "mordell_weil_L")
        self.output_spec = raw.get("output", {})
        _check_keys(self.output_spec, _OUTPUT_KEYS, "output")
        self.mode_spec = raw.get("mode", {})
        _check_keys(self.mode_spec, _MODE_KEYS, "mode")

    # -- construction of the mathematical objects -------------------------
    def build_base_field(self) -> FieldDescriptor:
        spec = self.field_spec
        q = spec.get("q", 3)
        if not isinstance(q, int) or q < 3 or q % 2 == 0:
            raise ConfigInvalid("q must be an odd prime >= 3")
        base_name = spec.get("base", "QQ")
        if base_name == "QQ":
            field = make_rationals(q)
        elif isinstance(base_name, str) and base_name.startswith("F"):
            try:
                p = int(base_name[1:])
            except ValueError as e:
                raise ConfigInvalid(f"bad base field name {base_name!r}") from e
            field = make_prime_field(p, q, need_rho=False)
        else:
            raise ConfigInvalid(f"base must be 'QQ' or 'F<p>', got {base_name!r}")
        for ext in spec.get("extension", []):
            _check_keys(ext, _EXT_KEYS, "field.extension")
            name = ext.get("name")
            coeffs_raw = ext.get("min_poly")
            if not name or not isinstance(coeffs_raw, list) or len(coeffs_raw) < 2:
                raise ConfigInvalid("extension needs a name and a min_poly list")
            coeffs = [self._parse_in(field, c) for c in coeffs_raw]
            field = extend_field(field, coeffs, name)
        rho_expr = spec.get("rho")
        if rho_expr is not None:
            rho = self._parse_in(field, rho_expr)
            qchk = rho**q
            if not (qchk - 1).is_zero() or (rho - 1).is_zero():
                raise ConfigInvalid("declared rho is not a primitive q-th root of unity")
            field.rho = rho.payload
        else:
            field.rho = locate_rho(field)
        return field

    @staticmethod
    def _parse_in(field: FieldDescriptor, value) -> FieldElement:
        if isinstance(value, bool):
            raise ConfigInvalid(f"boolean is not a field element: {value!r}")
        if isinstance(value, int):
            return FieldElement(field, field.from_int(value))
        if isinstance(value, str):
            try:
                return parse_element(field, value)
            except Exception as e:
                raise ConfigInvalid(f"cannot parse element {value!r}: {e}") from e
        raise ConfigInvalid(f"field elements must be ints or strings, got {value!r}")

    def build_torsion_tower(self, base: FieldDescriptor) -> FieldDescriptor:
        field = base
        if self.torsion_spec:
            for ext in self.torsion_spec.get("extension", []):
                _check_keys(ext, _EXT_KEYS, "torsion.extension")
                coeffs = [self._parse_in(field, c) for c in ext["min_poly"]]
                field = extend_field(field, coeffs, ext["name"])
        return field

    def torsion_mode(self) -> str:
        if self.torsion_spec and "mode" in self.torsion_spec:
            return self.torsion_spec["mode"]
        return "finite-field-auto"

    def parse_point(self, curve, field, pair):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigInvalid(f"a point is a [x, y] list, got {pair!r}")
        x = self._parse_in(field, pair[0])
        y = self._parse_in(field, pair[1])
        return curve.point(x, y, field)

    def mw_source(self, curve, field, spec):
        if spec is None:
            return None
        mode = spec.get("mode", "supplied")
        if mode == "exhaustive":
            return {"mode": "exhaustive"}
        if mode == "search":
            return {"mode": "search", "bound": spec.get("bound", 3)}
        if mode == "supplied":
            pts = [self.parse_point(curve, field, p) for p in spec.get("points", [])]
            return {"mode": "supplied", "points": pts, "complete": bool(spec.get("complete", False))}
        raise ConfigInvalid(f"unknown mordell_weil mode {mode!r}")


def load_config(text: str) -> JobConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigInvalid(f"TOML parse error: {e}") from e
    return JobConfig(raw)


def load_config_file(path: str) -> JobConfig:
    with open(path, "rb") as fh:
        data = fh.read()
    return load_config(data.decode("utf-8"))
