"""JSON schemas for the machine-readable reports the CLI emits.

Each schema is a plain dict (shipped with the package, importable without
any validator installed); :func:`validate` checks a payload against one
when the optional ``jsonschema`` package is available.
"""

__all__ = ["SCHEMAS", "validate"]

_PAIR = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

_PAIR_OR_NULL = {"oneOf": [_PAIR, {"type": "null"}]}

CLASSIFY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "endpoint classification report",
    "type": "object",
    "required": ["nu_a", "nu_b", "dim_Ua", "dim_Ub", "lambda", "evidence"],
    "properties": {
        "nu_a": {"enum": [0, 2]},
        "nu_b": {"enum": [0, 2]},
        "dim_Ua": {"type": "integer", "minimum": 0, "maximum": 2},
        "dim_Ub": {"type": "integer", "minimum": 0, "maximum": 2},
        "lambda": _PAIR,
        "evidence": {"type": "array", "items": {"type": "object"}},
    },
}

SPECTRUM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "eigenvalue list",
    "type": "array",
    "items": {
        "type": "object",
        "required": ["lambda", "residual", "multiplicity"],
        "properties": {
            "lambda": _PAIR,
            "residual": {"type": "number", "minimum": 0},
            "multiplicity": {"type": "integer", "minimum": 1},
            "oracle_lambda": _PAIR,
            "oracle_rel_error": {"type": "number", "minimum": 0},
        },
    },
}

WEYL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "nested-disk trichotomy report",
    "type": "object",
    "required": ["case", "lambda", "limit_radius", "cutoffs", "radii",
                 "centers", "flags"],
    "properties": {
        "case": {"enum": ["limit_circle", "limit_point",
                          "limit_point_one_L2", "limit_point_all_L2"]},
        "lambda": _PAIR,
        "limit_radius": {"type": "number", "minimum": 0},
        "m_estimate": _PAIR_OR_NULL,
        "cutoffs": {"type": "array", "items": {"type": "number"}},
        "radii": {"type": "array", "items": {"type": "number"}},
        "centers": {"type": "array", "items": _PAIR},
        "dim_L2": {"oneOf": [{"type": "integer", "minimum": 0,
                              "maximum": 2}, {"type": "null"}]},
        "flags": {"type": "array", "items": {"type": "string"}},
        "evidence": {"type": "object"},
    },
}

DISSIPATIVITY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dissipativity certificate",
    "type": "object",
    "required": ["certified", "maximal", "reasons", "max_im_V", "details"],
    "properties": {
        "certified": {"type": "boolean"},
        "maximal": {"type": "boolean"},
        "reasons": {"type": "array", "items": {"type": "string"}},
        "max_im_V": {"oneOf": [{"type": "number"}, {"type": "null"}]},
        "details": {"type": "object"},
    },
}

ORACLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "finite-difference oracle report",
    "type": "object",
    "required": ["n", "h", "window", "flags", "eigenvalues"],
    "properties": {
        "n": {"type": "integer", "minimum": 8},
        "h": {"type": "number", "exclusiveMinimum": 0},
        "window": _PAIR,
        "flags": {"type": "array", "items": {"type": "string"}},
        "eigenvalues": {"type": "array", "items": _PAIR},
        "richardson": {"type": "array", "items": _PAIR},
        "numerical_range": {"type": "array", "items": _PAIR},
    },
}

SCHEMAS = {
    "classify": CLASSIFY_SCHEMA,
    "spectrum": SPECTRUM_SCHEMA,
    "weyl": WEYL_SCHEMA,
    "dissipativity": DISSIPATIVITY_SCHEMA,
    "oracle": ORACLE_SCHEMA,
}


def validate(kind, payload):
    """Validate ``payload`` against the shipped schema named ``kind``.

    Raises ``KeyError`` for an unknown kind and the validator's own error
    for nonconforming payloads. Needs the ``jsonschema`` package (a test
    dependency), imported lazily so the runtime package does not require
    it.
    """
    import jsonschema

    jsonschema.validate(payload, SCHEMAS[kind])
