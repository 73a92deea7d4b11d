"""JSON Schemas (draft 2020-12) for the reports written by the command-line tool."""

_number = {"type": "number"}
_matrix = {"type": "array", "items": {"type": "array", "items": _number}}
_coords = {"type": ["array", "null"], "items": _number}

_sphere = {
    "type": "object",
    "required": ["u", "v", "mult"],
    "properties": {"u": _number, "v": {"type": "number", "minimum": 0}, "mult": {"type": "integer", "minimum": 1}},
    "additionalProperties": False,
}

SPECTRUM = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "spectrum report",
    "type": "object",
    "required": ["source", "spheres", "norm_bound", "norm_bound_ok"],
    "properties": {
        "source": {"enum": ["S", "F"]},
        "spheres": {"type": "array", "items": _sphere, "minItems": 1},
        "norm_bound": {"type": "number", "minimum": 0},
        "norm_bound_ok": {"type": "boolean"},
        "f_spectrum": {"type": "array", "items": _sphere},
    },
    "additionalProperties": False,
}

VERIFY_RECORD = {
    "type": "object",
    "required": ["instance", "seed", "n", "d", "identity", "s", "p", "cond", "scale", "residual", "tolerance", "pass"],
    "properties": {
        "instance": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "n": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1},
        "identity": {"type": "string"},
        "s": _coords,
        "p": _coords,
        "cond": {"type": ["number", "null"]},
        "scale": {"type": ["number", "null"]},
        "residual": {"type": "number", "minimum": 0},
        "tolerance": {"type": "number", "minimum": 0},
        "pass": {"type": "boolean"},
    },
    "additionalProperties": False,
}

VERIFY = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "verification report",
    "type": "object",
    "required": ["seed", "instances", "nodes", "records", "failures", "passed"],
    "properties": {
        "seed": {"type": "integer"},
        "instances": {"type": "integer", "minimum": 0},
        "nodes": {"type": "integer", "minimum": 2},
        "records": {"type": "array", "items": VERIFY_RECORD},
        "failures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["instance", "identity"],
                "properties": {"instance": {"type": "integer"}, "identity": {"type": "string"}},
            },
        },
        "passed": {"type": "boolean"},
    },
    "additionalProperties": False,
}

FUNCALC = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "functional calculus report",
    "type": "object",
    "required": ["value", "err_estimate", "nodes", "side", "contour", "function"],
    "properties": {
        "value": _matrix,
        "err_estimate": {"type": "number", "minimum": 0},
        "nodes": {"type": "integer", "minimum": 2},
        "side": {"enum": ["left", "right"]},
        "contour": {
            "type": "object",
            "required": ["I", "nodes_per_circle", "circles"],
            "properties": {
                "I": {"type": "array", "items": _number},
                "nodes_per_circle": {"type": "integer"},
                "circles": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["center", "radius"],
                        "properties": {
                            "center": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
                            "radius": {"type": "number", "exclusiveMinimum": 0},
                            "sphere": {"type": "integer"},
                        },
                    },
                },
            },
        },
        "function": {"type": "object", "required": ["kind"]},
    },
    "additionalProperties": False,
}

RIESZ = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "spectral projector report",
    "type": "object",
    "required": ["subset", "spectrum", "P", "T_part", "residuals"],
    "properties": {
        "subset": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "spectrum": {"type": "array", "items": _sphere},
        "P": _matrix,
        "T_part": _matrix,
        "residuals": {
            "type": "object",
            "required": ["idempotent", "commutes", "restriction"],
            "additionalProperties": {"type": "number", "minimum": 0},
        },
    },
    "additionalProperties": False,
}

LAPLACE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Laplace resolvent report",
    "type": "object",
    "required": ["scalar", "side", "value", "closed_form_gap"],
    "properties": {
        "scalar": {"type": "array", "items": _number},
        "side": {"enum": ["left", "right"]},
        "value": _matrix,
        "closed_form_gap": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

OPERATOR = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "operator input",
    "type": "object",
    "required": ["d", "components"],
    "properties": {
        "kind": {"enum": ["clifford", "quaternion"]},
        "n": {"type": "integer", "minimum": 1, "maximum": 5},
        "d": {"type": "integer", "minimum": 1},
        "components": {"type": "array", "items": _matrix, "minItems": 2},
    },
}

REPORTS = {"spectrum": SPECTRUM, "verify": VERIFY, "funcalc": FUNCALC, "riesz": RIESZ, "laplace": LAPLACE}
