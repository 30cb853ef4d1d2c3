"""JSON Schemas (draft 2020-12) for the ``--json`` output of each CLI command.

The package does not validate against these at run time; they document the
machine interface and the test suite checks every command against them.
"""

from __future__ import annotations

_NUM = {"type": ["number", "null"]}
_STR_LIST = {"type": "array", "items": {"type": "string"}}

_REPORT = {
    "type": "object",
    "required": ["solved_fraction", "par_k", "mcp", "n_instances", "k"],
    "properties": {
        "solved_fraction": _NUM,
        "par_k": _NUM,
        "mcp": _NUM,
        "n_instances": {"type": "integer", "minimum": 0},
        "k": {"type": "number"},
    },
}

_POOLED = {
    "type": "object",
    "required": ["scenario_id", "measure", "k", "solved_fraction", "par10", "mcp", "gap_closed", "vbs", "sbs"],
    "properties": {
        "scenario_id": {"type": "string"},
        "measure": {"type": "string"},
        "k": {"type": "number"},
        "solved_fraction": _NUM,
        "par10": _NUM,
        "mcp": _NUM,
        "gap_closed": _NUM,
        "vbs": _REPORT,
        "sbs": {**_REPORT, "required": _REPORT["required"] + ["algorithm"]},
    },
}

SCHEMAS: dict[str, dict] = {
    "validate": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["severity", "code", "message", "file", "row"],
            "properties": {
                "severity": {"enum": ["error", "warning"]},
                "code": {"type": "string"},
                "message": {"type": "string"},
                "file": {"type": ["string", "null"]},
                "row": {"type": ["integer", "null"]},
            },
        },
    },
    "fetch": {
        "type": "object",
        "required": ["scenario", "path"],
        "properties": {"scenario": {"type": "string"}, "path": {"type": "string"}},
    },
    "summary": {
        "type": "object",
        "required": ["scenario_id", "n_instances", "n_algorithms", "n_features", "n_feature_steps", "cutoff"],
        "properties": {
            "scenario_id": {"type": "string"},
            "n_instances": {"type": "integer"},
            "n_algorithms": {"type": "integer"},
            "n_features": {"type": "integer"},
            "n_feature_steps": {"type": "integer"},
            "cutoff": {"type": "number"},
            "measures": _STR_LIST,
            "default_steps": _STR_LIST,
        },
    },
    "eda": {
        "type": "object",
        "required": ["scenario_id", "measure", "algorithm_summaries", "dominance_pairs", "correlation",
                     "feature_group_summaries", "duplicate_groups"],
        "properties": {
            "algorithm_summaries": {
                "type": "array",
                "items": {"type": "object", "required": ["algorithm", "mean", "sd", "median", "solved_pct",
                                                         "status_counts", "cdf", "box"]},
            },
            "dominance_pairs": {"type": "array", "items": {**_STR_LIST, "minItems": 2, "maxItems": 2}},
            "correlation": {
                "type": ["object", "null"],
                "required": ["algorithms", "rho", "ward_order", "degenerate"],
            },
            "feature_group_summaries": {
                "type": "array",
                "items": {"type": "object", "required": ["step", "n_features", "status_pct", "cost_min", "cost_mean",
                                                         "cost_max", "missing_cost_pct"]},
            },
            "duplicate_groups": {"type": "array", "items": _STR_LIST},
        },
    },
    "evaluate": _POOLED,
    "cv-benchmark": {
        **_POOLED,
        "required": _POOLED["required"] + ["per_fold", "selector"],
        "properties": {
            **_POOLED["properties"],
            "per_fold": {"type": "array", "items": {**_REPORT, "required": _REPORT["required"] + ["fold"]}},
            "selector": {"type": "object", "required": ["approach"]},
        },
    },
    "train": {
        "type": "object",
        "required": ["model", "approach", "mode", "n_instances", "notes"],
        "properties": {"n_instances": {"type": "integer"}, "notes": _STR_LIST},
    },
    "select": {
        "type": "object",
        "additionalProperties": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "prefixItems": [{"type": "string"}, {"type": "number"}], "minItems": 2,
                      "maxItems": 2},
        },
    },
    "forward-select": {
        "type": "object",
        "required": ["kind", "selected", "score_trace", "baseline_score", "reduced_score", "full_size", "reduced_size"],
        "properties": {
            "kind": {"enum": ["algorithms", "features"]},
            "selected": {**_STR_LIST, "minItems": 1},
            "score_trace": {"type": "array", "items": _NUM},
        },
    },
    "score-submission": {
        "type": "object",
        "required": ["solved_fraction", "par10", "mcp"],
        "properties": {"solved_fraction": _NUM, "par10": _NUM, "mcp": _NUM},
    },
    "generate": {
        "type": "object",
        "required": ["directory", "planted_truth", "scenario_id"],
        "properties": {k: {"type": "string"} for k in ("directory", "planted_truth", "scenario_id")},
    },
}
