"""JSON schemas for the reports written by the command line."""

_num = {"type": "number"}
_num_or_null = {"type": ["number", "null"]}
_int = {"type": "integer"}
_bool = {"type": "boolean"}


def _obj(props: dict, required=None) -> dict:
    return {"type": "object", "properties": props,
            "required": list(props) if required is None else required,
            "additionalProperties": False}


def _arr(items: dict) -> dict:
    return {"type": "array", "items": items}


_graph = _obj({"sigma": _num, "sigma0": _num_or_null, "knn": {"type": ["integer", "null"]},
               "kde_neighbors": {"type": ["integer", "null"]}, "m": {"type": ["integer", "null"]}})

CLUSTER_SIDECAR = _obj({
    "n": _int,
    "t": _num,
    "K": _int,
    "mode_indices": _arr(_int),
    "score_curve": _arr(_num),
    "graph": _graph,
})

MLUND_REPORT = _obj({
    "n": _int,
    "beta": _num,
    "tau": _num,
    "lambda2": _num,
    "pi_min": _num,
    "T": _int,
    "times": _arr(_num),
    "K_t": _arr(_int),
    "J": _arr(_int),
    "total_vi": {"type": "object", "additionalProperties": _num},
    "labels_paths": _arr({"type": "string"}),
    "optimal": {"oneOf": [{"type": "null"},
                          _obj({"time": _num, "index": _int, "K": _int, "labels_path": {"type": "string"}})]},
    "graph": _graph,
})

_interval = _obj({"epsilon": _num, "lower": _num_or_null, "upper": _num_or_null, "empty": _bool})
_meyer = _obj({"t": _num, "lhs": _num, "rhs": _num_or_null, "holds": _bool})
_bounds = _obj({
    "t": _num, "gamma": _num, "in_upper": _num_or_null, "btw_lower": _num_or_null,
    "s_inf_min_norm": _num, "measured_in": _num, "measured_btw": _num,
    "in_holds": _bool, "btw_holds": _bool,
    "in_upper_weighted": _num_or_null, "btw_lower_weighted": _num_or_null, "weighted_holds": _bool,
})

MELD_REPORT = _obj({
    "n": _int,
    "epsilons": _arr(_num),
    "times": _arr(_num),
    "clusterings": _arr(_obj({
        "labels_path": {"type": "string"},
        "K": _int,
        "constants": _obj({"lambda_next": _num, "delta": _num, "kappa": _num_or_null}),
        "interval_curve": _arr(_interval),
        "gamma": _arr(_obj({"t": _num, "gamma": _num})),
        "meyer": _arr(_meyer),
        "bounds": _arr(_bounds),
    })),
    "overlaps": _arr(_obj({"a": _int, "b": _int, "overlap": _bool, "epsilons": _arr(_num)})),
    "graph": _graph,
})
