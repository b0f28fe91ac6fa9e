"""JSON and DOT serialization of graph results."""

from __future__ import annotations

import json

import numpy as np

from .graph import CausalGraphResult

_MATRICES = ("I", "H", "G", "G_nor")


def result_to_dict(result: CausalGraphResult) -> dict:
    edges = sorted(result.edges(), key=lambda e: (e[0], e[1]))
    out = {
        "node_ids": list(result.node_ids),
        "depth": int(result.depth),
        "estimator": result.estimator,
        "alpha": float(result.alpha),
    }
    for name in _MATRICES:
        out[name] = np.asarray(getattr(result, name), dtype=np.float64).tolist()
    out["edges"] = [[a, b, float(w)] for a, b, w in edges]
    return out


def result_from_dict(data: dict) -> CausalGraphResult:
    try:
        node_ids = [str(v) for v in data["node_ids"]]
        mats = {name: np.asarray(data[name], dtype=np.float64) for name in _MATRICES}
        depth, estimator, alpha = int(data["depth"]), str(data["estimator"]), float(data["alpha"])
        edges = data["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed result document: {exc}") from None
    M = len(node_ids)
    for name, mat in mats.items():
        if mat.shape != (M, M):
            raise ValueError(f"matrix {name} has shape {mat.shape}, expected ({M}, {M})")
    index = {v: j for j, v in enumerate(node_ids)}
    adjacency = np.zeros((M, M), dtype=bool)
    for edge in edges:
        a, b = str(edge[0]), str(edge[1])
        if a not in index or b not in index:
            raise ValueError(f"edge {a}->{b} names an unknown node")
        adjacency[index[a], index[b]] = True
    return CausalGraphResult(node_ids, depth, estimator, alpha, mats["I"], mats["H"],
                             mats["G"], mats["G_nor"], adjacency)


def dumps_result(result: CausalGraphResult) -> str:
    return json.dumps(result_to_dict(result), indent=2, sort_keys=True) + "\n"


def loads_result(text: str) -> CausalGraphResult:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    return result_from_dict(data)


def _quote(node_id: str) -> str:
    if node_id.isidentifier():
        return node_id
    return json.dumps(node_id)


def export_dot(result: CausalGraphResult) -> str:
    """One ``digraph`` with nodes and edges in lexicographic order."""
    lines = ["digraph DIG {"]
    for node in sorted(result.node_ids):
        lines.append(f"  {_quote(node)}")
    for a, b, w in sorted(result.edges(), key=lambda e: (e[0], e[1])):
        lines.append(f'  {_quote(a)} -> {_quote(b)} [label="{w:.2f}"]')
    lines.append("}")
    return "\n".join(lines) + "\n"
