"""Seeded synthetic graphs with matching prototype classifiers.

Each class gets a prototype feature direction; node features are a noisy
copy of their class prototype. The companion model projects aggregated
features onto the prototypes in its first layer and passes the resulting
class evidence through an identity second layer, so a node surrounded by
class-c features predicts class c.
"""

from __future__ import annotations

import numpy as np

from .gcn import Model
from .graph import Graph, build_graph

KINDS = ("chain", "star", "planted-motif", "erdos")


def _prototypes(class_count: int, feature_dim: int, seed: int) -> np.ndarray:
    if class_count < 2:
        raise ValueError("class_count must be at least 2")
    if feature_dim < class_count:
        raise ValueError("feature_dim must be at least class_count")
    if feature_dim == class_count:
        return np.eye(feature_dim)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    q, _ = np.linalg.qr(rng.standard_normal((feature_dim, feature_dim)))
    return q[:, :class_count]


def prototype_model(class_count: int, feature_dim: int | None = None, seed: int = 0) -> Model:
    """Two-layer classifier matched to prototype features."""
    dim = class_count if feature_dim is None else feature_dim
    protos = _prototypes(class_count, dim, seed)
    return Model(layers=(protos, np.eye(class_count)), activation="relu", self_loop=True)


def _features(labels, protos, scales, noise, rng):
    dim = protos.shape[0]
    rows = []
    for lbl, scale in zip(labels, scales):
        rows.append(scale * protos[:, lbl] + noise * rng.standard_normal(dim))
    return rows


def _check_params(params, allowed, kind):
    unknown = set(params) - set(allowed)
    if unknown:
        raise ValueError(f"bad params for kind {kind!r}: {sorted(unknown)}")


def synth_graph(kind: str, params: dict | None = None, seed: int = 0):
    """Build a named graph family member plus its companion model.

    Kinds and their params (all optional):

    - ``chain``: nodes, classes, noise, scale. Path graph, classes alternate
      along the path.
    - ``star``: leaves, classes, noise, scale. Center is node 0, class 0;
      leaf classes cycle through the remaining classes.
    - ``planted-motif``: background, classes, noise. Node 0 is the target
      with weak features; nodes 1-3 form a strongly class-0 motif tree that
      determines its prediction; background nodes carry other classes and
      attach at random.
    - ``erdos``: nodes, p, classes, noise, scale, max_degree. Independent
      edges with probability p; max_degree (if set) drops excess edges in
      canonical order.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind: {kind!r}")
    params = dict(params or {})
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))

    if kind == "chain":
        _check_params(params, {"nodes", "classes", "noise", "scale"}, kind)
        n = int(params.get("nodes", 4))
        classes = int(params.get("classes", 2))
        noise = float(params.get("noise", 0.05))
        scale = float(params.get("scale", 1.0))
        if n < 2:
            raise ValueError("chain needs at least 2 nodes")
        labels = [i % classes for i in range(n)]
        edges = [(i, i + 1) for i in range(n - 1)]
        scales = [scale] * n

    elif kind == "star":
        _check_params(params, {"leaves", "classes", "noise", "scale"}, kind)
        leaves = int(params.get("leaves", 3))
        classes = int(params.get("classes", 2))
        noise = float(params.get("noise", 0.05))
        scale = float(params.get("scale", 1.0))
        if leaves < 1:
            raise ValueError("star needs at least 1 leaf")
        labels = [0] + [(1 + i) % classes for i in range(leaves)]
        edges = [(0, i + 1) for i in range(leaves)]
        scales = [scale] * (leaves + 1)

    elif kind == "planted-motif":
        _check_params(params, {"background", "classes", "noise"}, kind)
        background = int(params.get("background", 6))
        classes = int(params.get("classes", 3))
        noise = float(params.get("noise", 0.05))
        if classes < 2:
            raise ValueError("planted-motif needs at least 2 classes")
        n = 4 + background
        labels = [0, 0, 0, 0] + [1 + i % (classes - 1) for i in range(background)]
        edges = [(0, 1), (0, 2), (1, 3)]
        for b in range(background):
            node = 4 + b
            anchor = int(rng.integers(0, node)) if b else 0
            edges.append((anchor, node))
        scales = [0.2, 1.6, 1.6, 1.6] + [0.9] * background

    else:
        _check_params(params, {"nodes", "p", "classes", "noise", "scale", "max_degree"}, kind)
        n = int(params.get("nodes", 30))
        p = float(params.get("p", 0.1))
        classes = int(params.get("classes", 3))
        noise = float(params.get("noise", 0.05))
        scale = float(params.get("scale", 1.0))
        cap = params.get("max_degree")
        if n < 1:
            raise ValueError("erdos needs at least 1 node")
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        labels = [int(c) for c in rng.integers(0, classes, size=n)]
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        if cap is not None:
            cap = int(cap)
            degree = [0] * n
            kept = []
            for u, w in sorted(edges):
                if degree[u] < cap and degree[w] < cap:
                    kept.append((u, w))
                    degree[u] += 1
                    degree[w] += 1
            edges = kept
        scales = [scale] * n

    protos = _prototypes(classes, classes, seed)
    feats = _features(labels, protos, scales, noise, rng)
    graph = build_graph(feats, edges, labels)
    model = prototype_model(classes, seed=seed)
    return graph, model
