"""Exact forward execution and the pointwise equivalence predicates.

This is the ground-truth side of the pipeline: solver models are certified
by replaying the input through both networks here, with the same exact
rational arithmetic the encoder used.  Replay deliberately accepts inputs
outside the declared bounds so that bogus solver models are detected rather
than masked.

All functions are pure; vector indices are 1-based in every contract.
"""

from __future__ import annotations

from .model import Activation, Network
from .rational import ONE, ZERO, format_exact
from .relations import EquivalenceRelation


def apply_activation(activation: Activation, value):
    if activation is Activation.RELU:
        return value if value >= ZERO else ZERO
    if activation is Activation.HARDTANH:
        if value > ONE:
            return ONE
        if value < -ONE:
            return -ONE
        return value
    return value


def forward_trace(net: Network, x):
    """Layer-by-layer execution; returns ``(trace, y)`` where ``trace`` holds
    one ``(z, h)`` pair per layer and ``y`` is the post-scale output."""
    if len(x) != net.input_dim:
        raise ValueError(f"input has {len(x)} features, network expects {net.input_dim}")
    trace = []
    current = tuple(x)
    for layer in net.layers:
        z = []
        for j in range(layer.cols):
            acc = layer.biases[j]
            for k, value in enumerate(current):
                acc = acc + value * layer.weights[k][j]
            z.append(acc)
        h = tuple(apply_activation(layer.activation, v) for v in z)
        trace.append((tuple(z), h))
        current = h
    if net.output_scale is not None:
        current = tuple(net.output_scale * v for v in current)
    return trace, current


def forward(net: Network, x):
    """Exact network output for an input vector."""
    return forward_trace(net, x)[1]


def argmax(y) -> int:
    """1-based index of the maximum; ties resolve to the lowest index."""
    if not y:
        raise ValueError("argmax of an empty vector")
    best = 0
    for i in range(1, len(y)):
        if y[i] > y[best]:
            best = i
    return best + 1


def argsort(y):
    """Permutation of 1..m sorting ``y`` in decreasing order; equal values
    keep ascending index order (deterministic tie rule)."""
    if not y:
        raise ValueError("argsort of an empty vector")
    # Stable sort over ascending indices preserves the tie rule.
    return tuple(sorted(range(1, len(y) + 1), key=lambda i: y[i - 1], reverse=True))


def l1_distance(y, y2):
    _check_same_length(y, y2)
    total = ZERO
    for a, b in zip(y, y2):
        total = total + abs(a - b)
    return total


def linf_distance(y, y2):
    _check_same_length(y, y2)
    return max(abs(a - b) for a, b in zip(y, y2))


def distance(p, y, y2):
    """Lp output distance for p in {1, inf} (the scalar cases coincide)."""
    if p == 1:
        return l1_distance(y, y2)
    if p in ("inf", float("inf")):
        return linf_distance(y, y2)
    raise ValueError(f"unsupported norm order {p!r}")


def _check_same_length(y, y2):
    if len(y) != len(y2):
        raise ValueError(f"vector lengths differ: {len(y)} vs {len(y2)}")


def relation_violated_at(relation: EquivalenceRelation, y, y2):
    """Decide whether an output pair violates the relation at one point.

    Returns ``(violated, witness)`` where ``witness`` names the violating
    coordinate or argsort position (None when not violated).
    """
    _check_same_length(y, y2)
    m = len(y)
    tag = relation.tag
    if tag == "strict":
        for i, (a, b) in enumerate(zip(y, y2), start=1):
            if a != b:
                return True, (
                    f"outputs differ at coordinate {i}:"
                    f" {format_exact(a)} vs {format_exact(b)}"
                )
        return False, None
    if tag in ("l1", "linf"):
        if relation.epsilon is None or not relation.epsilon > ZERO:
            raise ValueError(f"{tag} relation requires epsilon > 0")
        if tag == "l1":
            d = l1_distance(y, y2)
            if d >= relation.epsilon:
                return True, (
                    f"L1 distance {format_exact(d)} >="
                    f" epsilon {format_exact(relation.epsilon)}"
                )
            return False, None
        d = linf_distance(y, y2)
        if d >= relation.epsilon:
            worst = max(range(m), key=lambda i: abs(y[i] - y2[i])) + 1
            return True, (
                f"Linf distance {format_exact(d)} >="
                f" epsilon {format_exact(relation.epsilon)} at coordinate {worst}"
            )
        return False, None
    if tag == "argmax":
        ia, ib = argmax(y), argmax(y2)
        if ia != ib:
            return True, f"argmax differs: {ia} vs {ib}"
        return False, None
    if tag == "topk":
        if not 1 <= relation.k <= m:
            raise ValueError(f"topk requires 1 <= k <= m, got k={relation.k} with m={m}")
        sa, sb = argsort(y), argsort(y2)
        for p in range(relation.k):
            if sa[p] != sb[p]:
                return True, (
                    f"argsort differs at position {p + 1}: index {sa[p]} vs {sb[p]}"
                )
        return False, None
    raise ValueError(f"unknown relation tag {tag!r}")
