"""Seeded weight perturbation: derive a second network from a first.

Reproduces the perturbation experiment setup: pick a number of scalar
parameters uniformly among all weights and biases, shift each by a signed
magnitude drawn from a value range (defaults 1e-6 to 1e-1).  Magnitudes are
quantized to exact 9-digit decimals before conversion to rationals so the
perturbed model file stays human-readable and exactness is preserved.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .model import Layer, Network
from .rational import ZERO, format_exact, rat

_QUANTUM_DIGITS = 9
_QUANTUM = rat(1, 10**_QUANTUM_DIGITS)


@dataclass(frozen=True)
class PerturbationSpec:
    count: int
    lo: object = field(default_factory=lambda: rat("0.000001"))
    hi: object = field(default_factory=lambda: rat("0.1"))
    seed: int = 0
    weights_only: bool = False
    log_uniform: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", rat(self.lo))
        object.__setattr__(self, "hi", rat(self.hi))
        if self.count < 0:
            raise ValueError("perturbation count must be non-negative")
        if not ZERO < self.lo <= self.hi:
            raise ValueError("magnitude range must satisfy 0 < lo <= hi")
        if self._quantize_ceil(self.lo) > self._quantize_floor(self.hi):
            raise ValueError(
                f"magnitude range contains no {_QUANTUM_DIGITS}-digit decimal"
            )

    @staticmethod
    def _quantize_floor(value):
        scaled = value / _QUANTUM
        return (scaled.numerator // scaled.denominator) * _QUANTUM

    @staticmethod
    def _quantize_ceil(value):
        scaled = value / _QUANTUM
        return (-((-scaled.numerator) // scaled.denominator)) * _QUANTUM


@dataclass(frozen=True)
class ChangeRecord:
    layer: int  # 1-based
    kind: str  # "weight" | "bias"
    row: int  # 1-based; 0 for biases
    col: int  # 1-based
    old: object
    new: object

    def to_json(self) -> dict:
        return {
            "layer": self.layer,
            "kind": self.kind,
            "row": self.row,
            "col": self.col,
            "old": format_exact(self.old),
            "new": format_exact(self.new),
        }


def _positions(net: Network, weights_only: bool):
    positions = []
    for l, layer in enumerate(net.layers, start=1):
        for r, row in enumerate(layer.weights, start=1):
            for c in range(1, len(row) + 1):
                positions.append((l, "weight", r, c))
        if not weights_only:
            for c in range(1, len(layer.biases) + 1):
                positions.append((l, "bias", 0, c))
    return positions


def _draw_magnitude(rng: random.Random, spec: PerturbationSpec):
    lo_f, hi_f = float(spec.lo), float(spec.hi)
    if spec.log_uniform:
        u = math.exp(rng.uniform(math.log(lo_f), math.log(hi_f)))
    else:
        u = rng.uniform(lo_f, hi_f)
    magnitude = rat(f"{u:.{_QUANTUM_DIGITS}f}")
    lo_q = PerturbationSpec._quantize_ceil(spec.lo)
    hi_q = PerturbationSpec._quantize_floor(spec.hi)
    return min(max(magnitude, lo_q), hi_q)


def perturb(net: Network, spec: PerturbationSpec):
    """Deep copy of ``net`` with exactly ``spec.count`` distinct scalar
    parameters changed; returns ``(network, changelog)``.

    The same (net, spec) pair always produces the same output; the changelog
    is ordered by parameter position.
    """
    positions = _positions(net, spec.weights_only)
    if spec.count > len(positions):
        raise ValueError(
            f"cannot perturb {spec.count} parameters, only {len(positions)} eligible"
        )
    rng = random.Random(spec.seed)
    chosen = rng.sample(positions, spec.count)
    deltas = {}
    for position in chosen:
        sign = rng.choice((1, -1))
        deltas[position] = sign * _draw_magnitude(rng, spec)

    changelog = []
    new_layers = []
    for l, layer in enumerate(net.layers, start=1):
        weights = [list(row) for row in layer.weights]
        biases = list(layer.biases)
        for r in range(1, len(weights) + 1):
            for c in range(1, len(weights[r - 1]) + 1):
                delta = deltas.get((l, "weight", r, c))
                if delta is not None:
                    old = weights[r - 1][c - 1]
                    weights[r - 1][c - 1] = old + delta
                    changelog.append(
                        ChangeRecord(l, "weight", r, c, old, weights[r - 1][c - 1])
                    )
        for c in range(1, len(biases) + 1):
            delta = deltas.get((l, "bias", 0, c))
            if delta is not None:
                old = biases[c - 1]
                biases[c - 1] = old + delta
                changelog.append(ChangeRecord(l, "bias", 0, c, old, biases[c - 1]))
        new_layers.append(
            Layer(
                weights=tuple(tuple(row) for row in weights),
                biases=tuple(biases),
                activation=layer.activation,
            )
        )
    perturbed = Network(
        name=f"{net.name}_pert",
        input_dim=net.input_dim,
        layers=tuple(new_layers),
        input_bounds=net.input_bounds,
        output_scale=net.output_scale,
    )
    return perturbed, changelog
