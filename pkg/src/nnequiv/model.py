"""Network representation, model file format, and structural validation.

A network is a layered description of a trained feedforward net: weight
matrices in ``x . W`` orientation (rows = source nodes, columns = destination
nodes), bias vectors, per-layer activations, optional per-feature input
bounds, and an optional scalar output scale applied after the final
activation.  All coefficients are exact rationals parsed from decimal text.

Networks are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

from .rational import format_exact, rat


class ModelError(Exception):
    """Base class for model loading failures."""


class ModelFormatError(ModelError):
    """The document is not well-formed model text."""


class ModelValidationError(ModelError):
    """The document parsed but breaks a structural invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class Activation(enum.Enum):
    RELU = "relu"
    HARDTANH = "hardtanh"
    LINEAR = "linear"


# (lo, hi) closed interval, or None for an unconstrained feature.
Bound = Optional[tuple]


@dataclass(frozen=True)
class Layer:
    weights: tuple  # tuple of row tuples of rationals
    biases: tuple
    activation: Activation

    @property
    def rows(self) -> int:
        return len(self.weights)

    @property
    def cols(self) -> int:
        return len(self.biases)


@dataclass(frozen=True)
class Network:
    name: str
    input_dim: int
    layers: tuple
    input_bounds: tuple = field(default=())  # per-feature Bound, len == input_dim
    output_scale: Optional[object] = None  # rational or None

    @property
    def output_dim(self) -> int:
        return len(self.layers[-1].biases) if self.layers else 0


def validate(net: Network) -> list:
    """Report every structural invariant breach (empty list means valid).

    Violations are data, not failures; indices in the messages are 1-based.
    """
    violations = []
    if net.input_dim < 1:
        violations.append(f"input_dim must be positive, got {net.input_dim}")
    if not net.layers:
        violations.append("network must have at least one layer")
    prev_cols = net.input_dim
    for idx, layer in enumerate(net.layers, start=1):
        widths = {len(row) for row in layer.weights}
        if len(widths) > 1:
            violations.append(f"layer {idx}: weight rows have unequal lengths {sorted(widths)}")
        cols = widths.pop() if len(widths) == 1 else None
        if layer.rows != prev_cols:
            violations.append(
                f"layer {idx}: expected {prev_cols} weight rows, got {layer.rows}"
            )
        if cols is not None and cols != len(layer.biases):
            violations.append(
                f"layer {idx}: bias length {len(layer.biases)} does not match"
                f" weight column count {cols}"
            )
        prev_cols = len(layer.biases)
    if len(net.input_bounds) != net.input_dim:
        violations.append(
            f"input_bounds has {len(net.input_bounds)} entries, expected {net.input_dim}"
        )
    for j, bound in enumerate(net.input_bounds, start=1):
        if bound is not None and bound[0] > bound[1]:
            violations.append(
                f"feature {j}: lower bound {format_exact(bound[0])} exceeds"
                f" upper bound {format_exact(bound[1])}"
            )
    return violations


def param_count(net: Network) -> int:
    """Number of scalar parameters: every weight entry plus every bias."""
    return sum(sum(len(row) for row in layer.weights) + len(layer.biases) for layer in net.layers)


def _parse_number(value, where: str):
    if isinstance(value, (str, int)):
        try:
            return rat(value)
        except (ValueError, TypeError) as exc:
            raise ModelFormatError(f"{where}: {exc}") from exc
    raise ModelFormatError(f"{where}: expected a number or numeric string, got {type(value).__name__}")


def _parse_activation(value, where: str) -> Activation:
    if not isinstance(value, str):
        raise ModelFormatError(f"{where}: activation must be a string")
    try:
        return Activation(value.lower())
    except ValueError:
        supported = ", ".join(a.value for a in Activation)
        raise ModelFormatError(
            f"{where}: unsupported activation {value!r} (supported: {supported})"
        ) from None


def load_network(text: str) -> Network:
    """Parse and validate a model document.

    Equivalent to parse-then-``validate``; raises ``ModelFormatError`` on
    malformed documents and ``ModelValidationError`` on shape breaches.
    JSON float literals are re-read from their decimal text (via the
    ``parse_float`` hook), never from a binary float value.
    """
    try:
        doc = json.loads(
            text,
            parse_float=str,
            parse_int=int,
            parse_constant=_reject_json_constant,
        )
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("top-level value must be an object")

    name = doc.get("name")
    if not isinstance(name, str):
        raise ModelFormatError("'name' must be a string")
    inputs = doc.get("inputs")
    if not isinstance(inputs, int) or isinstance(inputs, bool):
        raise ModelFormatError("'inputs' must be an integer")

    raw_layers = doc.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ModelFormatError("'layers' must be a non-empty array")
    layers = []
    for idx, raw in enumerate(raw_layers, start=1):
        if not isinstance(raw, dict):
            raise ModelFormatError(f"layer {idx}: must be an object")
        raw_weights = raw.get("weights")
        if not isinstance(raw_weights, list) or not raw_weights:
            raise ModelFormatError(f"layer {idx}: 'weights' must be a non-empty array of rows")
        weights = []
        for r, row in enumerate(raw_weights, start=1):
            if not isinstance(row, list):
                raise ModelFormatError(f"layer {idx}: weight row {r} must be an array")
            weights.append(
                tuple(_parse_number(v, f"layer {idx} weights[{r}]") for v in row)
            )
        raw_biases = raw.get("biases")
        if not isinstance(raw_biases, list):
            raise ModelFormatError(f"layer {idx}: 'biases' must be an array")
        biases = tuple(_parse_number(v, f"layer {idx} biases") for v in raw_biases)
        activation = _parse_activation(raw.get("activation"), f"layer {idx}")
        layers.append(Layer(weights=tuple(weights), biases=biases, activation=activation))

    raw_bounds = doc.get("input_bounds")
    if raw_bounds is None:
        bounds = tuple(None for _ in range(inputs))
    elif isinstance(raw_bounds, list):
        bounds = []
        for j, entry in enumerate(raw_bounds, start=1):
            if entry is None:
                bounds.append(None)
            elif isinstance(entry, list) and len(entry) == 2:
                lo = _parse_number(entry[0], f"input_bounds[{j}] lower")
                hi = _parse_number(entry[1], f"input_bounds[{j}] upper")
                bounds.append((lo, hi))
            else:
                raise ModelFormatError(
                    f"input_bounds[{j}]: expected null or a 2-element array"
                )
        bounds = tuple(bounds)
    else:
        raise ModelFormatError("'input_bounds' must be null or an array")

    raw_scale = doc.get("output_scale")
    scale = None if raw_scale is None else _parse_number(raw_scale, "output_scale")

    net = Network(
        name=name,
        input_dim=inputs,
        layers=tuple(layers),
        input_bounds=bounds,
        output_scale=scale,
    )
    violations = validate(net)
    if violations:
        raise ModelValidationError(violations)
    return net


def _reject_json_constant(name):
    raise ModelFormatError(f"non-finite JSON constant {name!r} is not a valid coefficient")


def serialize_network(net: Network) -> str:
    """Render a network back to model-file text, all values as exact strings.

    ``load_network(serialize_network(net))`` reproduces the network
    field-for-field with exact rational equality.
    """
    doc = {
        "name": net.name,
        "inputs": net.input_dim,
        "input_bounds": [
            None if b is None else [format_exact(b[0]), format_exact(b[1])]
            for b in net.input_bounds
        ],
        "layers": [
            {
                "weights": [[format_exact(w) for w in row] for row in layer.weights],
                "biases": [format_exact(b) for b in layer.biases],
                "activation": layer.activation.value,
            }
            for layer in net.layers
        ],
    }
    if net.output_scale is not None:
        doc["output_scale"] = format_exact(net.output_scale)
    return json.dumps(doc, indent=2) + "\n"


def load_network_file(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return load_network(fh.read())


def within_bounds(net: Network, x) -> bool:
    """True when every bounded feature of ``x`` lies inside its interval."""
    if len(x) != net.input_dim:
        raise ValueError(f"input has {len(x)} features, network expects {net.input_dim}")
    for value, bound in zip(x, net.input_bounds):
        if bound is not None and not (bound[0] <= value <= bound[1]):
            return False
    return True
