"""Compiles one network into linear-real-arithmetic constraints.

Per layer the encoding introduces pre-activation variables ``z`` constrained
by the affine transform, then post-activation variables ``h`` constrained by
a disjunctive case split (ReLU: two cases, hard tanh: three).  The final
layer writes into the ``y`` output variables directly; a scalar output scale
is folded into the last affine equalities when the output layer is linear,
and otherwise becomes one scale equality per output.

Input-bound constraints are deliberately not part of a network's encoding:
the query builder asserts them once over the shared input variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Cmp, Const, Ite, Or, Scale, Var, make_and, make_sum
from .model import Activation, Layer, Network
from .rational import ONE, ZERO

# Activation emission modes: the disjunctive case-split form is the default;
# the if-then-else form is semantically identical and kept behind a flag for
# solvers that digest ite terms better.
ENCODING_MODES = ("case-split", "ite")


class VariableNamer:
    """Produces the variable names for one network's encoding.

    Input names are shared between the two networks of a query and therefore
    carry no prefix; everything else is prefixed by the network's role tag.
    Every name handed out is recorded so the query builder can declare the
    full set in creation order.
    """

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.issued = []
        self._aux_count = 0

    @staticmethod
    def input_name(j: int) -> str:
        return f"x{j}"

    def _issue(self, name: str) -> str:
        self.issued.append(name)
        return name

    def z(self, layer: int, j: int) -> str:
        return self._issue(f"{self.prefix}_l{layer}_z{j}")

    def h(self, layer: int, j: int) -> str:
        return self._issue(f"{self.prefix}_l{layer}_h{j}")

    def y(self, i: int) -> str:
        return self._issue(f"{self.prefix}_y{i}")

    def aux(self) -> str:
        self._aux_count += 1
        return self._issue(f"{self.prefix}_aux{self._aux_count}")


def _coeff_term(coeff, var_name: str):
    if coeff == ONE:
        return Var(var_name)
    return Scale(coeff, Var(var_name))


def _affine_rhs(in_vars, column, bias):
    terms = [
        _coeff_term(w, v) for v, w in zip(in_vars, column) if w != ZERO
    ]
    if bias != ZERO or not terms:
        terms.append(Const(bias))
    return make_sum(terms)


def encode_input_bounds(bounds, input_vars):
    """Conjunction of ``l <= x`` and ``x <= u`` for every bounded feature;
    the true constant when nothing is bounded."""
    conjuncts = []
    for var, bound in zip(input_vars, bounds):
        if bound is None:
            continue
        lo, hi = bound
        conjuncts.append(Cmp(Const(lo), "<=", Var(var)))
        conjuncts.append(Cmp(Var(var), "<=", Const(hi)))
    return make_and(conjuncts)


def encode_affine(layer: Layer, in_vars, out_vars, scale=None):
    """Equalities ``out_j = sum_k in_k * W[k][j] + b_j`` with exact
    coefficients; a scale multiplies every coefficient and bias."""
    if len(in_vars) != layer.rows:
        raise ValueError(
            f"affine encoding: {len(in_vars)} input variables for {layer.rows} weight rows"
        )
    if len(out_vars) != layer.cols:
        raise ValueError(
            f"affine encoding: {len(out_vars)} output variables for {layer.cols} columns"
        )
    conjuncts = []
    for j, out in enumerate(out_vars):
        column = [row[j] for row in layer.weights]
        bias = layer.biases[j]
        if scale is not None:
            column = [scale * w for w in column]
            bias = scale * bias
        conjuncts.append(Cmp(Var(out), "=", _affine_rhs(in_vars, column, bias)))
    return conjuncts


def encode_relu(z_vars, h_vars):
    """Case split per node: ``(z >= 0 and h = z) or (z < 0 and h = 0)``."""
    if len(z_vars) != len(h_vars):
        raise ValueError("relu encoding: z/h variable lists differ in length")
    zero = Const(ZERO)
    out = []
    for z, h in zip(z_vars, h_vars):
        out.append(
            Or(
                (
                    make_and((Cmp(Var(z), ">=", zero), Cmp(Var(h), "=", Var(z)))),
                    make_and((Cmp(Var(z), "<", zero), Cmp(Var(h), "=", zero))),
                )
            )
        )
    return out


def encode_hardtanh(z_vars, h_vars):
    """Three-way case split per node: saturated high, saturated low, or
    identity on the open interval (-1, 1)."""
    if len(z_vars) != len(h_vars):
        raise ValueError("hardtanh encoding: z/h variable lists differ in length")
    one = Const(ONE)
    neg_one = Const(-ONE)
    out = []
    for z, h in zip(z_vars, h_vars):
        out.append(
            Or(
                (
                    make_and((Cmp(Var(z), ">=", one), Cmp(Var(h), "=", one))),
                    make_and((Cmp(Var(z), "<=", neg_one), Cmp(Var(h), "=", neg_one))),
                    make_and(
                        (
                            Cmp(Const(-ONE), "<", Var(z)),
                            Cmp(Var(z), "<", one),
                            Cmp(Var(z), "=", Var(h)),
                        )
                    ),
                )
            )
        )
    return out


def encode_abs(term, namer: VariableNamer, mode: str = "case-split"):
    """Fresh auxiliary ``a`` with ``(t >= 0 and a = t) or (t < 0 and a = -t)``,
    so ``a = |t|`` in every model."""
    zero = Const(ZERO)
    name = namer.aux()
    if mode == "ite":
        defining = Cmp(
            Var(name), "=", Ite(Cmp(term, ">=", zero), term, Scale(-ONE, term))
        )
        return name, defining
    defining = Or(
        (
            make_and((Cmp(term, ">=", zero), Cmp(Var(name), "=", term))),
            make_and((Cmp(term, "<", zero), Cmp(Var(name), "=", Scale(-ONE, term)))),
        )
    )
    return name, defining


def encode_relu_ite(z_vars, h_vars):
    """Equational form ``h = ite(z >= 0, z, 0)`` of the relu case split."""
    if len(z_vars) != len(h_vars):
        raise ValueError("relu encoding: z/h variable lists differ in length")
    zero = Const(ZERO)
    return [
        Cmp(Var(h), "=", Ite(Cmp(Var(z), ">=", zero), Var(z), zero))
        for z, h in zip(z_vars, h_vars)
    ]


def encode_hardtanh_ite(z_vars, h_vars):
    """Nested-ite form of the hard-tanh clamp."""
    if len(z_vars) != len(h_vars):
        raise ValueError("hardtanh encoding: z/h variable lists differ in length")
    one = Const(ONE)
    neg_one = Const(-ONE)
    return [
        Cmp(
            Var(h),
            "=",
            Ite(
                Cmp(Var(z), ">=", one),
                one,
                Ite(Cmp(Var(z), "<=", neg_one), neg_one, Var(z)),
            ),
        )
        for z, h in zip(z_vars, h_vars)
    ]


_ACTIVATION_ENCODERS = {
    "case-split": {
        Activation.RELU: encode_relu,
        Activation.HARDTANH: encode_hardtanh,
    },
    "ite": {
        Activation.RELU: encode_relu_ite,
        Activation.HARDTANH: encode_hardtanh_ite,
    },
}


@dataclass
class EncodedNetwork:
    """One network's constraint conjuncts plus its variable bookkeeping."""

    output_vars: list
    conjuncts: list
    internal_vars: list = field(default_factory=list)


def trace_assignment(net: Network, prefix: str, x, include_inputs: bool = True) -> dict:
    """Assignment realizing one exact forward trace under this encoder's
    naming scheme; it satisfies ``encode_network``'s conjuncts by
    construction (the model-soundness direction of the encoding)."""
    from .evaluator import forward_trace  # deferred: evaluator imports relations

    trace, y = forward_trace(net, x)
    env = {}
    if include_inputs:
        for j, value in enumerate(x, start=1):
            env[VariableNamer.input_name(j)] = value
    last_index = len(net.layers)
    for layer_no, (layer, (z, h)) in enumerate(zip(net.layers, trace), start=1):
        is_last = layer_no == last_index
        if layer.activation is Activation.LINEAR:
            if not is_last:
                for j, value in enumerate(z, start=1):
                    env[f"{prefix}_l{layer_no}_z{j}"] = value
            continue
        for j, value in enumerate(z, start=1):
            env[f"{prefix}_l{layer_no}_z{j}"] = value
        if not is_last or net.output_scale is not None:
            for j, value in enumerate(h, start=1):
                env[f"{prefix}_l{layer_no}_h{j}"] = value
    for i, value in enumerate(y, start=1):
        env[f"{prefix}_y{i}"] = value
    return env


def encode_network(
    net: Network, namer: VariableNamer, input_vars, mode: str = "case-split"
) -> EncodedNetwork:
    """Full constraint encoding of one network over the given input variables.

    Returns the output variable names together with the conjunct list; input
    bound constraints are excluded (asserted once at the query level).
    ``mode`` selects the activation emission form (see ENCODING_MODES); both
    forms share the same variables and the same satisfying assignments.
    """
    if mode not in ENCODING_MODES:
        raise ValueError(f"unknown encoding mode {mode!r}")
    if len(input_vars) != net.input_dim:
        raise ValueError(
            f"{len(input_vars)} input variables for input dimension {net.input_dim}"
        )
    conjuncts = []
    internal = []
    current = list(input_vars)
    last_index = len(net.layers)
    for layer_no, layer in enumerate(net.layers, start=1):
        is_last = layer_no == last_index
        scale = net.output_scale if is_last else None
        if layer.activation is Activation.LINEAR:
            if is_last:
                outs = [namer.y(i) for i in range(1, layer.cols + 1)]
                conjuncts.extend(encode_affine(layer, current, outs, scale=scale))
                current = outs
            else:
                # Identity activation: the pre-activation variables feed the
                # next layer directly, no h variables needed.
                zs = [namer.z(layer_no, j) for j in range(1, layer.cols + 1)]
                internal.extend(zs)
                conjuncts.extend(encode_affine(layer, current, zs))
                current = zs
            continue
        zs = [namer.z(layer_no, j) for j in range(1, layer.cols + 1)]
        internal.extend(zs)
        conjuncts.extend(encode_affine(layer, current, zs))
        activation_encoder = _ACTIVATION_ENCODERS[mode][layer.activation]
        if is_last and scale is None:
            outs = [namer.y(i) for i in range(1, layer.cols + 1)]
            conjuncts.extend(activation_encoder(zs, outs))
            current = outs
        elif is_last:
            hs = [namer.h(layer_no, j) for j in range(1, layer.cols + 1)]
            internal.extend(hs)
            conjuncts.extend(activation_encoder(zs, hs))
            outs = [namer.y(i) for i in range(1, layer.cols + 1)]
            conjuncts.extend(
                Cmp(Var(out), "=", _coeff_term(scale, h)) for out, h in zip(outs, hs)
            )
            current = outs
        else:
            hs = [namer.h(layer_no, j) for j in range(1, layer.cols + 1)]
            internal.extend(hs)
            conjuncts.extend(activation_encoder(zs, hs))
            current = hs
    return EncodedNetwork(output_vars=current, conjuncts=conjuncts, internal_vars=internal)
