"""Equivalence relations, their negated encodings, and query assembly.

A query conjoins the shared input-domain constraints, both networks'
encodings over common input variables, and the negation of the chosen
relation over the two output vectors.  The query is unsatisfiable exactly
when the networks are equivalent on the bounded domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .encoder import VariableNamer, encode_abs, encode_input_bounds, encode_network
from .formula import Cmp, Const, Scale, Sum, Var, make_and, make_or, make_sum
from .model import Network
from .rational import ZERO, format_exact, rat

RELATION_TAGS = ("strict", "l1", "linf", "argmax", "topk")

# Default epsilons: conventional operating points for multi-output
# classifier comparisons and for single-output regression.
DEFAULT_EPSILON = {"l1": "5", "linf": "10"}
DEFAULT_EPSILON_REGRESSION = "0.5"


@dataclass(frozen=True)
class EquivalenceRelation:
    tag: str
    epsilon: Optional[object] = None  # rational, > 0
    k: Optional[int] = None

    @staticmethod
    def strict() -> "EquivalenceRelation":
        return EquivalenceRelation("strict")

    @staticmethod
    def l1(epsilon) -> "EquivalenceRelation":
        return EquivalenceRelation("l1", epsilon=rat(epsilon))

    @staticmethod
    def linf(epsilon) -> "EquivalenceRelation":
        return EquivalenceRelation("linf", epsilon=rat(epsilon))

    @staticmethod
    def argmax() -> "EquivalenceRelation":
        return EquivalenceRelation("argmax")

    @staticmethod
    def topk(k: int) -> "EquivalenceRelation":
        return EquivalenceRelation("topk", k=int(k))

    def __post_init__(self):
        if self.tag not in RELATION_TAGS:
            raise ValueError(f"unknown relation tag {self.tag!r}")
        if self.tag in ("l1", "linf"):
            if self.epsilon is None or not self.epsilon > ZERO:
                raise ValueError(f"{self.tag} relation requires epsilon > 0")
        if self.tag == "topk" and (self.k is None or self.k < 1):
            raise ValueError("topk relation requires k >= 1")

    def validate_for(self, output_dim: int) -> None:
        """Check the parameters against a concrete output dimension."""
        if self.tag == "argmax" and output_dim < 2:
            raise ValueError("argmax equivalence is vacuous for a single output")
        if self.tag == "topk" and not 1 <= self.k <= output_dim:
            raise ValueError(
                f"topk requires 1 <= k <= m, got k={self.k} with m={output_dim}"
            )

    def describe(self) -> str:
        if self.tag in ("l1", "linf"):
            return f"{self.tag}(epsilon={format_exact(self.epsilon)})"
        if self.tag == "topk":
            return f"topk(k={self.k})"
        return self.tag


def encode_strict_neq(ya, yb):
    """Negated strict equality: some output coordinate differs."""
    if len(ya) != len(yb):
        raise ValueError("output variable lists differ in length")
    return make_or(Cmp(Var(a), "!=", Var(b)) for a, b in zip(ya, yb))


def _difference(a: str, b: str):
    return Sum((Var(a), Scale(rat(-1), Var(b))))


def encode_l1_geq(ya, yb, epsilon, namer: VariableNamer, mode: str = "case-split"):
    """Negated (1, eps)-closeness: sum of absolute output gaps >= eps.

    Returns the conjunct list: one absolute-value definition per coordinate
    plus the sum threshold."""
    conjuncts = []
    abs_vars = []
    for a, b in zip(ya, yb):
        name, defining = encode_abs(_difference(a, b), namer, mode=mode)
        abs_vars.append(name)
        conjuncts.append(defining)
    total = make_sum(tuple(Var(v) for v in abs_vars))
    conjuncts.append(Cmp(total, ">=", Const(rat(epsilon))))
    return conjuncts


def encode_linf_geq(ya, yb, epsilon, namer: VariableNamer, mode: str = "case-split"):
    """Negated (inf, eps)-closeness: some absolute output gap >= eps."""
    eps = Const(rat(epsilon))
    conjuncts = []
    disjuncts = []
    for a, b in zip(ya, yb):
        name, defining = encode_abs(_difference(a, b), namer, mode=mode)
        conjuncts.append(defining)
        disjuncts.append(Cmp(Var(name), ">=", eps))
    conjuncts.append(make_or(disjuncts))
    return conjuncts


def encode_argmaxis(y_vars, i: int, m: int):
    """Constraint asserting index ``i`` is the argmax of ``y``: strictly
    above every lower index, at least every higher index (the deterministic
    lowest-index tie rule)."""
    if not 1 <= i <= m:
        raise ValueError(f"argmax index {i} out of range 1..{m}")
    yi = Var(y_vars[i - 1])
    conjuncts = [Cmp(yi, ">", Var(y_vars[j - 1])) for j in range(1, i)]
    conjuncts += [Cmp(yi, ">=", Var(y_vars[j - 1])) for j in range(i + 1, m + 1)]
    return make_and(conjuncts)


def encode_argmax_neq(ya, yb, m: int):
    """Negated argmax agreement: the two vectors select different indices."""
    if m < 2:
        raise ValueError("argmax disagreement needs at least two outputs")
    disjuncts = []
    for i in range(1, m + 1):
        for i2 in range(1, m + 1):
            if i == i2:
                continue
            disjuncts.append(
                make_and((encode_argmaxis(ya, i, m), encode_argmaxis(yb, i2, m)))
            )
    return make_or(disjuncts)


def _beats(y_vars, j: int, i: int):
    # j is placed before i by the deterministic decreasing argsort:
    # strictly greater value, or equal value with the lower index.
    op = ">=" if j < i else ">"
    return Cmp(Var(y_vars[j - 1]), op, Var(y_vars[i - 1]))


def _not_beats(y_vars, j: int, i: int):
    op = "<" if j < i else "<="
    return Cmp(Var(y_vars[j - 1]), op, Var(y_vars[i - 1]))


def encode_rankis(y_vars, i: int, p: int, m: int):
    """Constraint asserting index ``i`` sits at argsort position ``p``:
    exactly ``p - 1`` other indices are placed before it, expanded over all
    index subsets of that size."""
    others = [j for j in range(1, m + 1) if j != i]
    disjuncts = []
    for ahead in itertools.combinations(others, p - 1):
        ahead_set = set(ahead)
        conj = [
            _beats(y_vars, j, i) if j in ahead_set else _not_beats(y_vars, j, i)
            for j in others
        ]
        disjuncts.append(make_and(conj))
    return make_or(disjuncts)


def encode_topk_neq(ya, yb, m: int, k: int):
    """Negated top-k argsort agreement: at some position p <= k the two
    argsorts name different indices.

    The rank expansion is combinatorial, O(m * 2^m) in the worst case;
    intended for the small output arities (m <= 10) of desk-scale
    classifiers."""
    if not 1 <= k <= m:
        raise ValueError(f"topk requires 1 <= k <= m, got k={k} with m={m}")
    disjuncts = []
    for p in range(1, k + 1):
        for i in range(1, m + 1):
            for i2 in range(1, m + 1):
                if i == i2:
                    continue
                disjuncts.append(
                    make_and(
                        (encode_rankis(ya, i, p, m), encode_rankis(yb, i2, p, m))
                    )
                )
    return make_or(disjuncts)


@dataclass
class Query:
    """A fully assembled satisfiability query plus its metadata.

    ``conjuncts`` hold, in order: shared input bounds, the optional grid
    restriction, both network encodings, and the negated relation.
    Queries are immutable in practice and safe to solve concurrently.
    """

    declarations: tuple
    conjuncts: tuple
    relation: EquivalenceRelation
    net_a_name: str
    net_b_name: str
    input_vars: tuple
    output_vars_a: tuple
    output_vars_b: tuple
    input_dim: int
    output_dim: int
    var_counts: dict = field(default_factory=dict)
    warnings: tuple = ()
    notes: tuple = ()


def intersect_bounds(bounds_a, bounds_b):
    """Feature-wise intersection of two declared input domains; a warning is
    produced when the declarations differ."""
    merged = []
    mismatch = False
    for a, b in zip(bounds_a, bounds_b):
        if a != b:
            mismatch = True
        if a is None:
            merged.append(b)
        elif b is None:
            merged.append(a)
        else:
            merged.append((max(a[0], b[0]), min(a[1], b[1])))
    warnings = []
    if mismatch:
        warnings.append(
            "input bounds differ between the two networks; using the feature-wise intersection"
        )
    for j, bound in enumerate(merged, start=1):
        if bound is not None and bound[0] > bound[1]:
            warnings.append(f"feature {j}: intersected bounds are empty, query is vacuous")
    return tuple(merged), warnings


def encode_grid_restriction(grid_values, input_vars):
    """Per-feature membership constraints equating each input to one value
    of a finite list (the oracle-comparison mode)."""
    conjuncts = []
    for var, values in zip(input_vars, grid_values):
        if not values:
            raise ValueError(f"grid restriction for {var} has no values")
        conjuncts.append(make_or(Cmp(Var(var), "=", Const(rat(v))) for v in values))
    return conjuncts


def build_query(
    net_a: Network,
    net_b: Network,
    relation: EquivalenceRelation,
    grid_values=None,
    encoding: str = "case-split",
) -> Query:
    """Assemble the joint satisfiability query for a network pair.

    The query is unsatisfiable iff the networks are related for every input
    in the (intersected) bounded domain.  ``grid_values`` optionally
    restricts each input to a finite value list so verdicts can be compared
    against the exhaustive oracle; ``encoding`` selects the activation
    emission form (both forms have identical models).
    """
    if net_a.input_dim != net_b.input_dim:
        raise ValueError(
            f"input dimensions differ: {net_a.input_dim} vs {net_b.input_dim}"
        )
    if net_a.output_dim != net_b.output_dim:
        raise ValueError(
            f"output dimensions differ: {net_a.output_dim} vs {net_b.output_dim}"
        )
    m = net_a.output_dim
    relation.validate_for(m)

    n = net_a.input_dim
    input_vars = tuple(VariableNamer.input_name(j) for j in range(1, n + 1))
    bounds, warnings = intersect_bounds(net_a.input_bounds, net_b.input_bounds)

    conjuncts = []
    notes = []
    bounds_formula = encode_input_bounds(bounds, input_vars)
    if any(b is not None for b in bounds):
        conjuncts.append(bounds_formula)
        notes.append("input bounds: asserted (feature-wise intersection of declared bounds)")
    else:
        notes.append("input bounds: none declared")

    if grid_values is not None:
        if len(grid_values) != n:
            raise ValueError(
                f"grid restriction covers {len(grid_values)} features, expected {n}"
            )
        conjuncts.extend(encode_grid_restriction(grid_values, input_vars))
        notes.append("grid mode: inputs restricted to a finite value list per feature")
    if encoding != "case-split":
        notes.append(f"activation encoding: {encoding}")

    namer_a = VariableNamer("a")
    namer_b = VariableNamer("b")
    encoded_a = encode_network(net_a, namer_a, input_vars, mode=encoding)
    encoded_b = encode_network(net_b, namer_b, input_vars, mode=encoding)
    conjuncts.extend(encoded_a.conjuncts)
    conjuncts.extend(encoded_b.conjuncts)

    namer_rel = VariableNamer("d")
    ya, yb = encoded_a.output_vars, encoded_b.output_vars
    if relation.tag == "strict":
        conjuncts.append(encode_strict_neq(ya, yb))
    elif relation.tag == "l1":
        conjuncts.extend(encode_l1_geq(ya, yb, relation.epsilon, namer_rel, mode=encoding))
    elif relation.tag == "linf":
        conjuncts.extend(encode_linf_geq(ya, yb, relation.epsilon, namer_rel, mode=encoding))
    elif relation.tag == "argmax":
        conjuncts.append(encode_argmax_neq(ya, yb, m))
    else:
        conjuncts.append(encode_topk_neq(ya, yb, m, relation.k))

    declarations = (
        list(input_vars) + namer_a.issued + namer_b.issued + namer_rel.issued
    )
    var_counts = {
        "inputs": n,
        "internal": len(encoded_a.internal_vars)
        + len(encoded_b.internal_vars)
        + len(namer_rel.issued),
        "outputs": len(ya) + len(yb),
    }
    return Query(
        declarations=tuple(declarations),
        conjuncts=tuple(conjuncts),
        relation=relation,
        net_a_name=net_a.name,
        net_b_name=net_b.name,
        input_vars=input_vars,
        output_vars_a=tuple(ya),
        output_vars_b=tuple(yb),
        input_dim=n,
        output_dim=m,
        var_counts=var_counts,
        warnings=tuple(warnings),
        notes=tuple(notes),
    )
