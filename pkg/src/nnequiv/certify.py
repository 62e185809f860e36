"""Independent certification of solver counterexamples.

A satisfying assignment is never trusted as-is: the input vector is
extracted and replayed through BOTH networks with the exact evaluator, and
the counterexample is accepted only if the relation is violated at the
replayed outputs.  The reported outputs always come from replay, not from
the solver model, so any encoder or model-parser bug surfaces as a loud
rejection instead of a silently wrong report.
"""

from __future__ import annotations

from dataclasses import dataclass

from .evaluator import forward, relation_violated_at
from .model import Network, within_bounds
from .relations import EquivalenceRelation


class CounterexampleRejection(Exception):
    """The solver model does not replay to a relation violation.

    This signals an encoder or model-parser bug; the replayed outputs are
    attached for diagnosis.
    """

    def __init__(self, message, input_vector=None, outputs_a=None, outputs_b=None):
        super().__init__(message)
        self.input_vector = input_vector
        self.outputs_a = outputs_a
        self.outputs_b = outputs_b


@dataclass(frozen=True)
class Counterexample:
    """A certified equivalence violation: replayed outputs, the witness text
    from the pointwise check, and whether the input honored declared bounds."""

    input: tuple
    outputs_a: tuple
    outputs_b: tuple
    relation: EquivalenceRelation
    witness: str
    bounds_respected: bool


def extract_input(assignment: dict, n: int):
    """Ordered input vector x1..xn from a model; solver-internal symbols are
    ignored."""
    values = []
    for j in range(1, n + 1):
        name = f"x{j}"
        if name not in assignment:
            raise CounterexampleRejection(f"model is missing input variable {name}")
        values.append(assignment[name])
    return tuple(values)


def certify(
    net_a: Network,
    net_b: Network,
    relation: EquivalenceRelation,
    assignment: dict,
) -> Counterexample:
    """Replay a satisfying assignment and accept it only if the relation is
    genuinely violated at the replayed outputs.

    A bounds breach does not reject (the violation may still be real); it is
    recorded so bound-encoding bugs stay visible.
    """
    x = extract_input(assignment, net_a.input_dim)
    outputs_a = forward(net_a, x)
    outputs_b = forward(net_b, x)
    violated, witness = relation_violated_at(relation, outputs_a, outputs_b)
    if not violated:
        raise CounterexampleRejection(
            f"solver model does not violate {relation.describe()} under exact replay",
            input_vector=x,
            outputs_a=outputs_a,
            outputs_b=outputs_b,
        )
    respected = within_bounds(net_a, x) and within_bounds(net_b, x)
    return Counterexample(
        input=x,
        outputs_a=outputs_a,
        outputs_b=outputs_b,
        relation=relation,
        witness=witness,
        bounds_respected=respected,
    )
