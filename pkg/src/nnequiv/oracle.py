"""Ground-truth equivalence decisions by exhaustive enumeration.

The oracle decides the equivalence relation restricted to a finite input
domain (bit grids or arithmetic grids with exact rational steps).  It is the
reference the SMT pipeline is validated against on small instances: a query
restricted to the same grid must reach the same verdict.  Note the oracle
decides only the finite restriction; an unrestricted query quantifies over
the whole continuous box, so "oracle equivalent" does not imply "query
unsatisfiable".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .evaluator import forward, relation_violated_at
from .model import Network
from .rational import ONE, ZERO, rat
from .relations import EquivalenceRelation

DEFAULT_BUDGET = 2**20


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class DiscreteDomain:
    """Per-feature finite value lists, enumerated lexicographically."""

    values: tuple  # tuple of per-feature value tuples

    @staticmethod
    def bits(n: int) -> "DiscreteDomain":
        if n < 1:
            raise ValueError("bit domain needs at least one feature")
        return DiscreteDomain(values=tuple((ZERO, ONE) for _ in range(n)))

    @staticmethod
    def grid(n: int, lo, hi, step) -> "DiscreteDomain":
        lo, hi, step = rat(lo), rat(hi), rat(step)
        if step <= ZERO:
            raise ValueError("grid step must be positive")
        if lo > hi:
            raise ValueError("grid lower endpoint exceeds upper endpoint")
        points = []
        value = lo
        while value <= hi:
            points.append(value)
            value = value + step
        return DiscreteDomain(values=tuple(tuple(points) for _ in range(n)))

    @property
    def features(self) -> int:
        return len(self.values)

    @property
    def cardinality(self) -> int:
        total = 1
        for feature_values in self.values:
            total *= len(feature_values)
        return total


def enumerate_points(domain: DiscreteDomain, budget: int = DEFAULT_BUDGET):
    """Yield every tuple of the domain exactly once, lexicographically."""
    if domain.cardinality > budget:
        raise BudgetExceeded(
            f"domain has {domain.cardinality} points, budget is {budget}"
        )
    return itertools.product(*domain.values)


@dataclass(frozen=True)
class OracleResult:
    equivalent: bool
    witness_input: Optional[tuple] = None
    outputs_a: Optional[tuple] = None
    outputs_b: Optional[tuple] = None
    witness: Optional[str] = None
    points_checked: int = 0


def exhaustive_check(
    net_a: Network,
    net_b: Network,
    relation: EquivalenceRelation,
    domain: DiscreteDomain,
    budget: int = DEFAULT_BUDGET,
) -> OracleResult:
    """Evaluate the pointwise relation at every domain point; the witness,
    when one exists, is the lexicographically first violation."""
    if net_a.input_dim != net_b.input_dim:
        raise ValueError("networks have different input dimensions")
    if net_a.output_dim != net_b.output_dim:
        raise ValueError("networks have different output dimensions")
    if domain.features != net_a.input_dim:
        raise ValueError(
            f"domain covers {domain.features} features, networks expect {net_a.input_dim}"
        )
    _check_domain_in_bounds(domain, net_a)
    _check_domain_in_bounds(domain, net_b)
    count = 0
    for point in enumerate_points(domain, budget=budget):
        count += 1
        ya = forward(net_a, point)
        yb = forward(net_b, point)
        violated, witness = relation_violated_at(relation, ya, yb)
        if violated:
            return OracleResult(
                equivalent=False,
                witness_input=point,
                outputs_a=ya,
                outputs_b=yb,
                witness=witness,
                points_checked=count,
            )
    return OracleResult(equivalent=True, points_checked=count)


def _check_domain_in_bounds(domain: DiscreteDomain, net: Network) -> None:
    # Domain invariant: every listed value lies within the network's
    # declared bounds (unbounded features accept anything).
    for j, (feature_values, bound) in enumerate(zip(domain.values, net.input_bounds), start=1):
        if bound is None:
            continue
        for value in feature_values:
            if not bound[0] <= value <= bound[1]:
                raise ValueError(
                    f"domain value for feature {j} lies outside the declared"
                    f" bounds of network {net.name!r}"
                )
