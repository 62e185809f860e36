"""Linear-real-arithmetic constraint AST with exact in-process evaluation.

Terms are linear by construction: a scale node multiplies a term by a
rational constant, so no variable-times-variable product is expressible.
The solver driver owns the SMT-LIB text rendering; the evaluator here is
used for the automatic round-trip check on every satisfying assignment and
for pointwise encoding tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rational import ZERO, rat

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: object  # rational


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Scale:
    coeff: object  # rational constant; keeps the term linear
    term: object


@dataclass(frozen=True)
class Ite:
    """Conditional term: piecewise-linear, so still within QF_LRA."""

    cond: object  # formula
    then: object  # term
    other: object  # term


@dataclass(frozen=True)
class Cmp:
    lhs: object
    op: str
    rhs: object

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    item: object


@dataclass(frozen=True)
class BoolConst:
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


def const(value) -> Const:
    return Const(rat(value))


def make_sum(terms) -> object:
    """Collapse a term list: empty sum is the constant 0, a singleton is
    unwrapped, anything longer stays a Sum node."""
    terms = tuple(terms)
    if not terms:
        return Const(ZERO)
    if len(terms) == 1:
        return terms[0]
    return Sum(terms)


def make_and(items) -> object:
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def make_or(items) -> object:
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def eval_term(term, env):
    """Exact value of a term under ``env`` (variable name -> rational)."""
    if isinstance(term, Var):
        return env[term.name]
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Sum):
        total = ZERO
        for t in term.terms:
            total = total + eval_term(t, env)
        return total
    if isinstance(term, Scale):
        return term.coeff * eval_term(term.term, env)
    if isinstance(term, Ite):
        branch = term.then if eval_formula(term.cond, env) else term.other
        return eval_term(branch, env)
    raise TypeError(f"not a term node: {term!r}")


def eval_formula(formula, env) -> bool:
    """Exact truth value of a formula under a total assignment."""
    if isinstance(formula, BoolConst):
        return formula.value
    if isinstance(formula, Cmp):
        lhs = eval_term(formula.lhs, env)
        rhs = eval_term(formula.rhs, env)
        op = formula.op
        if op == "=":
            return lhs == rhs
        if op == "!=":
            return lhs != rhs
        if op == "<":
            return lhs < rhs
        if op == "<=":
            return lhs <= rhs
        if op == ">":
            return lhs > rhs
        return lhs >= rhs
    if isinstance(formula, And):
        return all(eval_formula(f, env) for f in formula.items)
    if isinstance(formula, Or):
        return any(eval_formula(f, env) for f in formula.items)
    if isinstance(formula, Not):
        return not eval_formula(formula.item, env)
    raise TypeError(f"not a formula node: {formula!r}")


def term_variables(term, out: set) -> set:
    if isinstance(term, Var):
        out.add(term.name)
    elif isinstance(term, Sum):
        for t in term.terms:
            term_variables(t, out)
    elif isinstance(term, Scale):
        term_variables(term.term, out)
    elif isinstance(term, Ite):
        formula_variables(term.cond, out)
        term_variables(term.then, out)
        term_variables(term.other, out)
    return out


def formula_variables(formula, out=None) -> set:
    """Set of variable names occurring in a formula."""
    if out is None:
        out = set()
    if isinstance(formula, Cmp):
        term_variables(formula.lhs, out)
        term_variables(formula.rhs, out)
    elif isinstance(formula, (And, Or)):
        for f in formula.items:
            formula_variables(f, out)
    elif isinstance(formula, Not):
        formula_variables(formula.item, out)
    return out
