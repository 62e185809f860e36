"""Negated relation encodings and query assembly.

The central property: evaluated at any fixed pair of output vectors, each
negated-relation encoding must agree exactly with the pointwise violation
predicate of the evaluator.
"""

import pytest
from hypothesis import given, settings, strategies as st

from nnequiv.encoder import VariableNamer
from nnequiv.evaluator import relation_violated_at
from nnequiv.formula import Or, eval_formula, make_and
from nnequiv.rational import rat
from nnequiv.relations import (
    EquivalenceRelation,
    build_query,
    encode_argmax_neq,
    encode_argmaxis,
    encode_l1_geq,
    encode_linf_geq,
    encode_rankis,
    encode_strict_neq,
    encode_topk_neq,
    intersect_bounds,
)
from nnequiv.model import Activation, Layer, Network
from nnequiv.solver import render_formula

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=64).map(rat)


def _names(prefix, m):
    return tuple(f"{prefix}_y{i}" for i in range(1, m + 1))


def _env(ya_vals, yb_vals):
    env = {}
    for i, v in enumerate(ya_vals, start=1):
        env[f"a_y{i}"] = v
    for i, v in enumerate(yb_vals, start=1):
        env[f"b_y{i}"] = v
    return env


def _abs_env(env, ya_vals, yb_vals):
    # The relation namer issues d_aux1..d_auxm in coordinate order.
    for i, (a, b) in enumerate(zip(ya_vals, yb_vals), start=1):
        env[f"d_aux{i}"] = abs(a - b)
    return env


def test_strict_neq_shapes():
    assert (
        render_formula(encode_strict_neq(_names("a", 2), _names("b", 2)))
        == "(or (not (= a_y1 b_y1)) (not (= a_y2 b_y2)))"
    )
    assert render_formula(encode_strict_neq(_names("a", 1), _names("b", 1))) == (
        "(not (= a_y1 b_y1))"
    )
    with pytest.raises(ValueError):
        encode_strict_neq(_names("a", 2), _names("b", 3))


def test_l1_structure():
    namer = VariableNamer("d")
    conjuncts = encode_l1_geq(_names("a", 2), _names("b", 2), rat(3), namer)
    assert len(conjuncts) == 3  # two abs definitions plus the threshold
    assert namer.issued == ["d_aux1", "d_aux2"]
    assert render_formula(conjuncts[-1]) == "(>= (+ d_aux1 d_aux2) 3)"


def test_l1_single_output_via_one_auxiliary():
    namer = VariableNamer("d")
    conjuncts = encode_l1_geq(_names("a", 1), _names("b", 1), rat(1, 2), namer)
    assert namer.issued == ["d_aux1"]
    assert render_formula(conjuncts[-1]) == "(>= d_aux1 (/ 1 2))"


def test_l1_threshold_at_fixed_outputs():
    ya_vals, yb_vals = (rat(0), rat(0)), (rat(1), rat(-2))
    for epsilon, expected in ((rat(3), True), (rat(7, 2), False)):
        namer = VariableNamer("d")
        conjuncts = encode_l1_geq(_names("a", 2), _names("b", 2), epsilon, namer)
        env = _abs_env(_env(ya_vals, yb_vals), ya_vals, yb_vals)
        assert eval_formula(make_and(conjuncts), env) is expected


def test_linf_threshold_at_fixed_outputs():
    ya_vals, yb_vals = (rat(0), rat(0)), (rat(1), rat(-2))
    for epsilon, expected in ((rat(2), True), (rat(5, 2), False)):
        namer = VariableNamer("d")
        conjuncts = encode_linf_geq(_names("a", 2), _names("b", 2), epsilon, namer)
        env = _abs_env(_env(ya_vals, yb_vals), ya_vals, yb_vals)
        assert eval_formula(make_and(conjuncts), env) is expected


def test_argmaxis_printed_forms():
    y = _names("a", 2)
    assert render_formula(encode_argmaxis(y, 1, 2)) == "(>= a_y1 a_y2)"
    assert render_formula(encode_argmaxis(y, 2, 2)) == "(> a_y2 a_y1)"
    y3 = _names("a", 3)
    assert render_formula(encode_argmaxis(y3, 2, 3)) == "(and (> a_y2 a_y1) (>= a_y2 a_y3))"
    with pytest.raises(ValueError):
        encode_argmaxis(y, 3, 2)


def test_argmaxis_unique_satisfying_index():
    # The >/>= asymmetry makes exactly one index satisfiable per vector,
    # matching the evaluator's lowest-index tie rule.
    y = _names("a", 3)
    for values in [(rat(1), rat(1), rat(1)), (rat(0), rat(2), rat(2)), (rat(3), rat(1), rat(3))]:
        env = {f"a_y{i}": v for i, v in enumerate(values, start=1)}
        satisfied = [i for i in (1, 2, 3) if eval_formula(encode_argmaxis(y, i, 3), env)]
        from nnequiv.evaluator import argmax

        assert satisfied == [argmax(values)]


def test_argmax_neq_m2_matches_printed_form():
    formula = encode_argmax_neq(_names("a", 2), _names("b", 2), 2)
    assert render_formula(formula) == (
        "(or (and (>= a_y1 a_y2) (> b_y2 b_y1)) (and (> a_y2 a_y1) (>= b_y1 b_y2)))"
    )


def test_argmax_neq_disjunct_count():
    formula = encode_argmax_neq(_names("a", 3), _names("b", 3), 3)
    assert isinstance(formula, Or) and len(formula.items) == 6
    with pytest.raises(ValueError):
        encode_argmax_neq(_names("a", 1), _names("b", 1), 1)


def test_argmax_neq_same_order_not_satisfied():
    ya_vals = (rat("0.3"), rat("0.5"), rat("0.2"))
    yb_vals = (rat("0.25"), rat("0.6"), rat("0.15"))
    formula = encode_argmax_neq(_names("a", 3), _names("b", 3), 3)
    assert not eval_formula(formula, _env(ya_vals, yb_vals))


def test_rankis_position_semantics():
    from nnequiv.evaluator import argsort

    y = _names("a", 3)
    for values in [
        (rat("0.3"), rat("0.5"), rat("0.2")),
        (rat("0.3"), rat("0.4"), rat("0.3")),
        (rat(1), rat(1), rat(1)),
    ]:
        env = {f"a_y{i}": v for i, v in enumerate(values, start=1)}
        order = argsort(values)
        for p in (1, 2, 3):
            for i in (1, 2, 3):
                expected = order[p - 1] == i
                assert eval_formula(encode_rankis(y, i, p, 3), env) is expected


def test_topk_fixed_examples():
    ya, yb = _names("a", 2), _names("b", 2)
    swap = encode_topk_neq(ya, yb, 2, 2)
    assert eval_formula(swap, _env((rat(1), rat(0)), (rat(0), rat(1))))
    assert not eval_formula(swap, _env((rat(1), rat(0)), (rat(1), rat(0))))
    ya3, yb3 = _names("a", 3), _names("b", 3)
    same = (rat(2), rat(1), rat(0))
    assert not eval_formula(encode_topk_neq(ya3, yb3, 3, 3), _env(same, same))
    with pytest.raises(ValueError):
        encode_topk_neq(ya, yb, 2, 3)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(2, 4).flatmap(
        lambda m: st.tuples(
            st.just(m),
            st.lists(rationals, min_size=m, max_size=m),
            st.lists(rationals, min_size=m, max_size=m),
        )
    ),
    st.data(),
)
def test_pointwise_agreement_with_evaluator(args, data):
    """Evaluated at fixed outputs, every encoding decides exactly like the
    pointwise violation predicate."""
    m, ya_vals, yb_vals = args
    ya_vals, yb_vals = tuple(ya_vals), tuple(yb_vals)
    ya, yb = _names("a", m), _names("b", m)
    env = _abs_env(_env(ya_vals, yb_vals), ya_vals, yb_vals)

    k = data.draw(st.integers(1, m))
    epsilon = data.draw(rationals.filter(lambda e: e > 0))
    cases = [
        (EquivalenceRelation.strict(), encode_strict_neq(ya, yb)),
        (EquivalenceRelation.argmax(), encode_argmax_neq(ya, yb, m)),
        (EquivalenceRelation.topk(k), encode_topk_neq(ya, yb, m, k)),
        (
            EquivalenceRelation.l1(epsilon),
            make_and(encode_l1_geq(ya, yb, epsilon, VariableNamer("d"))),
        ),
        (
            EquivalenceRelation.linf(epsilon),
            make_and(encode_linf_geq(ya, yb, epsilon, VariableNamer("d"))),
        ),
    ]
    for relation, formula in cases:
        expected, _ = relation_violated_at(relation, ya_vals, yb_vals)
        assert eval_formula(formula, env) is expected, relation.describe()


@settings(max_examples=80, deadline=None)
@given(
    st.integers(2, 4).flatmap(
        lambda m: st.tuples(
            st.just(m),
            st.lists(rationals, min_size=m, max_size=m),
            st.lists(rationals, min_size=m, max_size=m),
        )
    )
)
def test_topk1_agrees_with_argmax_pointwise(args):
    m, ya_vals, yb_vals = args
    ya, yb = _names("a", m), _names("b", m)
    env = _env(tuple(ya_vals), tuple(yb_vals))
    assert eval_formula(encode_topk_neq(ya, yb, m, 1), env) == eval_formula(
        encode_argmax_neq(ya, yb, m), env
    )


def test_relation_parameter_validation():
    with pytest.raises(ValueError):
        EquivalenceRelation.l1(rat(0))
    with pytest.raises(ValueError):
        EquivalenceRelation.linf(rat(-1))
    with pytest.raises(ValueError):
        EquivalenceRelation.topk(0)
    EquivalenceRelation.topk(3).validate_for(3)
    with pytest.raises(ValueError):
        EquivalenceRelation.topk(3).validate_for(2)
    with pytest.raises(ValueError):
        EquivalenceRelation.argmax().validate_for(1)


def test_intersect_bounds():
    a = ((rat(0), rat(1)), None, (rat(-1), rat(1)))
    b = ((rat(0), rat(1)), (rat(0), rat(2)), (rat(0), rat(3)))
    merged, warnings = intersect_bounds(a, b)
    assert merged == ((rat(0), rat(1)), (rat(0), rat(2)), (rat(0), rat(1)))
    assert len(warnings) == 1  # differing declarations


def test_intersect_bounds_empty_intersection_warns():
    a = ((rat(0), rat(1)),)
    b = ((rat(2), rat(3)),)
    merged, warnings = intersect_bounds(a, b)
    assert merged == ((rat(2), rat(1)),)
    assert any("empty" in w for w in warnings)


def test_build_query_structure(fig1):
    query = build_query(fig1, fig1, EquivalenceRelation.strict())
    assert query.input_vars == ("x1", "x2")
    assert query.output_vars_a == ("a_y1", "a_y2")
    assert query.output_vars_b == ("b_y1", "b_y2")
    assert query.var_counts == {"inputs": 2, "internal": 8, "outputs": 4}
    assert len(query.declarations) == 14
    # declared set == used set (variable hygiene)
    from nnequiv.formula import formula_variables

    used = set()
    for conjunct in query.conjuncts:
        formula_variables(conjunct, used)
    assert used == set(query.declarations)


def test_build_query_hygiene_all_relations(fig1, fig1_pert):
    from nnequiv.formula import formula_variables

    relations = [
        EquivalenceRelation.strict(),
        EquivalenceRelation.l1(rat(1)),
        EquivalenceRelation.linf(rat(1)),
        EquivalenceRelation.argmax(),
        EquivalenceRelation.topk(2),
    ]
    for relation in relations:
        query = build_query(fig1, fig1_pert, relation)
        used = set()
        for conjunct in query.conjuncts:
            formula_variables(conjunct, used)
        assert used == set(query.declarations), relation.describe()


def test_build_query_dimension_mismatch(fig1):
    one_input = Network(
        name="one",
        input_dim=1,
        layers=(Layer(weights=((rat(1), rat(1)),), biases=(rat(0), rat(0)), activation=Activation.LINEAR),),
        input_bounds=(None,),
    )
    with pytest.raises(ValueError):
        build_query(fig1, one_input, EquivalenceRelation.strict())


def test_build_query_relation_invalid_for_m(fig1):
    with pytest.raises(ValueError):
        build_query(fig1, fig1, EquivalenceRelation.topk(3))


def test_build_query_grid_restriction(fig1):
    query = build_query(
        fig1,
        fig1,
        EquivalenceRelation.strict(),
        grid_values=((rat(0), rat(1)), (rat(0), rat(1))),
    )
    rendered = [render_formula(c) for c in query.conjuncts]
    assert "(or (= x1 0) (= x1 1))" in rendered
    assert "(or (= x2 0) (= x2 1))" in rendered
    assert any("grid mode" in note for note in query.notes)


def test_build_query_records_bounds_note(fig1):
    query = build_query(fig1, fig1, EquivalenceRelation.strict())
    assert any("asserted" in note for note in query.notes)
    unbounded = Network(
        name="free",
        input_dim=2,
        layers=fig1.layers,
        input_bounds=(None, None),
    )
    query = build_query(unbounded, unbounded, EquivalenceRelation.strict())
    assert any("none declared" in note for note in query.notes)
