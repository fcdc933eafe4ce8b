import itertools

import pytest

from specsynth.sexpr import parse_one
from specsynth.semcore import Bounds, parse_define
from specsynth.grammar import (
    GrammarError, PartialityError,
    disjunction_shape, enumerate_terms, eval_prop, eval_term,
    ground_semantic_calls, language_size, parse_grammar, print_grammar,
    term_free_vars, term_key, term_text,
)

B = Bounds()
FUEL = B.effective_fuel()

REVERSE_GRAMMAR = """
(grammar
  (start D)
  (nt D true AP (or AP AP) (or AP AP AP))
  (nt AP (isEmpty L) (not (isEmpty L)) (eq L L) (not (eq L L))
         ((alt <= < = != > >=) S (+ S (alt 0 1))))
  (nt S 0 (len L))
  (nt L l1 ol1))
"""


def g_reverse():
    return parse_grammar(REVERSE_GRAMMAR, funs=set(), variables={"l1", "ol1"})


def test_parse_and_print_roundtrip():
    g = g_reverse()
    g2 = parse_grammar(print_grammar(g), funs=set(), variables={"l1", "ol1"})
    assert g2.start == g.start and g2.order == g.order
    assert g2.depths == g.depths
    for nt in g.order:
        assert [p.template for p in g2.prods[nt]] == [p.template for p in g.prods[nt]]


def test_undeclared_symbol_is_named():
    with pytest.raises(GrammarError, match="Q"):
        parse_grammar("(grammar (start D) (nt D (isEmpty Q)))",
                      funs=set(), variables={"l1"})


def test_unknown_function_is_named():
    with pytest.raises(GrammarError, match="mystery"):
        parse_grammar("(grammar (start D) (nt D (mystery l1)))",
                      funs=set(), variables={"l1"})


def test_singleton_grammar():
    g = parse_grammar("(grammar (start D) (nt D true))")
    terms = list(enumerate_terms(g))
    assert [term_text(t) for t in terms] == ["true"]
    assert language_size(g).count == 1


def test_three_term_stream():
    g = parse_grammar("""
        (grammar (start D)
          (nt D true AP)
          (nt AP (isEmpty L))
          (nt L l1 ol1))
    """, funs=set(), variables={"l1", "ol1"})
    assert [term_text(t) for t in enumerate_terms(g)] == [
        "true", "(isEmpty l1)", "(isEmpty ol1)"]
    assert language_size(g).count == 3


def test_ordered_pairs_count():
    g = parse_grammar("""
        (grammar (start D)
          (nt D (or AP AP))
          (nt AP a b c))
    """, funs=set(), variables={"a", "b", "c"})
    terms = [term_text(t) for t in enumerate_terms(g)]
    assert len(terms) == 9 == language_size(g).count
    assert terms == [f"(or {x} {y})" for x in "abc" for y in "abc"]


def test_full_grammar_starts_with_true():
    first = next(enumerate_terms(g_reverse()))
    assert term_text(first) == "true" and first.size == 1


def test_reverse_grammar_size_regression():
    # 120 atoms; one, two or three disjuncts plus the trivial property
    n = language_size(g_reverse())
    assert not n.saturated
    assert n.count == 1 + 120 + 120 ** 2 + 120 ** 3 == 1742521


def test_enumeration_matches_count_midsize():
    # drop the 3-disjunct production to keep the language enumerable
    g = parse_grammar("""
        (grammar (start D)
          (nt D true AP (or AP AP))
          (nt AP (isEmpty L) (not (isEmpty L)) (eq L L) (not (eq L L))
                 ((alt <= < = != > >=) S (+ S (alt 0 1))))
          (nt S 0 (len L))
          (nt L l1 ol1))
    """, funs=set(), variables={"l1", "ol1"})
    terms = list(enumerate_terms(g))
    assert len(terms) == language_size(g).count == 1 + 120 + 120 ** 2
    keys = [term_key(t) for t in terms]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    sizes = [t.size for t in terms]
    assert sizes == sorted(sizes)


def test_enumeration_deterministic():
    g = g_reverse()
    a = [term_text(t) for t in itertools.islice(enumerate_terms(g), 2000)]
    b = [term_text(t) for t in itertools.islice(enumerate_terms(g), 2000)]
    assert a == b


def test_depth_budget_bounds_recursion():
    g = parse_grammar("""
        (grammar (start D)
          (nt D AP)
          (nt AP (depth 2) a (not AP)))
    """, funs=set(), variables={"a"})
    assert {term_text(t) for t in enumerate_terms(g)} == {"a", "(not a)"}
    assert language_size(g).count == 2


def test_eval_len_equality():
    env_pos = {"l1": (1, 2), "ol1": (2, 1)}
    env_neg = {"l1": (1, 2), "ol1": (1,)}
    form = parse_one("(= (len l1) (len ol1))")
    assert eval_prop({}, form, env_pos, FUEL, B) is True
    assert eval_prop({}, form, env_neg, FUEL, B) is False


def test_eval_term_on_grammar_derivation():
    g = g_reverse()
    want = "(= (len l1) (+ (len ol1) 0))"
    t = next(t for t in enumerate_terms(g) if term_text(t) == want)
    assert eval_term({}, t, {"l1": (1, 2), "ol1": (2, 1)}, FUEL, B) is True
    assert eval_term({}, t, {"l1": (1, 2), "ol1": (1,)}, FUEL, B) is False


def test_eval_true_term():
    g = g_reverse()
    t = next(enumerate_terms(g))
    assert eval_term({}, t, {"l1": (), "ol1": (5, 5)}, FUEL, B) is True


def test_eval_quantified_forms():
    env = {"l": (1, 2, 3), "v": 2}
    assert eval_prop({}, parse_one("(forall x l (<= x 3))"), env, FUEL, B) is True
    assert eval_prop({}, parse_one("(forall x l (< x v))"), env, FUEL, B) is False
    assert eval_prop({}, parse_one("(exists x l (= x v))"), env, FUEL, B) is True
    assert eval_prop({}, parse_one("(exists x l (> x 3))"), env, FUEL, B) is False
    assert eval_prop({}, parse_one("(forall x nil (> x 99))"), env, FUEL, B) is True


def test_eval_implication_and_list_building():
    env = {"q": (1, 2), "oq": (2,), "x": 1}
    form = parse_one("(=> (eq (cons x oq) q) (isEmpty oq))")
    assert eval_prop({}, form, env, FUEL, B) is False
    form2 = parse_one("(eq (snoc q 9) (cons 1 (cons 2 (cons 9 nil))))")
    assert eval_prop({}, form2, env, FUEL, B) is True


def test_partial_call_raises():
    pop = parse_define(parse_one(
        "(define (pop l) (match l ((cons h t) (tuple h t))))"))
    with pytest.raises(PartialityError):
        eval_prop({"pop": pop}, parse_one("(eq (pop l) (pop l))"), {"l": ()}, FUEL, B)


def test_disjunction_shape_detection():
    assert disjunction_shape(g_reverse()) == ("AP", 3)
    g2 = parse_grammar("""
        (grammar (start D)
          (nt D true (=> G AP))
          (nt G true (= x1 x2))
          (nt AP (isEmpty l)))
    """, funs=set(), variables={"x1", "x2", "l"})
    assert disjunction_shape(g2) is None


def test_term_free_vars():
    g = g_reverse()
    terms = {term_text(t): t for t in itertools.islice(enumerate_terms(g), 200)}
    assert term_free_vars(terms["(isEmpty l1)"]) == {"l1"}
    assert term_free_vars(terms["(eq l1 ol1)"]) == {"l1", "ol1"}
    assert term_free_vars(terms["true"]) == frozenset()


def test_ground_semantic_calls():
    to_list = parse_define(parse_one(
        "(define (toList q) (match q ((tuple f b) (append f (reverse b)))))"))
    g = parse_grammar("""
        (grammar (start D)
          (nt D true (eq L L))
          (nt L (toList Q) (cons I (toList Q)))
          (nt Q q oq)
          (nt I x))
    """, funs={"toList"}, variables={"q", "oq", "x"})
    calls = {tuple(c) for c in ground_semantic_calls(g, {"toList": to_list})}
    assert calls == {("toList", "q"), ("toList", "oq")}
