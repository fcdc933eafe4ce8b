"""problem-file loading and validation."""

import numpy as np
import pytest

from conftest import REVERSE_SRC, write_spq
from specsynth.semcore import Bounds, parse_define, expand_generator
from specsynth.sexpr import parse
from specsynth.grammar import term_sexpr, term_text
from specsynth.problem import Problem, ProblemError, load_problem, parse_problem


def loaded(tmp_path, text, overrides=None, name="prob.spq"):
    return load_problem(write_spq(tmp_path, text, name), overrides=overrides)


def edited(extra="", drop=None):
    """REVERSE_SRC with a line dropped and/or clauses appended."""
    src = REVERSE_SRC
    if drop:
        src = "\n".join(ln for ln in src.splitlines() if drop not in ln)
    return src.replace("(query (ol1 (reverse l1)))",
                       "(query (ol1 (reverse l1)))\n  " + extra, 1) \
        if extra else src


class TestWellFormed:
    def test_reverse_file_loads(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC, name="reverse.spq")
        assert p.name == "reverse"
        assert p.variables == ("l1", "ol1")
        assert len(p.query) == 1
        assert p.query[0][0] == ("ol1",)
        assert p.bounds.list_len == 3 and (p.bounds.int_min,
                                           p.bounds.int_max) == (0, 2)
        # 40 lists of length <= 3 over {0,1,2}: 1 + 3 + 9 + 27
        assert p.domain.grid.sizes == {"l1": 40, "ol1": 40}
        assert p.domain.n_pos == 40
        assert p.domain.n_neg == 40 * 40 - 40

    def test_variable_order_is_declaration_order(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC)
        assert p.domain.grid.variables == ("l1", "ol1")

    def test_bindings_record_generator_calls(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC)
        assert p.bindings == {"l1": "(gen-list)", "ol1": "(gen-list)"}

    def test_comments_and_whitespace_ignored(self, tmp_path):
        src = REVERSE_SRC.replace("(problem",
                                  "; header comment\n(problem ; trailing")
        p = loaded(tmp_path, src)
        assert p.domain.n_pos == 40

    def test_run_yields_engine_result(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC)
        res = p.run()
        assert not res.partial
        assert res.texts  # found at least one property


class TestFileShape:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ProblemError, match="No such file"):
            load_problem(str(tmp_path / "nope.spq"))

    def test_not_a_problem_form(self, tmp_path):
        with pytest.raises(ProblemError, match="exactly one .problem"):
            loaded(tmp_path, "(grammar (start B) (nt B true))")

    def test_two_top_level_forms(self, tmp_path):
        with pytest.raises(ProblemError, match="exactly one .problem"):
            loaded(tmp_path, "(problem (bounds))\n(problem (bounds))")

    def test_unclosed_paren_names_file(self, tmp_path):
        path = write_spq(tmp_path, "(problem (bounds (list-len 3))")
        with pytest.raises(ProblemError, match=r"prob\.spq.*unclosed"):
            load_problem(path)

    def test_stray_atom_in_body(self, tmp_path):
        with pytest.raises(ProblemError, match="stray atom"):
            loaded(tmp_path, "(problem oops (bounds))")

    def test_unknown_clause_reports_line(self, tmp_path):
        src = "(problem\n  (bounds (list-len 2))\n  (mystery 1))"
        with pytest.raises(ProblemError, match=r"prob\.spq:3.*mystery"):
            loaded(tmp_path, src)

    def test_missing_grammar(self, tmp_path):
        src = REVERSE_SRC.replace("(grammar", "(comment-out", 1)
        with pytest.raises(ProblemError, match="unknown clause|no grammar"):
            loaded(tmp_path, src)

    def test_missing_query(self, tmp_path):
        src = edited(drop="(query (ol1 (reverse l1)))")
        with pytest.raises(ProblemError, match="no query"):
            loaded(tmp_path, src)


class TestBoundsClause:
    def test_int_bits_expands_to_range(self, tmp_path):
        src = REVERSE_SRC.replace("(int-range 0 2)", "(int-bits 2)")
        p = loaded(tmp_path, src)
        assert (p.bounds.int_min, p.bounds.int_max) == (0, 3)

    def test_int_bits_and_range_conflict(self, tmp_path):
        src = REVERSE_SRC.replace("(int-range 0 2)",
                                  "(int-range 0 2) (int-bits 2)")
        with pytest.raises(ProblemError, match="conflicting bounds"):
            loaded(tmp_path, src)

    def test_duplicate_bounds_key(self, tmp_path):
        src = REVERSE_SRC.replace("(list-len 3)", "(list-len 3) (list-len 2)")
        with pytest.raises(ProblemError, match="conflicting bounds"):
            loaded(tmp_path, src)

    def test_bad_arity(self, tmp_path):
        src = REVERSE_SRC.replace("(int-range 0 2)", "(int-range 0)")
        with pytest.raises(ProblemError, match="int-range wants 2"):
            loaded(tmp_path, src)

    def test_unknown_key(self, tmp_path):
        src = REVERSE_SRC.replace("(list-len 3)", "(list-width 3)")
        with pytest.raises(ProblemError, match="unknown bounds key"):
            loaded(tmp_path, src)

    def test_defaults_apply_without_clause(self, tmp_path):
        src = edited(drop="(bounds")
        # elements now range over the default -8..7, so gen-int still works
        src = src.replace("(choose-int 0 2)", "(choose-int 0 1)")
        p = loaded(tmp_path, src)
        assert p.bounds == Bounds()

    def test_fuel_clause(self, tmp_path):
        src = REVERSE_SRC.replace("(list-len 3)", "(list-len 3) (fuel 9)")
        p = loaded(tmp_path, src)
        assert p.bounds.effective_fuel() == 9

    def test_overrides_beat_file(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC,
                   overrides={"list_len": 2, "timeout_secs": 7.5,
                              "harden": False})
        assert p.bounds.list_len == 2
        assert p.domain.grid.sizes["l1"] == 13  # 1 + 3 + 9
        assert p.options.timeout_secs == 7.5
        assert not p.options.harden

    def test_int_bits_override_replaces_range(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC, overrides={"int_bits": 2})
        assert (p.bounds.int_min, p.bounds.int_max) == (0, 3)


class TestOptionsClause:
    def test_timeout_and_harden(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(query (ol1 (reverse l1)))",
            "(query (ol1 (reverse l1)))\n  "
            "(options (timeout-secs 0.5) (no-harden))")
        p = loaded(tmp_path, src)
        assert p.options.timeout_secs == 0.5
        assert not p.options.harden

    def test_unknown_option(self, tmp_path):
        src = edited(extra="(options (verbose))")
        with pytest.raises(ProblemError, match="unknown options item"):
            loaded(tmp_path, src)

    def test_bad_timeout(self, tmp_path):
        src = edited(extra="(options (timeout-secs zero))")
        with pytest.raises(ProblemError, match="positive number"):
            loaded(tmp_path, src)


class TestDefinitions:
    def test_duplicate_definition(self, tmp_path):
        src = REVERSE_SRC.replace("(generator (gen-int) (choose-int 0 2))",
                                  "(generator (gen-int) (choose-int 0 2))\n"
                                  "  (generator (gen-int) (choose-int 0 1))")
        with pytest.raises(ProblemError, match="duplicate definition"):
            loaded(tmp_path, src)

    def test_malformed_define_reports_line(self, tmp_path):
        src = REVERSE_SRC.replace("(define (reverse (l list))",
                                  "(define reverse (l)")
        with pytest.raises(ProblemError, match=r"prob\.spq:\d+"):
            loaded(tmp_path, src)

    def test_choice_in_define_rejected(self, tmp_path):
        src = REVERSE_SRC.replace("(match l", "(match (choose l nil)", 1)
        with pytest.raises(ProblemError, match="choice form"):
            loaded(tmp_path, src)


class TestVariables:
    def test_duplicate_variable(self, tmp_path):
        src = REVERSE_SRC.replace("(var l1 (gen-list))",
                                  "(var l1 (gen-list))\n  (var l1 (gen-list))")
        with pytest.raises(ProblemError, match="duplicate variable"):
            loaded(tmp_path, src)

    def test_input_without_generator_is_named(self, tmp_path):
        src = REVERSE_SRC.replace("(var l1 (gen-list))", "(var l1)")
        with pytest.raises(ProblemError, match="l1 has no generator"):
            loaded(tmp_path, src)

    def test_binding_must_be_a_generator(self, tmp_path):
        src = REVERSE_SRC.replace("(var l1 (gen-list))", "(var l1 (reverse))")
        with pytest.raises(ProblemError, match="reverse is not a generator"):
            loaded(tmp_path, src)

    def test_unknown_generator(self, tmp_path):
        src = REVERSE_SRC.replace("(var l1 (gen-list))", "(var l1 (gen-li))")
        with pytest.raises(ProblemError, match="gen-li is not a generator"):
            loaded(tmp_path, src)

    def test_generator_with_argument(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(generator (gen-list) (choose nil (cons (gen-int) (gen-list))))",
            "(generator (gen-list) (choose nil (cons (gen-int) (gen-list))))\n"
            "  (generator (gen-upto (n int)) (choose-int 0 n))")
        src = src.replace("(var ol1 (gen-list))\n", "(var ol1 (gen-list))\n"
                          "  (var w (gen-upto (+ 0 1)))\n", 1)
        p = loaded(tmp_path, src)
        assert p.domain.grid.var_values["w"] == [0, 1]

    def test_per_binding_fuel(self, tmp_path):
        src = REVERSE_SRC.replace("(var l1 (gen-list))",
                                  "(var l1 (gen-list) (fuel 1))")
        p = loaded(tmp_path, src)
        # one descent: nil plus the three singletons
        assert p.domain.grid.sizes["l1"] == 4

    def test_empty_generator_domain(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(generator (gen-int) (choose-int 0 2))",
            "(generator (gen-int) (choose-int 0 2))\n"
            "  (generator (gen-big) 99)")
        src = src.replace("(var l1 (gen-list))", "(var l1 (gen-big))")
        with pytest.raises(ProblemError, match="produced no values for l1"):
            loaded(tmp_path, src)


class TestImageDefaults:
    def test_output_domain_defaults_to_image(self, tmp_path):
        src = REVERSE_SRC.replace("(var ol1 (gen-list))", "(var ol1)")
        p = loaded(tmp_path, src)
        assert p.bindings["ol1"] is None
        # reverse permutes the 40 lists, so the image is all of them
        assert p.domain.grid.sizes["ol1"] == 40
        assert p.domain.n_pos == 40

    def test_chained_outputs_resolve_in_dependency_order(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(var ol1 (gen-list))", "(var ol1)\n  (var n1)")
        src = src.replace("(query (ol1 (reverse l1)))",
                          "(query (ol1 (reverse l1)) (n1 (len ol1)))")
        p = loaded(tmp_path, src)
        assert sorted(p.domain.grid.var_values["n1"]) == [0, 1, 2, 3]

    def test_unresolvable_outputs_error(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(var ol1 (gen-list))", "(var ol1)\n  (var n1)")
        src = src.replace("(query (ol1 (reverse l1)))",
                          "(query (ol1 (len n1)) (n1 (len ol1)))")
        with pytest.raises(ProblemError, match="cannot derive a domain"):
            loaded(tmp_path, src)

    def test_tuple_targets_get_component_images(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(define (reverse (l list))",
            "(define (stats (l list)) (tuple (len l) (reverse l)))\n"
            "  (define (reverse (l list))")
        src = src.replace("(var ol1 (gen-list))", "(var n1)\n  (var r1)")
        src = src.replace("(query (ol1 (reverse l1)))",
                          "(query ((n1 r1) (stats l1)))")
        src = src.replace("(eq l1 ol1)", "(eq l1 r1)")
        src = src.replace("(len ol1)", "(len r1)")
        p = loaded(tmp_path, src)
        assert sorted(p.domain.grid.var_values["n1"]) == [0, 1, 2, 3]
        assert p.domain.grid.sizes["r1"] == 40

    def test_non_tuple_result_for_tuple_targets(self, tmp_path):
        src = REVERSE_SRC.replace("(var ol1 (gen-list))", "(var a)\n  (var b)")
        src = src.replace("(query (ol1 (reverse l1)))",
                          "(query ((a b) (reverse l1)))")
        src = src.replace("(eq l1 ol1)", "(eq l1 a)")
        src = src.replace("(len ol1)", "(len a)")
        with pytest.raises(ProblemError, match="2-tuple"):
            loaded(tmp_path, src)


class TestQueryValidation:
    def test_undeclared_target(self, tmp_path):
        src = REVERSE_SRC.replace("(query (ol1 (reverse l1)))",
                                  "(query (zz (reverse l1)))")
        with pytest.raises(ProblemError, match="zz is not a declared"):
            loaded(tmp_path, src)

    def test_unknown_function(self, tmp_path):
        src = REVERSE_SRC.replace("(reverse l1)", "(revrse l1)")
        with pytest.raises(ProblemError, match="unknown function revrse"):
            loaded(tmp_path, src)

    def test_undeclared_expression_variable(self, tmp_path):
        src = REVERSE_SRC.replace("(reverse l1)", "(reverse l9)")
        with pytest.raises(ProblemError, match="undeclared variable l9"):
            loaded(tmp_path, src)

    def test_output_value_outside_declared_domain(self, tmp_path):
        # ol1 only covers lists of length <= 1, but reverse can return longer
        src = REVERSE_SRC.replace("(var ol1 (gen-list))",
                                  "(var ol1 (gen-list) (fuel 1))")
        with pytest.raises(ProblemError, match="outside the declared domain"):
            loaded(tmp_path, src)


class TestGrammarValidation:
    def test_grammar_leaf_must_be_declared(self, tmp_path):
        src = REVERSE_SRC.replace("(eq l1 ol1)", "(eq l1 olx)")
        with pytest.raises(ProblemError, match="olx"):
            loaded(tmp_path, src)

    def test_totality_sweep_rejects_partial_calls(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(define (reverse (l list))",
            "(define (hd (l list)) (match l ((cons h t) h)))\n"
            "  (define (reverse (l list))")
        src = src.replace("(nt I (depth 2) (len l1) (len ol1) (alt 0 1 2))",
                          "(nt I (depth 2) (len l1) (hd l1) (alt 0 1 2))")
        with pytest.raises(ProblemError, match="partial on this domain"):
            loaded(tmp_path, src)

    def test_total_call_passes_sweep(self, tmp_path):
        src = REVERSE_SRC.replace(
            "(nt A (depth 2) (= I I) (> I I) (eq l1 ol1))",
            "(nt A (depth 2) (= I I) (> I I) (eq (reverse l1) ol1))")
        p = loaded(tmp_path, src)
        res = p.run()
        # with reverse itself available the exact property is one atom
        assert "(eq (reverse l1) ol1)" in res.texts


class TestSeeds:
    def test_valid_seed_loads(self, tmp_path):
        src = edited(extra="(seeds (= (len l1) (len ol1)))")
        p = loaded(tmp_path, src)
        assert [term_text(t) for t in p.seeds] == ["(= (len l1) (len ol1))"]

    def test_seed_outside_grammar_rejected(self, tmp_path):
        src = edited(extra="(seeds (<= (len l1) (len ol1)))")
        with pytest.raises(ProblemError, match="does not parse"):
            loaded(tmp_path, src)

    def test_unsound_seed_names_first_counterexample(self, tmp_path):
        # derive the expected witness independently: the first list in
        # generator order whose reversal differs from itself
        defs = {}
        src_defs = """
        (define (reverse (l list))
          (match l (nil nil) ((cons hd tl) (snoc (reverse tl) hd))))
        (define (snoc (l list) (x int))
          (match l (nil (cons x nil)) ((cons hd tl) (cons hd (snoc tl x)))))
        (generator (gen-int) (choose-int 0 2))
        (generator (gen-list) (choose nil (cons (gen-int) (gen-list))))
        """
        for form in parse(src_defs):
            fd = parse_define(form, generator=(form[0] == "generator"))
            defs[fd.name] = fd
        bounds = Bounds(list_len=3, int_min=0, int_max=2)
        lists = expand_generator(defs, "gen-list", bounds.effective_fuel(),
                                 bounds)

        def rev(t):
            return tuple(reversed(t))

        witness = next(l for l in lists if rev(l) != l)

        src = edited(extra="(seeds (eq l1 ol1))")
        with pytest.raises(ProblemError) as ei:
            loaded(tmp_path, src)
        msg = str(ei.value)
        assert "unsound" in msg
        assert f"l1 = [{' '.join(map(str, witness))}]" in msg
        assert f"ol1 = [{' '.join(map(str, rev(witness)))}]" in msg

    def test_seeded_run_is_semantically_unchanged(self, tmp_path):
        plain = loaded(tmp_path, REVERSE_SRC, name="a.spq")
        seeded = loaded(
            tmp_path, edited(extra="(seeds (= (len l1) (len ol1)))"),
            name="b.spq")
        r0 = plain.run()
        r1 = seeded.run()
        assert not r0.partial and not r1.partial
        dom = plain.domain
        idx = np.concatenate([dom.pos_idx, dom.neg_idx])

        def denote(problem, result):
            acc = np.ones(len(idx), dtype=bool)
            for f in problem.seed_forms():
                acc &= problem.domain.evaluator.eval_bool(f, idx)
            for t in result.conjuncts:
                acc &= problem.domain.evaluator.eval_bool(term_sexpr(t), idx)
            return acc

        assert (denote(plain, r0) == denote(seeded, r1)).all()

    def test_add_seeds_after_load(self, tmp_path):
        p = loaded(tmp_path, REVERSE_SRC)
        p.add_seeds(parse("(= (len l1) (len ol1))"))
        assert len(p.seeds) == 1
        with pytest.raises(ProblemError, match="unsound"):
            p.add_seeds(parse("(eq l1 ol1)"))


class TestParseProblemDirect:
    def test_string_entry_point(self):
        p = parse_problem(REVERSE_SRC, path="inline.spq")
        assert isinstance(p, Problem)
        assert p.name == "inline"

    def test_error_carries_path_and_line(self):
        src = "(problem\n  (bounds (list-len 0 9)))"
        with pytest.raises(ProblemError) as ei:
            parse_problem(src, path="x.spq")
        assert ei.value.path == "x.spq"
        assert ei.value.line == 2
