"""self-contained synthesis problem files (.spq) and their validation.

a problem file is a single (problem ...) s-expression bundling everything
one run needs:

    (problem
      (bounds (list-len 4) (int-range 0 3))
      (define (reverse (l list))
        (match l (nil nil) ((cons hd tl) (snoc (reverse tl) hd))))
      (generator (gen-int) (choose-int 0 3))
      (generator (gen-list) (choose nil (cons (gen-int) (gen-list))))
      (var l1 (gen-list))
      (var ol1 (gen-list))
      (query (ol1 (reverse l1)))
      (grammar
        (start B)
        (nt B true (or A A) (or A A A))
        (nt A ...))
      (seeds (= (len l1) (len ol1)))          ; optional warm start
      (options (timeout-secs 300)))           ; optional run defaults

clause order is free.  bounds items: (list-len n), (tree-size n),
(int-range lo hi), (int-bits k) meaning unsigned 0 .. 2^k - 1, (fuel n).
a (var name) without a generator call must be a query output; its domain
then defaults to the image of the defining expression over the already
bound variables.  variable declaration order fixes the example order:
first declared varies slowest.

loading validates the whole bundle: definitions parse, every generator
binding expands to a nonempty finite domain, query targets and functions
resolve, the grammar parses against the declared functions and variables,
every semantic call the grammar can instantiate is total on the domain,
and warm-start properties parse against the grammar and hold on every
positive example.  what load_problem returns is runnable as-is.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .sexpr import _INT_RE, SexprError, _tokens, to_text
from .semcore import (Bounds, DefinitionError, UNDEF, VTuple, eval_expr,
                      expand_generator, parse_define, value_sort)
from .grammar import (GrammarError, GrammarSpec, PartialityError,
                      ground_semantic_calls, parse_grammar, parse_term,
                      term_sexpr, term_text)
from .interp import _free_vars
from .engine import (DomainError, Engine, EngineOptions, EngineResult,
                     ExampleDomain)

__all__ = ["ProblemError", "Problem", "load_problem", "parse_problem",
           "run_problem"]


class ProblemError(Exception):
    """problem-file parse or validation failure, with file and line."""

    def __init__(self, msg, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(where + msg)
        self.path = path
        self.line = line


@dataclass
class Problem:
    """a validated synthesis task plus its materialized example domain."""

    path: str
    name: str
    defs: dict                  # functions and generators by name
    variables: tuple            # declaration order
    bindings: dict              # var -> generator-call text, None if derived
    query: list                 # [(targets tuple, expression form)]
    grammar: GrammarSpec
    bounds: Bounds
    seeds: list = field(default_factory=list)    # warm-start Terms
    options: EngineOptions = field(default_factory=EngineOptions)
    domain: ExampleDomain = None

    def seed_forms(self):
        return [term_sexpr(t) for t in self.seeds]

    def add_seeds(self, forms, path=None, line=None):
        """parse, soundness-check, and append warm-start properties.

        each form must derive from the grammar and hold on every positive
        example; the first counterexample rejects the whole batch.
        """
        for sform in forms:
            try:
                t = parse_term(self.grammar, sform)
            except GrammarError as e:
                raise ProblemError(
                    f"warm-start property does not parse: {e}", path, line)
            bad = _first_rejected_positive(self.domain, t)
            if bad is not None:
                shown = ", ".join(f"{v} = {s}"
                                  for v, s in self.domain.render(bad).items())
                raise ProblemError(
                    f"warm-start property {term_text(t)} is unsound: it "
                    f"rejects positive example {shown}", path, line)
            self.seeds.append(t)

    def engine(self, options=None):
        return Engine(self.grammar, self.domain, options or self.options,
                      seeds=self.seed_forms())

    def run(self, options=None) -> EngineResult:
        return self.engine(options).run()


def run_problem(problem: Problem, options=None) -> EngineResult:
    return problem.run(options)


# --- reading ----------------------------------------------------------------

def _read_clauses(text, path):
    """clauses of the single (problem ...) form, each with its start line."""
    stack = []
    clause_line = None
    clauses = []
    root = None
    roots = 0
    last = 1
    for tok, line, col in _tokens(text):
        last = line
        if tok == "(":
            if len(stack) == 1:
                clause_line = line
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ProblemError("unbalanced ')'", path, line)
            done = stack.pop()
            if len(stack) == 1:
                clauses.append((done, clause_line))
            if stack:
                stack[-1].append(done)
            else:
                roots += 1
                root = done
        else:
            atom = int(tok) if _INT_RE.match(tok) else tok
            if len(stack) == 1 and stack[0]:
                raise ProblemError(f"stray atom {tok} in problem body",
                                   path, line)
            if stack:
                stack[-1].append(atom)
            else:
                raise ProblemError(f"expected (problem ...), got {tok}",
                                   path, line)
    if stack:
        raise ProblemError("unclosed '('", path, last)
    if roots != 1 or not isinstance(root, list) or not root \
            or root[0] != "problem":
        raise ProblemError("expected exactly one (problem ...) form", path, 1)
    return clauses


_BOUND_KEYS = ("list-len", "tree-size", "int-range", "int-bits", "fuel")


def _parse_bounds(items, path, line, overrides):
    vals = {}
    for it in items:
        if not (isinstance(it, list) and it and isinstance(it[0], str)):
            raise ProblemError(f"bad bounds item {to_text(it)}", path, line)
        key, args = it[0], it[1:]
        if key not in _BOUND_KEYS:
            raise ProblemError(f"unknown bounds key {key}", path, line)
        if key in vals or (key == "int-bits" and "int-range" in vals) \
                or (key == "int-range" and "int-bits" in vals):
            raise ProblemError(f"conflicting bounds key {key}", path, line)
        want = 2 if key == "int-range" else 1
        if len(args) != want or not all(isinstance(a, int) for a in args):
            raise ProblemError(f"bounds key {key} wants {want} integer(s)",
                               path, line)
        vals[key] = args
    if "int_bits" in overrides:
        vals.pop("int-range", None)
        vals["int-bits"] = [overrides["int_bits"]]
    if "list_len" in overrides:
        vals["list-len"] = [overrides["list_len"]]
    if "fuel" in overrides:
        vals["fuel"] = [overrides["fuel"]]
    kw = {}
    if "list-len" in vals:
        kw["list_len"] = vals["list-len"][0]
    if "tree-size" in vals:
        kw["tree_size"] = vals["tree-size"][0]
    if "int-range" in vals:
        kw["int_min"], kw["int_max"] = vals["int-range"]
    if "int-bits" in vals:
        k = vals["int-bits"][0]
        if not 0 < k <= 16:
            raise ProblemError(f"int-bits {k} out of range 1..16", path, line)
        kw["int_min"], kw["int_max"] = 0, (1 << k) - 1
    if "fuel" in vals:
        kw["fuel"] = vals["fuel"][0]
    try:
        b = Bounds(**kw)
    except Exception as e:
        raise ProblemError(f"bad bounds: {e}", path, line)
    if b.list_len < 0 or b.tree_size < 0 or b.int_min > b.int_max or b.fuel < 0:
        raise ProblemError("bounds out of order", path, line)
    return b


def _num(atom):
    if isinstance(atom, int):
        return atom
    try:
        return float(atom)
    except (TypeError, ValueError):
        return None


def _parse_options(items, path, line):
    kw = {}
    for it in items:
        if isinstance(it, list) and len(it) == 1 and it[0] == "no-harden":
            kw["harden"] = False
        elif isinstance(it, list) and len(it) == 2 and it[0] == "timeout-secs":
            v = _num(it[1])
            if v is None or v <= 0:
                raise ProblemError("timeout-secs wants a positive number",
                                   path, line)
            kw["timeout_secs"] = float(v)
        else:
            raise ProblemError(f"unknown options item {to_text(it)}",
                               path, line)
    return kw


def _parse_query_atom(form, path, line):
    if not (isinstance(form, list) and len(form) == 2):
        raise ProblemError(f"bad query atom {to_text(form)}; "
                           "expected (target expression)", path, line)
    tgt, expr = form
    if isinstance(tgt, str):
        targets = (tgt,)
    elif isinstance(tgt, list) and tgt and all(isinstance(t, str) for t in tgt):
        targets = tuple(tgt)
    else:
        raise ProblemError(f"bad query target {to_text(tgt)}", path, line)
    return targets, expr


def _expr_heads(form, out):
    if isinstance(form, list) and form:
        if isinstance(form[0], str):
            out.add(form[0])
        for f in form[1:]:
            _expr_heads(f, out)


def parse_problem(text, path="<string>", overrides=None):
    """parse and validate problem text; see load_problem."""
    overrides = dict(overrides or {})
    clauses = _read_clauses(text, path)

    defs = {}
    var_order = []
    var_clause = {}
    bounds = None
    bounds_line = 1
    grammar_form = None
    grammar_line = 1
    query = []
    query_lines = []
    seed_forms = []
    opt_kw = {}

    for form, line in clauses:
        if not (isinstance(form, list) and form and isinstance(form[0], str)):
            raise ProblemError(f"bad clause {to_text(form)}", path, line)
        head = form[0]
        if head in ("define", "generator"):
            try:
                fd = parse_define(form, generator=(head == "generator"))
            except DefinitionError as e:
                raise ProblemError(str(e), path, line)
            if fd.name in defs:
                raise ProblemError(f"duplicate definition of {fd.name}",
                                   path, line)
            defs[fd.name] = fd
        elif head == "bounds":
            if bounds is not None:
                raise ProblemError("duplicate bounds clause", path, line)
            bounds = _parse_bounds(form[1:], path, line, overrides)
            bounds_line = line
        elif head == "var":
            if len(form) < 2 or not isinstance(form[1], str):
                raise ProblemError(f"bad var clause {to_text(form)}",
                                   path, line)
            name = form[1]
            if name in var_clause:
                raise ProblemError(f"duplicate variable {name}", path, line)
            gencall = None
            genfuel = None
            for extra in form[2:]:
                if isinstance(extra, list) and len(extra) == 2 \
                        and extra[0] == "fuel" and isinstance(extra[1], int):
                    genfuel = extra[1]
                elif isinstance(extra, list) and extra \
                        and isinstance(extra[0], str) and gencall is None:
                    gencall = extra
                else:
                    raise ProblemError(
                        f"bad var item {to_text(extra)} for {name}",
                        path, line)
            var_order.append(name)
            var_clause[name] = (gencall, genfuel, line)
        elif head == "query":
            if len(form) < 2:
                raise ProblemError("empty query clause", path, line)
            for atom in form[1:]:
                query.append(_parse_query_atom(atom, path, line))
                query_lines.append(line)
        elif head == "grammar":
            if grammar_form is not None:
                raise ProblemError("duplicate grammar clause", path, line)
            grammar_form = form
            grammar_line = line
        elif head == "seeds":
            seed_forms.extend((f, line) for f in form[1:])
        elif head == "options":
            opt_kw.update(_parse_options(form[1:], path, line))
        else:
            raise ProblemError(f"unknown clause {head}", path, line)

    if bounds is None:
        bounds = _parse_bounds([], path, 1, overrides)
    if grammar_form is None:
        raise ProblemError("problem has no grammar clause", path, 1)
    if not query:
        raise ProblemError("problem has no query clause", path, 1)
    if not var_order:
        raise ProblemError("problem declares no variables", path, 1)

    for key in ("timeout_secs", "harden", "trace"):
        if key in overrides:
            opt_kw[key] = overrides[key]
    options = EngineOptions(**opt_kw)

    fuel = bounds.effective_fuel()
    targets_of = {}
    for (targets, expr), line in zip(query, query_lines):
        for t in targets:
            if t not in var_clause:
                raise ProblemError(f"query target {t} is not a declared "
                                   "variable", path, line)
            targets_of.setdefault(t, []).append((targets, expr, line))

    # functions must resolve before anything evaluates
    fun_names = {n for n, fd in defs.items() if not fd.generator}
    known_heads = set(defs) | _EXPR_BUILTINS
    for (targets, expr), line in zip(query, query_lines):
        heads = set()
        _expr_heads(expr, heads)
        missing = sorted(heads - known_heads)
        if missing:
            raise ProblemError(f"query calls unknown function {missing[0]}",
                               path, line)
        free = set()
        _free_vars(defs, expr, frozenset(), free)
        unknown = sorted(free - set(var_clause))
        if unknown:
            raise ProblemError(
                f"query mentions undeclared variable {unknown[0]}",
                path, line)

    # generator-bound variables first
    var_values = {}
    bindings = {}
    for name in var_order:
        gencall, genfuel, line = var_clause[name]
        if gencall is None:
            bindings[name] = None
            if name not in targets_of:
                raise ProblemError(
                    f"variable {name} has no generator and is not a query "
                    "output", path, line)
            continue
        bindings[name] = to_text(gencall)
        gname = gencall[0]
        gd = defs.get(gname)
        if gd is None or not gd.generator:
            raise ProblemError(f"{gname} is not a generator", path, line)
        try:
            args = [eval_expr(defs, a, {}, fuel, bounds) for a in gencall[1:]]
            if any(a is UNDEF for a in args):
                raise ProblemError(
                    f"generator argument in {to_text(gencall)} is undefined",
                    path, line)
            vals = expand_generator(defs, gname,
                                    fuel if genfuel is None else genfuel,
                                    bounds, args)
        except DefinitionError as e:
            raise ProblemError(str(e), path, line)
        if not vals:
            raise ProblemError(
                f"generator {to_text(gencall)} produced no values for {name}",
                path, line)
        var_values[name] = vals

    # remaining outputs default to the image of their defining atom
    pending = [v for v in var_order if v not in var_values]
    while pending:
        progressed = False
        for name in list(pending):
            got = _image_values(defs, name, targets_of[name], var_values,
                                fuel, bounds, path)
            if got is not None:
                var_values[name] = got
                pending.remove(name)
                progressed = True
        if not progressed:
            name = pending[0]
            raise ProblemError(
                f"cannot derive a domain for {name}: its defining "
                "expression depends on variables that are not bound yet",
                path, var_clause[name][2])

    try:
        domain = ExampleDomain(defs, tuple(var_order), var_values, query,
                               bounds)
    except (DomainError, DefinitionError, ValueError) as e:
        raise ProblemError(str(e), path, query_lines[0])

    try:
        grammar = parse_grammar(grammar_form, funs=fun_names,
                                variables=set(var_order))
    except GrammarError as e:
        raise ProblemError(str(e), path, grammar_line)

    # totality sweep: every semantic call the grammar can instantiate must
    # be defined on the whole grid, or property evaluation could raise
    # mid-run.  grounds are a superset of the calls inside derivable terms,
    # so passing here is conservative.
    try:
        for call in ground_semantic_calls(grammar, fun_names):
            domain.evaluator.warm(call)
    except PartialityError as e:
        raise ProblemError(f"grammar is partial on this domain: {e}",
                           path, grammar_line)

    name = os.path.splitext(os.path.basename(path))[0]
    prob = Problem(path, name, defs, tuple(var_order), bindings, query,
                   grammar, bounds, [], options, domain)
    for sform, line in seed_forms:
        prob.add_seeds([sform], path, line)
    return prob


_EXPR_BUILTINS = {
    "if", "match", "cons", "node", "tuple", "proj", "+", "-", "*",
    "<", "<=", ">", ">=", "=", "eq", "!=", "neq", "and", "or", "not",
    "len", "isEmpty", "true", "false", "nil", "leaf", "_",
}


def _image_values(defs, name, atoms, var_values, fuel, bounds, path):
    """distinct defined outputs of the first usable defining atom."""
    import itertools

    for targets, expr, line in atoms:
        free = set()
        _free_vars(defs, expr, frozenset(), free)
        if name in free or any(v not in var_values for v in free):
            continue
        axes = sorted(free)
        j = targets.index(name)
        seen = set()
        vals = []
        for combo in itertools.product(*(var_values[v] for v in axes)):
            env = dict(zip(axes, combo))
            try:
                r = eval_expr(defs, expr, env, fuel, bounds)
            except DefinitionError as e:
                raise ProblemError(str(e), path, line)
            if r is UNDEF:
                continue
            if len(targets) > 1 and not (isinstance(r, VTuple)
                                         and len(r) == len(targets)):
                raise ProblemError(
                    f"query atom {to_text(expr)} does not produce a "
                    f"{len(targets)}-tuple for targets {targets}", path, line)
            part = r[j] if len(targets) > 1 else r
            key = (value_sort(part), part)
            if key not in seen:
                seen.add(key)
                vals.append(part)
        if not vals:
            raise ProblemError(
                f"query expression {to_text(expr)} is undefined everywhere; "
                f"variable {name} has an empty domain", path, line)
        return vals
    return None


def _first_rejected_positive(domain, term):
    form = term_sexpr(term)
    pos = domain.pos_idx
    for start in range(0, len(pos), 1 << 16):
        chunk = pos[start:start + (1 << 16)]
        acc = domain.evaluator.eval_bool(form, chunk)
        if not acc.all():
            return int(chunk[int(np.argmax(~acc))])
    return None


def load_problem(path, overrides=None) -> Problem:
    """read, parse, and validate one .spq file.

    overrides (all optional): list_len, int_bits, fuel replace the file's
    bounds; timeout_secs, harden, trace replace its engine options.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ProblemError(str(e), path)
    try:
        return parse_problem(text, path=str(path), overrides=overrides)
    except SexprError as e:
        raise ProblemError(str(e), path, e.line)
