"""candidate-property grammars: parsing, smallest-first enumeration, evaluation.

a grammar is an ordered set of nonterminals, each with ordered production
templates.  templates mix literals, problem variables, semantic-function
calls, leaf alternation groups (alt ...) and nonterminal occurrences.  a
term is a derivation tree; its size is the number of nonterminal
expansions, alternation choices are free.  enumeration is smallest-first
with deterministic tie-breaking (production declaration order, then slots
left to right), so the first consistent term a linear scan finds is a
smallest one.

property evaluation is total by contract: semantic calls that come back
undefined raise PartialityError, and problem loading is expected to have
swept them away beforehand.  property-level arithmetic and list building
(len(l)+1, cons(x, toList(q))) are unbounded observations, not domain
values, so they never trip the domain bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from .sexpr import parse, to_text
from .semcore import UNDEF, Bounds, Tree, VTuple, eval_call, tree_elems, value_sort

__all__ = [
    "GrammarError", "PartialityError", "NTRef", "AltGroup", "Production",
    "Term", "GrammarSpec", "LanguageSize", "parse_grammar", "print_grammar",
    "enumerate_terms", "language_size", "eval_term", "eval_prop",
    "term_sexpr", "term_text", "term_key", "term_free_vars", "parse_term",
    "disjunction_shape", "ground_semantic_calls", "TRUE_TERM_TEXT",
]

SIZE_CAP = 2 ** 63 - 1

TRUE_TERM_TEXT = "true"

_CONSTS = {"true", "false", "nil", "leaf"}

_PROP_HEADS = {
    "or", "and", "not", "=>", "=", "!=", "eq", "neq", "<", "<=", ">", ">=",
    "+", "-", "*", "len", "isEmpty", "cons", "snoc", "forall", "exists",
}


class GrammarError(Exception):
    pass


class PartialityError(Exception):
    """a semantic call inside a property came back undefined."""


@dataclass(frozen=True)
class NTRef:
    name: str


@dataclass(frozen=True)
class AltGroup:
    choices: tuple  # atoms only: operator symbols or integer literals


@dataclass(frozen=True)
class Production:
    nt: str
    index: int
    template: Any          # atom | NTRef | AltGroup | tuple of templates
    slots: tuple = field(default=(), compare=False)  # markers, DFS order


@dataclass(frozen=True)
class Term:
    prod: Production
    outs: tuple  # per slot: child Term (nonterminal) or choice index (alt)
    size: int

    def __repr__(self):
        return f"Term<{term_text(self)}>"


def _collect_slots(tpl, out):
    if isinstance(tpl, (NTRef, AltGroup)):
        out.append(tpl)
    elif isinstance(tpl, tuple):
        for t in tpl:
            _collect_slots(t, out)


class GrammarSpec:
    """immutable after construction; enumeration caches live inside."""

    def __init__(self, start: str, order: tuple, prods: dict, depths: dict):
        self.start = start
        self.order = order
        self.prods = prods
        self.depths = depths
        self._child_nts = {p.name for ps in prods.values() for pr in ps
                           for p in pr.slots if isinstance(p, NTRef)}
        self._minmax_memo: dict = {}
        self._terms_memo: dict = {}
        self._count_memo: dict = {}

    def init_budgets(self) -> tuple:
        return tuple(self.depths[n] for n in self.order)

    def _idx(self, nt: str) -> int:
        return self.order.index(nt)


# --- parsing ---------------------------------------------------------------

def _parse_template(form, nts, funs, variables, bound):
    if isinstance(form, int):
        return form
    if isinstance(form, str):
        if form in nts:
            return NTRef(form)
        if form in _CONSTS or form in bound:
            return form
        if variables is not None and form not in variables:
            raise GrammarError(f"undeclared symbol {form}")
        return form
    if not (isinstance(form, list) and form):
        raise GrammarError(f"bad template {to_text(form)}")
    head = form[0]
    if head == "alt":
        if len(form) < 2:
            raise GrammarError("empty alt group")
        for c in form[1:]:
            if isinstance(c, list):
                raise GrammarError(f"alt choices must be atoms: {to_text(form)}")
        return AltGroup(tuple(form[1:]))
    if head in ("forall", "exists"):
        if len(form) != 4 or not isinstance(form[1], str):
            raise GrammarError(f"bad quantifier {to_text(form)}")
        binder = form[1]
        if binder in nts:
            raise GrammarError(f"quantifier binder {binder} shadows a nonterminal")
        dom = _parse_template(form[2], nts, funs, variables, bound)
        body = _parse_template(form[3], nts, funs, variables, bound | {binder})
        return (head, binder, dom, body)
    # call form: the head is an operator/function symbol or an alt group
    # of them, never a variable or nonterminal
    if isinstance(head, str):
        if not (head in _PROP_HEADS or funs is None or head in funs):
            raise GrammarError(f"unknown function {head}")
        phead = head
    elif isinstance(head, list) and head and head[0] == "alt":
        for c in head[1:]:
            if not (isinstance(c, str) and (c in _PROP_HEADS or funs is None or c in funs)):
                raise GrammarError(f"unknown operator {c} in alt head")
        phead = AltGroup(tuple(head[1:]))
    else:
        raise GrammarError(f"bad call head {to_text(head)}")
    return (phead,) + tuple(
        _parse_template(f, nts, funs, variables, bound) for f in form[1:])


def parse_grammar(source, funs=None, variables=None) -> GrammarSpec:
    """parse a (grammar ...) form.

    funs: known semantic function names, enables call validation.
    variables: known problem variables, enables leaf-symbol validation.
    """
    form = parse(source) if isinstance(source, str) else [source]
    if len(form) != 1 or not (isinstance(form[0], list) and form[0] and form[0][0] == "grammar"):
        raise GrammarError("expected a single (grammar ...) form")
    body = form[0][1:]
    start = None
    decls = []
    for clause in body:
        if not (isinstance(clause, list) and clause):
            raise GrammarError(f"bad grammar clause {to_text(clause)}")
        if clause[0] == "start":
            if len(clause) != 2 or not isinstance(clause[1], str):
                raise GrammarError("bad start clause")
            start = clause[1]
        elif clause[0] == "nt":
            if len(clause) < 2 or not isinstance(clause[1], str):
                raise GrammarError("bad nt clause")
            decls.append(clause)
        else:
            raise GrammarError(f"unknown grammar clause {clause[0]}")
    if start is None:
        raise GrammarError("grammar has no start clause")
    names = [d[1] for d in decls]
    if len(set(names)) != len(names):
        raise GrammarError("duplicate nonterminal declaration")
    if start not in names:
        raise GrammarError(f"start nonterminal {start} not declared")
    nts = set(names)
    prods = {}
    depths = {}
    for d in decls:
        name = d[1]
        rest = d[2:]
        depth = 1 if name == start else 2
        if rest and isinstance(rest[0], list) and len(rest[0]) == 2 and rest[0][0] == "depth":
            if not isinstance(rest[0][1], int) or rest[0][1] < 1:
                raise GrammarError(f"bad depth for {name}")
            depth = rest[0][1]
            rest = rest[1:]
        if not rest:
            raise GrammarError(f"nonterminal {name} has no productions")
        ps = []
        for i, ptext in enumerate(rest):
            tpl = _parse_template(ptext, nts, funs, variables, frozenset())
            slots: list = []
            _collect_slots(tpl, slots)
            ps.append(Production(name, i, tpl, tuple(slots)))
        prods[name] = tuple(ps)
        depths[name] = depth
    return GrammarSpec(start, tuple(names), prods, depths)


def _tpl_text(tpl):
    if isinstance(tpl, NTRef):
        return tpl.name
    if isinstance(tpl, AltGroup):
        return ["alt", *tpl.choices]
    if isinstance(tpl, tuple):
        if tpl and tpl[0] in ("forall", "exists") and isinstance(tpl[1], str):
            return [tpl[0], tpl[1], _tpl_text(tpl[2]), _tpl_text(tpl[3])]
        return [_tpl_text(t) for t in tpl]
    return tpl


def print_grammar(g: GrammarSpec) -> str:
    lines = [f"(grammar (start {g.start})"]
    for name in g.order:
        parts = [to_text(_tpl_text(p.template)) for p in g.prods[name]]
        lines.append(f"  (nt {name} (depth {g.depths[name]}) " + " ".join(parts) + ")")
    return "\n".join(lines) + ")"


# --- enumeration -----------------------------------------------------------

def _dec(g, budgets, nt):
    i = g._idx(nt)
    return budgets[:i] + (budgets[i] - 1,) + budgets[i + 1:]


def _minmax(g: GrammarSpec, nt: str, budgets: tuple):
    """(min term size, max term size) for nt under budgets, or None."""
    key = (nt, budgets)
    hit = g._minmax_memo.get(key, 0)
    if hit != 0:
        return hit
    if budgets[g._idx(nt)] <= 0:
        g._minmax_memo[key] = None
        return None
    sub = _dec(g, budgets, nt)
    lo = hi = None
    for prod in g.prods[nt]:
        plo, phi = 1, 1
        ok = True
        for m in prod.slots:
            if isinstance(m, NTRef):
                mm = _minmax(g, m.name, sub)
                if mm is None:
                    ok = False
                    break
                plo += mm[0]
                phi += mm[1]
        if not ok:
            continue
        lo = plo if lo is None else min(lo, plo)
        hi = phi if hi is None else max(hi, phi)
    res = None if lo is None else (lo, hi)
    g._minmax_memo[key] = res
    return res


def _slot_combos(g, slots, i, rem, budgets) -> Iterator[tuple]:
    """all outcome tuples for slots[i:] totalling rem, lexicographic."""
    if i == len(slots):
        if rem == 0:
            yield ()
        return
    m = slots[i]
    if isinstance(m, AltGroup):
        for c in range(len(m.choices)):
            for rest in _slot_combos(g, slots, i + 1, rem, budgets):
                yield (c,) + rest
        return
    mm = _minmax(g, m.name, budgets)
    if mm is None:
        return
    tail_min = 0
    for k in range(i + 1, len(slots)):
        if isinstance(slots[k], NTRef):
            kk = _minmax(g, slots[k].name, budgets)
            if kk is None:
                return
            tail_min += kk[0]
    for sz in range(mm[0], min(mm[1], rem - tail_min) + 1):
        for t in _terms(g, m.name, sz, budgets):
            for rest in _slot_combos(g, slots, i + 1, rem - sz, budgets):
                yield (t,) + rest


def _gen_terms(g: GrammarSpec, nt: str, size: int, budgets: tuple) -> Iterator[Term]:
    mm = _minmax(g, nt, budgets)
    if mm is None or not (mm[0] <= size <= mm[1]):
        return
    sub = _dec(g, budgets, nt)
    for prod in g.prods[nt]:
        for outs in _slot_combos(g, prod.slots, 0, size - 1, sub):
            yield Term(prod, outs, size)


def _terms(g: GrammarSpec, nt: str, size: int, budgets: tuple) -> tuple:
    """materialized and cached for nonterminals used as children."""
    if nt not in g._child_nts:
        return tuple(_gen_terms(g, nt, size, budgets))
    key = (nt, size, budgets)
    hit = g._terms_memo.get(key)
    if hit is None:
        hit = tuple(_gen_terms(g, nt, size, budgets))
        g._terms_memo[key] = hit
    return hit


def enumerate_terms(g: GrammarSpec) -> Iterator[Term]:
    """every derivable term exactly once, smallest-first, deterministic."""
    budgets = g.init_budgets()
    mm = _minmax(g, g.start, budgets)
    if mm is None:
        return
    for size in range(mm[0], mm[1] + 1):
        yield from _gen_terms(g, g.start, size, budgets)


@dataclass(frozen=True)
class LanguageSize:
    count: int
    saturated: bool

    def __int__(self):
        return self.count


def _count(g: GrammarSpec, nt: str, size: int, budgets: tuple) -> int:
    key = (nt, size, budgets)
    hit = g._count_memo.get(key)
    if hit is not None:
        return hit
    mm = _minmax(g, nt, budgets)
    total = 0
    if mm is not None and mm[0] <= size <= mm[1]:
        sub = _dec(g, budgets, nt)
        for prod in g.prods[nt]:
            # convolve slot counts over the remaining size
            acc = {size - 1: 1}
            for m in prod.slots:
                if isinstance(m, AltGroup):
                    acc = {r: c * len(m.choices) for r, c in acc.items()}
                    continue
                smm = _minmax(g, m.name, sub)
                if smm is None:
                    acc = {}
                    break
                nxt: dict = {}
                for r, c in acc.items():
                    for sz in range(smm[0], min(smm[1], r) + 1):
                        k = _count(g, m.name, sz, sub)
                        if k:
                            nxt[r - sz] = nxt.get(r - sz, 0) + c * k
                acc = nxt
            total += acc.get(0, 0)
    g._count_memo[key] = total
    return total


def language_size(g: GrammarSpec) -> LanguageSize:
    budgets = g.init_budgets()
    mm = _minmax(g, g.start, budgets)
    if mm is None:
        return LanguageSize(0, False)
    total = 0
    for size in range(mm[0], mm[1] + 1):
        total += _count(g, g.start, size, budgets)
    if total > SIZE_CAP:
        return LanguageSize(SIZE_CAP, True)
    return LanguageSize(total, False)


# --- terms as expressions ---------------------------------------------------

def _subst(tpl, outs, pos):
    if isinstance(tpl, NTRef):
        return term_sexpr(outs[pos]), pos + 1
    if isinstance(tpl, AltGroup):
        return tpl.choices[outs[pos]], pos + 1
    if isinstance(tpl, tuple):
        parts = []
        for t in tpl:
            f, pos = _subst(t, outs, pos)
            parts.append(f)
        return tuple(parts), pos
    return tpl, pos


def term_sexpr(term: Term):
    """the instantiated property expression (atoms and nested tuples)."""
    form, pos = _subst(term.prod.template, term.outs, 0)
    assert pos == len(term.outs)
    return form


def term_text(term: Term) -> str:
    return to_text(term_sexpr(term))


def term_key(term: Term) -> tuple:
    """total order key: (size, production index, slot outcomes l-to-r)."""
    outs = tuple(term_key(o) if isinstance(o, Term) else (o,) for o in term.outs)
    return (term.size, term.prod.index) + outs


def term_free_vars(term: Term) -> frozenset:
    out: set = set()
    _form_vars(term_sexpr(term), frozenset(), out)
    return frozenset(out)


def _frozen(form):
    if isinstance(form, (list, tuple)):
        return tuple(_frozen(f) for f in form)
    return form


def _match_template(g, tpl, form, budgets):
    """slot outcomes deriving form from tpl, or None.

    sibling slots expand under the same budgets, so a greedy first-match
    scan over productions is complete; the outcome list follows the
    template's depth-first slot order.
    """
    if isinstance(tpl, NTRef):
        t = _derive_term(g, tpl.name, form, budgets)
        return None if t is None else [t]
    if isinstance(tpl, AltGroup):
        for i, c in enumerate(tpl.choices):
            if form == c:
                return [i]
        return None
    if isinstance(tpl, tuple):
        if not isinstance(form, tuple) or len(form) != len(tpl):
            return None
        outs: list = []
        for t, f in zip(tpl, form):
            m = _match_template(g, t, f, budgets)
            if m is None:
                return None
            outs.extend(m)
        return outs
    return [] if not isinstance(form, tuple) and form == tpl else None


def _derive_term(g, nt, form, budgets):
    if budgets[g._idx(nt)] <= 0:
        return None
    sub = _dec(g, budgets, nt)
    for prod in g.prods[nt]:
        outs = _match_template(g, prod.template, form, sub)
        if outs is not None:
            size = 1 + sum(o.size for o in outs if isinstance(o, Term))
            return Term(prod, tuple(outs), size)
    return None


def parse_term(g: GrammarSpec, source) -> Term:
    """derive a concrete property as a term of g, or raise GrammarError.

    accepts text or an already-parsed form.  the derivation respects the
    same per-nonterminal depth budgets as enumeration, so anything this
    returns is in the enumerable language, and term_sexpr round-trips it.
    """
    if isinstance(source, str):
        forms = parse(source)
        if len(forms) != 1:
            raise GrammarError("expected exactly one property")
        source = forms[0]
    form = _frozen(source)
    t = _derive_term(g, g.start, form, g.init_budgets())
    if t is None:
        raise GrammarError(
            f"{to_text(form)} is not derivable from nonterminal {g.start}")
    return t


def _form_vars(form, bound, out):
    if isinstance(form, str):
        if form not in _CONSTS and form not in bound:
            out.add(form)
        return
    if isinstance(form, (tuple, list)) and form:
        head = form[0]
        if head in ("forall", "exists"):
            _form_vars(form[2], bound, out)
            _form_vars(form[3], bound | {form[1]}, out)
            return
        for f in form[1:]:
            _form_vars(f, bound, out)


# --- evaluation -------------------------------------------------------------

def _velems(v):
    if isinstance(v, tuple) and not isinstance(v, VTuple):
        return v
    if v is None or isinstance(v, Tree):
        return tree_elems(v)
    raise GrammarError("quantifier domain is not a list or tree")


def _veq(a, b):
    return value_sort(a) == value_sort(b) and a == b


def eval_prop(defs: dict, form, env: dict, fuel: int, bounds: Bounds):
    """evaluate an instantiated property expression; total by contract."""
    if isinstance(form, bool):
        return form
    if isinstance(form, int):
        return form
    if isinstance(form, str):
        if form == "true":
            return True
        if form == "false":
            return False
        if form == "nil":
            return ()
        if form == "leaf":
            return None
        if form in env:
            return env[form]
        raise GrammarError(f"unbound variable {form}")
    if not (isinstance(form, (tuple, list)) and form):
        raise GrammarError(f"bad property expression {to_text(form)}")
    head = form[0]
    if head == "forall":
        dom = eval_prop(defs, form[2], env, fuel, bounds)
        return all(eval_prop(defs, form[3], {**env, form[1]: x}, fuel, bounds)
                   for x in _velems(dom))
    if head == "exists":
        dom = eval_prop(defs, form[2], env, fuel, bounds)
        return any(eval_prop(defs, form[3], {**env, form[1]: x}, fuel, bounds)
                   for x in _velems(dom))
    args = [eval_prop(defs, f, env, fuel, bounds) for f in form[1:]]
    if head == "or":
        return any(args)
    if head == "and":
        return all(args)
    if head == "not":
        return not args[0]
    if head == "=>":
        return (not args[0]) or args[1]
    if head in ("=", "eq"):
        return _veq(args[0], args[1])
    if head in ("!=", "neq"):
        return not _veq(args[0], args[1])
    if head in ("<", "<=", ">", ">="):
        a, b = args
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[head]
    if head == "+":
        return sum(args)
    if head == "-":
        return -args[0] if len(args) == 1 else args[0] - args[1]
    if head == "*":
        r = 1
        for a in args:
            r *= a
        return r
    if head == "len":
        v = args[0]
        return len(v) if isinstance(v, tuple) and not isinstance(v, VTuple) \
            else len(tree_elems(v))
    if head == "isEmpty":
        return len(_velems(args[0])) == 0
    if head == "cons":
        return (args[0],) + args[1]
    if head == "snoc":
        return args[0] + (args[1],)
    v = eval_call(defs, head, args, fuel, bounds)
    if v is UNDEF:
        raise PartialityError(
            f"call {to_text(form)} undefined on {env}")
    return v


def eval_term(defs: dict, term: Term, example: dict, fuel: int, bounds: Bounds) -> bool:
    v = eval_prop(defs, term_sexpr(term), example, fuel, bounds)
    if not isinstance(v, bool):
        raise GrammarError(f"property {term_text(term)} is not boolean")
    return v


# --- shape analysis ---------------------------------------------------------

def disjunction_shape(g: GrammarSpec):
    """detect start productions of the form true | A | (or A A) | ... .

    returns (atom nonterminal, max disjunct count) or None.  the engine's
    pruned search relies on this exact production family; anything else
    goes through the general enumerator.
    """
    ps = g.prods[g.start]
    if len(ps) < 2 or ps[0].template != "true":
        return None
    atom = None
    for width, prod in enumerate(ps[1:], start=1):
        t = prod.template
        if width == 1:
            if not isinstance(t, NTRef):
                return None
            atom = t.name
        else:
            want = ("or",) + (NTRef(atom),) * width
            if not (isinstance(t, tuple) and t == want):
                return None
    if atom == g.start:
        return None
    # the atom level must not reach back to the start symbol
    seen, work = set(), [atom]
    while work:
        n = work.pop()
        if n in seen:
            continue
        seen.add(n)
        if n == g.start:
            return None
        for prod in g.prods[n]:
            work.extend(m.name for m in prod.slots if isinstance(m, NTRef))
    return atom, len(ps) - 1


# --- totality sweep support --------------------------------------------------

def _call_templates(tpl, funs, binders, out):
    """maximal subtemplates headed by a semantic function."""
    if isinstance(tpl, tuple) and tpl:
        head = tpl[0]
        if head in ("forall", "exists") and isinstance(tpl[1], str):
            _call_templates(tpl[2], funs, binders, out)
            _call_templates(tpl[3], funs, binders | {tpl[1]}, out)
            return
        if isinstance(head, str) and head in funs:
            out.append((tpl, frozenset(binders)))
            return
        for t in tpl:
            _call_templates(t, funs, binders, out)


def ground_semantic_calls(g: GrammarSpec, funs) -> list:
    """every ground semantic-call expression the grammar can produce.

    used by the load-time totality sweep.  a call template mentioning a
    quantifier binder cannot be grounded and is rejected here.
    """
    found: list = []
    for name in g.order:
        for prod in g.prods[name]:
            _call_templates(prod.template, set(funs), frozenset(), found)
    budgets = g.init_budgets()
    grounds = []
    seen = set()
    for tpl, binders in found:
        if binders:
            free: set = set()
            _form_vars(_tpl_close(tpl), frozenset(), free)
            if free & binders:
                raise GrammarError(
                    f"cannot verify totality of {to_text(_tpl_text(tpl))}: "
                    "it mentions a quantifier binder")
        slots: list = []
        _collect_slots(tpl, slots)
        slots_t = tuple(slots)
        lo = 0
        hi = 0
        feasible = True
        for m in slots_t:
            if isinstance(m, NTRef):
                mm = _minmax(g, m.name, budgets)
                if mm is None:
                    feasible = False
                    break
                lo += mm[0]
                hi += mm[1]
        if not feasible:
            continue
        for total in range(lo, hi + 1):
            for outs in _slot_combos(g, slots_t, 0, total, budgets):
                form, pos = _subst(tpl, outs, 0)
                if form not in seen:
                    seen.add(form)
                    grounds.append(form)
    return grounds


def _tpl_close(tpl):
    """template to a plain form, treating markers as opaque symbols."""
    if isinstance(tpl, NTRef):
        return tpl.name
    if isinstance(tpl, AltGroup):
        return tpl.choices[0]
    if isinstance(tpl, tuple):
        return tuple(_tpl_close(t) for t in tpl)
    return tpl
