"""bounded value domain and a small first-order functional language.

values are plain python data: ints, bools, tuples (lists), VTuple (fixed
arity tuples), Tree/None (binary trees) and the UNDEF sentinel.  function
definitions are interpreted s-expressions evaluated under a recursion fuel;
running out of fuel, exceeding a structural bound, or falling through a
match yields UNDEF.  generators are definitions whose bodies may contain
(choose ...) / (choose-int ...) and denote finite value sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .sexpr import to_text

__all__ = [
    "UNDEF", "Tree", "VTuple", "Bounds", "FunDef", "DefinitionError",
    "value_sort", "value_text", "parse_define", "eval_call", "eval_expr",
    "expand_generator", "query_holds", "tree_size", "tree_elems",
]


class _Undef:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNDEF"


UNDEF = _Undef()


class Tree(NamedTuple):
    val: Any
    left: Any   # Tree or None
    right: Any  # Tree or None


class VTuple(tuple):
    """fixed-arity tuple value, distinct from list values (plain tuples)."""
    __slots__ = ()


class DefinitionError(Exception):
    """ill-formed definition, unknown function, or sort clash.

    distinct from UNDEF: this is a bug in the problem, not partiality.
    """


def tree_size(t) -> int:
    if t is None:
        return 0
    return 1 + tree_size(t.left) + tree_size(t.right)


def tree_elems(t) -> list:
    # in-order walk
    if t is None:
        return []
    return tree_elems(t.left) + [t.val] + tree_elems(t.right)


def value_sort(v) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, VTuple):
        return "tuple"
    if isinstance(v, tuple):
        return "list"
    if v is None or isinstance(v, Tree):
        return "tree"
    raise DefinitionError(f"not a value: {v!r}")


def value_text(v) -> str:
    if v is UNDEF:
        return "undef"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, VTuple):
        return "(tuple " + " ".join(value_text(x) for x in v) + ")"
    if isinstance(v, tuple):
        return "[" + " ".join(value_text(x) for x in v) + "]"
    if v is None:
        return "leaf"
    return f"(node {value_text(v.val)} {value_text(v.left)} {value_text(v.right)})"


@dataclass(frozen=True)
class Bounds:
    list_len: int = 4
    tree_size: int = 3
    int_min: int = -8
    int_max: int = 7
    fuel: int = 0  # 0 means derive the default below

    def effective_fuel(self) -> int:
        if self.fuel > 0:
            return self.fuel
        return 2 * max(self.list_len, self.tree_size) + 2

    def int_ok(self, n: int) -> bool:
        return self.int_min <= n <= self.int_max


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple  # of (name, sort) pairs, sort may be "any"
    body: Any      # parsed s-expression
    generator: bool = False


_SORTS = {"int", "bool", "list", "tree", "tuple", "any"}

_CHOICE_FORMS = {"choose", "choose-int"}


def _contains_choice(form) -> bool:
    if isinstance(form, list):
        if form and isinstance(form[0], str) and form[0] in _CHOICE_FORMS:
            return True
        return any(_contains_choice(f) for f in form)
    return False


def parse_define(form, generator: bool = False) -> FunDef:
    """parse (define (name params...) body) or (generator (name params...) body).

    a param is either a bare name (sort any) or (name sort).
    """
    kw = "generator" if generator else "define"
    if not (isinstance(form, list) and len(form) == 3 and form[0] == kw):
        raise DefinitionError(f"malformed {kw}: {to_text(form)}")
    head = form[1]
    if not (isinstance(head, list) and head and isinstance(head[0], str)):
        raise DefinitionError(f"malformed {kw} head: {to_text(head)}")
    name = head[0]
    params = []
    for p in head[1:]:
        if isinstance(p, str):
            params.append((p, "any"))
        elif isinstance(p, list) and len(p) == 2 and isinstance(p[0], str) and p[1] in _SORTS:
            params.append((p[0], p[1]))
        else:
            raise DefinitionError(f"bad parameter {to_text(p)} in {name}")
    body = form[2]
    if not generator and _contains_choice(body):
        raise DefinitionError(f"choice form in non-generator {name}")
    return FunDef(name, tuple(params), body, generator)


def _sort_check(fd: FunDef, args) -> None:
    if len(args) != len(fd.params):
        raise DefinitionError(f"{fd.name} expects {len(fd.params)} args, got {len(args)}")
    for (pname, sort), a in zip(fd.params, args):
        if sort != "any" and value_sort(a) != sort:
            raise DefinitionError(
                f"{fd.name}: argument {pname} expects {sort}, got {value_sort(a)}")


def eval_call(defs: dict, name: str, args, fuel: int, bounds: Bounds):
    """invoke a definition; the call itself consumes one fuel unit."""
    fd = defs.get(name)
    if fd is None:
        raise DefinitionError(f"unknown function {name}")
    if fd.generator:
        raise DefinitionError(f"{name} is a generator, not a function")
    for a in args:
        if a is UNDEF:
            return UNDEF
    _sort_check(fd, args)
    if fuel <= 0:
        return UNDEF
    env = {p[0]: a for p, a in zip(fd.params, args)}
    return eval_expr(defs, fd.body, env, fuel - 1, bounds)


def _match(pat, v, env):
    """try to match value v against pattern; returns updated env or None."""
    if isinstance(pat, int) and not isinstance(pat, bool):
        return env if (isinstance(v, int) and not isinstance(v, bool) and v == pat) else None
    if pat == "_":
        return env
    if pat == "true" or pat == "false":
        want = pat == "true"
        return env if (isinstance(v, bool) and v == want) else None
    if pat == "nil":
        return env if v == () and not isinstance(v, VTuple) else None
    if pat == "leaf":
        return env if v is None else None
    if isinstance(pat, str):
        env = dict(env)
        env[pat] = v
        return env
    if isinstance(pat, list) and pat:
        head = pat[0]
        if head == "cons" and len(pat) == 3:
            if isinstance(v, tuple) and not isinstance(v, VTuple) and len(v) > 0:
                env = _match(pat[1], v[0], env)
                if env is None:
                    return None
                return _match(pat[2], v[1:], env)
            return None
        if head == "node" and len(pat) == 4:
            if isinstance(v, Tree):
                for sub, part in zip(pat[1:], (v.val, v.left, v.right)):
                    env = _match(sub, part, env)
                    if env is None:
                        return None
                return env
            return None
        if head == "tuple":
            if isinstance(v, VTuple) and len(v) == len(pat) - 1:
                for sub, part in zip(pat[1:], v):
                    env = _match(sub, part, env)
                    if env is None:
                        return None
                return env
            return None
    raise DefinitionError(f"bad pattern {to_text(pat)}")


def _int2(op, a, b, bounds: Bounds):
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    else:
        r = a * b
    return r if bounds.int_ok(r) else UNDEF


def eval_expr(defs: dict, form, env: dict, fuel: int, bounds: Bounds):
    """evaluate an expression at the given fuel.

    fuel is the budget of the enclosing call; nested calls are entered only
    while it is positive and run their bodies at fuel - 1.
    """
    if isinstance(form, bool):
        return form
    if isinstance(form, int):
        if not bounds.int_ok(form):
            return UNDEF
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
        raise DefinitionError(f"unbound variable {form}")
    if not isinstance(form, list) or not form:
        raise DefinitionError(f"bad expression {to_text(form)}")
    head = form[0]

    if head == "if":
        c = eval_expr(defs, form[1], env, fuel, bounds)
        if c is UNDEF:
            return UNDEF
        if not isinstance(c, bool):
            raise DefinitionError("if condition must be bool")
        return eval_expr(defs, form[2] if c else form[3], env, fuel, bounds)

    if head == "match":
        v = eval_expr(defs, form[1], env, fuel, bounds)
        if v is UNDEF:
            return UNDEF
        for arm in form[2:]:
            if not (isinstance(arm, list) and len(arm) == 2):
                raise DefinitionError(f"bad match arm {to_text(arm)}")
            got = _match(arm[0], v, env)
            if got is not None:
                return eval_expr(defs, arm[1], got, fuel, bounds)
        return UNDEF  # partial function: no arm matched

    # strict forms: evaluate all children first
    args = [eval_expr(defs, f, env, fuel, bounds) for f in form[1:]]
    if any(a is UNDEF for a in args):
        return UNDEF

    if head == "cons":
        h, t = args
        if not (isinstance(t, tuple) and not isinstance(t, VTuple)):
            raise DefinitionError("cons onto a non-list")
        r = (h,) + t
        return r if len(r) <= bounds.list_len else UNDEF
    if head == "node":
        v, l, r = args
        t = Tree(v, l, r)
        return t if tree_size(t) <= bounds.tree_size else UNDEF
    if head == "tuple":
        return VTuple(args)
    if head in ("+", "*"):
        a, b = args
        return _int2(head, a, b, bounds)
    if head == "-":
        if len(args) == 1:
            r = -args[0]
            return r if bounds.int_ok(r) else UNDEF
        return _int2("-", args[0], args[1], bounds)
    if head in ("<", "<=", ">", ">="):
        a, b = args
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[head]
    if head in ("=", "eq"):
        return args[0] == args[1]
    if head in ("!=", "neq"):
        return args[0] != args[1]
    if head == "and":
        return all(args)
    if head == "or":
        return any(args)
    if head == "not":
        return not args[0]
    if head == "len":
        v = args[0]
        if isinstance(v, tuple) and not isinstance(v, VTuple):
            return len(v)
        if v is None or isinstance(v, Tree):
            return tree_size(v)
        raise DefinitionError("len of a non-list, non-tree")
    if head == "isEmpty":
        v = args[0]
        if isinstance(v, tuple) and not isinstance(v, VTuple):
            return len(v) == 0
        if v is None or isinstance(v, Tree):
            return v is None
        raise DefinitionError("isEmpty of a non-list, non-tree")
    if head == "proj":
        idx, v = form[1], args[1]
        if not (isinstance(idx, int) and isinstance(v, VTuple) and 0 <= idx < len(v)):
            raise DefinitionError("bad proj")
        return v[idx]

    if isinstance(head, str):
        return eval_call(defs, head, args, fuel, bounds)
    raise DefinitionError(f"bad expression {to_text(form)}")


# --- generators -----------------------------------------------------------
#
# generator fuel counts recursive generator descents only; plain function
# calls inside generator bodies run at the evaluation fuel from bounds, so
# a shallow constructor sequence may still invoke deep helper recursion.

def _has_choice(defs: dict, form) -> bool:
    if isinstance(form, list) and form:
        head = form[0]
        if head in _CHOICE_FORMS:
            return True
        if isinstance(head, str):
            fd = defs.get(head)
            if fd is not None and fd.generator:
                return True
        return any(_has_choice(defs, f) for f in form[1:])
    return False


def _arg_products(defs, forms, env, gfuel, bounds):
    """expand each argument form, yield every tuple in their product."""
    sets = []
    for f in forms:
        sub: list = []
        _expand(defs, f, env, gfuel, bounds, sub)
        sets.append(sub)
    def rec(i, acc):
        if i == len(sets):
            yield tuple(acc)
            return
        for a in sets[i]:
            acc.append(a)
            yield from rec(i + 1, acc)
            acc.pop()
    yield from rec(0, [])


def _apply_strict(defs, head, args, env, bounds):
    """apply a strict builtin or function to already-resolved values."""
    if any(a is UNDEF for a in args):
        return UNDEF
    names = [f"%arg{i}" for i in range(len(args))]
    env2 = dict(env)
    env2.update(zip(names, args))
    return eval_expr(defs, [head] + names, env2, bounds.effective_fuel(), bounds)


def _expand(defs, form, env, gfuel, bounds, out):
    """collecting semantics: append every resolution's value to out."""
    if not _has_choice(defs, form):
        out.append(eval_expr(defs, form, env, bounds.effective_fuel(), bounds))
        return
    head = form[0]
    if head == "choose":
        for alt in form[1:]:
            _expand(defs, alt, env, gfuel, bounds, out)
        return
    if head == "choose-int":
        if len(form) == 3:
            ends = []
            for b in form[1:]:
                if isinstance(b, int) and not isinstance(b, bool):
                    ends.append(b)
                    continue
                # computed endpoint, e.g. a generator parameter
                v = eval_expr(defs, b, env, bounds.effective_fuel(), bounds)
                if not isinstance(v, int) or isinstance(v, bool):
                    raise DefinitionError(
                        f"choose-int endpoint {to_text(b)} must evaluate "
                        "to an int")
                ends.append(v)
            lo, hi = ends
        else:
            lo, hi = bounds.int_min, bounds.int_max
        out.extend(range(lo, hi + 1))
        return
    if head == "if":
        for (c,) in _arg_products(defs, [form[1]], env, gfuel, bounds):
            if c is UNDEF:
                out.append(UNDEF)
            elif not isinstance(c, bool):
                raise DefinitionError("if condition must be bool")
            else:
                _expand(defs, form[2] if c else form[3], env, gfuel, bounds, out)
        return
    if head == "match":
        for (v,) in _arg_products(defs, [form[1]], env, gfuel, bounds):
            if v is UNDEF:
                out.append(UNDEF)
                continue
            hit = False
            for arm in form[2:]:
                got = _match(arm[0], v, env)
                if got is not None:
                    _expand(defs, arm[1], got, gfuel, bounds, out)
                    hit = True
                    break
            if not hit:
                out.append(UNDEF)
        return
    gd = defs.get(head) if isinstance(head, str) else None
    if gd is not None and gd.generator:
        for args in _arg_products(defs, form[1:], env, gfuel, bounds):
            if any(a is UNDEF for a in args) or gfuel <= 0:
                out.append(UNDEF)
            else:
                genv = {p[0]: a for p, a in zip(gd.params, args)}
                _expand(defs, gd.body, genv, gfuel - 1, bounds, out)
        return
    # ordinary strict form over choicy arguments
    for args in _arg_products(defs, form[1:], env, gfuel, bounds):
        out.append(_apply_strict(defs, head, args, env, bounds))


def expand_generator(defs: dict, name: str, fuel: int, bounds: Bounds, args=()) -> list:
    """all distinct values a generator can produce, in first-derivation order.

    fuel bounds recursive generator descents; the top-level body always
    expands, so fuel 0 yields the non-recursive alternatives.  resolutions
    that come out UNDEF (fuel exhausted, bound overflow) contribute nothing.
    """
    gd = defs.get(name)
    if gd is None or not gd.generator:
        raise DefinitionError(f"unknown generator {name}")
    if len(args) != len(gd.params):
        raise DefinitionError(f"generator {name} expects {len(gd.params)} args")
    if args:
        _sort_check(gd, args)
    env = {p[0]: a for p, a in zip(gd.params, args)}
    raw: list = []
    _expand(defs, gd.body, env, fuel, bounds, raw)
    seen = set()
    vals = []
    for v in raw:
        if v is UNDEF:
            continue
        key = (value_sort(v), v)
        if key not in seen:
            seen.add(key)
            vals.append(v)
    return vals


# --- queries --------------------------------------------------------------

def query_holds(defs: dict, query, example: dict, fuel: int, bounds: Bounds):
    """three-valued query check: True, False, or UNDEF.

    query is a list of (targets, expr) pairs; targets is a tuple of output
    variable names (len > 1 destructures a tuple result).  expr mentions
    input variables only.
    """
    for targets, expr in query:
        for t in targets:
            if t not in example:
                raise DefinitionError(f"query variable {t} unbound in example")
        v = eval_expr(defs, expr, example, fuel, bounds)
        if v is UNDEF:
            return UNDEF
        if len(targets) == 1:
            got = (v,)
        else:
            if not (isinstance(v, VTuple) and len(v) == len(targets)):
                raise DefinitionError("query atom arity mismatch")
            got = tuple(v)
        for t, g in zip(targets, got):
            if example[t] != g:
                return False
    return True
