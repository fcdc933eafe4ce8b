"""vectorized property evaluation over flat-indexed example grids.

the example space of a problem is the cartesian product of per-variable
value lists, addressed by a flat index (first declared variable slowest).
this module evaluates property expressions on arbitrary flat-index subsets
using numpy gathers from small per-value feature tables, so cost scales
with the subset size rather than term count times grid size.

structured subexpressions that are not bare variables (semantic calls,
cons/snoc chains) are handled as table expressions: evaluated once per
distinct assignment of the variables they mention, then gathered.  any
form the compiler does not recognize falls back to a scalar loop, which
is always correct.
"""

from __future__ import annotations

import numpy as np

from .semcore import Tree, VTuple, value_sort
from .grammar import PartialityError, eval_prop

__all__ = ["Grid", "VectorEvaluator"]

_EMPTY_MIN = np.iinfo(np.int64).max  # min over no elements
_EMPTY_MAX = np.iinfo(np.int64).min

_CMP_SWAP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}

_CONSTS = ("true", "false", "nil", "leaf")


class Grid:
    """per-variable value lists and flat-index arithmetic."""

    def __init__(self, variables, var_values):
        self.variables = tuple(variables)
        self.var_values = {v: list(var_values[v]) for v in self.variables}
        for v in self.variables:
            if not self.var_values[v]:
                raise ValueError(f"empty domain for variable {v}")
        self.sizes = {v: len(self.var_values[v]) for v in self.variables}
        strides = {}
        acc = 1
        for v in reversed(self.variables):
            strides[v] = acc
            acc *= self.sizes[v]
        self.strides = strides
        self.total = acc

    def var_col(self, var, idxs):
        """per-variable value index for each flat index."""
        return (idxs // self.strides[var]) % self.sizes[var]

    def example(self, flat):
        return {v: self.var_values[v][(flat // self.strides[v]) % self.sizes[v]]
                for v in self.variables}

    def flat_of(self, example):
        acc = 0
        for v in self.variables:
            acc += self.var_values[v].index(example[v]) * self.strides[v]
        return acc


def _inorder(t):
    out = []
    def walk(n):
        if n is not None:
            walk(n.left)
            out.append(n.val)
            walk(n.right)
    walk(t)
    return out


def _elems(v):
    if isinstance(v, tuple) and not isinstance(v, VTuple):
        return list(v)
    if v is None or isinstance(v, Tree):
        return _inorder(v)
    raise PartialityError("quantifier domain is not a list or tree")


def _vkey(v):
    return (value_sort(v), v)


class _ValueTable:
    """feature arrays for an ordered list of structured values."""

    def __init__(self, values, intern):
        self.values = values
        self.ids = np.array(
            [intern.setdefault(_vkey(v), len(intern)) for v in values],
            dtype=np.int64)
        self._stats = None
        self._member = None

    def elem_stats(self):
        if self._stats is None:
            elems = [_elems(v) for v in self.values]
            ln = np.array([len(e) for e in elems], dtype=np.int64)
            mn = np.array([min(e) if e else _EMPTY_MIN for e in elems], dtype=np.int64)
            mx = np.array([max(e) if e else _EMPTY_MAX for e in elems], dtype=np.int64)
            self._stats = (ln, mn, mx, elems)
        return self._stats

    def member_matrix(self, lo, hi):
        if self._member is None:
            elems = self.elem_stats()[3]
            m = np.zeros((len(self.values), hi - lo + 1), dtype=bool)
            for i, e in enumerate(elems):
                for x in e:
                    if lo <= x <= hi:
                        m[i, x - lo] = True
            self._member = m
        return self._member


class _Fallback(Exception):
    pass


class VectorEvaluator:
    def __init__(self, defs, grid, fuel, bounds):
        self.defs = defs
        self.grid = grid
        self.fuel = fuel
        self.bounds = bounds
        self.intern = {}
        self._var_tables = {}
        self._expr_tables = {}
        self.cache_limit = None  # max cached expression tables, None = no cap
        self.fallbacks = 0  # scalar-loop uses, observable in tests

    # --- per-variable features --------------------------------------------

    def _vtable(self, var):
        t = self._var_tables.get(var)
        if t is None:
            t = _ValueTable(self.grid.var_values[var], self.intern)
            self._var_tables[var] = t
        return t

    def _var_sort(self, var):
        return value_sort(self.grid.var_values[var][0])

    # --- table expressions ----------------------------------------------------

    def _expr_table(self, form):
        """evaluate a structured expression once per referenced-var combo."""
        k = _hashable(form)
        hit = self._expr_tables.get(k)
        if hit is not None:
            return hit
        free = set()
        _free_vars(self.defs, form, frozenset(), free)
        axes = tuple(v for v in self.grid.variables if v in free)
        missing = free - set(axes)
        if missing:
            raise PartialityError(f"unbound variable {sorted(missing)[0]}")
        values = []
        env = {}
        def rec(i):
            if i == len(axes):
                values.append(eval_prop(self.defs, form, dict(env), self.fuel, self.bounds))
                return
            for v in self.grid.var_values[axes[i]]:
                env[axes[i]] = v
                rec(i + 1)
        rec(0)
        res = (axes, _ValueTable(values, self.intern))
        if self.cache_limit is not None and \
                len(self._expr_tables) >= self.cache_limit:
            self._expr_tables.pop(next(iter(self._expr_tables)))
        self._expr_tables[k] = res
        return res

    def warm(self, form):
        """precompute the table for one structured expression.

        raises PartialityError if the expression is undefined anywhere on
        the full grid, which makes this the load-time totality probe.
        """
        self._expr_table(form)

    def _table_rows(self, axes, idxs):
        if not axes:
            return np.zeros(len(idxs), dtype=np.int64)
        row = self.grid.var_col(axes[0], idxs)
        for v in axes[1:]:
            row = row * self.grid.sizes[v] + self.grid.var_col(v, idxs)
        return row

    # --- static sorts -----------------------------------------------------------

    def _static_sort(self, form):
        if isinstance(form, bool):
            return "bool"
        if isinstance(form, int):
            return "int"
        if isinstance(form, str):
            if form in ("true", "false"):
                return "bool"
            if form in ("nil", "leaf"):
                return "value"
            if form in self.grid.sizes:
                s = self._var_sort(form)
                return s if s in ("int", "bool") else "value"
            return "value"
        head = form[0]
        if head in ("+", "-", "*", "len"):
            return "int"
        if head in ("or", "and", "not", "=>", "<", "<=", ">", ">=",
                    "=", "!=", "eq", "neq", "isEmpty", "forall", "exists"):
            return "bool"
        if head in ("cons", "snoc", "tuple"):
            return "value"
        if head in self.defs:
            _, tbl = self._expr_table(form)
            s = value_sort(tbl.values[0])
            return s if s in ("int", "bool") else "value"
        return "value"

    # --- evaluation ----------------------------------------------------------

    def eval_bool(self, form, idxs):
        """boolean value of form on each example in idxs."""
        try:
            return self._bool(form, idxs)
        except _Fallback:
            return self._scalar(form, idxs)

    def _scalar(self, form, idxs):
        self.fallbacks += 1
        g = self.grid
        out = np.empty(len(idxs), dtype=bool)
        for i, flat in enumerate(idxs):
            out[i] = eval_prop(self.defs, form, g.example(int(flat)), self.fuel, self.bounds)
        return out

    def _bool(self, form, idxs):
        if form is True or form == "true":
            return np.ones(len(idxs), dtype=bool)
        if form is False or form == "false":
            return np.zeros(len(idxs), dtype=bool)
        if isinstance(form, str):
            if form in self.grid.sizes and self._var_sort(form) == "bool":
                tbl = np.array(self.grid.var_values[form], dtype=bool)
                return tbl[self.grid.var_col(form, idxs)]
            raise _Fallback
        if not isinstance(form, (tuple, list)):
            raise _Fallback
        head = form[0]
        if head == "or":
            out = self._bool(form[1], idxs)
            for f in form[2:]:
                out = out | self._bool(f, idxs)
            return out
        if head == "and":
            out = self._bool(form[1], idxs)
            for f in form[2:]:
                out = out & self._bool(f, idxs)
            return out
        if head == "not":
            return ~self._bool(form[1], idxs)
        if head == "=>":
            return ~self._bool(form[1], idxs) | self._bool(form[2], idxs)
        if head in ("<", "<=", ">", ">="):
            a = self._int(form[1], idxs)
            b = self._int(form[2], idxs)
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[head]
        if head in ("=", "!=", "eq", "neq"):
            lhs, rhs = form[1], form[2]
            sa, sb = self._static_sort(lhs), self._static_sort(rhs)
            if "int" in (sa, sb):
                r = self._int(lhs, idxs) == self._int(rhs, idxs)
            elif "bool" in (sa, sb):
                r = self._bool(lhs, idxs) == self._bool(rhs, idxs)
            else:
                r = self._value_ids(lhs, idxs) == self._value_ids(rhs, idxs)
            return r if head in ("=", "eq") else ~r
        if head == "isEmpty":
            return self._elem_feature(form[1], idxs, "len") == 0
        if head in ("forall", "exists"):
            return self._quant(head, form[1], form[2], form[3], idxs)
        if head in self.defs:
            axes, tbl = self._expr_table(form)
            if value_sort(tbl.values[0]) != "bool":
                raise _Fallback
            vals = np.array(tbl.values, dtype=bool)
            return vals[self._table_rows(axes, idxs)]
        raise _Fallback

    def _int(self, form, idxs):
        if isinstance(form, int) and not isinstance(form, bool):
            return np.full(len(idxs), form, dtype=np.int64)
        if isinstance(form, str):
            if form in self.grid.sizes and self._var_sort(form) == "int":
                tbl = np.array(self.grid.var_values[form], dtype=np.int64)
                return tbl[self.grid.var_col(form, idxs)]
            raise _Fallback
        if not isinstance(form, (tuple, list)):
            raise _Fallback
        head = form[0]
        if head == "+":
            out = self._int(form[1], idxs)
            for f in form[2:]:
                out = out + self._int(f, idxs)
            return out
        if head == "-":
            if len(form) == 2:
                return -self._int(form[1], idxs)
            return self._int(form[1], idxs) - self._int(form[2], idxs)
        if head == "*":
            out = self._int(form[1], idxs)
            for f in form[2:]:
                out = out * self._int(f, idxs)
            return out
        if head == "len":
            return self._elem_feature(form[1], idxs, "len")
        if head in self.defs:
            axes, tbl = self._expr_table(form)
            if value_sort(tbl.values[0]) != "int":
                raise _Fallback
            vals = np.array(tbl.values, dtype=np.int64)
            return vals[self._table_rows(axes, idxs)]
        raise _Fallback

    def _value_source(self, form):
        """(table, rows-fn) for an expression denoting structured values."""
        if isinstance(form, str) and form in self.grid.sizes:
            var = form
            tbl = self._vtable(var)
            return tbl, lambda idxs: self.grid.var_col(var, idxs)
        if form in ("nil", "leaf") or isinstance(form, (tuple, list)):
            axes, tbl = self._expr_table(form)
            return tbl, lambda idxs: self._table_rows(axes, idxs)
        raise _Fallback

    def _value_ids(self, form, idxs):
        tbl, rows = self._value_source(form)
        return tbl.ids[rows(idxs)]

    def _elem_feature(self, form, idxs, which):
        tbl, rows = self._value_source(form)
        ln, mn, mx, _ = tbl.elem_stats()
        return {"len": ln, "min": mn, "max": mx}[which][rows(idxs)]

    def _quant(self, kind, binder, dom, body, idxs):
        # recognized shape: comparison between the binder and an int expr
        if not (isinstance(body, (tuple, list)) and len(body) == 3):
            raise _Fallback
        op, a, b = body
        if op in ("eq", "neq"):
            op = "=" if op == "eq" else "!="
        if op not in _CMP_SWAP:
            raise _Fallback
        if a == binder and not _mentions(b, binder):
            rhs = b
        elif b == binder and not _mentions(a, binder):
            rhs = a
            op = _CMP_SWAP[op]
        else:
            raise _Fallback
        tbl, rows = self._value_source(dom)
        r = rows(idxs)
        ln, mn, mx, _ = tbl.elem_stats()
        n, lo, hi = ln[r], mn[r], mx[r]
        i = self._int(rhs, idxs)
        empty = n == 0
        if op in ("<", "<=", ">", ">="):
            if kind == "forall":
                cond = {"<": hi < i, "<=": hi <= i, ">": lo > i, ">=": lo >= i}[op]
                return empty | cond
            cond = {"<": lo < i, "<=": lo <= i, ">": hi > i, ">=": hi >= i}[op]
            return ~empty & cond
        # membership forms gather from the per-value member matrix
        bmin, bmax = self.bounds.int_min, self.bounds.int_max
        member = tbl.member_matrix(bmin, bmax)
        inb = (i >= bmin) & (i <= bmax)
        col = np.where(inb, i - bmin, 0)
        has = member[r, col] & inb
        if op == "=":
            if kind == "exists":
                return has
            return empty | ((lo == i) & (hi == i))
        if kind == "forall":
            return ~has
        # exists an element different from i: nonempty and not all equal to i
        return ~empty & ~((lo == i) & (hi == i))


def _mentions(form, name):
    if form == name:
        return True
    if isinstance(form, (tuple, list)):
        return any(_mentions(f, name) for f in form[1:])
    return False


def _free_vars(defs, form, bound, out):
    if isinstance(form, str):
        if form not in _CONSTS and form not in bound and form not in defs:
            out.add(form)
        return
    if isinstance(form, (tuple, list)) and form:
        if form[0] in ("forall", "exists"):
            _free_vars(defs, form[2], bound, out)
            _free_vars(defs, form[3], bound | {form[1]}, out)
            return
        for f in form[1:]:
            _free_vars(defs, f, bound, out)


def _hashable(form):
    if isinstance(form, (list, tuple)):
        return tuple(_hashable(f) for f in form)
    return form
