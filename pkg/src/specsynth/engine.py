"""counterexample-guided search for the strongest grammar-expressible
conjunction of sound properties over a finite example domain.

the example domain is the product of per-variable value lists, split into
positives (query holds), negatives (query fails), and excluded cells
(query undefined).  all search primitives are deterministic scans in flat
domain order, so every run of the same problem produces the same result,
the same trace, and the same counterexamples.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from . import semcore
from .semcore import UNDEF, value_sort, value_text
from .grammar import (GrammarSpec, NTRef, Term, term_sexpr, term_text,
                      disjunction_shape, enumerate_terms,
                      _dec, _minmax, _terms)
from .interp import Grid, VectorEvaluator, _free_vars

__all__ = [
    "DomainError", "ExampleDomain", "TermSpace", "DisjunctiveTermSpace",
    "EngineOptions", "EngineResult", "Engine", "InvariantViolation",
    "PrimitiveTimeout", "TOP", "synthesize", "check_soundness",
    "check_precision", "synthesize_strongest_conjunct",
    "synthesize_strongest_conjunction",
]


class DomainError(ValueError):
    pass


def _listify(form):
    if isinstance(form, (list, tuple)):
        return [_listify(f) for f in form]
    return form


class _Top:
    """the always-true property, used as the initial candidate."""

    def __repr__(self):
        return "TOP"


TOP = _Top()


def _is_top(phi):
    return phi is TOP


# --- example domain -----------------------------------------------------------


class ExampleDomain:
    """labelled product of per-variable domains.

    label 1 marks positives (every query atom defined and matching),
    label 2 negatives (every atom defined, some mismatch), label 0 cells
    excluded because an atom is undefined there.  flat index order, with
    the first declared variable varying slowest, is the canonical example
    order used by every deterministic scan.
    """

    def __init__(self, defs, variables, var_values, query, bounds, fuel=None):
        self.defs = defs
        self.bounds = bounds
        self.fuel = bounds.effective_fuel() if fuel is None else fuel
        self.query = query
        self.grid = Grid(variables, var_values)
        self.evaluator = VectorEvaluator(defs, self.grid, self.fuel, bounds)
        label = self._label_grid()
        self.label = label
        self.pos_idx = np.flatnonzero(label == 1).astype(np.int64)
        self.neg_idx = np.flatnonzero(label == 2).astype(np.int64)
        self.n_pos = len(self.pos_idx)
        self.n_neg = len(self.neg_idx)

    def _label_grid(self):
        g = self.grid
        shape = tuple(g.sizes[v] for v in g.variables)
        defined = np.ones((1,) * len(shape), dtype=bool)
        match = np.ones((1,) * len(shape), dtype=bool)
        for targets, expr in self.query:
            d, m = self._atom_arrays(targets, expr)
            defined = defined & d
            match = match & d & m
        defined = np.broadcast_to(defined, shape)
        match = np.broadcast_to(match, shape)
        out = np.where(defined, np.where(match, np.uint8(1), np.uint8(2)),
                       np.uint8(0))
        return out.ravel()

    def _atom_arrays(self, targets, expr):
        """broadcastable defined/match arrays for one query atom."""
        g = self.grid
        expr = _listify(expr)
        free = set()
        _free_vars(self.defs, expr, frozenset(), free)
        unknown = free - set(g.variables)
        if unknown:
            raise DomainError(
                f"query mentions unknown variable {sorted(unknown)[0]}")
        if set(targets) & free:
            raise DomainError(
                f"query target {sorted(set(targets) & free)[0]} is also read "
                f"by its own atom")
        axes_in = tuple(v for v in g.variables if v in free)
        n_comb = 1
        for v in axes_in:
            n_comb *= g.sizes[v]
        results = []
        flags = np.zeros(n_comb, dtype=bool)
        for ci, combo in enumerate(itertools.product(
                *(g.var_values[v] for v in axes_in))):
            env = dict(zip(axes_in, combo))
            r = semcore.eval_expr(self.defs, expr, env, self.fuel, self.bounds)
            results.append(r)
            flags[ci] = r is not UNDEF
        n_out = len(targets)
        shape1 = tuple(g.sizes[v] if v in axes_in else 1 for v in g.variables)
        defined = flags.reshape(shape1)
        match = np.ones((1,) * len(g.variables), dtype=bool)
        for j, tv in enumerate(targets):
            if tv not in g.sizes:
                raise DomainError(
                    f"query target {tv} is not a declared variable")
            vpos = {(value_sort(v), v): k
                    for k, v in enumerate(g.var_values[tv])}
            part_idx = np.full(n_comb, -1, dtype=np.int64)
            for ci, r in enumerate(results):
                if r is UNDEF:
                    continue
                part = r[j] if n_out > 1 else r
                k = vpos.get((value_sort(part), part))
                if k is None:
                    raise DomainError(
                        f"query output {value_text(part)} for {tv} is outside "
                        f"the declared domain of {tv}")
                part_idx[ci] = k
            mj = part_idx[:, None] == np.arange(g.sizes[tv])[None, :]
            src = list(axes_in) + [tv]
            order = [v for v in g.variables if v in src]
            mj = mj.reshape([g.sizes[v] for v in axes_in] + [g.sizes[tv]])
            perm = [src.index(v) for v in order]
            mj = np.ascontiguousarray(np.transpose(mj, perm))
            mshape = tuple(g.sizes[v] if v in order else 1
                           for v in g.variables)
            match = match & mj.reshape(mshape)
        return defined, match

    def example(self, flat):
        return self.grid.example(int(flat))

    def render(self, flat):
        ex = self.example(flat)
        return {v: value_text(ex[v]) for v in self.grid.variables}


# --- bitset helpers -------------------------------------------------------------


def _mask_of(bools):
    """bool array to arbitrary-precision bitset, bit i = element i."""
    return int.from_bytes(np.packbits(bools, bitorder="little").tobytes(),
                          "little")


def _bits_at(positions, n):
    arr = np.zeros(n, dtype=bool)
    arr[positions] = True
    return _mask_of(arr)


def _low_bit(x):
    return (x & -x).bit_length() - 1


# --- term spaces ------------------------------------------------------------------


class PrimitiveTimeout(Exception):
    def __init__(self, kind, elapsed):
        super().__init__(
            f"{kind} exceeded its time budget after {elapsed:.1f}s")
        self.kind = kind
        self.elapsed = elapsed


class _ConjunctTimeout(Exception):
    def __init__(self, phi_last):
        super().__init__("conjunct search timed out")
        self.phi_last = phi_last


_CHUNK = 1 << 16


class TermSpace:
    """candidate stream plus restricted evaluation, general form.

    consistency with the current example sets is checked by evaluating
    each candidate only on those examples, so cost follows the example
    sets rather than the whole domain.
    """

    def __init__(self, grammar: GrammarSpec, domain: ExampleDomain):
        self.grammar = grammar
        self.domain = domain
        self.ev = domain.evaluator

    def candidates(self):
        return enumerate_terms(self.grammar)

    def accepts_pos(self, term, flats):
        return self.ev.eval_bool(term_sexpr(term), flats)

    def accepts_neg(self, term, flats):
        return self.ev.eval_bool(term_sexpr(term), flats)

    def first_rejected_pos(self, term, deadline):
        t0 = time.monotonic()
        pos = self.domain.pos_idx
        for start in range(0, len(pos), _CHUNK):
            chunk = pos[start:start + _CHUNK]
            acc = self.accepts_pos(term, chunk)
            if not acc.all():
                return int(chunk[int(np.argmax(~acc))])
            if time.monotonic() > deadline:
                raise PrimitiveTimeout("soundness scan",
                                       time.monotonic() - t0)
        return None

    def first_consistent(self, epos, eneg, improve, deadline):
        """first candidate accepting epos and rejecting eneg; with improve
        given, the candidate must also reject some improve example, and
        the first such example is returned beside it."""
        t0 = time.monotonic()
        ep = np.asarray(list(epos), dtype=np.int64)
        en = np.asarray(list(eneg), dtype=np.int64)
        for n, term in enumerate(self.candidates()):
            if n % 64 == 0 and time.monotonic() > deadline:
                raise PrimitiveTimeout("term scan", time.monotonic() - t0)
            if ep.size and not self.accepts_pos(term, ep).all():
                continue
            if en.size and self.accepts_neg(term, en).any():
                continue
            if improve is None:
                return term, None
            for start in range(0, len(improve), _CHUNK):
                chunk = improve[start:start + _CHUNK]
                acc = self.accepts_neg(term, chunk)
                if not acc.all():
                    return term, int(chunk[int(np.argmax(~acc))])
        return None


class DisjunctiveTermSpace(TermSpace):
    """pruned search for grammars of shape true | A | (or A A) | ... .

    atom interpretations over the whole domain are precomputed as bitsets;
    candidate disjunctions are visited in exactly the order the general
    enumerator would produce them, with branches pruned once no extension
    can qualify, so both paths return identical results.
    """

    def __init__(self, grammar, domain, shape):
        super().__init__(grammar, domain)
        self.atom_nt, self.max_width = shape
        self.prods = grammar.prods[grammar.start]
        budgets = _dec(grammar, grammar.init_budgets(), grammar.start)
        mm = _minmax(grammar, self.atom_nt, budgets)
        self.min_atom, self.max_atom = mm
        self.atoms_by_size = {}
        self._atom_masks = {}
        npos, nneg = domain.n_pos, domain.n_neg
        for size in range(mm[0], mm[1] + 1):
            row = []
            for a in _terms(grammar, self.atom_nt, size, budgets):
                form = term_sexpr(a)
                pm = _mask_of(self.ev.eval_bool(form, domain.pos_idx)) \
                    if npos else 0
                nm = _mask_of(self.ev.eval_bool(form, domain.neg_idx)) \
                    if nneg else 0
                row.append((a, pm, nm))
                self._atom_masks[id(a)] = (pm, nm)
            self.atoms_by_size[size] = row
        self._pos_full = (1 << npos) - 1
        self._neg_full = (1 << nneg) - 1

    def _masks(self, term):
        """(positive, negative) acceptance bitsets by derivation shape."""
        hit = self._atom_masks.get(id(term))
        if hit is not None:
            return hit
        if term.prod.nt != self.grammar.start:
            d = self.domain
            pm = _mask_of(self.ev.eval_bool(term_sexpr(term), d.pos_idx)) \
                if d.n_pos else 0
            nm = _mask_of(self.ev.eval_bool(term_sexpr(term), d.neg_idx)) \
                if d.n_neg else 0
            self._atom_masks[id(term)] = (pm, nm)
            return pm, nm
        if term.prod.template == "true":
            return self._pos_full, self._neg_full
        if isinstance(term.prod.template, NTRef):
            return self._masks(term.outs[0])
        pm, nm = 0, 0
        for a in term.outs:
            am = self._masks(a)
            pm |= am[0]
            nm |= am[1]
        return pm, nm

    def _bools(self, mask, flats, idx_arr):
        pos = np.searchsorted(idx_arr, flats)
        n = len(idx_arr)
        b = mask.to_bytes(max((n + 7) // 8, 1), "little")
        bits = np.unpackbits(np.frombuffer(b, dtype=np.uint8),
                             bitorder="little")[:n]
        return bits[pos].astype(bool)

    def accepts_pos(self, term, flats):
        return self._bools(self._masks(term)[0], flats, self.domain.pos_idx)

    def accepts_neg(self, term, flats):
        return self._bools(self._masks(term)[1], flats, self.domain.neg_idx)

    def first_rejected_pos(self, term, deadline):
        missing = ~self._masks(term)[0] & self._pos_full
        if missing == 0:
            return None
        return int(self.domain.pos_idx[_low_bit(missing)])

    def first_consistent(self, epos, eneg, improve, deadline):
        t0 = time.monotonic()
        d = self.domain
        epos = list(epos)
        eneg = list(eneg)
        ep = _bits_at(np.searchsorted(d.pos_idx,
                                      np.asarray(epos, dtype=np.int64)),
                      d.n_pos) if epos else 0
        en = _bits_at(np.searchsorted(d.neg_idx,
                                      np.asarray(eneg, dtype=np.int64)),
                      d.n_neg) if eneg else 0
        imp = None
        if improve is not None:
            imp = _bits_at(np.searchsorted(d.neg_idx, improve), d.n_neg)
        allowed = {s: [e for e in row if (e[2] & en) == 0]
                   for s, row in self.atoms_by_size.items()}
        sizes = [s for s in sorted(allowed) if allowed[s]]
        minA = sizes[0] if sizes else None
        top_mm = _minmax(self.grammar, self.grammar.start,
                         self.grammar.init_budgets())
        ticker = 0

        def tick():
            nonlocal ticker
            ticker += 1
            if ticker % 4096 == 0 and time.monotonic() > deadline:
                raise PrimitiveTimeout("term scan", time.monotonic() - t0)

        def hit(term, nm):
            if imp is None:
                return term, None
            rem = imp & ~nm
            if rem:
                return term, int(d.neg_idx[_low_bit(rem)])
            return None

        for total in range(top_mm[0], top_mm[1] + 1):
            if total == 1:
                if en == 0 and imp is None:
                    return Term(self.prods[0], (), 1), None
                continue
            rem = total - 1
            for (a, pm, nm) in allowed.get(rem, ()):
                tick()
                if ep & ~pm:
                    continue
                h = hit(Term(self.prods[1], (a,), total), nm)
                if h:
                    return h
            if minA is None or self.max_width < 2 or rem < 2 * minA:
                continue
            for s1 in range(minA, min(self.max_atom, rem - minA) + 1):
                for (a1, p1, n1) in allowed.get(s1, ()):
                    if imp is not None and (imp & ~n1) == 0:
                        continue
                    for (a2, p2, n2) in allowed.get(rem - s1, ()):
                        tick()
                        if ep & ~(p1 | p2):
                            continue
                        h = hit(Term(self.prods[2], (a1, a2), total), n1 | n2)
                        if h:
                            return h
            if self.max_width < 3 or rem < 3 * minA:
                continue
            for s1 in range(minA, min(self.max_atom, rem - 2 * minA) + 1):
                for (a1, p1, n1) in allowed.get(s1, ()):
                    r1 = None if imp is None else imp & ~n1
                    if r1 == 0:
                        continue
                    for s2 in range(minA,
                                    min(self.max_atom, rem - s1 - minA) + 1):
                        for (a2, p2, n2) in allowed.get(s2, ()):
                            r2 = None if r1 is None else r1 & ~n2
                            if r2 == 0:
                                continue
                            for (a3, p3, n3) in allowed.get(rem - s1 - s2, ()):
                                tick()
                                if ep & ~(p1 | p2 | p3):
                                    continue
                                h = hit(Term(self.prods[3], (a1, a2, a3),
                                             total), n1 | n2 | n3)
                                if h:
                                    return h
        return None


# --- engine ------------------------------------------------------------------------


@dataclass
class EngineOptions:
    timeout_secs: float = 300.0
    harden: bool = True
    debug_invariants: bool = True
    trace: bool = False
    cache_entries: int | None = None  # cap on cached subexpression tables


@dataclass
class EngineResult:
    conjuncts: list
    partial: bool
    trace: list
    stats: dict
    text_fn: object = staticmethod(term_text)

    @property
    def texts(self):
        return [self.text_fn(t) for t in self.conjuncts]


class InvariantViolation(AssertionError):
    def __init__(self, which, detail, state):
        lines = [f"invariant {which} violated: {detail}"]
        for k, v in state.items():
            lines.append(f"  {k} = {v}")
        super().__init__("\n".join(lines))
        self.which = which
        self.state = state


class Engine:
    _term_text = staticmethod(term_text)

    def __init__(self, grammar, domain, options=None, seeds=(), space=None):
        self.grammar = grammar
        self.domain = domain
        self.options = options or EngineOptions()
        self.seeds = list(seeds)
        domain.evaluator.cache_limit = self.options.cache_entries
        if space is not None:
            self.space = space
        else:
            shape = disjunction_shape(grammar)
            if shape is not None:
                self.space = DisjunctiveTermSpace(grammar, domain, shape)
            else:
                self.space = TermSpace(grammar, domain)
        self.trace = []
        self.stats = {"synthesize": 0, "check_soundness": 0,
                      "check_precision": 0, "issat": 0, "seconds": 0.0,
                      "synthesize_secs": 0.0, "check_soundness_secs": 0.0,
                      "check_precision_secs": 0.0, "issat_secs": 0.0,
                      "last_iter_secs": 0.0}

    # --- tracing ------------------------------------------------------------

    def _record(self, kind, t0, term, example, epos, emust, emay):
        dt = time.monotonic() - t0
        self.stats[kind] += 1
        self.stats[kind + "_secs"] += dt
        self.stats["seconds"] += dt
        if self.options.trace:
            self.trace.append({
                "kind": kind,
                "term": None if term is None else
                        ("true" if _is_top(term) else self._term_text(term)),
                "example": None if example is None
                           else self.domain.render(example),
                "elapsed": dt,
                "n_pos": len(epos),
                "n_must": len(emust),
                "n_may": len(emay),
            })

    def _deadline(self):
        return time.monotonic() + self.options.timeout_secs

    # --- primitives -----------------------------------------------------------

    def synthesize(self, epos, eneg, _ctx=None):
        """smallest grammar term consistent with the examples, if any."""
        t0 = time.monotonic()
        hit = self.space.first_consistent(epos, eneg, None, self._deadline())
        term = None if hit is None else hit[0]
        ctx = _ctx or (tuple(epos), tuple(eneg), ())
        self._record("synthesize", t0, term, None, *ctx)
        return term

    def check_soundness(self, phi, _ctx=((), (), ())):
        """first positive example rejected by phi, in domain order."""
        t0 = time.monotonic()
        if _is_top(phi):
            e = None
        else:
            e = self.space.first_rejected_pos(phi, self._deadline())
        self._record("check_soundness", t0, phi, e, *_ctx)
        return e

    def check_precision(self, phi, psi, epos, emust, _ctx=None):
        """candidate accepting epos, rejecting emust, and rejecting some
        psi example still accepted by phi; none certifies phi precise."""
        t0 = time.monotonic()
        psi_arr = self.domain.neg_idx if psi is None else psi
        if len(psi_arr) == 0 or _is_top(phi):
            targets = psi_arr
        else:
            targets = psi_arr[self.space.accepts_neg(phi, psi_arr)]
        hit = None
        if len(targets):
            hit = self.space.first_consistent(epos, emust, targets,
                                              self._deadline())
        ctx = _ctx or (tuple(epos), tuple(emust), ())
        self._record("check_precision", t0,
                     None if hit is None else hit[0],
                     None if hit is None else hit[1], *ctx)
        return hit

    # --- invariants ----------------------------------------------------------------

    def _accepts_all_pos(self, phi, flats):
        if _is_top(phi) or not len(flats):
            return True
        return bool(self.space.accepts_pos(phi, np.asarray(flats)).all())

    def _rejects_all_neg(self, phi, flats):
        if not len(flats):
            return True
        if _is_top(phi):
            return False
        return not bool(self.space.accepts_neg(phi, np.asarray(flats)).any())

    def _state(self, phi, phi_last, epos, emust, emay):
        r = self.domain.render
        return {
            "phi": "true" if _is_top(phi) else self._term_text(phi),
            "phi_last": ("true" if _is_top(phi_last)
                         else self._term_text(phi_last)),
            "E+": [r(e) for e in epos],
            "E-must": [r(e) for e in emust],
            "E-may": [r(e) for e in emay],
        }

    def _check_inv_1_to_4(self, phi, phi_last, psi, epos, emust, emay):
        state = lambda: self._state(phi, phi_last, epos, emust, emay)
        if not self._accepts_all_pos(phi, epos):
            raise InvariantViolation(1, "phi rejects a collected positive",
                                     state())
        if not self._rejects_all_neg(phi, emust):
            raise InvariantViolation(1, "phi accepts a must negative", state())
        if not self._rejects_all_neg(phi, emay):
            raise InvariantViolation(1, "phi accepts a may negative", state())
        # 2: the latest sound candidate witnesses the musts stay rejectable
        if not _is_top(phi_last):
            if self.space.first_rejected_pos(phi_last,
                                             self._deadline()) is not None:
                raise InvariantViolation(2, "witness phi_last is unsound",
                                         state())
        if not self._rejects_all_neg(phi_last, emust):
            raise InvariantViolation(2, "witness accepts a must negative",
                                     state())
        if not self._accepts_all_pos(phi_last, epos):
            raise InvariantViolation(3, "phi_last rejects a collected positive",
                                     state())
        if emay:
            psi_arr = self.domain.neg_idx if psi is None else psi
            if not np.isin(np.asarray(emay), psi_arr).all():
                raise InvariantViolation(4, "a may negative fell outside psi",
                                         state())

    def _check_inv_5(self, pi, packed):
        for i in range(len(pi)):
            for j in range(i + 1, len(pi)):
                a, b = packed[i], packed[j]
                if not (a & ~b).any() or not (b & ~a).any():
                    raise InvariantViolation(
                        5, "conjuncts are comparable",
                        {"a": self._term_text(pi[i]),
                         "b": self._term_text(pi[j])})

    # --- the two search loops -------------------------------------------------------

    def strongest_conjunct(self, psi, phi_init, epos, emust):
        """refine phi_init into a sound property no sound grammar term
        strictly improves on over psi; returns it with the grown sets."""
        phi = phi_last = phi_init
        emust = list(emust)
        emay = []
        if self.options.trace:
            self.trace.append({
                "kind": "begin_conjunct",
                "term": "true" if _is_top(phi_init) else term_text(phi_init),
                "example": None, "elapsed": 0.0,
                "n_pos": len(epos), "n_must": len(emust), "n_may": 0,
            })
        try:
            while True:
                if self.options.debug_invariants:
                    self._check_inv_1_to_4(phi, phi_last, psi, epos, emust,
                                           emay)
                ctx = (tuple(epos), tuple(emust), tuple(emay))
                eplus = self.check_soundness(phi, ctx)
                if eplus is not None:
                    epos.append(eplus)
                    ctx = (tuple(epos), tuple(emust), tuple(emay))
                    cand = self.synthesize(epos, emust + emay, ctx)
                    if cand is None:
                        phi = phi_last
                        emay = []
                    else:
                        phi = cand
                    continue
                if self.options.harden:
                    emust += emay
                    emay = []
                phi_last = phi
                # the candidate must also reject still-provisional mays, or
                # two sound properties could trade the same pair of
                # witnesses forever; with hardening on the union is just
                # emust
                hit = self.check_precision(
                    phi, psi, epos, emust + emay,
                    (tuple(epos), tuple(emust), tuple(emay)))
                if hit is None:
                    return phi, epos, emust + emay
                cand, eneg = hit
                emay.append(eneg)
                phi = cand
        except PrimitiveTimeout:
            raise _ConjunctTimeout(phi_last)

    def run(self):
        """grow the set of strongest conjuncts until no sound property
        rejects anything the conjunction still accepts."""
        pi = []
        packed = []
        psi = self.domain.neg_idx
        for seed in self.seeds:
            if len(psi):
                psi = psi[self.domain.evaluator.eval_bool(seed, psi)]
        epos = []
        while True:
            t_iter = time.monotonic()
            if self.options.debug_invariants:
                self._check_inv_5(pi, packed)
            try:
                phi, epos, emust = self.strongest_conjunct(psi, TOP, epos, [])
            except _ConjunctTimeout:
                self.stats["last_iter_secs"] = time.monotonic() - t_iter
                return self._result(pi, True)
            if not emust:
                t0 = time.monotonic()
                e = None
                if not _is_top(phi) and len(psi):
                    acc = self.space.accepts_neg(phi, psi)
                    if not acc.all():
                        e = int(psi[int(np.argmax(~acc))])
                self._record("issat", t0, phi, e, epos, emust, ())
                if e is None:
                    self.stats["last_iter_secs"] = time.monotonic() - t_iter
                    return self._result(pi, False)
                emust = [e]
            # the first pass only certified phi against what the conjunction
            # still accepts; re-run unrestricted so the kept property is
            # precise over the whole negative domain, not just psi
            try:
                phi, epos, _ = self.strongest_conjunct(None, phi, epos, emust)
            except _ConjunctTimeout as ct:
                if not _is_top(ct.phi_last):
                    pi.append(ct.phi_last)
                self.stats["last_iter_secs"] = time.monotonic() - t_iter
                return self._result(pi, True)
            pi.append(phi)
            if self.options.debug_invariants:
                packed.append(
                    np.packbits(self.space.accepts_neg(phi,
                                                       self.domain.neg_idx))
                    if self.domain.n_neg else np.zeros(0, dtype=np.uint8))
            if len(psi):
                psi = psi[self.space.accepts_neg(phi, psi)]

    def _result(self, pi, partial):
        return EngineResult(list(pi), partial, self.trace, dict(self.stats),
                            self._term_text)


# --- module-level entry points matching the documented operations ---------------


def synthesize(grammar, domain, epos, eneg, options=None):
    return Engine(grammar, domain, options).synthesize(epos, eneg)


def check_soundness(grammar, domain, phi, options=None):
    return Engine(grammar, domain, options).check_soundness(phi)


def check_precision(grammar, domain, phi, psi, epos, emust, options=None):
    return Engine(grammar, domain, options).check_precision(phi, psi, epos,
                                                            emust)


def synthesize_strongest_conjunct(grammar, domain, psi, phi_init, epos, emust,
                                  options=None):
    eng = Engine(grammar, domain, options)
    return eng.strongest_conjunct(psi, phi_init, list(epos), list(emust))


def synthesize_strongest_conjunction(grammar, domain, options=None, seeds=()):
    return Engine(grammar, domain, options, seeds).run()
