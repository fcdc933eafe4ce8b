"""exhaustive reference route for small problems.

walks every term the grammar derives, keeps the sound ones, and reports
the intersection of their meanings.  evaluation here is the plain scalar
interpreter applied example by example (with per-atom caching and direct
boolean composition), deliberately avoiding the engine's search loops,
bitsets, and vectorized gathers, so agreement between the two routes is
evidence rather than tautology.
"""

from __future__ import annotations

import numpy as np

from .grammar import enumerate_terms, eval_prop, language_size, term_sexpr

__all__ = ["BruteForce"]


def _key(form):
    if isinstance(form, (list, tuple)):
        return tuple(_key(f) for f in form)
    return form


class BruteForce:
    def __init__(self, grammar, domain, max_terms=20000, max_examples=200000):
        n = language_size(grammar)
        if n.saturated or n.count > max_terms:
            raise ValueError(f"grammar too large for the exhaustive route "
                             f"({n.count} terms)")
        total = domain.n_pos + domain.n_neg
        if total > max_examples:
            raise ValueError(f"domain too large for the exhaustive route "
                             f"({total} examples)")
        self.grammar = grammar
        self.domain = domain
        self._pos_envs = [domain.example(f) for f in domain.pos_idx]
        self._neg_envs = [domain.example(f) for f in domain.neg_idx]
        self._cache = {}

    def _arrays(self, form):
        """(acceptance over positives, acceptance over negatives)."""
        if isinstance(form, (tuple, list)) and form and \
                form[0] in ("or", "and", "not", "=>"):
            parts = [self._arrays(f) for f in form[1:]]
            if form[0] == "not":
                return ~parts[0][0], ~parts[0][1]
            if form[0] == "=>":
                return (~parts[0][0] | parts[1][0],
                        ~parts[0][1] | parts[1][1])
            out_p, out_n = parts[0]
            for p, q in parts[1:]:
                if form[0] == "or":
                    out_p, out_n = out_p | p, out_n | q
                else:
                    out_p, out_n = out_p & p, out_n & q
            return out_p, out_n
        k = _key(form)
        hit = self._cache.get(k)
        if hit is None:
            d = self.domain
            p = np.fromiter(
                (eval_prop(d.defs, form, env, d.fuel, d.bounds)
                 for env in self._pos_envs), dtype=bool,
                count=len(self._pos_envs))
            q = np.fromiter(
                (eval_prop(d.defs, form, env, d.fuel, d.bounds)
                 for env in self._neg_envs), dtype=bool,
                count=len(self._neg_envs))
            hit = (p, q)
            self._cache[k] = hit
        return hit

    def term_arrays(self, term):
        return self._arrays(term_sexpr(term))

    def sound_stream(self):
        """(term, acceptance over negatives) for every sound term."""
        for term in enumerate_terms(self.grammar):
            p, q = self.term_arrays(term)
            if p.all():
                yield term, q

    def conjunction(self):
        """negatives accepted by the meet of all sound terms."""
        out = np.ones(self.domain.n_neg, dtype=bool)
        for _, q in self.sound_stream():
            out &= q
        return out

    def is_best(self, neg_acc):
        """no sound term accepts strictly fewer negatives than neg_acc."""
        for _, q in self.sound_stream():
            if not (q & ~neg_acc).any() and (neg_acc & ~q).any():
                return False
        return True
