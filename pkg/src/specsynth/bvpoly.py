"""Linear inequality properties over k-bit modular arithmetic.

The property language is single inequalities a*x + b*y + c <= d*x + e*y + f
with unsigned k-bit coefficients, wrap-around arithmetic, and unsigned
comparison. Queries are arbitrary boolean combinations of modular terms over
x and y, evaluated on the full 2^k by 2^k grid. The synthesis engine then
computes the most precise conjunction of inequalities covering the query's
solutions; join of two conjunctions is the abstraction of their union.

Candidate inequalities are identified with their coefficient tuples and
swept in lexicographic order, which doubles as the smallest-first order
since every inequality has the same size. Interpretations over the grid are
packed into uint64 rows so consistency checks are a handful of word ops per
candidate block.
"""

from __future__ import annotations

import multiprocessing
import re
import time
from dataclasses import dataclass

import numpy as np

from .engine import (Engine, PrimitiveTimeout, _bits_at, _low_bit, _mask_of)

DEFAULT_BITS = 4
MAX_BITS = 8
# above this width the coefficient space is no longer sweepable; abstract,
# join and census refuse unless the caller opts in explicitly
SWEEP_BITS = 4

_WORD = np.uint64(0xFFFFFFFFFFFFFFFF)


class WidthError(ValueError):
    pass


def _check_width(k, allow_slow=False):
    if not isinstance(k, int) or not 1 <= k <= MAX_BITS:
        raise WidthError(f"bit width must be an integer in 1..{MAX_BITS}, "
                         f"got {k!r}")


def _check_sweep_width(k, allow_slow):
    _check_width(k)
    if k > SWEEP_BITS and not allow_slow:
        raise WidthError(
            f"sweeping all (2^{k})^6 candidate inequalities at width {k} "
            f"is prohibitively slow; pass allow_slow=True to force it")


# --- inequalities ----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BVIneq:
    """a*x + b*y + c <= d*x + e*y + f, coefficients unsigned k-bit."""

    a: int
    b: int
    c: int
    d: int
    e: int
    f: int

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d, self.e, self.f):
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"coefficients must be unsigned ints, "
                                 f"got {v!r}")


def ineq_text(q):
    return (f"{q.a}x + {q.b}y + {q.c} <= "
            f"{q.d}x + {q.e}y + {q.f}")


def _check_ineq(q, k):
    top = 1 << k
    for v in (q.a, q.b, q.c, q.d, q.e, q.f):
        if v >= top:
            raise ValueError(
                f"coefficient {v} of {ineq_text(q)} exceeds width {k}")


_GRIDS = {}


def _grid_xy(k):
    # flat point index = x * 2^k + y, x slowest
    if k not in _GRIDS:
        pts = np.arange(1 << (2 * k))
        _GRIDS[k] = ((pts >> k).astype(np.uint32),
                     (pts & ((1 << k) - 1)).astype(np.uint32))
    return _GRIDS[k]


def ineq_bools(q, k):
    """solution indicator of q over the grid, one bool per flat point."""
    _check_width(k)
    _check_ineq(q, k)
    X, Y = _grid_xy(k)
    m = (1 << k) - 1
    lhs = (q.a * X + q.b * Y + q.c) & m
    rhs = (q.d * X + q.e * Y + q.f) & m
    return lhs <= rhs


def ineq_solutions(q, k=DEFAULT_BITS):
    """exact solution set of q as (x, y) pairs under wrap-around semantics."""
    bools = ineq_bools(q, k)
    X, Y = _grid_xy(k)
    return {(int(x), int(y)) for x, y in zip(X[bools], Y[bools])}


def conjunction_bools(ineqs, k):
    """pointwise solutions of a conjunction; the empty conjunction is the
    full grid."""
    _check_width(k)
    out = np.ones(1 << (2 * k), dtype=bool)
    for q in ineqs:
        out &= ineq_bools(q, k)
    return out


# --- query formulas --------------------------------------------------------------

# formula nodes: ("or"|"and", l, r), ("not", f), ("bool", b),
#                ("cmp", op, t, t) with op in <=, <, >=, >, =, !=
# term nodes:    ("add"|"sub"|"mul"|"div"|"mod", t, t), ("neg", t),
#                ("var", "x"|"y"), ("const", n)

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(<=|>=|==|!=|&&|\|\||[-+*/%<>=!()&|~]))")

_KEYWORDS = {"and": "&&", "or": "||", "not": "!", "true": "true",
             "false": "false", "x": "x", "y": "y"}


class BVSyntaxError(ValueError):
    pass


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        mo = _TOKEN.match(text, pos)
        if mo is None:
            if text[pos:].strip() == "":
                break
            raise BVSyntaxError(f"unexpected character {text[pos:pos+8]!r} "
                                f"at offset {pos}")
        num, ident, op = mo.groups()
        if num is not None:
            toks.append(("num", int(num)))
            # juxtaposed coefficient, as in 7x + 9y
            if mo.end() < len(text) and (text[mo.end()].isalpha()
                                         or text[mo.end()] == "_"):
                toks.append(("op", "*"))
        elif ident is not None:
            low = ident.lower()
            if low not in _KEYWORDS:
                raise BVSyntaxError(f"unknown identifier {ident!r}; the only "
                                    f"variables are x and y")
            kw = _KEYWORDS[low]
            if kw in ("true", "false", "x", "y"):
                toks.append(("word", kw))
            else:
                toks.append(("op", kw))
        else:
            toks.append(("op", op))
        pos = mo.end()
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, kind, value=None):
        tok = self.peek()
        if tok is None or tok[0] != kind or (value is not None
                                             and tok[1] != value):
            want = value if value is not None else kind
            raise BVSyntaxError(f"expected {want!r}, got "
                                f"{tok[1] if tok else 'end of input'!r}")
        self.pos += 1
        return tok[1]

    def eat(self, value):
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == value:
            self.pos += 1
            return True
        return False

    # formulas

    def formula(self):
        f = self.conj()
        while self.eat("||") or self.eat("|"):
            f = ("or", f, self.conj())
        return f

    def conj(self):
        f = self.negation()
        while self.eat("&&") or self.eat("&"):
            f = ("and", f, self.negation())
        return f

    def negation(self):
        if self.eat("!") or self.eat("~"):
            return ("not", self.negation())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok == ("word", "true"):
            self.pos += 1
            return ("bool", True)
        if tok == ("word", "false"):
            self.pos += 1
            return ("bool", False)
        # a '(' may open either a parenthesized formula or an arithmetic
        # term; try the comparison route first and fall back
        save = self.pos
        try:
            lhs = self.term()
            op = self.cmp_op()
            return ("cmp", op, lhs, self.term())
        except BVSyntaxError:
            self.pos = save
        self.take("op", "(")
        f = self.formula()
        self.take("op", ")")
        return f

    def cmp_op(self):
        tok = self.peek()
        ops = {"<=": "<=", "<": "<", ">=": ">=", ">": ">",
               "=": "=", "==": "=", "!=": "!="}
        if tok is not None and tok[0] == "op" and tok[1] in ops:
            self.pos += 1
            return ops[tok[1]]
        raise BVSyntaxError(f"expected a comparison operator, got "
                            f"{tok[1] if tok else 'end of input'!r}")

    # terms

    def term(self):
        t = self.product()
        while True:
            if self.eat("+"):
                t = ("add", t, self.product())
            elif self.eat("-"):
                t = ("sub", t, self.product())
            else:
                return t

    def product(self):
        t = self.unary()
        while True:
            if self.eat("*"):
                t = ("mul", t, self.unary())
            elif self.eat("/"):
                t = ("div", t, self.unary())
            elif self.eat("%"):
                t = ("mod", t, self.unary())
            else:
                return t

    def unary(self):
        if self.eat("-"):
            return ("neg", self.unary())
        tok = self.peek()
        if tok is None:
            raise BVSyntaxError("unexpected end of input in a term")
        if tok[0] == "num":
            self.pos += 1
            return ("const", tok[1])
        if tok == ("word", "x") or tok == ("word", "y"):
            self.pos += 1
            return ("var", tok[1])
        if tok == ("op", "("):
            self.pos += 1
            t = self.term()
            self.take("op", ")")
            return t
        raise BVSyntaxError(f"unexpected token {tok[1]!r} in a term")


def parse_formula(text):
    p = _Parser(_tokenize(text))
    f = p.formula()
    if p.peek() is not None:
        raise BVSyntaxError(f"trailing input starting at {p.peek()[1]!r}")
    return f


def _eval_term(t, k, X, Y):
    m = np.uint32((1 << k) - 1)
    op = t[0]
    if op == "const":
        return np.full_like(X, t[1] & int(m))
    if op == "var":
        return X if t[1] == "x" else Y
    if op == "neg":
        return (np.uint32(0) - _eval_term(t[1], k, X, Y)) & m
    l = _eval_term(t[1], k, X, Y)
    r = _eval_term(t[2], k, X, Y)
    if op == "add":
        return (l + r) & m
    if op == "sub":
        return (l - r) & m
    if op == "mul":
        return (l * r) & m
    # division and remainder by zero yield the all-ones value
    if op in ("div", "mod"):
        z = r == 0
        safe = np.where(z, np.uint32(1), r)
        out = (l // safe if op == "div" else l % safe) & m
        return np.where(z, m, out)
    raise ValueError(f"unknown term node {op!r}")


def _eval_formula(f, k, X, Y):
    op = f[0]
    if op == "bool":
        return np.full(X.shape, f[1], dtype=bool)
    if op == "or":
        return _eval_formula(f[1], k, X, Y) | _eval_formula(f[2], k, X, Y)
    if op == "and":
        return _eval_formula(f[1], k, X, Y) & _eval_formula(f[2], k, X, Y)
    if op == "not":
        return ~_eval_formula(f[1], k, X, Y)
    if op == "cmp":
        l = _eval_term(f[2], k, X, Y)
        r = _eval_term(f[3], k, X, Y)
        return {"<=": l <= r, "<": l < r, ">=": l >= r, ">": l > r,
                "=": l == r, "!=": l != r}[f[1]]
    raise ValueError(f"unknown formula node {op!r}")


def formula_points(formula, k):
    """normalize any query form to a bool array over the grid.

    accepts a formula AST, concrete syntax, a BVIneq, an iterable of
    BVIneq (a conjunction), a bool array, or an int bitset.
    """
    _check_width(k)
    n = 1 << (2 * k)
    if isinstance(formula, str):
        formula = parse_formula(formula)
    if isinstance(formula, BVIneq):
        return ineq_bools(formula, k)
    if isinstance(formula, (int, np.integer)):
        mask = int(formula)
        if mask < 0 or mask >> n:
            raise ValueError("bitset has bits outside the grid")
        return np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
    if isinstance(formula, np.ndarray):
        if formula.shape != (n,) or formula.dtype != np.bool_:
            raise ValueError(f"expected a ({n},) bool array")
        return formula
    if isinstance(formula, tuple):
        X, Y = _grid_xy(k)
        return _eval_formula(formula, k, X, Y)
    return conjunction_bools(list(formula), k)


def linear_sides(formula, k):
    """read a single comparison as a BVIneq, if both sides are linear.

    modular arithmetic does not allow moving terms across <=, so each side
    is reduced separately to coefficients (x, y, 1) mod 2^k.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    if isinstance(formula, BVIneq):
        return formula
    if formula[0] != "cmp" or formula[1] != "<=":
        raise ValueError("not a single <= comparison")
    m = (1 << k) - 1

    def lin(t):
        op = t[0]
        if op == "const":
            return (0, 0, t[1] & m)
        if op == "var":
            return (1, 0, 0) if t[1] == "x" else (0, 1, 0)
        if op == "neg":
            x, y, c = lin(t[1])
            return ((-x) & m, (-y) & m, (-c) & m)
        if op in ("add", "sub"):
            x1, y1, c1 = lin(t[1])
            x2, y2, c2 = lin(t[2])
            s = 1 if op == "add" else -1
            return ((x1 + s * x2) & m, (y1 + s * y2) & m, (c1 + s * c2) & m)
        if op == "mul":
            l, r = lin(t[1]), lin(t[2])
            if l[0] == l[1] == 0:
                l, r = r, l
            if r[0] == r[1] == 0:
                return ((l[0] * r[2]) & m, (l[1] * r[2]) & m,
                        (l[2] * r[2]) & m)
        raise ValueError("side is not linear in x and y")

    ax, ay, ac = lin(formula[2])
    dx, dy, dc = lin(formula[3])
    return BVIneq(ax, ay, ac, dx, dy, dc)


def formula_ineqs(formula, k):
    """read a conjunction of <= comparisons as a list of BVIneq."""
    if isinstance(formula, str):
        formula = parse_formula(formula)
    if isinstance(formula, BVIneq):
        return [formula]
    if isinstance(formula, tuple) and formula[0] == "and":
        return formula_ineqs(formula[1], k) + formula_ineqs(formula[2], k)
    if isinstance(formula, tuple) and formula[0] == "bool" and formula[1]:
        return []
    return [linear_sides(formula, k)]


# --- packed interpretation store --------------------------------------------------


def _words_of_mask(mask, nwords):
    full = (1 << 64) - 1
    return np.array([(mask >> (64 * w)) & full for w in range(nwords)],
                    dtype=np.uint64)


def _mask_of_words(row):
    out = 0
    for w, v in enumerate(row):
        out |= int(v) << (64 * w)
    return out


class _InterpStore:
    """lazily built packed solution rows for every candidate inequality.

    candidates are blocked by their leading two coefficients (a, b); each
    block holds the (c, d, e, f) sweep in lexicographic order, one packed
    grid row per candidate. blocks are cached after first build, about
    2 MB each at width 4 (512 MB if an exhaustive scan touches all 256).
    """

    def __init__(self, k):
        self.k = k
        nc = 1 << k
        self.n_coeff = nc
        self.rows = nc ** 4
        self.n_chunks = nc * nc
        self.n_points = 1 << (2 * k)
        self.word_count = max(1, (self.n_points + 63) // 64)
        X, Y = _grid_xy(k)
        m = nc - 1
        j = np.arange(nc ** 3, dtype=np.uint32)
        # right-hand sides depend only on (d, e, f); shared by every chunk
        self._rhs = ((((j >> (2 * k)) & m)[:, None] * X[None, :]
                      + ((j >> k) & m)[:, None] * Y[None, :]
                      + (j & m)[:, None]) & m).astype(np.uint8)
        self._c = np.arange(nc, dtype=np.uint32)
        self._cache = {}

    def chunk_bools(self, cid):
        """solution matrix of chunk cid, one row per (c, d, e, f)."""
        k = self.k
        nc = self.n_coeff
        m = nc - 1
        a, b = cid >> k, cid & m
        X, Y = _grid_xy(k)
        lhs = (((a * X + b * Y)[None, :] + self._c[:, None]) & m).astype(
            np.uint8)
        return (lhs[:, None, :] <= self._rhs[None, :, :]).reshape(
            self.rows, self.n_points)

    def _pack(self, bools):
        packed = np.packbits(bools, axis=1, bitorder="little")
        pad = (-packed.shape[1]) % 8
        if pad:
            packed = np.concatenate(
                [packed, np.zeros((len(packed), pad), dtype=np.uint8)],
                axis=1)
        return np.ascontiguousarray(packed).view(np.uint64)

    def chunk_packed(self, cid):
        pk = self._cache.get(cid)
        if pk is None:
            pk = self._pack(self.chunk_bools(cid))
            if self.k <= SWEEP_BITS:
                self._cache[cid] = pk
        return pk

    def ineq_at(self, cid, row):
        k = self.k
        m = self.n_coeff - 1
        return BVIneq(cid >> k, cid & m, (row >> (3 * k)) & m,
                      (row >> (2 * k)) & m, (row >> k) & m, row & m)


_STORES = {}


def _store(k):
    if k not in _STORES:
        _STORES[k] = _InterpStore(k)
    return _STORES[k]


# --- engine instantiation ----------------------------------------------------------


class BVGridDomain:
    """example domain for abstraction: the grid, split by the query."""

    def __init__(self, k, pos_bools):
        self.k = k
        n = 1 << (2 * k)
        if pos_bools.shape != (n,):
            raise ValueError(f"expected a ({n},) bool array")
        idx = np.arange(n)
        self.pos_idx = idx[pos_bools]
        self.neg_idx = idx[~pos_bools]
        self.n_pos = len(self.pos_idx)
        self.n_neg = len(self.neg_idx)
        self.pos_bools = pos_bools
        self.evaluator = _IneqEvaluator(k)

    def example(self, flat):
        return (flat >> self.k, flat & ((1 << self.k) - 1))

    def render(self, flat):
        x, y = self.example(int(flat))
        return {"x": str(x), "y": str(y)}


class _IneqEvaluator:
    """seed evaluation hook; mirrors the term evaluator's surface."""

    def __init__(self, k):
        self.k = k
        self.cache_limit = None

    def eval_bool(self, q, flats):
        return ineq_bools(q, self.k)[np.asarray(flats)]


class BVIneqSpace:
    """candidate inequalities in lexicographic coefficient order."""

    def __init__(self, domain):
        self.domain = domain
        self.k = domain.k
        self.store = _store(domain.k)
        self._bools_cache = {}

    def _bools(self, q):
        bools = self._bools_cache.get(q)
        if bools is None:
            bools = ineq_bools(q, self.k)
            if len(self._bools_cache) >= 4096:
                self._bools_cache.pop(next(iter(self._bools_cache)))
            self._bools_cache[q] = bools
        return bools

    def accepts_pos(self, q, flats):
        return self._bools(q)[np.asarray(flats)]

    accepts_neg = accepts_pos

    def first_rejected_pos(self, q, deadline):
        acc = self._bools(q)[self.domain.pos_idx]
        if acc.all():
            return None
        return int(self.domain.pos_idx[int(np.argmax(~acc))])

    def first_consistent(self, epos, eneg, improve, deadline):
        t0 = time.monotonic()
        st = self.store
        nw = st.word_count
        n = st.n_points
        pos_w = _words_of_mask(_bits_at(list(epos), n), nw)
        neg_w = _words_of_mask(_bits_at(list(eneg), n), nw)
        imp_mask = None
        if improve is not None:
            imp_mask = _bits_at(np.asarray(improve), n)
            imp_w = _words_of_mask(imp_mask, nw)
        for cid in range(st.n_chunks):
            if time.monotonic() > deadline:
                raise PrimitiveTimeout("inequality scan",
                                       time.monotonic() - t0)
            pk = st.chunk_packed(cid)
            ok = np.ones(st.rows, dtype=bool)
            for w in range(nw):
                col = pk[:, w]
                ok &= (pos_w[w] & ~col) == 0    # accepts every positive
                ok &= (neg_w[w] & col) == 0     # rejects every negative
            if improve is not None:
                gain = np.zeros(st.rows, dtype=bool)
                for w in range(nw):
                    gain |= (imp_w[w] & ~pk[:, w]) != 0
                ok &= gain
            hits = np.flatnonzero(ok)
            if hits.size:
                row = int(hits[0])
                q = st.ineq_at(cid, row)
                if improve is None:
                    return q, None
                rejected = imp_mask & ~_mask_of_words(pk[row])
                return q, _low_bit(rejected)
        return None


class BVEngine(Engine):
    _term_text = staticmethod(ineq_text)

    def __init__(self, domain, options=None, seeds=()):
        super().__init__(None, domain, options=options, seeds=seeds,
                         space=BVIneqSpace(domain))


# --- the three grid operations ----------------------------------------------------


def abstract(formula, k=DEFAULT_BITS, options=None, seeds=(),
             allow_slow=False):
    """most precise conjunction of inequalities covering the formula.

    returns the engine result; conjuncts are BVIneq values. a timeout
    leaves the partial flag set, with every returned conjunct still sound.
    """
    _check_sweep_width(k, allow_slow)
    pos = formula_points(formula, k)
    seeds = list(seeds)
    for q in seeds:
        bad = np.flatnonzero(~ineq_bools(q, k) & pos)
        if bad.size:
            x, y = int(bad[0]) >> k, int(bad[0]) & ((1 << k) - 1)
            raise ValueError(
                f"seed {ineq_text(q)} is unsound: it rejects the query "
                f"solution (x={x}, y={y})")
    domain = BVGridDomain(k, pos)
    return BVEngine(domain, options, seeds).run()


def abstraction_bools(result, k):
    """grid solutions of an abstraction (engine result or conjunct list)."""
    ineqs = result.conjuncts if hasattr(result, "conjuncts") else result
    return conjunction_bools(ineqs, k)


def join(psi_a, psi_b, k=DEFAULT_BITS, options=None, allow_slow=False):
    """most precise conjunctive cover of the union of two conjunctions."""
    pa = conjunction_bools(list(psi_a), k)
    pb = conjunction_bools(list(psi_b), k)
    return abstract(pa | pb, k, options=options, allow_slow=allow_slow)


# --- census ------------------------------------------------------------------------


@dataclass
class CensusResult:
    k: int
    total: int
    tautologies: int
    non_tautologies: int
    # per supplied formula, among non-tautologies (the tautologies are
    # sound for everything; their count is reported once, separately)
    sound_counts: tuple
    # per formula, the intersection of all sound inequalities as a bitset;
    # this is the denotation any most precise conjunctive cover must have
    intersections: tuple

    def sound_counts_all(self):
        return tuple(c + self.tautologies for c in self.sound_counts)


def _census_block(store, cid_lo, cid_hi, form_words, grid_words):
    nw = store.word_count
    taut = 0
    sound = [0] * len(form_words)
    inters = [np.array([_WORD] * nw, dtype=np.uint64)
              for _ in form_words]
    for cid in range(cid_lo, cid_hi):
        pk = store._pack(store.chunk_bools(cid))   # streamed, never cached
        is_taut = np.ones(store.rows, dtype=bool)
        for w in range(nw):
            is_taut &= pk[:, w] == grid_words[w]
        taut += int(np.count_nonzero(is_taut))
        for i, fw in enumerate(form_words):
            ok = np.ones(store.rows, dtype=bool)
            for w in range(nw):
                ok &= (fw[w] & ~pk[:, w]) == 0
            sound[i] += int(np.count_nonzero(ok & ~is_taut))
            if ok.any():
                sub = pk[ok]
                for w in range(nw):
                    inters[i][w] &= np.bitwise_and.reduce(sub[:, w])
    return taut, sound, [[int(v) for v in iv] for iv in inters]


_WORKER = {}


def _census_init(k, form_masks):
    st = _store(k)
    _WORKER["store"] = st
    _WORKER["forms"] = [_words_of_mask(m, st.word_count) for m in form_masks]
    _WORKER["grid"] = _words_of_mask((1 << st.n_points) - 1, st.word_count)


def _census_task(bounds):
    lo, hi = bounds
    return _census_block(_WORKER["store"], lo, hi, _WORKER["forms"],
                         _WORKER["grid"])


def census(k=DEFAULT_BITS, formulas=(), workers=1, allow_slow=False):
    """brute-force sweep of every inequality at width k.

    counts tautologies and, for each supplied formula, the inequalities
    that cover all its solutions. the coefficient space is partitioned
    into chunk ranges; workers process ranges in parallel and the counts
    are reduced in range order, so the result does not depend on worker
    scheduling.
    """
    _check_sweep_width(k, allow_slow)
    st = _store(k)
    form_bools = [formula_points(f, k) for f in formulas]
    form_masks = [_mask_of(b) for b in form_bools]
    total = st.n_coeff ** 6
    n_blocks = min(st.n_chunks, 32)
    per = (st.n_chunks + n_blocks - 1) // n_blocks
    bounds = [(lo, min(lo + per, st.n_chunks))
              for lo in range(0, st.n_chunks, per)]
    if workers > 1:
        with multiprocessing.Pool(workers, _census_init,
                                  (k, form_masks)) as pool:
            parts = pool.map(_census_task, bounds)
    else:
        _census_init(k, form_masks)
        parts = [_census_task(b) for b in bounds]
    taut = 0
    sound = [0] * len(form_masks)
    inters = [(1 << st.n_points) - 1] * len(form_masks)
    for ptaut, psound, pinters in parts:
        taut += ptaut
        for i in range(len(form_masks)):
            sound[i] += psound[i]
            inters[i] &= _mask_of_words(pinters[i])
    return CensusResult(k, total, taut, total - taut, tuple(sound),
                        tuple(inters))


# --- grid rendering ----------------------------------------------------------------


def render_grid(points, k, reference=None, fmt="ascii"):
    """Fig-style grid of a solution set, y increasing upward.

    cells: '#' solution (also in the reference when one is given),
    '+' solution outside the reference, '.' empty. csv mode emits the
    same codes as 1, 2, 0.
    """
    bools = formula_points(points, k)
    ref = None if reference is None else formula_points(reference, k)
    nc = 1 << k
    lines = []
    width = len(str(nc - 1))
    for y in range(nc - 1, -1, -1):
        cells = []
        for x in range(nc):
            p = (x << k) | y
            if not bools[p]:
                cells.append("0" if fmt == "csv" else ".")
            elif ref is None or ref[p]:
                cells.append("1" if fmt == "csv" else "#")
            else:
                cells.append("2" if fmt == "csv" else "+")
        if fmt == "csv":
            lines.append(",".join(cells))
        else:
            lines.append(f"{y:>{width}} " + " ".join(cells))
    if fmt != "csv":
        lines.append(" " * (width + 1)
                     + " ".join(f"{x % 10}" for x in range(nc)))
    return "\n".join(lines)
