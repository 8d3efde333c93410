"""Noncommutative polynomials over a small generator alphabet.

Words are tuples of generator ranks; a word is *ordered* when its ranks are
nondecreasing, and the set of ordered words is the PBW basis m^a t^b a^c v^d
(group side) / M^a H^b P^c K^d (dual side).  A ``RewriteSystem`` orients each
commutation relation as  x*y -> y*x + f_xy  for rank(x) > rank(y) and reduces
arbitrary words onto the ordered basis.

Rewriting is deterministic (leftmost out-of-order pair) and memoized per
rewrite system.  Termination is certified statically: some priority permutation
of the ranks must make every correction word strictly smaller than the swapped
pair in the per-rank letter-count lexicographic order (pure swaps strictly
reduce the inversion count).  A step budget turns any slip into
TerminationBudgetExceeded instead of a hang.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .errors import (
    AlphabetMismatch,
    MissingTruncation,
    NonzeroConstantTerm,
    NotDivisible,
    SlotMismatch,
    TerminationBudgetExceeded,
    TerminationViolation,
)
from .scalars import GR_ONE, GaussRat, MRat, TPoly

Word = tuple


class Alphabet:
    """Generator names listed in rank order (index = rank)."""

    __slots__ = ("names", "_rank")

    def __init__(self, names):
        self.names = tuple(names)
        self._rank = {n: i for i, n in enumerate(self.names)}

    def rank(self, name) -> int:
        return self._rank[name]

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Alphabet({','.join(self.names)})"


def word_ordered(w: Word) -> bool:
    return all(w[i] <= w[i + 1] for i in range(len(w) - 1))


def word_render(alphabet: Alphabet, w: Word) -> str:
    if not w:
        return "1"
    out = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        n = alphabet.names[w[i]]
        out.append(n if j - i == 1 else f"{n}^{j - i}")
        i = j
    return "*".join(out)


def _word_key(w: Word):
    return (len(w), w)


class NcPoly:
    """Finite linear combination of words with exact scalar coefficients."""

    __slots__ = ("alphabet", "terms", "truncation", "canonical")

    def __init__(self, alphabet, terms=None, truncation=None, canonical=False):
        self.alphabet = alphabet
        self.terms = terms if terms is not None else {}
        self.truncation = truncation
        self.canonical = canonical

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, alphabet, truncation=None):
        return cls(alphabet, {}, truncation, canonical=True)

    @classmethod
    def unit(cls, alphabet, coeff=GR_ONE, truncation=None):
        t = {} if coeff.is_zero() else {(): coeff}
        return cls(alphabet, t, truncation, canonical=True)

    @classmethod
    def generator(cls, alphabet, rank, coeff=GR_ONE, truncation=None):
        return cls(alphabet, {(rank,): coeff}, truncation, canonical=True)

    # -- linear structure ----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, NcPoly):
            if other.alphabet != self.alphabet:
                raise AlphabetMismatch("adding polynomials over different alphabets")
            trunc = _min_trunc(self.truncation, other.truncation)
            t = dict(self.terms)
            for w, c in other.terms.items():
                v = t.get(w)
                v = c if v is None else v + c
                if v.is_zero():
                    t.pop(w, None)
                else:
                    t[w] = v
            if trunc is not None:
                t = {w: c for w, c in t.items() if len(w) <= trunc}
            return NcPoly(self.alphabet, t, trunc,
                          self.canonical and other.canonical)
        return NotImplemented

    def __neg__(self):
        return NcPoly(self.alphabet, {w: -c for w, c in self.terms.items()},
                      self.truncation, self.canonical)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff):
        if isinstance(coeff, (int, Fraction)):
            coeff = GaussRat(coeff)
        if coeff.is_zero():
            return NcPoly.zero(self.alphabet, self.truncation)
        t = {}
        for w, c in self.terms.items():
            v = c * coeff
            if not v.is_zero():
                t[w] = v
        return NcPoly(self.alphabet, t, self.truncation, self.canonical)

    def map_coeffs(self, fn):
        t = {}
        for w, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                t[w] = v
        return NcPoly(self.alphabet, t, self.truncation, self.canonical)

    # -- queries ---------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def coeff(self, w: Word):
        return self.terms.get(w)

    def constant_term(self):
        return self.terms.get(())

    def max_degree(self):
        return max((len(w) for w in self.terms), default=0)

    def with_truncation(self, trunc):
        if trunc is None:
            return NcPoly(self.alphabet, dict(self.terms), None, self.canonical)
        t = {w: c for w, c in self.terms.items() if len(w) <= trunc}
        return NcPoly(self.alphabet, t, trunc, self.canonical)

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.alphabet == other.alphabet and (self - other).is_zero()

    def render(self, render_scalar=None) -> str:
        if not self.terms:
            return "0"
        rs = render_scalar or (lambda c: c.render() if hasattr(c, "render") else str(c))
        bits = []
        for w in sorted(self.terms, key=_word_key):
            c = rs(self.terms[w])
            mono = word_render(self.alphabet, w)
            if mono == "1":
                bits.append(f"({c})" if ("+" in c[1:] or "-" in c[1:] or "*" in c) else c)
            elif c == "1":
                bits.append(mono)
            elif c == "-1":
                bits.append(f"-{mono}")
            else:
                if "+" in c[1:] or "-" in c[1:] or "*" in c or "/" in c:
                    c = f"({c})"
                bits.append(f"{c}*{mono}")
        out = bits[0]
        for b in bits[1:]:
            out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
        return out

    def __repr__(self):
        return f"NcPoly[{self.render()}]"


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _accumulate(acc: dict, terms, coeff=None, trunc=None):
    for w, c in terms.items():
        if trunc is not None and len(w) > trunc:
            continue
        v = c if coeff is None else c * coeff
        cur = acc.get(w)
        cur = v if cur is None else cur + v
        if cur.is_zero():
            acc.pop(w, None)
        else:
            acc[w] = cur


# ---------------------------------------------------------------------------
# Rewrite system
# ---------------------------------------------------------------------------

DEFAULT_STEP_BUDGET = 2_000_000


class RewriteSystem:
    """Oriented commutation rules x*y -> y*x + f_xy with a certified measure.

    ``corrections`` maps (hi_rank, lo_rank) with hi > lo to the canonical
    NcPoly value of the commutator [hi, lo]; missing pairs commute.
    """

    __slots__ = ("alphabet", "corrections", "priority", "measure_note",
                 "step_budget", "_cache", "_steps")

    def __init__(self, alphabet, corrections, step_budget=DEFAULT_STEP_BUDGET,
                 validate=True):
        self.alphabet = alphabet
        self.corrections = {
            pair: f for pair, f in corrections.items()
            if f is not None and not f.is_zero()
        }
        for (hi, lo), f in self.corrections.items():
            if hi <= lo:
                raise TerminationViolation(
                    f"rule for ({alphabet.names[hi]},{alphabet.names[lo]}) is not descending"
                )
            if f.constant_term() is not None:
                raise TerminationViolation(
                    f"correction for ({alphabet.names[hi]},{alphabet.names[lo]}) "
                    "has a nonzero constant term"
                )
        self.step_budget = step_budget
        self._cache = {}
        self._steps = 0
        if validate:
            self.priority, self.measure_note = self._find_measure()
        else:
            self.priority, self.measure_note = tuple(range(len(alphabet))), "unvalidated"

    def _find_measure(self):
        ranks = tuple(range(len(self.alphabet)))
        candidates = [ranks, ranks[::-1]]
        candidates += [p for p in permutations(ranks) if p not in candidates]
        last_fail = None
        for prio in candidates:
            ok = True
            for (hi, lo), f in self.corrections.items():
                pair_counts = _prio_counts((hi, lo), prio)
                for w in f.terms:
                    if _prio_counts(w, prio) >= pair_counts:
                        ok = False
                        last_fail = (hi, lo, w, prio)
                        break
                if not ok:
                    break
            if ok:
                names = ",".join(self.alphabet.names[r] for r in prio)
                return prio, (
                    f"letter counts by priority ({names}) lexicographic, "
                    "then inversion count"
                )
        hi, lo, w, _ = last_fail if last_fail else (0, 0, (), None)
        raise TerminationViolation(
            "no rank-priority measure orders the rule set; offending correction "
            f"word {word_render(self.alphabet, w)} in "
            f"[{self.alphabet.names[hi]},{self.alphabet.names[lo]}]"
        )

    # -- word reduction --------------------------------------------------------
    def reduce_word(self, w: Word) -> dict:
        cache = self._cache
        hit = cache.get(w)
        if hit is not None:
            return hit
        corrections = self.corrections
        stack = [w]
        while stack:
            cur = stack[-1]
            if cur in cache:
                stack.pop()
                continue
            i = _first_descent(cur)
            if i < 0:
                cache[cur] = {cur: GR_ONE}
                stack.pop()
                continue
            swapped = cur[:i] + (cur[i + 1], cur[i]) + cur[i + 2:]
            deps = [(swapped, None)]
            f = corrections.get((cur[i], cur[i + 1]))
            if f is not None:
                pre, post = cur[:i], cur[i + 2:]
                deps.extend((pre + u + post, c) for u, c in f.terms.items())
            missing = [d for d, _ in deps if d not in cache]
            if missing:
                stack.extend(missing)
                continue
            self._steps += 1
            if self._steps > self.step_budget:
                raise TerminationBudgetExceeded(
                    f"rewrite budget {self.step_budget} exceeded at word "
                    f"{word_render(self.alphabet, cur)}"
                )
            acc: dict = {}
            for d, c in deps:
                _accumulate(acc, cache[d], c)
            cache[cur] = acc
            stack.pop()
        return cache[w]


def _first_descent(w: Word) -> int:
    for i in range(len(w) - 1):
        if w[i] > w[i + 1]:
            return i
    return -1


def _prio_counts(w, prio):
    return tuple(sum(1 for x in w if x == r) for r in prio)


def rewrite_step(rws: RewriteSystem, w: Word, i: int) -> NcPoly:
    """Apply the single rule at position i of w (must be out of order there)."""
    if not w[i] > w[i + 1]:
        raise ValueError("no out-of-order pair at the requested position")
    terms = {w[:i] + (w[i + 1], w[i]) + w[i + 2:]: GR_ONE}
    f = rws.corrections.get((w[i], w[i + 1]))
    acc = dict(terms)
    if f is not None:
        pre, post = w[:i], w[i + 2:]
        for u, c in f.terms.items():
            _accumulate(acc, {pre + u + post: c})
    return NcPoly(rws.alphabet, acc)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def normal_order(p: NcPoly, rws: RewriteSystem) -> NcPoly:
    """Canonical (PBW ordered) form of p modulo the relation ideal."""
    if p.alphabet != rws.alphabet:
        raise AlphabetMismatch("polynomial and rewrite system disagree on alphabet")
    trunc = p.truncation
    acc: dict = {}
    for w, c in p.terms.items():
        if word_ordered(w):
            if trunc is None or len(w) <= trunc:
                _accumulate(acc, {w: c})
        else:
            _accumulate(acc, rws.reduce_word(w), c, trunc)
    return NcPoly(p.alphabet, acc, trunc, canonical=True)


def multiply(p: NcPoly, q: NcPoly, rws: RewriteSystem | None) -> NcPoly:
    """Product followed by normal ordering; rws=None multiplies freely."""
    if p.alphabet != q.alphabet or (rws is not None and p.alphabet != rws.alphabet):
        raise AlphabetMismatch("multiplying polynomials over different alphabets")
    trunc = _min_trunc(p.truncation, q.truncation)
    acc: dict = {}
    for w1, c1 in p.terms.items():
        for w2, c2 in q.terms.items():
            c = c1 * c2
            if c.is_zero():
                continue
            if rws is None:
                _accumulate(acc, {w1 + w2: GR_ONE}, c, trunc)
            else:
                _accumulate(acc, rws.reduce_word(w1 + w2), c, trunc)
    return NcPoly(p.alphabet, acc, trunc, canonical=rws is not None)


def commutator(p: NcPoly, q: NcPoly, rws: RewriteSystem) -> NcPoly:
    return multiply(p, q, rws) - multiply(q, p, rws)


def power(p: NcPoly, n: int, rws: RewriteSystem) -> NcPoly:
    out = NcPoly.unit(p.alphabet, truncation=p.truncation)
    for _ in range(n):
        out = multiply(out, p, rws)
    return out


# ---------------------------------------------------------------------------
# Tensor powers
# ---------------------------------------------------------------------------

class TensorPoly:
    """Linear combination of k-fold tensor products of words.

    Multiplication is slotwise; the truncation bound applies to the TOTAL
    degree across slots.
    """

    __slots__ = ("alphabet", "slots", "terms", "truncation", "canonical")

    def __init__(self, alphabet, slots, terms=None, truncation=None, canonical=False):
        self.alphabet = alphabet
        self.slots = slots
        self.terms = terms if terms is not None else {}
        self.truncation = truncation
        self.canonical = canonical

    @classmethod
    def unit(cls, alphabet, slots, coeff=GR_ONE, truncation=None):
        key = ((),) * slots
        t = {} if coeff.is_zero() else {key: coeff}
        return cls(alphabet, slots, t, truncation, canonical=True)

    @classmethod
    def zero(cls, alphabet, slots, truncation=None):
        return cls(alphabet, slots, {}, truncation, canonical=True)

    def __add__(self, other):
        if isinstance(other, TensorPoly):
            if other.slots != self.slots:
                raise SlotMismatch(f"{self.slots} vs {other.slots} tensor slots")
            if other.alphabet != self.alphabet:
                raise AlphabetMismatch("tensors over different alphabets")
            trunc = _min_trunc(self.truncation, other.truncation)
            t = dict(self.terms)
            for k, c in other.terms.items():
                v = t.get(k)
                v = c if v is None else v + c
                if v.is_zero():
                    t.pop(k, None)
                else:
                    t[k] = v
            if trunc is not None:
                t = {k: c for k, c in t.items() if _total_deg(k) <= trunc}
            return TensorPoly(self.alphabet, self.slots, t, trunc,
                              self.canonical and other.canonical)
        return NotImplemented

    def __neg__(self):
        return TensorPoly(self.alphabet, self.slots,
                          {k: -c for k, c in self.terms.items()},
                          self.truncation, self.canonical)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff):
        if isinstance(coeff, (int, Fraction)):
            coeff = GaussRat(coeff)
        t = {}
        if not coeff.is_zero():
            for k, c in self.terms.items():
                v = c * coeff
                if not v.is_zero():
                    t[k] = v
        return TensorPoly(self.alphabet, self.slots, t, self.truncation, self.canonical)

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get(((),) * self.slots)

    def map_coeffs(self, fn):
        t = {}
        for k, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                t[k] = v
        return TensorPoly(self.alphabet, self.slots, t, self.truncation, self.canonical)

    def with_truncation(self, trunc):
        if trunc is None:
            return TensorPoly(self.alphabet, self.slots, dict(self.terms), None,
                              self.canonical)
        t = {k: c for k, c in self.terms.items() if _total_deg(k) <= trunc}
        return TensorPoly(self.alphabet, self.slots, t, trunc, self.canonical)

    def __eq__(self, other):
        if not isinstance(other, TensorPoly):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.slots == other.slots
                and (self - other).is_zero())

    def render(self, render_scalar=None) -> str:
        if not self.terms:
            return "0"
        rs = render_scalar or (lambda c: c.render() if hasattr(c, "render") else str(c))
        bits = []
        for k in sorted(self.terms, key=lambda k: (_total_deg(k), k)):
            c = rs(self.terms[k])
            mono = "@".join(word_render(self.alphabet, w) for w in k)
            if "+" in c[1:] or "-" in c[1:] or "*" in c or "/" in c:
                c = f"({c})"
            if c == "1":
                bits.append(mono)
            elif c == "-1":
                bits.append(f"-{mono}")
            else:
                bits.append(f"{c}*{mono}")
        out = bits[0]
        for b in bits[1:]:
            out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
        return out

    def __repr__(self):
        return f"TensorPoly[{self.render()}]"


def _total_deg(key):
    return sum(len(w) for w in key)


def tensor_of(polys, truncation=None) -> TensorPoly:
    """Outer tensor product of NcPolys (one per slot)."""
    alphabet = polys[0].alphabet
    slots = len(polys)
    terms = {((),) * slots: GR_ONE}
    for i, p in enumerate(polys):
        if p.alphabet != alphabet:
            raise AlphabetMismatch("tensor slots over different alphabets")
        nxt = {}
        for key, c in terms.items():
            for w, cw in p.terms.items():
                v = c * cw
                if v.is_zero():
                    continue
                k2 = key[:i] + (w,) + key[i + 1:]
                if truncation is not None and _total_deg(k2) > truncation:
                    continue
                cur = nxt.get(k2)
                cur = v if cur is None else cur + v
                if cur.is_zero():
                    nxt.pop(k2, None)
                else:
                    nxt[k2] = cur
        terms = nxt
    return TensorPoly(alphabet, slots, terms, truncation)


def tensor_multiply(P: TensorPoly, Q: TensorPoly,
                    rws: RewriteSystem | None) -> TensorPoly:
    """Slotwise product (u1 (x) ... )(w1 (x) ...) = u1w1 (x) ..., canonicalized.

    rws=None multiplies freely (slots keep their concatenated words)."""
    if P.slots != Q.slots:
        raise SlotMismatch(f"{P.slots} vs {Q.slots} tensor slots")
    if P.alphabet != Q.alphabet or (rws is not None and P.alphabet != rws.alphabet):
        raise AlphabetMismatch("tensor product over different alphabets")
    trunc = _min_trunc(P.truncation, Q.truncation)
    acc: dict = {}
    for k1, c1 in P.terms.items():
        for k2, c2 in Q.terms.items():
            c = c1 * c2
            if c.is_zero():
                continue
            if rws is None:
                slot_reductions = [{w1 + w2: GR_ONE} for w1, w2 in zip(k1, k2)]
            else:
                slot_reductions = [rws.reduce_word(w1 + w2) for w1, w2 in zip(k1, k2)]
            _accumulate_tensor(acc, slot_reductions, c, trunc)
    return TensorPoly(P.alphabet, P.slots, acc, trunc, canonical=rws is not None)


def _accumulate_tensor(acc, slot_reductions, coeff, trunc):
    keys = [((), coeff)]
    for red in slot_reductions:
        nxt = []
        for key, c in keys:
            base = _total_deg(key) if trunc is not None else 0
            for w, cw in red.items():
                if trunc is not None and base + len(w) > trunc:
                    continue
                v = c * cw
                if not v.is_zero():
                    nxt.append((key + (w,), v))
        keys = nxt
    for key, c in keys:
        cur = acc.get(key)
        cur = c if cur is None else cur + c
        if cur.is_zero():
            acc.pop(key, None)
        else:
            acc[key] = cur


# ---------------------------------------------------------------------------
# Series of polynomials / tensors
# ---------------------------------------------------------------------------

_SERIES = ("exp", "log1p", "inv1p", "cosh", "sinh")


def series_apply(name: str, x, rws: RewriteSystem):
    """Taylor series of exp/log1p/inv1p/cosh/sinh applied to x (no constant term).

    For log1p and inv1p the argument is the x of (1+x); all arithmetic is exact
    through the truncation degree, which must be set.
    """
    if name not in _SERIES:
        raise ValueError(f"unknown series {name}")
    n = x.truncation
    if n is None:
        raise MissingTruncation(f"series {name} requires a truncation degree")
    if x.constant_term() is not None:
        raise NonzeroConstantTerm(f"series {name} needs a zero constant term")
    if isinstance(x, TensorPoly):
        unit = TensorPoly.unit(x.alphabet, x.slots, truncation=n)
        mul = lambda a, b: tensor_multiply(a, b, rws)
    else:
        unit = NcPoly.unit(x.alphabet, truncation=n)
        mul = lambda a, b: multiply(a, b, rws)

    if name == "exp":
        coeff = lambda j: GaussRat(Fraction(1, _fact(j)))
        start = unit
    elif name == "log1p":
        coeff = lambda j: GaussRat(Fraction((-1) ** (j + 1), j))
        start = None
    elif name == "inv1p":
        coeff = lambda j: GaussRat((-1) ** j)
        start = unit
    elif name == "cosh":
        coeff = lambda j: GaussRat(Fraction(1, _fact(j))) if j % 2 == 0 else None
        start = unit
    else:  # sinh
        coeff = lambda j: GaussRat(Fraction(1, _fact(j))) if j % 2 else None
        start = None

    acc = start
    p = unit
    for j in range(1, n + 1):
        p = mul(p, x)
        if p.is_zero():
            break
        cj = coeff(j)
        if cj is None:
            continue
        term = p.scale(cj)
        acc = term if acc is None else acc + term
    if acc is None:
        acc = (unit - unit)
    return acc


def _fact(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# ---------------------------------------------------------------------------
# Series-level parameter division
# ---------------------------------------------------------------------------

def divide_by_parameter(p: NcPoly, monomial, ctx) -> NcPoly:
    """Exact quotient of p by a parameter monomial (e.g. {"l1": 2}).

    Every coefficient must be divisible; in scaled mode the monomial value is
    c * t^k and divisibility means t-valuation >= k.
    """
    exps = dict(monomial)
    k = sum(exps.values())
    if ctx.mode == "scaled":
        scale = Fraction(1)
        for s, e in exps.items():
            scale *= ctx.assignment[s] ** e
        inv = GaussRat(Fraction(1, 1) / scale)

        def div_coeff(c):
            if isinstance(c, GaussRat):
                c = TPoly.const(c, ctx.order)
            v = c.valuation()
            if v is not None and v < k:
                raise NotDivisible(
                    f"coefficient {c.render()} is not divisible by t^{k}"
                )
            return c.shift(-k) * inv
    else:
        sym_idx = {s: ctx.symbols.index(s) for s in exps}

        def div_coeff(c):
            if isinstance(c, GaussRat):
                c = MRat.const(len(ctx.symbols), c)
            num = c.num
            for s, e in exps.items():
                i = sym_idx[s]
                if any(ex[i] < e for ex in num.terms):
                    raise NotDivisible(
                        f"coefficient {c.render(ctx.symbols)} is not divisible "
                        f"by {s}^{e}"
                    )
            mono_exp = tuple(exps.get(s, 0) for s in ctx.symbols)
            from .scalars import MPoly
            new_terms = {
                tuple(a - b for a, b in zip(ex, mono_exp)): cc
                for ex, cc in num.terms.items()
            }
            return MRat(MPoly(num.nvars, new_terms), c.den)

    return p.map_coeffs(div_coeff)


# ---------------------------------------------------------------------------
# Confluence / Jacobi checking
# ---------------------------------------------------------------------------

class OverlapFinding:
    __slots__ = ("triple", "left", "right", "jacobi")

    def __init__(self, triple, left, right, jacobi):
        self.triple = triple
        self.left = left
        self.right = right
        self.jacobi = jacobi


def check_overlaps(rws: RewriteSystem, truncation=None, trim=None):
    """Resolve every descending triple x>y>z two ways and compare.

    Also normal-orders the Jacobi sum [[x,y],z]+[[y,z],x]+[[z,x],y].  Returns
    (ok, findings); a finding carries both reductions and the Jacobi residual.
    """
    n = len(rws.alphabet)
    findings = []
    for x in range(n - 1, 1, -1):
        for y in range(x - 1, 0, -1):
            for z in range(y - 1, -1, -1):
                w = (x, y, z)
                left = normal_order(
                    rewrite_step(rws, w, 0).with_truncation(truncation), rws)
                right = normal_order(
                    rewrite_step(rws, w, 1).with_truncation(truncation), rws)
                gx = NcPoly.generator(rws.alphabet, x, truncation=truncation)
                gy = NcPoly.generator(rws.alphabet, y, truncation=truncation)
                gz = NcPoly.generator(rws.alphabet, z, truncation=truncation)
                jac = (
                    commutator(commutator(gx, gy, rws), gz, rws)
                    + commutator(commutator(gy, gz, rws), gx, rws)
                    + commutator(commutator(gz, gx, rws), gy, rws)
                )
                diff = left - right
                if trim is not None:
                    diff = trim(diff)
                    jac = trim(jac)
                if not diff.is_zero() or not jac.is_zero():
                    names = tuple(rws.alphabet.names[r] for r in w)
                    findings.append(OverlapFinding(names, left, right, jac))
    return (not findings), findings
