"""Exact coefficient arithmetic.

Four layers, all exact and immutable:

* ``GaussRat`` -- Gaussian rationals a + b*i over arbitrary-precision rationals.
* ``MRat`` -- multivariate rational functions in the deformation parameters
  l1..lk over GaussRat, kept with coprime numerator/denominator and a
  graded-lexicographic canonical form.
* ``TPoly`` -- the scaled mode: truncated series in one order-tracking symbol
  t, with per-value precision (``order``).  Negative t-powers may appear
  transiently while case formulas are assembled; persisted case data is always
  checked pole-free.
* ``QuadExt`` -- a single adjoined square root x + y*s with s**2 = rad.

No floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import (
    DegenerateInstantiation,
    DivisionByZero,
    ModeMismatch,
    NotAPerfectSquare,
)

Rat = Fraction

_INF = float("inf")  # sentinel for "exact" precision comparisons only


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussRat:
    """Exact complex number re + im*i with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, GaussRat):
            return GaussRat(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRat(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussRat):
            return GaussRat(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRat(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussRat):
            return GaussRat(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return GaussRat(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussRat(other)
        if isinstance(other, GaussRat):
            n = other.re * other.re + other.im * other.im
            if not n:
                raise DivisionByZero("division by zero GaussRat")
            return GaussRat(
                (self.re * other.re + self.im * other.im) / n,
                (self.im * other.re - self.re * other.im) / n,
            )
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussRat(other) / self
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def render(self) -> str:
        re, im = self.re, self.im
        if not im:
            return str(re)
        if not re:
            if im == 1:
                return "i"
            if im == -1:
                return "-i"
            return f"{im}*i"
        s = "i" if im == 1 else ("-i" if im == -1 else f"{im}*i")
        return f"{re}+{s}" if not s.startswith("-") else f"{re}{s}"

    def __repr__(self):
        return f"GaussRat({self.render()})"


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)


def rational_sqrt(q: Fraction):
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# ---------------------------------------------------------------------------
# Multivariate polynomials (internal) and rational functions
# ---------------------------------------------------------------------------

def _gl_key(exps):
    """Graded lexicographic sort key for an exponent tuple."""
    return (sum(exps), exps)


class MPoly:
    """Sparse multivariate polynomial over GaussRat with a fixed variable count."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = terms if terms is not None else {}

    @classmethod
    def const(cls, nvars, c: GaussRat):
        return cls(nvars, {} if c.is_zero() else {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, idx):
        e = [0] * nvars
        e[idx] = 1
        return cls(nvars, {tuple(e): GR_ONE})

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def const_coeff(self) -> GaussRat:
        return self.terms.get((0,) * self.nvars, GR_ZERO)

    def leading(self):
        e = max(self.terms, key=_gl_key)
        return e, self.terms[e]

    def min_total_degree(self):
        return min(sum(e) for e in self.terms) if self.terms else None

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e)
            v = c if v is None else v + c
            if v.is_zero():
                t.pop(e, None)
            else:
                t[e] = v
        return MPoly(self.nvars, t)

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GaussRat):
            if other.is_zero():
                return MPoly(self.nvars)
            return MPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e)
                v = c1 * c2 if v is None else v + c1 * c2
                if v.is_zero():
                    t.pop(e, None)
                else:
                    t[e] = v
        return MPoly(self.nvars, t)

    def conj(self):
        return MPoly(self.nvars, {e: c.conj() for e, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def render(self, symbols) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=_gl_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{s}^{k}" if k > 1 else s
                for s, k in zip(symbols, e) if k
            )
            cs = c.render()
            if mono:
                cs = f"({cs})" if ("+" in cs[1:] or "-" in cs[1:]) else cs
                piece = f"{cs}*{mono}" if cs != "1" else mono
                piece = f"-{mono}" if cs == "-1" else piece
            else:
                piece = cs
            bits.append(piece)
        out = bits[0]
        for b in bits[1:]:
            out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
        return out


def mp_exact_div(a: MPoly, b: MPoly):
    """Exact polynomial quotient a/b, or None when b does not divide a."""
    if b.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if a.is_zero():
        return MPoly(a.nvars)
    be, bc = b.leading()
    rem = dict(a.terms)
    q = {}
    while rem:
        le = max(rem, key=_gl_key)
        qe = tuple(x - y for x, y in zip(le, be))
        if any(e < 0 for e in qe):
            return None
        qc = rem[le] / bc
        q[qe] = qc
        for e2, c2 in b.terms.items():
            ke = tuple(x + y for x, y in zip(qe, e2))
            v = rem.get(ke, GR_ZERO) - qc * c2
            if v.is_zero():
                rem.pop(ke, None)
            else:
                rem[ke] = v
    return MPoly(a.nvars, q)


def _mp_normalize(p: MPoly) -> MPoly:
    if p.is_zero():
        return p
    _, lc = p.leading()
    return p * (GR_ONE / lc)


def _mp_split_last(p: MPoly):
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        out.setdefault(e[-1], {})[e[:-1]] = c
    return {d: MPoly(p.nvars - 1, t) for d, t in out.items()}


def _mp_join_last(nvars, coeffmap) -> MPoly:
    terms = {}
    for d, sub in coeffmap.items():
        for e, c in sub.terms.items():
            terms[e + (d,)] = c
    return MPoly(nvars, terms)


def _mp_lift(p: MPoly) -> MPoly:
    """Add one trailing variable with exponent zero."""
    return MPoly(p.nvars + 1, {e + (0,): c for e, c in p.terms.items()})


def _uv_content(coeffmap) -> MPoly:
    g = None
    for sub in coeffmap.values():
        g = sub if g is None else mp_gcd(g, sub)
    return g


def _uv_prem(A, B):
    """Sparse pseudo-remainder of univariate polys with MPoly coefficients."""
    dB = max(B)
    lB = B[dB]
    R = dict(A)
    while R and max(R) >= dB:
        dR = max(R)
        lR = R[dR]
        newR = {k: c * lB for k, c in R.items()}
        for k, c in B.items():
            kk = k + dR - dB
            v = newR.get(kk)
            p = lR * c
            v = -p if v is None else v - p
            if v.is_zero():
                newR.pop(kk, None)
            else:
                newR[kk] = v
        newR.pop(dR, None)
        R = {k: c for k, c in newR.items() if not c.is_zero()}
    return R


def mp_gcd(a: MPoly, b: MPoly) -> MPoly:
    """Polynomial gcd over the Gaussian rationals, normalized leading coeff 1."""
    if a.is_zero():
        return _mp_normalize(b)
    if b.is_zero():
        return _mp_normalize(a)
    if a.nvars == 0 or a.is_const() or b.is_const():
        return MPoly.const(a.nvars, GR_ONE)
    A, B = _mp_split_last(a), _mp_split_last(b)
    ca, cb = _uv_content(A), _uv_content(B)
    cg = mp_gcd(ca, cb)
    A = {d: mp_exact_div(s, ca) for d, s in A.items()}
    B = {d: mp_exact_div(s, cb) for d, s in B.items()}
    if max(A) < max(B):
        A, B = B, A
    while True:
        R = _uv_prem(A, B)
        if not R:
            g = B
            break
        if max(R) == 0:
            return _mp_normalize(_mp_lift(cg))
        cr = _uv_content(R)
        A, B = B, {d: mp_exact_div(s, cr) for d, s in R.items()}
    gc = _uv_content(g)
    g = {d: mp_exact_div(s, gc) for d, s in g.items()}
    lifted = _mp_join_last(a.nvars, g) * _mp_lift(cg)
    return _mp_normalize(lifted)


_MP_ONE_CACHE: dict[int, MPoly] = {}


def _mp_one(nvars):
    p = _MP_ONE_CACHE.get(nvars)
    if p is None:
        p = _MP_ONE_CACHE[nvars] = MPoly.const(nvars, GR_ONE)
    return p


class MRat:
    """Canonical rational function num/den in the deformation parameters."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None, _reduced=False):
        if den is None:
            den = _mp_one(num.nvars)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if not _reduced:
            num, den = _mrat_reduce(num, den)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, nvars, c: GaussRat):
        return cls(MPoly.const(nvars, c), _mp_one(nvars), _reduced=True)

    @classmethod
    def var(cls, nvars, idx):
        return cls(MPoly.var(nvars, idx), _mp_one(nvars), _reduced=True)

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_const()

    def _coerce(self, other):
        if isinstance(other, MRat):
            return other
        if isinstance(other, GaussRat):
            return MRat.const(self.nvars, other)
        if isinstance(other, (int, Fraction)):
            return MRat.const(self.nvars, GaussRat(other))
        if isinstance(other, (TPoly, QuadExt)):
            raise ModeMismatch("cannot mix multivariate and scaled scalars")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return MRat(self.num + o.num, self.den)
        return MRat(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return MRat(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussRat):
            if other.is_zero():
                return MRat.const(self.nvars, GR_ZERO)
            return MRat(self.num * other, self.den, _reduced=True)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return MRat(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("division by zero rational function")
        return MRat(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return MRat(self.den, self.num)

    def conj(self):
        return MRat(self.num.conj(), self.den.conj())

    def __eq__(self, other):
        if isinstance(other, (GaussRat, int, Fraction, MRat)):
            o = self._coerce(other)
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def eval_zero(self):
        """Value at all parameters -> 0, or None when the limit does not exist."""
        d0 = self.den.const_coeff()
        if d0.is_zero():
            return None
        return self.num.const_coeff() / d0

    def valuation(self):
        """min total degree(num) - min total degree(den); None for zero."""
        if self.is_zero():
            return None
        return self.num.min_total_degree() - self.den.min_total_degree()

    def render(self, symbols) -> str:
        n = self.num.render(symbols)
        if self.den.is_const():
            return n
        return f"({n})/({self.den.render(symbols)})"


def _mrat_reduce(num: MPoly, den: MPoly):
    if num.is_zero():
        return num, _mp_one(num.nvars)
    if den.is_const():
        c = den.const_coeff()
        if c == GR_ONE:
            return num, den
        return num * (GR_ONE / c), _mp_one(num.nvars)
    g = mp_gcd(num, den)
    if not g.is_const():
        num = mp_exact_div(num, g)
        den = mp_exact_div(den, g)
    _, lc = den.leading()
    if lc != GR_ONE:
        inv = GR_ONE / lc
        num, den = num * inv, den * inv
    return num, den


# ---------------------------------------------------------------------------
# Scaled mode: truncated (Laurent) series in t
# ---------------------------------------------------------------------------

class TPoly:
    """Truncated series in the order-tracking symbol t.

    ``coeffs`` maps t-degree -> GaussRat; ``order`` is the highest degree whose
    coefficient is reliable (None = exact polynomial).  Values are immutable.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs=None, order=None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if not v.is_zero() and (order is None or k <= order):
                    c[k] = v
        self.coeffs = c
        self.order = order

    @classmethod
    def const(cls, c: GaussRat, order=None):
        return cls({0: c}, order)

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        return min(self.coeffs) if self.coeffs else None

    def _prec(self):
        # degree of the first unknown coefficient, for precision tracking
        return _INF if self.order is None else self.order + 1

    def _val_or_prec(self):
        return min(self.coeffs) if self.coeffs else self._prec()

    def truncate(self, order):
        if self.order is not None and self.order <= order:
            return self
        return TPoly(self.coeffs, order)

    def shift(self, k):
        return TPoly(
            {d + k: c for d, c in self.coeffs.items()},
            None if self.order is None else self.order + k,
        )

    @staticmethod
    def _coerce(other):
        if isinstance(other, TPoly):
            return other
        if isinstance(other, GaussRat):
            return TPoly.const(other)
        if isinstance(other, (int, Fraction)):
            return TPoly.const(GaussRat(other))
        if isinstance(other, (MRat, MPoly)):
            raise ModeMismatch("cannot mix scaled and multivariate scalars")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self._prec(), o._prec()) - 1
        order = None if order == _INF else int(order)
        t = dict(self.coeffs)
        for k, v in o.coeffs.items():
            w = t.get(k)
            w = v if w is None else w + v
            if w.is_zero():
                t.pop(k, None)
            else:
                t[k] = w
        return TPoly(t, order)

    __radd__ = __add__

    def __neg__(self):
        return TPoly({k: -v for k, v in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussRat):
            if other.is_zero():
                return TPoly({}, self.order)
            return TPoly({k: v * other for k, v in self.coeffs.items()}, self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prec = min(self._prec() + o._val_or_prec(), o._prec() + self._val_or_prec())
        order = None if prec == _INF else int(prec) - 1
        t = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in o.coeffs.items():
                k = k1 + k2
                if order is not None and k > order:
                    continue
                w = t.get(k)
                p = v1 * v2
                w = p if w is None else w + p
                if w.is_zero():
                    t.pop(k, None)
                else:
                    t[k] = w
        return TPoly(t, order)

    __rmul__ = __mul__

    def inverse(self, order_hint=None):
        if self.is_zero():
            raise DivisionByZero("inverse of zero (mod truncation)")
        v = self.valuation()
        lead = self.coeffs[v]
        if self.order is None:
            if len(self.coeffs) == 1:
                return TPoly({-v: GR_ONE / lead})
            if order_hint is None:
                raise DivisionByZero(
                    "cannot invert a non-monomial exact series without a truncation order"
                )
            work = self.truncate(order_hint + v)
            return work.inverse()
        # x = lead*t^v*(1 + w), val(w) >= 1
        inv_lead = GR_ONE / lead
        w = {d - v: c * inv_lead for d, c in self.coeffs.items() if d != v}
        out_order = self.order - 2 * v
        rel = self.order - v  # compute the unit inverse through t^rel
        acc = {0: GR_ONE}
        power = dict(w)
        sign = -1
        j = 1
        while power and j <= rel:
            for d, c in power.items():
                if d > rel:
                    continue
                x = acc.get(d, GR_ZERO) + (c if sign > 0 else -c)
                if x.is_zero():
                    acc.pop(d, None)
                else:
                    acc[d] = x
            # power *= w
            nxt = {}
            for d1, c1 in power.items():
                for d2, c2 in w.items():
                    d = d1 + d2
                    if d > rel:
                        continue
                    x = nxt.get(d, GR_ZERO) + c1 * c2
                    if x.is_zero():
                        nxt.pop(d, None)
                    else:
                        nxt[d] = x
            power = nxt
            sign = -sign
            j += 1
        return TPoly({d - v: c * inv_lead for d, c in acc.items()}, out_order)

    def __truediv__(self, other):
        if isinstance(other, GaussRat):
            if other.is_zero():
                raise DivisionByZero("division by zero")
            return TPoly({k: v / other for k, v in self.coeffs.items()}, self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse(order_hint=self.order)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def conj(self):
        return TPoly({k: v.conj() for k, v in self.coeffs.items()}, self.order)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def coeff(self, k) -> GaussRat:
        return self.coeffs.get(k, GR_ZERO)

    def render(self, symbols=None) -> str:
        if not self.coeffs:
            return "0"
        bits = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k].render()
            if k == 0:
                bits.append(c)
                continue
            if "+" in c[1:] or "-" in c[1:]:
                c = f"({c})"
            tk = "t" if k == 1 else f"t^{k}"
            if c == "1":
                bits.append(tk)
            elif c == "-1":
                bits.append(f"-{tk}")
            else:
                bits.append(f"{c}*{tk}")
        out = bits[0]
        for b in bits[1:]:
            out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
        return out

    def __repr__(self):
        o = "" if self.order is None else f" (order {self.order})"
        return f"TPoly[{self.render()}{o}]"


# ---------------------------------------------------------------------------
# Quadratic extension x + y*s, s**2 = rad
# ---------------------------------------------------------------------------

class QuadExt:
    __slots__ = ("x", "y", "rad")

    def __init__(self, x, y, rad):
        self.x = x
        self.y = y
        self.rad = rad

    def is_zero(self):
        return self.x.is_zero() and self.y.is_zero()

    def _lift(self, other):
        if isinstance(other, QuadExt):
            if not _scalar_eq(other.rad, self.rad):
                raise ModeMismatch("mixing square roots of different radicands")
            return other
        z = self.x - self.x  # typed zero
        return QuadExt(self.x - self.x + _as_like(other, self.x), z, self.rad)

    def __add__(self, other):
        o = self._lift(other)
        return quadext(self.x + o.x, self.y + o.y, self.rad)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.x, -self.y, self.rad)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        return quadext(
            self.x * o.x + self.y * o.y * self.rad,
            self.x * o.y + self.y * o.x,
            self.rad,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.x * o.x - o.y * o.y * self.rad
        if n.is_zero():
            raise DivisionByZero("division by zero in quadratic extension")
        num = self * QuadExt(o.x, -o.y, self.rad)
        return quadext(num.x / n, num.y / n, self.rad)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def conj(self):
        # complex conjugation; the adjoined root is treated as real
        return QuadExt(self.x.conj(), self.y.conj(), self.rad)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (ModeMismatch, TypeError):
            return NotImplemented
        return _scalar_eq(self.x, o.x) and _scalar_eq(self.y, o.y)

    def render(self, symbols=None) -> str:
        rx = _render(self.x, symbols)
        ry = _render(self.y, symbols)
        rr = _render(self.rad, symbols)
        return f"({rx}) + ({ry})*sqrt({rr})"


def quadext(x, y, rad):
    """Build x + y*sqrt(rad), collapsing to the base value when y = 0."""
    if y.is_zero():
        return x
    return QuadExt(x, y, rad)


def _as_like(value, template):
    """Promote a GaussRat/int into the scalar mode of ``template``."""
    if isinstance(value, (int, Fraction)):
        value = GaussRat(value)
    if isinstance(value, GaussRat):
        if isinstance(template, MRat):
            return MRat.const(template.nvars, value)
        if isinstance(template, TPoly):
            return TPoly.const(value)
        return value
    if type(value) is type(template) or isinstance(value, type(template)):
        return value
    raise ModeMismatch(f"cannot mix {type(value).__name__} with {type(template).__name__}")


def _scalar_eq(a, b):
    d = a - b
    return d.is_zero()


def _render(v, symbols=None):
    if isinstance(v, (GaussRat, TPoly)):
        return v.render()
    if isinstance(v, (MRat, QuadExt)):
        return v.render(symbols)
    return str(v)


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------

class MultivariateContext:
    """Exact rational-function arithmetic in named parameters."""

    __slots__ = ("symbols",)
    mode = "multivariate"

    def __init__(self, symbols):
        self.symbols = tuple(symbols)

    def param(self, name) -> MRat:
        return MRat.var(len(self.symbols), self.symbols.index(name))

    def lift(self, c: GaussRat):
        return c

    def render(self, v) -> str:
        return _render(v, self.symbols)

    def __repr__(self):
        return f"MultivariateContext({','.join(self.symbols)})"


class ScaledContext:
    """Scaled mode: every parameter li is instantiated as c_i * t, truncated."""

    __slots__ = ("symbols", "assignment", "order")
    mode = "scaled"

    def __init__(self, symbols, assignment, order):
        self.symbols = tuple(symbols)
        self.assignment = {k: _frac(v) for k, v in assignment.items()}
        for s in self.symbols:
            if s not in self.assignment:
                raise DegenerateInstantiation(f"missing assignment for {s}")
            if not self.assignment[s]:
                raise DegenerateInstantiation(f"assignment {s} := 0 is not admissible")
        self.order = order

    def param(self, name) -> TPoly:
        if name not in self.assignment:
            raise DegenerateInstantiation(f"unknown parameter {name}")
        return TPoly({1: GaussRat(self.assignment[name])}, self.order)

    def lift(self, c: GaussRat):
        return TPoly.const(c, self.order)

    def convert(self, v):
        """Convert a multivariate value into this scaled context."""
        if isinstance(v, GaussRat):
            return self.lift(v)
        if isinstance(v, TPoly):
            return v.truncate(self.order)
        if isinstance(v, MRat):
            num = self._subst(v.num)
            den = self._subst(v.den)
            if den.is_zero():
                raise DegenerateInstantiation(
                    f"denominator {v.den.render(self.symbols)} vanishes under the assignment"
                )
            return num * den.inverse(order_hint=self.order)
        if isinstance(v, QuadExt):
            rad = self.convert(v.rad)
            root = sqrt_scalar(rad, allow_quadext=False)
            return self.convert(v.x) + self.convert(v.y) * root
        raise ModeMismatch(f"cannot convert {type(v).__name__} into scaled mode")

    def _subst(self, p: MPoly) -> TPoly:
        coeffs: dict[int, GaussRat] = {}
        for e, c in p.terms.items():
            scale = Fraction(1)
            for s, k in zip(self.symbols, e):
                if k:
                    scale *= self.assignment[s] ** k
            d = sum(e)
            v = coeffs.get(d, GR_ZERO) + c * scale
            if v.is_zero():
                coeffs.pop(d, None)
            else:
                coeffs[d] = v
        return TPoly(coeffs, None)

    def with_order(self, order) -> "ScaledContext":
        return ScaledContext(self.symbols, self.assignment, order)

    def render(self, v) -> str:
        return _render(v, self.symbols)

    def describe(self) -> str:
        return ", ".join(f"{s}:={self.assignment[s]}" for s in self.symbols)

    def __repr__(self):
        return f"ScaledContext({self.describe()}; T={self.order})"


def scale_instantiate(symbols, assignment, order) -> ScaledContext:
    """Build a scaling context l_i := c_i * t truncated above degree ``order``.

    Case-specific denominator admissibility is checked where the case is built,
    since only the case knows its denominators.
    """
    return ScaledContext(symbols, assignment, order)


# ---------------------------------------------------------------------------
# Square roots
# ---------------------------------------------------------------------------

def sqrt_scalar(d, allow_quadext=False):
    """Principal square root of a scalar.

    Scaled mode accepts perfect squares c * t^(2j) with c a rational square and
    returns the positive-leading root; otherwise raises NotAPerfectSquare or,
    when requested, returns a QuadExt value.
    """
    if isinstance(d, (int, Fraction)):
        d = GaussRat(d)
    if isinstance(d, GaussRat):
        if d.im == 0:
            r = rational_sqrt(d.re)
            if r is not None:
                return GaussRat(r)
        if allow_quadext:
            return QuadExt(GR_ZERO, GR_ONE, d)
        raise NotAPerfectSquare(d.render())
    if isinstance(d, TPoly):
        if d.is_zero():
            return TPoly({}, d.order)
        if len(d.coeffs) == 1:
            (k, c), = d.coeffs.items()
            if k % 2 == 0 and c.im == 0:
                r = rational_sqrt(c.re)
                if r is not None:
                    return TPoly({k // 2: GaussRat(r)}, d.order)
        if allow_quadext:
            return QuadExt(TPoly({}, d.order), TPoly.const(GR_ONE, d.order), d)
        raise NotAPerfectSquare(d.render())
    if isinstance(d, MRat):
        if d.is_zero():
            return d
        rn = _mp_sqrt(d.num)
        rd = _mp_sqrt(d.den)
        if rn is not None and rd is not None:
            return MRat(rn, rd)
        if allow_quadext:
            zero = MRat.const(d.nvars, GR_ZERO)
            one = MRat.const(d.nvars, GR_ONE)
            return QuadExt(zero, one, d)
        raise NotAPerfectSquare(d.render([f"x{i}" for i in range(d.nvars)]))
    raise ModeMismatch(f"sqrt of unsupported scalar {type(d).__name__}")


def _mp_sqrt(p: MPoly):
    """Square root of a monomial polynomial, or None."""
    if len(p.terms) != 1:
        return None
    (e, c), = p.terms.items()
    if any(k % 2 for k in e) or c.im != 0:
        return None
    r = rational_sqrt(c.re)
    if r is None:
        return None
    return MPoly(p.nvars, {tuple(k // 2 for k in e): GaussRat(r)})


# ---------------------------------------------------------------------------
# Uniform field-op helpers (used by tests and the engine)
# ---------------------------------------------------------------------------

def is_zero(a) -> bool:
    if isinstance(a, (int, Fraction)):
        return not a
    return a.is_zero()


def conj(a):
    if isinstance(a, (int, Fraction)):
        return a
    return a.conj()


def div(a, b):
    if is_zero(b):
        raise DivisionByZero("division by zero scalar")
    return a / b
