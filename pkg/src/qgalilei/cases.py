"""Case registry: the 32 built-in presentations and the case-file format.

A ``CaseDef`` is purely symbolic (expression trees straight from the file);
``build_presentation`` evaluates it into a concrete ``HopfPresentation`` in a
chosen scalar mode.  Group cases build exactly (multivariate parameters); dual
cases build in scaled mode under an admissible instantiation l_i := c_i * t,
with extra guard precision while the closed forms are assembled and a final
truncation to the working order T.

Case files are the single source of truth; nothing structural is hard-coded
elsewhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources

from . import parser as px
from .errors import (
    CaseSyntaxError,
    DegenerateInstantiation,
    NotAPerfectSquare,
    NotDefinedAtZero,
    TailOrderViolation,
    UnknownCase,
    UnknownSymbol,
)
from .hopf import HopfPresentation, MorphismSpec
from .ncpoly import (
    Alphabet,
    NcPoly,
    RewriteSystem,
    TensorPoly,
    normal_order,
    series_apply,
)
from .scalars import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussRat,
    MRat,
    MultivariateContext,
    ScaledContext,
    TPoly,
    sqrt_scalar,
)

GROUP_ORDER = ("m", "t", "a", "v")
DUAL_ORDER = ("M", "H", "P", "K")

# extra t-orders of precision carried while Laurent prefactors cancel
_GUARD = 8


@dataclass(frozen=True)
class CaseDef:
    """Symbolic definition of one presentation (one case, one side)."""

    id: int
    side: str
    order: tuple
    params: tuple
    relations: dict          # (x_name, y_name) -> AST for [x, y]
    delta: dict              # gen name -> AST
    antipode: dict           # gen name -> AST
    counit: dict             # gen name -> AST (must evaluate to 0)
    star: dict | None        # gen name -> AST, group side only
    notes: str = ""
    denominators: tuple = ()

    @property
    def name(self):
        return f"{self.side}{self.id:02d}"


# ---------------------------------------------------------------------------
# Case-file parsing and rendering
# ---------------------------------------------------------------------------

_SECTIONS = ("meta", "params", "relations", "coproduct", "antipode", "counit", "star")


def parse_case(text: str, validate=True) -> CaseDef:
    """Parse and (by default) fully validate one case file."""
    meta = {}
    params: list = []
    relations = {}
    delta = {}
    antipode = {}
    counit = {}
    star = {}
    notes = []
    section = None
    gens: tuple = ()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if raw.strip().startswith("# notes:"):
            notes.append(raw.strip()[len("# notes:"):].strip())
        if not line:
            continue
        if line.startswith("["):
            close = line.find("]")
            if close < 0:
                raise CaseSyntaxError("unterminated section header", lineno, 1)
            head = line[1:close].strip()
            rest = line[close + 1:].strip()
            if head in _SECTIONS:
                section = head
                if rest:
                    _parse_entry(section, rest, lineno, meta, params, relations,
                                 delta, antipode, counit, star, gens)
                    if section == "meta":
                        gens = tuple(meta.get("order", ()))
                continue
            # not a section name: fall through (e.g. "[K,P] = ..." entries)
        if section is None:
            raise CaseSyntaxError("content before any section", lineno, 1)
        _parse_entry(section, line, lineno, meta, params, relations,
                     delta, antipode, counit, star, gens)
        if section == "meta":
            gens = tuple(meta.get("order", ()))

    if "id" not in meta or "side" not in meta or "order" not in meta:
        raise CaseSyntaxError("missing id/side/order in [meta]")
    cid = meta["id"]
    side = meta["side"]
    if side not in ("group", "dual"):
        raise CaseSyntaxError(f"side must be group or dual, got {side}")
    order = tuple(meta["order"])
    if len(order) != len(set(order)):
        raise CaseSyntaxError("rank order contains repeated generators")

    ptuple = tuple(params)
    # re-parse expressions now that the symbol tables are known
    env_syms = dict(params=ptuple, gens=order)

    def reparse(d):
        return {k: _require_symbols(v, ptuple, order) for k, v in d.items()}

    relations = reparse(relations)
    delta = reparse(delta)
    antipode = reparse(antipode)
    counit = reparse(counit)
    star = reparse(star) if star else None

    for g in order:
        if g not in delta:
            raise CaseSyntaxError(f"missing coproduct image for {g}")
        if g not in antipode:
            raise CaseSyntaxError(f"missing antipode image for {g}")
        counit.setdefault(g, px.Num(Fraction(0)))
    for (x, y) in relations:
        if x not in order or y not in order:
            raise UnknownSymbol(f"relation on unknown generators [{x},{y}]")
    if star:
        for g in order:
            if g not in star:
                raise CaseSyntaxError(f"missing star image for {g}")

    dens = _collect_denominators(
        list(relations.values()) + list(delta.values()) + list(antipode.values())
        + (list(star.values()) if star else [])
    )
    case = CaseDef(cid, side, order, ptuple, relations, delta, antipode, counit,
                   star, notes=" / ".join(notes), denominators=dens)
    if validate:
        validate_case(case)
    return case


def _require_symbols(ast, params, gens):
    for n in px.walk(ast):
        if isinstance(n, px.Sym) and n.name not in params and n.name not in gens:
            raise UnknownSymbol(f"unknown symbol {n.name!r}")
    return ast


def _parse_entry(section, line, lineno, meta, params, relations, delta,
                 antipode, counit, star, gens):
    if section == "meta":
        for field in line.split():
            if "=" not in field:
                raise CaseSyntaxError(f"bad meta field {field!r}", lineno, 1)
            k, v = field.split("=", 1)
            if k == "id":
                meta["id"] = int(v)
            elif k == "side":
                meta["side"] = v
            elif k == "order":
                meta["order"] = tuple(v.split(","))
            else:
                raise CaseSyntaxError(f"unknown meta key {k!r}", lineno, 1)
        return
    if section == "params":
        params.extend(line.split())
        return
    if "=" not in line:
        raise CaseSyntaxError("expected '='", lineno, 1)
    lhs, rhs = line.split("=", 1)
    lhs = lhs.strip()
    ast = px.parse_expr(rhs.strip(), lineno)
    if section == "relations":
        if not (lhs.startswith("[") and lhs.endswith("]") and "," in lhs):
            raise CaseSyntaxError(f"bad relation target {lhs!r}", lineno, 1)
        x, y = (s.strip() for s in lhs[1:-1].split(",", 1))
        relations[(x, y)] = ast
    elif section == "coproduct":
        delta[_image_target(lhs, "D", lineno)] = ast
    elif section == "antipode":
        antipode[_image_target(lhs, "S", lineno)] = ast
    elif section == "counit":
        g = _image_target(lhs, "e", lineno)
        if not (isinstance(ast, px.Num) and ast.value == 0):
            raise CaseSyntaxError("counit images must be literal 0", lineno, 1)
        counit[g] = ast
    elif section == "star":
        if not lhs.endswith("*"):
            raise CaseSyntaxError(f"bad star target {lhs!r}", lineno, 1)
        star[lhs[:-1].strip()] = ast


def _image_target(lhs, fn, lineno):
    if not (lhs.startswith(fn + "(") and lhs.endswith(")")):
        raise CaseSyntaxError(f"expected {fn}(<generator>), got {lhs!r}", lineno, 1)
    return lhs[len(fn) + 1:-1].strip()


def _collect_denominators(asts):
    seen = {}
    for ast in asts:
        for node in px.walk(ast):
            if isinstance(node, px.Pow) and node.exp < 0:
                key = px.render_expr(node.base)
                seen.setdefault(key, node.base)
            elif isinstance(node, px.Fn) and node.name == "sqrt":
                key = "sqrt:" + px.render_expr(node.arg)
                seen.setdefault(key, node)
    return tuple(seen.values())


def render_case(case: CaseDef) -> str:
    out = []
    if case.notes:
        out.append(f"# notes: {case.notes}")
    out.append(f"[meta] id={case.id} side={case.side} order={','.join(case.order)}")
    if case.params:
        out.append(f"[params] {' '.join(case.params)}")
    ranks = {n: i for i, n in enumerate(case.order)}
    if case.relations:
        out.append("[relations]")
        for (x, y) in sorted(case.relations, key=lambda p: (ranks[p[0]], ranks[p[1]])):
            out.append(f"[{x},{y}] = {px.render_expr(case.relations[(x, y)])}")
    out.append("[coproduct]")
    for g in case.order:
        out.append(f"D({g}) = {px.render_expr(case.delta[g])}")
    out.append("[antipode]")
    for g in case.order:
        out.append(f"S({g}) = {px.render_expr(case.antipode[g])}")
    out.append("[counit]")
    for g in case.order:
        out.append(f"e({g}) = 0")
    if case.star:
        out.append("[star]")
        for g in case.order:
            out.append(f"{g}* = {px.render_expr(case.star[g])}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Expression evaluation
# ---------------------------------------------------------------------------

class _Env:
    __slots__ = ("ctx", "alphabet", "rws", "trunc")

    def __init__(self, ctx, alphabet, rws, trunc):
        self.ctx = ctx
        self.alphabet = alphabet
        self.rws = rws
        self.trunc = trunc


_SCALARS = (GaussRat, MRat, TPoly)


def _is_scalar(v):
    from .scalars import QuadExt
    return isinstance(v, _SCALARS) or isinstance(v, QuadExt)


def eval_ast(node, env: _Env):
    if isinstance(node, px.Num):
        return GaussRat(node.value)
    if isinstance(node, px.Imag):
        return GR_I
    if isinstance(node, px.Sym):
        if env.ctx is not None and node.name in getattr(env.ctx, "symbols", ()):
            return env.ctx.param(node.name)
        if env.alphabet is not None and node.name in env.alphabet.names:
            return NcPoly.generator(env.alphabet, env.alphabet.rank(node.name),
                                    truncation=env.trunc)
        raise UnknownSymbol(f"symbol {node.name!r} not bound in this context")
    if isinstance(node, px.Neg):
        v = eval_ast(node.arg, env)
        return -v if _is_scalar(v) else v.scale(GaussRat(-1))
    if isinstance(node, px.Add):
        vals = [eval_ast(x, env) for x in node.items]
        out = vals[0]
        for v in vals[1:]:
            out = _vadd(out, v, env)
        return out
    if isinstance(node, px.Mul):
        vals = [eval_ast(x, env) for x in node.factors]
        out = vals[0]
        for v in vals[1:]:
            out = _vmul(out, v, env)
        return out
    if isinstance(node, px.Pow):
        base = eval_ast(node.base, env)
        return _vpow(base, node.exp, env)
    if isinstance(node, px.Tensor):
        slots = [eval_ast(x, env) for x in node.slots]
        return _vtensor(slots, env)
    if isinstance(node, px.Fn):
        if node.name == "sqrt":
            arg = eval_ast(node.arg, env)
            if not _is_scalar(arg):
                raise CaseSyntaxError("sqrt applies to parameter scalars only")
            allow = env.ctx is not None and env.ctx.mode == "multivariate"
            return sqrt_scalar(arg, allow_quadext=allow)
        arg = eval_ast(node.arg, env)
        if _is_scalar(arg):
            raise CaseSyntaxError(f"{node.name} applies to algebra elements, not scalars")
        return series_apply(node.name, arg, env.rws)
    raise TypeError(f"unknown node {node!r}")


def _as_poly(v, env):
    if isinstance(v, (NcPoly, TensorPoly)):
        return v
    return NcPoly.unit(env.alphabet, truncation=env.trunc).scale(v)


def _vadd(a, b, env):
    if _is_scalar(a) and _is_scalar(b):
        return a + b
    if isinstance(a, TensorPoly) or isinstance(b, TensorPoly):
        if not isinstance(a, TensorPoly):
            a = _tensor_unit_like(b, env).scale(a) if _is_scalar(a) else _fail_mix()
        if not isinstance(b, TensorPoly):
            b = _tensor_unit_like(a, env).scale(b) if _is_scalar(b) else _fail_mix()
        return a + b
    return _as_poly(a, env) + _as_poly(b, env)


def _fail_mix():
    raise CaseSyntaxError("cannot add a tensor to a plain algebra element")


def _tensor_unit_like(tp: TensorPoly, env):
    return TensorPoly.unit(tp.alphabet, tp.slots, truncation=tp.truncation)


def _vmul(a, b, env):
    if _is_scalar(a) and _is_scalar(b):
        return a * b
    if _is_scalar(a):
        return b.scale(a)
    if _is_scalar(b):
        return a.scale(b)
    if isinstance(a, TensorPoly) and isinstance(b, TensorPoly):
        from .ncpoly import tensor_multiply
        return tensor_multiply(a, b, env.rws)
    if isinstance(a, NcPoly) and isinstance(b, NcPoly):
        from .ncpoly import multiply
        return multiply(a, b, env.rws)
    raise CaseSyntaxError("cannot multiply a tensor by a plain algebra element")


def _vpow(base, e, env):
    if e == 0:
        return GR_ONE if _is_scalar(base) else _as_poly(GR_ONE, env)
    if e < 0:
        if not _is_scalar(base):
            raise CaseSyntaxError("negative powers apply to parameter scalars only")
        inv = _scalar_inverse(base, env)
        out = inv
        for _ in range(-e - 1):
            out = out * inv
        return out
    out = base
    for _ in range(e - 1):
        out = _vmul(out, base, env)
    return out


def _scalar_inverse(v, env):
    if isinstance(v, GaussRat):
        return GR_ONE / v
    if isinstance(v, MRat):
        return v.inverse()
    if isinstance(v, TPoly):
        hint = env.ctx.order if env.ctx is not None else None
        return v.inverse(order_hint=hint)
    from .scalars import QuadExt
    if isinstance(v, QuadExt):
        one = GR_ONE
        return one / v
    raise CaseSyntaxError(f"cannot invert {type(v).__name__}")


def _vtensor(slots, env):
    from .ncpoly import tensor_of
    polys = []
    for s in slots:
        if isinstance(s, TensorPoly):
            raise CaseSyntaxError("nested tensor products are not supported")
        polys.append(_as_poly(s, env))
    return tensor_of(polys, truncation=env.trunc)


# ---------------------------------------------------------------------------
# Building presentations
# ---------------------------------------------------------------------------

def build_presentation(case: CaseDef, N=None, assignment=None, T=None,
                       ordering=None, ctx=None) -> HopfPresentation:
    """Evaluate a CaseDef into a concrete HopfPresentation.

    Group cases default to exact multivariate mode (no truncation unless N is
    given).  Dual cases require scaled mode: N (default 5) and T (default N-1)
    with an admissible instantiation (default: a deterministic one).
    """
    order = tuple(ordering) if ordering else case.order
    if set(order) != set(case.order):
        raise CaseSyntaxError(f"ordering {order} is not a permutation of {case.order}")
    alphabet = Alphabet(order)

    if ctx is None:
        if case.side == "group" and assignment is None:
            ctx = MultivariateContext(case.params)
        else:
            if N is None:
                N = 5
            if T is None:
                T = N - 1
            if assignment is None:
                assignment = default_instantiation(case)
            ctx = ScaledContext(case.params, assignment, T + _GUARD)
            check_admissible(case, ctx, raise_on_fail=True)
    if case.side == "dual" and N is None:
        N = 5
    final_T = T if T is not None else (None if N is None else N - 1)

    env = _Env(ctx, alphabet, None, N)

    # relations first: evaluated in the free algebra (no reordering)
    env.rws = None
    brackets = {}
    for (x, y), ast in case.relations.items():
        val = eval_ast(ast, env)
        if not isinstance(val, NcPoly):
            val = _as_poly(val, env)
        for w in val.terms:
            if any(w[i] > w[i + 1] for i in range(len(w) - 1)):
                raise CaseSyntaxError(
                    f"relation [{x},{y}] right-hand side contains the unordered "
                    f"word {w}; write relation values in the declared basis order"
                )
        brackets[(x, y)] = val

    corrections = {}
    for hi in range(len(order) - 1, 0, -1):
        for lo in range(hi - 1, -1, -1):
            xn, yn = order[hi], order[lo]
            if (xn, yn) in brackets:
                corrections[(hi, lo)] = brackets[(xn, yn)]
            elif (yn, xn) in brackets:
                corrections[(hi, lo)] = brackets[(yn, xn)].scale(GaussRat(-1))
    rws = RewriteSystem(alphabet, corrections)

    # normalize corrections onto the ordered basis (fixed point for built-ins)
    for _ in range(3):
        changed = False
        renorm = {}
        for pair, f in rws.corrections.items():
            nf = normal_order(f.with_truncation(None), rws)
            renorm[pair] = nf
            if not (nf - f).is_zero():
                changed = True
        if not changed:
            break
        rws = RewriteSystem(alphabet, renorm)

    env.rws = rws
    delta_images = {}
    antipode_images = {}
    star_images = {}
    for g in case.order:
        r = alphabet.rank(g)
        dv = eval_ast(case.delta[g], env)
        if isinstance(dv, NcPoly):
            raise CaseSyntaxError(f"coproduct image of {g} has no tensor slot")
        delta_images[r] = dv
        antipode_images[r] = _as_poly(eval_ast(case.antipode[g], env), env)
        if case.star:
            star_images[r] = _as_poly(eval_ast(case.star[g], env), env)

    if isinstance(ctx, ScaledContext) and final_T is not None and final_T < ctx.order:
        work = ctx.with_order(final_T)
        trim = lambda c: c.truncate(final_T) if isinstance(c, TPoly) else c
        for pair in list(rws.corrections):
            rws.corrections[pair] = rws.corrections[pair].map_coeffs(trim)
        rws._cache.clear()
        delta_images = {r: p.map_coeffs(trim) for r, p in delta_images.items()}
        antipode_images = {r: p.map_coeffs(trim) for r, p in antipode_images.items()}
        star_images = {r: p.map_coeffs(trim) for r, p in star_images.items()}
        ctx = work

    if case.side == "dual":
        _check_tail_order(rws, alphabet)
        for r, p in delta_images.items():
            _check_no_poles(p, alphabet, f"D({alphabet.names[r]})")
        for r, p in antipode_images.items():
            _check_no_poles(p, alphabet, f"S({alphabet.names[r]})")

    zero = GR_ZERO
    pres = HopfPresentation(
        name=case.name,
        side=case.side,
        case_id=case.id,
        alphabet=alphabet,
        rws=rws,
        ctx=ctx,
        truncation=N,
        delta=MorphismSpec("hom", "tensor2", delta_images),
        antipode=MorphismSpec("antihom", "self", antipode_images),
        counit=MorphismSpec("hom", "scalars",
                            {r: zero for r in range(len(order))}),
        star=(MorphismSpec("antihom", "self", star_images, antilinear=True)
              if case.star else None),
        params=case.params,
        notes=case.notes,
    )
    return pres


def _coeff_valuation(c):
    if isinstance(c, GaussRat):
        return 0 if not c.is_zero() else None
    if isinstance(c, TPoly):
        return c.valuation()
    if isinstance(c, MRat):
        return c.valuation()
    return 0


def _check_tail_order(rws, alphabet):
    for (hi, lo), f in rws.corrections.items():
        for w, c in f.terms.items():
            v = _coeff_valuation(c)
            if v is None:
                continue
            if v < 0 or v < len(w) - 1:
                raise TailOrderViolation(
                    f"[{alphabet.names[hi]},{alphabet.names[lo]}]: degree-{len(w)} "
                    f"term has parameter valuation {v} < {len(w) - 1}"
                )


def _check_no_poles(p, alphabet, label):
    terms = p.terms
    for key, c in terms.items():
        v = _coeff_valuation(c)
        if v is not None and v < 0:
            raise TailOrderViolation(f"{label} carries a parameter pole ({v})")


# ---------------------------------------------------------------------------
# Instantiations and admissibility
# ---------------------------------------------------------------------------

def check_admissible(case: CaseDef, ctx: ScaledContext, raise_on_fail=False) -> bool:
    """Every collected denominator must evaluate nonzero (and sqrt must close)."""
    env = _Env(ctx, None, None, None)
    for ast in case.denominators:
        try:
            v = eval_ast(ast, env)
        except NotAPerfectSquare:
            if raise_on_fail:
                raise DegenerateInstantiation(
                    f"radicand {px.render_expr(ast)} is not a perfect square under "
                    f"{ctx.describe()}")
            return False
        if v.is_zero():
            if raise_on_fail:
                raise DegenerateInstantiation(
                    f"denominator {px.render_expr(ast)} vanishes under {ctx.describe()}")
            return False
    return True


_DEFAULT_POOLS = {
    1: [(2,), (3,), (5,)],
    2: [(2, 3), (3, 2), (2, 5), (5, 3)],
    3: [(1, 3, 2), (2, 6, 4), (1, 5, 6), (3, 9, 6), (2, 5, 2)],
}


def default_instantiation(case: CaseDef) -> dict:
    """A deterministic admissible assignment for this case."""
    k = len(case.params)
    for cand in _DEFAULT_POOLS.get(k, [(2,) * k]):
        assignment = dict(zip(case.params, (Fraction(c) for c in cand)))
        ctx = ScaledContext(case.params, assignment, 4)
        if check_admissible(case, ctx):
            return assignment
    raise DegenerateInstantiation(f"no default instantiation admissible for {case.name}")


def sample_instantiations(case: CaseDef, seed: int, count: int):
    """Seeded random admissible assignments; rejected draws are recorded.

    Case 15 draws from the perfect-square family c2 = u^2 + v^2,
    c1*c3 = (u*v)^2, which makes the radicand (c2^2 - 4 c1 c3) t^2 the exact
    square of |u^2 - v^2| t.
    """
    rng = random.Random(seed)
    out = []
    rejected = 0
    needs_square = any(
        isinstance(n, px.Fn) and n.name == "sqrt"
        for ast in case.denominators for n in px.walk(ast)
    ) or any(
        isinstance(n, px.Fn) and n.name == "sqrt"
        for ast in list(case.relations.values()) + list(case.delta.values())
        for n in px.walk(ast)
    )
    budget = 400
    while len(out) < count and budget > 0:
        budget -= 1
        if needs_square and len(case.params) == 3:
            u = Fraction(rng.randint(1, 4), rng.choice((1, 2)))
            v = Fraction(rng.randint(1, 4), rng.choice((1, 2)))
            if u == v:
                rejected += 1
                continue
            r = Fraction(rng.choice((1, -1)) * rng.randint(1, 3), rng.choice((1, 2)))
            vals = (u * v * r, u * u + v * v, u * v / r)
        else:
            vals = tuple(
                Fraction(rng.choice((1, -1)) * rng.randint(1, 6), rng.randint(1, 3))
                for _ in case.params
            )
        assignment = dict(zip(case.params, vals))
        ctx = ScaledContext(case.params, assignment, 4)
        if check_admissible(case, ctx):
            out.append(assignment)
        else:
            rejected += 1
    if len(out) < count:
        raise DegenerateInstantiation(
            f"could not sample {count} admissible instantiations for {case.name}")
    return out, rejected


# ---------------------------------------------------------------------------
# Built-in registry
# ---------------------------------------------------------------------------

_CACHE: dict = {}


def builtin(case_id: int, side: str) -> CaseDef:
    key = (case_id, side)
    if key in _CACHE:
        return _CACHE[key]
    if side not in ("group", "dual") or not 1 <= case_id <= 16:
        raise UnknownCase(f"no built-in case {case_id}/{side}")
    fname = f"case{case_id:02d}.case"
    try:
        text = (resources.files("qgalilei") / "cases_data" / side / fname).read_text()
    except FileNotFoundError as e:
        raise UnknownCase(f"case file missing for {case_id}/{side}") from e
    case = parse_case(text, validate=False)
    if case.id != case_id or case.side != side:
        raise UnknownCase(f"case file {fname} declares {case.id}/{case.side}")
    _CACHE[key] = case
    return case


def builtin_ids():
    return range(1, 17)


def validate_case(case: CaseDef):
    """Trial build: termination validation always, tail order on the dual side."""
    if case.side == "group":
        build_presentation(case)
    else:
        build_presentation(case, N=3)


# ---------------------------------------------------------------------------
# Classical limit
# ---------------------------------------------------------------------------

def classical_limit(case: CaseDef) -> CaseDef:
    """All deformation parameters -> 0, after prefactor cancellation."""
    if case.side == "group":
        pres = build_presentation(case)
        relations = {}
        for (x, y), ast in case.relations.items():
            env = _Env(pres.ctx, pres.alphabet, pres.rws, None)
            val = eval_ast(ast, env)
            lim = _poly_eval_zero(val, pres.alphabet)
            if not lim.is_zero():
                relations[(x, y)] = _poly_to_ast(lim, pres.alphabet)
        return replace(case, relations=relations, params=(),
                       notes=(case.notes + " / classical limit").strip(" /"),
                       denominators=())

    p1 = build_presentation(case, N=3, assignment=default_instantiation(case))
    second = _second_instantiation(case)
    p2 = build_presentation(case, N=3, assignment=second)
    relations = {}
    names = case.order
    for hi in range(3, 0, -1):
        for lo in range(hi - 1, -1, -1):
            f1 = p1.rws.corrections.get((hi, lo))
            f2 = p2.rws.corrections.get((hi, lo))
            c1 = _poly_eval_zero(f1, p1.alphabet) if f1 is not None else None
            c2 = _poly_eval_zero(f2, p2.alphabet) if f2 is not None else None
            r1 = c1.terms if c1 is not None else {}
            r2 = c2.terms if c2 is not None else {}
            if r1 != r2:
                raise NotDefinedAtZero(
                    f"[{names[hi]},{names[lo]}] classical part depends on the "
                    "instantiation")
            if r1:
                relations[(names[hi], names[lo])] = _poly_to_ast(c1, p1.alphabet)
    delta = {}
    antipode = {}
    for g in names:
        r = p1.alphabet.rank(g)
        d0 = _tensor_eval_zero(p1.delta.images[r], p1.alphabet)
        d0b = _tensor_eval_zero(p2.delta.images[r], p2.alphabet)
        s0 = _poly_eval_zero(p1.antipode.images[r], p1.alphabet)
        s0b = _poly_eval_zero(p2.antipode.images[r], p2.alphabet)
        if d0.terms != d0b.terms or s0.terms != s0b.terms:
            raise NotDefinedAtZero(f"classical structure maps of {g} depend on the "
                                   "instantiation")
        delta[g] = _tensor_to_ast(d0, p1.alphabet)
        antipode[g] = _poly_to_ast(s0, p1.alphabet)
    return CaseDef(case.id, case.side, case.order, (), relations, delta,
                   antipode, {g: px.Num(Fraction(0)) for g in names}, None,
                   notes=(case.notes + " / classical limit").strip(" /"))


def _second_instantiation(case):
    first = default_instantiation(case)
    samples, _ = sample_instantiations(case, seed=97, count=4)
    for s in samples:
        if s != first:
            return s
    return samples[0]


def _coeff_zero_part(c):
    if isinstance(c, GaussRat):
        return c
    if isinstance(c, TPoly):
        return c.coeff(0)
    if isinstance(c, MRat):
        v = c.eval_zero()
        if v is None:
            raise NotDefinedAtZero("coefficient has no limit at zero parameters")
        return v
    raise NotDefinedAtZero(f"no classical limit for {type(c).__name__}")


def _poly_eval_zero(p: NcPoly, alphabet) -> NcPoly:
    t = {}
    for w, c in p.terms.items():
        v = _coeff_valuation(c)
        if v is not None and v < 0:
            raise NotDefinedAtZero("negative parameter valuation survived assembly")
        z = _coeff_zero_part(c)
        if not z.is_zero():
            t[w] = z
    return NcPoly(alphabet, t, canonical=True)


def _tensor_eval_zero(tp: TensorPoly, alphabet) -> TensorPoly:
    t = {}
    for k, c in tp.terms.items():
        v = _coeff_valuation(c)
        if v is not None and v < 0:
            raise NotDefinedAtZero("negative parameter valuation survived assembly")
        z = _coeff_zero_part(c)
        if not z.is_zero():
            t[k] = z
    return TensorPoly(alphabet, tp.slots, t, canonical=True)


# -- literal polynomials back to expression trees ----------------------------

def _coeff_to_ast(c: GaussRat):
    re, im = c.re, c.im
    parts = []
    if re:
        parts.append(px.Num(re) if re > 0 else px.Neg(px.Num(-re)))
    if im:
        ifac = px.Imag() if abs(im) == 1 else px.Mul((px.Num(abs(im)), px.Imag()))
        parts.append(ifac if im > 0 else px.Neg(ifac))
    if not parts:
        return px.Num(Fraction(0))
    return parts[0] if len(parts) == 1 else px.Add(tuple(parts))


def _word_to_factors(w, alphabet):
    factors = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        sym = px.Sym(alphabet.names[w[i]])
        factors.append(sym if j - i == 1 else px.Pow(sym, j - i))
        i = j
    return factors


def _term_to_ast(c: GaussRat, factors):
    neg = False
    if c.re < 0 or (c.re == 0 and c.im < 0):
        c = -c
        neg = True
    bits = []
    if not (c == GR_ONE and factors):
        bits.append(_coeff_to_ast(c))
    bits.extend(factors)
    node = bits[0] if len(bits) == 1 else px.Mul(tuple(bits))
    return px.Neg(node) if neg else node


def _poly_to_ast(p: NcPoly, alphabet):
    if not p.terms:
        return px.Num(Fraction(0))
    items = []
    for w in sorted(p.terms, key=lambda w: (len(w), w)):
        items.append(_term_to_ast(p.terms[w], _word_to_factors(w, alphabet)))
    return items[0] if len(items) == 1 else px.Add(tuple(items))


def _tensor_to_ast(tp: TensorPoly, alphabet):
    if not tp.terms:
        return px.Num(Fraction(0))
    items = []
    for key in sorted(tp.terms, key=lambda k: (sum(len(w) for w in k), k)):
        c = tp.terms[key]
        slots = []
        for w in key:
            fac = _word_to_factors(w, alphabet)
            if not fac:
                slots.append(px.Num(Fraction(1)))
            elif len(fac) == 1:
                slots.append(fac[0])
            else:
                slots.append(px.Mul(tuple(fac)))
        node = px.Tensor(tuple(slots))
        neg = False
        if c.re < 0 or (c.re == 0 and c.im < 0):
            c = -c
            neg = True
        if c != GR_ONE:
            node = px.Tensor((px.Mul((_coeff_to_ast(c), slots[0]))
                              if not isinstance(slots[0], px.Num) or slots[0].value != 1
                              else _coeff_to_ast(c),) + tuple(slots[1:]))
        items.append(px.Neg(node) if neg else node)
    return items[0] if len(items) == 1 else px.Add(tuple(items))
