"""Hopf structure maps and the axiom-verification suite.

A ``MorphismSpec`` stores generator images and extends them to the whole
algebra: words map to ordered products of images (reversed for
antihomomorphisms, which is how maps into the opposite algebra are realized),
coefficients map through complex conjugation when the map is antilinear.

Every check returns a ``CheckOutcome``; a failure carries the rendered
residual instead of raising, because a failed axiom is a verification finding,
not a malfunction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AlphabetMismatch, NotInvertibleAtTruncation
from .ncpoly import (
    Alphabet,
    NcPoly,
    RewriteSystem,
    TensorPoly,
    check_overlaps,
    multiply,
    tensor_multiply,
    tensor_of,
)
from .scalars import GR_ONE, GR_ZERO, GaussRat


class MorphismSpec:
    """Generator images of a (anti)homomorphism into self, self(x)self or scalars."""

    __slots__ = ("kind", "target", "antilinear", "images", "_cache")

    def __init__(self, kind, target, images, antilinear=False):
        assert kind in ("hom", "antihom")
        assert target in ("self", "tensor2", "scalars")
        if antilinear and kind != "antihom":
            raise ValueError("antilinear maps are antihomomorphisms (star) only")
        self.kind = kind
        self.target = target
        self.antilinear = antilinear
        self.images = dict(images)
        self._cache = {}

    def word_image(self, w, pres):
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        seq = w[::-1] if self.kind == "antihom" else w
        if self.target == "scalars":
            out = GR_ONE
            for r in seq:
                out = out * self.images[r]
                if out.is_zero():
                    break
            self._cache[w] = out
            return out
        if len(w) > 1:
            # peel one letter so long words reuse cached prefixes
            head = self.word_image(w[:-1], pres)
            last = self.word_image(w[-1:], pres)
            if self.kind == "antihom":
                out = pres.mul(self.target, last, head)
            else:
                out = pres.mul(self.target, head, last)
        elif len(w) == 1:
            out = self.images[w[0]]
            out = out.with_truncation(pres.truncation)
        else:
            out = pres.unit(self.target)
        self._cache[w] = out
        return out


def apply_morphism(spec: MorphismSpec, p: NcPoly, pres):
    """Linear (or antilinear) extension of the generator images to p."""
    if p.alphabet != pres.alphabet:
        raise AlphabetMismatch("polynomial is not over the presentation's alphabet")
    if spec.target == "scalars":
        out = GR_ZERO
        for w, c in p.terms.items():
            img = spec.word_image(w, pres)
            cc = c.conj() if spec.antilinear else c
            out = out + cc * img
        return out
    acc = pres.zero(spec.target)
    for w, c in p.terms.items():
        img = spec.word_image(w, pres)
        cc = c.conj() if spec.antilinear else c
        acc = acc + img.scale(cc)
    return acc


def apply_to_slot(spec: MorphismSpec, tp: TensorPoly, slot: int, pres) -> TensorPoly:
    """Apply a 2-slot-valued homomorphism to one tensor slot (k -> k+1 slots)."""
    assert spec.target == "tensor2" and spec.kind == "hom"
    trunc = tp.truncation
    acc: dict = {}
    for key, c in tp.terms.items():
        img = spec.word_image(key[slot], pres)
        for ik, ic in img.terms.items():
            nk = key[:slot] + ik + key[slot + 1:]
            if trunc is not None and sum(len(w) for w in nk) > trunc:
                continue
            v = c * ic
            if v.is_zero():
                continue
            cur = acc.get(nk)
            cur = v if cur is None else cur + v
            if cur.is_zero():
                acc.pop(nk, None)
            else:
                acc[nk] = cur
    return TensorPoly(tp.alphabet, tp.slots + 1, acc, trunc, canonical=True)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

@dataclass
class HopfPresentation:
    """A generators/relations presentation with its Hopf structure maps."""

    name: str
    side: str                      # "group" | "dual"
    case_id: int
    alphabet: Alphabet
    rws: RewriteSystem
    ctx: object                    # MultivariateContext | ScaledContext
    truncation: int | None
    delta: MorphismSpec
    antipode: MorphismSpec
    counit: MorphismSpec
    star: MorphismSpec | None
    params: tuple = ()
    notes: str = ""

    def gen(self, rank) -> NcPoly:
        return NcPoly.generator(self.alphabet, rank, truncation=self.truncation)

    def unit(self, target):
        if target == "tensor2":
            return TensorPoly.unit(self.alphabet, 2, truncation=self.truncation)
        return NcPoly.unit(self.alphabet, truncation=self.truncation)

    def zero(self, target):
        if target == "tensor2":
            return TensorPoly.zero(self.alphabet, 2, truncation=self.truncation)
        return NcPoly.zero(self.alphabet, truncation=self.truncation)

    def mul(self, target, a, b):
        if target == "tensor2":
            return tensor_multiply(a, b, self.rws)
        return multiply(a, b, self.rws)

    def trim(self, value):
        """Reduce a computed element to the working parameter order.

        Products of scaled coefficients can carry reliable information beyond
        t^T; equality in scaled mode is declared mod t^(T+1), so residual
        tests drop the excess first.
        """
        if getattr(self.ctx, "mode", None) != "scaled":
            return value
        order = self.ctx.order
        from .scalars import TPoly as _TP
        return value.map_coeffs(
            lambda c: c.truncate(order) if isinstance(c, _TP) else c)

    def render(self, value) -> str:
        return value.render(lambda c: self.ctx.render(c))

    def describe_mode(self):
        if self.ctx.mode == "scaled":
            return f"scaled[{self.ctx.describe()}; T={self.ctx.order}]"
        return "multivariate"


@dataclass
class CheckOutcome:
    name: str
    status: str                    # "pass" | "fail" | "skip"
    residual: str | None = None
    detail: str | None = None

    @property
    def ok(self):
        return self.status != "fail"


def _outcome(name, residuals, pres, detail=None):
    bad = [(what, r) for what, r in
           ((what, pres.trim(r) if hasattr(r, "map_coeffs") else r)
            for what, r in residuals)
           if not r.is_zero()]
    if not bad:
        return CheckOutcome(name, "pass", detail=detail)
    what, r = bad[0]
    return CheckOutcome(
        name, "fail",
        residual=f"{what}: {pres.render(r)}",
        detail=detail,
    )


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------

def check_well_defined(spec: MorphismSpec, pres: HopfPresentation, label: str):
    """The map respects every relation x*y - y*x - f (order reversed for antihoms)."""
    residuals = []
    n = len(pres.alphabet)
    for hi in range(n - 1, 0, -1):
        for lo in range(hi - 1, -1, -1):
            f = pres.rws.corrections.get((hi, lo))
            fim = (apply_morphism(spec, f.with_truncation(pres.truncation), pres)
                   if f is not None else None)
            x = spec.word_image((hi,), pres)
            y = spec.word_image((lo,), pres)
            if spec.target == "scalars":
                resid = -fim if fim is not None else GR_ZERO
                residuals.append((_pair_name(pres, hi, lo),
                                  _ScalarResidual(resid)))
                continue
            if spec.kind == "hom":
                resid = pres.mul(spec.target, x, y) - pres.mul(spec.target, y, x)
            else:
                resid = pres.mul(spec.target, y, x) - pres.mul(spec.target, x, y)
            if fim is not None:
                resid = resid - fim
            residuals.append((_pair_name(pres, hi, lo), resid))
    return _outcome(f"{label}_respects_relations", residuals, pres)


class _ScalarResidual:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def is_zero(self):
        return self.v.is_zero()

    def render(self, rs=None):
        return self.v.render() if hasattr(self.v, "render") else str(self.v)


def _pair_name(pres, hi, lo):
    return f"[{pres.alphabet.names[hi]},{pres.alphabet.names[lo]}]"


def check_coassociativity(pres: HopfPresentation):
    residuals = []
    for g in range(len(pres.alphabet)):
        d = pres.delta.word_image((g,), pres)
        lhs = apply_to_slot(pres.delta, d, 0, pres)
        rhs = apply_to_slot(pres.delta, d, 1, pres)
        residuals.append((pres.alphabet.names[g], lhs - rhs))
    return _outcome("coassociativity", residuals, pres)


def _counit_fold(pres, d: TensorPoly, slot: int) -> NcPoly:
    acc = pres.zero("self")
    for (w0, w1), c in d.terms.items():
        w = (w0, w1)[slot]
        other = (w0, w1)[1 - slot]
        eps = pres.counit.word_image(w, pres)
        if eps.is_zero():
            continue
        acc = acc + NcPoly(pres.alphabet, {other: c * eps},
                           truncation=pres.truncation, canonical=True)
    return acc


def check_counit(pres: HopfPresentation):
    residuals = []
    for g in range(len(pres.alphabet)):
        d = pres.delta.word_image((g,), pres)
        gp = pres.gen(g)
        left = _counit_fold(pres, d, 0) - gp
        right = _counit_fold(pres, d, 1) - gp
        residuals.append((f"(e(x)id)D({pres.alphabet.names[g]})", left))
        residuals.append((f"(id(x)e)D({pres.alphabet.names[g]})", right))
    return _outcome("counit", residuals, pres)


def check_antipode(pres: HopfPresentation):
    residuals = []
    for g in range(len(pres.alphabet)):
        d = pres.delta.word_image((g,), pres)
        left = pres.zero("self")
        right = pres.zero("self")
        for (w0, w1), c in d.terms.items():
            s0 = pres.antipode.word_image(w0, pres)
            s1 = pres.antipode.word_image(w1, pres)
            p1 = NcPoly(pres.alphabet, {w1: GR_ONE}, pres.truncation, True)
            p0 = NcPoly(pres.alphabet, {w0: GR_ONE}, pres.truncation, True)
            left = left + multiply(s0, p1, pres.rws).scale(c)
            right = right + multiply(p0, s1, pres.rws).scale(c)
        eps = pres.counit.word_image((g,), pres)
        target = pres.unit("self").scale(eps)
        residuals.append((f"m(S(x)id)D({pres.alphabet.names[g]})", left - target))
        residuals.append((f"m(id(x)S)D({pres.alphabet.names[g]})", right - target))
    return _outcome("antipode", residuals, pres)


def _star_tensor(pres, tp: TensorPoly) -> TensorPoly:
    """(star (x) star) with one overall coefficient conjugation."""
    star = pres.star
    acc = pres.zero("tensor2")
    for (w0, w1), c in tp.terms.items():
        s0 = star.word_image(w0, pres)
        s1 = star.word_image(w1, pres)
        acc = acc + tensor_of([s0, s1], truncation=pres.truncation).scale(c.conj())
    return acc


def check_star(pres: HopfPresentation):
    """Involutivity, relation compatibility, coproduct compatibility.

    Also evaluates the diagnostic composite S(star(S(star(g)))) per generator;
    whether it equals g (the antipode-inverse identity) is reported, never
    asserted.
    """
    if pres.star is None:
        return CheckOutcome("star", "skip", detail="no star structure declared")
    residuals = []
    for g in range(len(pres.alphabet)):
        img = pres.star.word_image((g,), pres)
        twice = apply_morphism(pres.star, img, pres)
        residuals.append((f"{pres.alphabet.names[g]}**", twice - pres.gen(g)))
    wd = check_well_defined(pres.star, pres, "star")
    if wd.status == "fail":
        return CheckOutcome("star", "fail", residual=wd.residual)
    for g in range(len(pres.alphabet)):
        d = pres.delta.word_image((g,), pres)
        lhs = apply_morphism(pres.delta, pres.star.word_image((g,), pres), pres)
        rhs = _star_tensor(pres, d)
        residuals.append((f"D({pres.alphabet.names[g]}*)", lhs - rhs))
    diag_bits = []
    for g in range(len(pres.alphabet)):
        comp = apply_morphism(
            pres.antipode,
            apply_morphism(
                pres.star,
                apply_morphism(
                    pres.antipode,
                    apply_morphism(pres.star, pres.gen(g), pres), pres),
                pres),
            pres)
        same = pres.trim(comp - pres.gen(g)).is_zero()
        diag_bits.append(f"{pres.alphabet.names[g]}:{'id' if same else pres.render(comp)}")
    return _outcome("star", residuals, pres,
                    detail="S*S*(g) diagnostic: " + ", ".join(diag_bits))


def antipode_inverse(pres: HopfPresentation, budget=None) -> MorphismSpec:
    """Generator images of S^-1, solved iteratively from S(x) = g.

    Every iteration multiplies the defect by one deformation-parameter order,
    so scaled mode terminates within T+2 rounds; the group-side images
    terminate exactly for all built-in cases.
    """
    if budget is None:
        budget = 6 + 2 * (pres.truncation or 4)
    images = {}
    for g in range(len(pres.alphabet)):
        target = pres.gen(g)
        x = apply_morphism(pres.antipode, target, pres)
        for _ in range(budget):
            e = pres.trim(apply_morphism(pres.antipode, x, pres) - target)
            if e.is_zero():
                break
            x = pres.trim(x - apply_morphism(pres.antipode, e, pres))
        else:
            raise NotInvertibleAtTruncation(
                f"antipode inverse did not stabilize for {pres.alphabet.names[g]}"
            )
        images[g] = x
    return MorphismSpec("antihom", "self", images)


def check_antipode_inverse(pres: HopfPresentation):
    try:
        inv = antipode_inverse(pres)
    except NotInvertibleAtTruncation as e:
        return CheckOutcome("antipode_inverse", "fail", residual=str(e))
    residuals = []
    for g in range(len(pres.alphabet)):
        comp = apply_morphism(pres.antipode, inv.images[g], pres)
        residuals.append((f"S(Sinv({pres.alphabet.names[g]}))", comp - pres.gen(g)))
    return _outcome("antipode_inverse", residuals, pres)


def check_jacobi(pres: HopfPresentation):
    ok, findings = check_overlaps(pres.rws, truncation=pres.truncation,
                                  trim=pres.trim)
    if ok:
        return CheckOutcome("jacobi_overlaps", "pass")
    f = findings[0]
    return CheckOutcome(
        "jacobi_overlaps", "fail",
        residual=(
            f"triple {f.triple}: left {pres.render(f.left)} vs right "
            f"{pres.render(f.right)}; jacobi {pres.render(f.jacobi)}"
        ),
    )


HOPF_CHECKS = (
    "jacobi_overlaps",
    "delta_respects_relations",
    "antipode_respects_relations",
    "counit_respects_relations",
    "coassociativity",
    "counit",
    "antipode",
    "star",
    "antipode_inverse",
)


def run_hopf_suite(pres: HopfPresentation) -> list[CheckOutcome]:
    """All axiom checks for one presentation, in a fixed order."""
    out = [
        check_jacobi(pres),
        check_well_defined(pres.delta, pres, "delta"),
        check_well_defined(pres.antipode, pres, "antipode"),
        check_well_defined(pres.counit, pres, "counit"),
        check_coassociativity(pres),
        check_counit(pres),
        check_antipode(pres),
        check_star(pres),
        check_antipode_inverse(pres),
    ]
    return out
