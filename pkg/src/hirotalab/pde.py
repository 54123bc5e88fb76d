"""Target equations as jet polynomials, canonicalization and the
up-to-jet-free-factor equivalence used to compare derived and cataloged
equations."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ChartMismatch, JetInDenominator, ZeroDenominator
from .expr import UNIVARIATE_FUNCS, Expr, Poly, exact_div, poly_gcd, JetVar


def is_unknown_jet(g):
    """Jets of the unknown functions; jets of the univariate spectral
    functions l1, l2, l3 are coefficient data, not unknowns."""
    return isinstance(g, JetVar) and g.func not in UNIVARIATE_FUNCS


def jet_free_content(poly):
    """Gcd of the coefficient polynomials when the polynomial is read as a
    polynomial in the jets of its unknown functions.

    The coefficients may contain coordinates, parameters, atoms and spectral
    jets; all of those count as removable content."""
    buckets = {}
    for m, c in poly.terms.items():
        jets = tuple(x for x in m if is_unknown_jet(x[0]))
        rest = tuple(x for x in m if not is_unknown_jet(x[0]))
        b = buckets.setdefault(jets, {})
        b[rest] = b.get(rest, c * 0) + c
    g = Poly.zero()
    for b in buckets.values():
        g = poly_gcd(g, Poly({m: c for m, c in b.items() if c}))
        if g.const_value() == 1:
            break
    return g


def canonical_jet_poly(e):
    """Strip jet-free polynomial content and normalize sign/scale.

    Accepts an expression with a jet-free denominator; the denominator is a
    jet-free factor and is dropped. Returns the canonical polynomial
    expression (denominator 1, integer coprime coefficients, positive leading
    coefficient).
    """
    e = Expr.from_value(e)
    if e.is_zero():
        return e
    poly = e.num
    g = jet_free_content(poly)
    if not g.is_zero() and g.const_value() != 1:
        poly = exact_div(poly, g)
    poly = poly.primitive()
    return Expr(poly, Poly.one())


@dataclass(frozen=True)
class Pde:
    """A single equation: jet polynomial = 0 on a chart."""

    name: str
    chart: object
    expr: Expr
    parameters: tuple = ()

    @staticmethod
    def make(name, chart, expr, parameters=()):
        expr = Expr.from_value(expr)
        if expr.den.const_value() != 1:
            raise JetInDenominator(
                "catalog equations must be polynomial; clear the denominator"
            )
        return Pde(name, chart, expr, tuple(parameters))

    def canonical(self):
        return canonical_jet_poly(self.expr)

    def jet_order(self):
        return max(
            (g.order for g in self.expr.num.generators() if isinstance(g, JetVar)),
            default=0,
        )

    def substitute(self, bindings):
        return Pde(self.name, self.chart, self.expr.substitute(bindings),
                   self.parameters)

    def __str__(self):
        return f"{self.name}: {self.expr} = 0"


@dataclass(frozen=True)
class PdeSystem:
    name: str
    chart: object
    members: tuple

    @staticmethod
    def make(name, chart, members):
        members = tuple(members)
        for m in members:
            if m.chart != chart:
                raise ChartMismatch(f"{m.name} lives on {m.chart}, not {chart}")
        return PdeSystem(name, chart, members)

    def substitute(self, bindings):
        return PdeSystem(
            self.name, self.chart, tuple(m.substitute(bindings) for m in self.members)
        )

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __str__(self):
        body = "; ".join(str(m.expr) for m in self.members)
        return f"{self.name}: {body}"


# --- equivalence ---------------------------------------------------------------

EQUAL = "equal"
EQUAL_UP_TO_FACTOR = "equal_up_to_jet_free_factor"
DIFFERENT = "different"


@dataclass(frozen=True)
class Verdict:
    kind: str
    factor: Expr | None = None
    inverse: bool = False  # True: p * factor = q rather than p = factor * q

    @property
    def ok(self):
        return self.kind in (EQUAL, EQUAL_UP_TO_FACTOR)

    def factor_text(self):
        if self.factor is None:
            return None
        return f"1/({self.factor})" if self.inverse else str(self.factor)

    def __str__(self):
        if self.kind == EQUAL_UP_TO_FACTOR:
            return f"{self.kind}({self.factor_text()})"
        return self.kind


def equivalent_up_to_factor(p, q):
    """Decide p = u*q for a nonzero jet-free u; symmetric verdict.

    Accepts Pde or bare expressions. The factor reported is p/q; when that
    ratio cannot be represented (unknown jets would enter a denominator) the
    reverse ratio is reported with the inverse flag.
    """
    pe = p.expr if isinstance(p, Pde) else Expr.from_value(p)
    qe = q.expr if isinstance(q, Pde) else Expr.from_value(q)
    if pe.is_zero() and qe.is_zero():
        return Verdict(EQUAL)
    if pe.is_zero() or qe.is_zero():
        return Verdict(DIFFERENT)
    inverse = False
    try:
        ratio = pe / qe
    except (JetInDenominator, ZeroDenominator):
        try:
            ratio = qe / pe
            inverse = True
        except (JetInDenominator, ZeroDenominator):
            return Verdict(DIFFERENT)
    if any(is_unknown_jet(g) for g in ratio.num.generators()):
        return Verdict(DIFFERENT)
    if ratio == 1:
        return Verdict(EQUAL)
    return Verdict(EQUAL_UP_TO_FACTOR, ratio, inverse)


@dataclass(frozen=True)
class SystemMatch:
    """Member-wise matching of a derived generator set against a target
    system."""

    pairs: tuple          # (target Pde, derived Expr, Verdict)
    unmatched_targets: tuple
    extra_derived: tuple

    @property
    def ok(self):
        return not self.unmatched_targets and not self.extra_derived

    @property
    def ok_allowing_extras(self):
        return not self.unmatched_targets

    def worst_kind(self):
        kinds = [v.kind for _, _, v in self.pairs]
        if self.unmatched_targets or self.extra_derived:
            return DIFFERENT
        if EQUAL_UP_TO_FACTOR in kinds:
            return EQUAL_UP_TO_FACTOR
        return EQUAL


def match_systems(derived, target, target_bindings=None):
    """Pair every derived generator with a target member up to jet-free
    factors; leftovers are reported on both sides."""
    targets = list(target.members) if isinstance(target, PdeSystem) else list(target)
    exprs = []
    for t in targets:
        e = t.expr if isinstance(t, Pde) else Expr.from_value(t)
        if target_bindings:
            e = e.substitute(target_bindings)
        exprs.append(e)
    remaining = list(enumerate(derived))
    pairs = []
    unmatched = []
    for t, te in zip(targets, exprs):
        hit = None
        for pos, (i, de) in enumerate(remaining):
            v = equivalent_up_to_factor(de, te)
            if v.ok:
                hit = (pos, de, v)
                break
        if hit is None:
            unmatched.append(t)
        else:
            pos, de, v = hit
            remaining.pop(pos)
            pairs.append((t, de, v))
    extras = tuple(de for _, de in remaining)
    return SystemMatch(tuple(pairs), tuple(unmatched), extras)
