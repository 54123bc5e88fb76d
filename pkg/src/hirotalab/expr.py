"""Exact symbolic kernel.

Values are rational expressions ``num/den`` where ``num`` is a multivariate
polynomial over four kinds of generators (chart coordinates, scalar
parameters, opaque exponential atoms, and jet variables) with Fraction
coefficients, and ``den`` is a polynomial over the jet-free generators only.

Canonical form: numerator and denominator are reduced by their polynomial
gcd, the denominator is scaled to integer coefficients with content 1 and a
positive leading coefficient under the global degree-lexicographic order
(coordinates < parameters < atoms < jets, each group ordered by name).
Structural equality of canonical forms is mathematical equality in the
rational-plus-atoms fragment, with distinct atoms treated as algebraically
independent.

Exponential atoms carry their argument expression and differentiate by the
chain rule; jet variables differentiate by raising the multi-index, except
for the univariate spectral functions l1, l2, l3 which only depend on the
coordinate carrying their own label.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from math import gcd as _igcd

from .errors import (
    EssentialDependence,
    JetInDenominator,
    PoleRemains,
    ZeroDenominator,
)

Q = Fraction

#: jet functions constrained to a single coordinate, keyed by the axis label
#: they may differentiate along.
UNIVARIATE_FUNCS = {"l1": "1", "l2": "2", "l3": "3"}


# ---------------------------------------------------------------------------
# generators


class Generator:
    """A symbol the polynomial layer can raise to non-negative powers."""

    __slots__ = ("_key", "_hash")

    def key(self):
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Generator) and self._key == other._key
        )

    def __lt__(self, other):
        return self._key < other._key

    def is_jet(self):
        return False

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"<{type(self).__name__} {self}>"


class Coordinate(Generator):
    """A chart coordinate; ``axis`` is its position in the chart."""

    __slots__ = ("name", "axis")

    def __init__(self, name, axis):
        self.name = name
        self.axis = axis
        self._key = (0, name, axis)
        self._hash = hash(self._key)

    def __str__(self):
        return self.name


class Parameter(Generator):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        self._key = (1, name)
        self._hash = hash(self._key)

    def __str__(self):
        return self.name


class ExpAtom(Generator):
    """exp(arg) treated as a fresh transcendental generator.

    d(exp(u)) = exp(u)*du; atoms with structurally different canonical
    arguments are algebraically independent.
    """

    __slots__ = ("arg",)

    def __init__(self, arg):
        if not isinstance(arg, Expr):
            arg = Expr.from_value(arg)
        self.arg = arg
        self._key = (2, arg.key())
        self._hash = hash(self._key)

    def __str__(self):
        return f"exp({self.arg})"


class JetVar(Generator):
    """A partial derivative symbol f_alpha of an unknown function.

    ``multi`` counts derivatives per chart axis; ``labels`` carries the axis
    labels of the owning chart so jets render and compare chart-consistently.
    """

    __slots__ = ("func", "multi", "labels")

    def __init__(self, func, multi, labels):
        multi = tuple(int(m) for m in multi)
        labels = tuple(labels)
        if len(multi) != len(labels):
            raise ValueError("multi-index and label count differ")
        if any(m < 0 for m in multi):
            raise ValueError("negative derivative count")
        allowed = UNIVARIATE_FUNCS.get(func)
        if allowed is not None:
            for m, lab in zip(multi, labels):
                if m and lab != allowed:
                    raise ValueError(
                        f"{func} depends on the coordinate labelled "
                        f"{allowed!r} only"
                    )
        self.func = func
        self.multi = multi
        self.labels = labels
        self._key = (3, func, labels, multi)
        self._hash = hash(self._key)

    def is_jet(self):
        return True

    @property
    def order(self):
        return sum(self.multi)

    def raised(self, axis):
        """Jet with one more derivative along ``axis``; None when the
        univariate constraint kills it."""
        allowed = UNIVARIATE_FUNCS.get(self.func)
        if allowed is not None and self.labels[axis] != allowed:
            return None
        multi = list(self.multi)
        multi[axis] += 1
        return JetVar(self.func, multi, self.labels)

    def __str__(self):
        if self.order == 0:
            return self.func
        sub = "".join(
            lab * m for m, lab in zip(self.multi, self.labels)
        )
        return f"{self.func}_{sub}"


# ---------------------------------------------------------------------------
# monomials: tuples of (generator, exponent) sorted ascending by generator key


def _mono_mul(a, b):
    out = []
    ia = ib = 0
    while ia < len(a) and ib < len(b):
        ga, ea = a[ia]
        gb, eb = b[ib]
        ka, kb = ga.key(), gb.key()
        if ka < kb:
            out.append(a[ia])
            ia += 1
        elif kb < ka:
            out.append(b[ib])
            ib += 1
        else:
            out.append((ga, ea + eb))
            ia += 1
            ib += 1
    out.extend(a[ia:])
    out.extend(b[ib:])
    return tuple(out)


def _mono_div(a, b):
    """a / b, or None when b does not divide a."""
    out = []
    ia = ib = 0
    while ib < len(b):
        if ia >= len(a):
            return None
        ga, ea = a[ia]
        gb, eb = b[ib]
        ka, kb = ga.key(), gb.key()
        if ka < kb:
            out.append(a[ia])
            ia += 1
        elif kb < ka:
            return None
        else:
            if ea < eb:
                return None
            if ea > eb:
                out.append((ga, ea - eb))
            ia += 1
            ib += 1
    out.extend(a[ia:])
    return tuple(out)


def _mono_deg(m):
    return sum(e for _, e in m)


def _mono_cmp(a, b):
    """Degree-lexicographic; higher exponent on the globally earliest
    generator wins the tie."""
    da, db = _mono_deg(a), _mono_deg(b)
    if da != db:
        return 1 if da > db else -1
    ia = ib = 0
    while ia < len(a) and ib < len(b):
        ga, ea = a[ia]
        gb, eb = b[ib]
        ka, kb = ga.key(), gb.key()
        if ka < kb:
            return 1
        if kb < ka:
            return -1
        if ea != eb:
            return 1 if ea > eb else -1
        ia += 1
        ib += 1
    if ia < len(a):
        return 1
    if ib < len(b):
        return -1
    return 0


_MONO_SORT = cmp_to_key(_mono_cmp)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = terms

    # construction ---------------------------------------------------------

    @staticmethod
    def zero():
        return Poly({})

    @staticmethod
    def const(c):
        c = Q(c)
        return Poly({(): c}) if c else Poly({})

    @staticmethod
    def one():
        return Poly.const(1)

    @staticmethod
    def gen(g, exp=1):
        return Poly({((g, exp),): Q(1)})

    @staticmethod
    def from_terms(pairs):
        terms = {}
        for m, c in pairs:
            c = terms.get(m, Q(0)) + c
            if c:
                terms[m] = c
            elif m in terms:
                del terms[m]
        return Poly(terms)

    # predicates -----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self):
        if not self.terms:
            return Q(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def has_jet(self):
        return any(g.is_jet() for m in self.terms for g, _ in m)

    def generators(self):
        out = set()
        for m in self.terms:
            for g, _ in m:
                out.add(g)
        return out

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not other.terms:
            return self
        if not self.terms:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, Q(0)) + c
            if s:
                terms[m] = s
            elif m in terms:
                del terms[m]
        return Poly(terms)

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.terms or not other.terms:
            return Poly.zero()
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = terms.get(m, Q(0)) + c1 * c2
                if s:
                    terms[m] = s
                elif m in terms:
                    del terms[m]
        return Poly(terms)

    def scale(self, c):
        c = Q(c)
        if not c:
            return Poly.zero()
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono, coeff):
        if not coeff:
            return Poly.zero()
        return Poly({_mono_mul(m, mono): c * coeff for m, c in self.terms.items()})

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    # canonical order ------------------------------------------------------

    def leading(self):
        m = max(self.terms, key=_MONO_SORT)
        return m, self.terms[m]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _MONO_SORT(t[0]), reverse=True)

    def content_signed(self):
        """Rational c such that self/c has coprime integer coefficients and a
        positive leading coefficient; 0 for the zero polynomial."""
        if not self.terms:
            return Q(0)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = _igcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // _igcd(den_lcm, c.denominator)
        c = Q(num_gcd, den_lcm)
        if self.leading()[1] < 0:
            c = -c
        return c

    def primitive(self):
        c = self.content_signed()
        if not c or c == 1:
            return self
        return Poly({m: v / c for m, v in self.terms.items()})

    # structure ------------------------------------------------------------

    def degree_in(self, g):
        d = 0
        for m in self.terms:
            for gg, e in m:
                if gg == g:
                    d = max(d, e)
        return d

    def as_univariate(self, g):
        """dict degree -> Poly over the remaining generators."""
        out = {}
        for m, c in self.terms.items():
            d = 0
            rest = []
            for gg, e in m:
                if gg == g:
                    d = e
                else:
                    rest.append((gg, e))
            rest = tuple(rest)
            bucket = out.setdefault(d, {})
            bucket[rest] = bucket.get(rest, Q(0)) + c
        return {
            d: Poly({m: c for m, c in bucket.items() if c})
            for d, bucket in out.items()
            if any(bucket.values())
        }

    def key(self):
        return tuple(
            (tuple((g.key(), e) for g, e in m), (c.numerator, c.denominator))
            for m, c in self.sorted_terms()
        )

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        return _render_poly(self)

    __repr__ = __str__


def exact_div(f, g):
    """f/g when g divides f exactly, else None."""
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if f.is_zero():
        return Poly.zero()
    gm, gc = g.leading()
    r = f
    q = {}
    while not r.is_zero():
        rm, rc = r.leading()
        t = _mono_div(rm, gm)
        if t is None:
            return None
        c = rc / gc
        q[t] = q.get(t, Q(0)) + c
        r = r - g.mul_term(t, c)
    return Poly({m: c for m, c in q.items() if c})


# --- gcd (primitive PRS) -----------------------------------------------------


def _u_deg(u):
    return max(u) if u else -1


def _u_scale(u, p):
    return {d: c * p for d, c in u.items()}


def _u_sub(a, b):
    out = dict(a)
    for d, c in b.items():
        s = out.get(d, Poly.zero()) - c
        if s.is_zero():
            out.pop(d, None)
        else:
            out[d] = s
    return out


def _u_prem(a, b):
    """Pseudo-remainder of univariate-with-Poly-coefficient dicts."""
    m = _u_deg(b)
    lcb = b[m]
    r = dict(a)
    while r and _u_deg(r) >= m:
        k = _u_deg(r)
        lcr = r[k]
        shifted = {d + k - m: c * lcr for d, c in b.items()}
        r = _u_sub(_u_scale(r, lcb), shifted)
    return r


def _gcd_many(polys):
    g = Poly.zero()
    for p in polys:
        g = poly_gcd(g, p)
        if g.const_value() == 1:
            return g
    return g


def poly_gcd(f, g):
    """Primitive gcd with positive leading coefficient; gcd(0, g) = prim(g)."""
    if f.is_zero():
        return g.primitive()
    if g.is_zero():
        return f.primitive()
    if f.is_const() or g.is_const():
        return Poly.one()
    gens = f.generators() | g.generators()
    if not gens:
        return Poly.one()
    x = max(gens, key=lambda v: v.key())
    F = f.as_univariate(x)
    G = g.as_univariate(x)
    cont_f = _gcd_many(F.values())
    cont_g = _gcd_many(G.values())
    cont = poly_gcd(cont_f, cont_g)
    fp = {d: exact_div(c, cont_f) for d, c in F.items()}
    gp = {d: exact_div(c, cont_g) for d, c in G.items()}
    a, b = (fp, gp) if _u_deg(fp) >= _u_deg(gp) else (gp, fp)
    while True:
        r = _u_prem(a, b)
        if not r:
            prim = b
            break
        cont_r = _gcd_many(r.values())
        r = {d: exact_div(c, cont_r) for d, c in r.items()}
        a, b = b, r
    prim_poly = Poly.zero()
    for d, c in prim.items():
        prim_poly = prim_poly + c.mul_term(((x, d),) if d else (), Q(1))
    return (cont * prim_poly).primitive()


# ---------------------------------------------------------------------------
# expressions


class Expr:
    """Canonical rational expression num/den with jet-free denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        # internal: use Expr.make / from_value
        self.num = num
        self.den = den

    @staticmethod
    def make(num, den):
        if den.is_zero():
            raise ZeroDenominator("denominator is identically zero")
        if num.is_zero():
            return Expr(Poly.zero(), Poly.one())
        c = den.const_value()
        if c is not None:
            return Expr(num.scale(1 / c) if c != 1 else num, Poly.one())
        g = poly_gcd(num, den)
        if g.const_value() != 1:
            num = exact_div(num, g)
            den = exact_div(den, g)
        c = den.content_signed()
        if c != 1:
            den = den.primitive()
            num = num.scale(1 / c)
        if den.has_jet():
            raise JetInDenominator(f"jet variable left in denominator: {den}")
        return Expr(num, den)

    @staticmethod
    def from_value(v):
        if isinstance(v, Expr):
            return v
        if isinstance(v, Generator):
            return Expr(Poly.gen(v), Poly.one())
        if isinstance(v, (int, Fraction)):
            return Expr(Poly.const(v), Poly.one())
        raise TypeError(f"cannot coerce {v!r} to Expr")

    # predicates -----------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_jet_free(self):
        return not self.num.has_jet()

    def const_value(self):
        if self.den.const_value() is not None and self.num.is_const():
            return self.num.const_value() / self.den.const_value()
        return None

    def generators(self):
        return self.num.generators() | self.den.generators()

    def contains(self, g):
        """True when g occurs, including inside exponential atom arguments."""
        for gg in self.generators():
            if gg == g:
                return True
            if isinstance(gg, ExpAtom) and gg.arg.contains(g):
                return True
        return False

    def atoms(self):
        return [g for g in self.generators() if isinstance(g, ExpAtom)]

    def key(self):
        return (self.num.key(), self.den.key())

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = Expr.from_value(other)
        if self.den == other.den:
            return Expr.make(self.num + other.num, self.den)
        return Expr.make(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return Expr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-Expr.from_value(other))

    def __rsub__(self, other):
        return Expr.from_value(other) + (-self)

    def __mul__(self, other):
        other = Expr.from_value(other)
        return Expr.make(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Expr.from_value(other)
        if other.is_zero():
            raise ZeroDenominator("division by zero expression")
        return Expr.make(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return Expr.from_value(other) / self

    def __pow__(self, n):
        n = int(n)
        if n >= 0:
            return Expr.make(self.num**n, self.den**n)
        if self.is_zero():
            raise ZeroDenominator("zero to a negative power")
        return Expr.make(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.from_value(other)
        return (
            isinstance(other, Expr)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((frozenset(self.num.terms.items()), frozenset(self.den.terms.items())))

    # calculus ---------------------------------------------------------------

    def diff(self, coord):
        """Total derivative along a chart coordinate.

        Jets prolong, exp-atoms multiply by the derivative of their argument,
        univariate spectral functions only move along their own axis.
        """
        dn = _poly_diff(self.num, coord)
        if self.den.is_const():
            return dn * Expr.make(Poly.one(), self.den)
        dd = _poly_diff(self.den, coord)
        den_e = Expr(self.den, Poly.one())
        num_e = Expr(self.num, Poly.one())
        return (dn * den_e - num_e * dd) / (den_e * den_e)

    def substitute(self, bindings):
        """Simultaneous substitution generator -> Expr, then normalize.

        Atom arguments are substituted recursively; a direct binding of an
        atom takes precedence over rebuilding it.
        """
        bindings = {g: Expr.from_value(v) for g, v in bindings.items()}
        num = _poly_subst(self.num, bindings)
        den = _poly_subst(self.den, bindings)
        if den.is_zero():
            raise ZeroDenominator("substitution annihilated the denominator")
        return num / den

    def series_coefficients(self, param, low, high):
        """Laurent coefficients in ``param`` for exponents low..high."""
        if low > high:
            raise ValueError("empty exponent range")
        coeffs = _laurent(self, param)
        return [coeffs(t) for t in range(low, high + 1)]

    def limit_after_premultiply(self, param, k):
        """Coefficient of param^0 in param^k * self, guarding leftover poles."""
        coeffs = _laurent(self, param)
        bad = [t for t in range(coeffs.min_exp, -k) if not coeffs(t).is_zero()]
        if bad:
            raise PoleRemains(
                f"premultiplier {param}^{k} leaves poles at orders {bad}",
                orders=bad,
            )
        return coeffs(-k)

    # rendering ---------------------------------------------------------------

    def __str__(self):
        num = _render_poly(self.num)
        if self.den.const_value() == 1:
            return num
        den = _render_poly(self.den)
        if len(self.num.terms) > 1:
            num = f"({num})"
        if len(self.den.terms) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"Expr({self})"


ZERO = Expr(Poly.zero(), Poly.one())
ONE = Expr(Poly.one(), Poly.one())


def atom_exp(arg):
    """exp(arg) as an expression."""
    arg = Expr.from_value(arg)
    if arg.is_zero():
        return ONE
    return Expr.from_value(ExpAtom(arg))


# --- differentiation helpers ---------------------------------------------------


def _gen_diff(g, coord):
    """Derivative of a single generator; Expr or None for zero."""
    if isinstance(g, Coordinate):
        return ONE if g == coord else None
    if isinstance(g, Parameter):
        return None
    if isinstance(g, JetVar):
        raised = g.raised(coord.axis)
        if raised is None:
            return None
        return Expr.from_value(raised)
    if isinstance(g, ExpAtom):
        du = g.arg.diff(coord)
        if du.is_zero():
            return None
        return Expr.from_value(g) * du
    raise TypeError(g)


def _poly_diff(p, coord):
    total = ZERO
    for m, c in p.terms.items():
        for i, (g, e) in enumerate(m):
            dg = _gen_diff(g, coord)
            if dg is None:
                continue
            rest = Poly({tuple(x for j, x in enumerate(m) if j != i): Q(1)})
            term = Expr(rest, Poly.one()) * dg * Q(e) * c
            if e > 1:
                term = term * Expr(Poly.gen(g, e - 1), Poly.one())
            total = total + term
    return total


def _poly_subst(p, bindings):
    total = ZERO
    for m, c in p.terms.items():
        term = Expr(Poly.const(c), Poly.one())
        for g, e in m:
            mapped = _subst_gen(g, bindings)
            term = term * mapped**e
        total = total + term
    return total


def _subst_gen(g, bindings):
    if g in bindings:
        return bindings[g]
    if isinstance(g, ExpAtom):
        new_arg = g.arg.substitute(bindings)
        if new_arg == g.arg:
            return Expr.from_value(g)
        return atom_exp(new_arg)
    return Expr.from_value(g)


# --- Laurent machinery -----------------------------------------------------------


class _LaurentView:
    """Lazy Laurent coefficients of an expression in one generator."""

    def __init__(self, min_exp, coeff_fn):
        self.min_exp = min_exp
        self._fn = coeff_fn

    def __call__(self, t):
        return self._fn(t)


def _check_no_atom_dependence(e, param):
    for g in e.generators():
        if isinstance(g, ExpAtom) and g.arg.contains(param):
            raise EssentialDependence(
                f"exponential atom {g} depends essentially on {param}"
            )


def _laurent(e, param):
    _check_no_atom_dependence(e, param)
    if e.is_zero():
        return _LaurentView(0, lambda t: ZERO)
    N = e.num.as_univariate(param)
    D = e.den.as_univariate(param)
    vN = min(N)
    vD = min(D)
    Dp = {d - vD: c for d, c in D.items()}  # Dp[0] nonzero
    Np = {d - vN: c for d, c in N.items()}
    d0 = Expr(Dp[0], Poly.one())
    cache = {}

    def series(j):
        # Taylor coefficient j >= 0 of (Np / Dp)
        if j < 0:
            return ZERO
        if j in cache:
            return cache[j]
        acc = Expr(Np.get(j, Poly.zero()), Poly.one())
        for i, di in Dp.items():
            if 0 < i <= j:
                acc = acc - Expr(di, Poly.one()) * series(j - i)
        acc = acc / d0
        cache[j] = acc
        return acc

    shift = vN - vD
    return _LaurentView(shift, lambda t: series(t - shift))


# --- rendering -------------------------------------------------------------------


def _render_power(g, e):
    s = str(g)
    return s if e == 1 else f"{s}^{e}"


def _render_poly(p):
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        factors = [_render_power(g, e) for g, e in m]
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
