"""From lambda-families of one-forms (or distributions) to the equations they
encode.

integrability_residual computes alpha ^ d(alpha); lambda_reduce collects the
spectral-parameter coefficients of every component into a reduced generator
set; frobenius_conditions does the analogue for a distribution by reducing
Lie brackets modulo the span of the generators; cross_compatibility derives
the two consistency conditions of a first-order transport system.
"""

from __future__ import annotations

import random
from fractions import Fraction as Q

from .charts import LAM
from .errors import DependentFields, MalformedSystem
from .expr import Expr, JetVar, Parameter, Poly
from .forms import DifferentialForm, VectorField, exterior_derivative, lie_bracket, wedge
from .pde import Pde, PdeSystem, canonical_jet_poly


def integrability_residual(alpha):
    """alpha ^ d(alpha): one coefficient on a 3-chart, four on a 4-chart."""
    if alpha.degree != 1:
        raise ValueError("integrability residual is defined for 1-forms")
    return wedge(alpha, exterior_derivative(alpha))


def _lambda_coefficients(e, lam):
    """Coefficients of the powers of lam of a polynomial-in-lam expression,
    with jet-free denominators cleared."""
    num = e.num  # denominator is jet-free: a jet-free multiple to discard
    out = []
    for power, coeff in sorted(num.as_univariate(lam).items()):
        out.append(Expr(coeff, Poly.one()))
    return out


def _row_reduce(exprs):
    """Exact rational row reduction of expressions viewed as vectors over
    their monomial basis; deterministic pivot order."""
    from .expr import _MONO_SORT  # canonical column order

    rows = [dict(e.num.terms) for e in exprs if not e.is_zero()]
    if not rows:
        return []
    columns = sorted({m for r in rows for m in r}, key=_MONO_SORT, reverse=True)
    col_index = {m: i for i, m in enumerate(columns)}
    mat = [[r.get(m, Q(0)) for m in columns] for r in rows]
    pivot_row = 0
    for c in range(len(columns)):
        p = next((i for i in range(pivot_row, len(mat)) if mat[i][c]), None)
        if p is None:
            continue
        mat[pivot_row], mat[p] = mat[p], mat[pivot_row]
        inv = 1 / mat[pivot_row][c]
        mat[pivot_row] = [x * inv for x in mat[pivot_row]]
        for i in range(len(mat)):
            if i != pivot_row and mat[i][c]:
                s = mat[i][c]
                mat[i] = [x - s * y for x, y in zip(mat[i], mat[pivot_row])]
        pivot_row += 1
        if pivot_row == len(mat):
            break
    out = []
    for row in mat[:pivot_row]:
        terms = {columns[i]: v for i, v in enumerate(row) if v}
        if terms:
            out.append(Expr(Poly(terms), Poly.one()))
    return out


def reduce_generators(exprs, name, chart):
    """Canonicalize, eliminate rational-linear dependence, strip jet-free
    content, and drop jet-free-multiple duplicates."""
    canon = []
    for e in exprs:
        c = canonical_jet_poly(e)
        if not c.is_zero():
            canon.append(c)
    seen = {}
    for e in _row_reduce(canon):
        c = canonical_jet_poly(e)
        if not c.is_zero():
            seen.setdefault(c.key(), c)
    members = sorted(seen.values(), key=lambda e: str(e))
    return PdeSystem.make(
        name,
        chart,
        tuple(Pde.make(f"{name}.{i + 1}", chart, m) for i, m in enumerate(members)),
    )


def lambda_reduce(residual, lam=LAM, name="reduced"):
    """Collect all lam-coefficients across components into a reduced
    generator system.

    Reduction is in three steps: strip jet-free polynomial content from each
    coefficient, eliminate exact rational-linear dependence between the
    collected generators, and discard jet-free-multiple duplicates. The
    linear step matters for collided-spectrum pencils whose coefficients mix
    independent generators with rational weights.
    """
    collected = []
    for key in sorted(residual.coeffs):
        collected.extend(_lambda_coefficients(residual.coeffs[key], lam))
    return reduce_generators(collected, name, residual.chart)


def _generic_rank(fields, rng):
    """Rank of the component matrix at one random rational point."""
    gens = set()
    for x in fields:
        for comp in x.components:
            gens |= comp.generators()
    point = {g: Expr.from_value(Q(rng.randint(2, 97), rng.randint(1, 7))) for g in gens}
    rows = []
    for x in fields:
        row = []
        for comp in x.components:
            v = comp.substitute(point).const_value()
            if v is None:
                return None  # substitution left symbols; caller retries
            row.append(v)
        rows.append(row)
    # Gaussian elimination over Q
    rank = 0
    cols = len(rows[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                s = rows[i][c] / rows[r][c]
                rows[i] = [a - s * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def _reduce_mod_span(vec, fields):
    """Fraction-free reduction of a vector field modulo span{fields}.

    Pivots are chosen per generator row as its lowest-index nonzero component
    of minimal total degree; the residue is cross-multiplied, staying
    polynomial when the inputs are polynomial.
    """
    residue = vec
    for x in fields:
        pivot = None
        for a, comp in enumerate(x.components):
            if not comp.is_zero():
                deg = max((sum(e for _, e in m) for m in comp.num.terms), default=0)
                if pivot is None or deg < pivot[2]:
                    pivot = (a, comp, deg)
        if pivot is None:
            continue
        a, pa, _ = pivot
        ra = residue.components[a]
        if ra.is_zero():
            continue
        residue = VectorField(
            residue.chart,
            tuple(pa * rc - ra * xc for rc, xc in zip(residue.components, x.components)),
        )
    return residue


def frobenius_conditions(fields, lam=LAM, name="frobenius"):
    """Bracket every pair, reduce modulo the span, and collect the
    lam-coefficients of the obstruction."""
    if len(fields) < 2:
        raise ValueError("need at least two generators")
    chart = fields[0].chart
    rng = random.Random(20260809)
    for _ in range(5):
        rank = _generic_rank(fields, rng)
        if rank is not None:
            break
    if rank is not None and rank < len(fields):
        raise DependentFields(
            f"generators have generic rank {rank} < {len(fields)}"
        )
    collected = []
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            br = lie_bracket(fields[i], fields[j])
            residue = _reduce_mod_span(br, fields)
            for comp in residue.components:
                if not comp.is_zero():
                    collected.extend(_lambda_coefficients(comp, lam))
    return reduce_generators(collected, name, chart)


# --- cross compatibility of transport systems ----------------------------------


def _parse_sys0_shape(system):
    """Members must read f_i + (first-order H jet) * f_k with one shared k.

    Returns (chart, relations, k) with relations as a list of
    (i, H-jet JetVar).
    """
    chart = system.chart
    relations = []
    ks = set()
    for member in system.members:
        e = member.expr
        if e.den.const_value() != 1:
            raise MalformedSystem(f"{member.name}: not polynomial")
        lone = None
        pair = None
        for mono, c in e.num.terms.items():
            jets = [(g, p) for g, p in mono if isinstance(g, JetVar)]
            if len(mono) == 1 and len(jets) == 1 and jets[0][1] == 1 \
                    and jets[0][0].order == 1 and c == 1:
                if lone is not None:
                    raise MalformedSystem(f"{member.name}: two lone jets")
                lone = jets[0][0]
            elif len(jets) == 2 and all(p == 1 for _, p in jets) and c == 1 \
                    and len(mono) == 2:
                orders = sorted((g.order for g, _ in jets))
                if orders != [1, 1]:
                    raise MalformedSystem(f"{member.name}: bad product term")
                pair = jets
            else:
                raise MalformedSystem(f"{member.name}: unexpected term")
        if lone is None or pair is None:
            raise MalformedSystem(f"{member.name}: not of transport shape")
        f_func = lone.func
        h_jet = next(g for g, _ in pair if g.func != f_func)
        fk_jet = next(g for g, _ in pair if g.func == f_func)
        i = lone.multi.index(1)
        k = fk_jet.multi.index(1)
        ks.add(k)
        relations.append((i, h_jet))
    if len(ks) != 1:
        raise MalformedSystem("members do not share one distinguished jet")
    k = ks.pop()
    if any(i == k for i, _ in relations):
        raise MalformedSystem("a relation differentiates along the free axis")
    return chart, relations, k, f_func


def cross_compatibility(system, eliminate, name=None):
    """Consistency conditions of a transport system f_i + H_{s(i)} f_k = 0.

    eliminate="f": conditions on H (cross-differentiate the relations and
    substitute them back, then read off the coefficients of the free jets of
    f). eliminate="H": conditions on f (equality of mixed H-derivatives with
    H_{s(i)} = -f_i/f_k, cleared of the f_k^2 denominators).
    """
    chart, relations, k, f_func = _parse_sys0_shape(system)
    if eliminate not in ("f", "H"):
        raise ValueError("eliminate must be 'f' or 'H'")
    name = name or f"{system.name}_elim_{eliminate}"
    conditions = []
    if eliminate == "f":
        # bindings: f_i -> -H_{s(i)} f_k and their k-prolongations
        fk = chart.jet_expr(f_func, k)
        fkk = chart.jet_expr(f_func, k, k)
        bind = {}
        for i, h in relations:
            he = Expr.from_value(h)
            hk = chart.jet_of_multi(h.func, tuple(
                m + (1 if a == k else 0) for a, m in enumerate(h.multi)
            ))
            bind[chart.jet(f_func, i)] = -he * fk
            bind[chart.jet(f_func, i, k)] = -(Expr.from_value(hk) * fk + he * fkk)
        for n1 in range(len(relations)):
            for n2 in range(n1 + 1, len(relations)):
                i, hi = relations[n1]
                j, hj = relations[n2]
                ri = chart.jet_expr(f_func, i) + Expr.from_value(hi) * fk
                rj = chart.jet_expr(f_func, j) + Expr.from_value(hj) * fk
                g = ri.diff(chart.coord(j)) - rj.diff(chart.coord(i))
                g = g.substitute(bind)
                # collect coefficients of the surviving f-jets
                by_f = {}
                for mono, c in g.num.terms.items():
                    fpart = tuple(x for x in mono if isinstance(x[0], JetVar)
                                  and x[0].func == f_func)
                    rest = tuple(x for x in mono if x not in fpart)
                    bucket = by_f.setdefault(fpart, {})
                    bucket[rest] = bucket.get(rest, Q(0)) + c
                for fpart, bucket in sorted(by_f.items()):
                    coeff = Poly({m: c for m, c in bucket.items() if c})
                    if not coeff.is_zero():
                        conditions.append(Expr(coeff, Poly.one()))
    else:
        fk = chart.jet_expr(f_func, k)
        for n1 in range(len(relations)):
            for n2 in range(n1 + 1, len(relations)):
                i, hi = relations[n1]
                j, hj = relations[n2]
                fi = chart.jet_expr(f_func, i)
                fj = chart.jet_expr(f_func, j)
                u = hi.multi.index(1)  # axis of H_{s(i)}
                v = hj.multi.index(1)
                # d_v(f_i/f_k) = d_u(f_j/f_k), cleared of f_k^2
                lhs = fi.diff(chart.coord(v)) * fk - fi * fk.diff(chart.coord(v))
                rhs = fj.diff(chart.coord(u)) * fk - fj * fk.diff(chart.coord(u))
                conditions.append(lhs - rhs)
    return reduce_generators(conditions, name, chart)
