"""Differential forms and vector fields with exact-expression coefficients.

Forms are stored sparsely as maps from strictly increasing coordinate-index
tuples to expressions. The spectral parameter lam lives inside coefficients
and is never differentiated by d.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ChartMismatch
from .expr import Expr, ZERO


def _merge_indices(a, b):
    """Concatenate two strictly increasing tuples; (sign, merged) or None on
    a repeated index."""
    out = []
    sign = 1
    ia = ib = 0
    # count transpositions needed to interleave b into a
    while ia < len(a) and ib < len(b):
        if a[ia] == b[ib]:
            return None
        if a[ia] < b[ib]:
            out.append(a[ia])
            ia += 1
        else:
            out.append(b[ib])
            if (len(a) - ia) % 2:
                sign = -sign
            ib += 1
    out.extend(a[ia:])
    out.extend(b[ib:])
    return sign, tuple(out)


@dataclass(frozen=True)
class DifferentialForm:
    chart: object
    degree: int
    coeffs: dict

    def __post_init__(self):
        for k in self.coeffs:
            if len(k) != self.degree or list(k) != sorted(set(k)):
                raise ValueError(f"bad index tuple {k} for degree {self.degree}")

    @staticmethod
    def make(chart, degree, coeffs):
        clean = {}
        for k, v in coeffs.items():
            v = Expr.from_value(v)
            if not v.is_zero():
                clean[tuple(k)] = v
        return DifferentialForm(chart, degree, clean)

    def is_zero(self):
        return not self.coeffs

    def coeff(self, *idx):
        return self.coeffs.get(tuple(idx), ZERO)

    def __add__(self, other):
        if self.chart != other.chart or self.degree != other.degree:
            raise ChartMismatch("cannot add forms on different charts/degrees")
        merged = dict(self.coeffs)
        for k, v in other.coeffs.items():
            merged[k] = merged.get(k, ZERO) + v
        return DifferentialForm.make(self.chart, self.degree, merged)

    def __neg__(self):
        return DifferentialForm(self.chart, self.degree,
                                {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Expr.from_value(c)
        return DifferentialForm.make(
            self.chart, self.degree, {k: v * c for k, v in self.coeffs.items()}
        )

    def __str__(self):
        if not self.coeffs:
            return "0"
        names = [c.name for c in self.chart.coords]
        parts = []
        for k in sorted(self.coeffs):
            basis = "^".join(f"d{names[i]}" for i in k) or "1"
            parts.append(f"({self.coeffs[k]}) {basis}")
        return " + ".join(parts)


def wedge(omega, eta):
    """Graded-antisymmetric product; returns the zero form of the combined
    degree when it exceeds the chart dimension."""
    if omega.chart != eta.chart:
        raise ChartMismatch("wedge of forms on different charts")
    degree = omega.degree + eta.degree
    out = {}
    if degree <= omega.chart.dimension:
        for ka, va in omega.coeffs.items():
            for kb, vb in eta.coeffs.items():
                merged = _merge_indices(ka, kb)
                if merged is None:
                    continue
                sign, k = merged
                term = va * vb
                if sign < 0:
                    term = -term
                out[k] = out.get(k, ZERO) + term
    return DifferentialForm.make(omega.chart, degree, out)


def exterior_derivative(omega):
    """d, using total derivatives with jet prolongation; d never touches the
    spectral parameter."""
    chart = omega.chart
    out = {}
    for k, v in omega.coeffs.items():
        for a in range(chart.dimension):
            dv = v.diff(chart.coord(a))
            if dv.is_zero():
                continue
            merged = _merge_indices((a,), k)
            if merged is None:
                continue
            sign, idx = merged
            term = dv if sign > 0 else -dv
            out[idx] = out.get(idx, ZERO) + term
    return DifferentialForm.make(chart, omega.degree + 1, out)


def d_of_function(chart, e):
    """Differential of a 0-form given as a bare expression."""
    return exterior_derivative(DifferentialForm.make(chart, 0, {(): e}))


@dataclass(frozen=True)
class VectorField:
    chart: object
    components: tuple

    @staticmethod
    def make(chart, components):
        comps = tuple(Expr.from_value(c) for c in components)
        if len(comps) != chart.dimension:
            raise ValueError("component count must match the chart dimension")
        return VectorField(chart, comps)

    def apply_to(self, e):
        """Directional derivative X(e)."""
        out = ZERO
        for a, comp in enumerate(self.components):
            if comp.is_zero():
                continue
            out = out + comp * e.diff(self.chart.coord(a))
        return out

    def __add__(self, other):
        if self.chart != other.chart:
            raise ChartMismatch("vector fields on different charts")
        return VectorField(
            self.chart,
            tuple(a + b for a, b in zip(self.components, other.components)),
        )

    def scale(self, c):
        c = Expr.from_value(c)
        return VectorField(self.chart, tuple(c * x for x in self.components))

    def __str__(self):
        names = [c.name for c in self.chart.coords]
        parts = [
            f"({comp}) d/d{names[a]}"
            for a, comp in enumerate(self.components)
            if not comp.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


def lie_bracket(x, y):
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    if x.chart != y.chart:
        raise ChartMismatch("bracket of fields on different charts")
    comps = tuple(
        x.apply_to(y.components[k]) - y.apply_to(x.components[k])
        for k in range(x.chart.dimension)
    )
    return VectorField(x.chart, comps)
