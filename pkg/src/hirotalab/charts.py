"""Coordinate charts and the jet helpers built on them.

Charts are 3- or 4-dimensional with ordered coordinates; each axis carries a
short label used in jet subscripts, so the jet written f_13 on the 3-chart
(p1,p2,p3) is the mixed derivative along the first and third axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr import Coordinate, Expr, JetVar, Parameter


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple[Coordinate, ...]
    labels: tuple[str, ...]
    unknowns: tuple[str, ...]

    @property
    def dimension(self):
        return len(self.coords)

    def coord(self, i):
        return self.coords[i]

    def coord_expr(self, i):
        return Expr.from_value(self.coords[i])

    def axis_by_label(self, label):
        return self.labels.index(label)

    def jet(self, func, *axes):
        """Jet of ``func`` differentiated once along each listed axis."""
        multi = [0] * self.dimension
        for a in axes:
            multi[a] += 1
        return JetVar(func, tuple(multi), self.labels)

    def jet_expr(self, func, *axes):
        return Expr.from_value(self.jet(func, *axes))

    def jet_of_multi(self, func, multi):
        return JetVar(func, tuple(multi), self.labels)

    def __str__(self):
        return self.name


def _mk(name, coord_names, labels, unknowns):
    coords = tuple(Coordinate(n, i) for i, n in enumerate(coord_names))
    return Chart(name, coords, tuple(labels), tuple(unknowns))


# The charts the catalog lives on. 3D p-coordinates host the Hirota family
# and its one-forms; q- and r-coordinates host the collision limits; the two
# 4-charts host the four-dimensional web systems; x/y and x/z host the
# hyper-Hermitian systems (two unknown functions f1, f2 or R1, R2).
P3 = _mk("P3", ("p1", "p2", "p3"), ("1", "2", "3"), ("f", "g", "l1", "l2", "l3"))
Q3 = _mk("Q3", ("q1", "q2", "q3"), ("1", "2", "3"), ("f", "l1", "l3"))
R3 = _mk("R3", ("r1", "r2", "r3"), ("1", "2", "3"), ("f", "H"))
P4 = _mk("P4", ("p0", "p1", "p2", "p3"), ("0", "1", "2", "3"), ("f",))
Q4 = _mk("Q4", ("q0", "q1", "q2", "q3"), ("0", "1", "2", "3"), ("f", "H"))
HX4 = _mk("HX4", ("x1", "x2", "y1", "y2"), ("x1", "x2", "y1", "y2"), ("f1", "f2"))
HZ4 = _mk("HZ4", ("x1", "x2", "z1", "z2"), ("x1", "x2", "z1", "z2"),
          ("f1", "f2", "R1", "R2"))

CHARTS = {c.name: c for c in (P3, Q3, R3, P4, Q4, HX4, HZ4)}


def param(name):
    return Expr.from_value(Parameter(name))


# Parameters shared across the catalog and the recipes.
LAM = Parameter("lam")        # the spectral parameter
DELTA = Parameter("delta")    # collision parameter
GAMMA = Parameter("gamma")    # second collision parameter
A = Parameter("A")
B = Parameter("B")
PA = Parameter("a")
PB = Parameter("b")
PC = Parameter("c")
LAM0, LAM1, LAM2, LAM3, LAM4 = (Parameter(f"lam{i}") for i in range(5))
