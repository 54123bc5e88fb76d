"""Floating-point verification layer.

Grids are dense row-major float64 samples of one unknown on a uniform
rectilinear box. Residuals of catalog equations are evaluated either from
closed-form solutions (exact analytic derivatives of the expression tree,
sampled on a box) or from grids via second-order central differences on the
interior band. All evaluation orders are fixed, so identical inputs give
bit-identical numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction as Q

import numpy as np

from .errors import (
    BoundaryNode,
    EvaluationDomain,
    ShapeMismatch,
)
from .expr import Coordinate, ExpAtom, Expr, JetVar, Parameter
from . import minilang
from .pde import Pde, PdeSystem


@dataclass(frozen=True)
class Axis:
    origin: float
    spacing: float
    count: int

    def points(self):
        return self.origin + self.spacing * np.arange(self.count)


@dataclass
class Grid:
    axes: tuple
    unknown: str
    values: np.ndarray

    @staticmethod
    def make(axes, unknown, values):
        axes = tuple(axes)
        values = np.asarray(values, dtype=np.float64)
        shape = tuple(a.count for a in axes)
        if values.shape != shape:
            raise ShapeMismatch(f"values shape {values.shape} != {shape}")
        if len(axes) not in (3, 4):
            raise ValueError("grids are 3- or 4-dimensional")
        if any(a.count < 5 for a in axes):
            raise ValueError("need at least 5 nodes per axis")
        if any(a.spacing <= 0 for a in axes):
            raise ValueError("spacing must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        return Grid(axes, unknown, values)

    @property
    def dimension(self):
        return len(self.axes)

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "axes": [
                {"origin": a.origin, "spacing": a.spacing, "count": a.count}
                for a in self.axes
            ],
            "unknown": self.unknown,
            "values": self.values.reshape(-1).tolist(),
        }

    @staticmethod
    def from_dict(d):
        axes = tuple(Axis(a["origin"], a["spacing"], a["count"]) for a in d["axes"])
        shape = tuple(a.count for a in axes)
        values = np.array(d["values"], dtype=np.float64).reshape(shape)
        return Grid.make(axes, d["unknown"], values)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @staticmethod
    def load(path):
        with open(path) as fh:
            return Grid.from_dict(json.load(fh))


def sample_grid(axes, unknown, fn):
    """Fill a grid from a vectorized callable of the coordinate arrays."""
    mesh = np.meshgrid(*(a.points() for a in axes), indexing="ij")
    return Grid.make(axes, unknown, np.asarray(fn(*mesh), dtype=np.float64)
                     * np.ones(mesh[0].shape))


def uniform_axes(dim, h, lo=-1.0, hi=1.0):
    count = int(round((hi - lo) / h)) + 1
    return tuple(Axis(lo, h, count) for _ in range(dim))


# --- finite differences -------------------------------------------------------


def fd_jet(grid, node, multi):
    """Second-order central difference at one interior node."""
    node = tuple(node)
    multi = tuple(multi)
    if len(node) != grid.dimension or len(multi) != grid.dimension:
        raise ShapeMismatch("node/multi arity mismatch")
    if sum(multi) > 2 or any(m < 0 for m in multi):
        raise ValueError("multi-index must have total order <= 2")
    for a, (i, m) in enumerate(zip(node, multi)):
        lo = 1 if m else 0
        if i < lo or i >= grid.axes[a].count - lo:
            raise BoundaryNode(f"node {node} too close to the boundary on axis {a}")
    v = grid.values
    hs = [a.spacing for a in grid.axes]

    def shift(idx, a, off):
        out = list(idx)
        out[a] += off
        return tuple(out)

    active = [a for a, m in enumerate(multi) if m]
    if not active:
        return float(v[node])
    if len(active) == 1:
        a = active[0]
        if multi[a] == 1:
            return float((v[shift(node, a, 1)] - v[shift(node, a, -1)]) / (2 * hs[a]))
        return float(
            (v[shift(node, a, 1)] - 2 * v[node] + v[shift(node, a, -1)])
            / hs[a] ** 2
        )
    a, b = active
    pp = v[shift(shift(node, a, 1), b, 1)]
    pm = v[shift(shift(node, a, 1), b, -1)]
    mp = v[shift(shift(node, a, -1), b, 1)]
    mm = v[shift(shift(node, a, -1), b, -1)]
    return float((pp - pm - mp + mm) / (4 * hs[a] * hs[b]))


def _interior(values):
    sl = tuple(slice(1, -1) for _ in range(values.ndim))
    return values[sl]


def fd_slab(grid, multi):
    """Vectorized central differences over the full interior band."""
    v = grid.values
    hs = [a.spacing for a in grid.axes]
    dim = grid.dimension

    def band(offsets):
        sl = []
        for a in range(dim):
            off = offsets.get(a, 0)
            sl.append(slice(1 + off, v.shape[a] - 1 + off))
        return v[tuple(sl)]

    active = [a for a, m in enumerate(multi) if m]
    if sum(multi) == 0:
        return band({})
    if len(active) == 1:
        a = active[0]
        if multi[a] == 1:
            return (band({a: 1}) - band({a: -1})) / (2 * hs[a])
        return (band({a: 1}) - 2 * band({}) + band({a: -1})) / hs[a] ** 2
    a, b = active
    return (
        band({a: 1, b: 1}) - band({a: 1, b: -1})
        - band({a: -1, b: 1}) + band({a: -1, b: -1})
    ) / (4 * hs[a] * hs[b])


# --- evaluating exact expressions over arrays -----------------------------------


def eval_expr_numeric(expr, env):
    """Evaluate an exact expression with generators bound to arrays/floats."""

    def gen_value(g):
        if g in env:
            return env[g]
        if isinstance(g, ExpAtom):
            return np.exp(eval_expr_numeric(g.arg, env))
        raise KeyError(f"unbound generator {g}")

    def poly_value(p):
        total = 0.0
        for m, c in p.sorted_terms():
            term = float(c)
            for g, e in m:
                term = term * gen_value(g) ** e
            total = total + term
        return total

    num = poly_value(expr.num)
    if expr.den.const_value() == 1:
        return num
    return num / poly_value(expr.den)


def _grid_env(pde, grids, params):
    chart = pde.chart
    first = next(iter(grids.values()))
    for g in grids.values():
        if g.axes != first.axes:
            raise ShapeMismatch("grids must share axes")
    pts = [a.points()[1:-1] for a in first.axes]
    mesh = np.meshgrid(*pts, indexing="ij")
    env = {}
    for i, c in enumerate(chart.coords):
        env[c] = mesh[i]
    for name, value in params.items():
        env[Parameter(name)] = float(value)
    for g in pde.expr.generators():
        if isinstance(g, JetVar):
            if g.func not in grids:
                raise ShapeMismatch(f"no grid provided for unknown {g.func}")
            env[g] = fd_slab(grids[g.func], g.multi)
    return env


def residual_grid(pde, grids, params=None):
    """Finite-difference residual report over the interior band.

    Accepts a single equation or a system (max over members). Nodes where a
    grid carries NaN (missing) are excluded from the norms.
    """
    params = params or {}
    members = pde.members if isinstance(pde, PdeSystem) else (pde,)
    max_abs = 0.0
    sumsq = 0.0
    nodes = 0
    for member in members:
        env = _grid_env(member, grids, params)
        res = eval_expr_numeric(member.expr, env)
        res = np.asarray(res, dtype=np.float64)
        mask = np.isfinite(res)
        vals = np.abs(res[mask])
        if vals.size:
            max_abs = max(max_abs, float(vals.max()))
            sumsq += float(np.sum(res[mask] ** 2))
        nodes = int(mask.sum())
    return {"max_abs": max_abs, "l2": math.sqrt(sumsq), "nodes": nodes}


# --- closed-form solutions -------------------------------------------------------


@dataclass(frozen=True)
class ClosedFormSolution:
    """An unknown given in the mini-language with numeric parameter bindings.

    ``profile`` names the analytic function bound to the free symbol g (sin,
    cos or exp); an opaque callable forces nested numeric differentiation."""

    unknown: str
    ast: object
    params: dict = None
    profile: object = None

    @staticmethod
    def make(unknown, text, params=None, profile=None):
        return ClosedFormSolution(unknown, minilang.parse(text),
                                  dict(params or {}), profile)

    def bound_ast(self):
        ast = self.ast
        if isinstance(self.profile, str):
            ast = minilang.bind_profile(ast, self.profile)
        return ast

    def var_env(self, chart, mesh):
        env = {}
        for i, c in enumerate(chart.coords):
            env[c.name] = mesh[i]
            # trailing-label aliases (p3/q3/r3 address the same axis)
            for prefix in "pqr":
                env.setdefault(prefix + chart.labels[i], mesh[i])
        for k, v in (self.params or {}).items():
            env[k] = float(v)
        return env


def _is_exp_rational(ast):
    if isinstance(ast, minilang.Num):
        return isinstance(ast.value, Q)
    if isinstance(ast, minilang.Var):
        return True
    if isinstance(ast, minilang.Bin):
        return _is_exp_rational(ast.left) and _is_exp_rational(ast.right)
    if isinstance(ast, minilang.Pow):
        return _is_exp_rational(ast.base)
    if isinstance(ast, minilang.Call):
        return ast.func == "exp" and _is_exp_rational(ast.arg)
    return False


def richardson_jet(fn, point, multi, h0=1e-5):
    """Nested central differences with one Richardson extrapolation step.

    Fallback used when a solution's profile is an opaque callable."""
    multi = tuple(multi)
    order = sum(multi)
    if order == 0:
        return fn(point)
    axis = next(a for a, m in enumerate(multi) if m)
    rest = tuple(m - (1 if a == axis else 0) for a, m in enumerate(multi))

    def d(h):
        up = list(point)
        dn = list(point)
        up[axis] += h
        dn[axis] -= h
        return (richardson_jet(fn, tuple(up), rest, h0)
                - richardson_jet(fn, tuple(dn), rest, h0)) / (2 * h)

    d1, d2 = d(h0), d(h0 / 2)
    return (4 * d2 - d1) / 3


def residual_closed_form(pde, solution, box=(-1.0, 1.0), n=17, params=None):
    """Residual of a closed-form candidate.

    Symbolic branch (exact expression of the residual) when the solution is
    in the exp-rational fragment with exact parameters; a numeric max over an
    n^dim sample of the box always.
    """
    params = dict(params or {})
    members = pde.members if isinstance(pde, PdeSystem) else (pde,)
    chart = members[0].chart
    dim = chart.dimension
    axes = tuple(Axis(box[0], (box[1] - box[0]) / (n - 1), n) for _ in range(dim))
    mesh = np.meshgrid(*(a.points() for a in axes), indexing="ij")

    # symbolic branch
    symbolic = None
    exact_params = all(isinstance(v, (int, Q)) for v in (solution.params or {}).values())
    if _is_exp_rational(solution.ast) and exact_params:
        sym_params = [Parameter(k) for k in (solution.params or {})]
        base = minilang.to_symbolic(solution.ast, chart, sym_params)
        bindings = {Parameter(k): Expr.from_value(Q(v))
                    for k, v in (solution.params or {}).items()}
        base = base.substitute(bindings)
        residuals = []
        for member in members:
            jet_bind = {}
            for g in member.expr.generators():
                if isinstance(g, JetVar) and g.func == solution.unknown:
                    d = base
                    for a, m in enumerate(g.multi):
                        for _ in range(m):
                            d = d.diff(chart.coord(a))
                    jet_bind[g] = d
            e = member.expr.substitute(jet_bind)
            e = e.substitute({Parameter(k): Expr.from_value(Q(v))
                              for k, v in params.items()
                              if isinstance(v, (int, Q))})
            residuals.append(e)
        symbolic = residuals[0] if len(residuals) == 1 else residuals

    # numeric branch
    ast = solution.bound_ast()
    opaque = callable(solution.profile)
    env = solution.var_env(chart, mesh)
    max_abs = 0.0
    for member in members:
        gen_env = {}
        for i, c in enumerate(chart.coords):
            gen_env[c] = mesh[i]
        for k, v in params.items():
            gen_env[Parameter(k)] = float(v)
        for g in member.expr.generators():
            if isinstance(g, JetVar):
                if g.func != solution.unknown:
                    raise ShapeMismatch(
                        f"solution binds {solution.unknown}, equation needs {g.func}"
                    )
                if opaque:
                    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)

                    def fn(pt, _ast=solution.ast):
                        e2 = dict(env)
                        for i, c in enumerate(chart.coords):
                            e2[c.name] = pt[i]
                            for prefix in "pqr":
                                e2[prefix + chart.labels[i]] = pt[i]
                        return minilang.eval_numeric(_ast, e2, solution.profile)

                    vals = np.array([
                        richardson_jet(fn, tuple(p), g.multi) for p in pts
                    ])
                    gen_env[g] = vals.reshape(mesh[0].shape)
                else:
                    d_ast = ast
                    for a, m in enumerate(g.multi):
                        for _ in range(m):
                            d_ast = minilang.diff_ast(d_ast, chart.coords[a].name)
                    vals = minilang.eval_numeric(d_ast, env)
                    gen_env[g] = vals * np.ones(mesh[0].shape)
        res = eval_expr_numeric(member.expr, gen_env)
        res = np.asarray(res, dtype=np.float64)
        if not np.all(np.isfinite(res)):
            raise EvaluationDomain("solution is singular on the sample box")
        max_abs = max(max_abs, float(np.max(np.abs(res))))
    return {"symbolic": symbolic, "max_abs": max_abs}


def grid_from_solution(solution, axes, chart):
    """Sample a closed-form solution onto a grid."""
    mesh = np.meshgrid(*(a.points() for a in axes), indexing="ij")
    env = solution.var_env(chart, mesh)
    vals = minilang.eval_numeric(solution.bound_ast(), env, solution.profile)
    return Grid.make(axes, solution.unknown, vals * np.ones(mesh[0].shape))


def convergence_order(residuals):
    """Observed orders log2(r(h)/r(h/2)) down a refinement sequence."""
    return [math.log2(a / b) for a, b in zip(residuals, residuals[1:])]
