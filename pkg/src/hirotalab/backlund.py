"""Solution correspondences run as actual integrations.

The transport system f_i + H_{i+1} f_k = 0 says f is a joint first integral
of the fields V_i = d_i + H_{i+1} d_k. Given H, f is built by tracing each
grid node backward along the fields to the k-axis and evaluating the initial
data there (classical RK4, fixed step h/4, deterministic sweep order). Given
f on a grid, H is rebuilt from H_{i+1} = -f_i/f_k by trapezoidal path
integration with the gauge H(., 0, 0) = 0 (path along the middle axis first,
then the last).
"""

from __future__ import annotations

import math

import numpy as np

from .charts import Q4, R3
from .errors import CharacteristicEscape, ShapeMismatch, SmallDenominator
from .grids import Axis, Grid, fd_slab, grid_from_solution, residual_grid
from . import minilang
from .catalog import pde_catalog


def _index_of_zero(axis):
    i = int(round(-axis.origin / axis.spacing))
    if not (0 <= i < axis.count) or abs(axis.origin + i * axis.spacing) > 1e-12:
        raise ValueError("coordinate zero must lie on the grid")
    return i


class _ClosedFormField:
    """Vectorized evaluation of one first derivative of a closed-form H."""

    def __init__(self, solution, chart, axis_name):
        ast = solution.bound_ast()
        self.ast = minilang.diff_ast(ast, axis_name)
        self.solution = solution
        self.chart = chart

    def __call__(self, coords):
        env = {}
        for i, c in enumerate(self.chart.coords):
            env[c.name] = coords[i]
            for prefix in "pqr":
                env.setdefault(prefix + self.chart.labels[i], coords[i])
        for k, v in (self.solution.params or {}).items():
            env[k] = float(v)
        return minilang.eval_numeric(self.ast, env, self.solution.profile)


class _TricubicField:
    """Local 4-point Lagrange interpolation per axis of a sampled array."""

    def __init__(self, grid):
        self.axes = grid.axes
        self.values = grid.values

    def __call__(self, coords):
        # only the last axis is interpolated off-node in 3D transport, but
        # treat all axes uniformly for the 4D case
        v = self.values
        dim = len(self.axes)
        idx = []
        ts = []
        for a in range(dim):
            ax = self.axes[a]
            x = (np.asarray(coords[a]) - ax.origin) / ax.spacing
            i0 = np.clip(np.floor(x).astype(int), 1, ax.count - 3)
            idx.append(i0)
            ts.append(x - i0)
        out = 0.0
        for offs in np.ndindex(*(4,) * dim):
            w = 1.0
            take = []
            for a, o in enumerate(offs):
                t = ts[a]
                # Lagrange basis on nodes {-1, 0, 1, 2}
                nodes = [-1.0, 0.0, 1.0, 2.0]
                xo = nodes[o]
                wa = 1.0
                for nn in nodes:
                    if nn != xo:
                        wa = wa * (t - nn) / (xo - nn)
                w = w * wa
                take.append(idx[a] + (o - 1))
            out = out + w * v[tuple(take)]
        return out


def _rk4_leg(p_fixed, moving_start, q_start, field, steps, hstep, box, escape_mask):
    """Integrate dq/ds = field(...) backward along one coordinate.

    p_fixed: dict axis -> array (coordinates held fixed on this leg)
    moving_start: scalar start value of the leg coordinate
    q_start: array of transported-coordinate values
    Returns (q_end, escape_mask)."""
    q = np.array(q_start, dtype=np.float64)
    s = moving_start
    lo, hi = box
    for _ in range(steps):
        def f(ss, qq):
            coords = dict(p_fixed)
            coords["s"] = ss
            return field(coords, ss, qq)

        k1 = f(s, q)
        k2 = f(s + hstep / 2, q + (hstep / 2) * k1)
        k3 = f(s + hstep / 2, q + (hstep / 2) * k2)
        k4 = f(s + hstep, q + hstep * k3)
        q = q + (hstep / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        s += hstep
        escape_mask |= (q < lo - 1e-9) | (q > hi + 1e-9)
    return q, escape_mask


def backlund_h_to_f(h_solution, initial_text, axes=None, h=1.0 / 64,
                    check=True, h_grids=None):
    """Transport initial data f(0, 0, p3) along V1 = d1 + H2 d3 and
    V2 = d2 + H3 d3; returns the f grid and an eq3 residual report.

    h_solution: ClosedFormSolution for H (or None with h_grids supplying
    sampled H2 and H3 grids). initial_text: mini-language expression in p3,
    strictly monotone.
    """
    axes = axes or tuple(Axis(-1.0, h, int(round(2 / h)) + 1) for _ in range(3))
    ax1, ax2, ax3 = axes
    i0 = _index_of_zero(ax1)
    j0 = _index_of_zero(ax2)
    if h_grids is not None:
        H2 = _TricubicField(h_grids["H2"])
        H3 = _TricubicField(h_grids["H3"])

        def fH2(coords):
            return H2(coords)

        def fH3(coords):
            return H3(coords)
    else:
        fH2 = _ClosedFormField(h_solution, R3, R3.coords[1].name)
        fH3 = _ClosedFormField(h_solution, R3, R3.coords[2].name)
    init_ast = minilang.parse(initial_text)

    x1 = ax1.points()
    x2 = ax2.points()
    x3 = ax3.points()
    P1, P3 = np.meshgrid(x1, x3, indexing="ij")
    hstep = min(a.spacing for a in axes) / 4

    values = np.empty((ax1.count, ax2.count, ax3.count))
    box = (min(ax3.origin, -1.0), max(ax3.origin + ax3.spacing * (ax3.count - 1), 1.0))
    for j in range(ax2.count):
        # leg 1: along p2 from x2[j] back to 0 (dp3/dp2 = H3)
        q = P3.copy()
        esc = np.zeros(P3.shape, dtype=bool)
        steps = 4 * abs(j - j0)
        if steps:
            sgn = -1.0 if x2[j] > 0 else 1.0
            step = sgn * ax2.spacing / 4

            def field(coords, s, qq):
                return fH3((P1, np.full(P1.shape, s), qq))

            q, esc = _rk4_leg({}, x2[j], q, lambda c, s, qq: field(c, s, qq),
                              steps, step, box, esc)
        # leg 2: along p1 from x1[i] back to 0 (dp3/dp1 = H2), p2 = 0
        out = np.empty(P3.shape)
        for i in range(ax1.count):
            qi = q[i].copy()
            esci = esc[i].copy()
            steps_i = 4 * abs(i - i0)
            if steps_i:
                sgn = -1.0 if x1[i] > 0 else 1.0
                step = sgn * ax1.spacing / 4

                def field_i(coords, s, qq):
                    return fH2((np.full(qq.shape, s), np.zeros(qq.shape), qq))

                qi, esci = _rk4_leg({}, x1[i], qi, field_i, steps_i, step, box, esci)
            vals = minilang.eval_numeric(init_ast, {"p3": qi, "r3": qi, "q3": qi})
            vals = np.where(esci, np.nan, vals)
            out[i] = vals
        values[:, j, :] = out

    f_grid = Grid(axes, "f", values)
    report = {}
    if check:
        report = residual_grid(pde_catalog("eq3"), {"f": f_grid})
    return f_grid, report


def backlund_f_to_h(f_grid, floor=0.1):
    """Reconstruct H from a gridded f via H2 = -f1/f3, H3 = -f2/f3.

    Returns (H grid on the interior band, report) where the report carries
    the closedness defect max |d3 H2 - d2 H3| and the eq4 residual of the
    reconstructed H."""
    f1 = fd_slab(f_grid, (1, 0, 0))
    f2 = fd_slab(f_grid, (0, 1, 0))
    f3 = fd_slab(f_grid, (0, 0, 1))
    if np.nanmin(np.abs(f3)) < floor:
        raise SmallDenominator(
            f"|f3| dips below {floor} on the box; reconstruction is unstable"
        )
    H2 = -f1 / f3
    H3 = -f2 / f3
    inner_axes = tuple(
        Axis(a.origin + a.spacing, a.spacing, a.count - 2) for a in f_grid.axes
    )
    ax1, ax2, ax3 = inner_axes
    j0 = _index_of_zero(ax2)
    k0 = _index_of_zero(ax3)
    h2, h3 = ax2.spacing, ax3.spacing

    # path integral: along p2 at p3 = 0, then along p3
    H = np.zeros(H2.shape)
    lineH2 = H2[:, :, k0]
    acc = np.zeros(lineH2.shape[0])
    for j in range(j0 + 1, ax2.count):
        acc = H[:, j - 1, k0] + 0.5 * h2 * (lineH2[:, j - 1] + lineH2[:, j])
        H[:, j, k0] = acc
    for j in range(j0 - 1, -1, -1):
        H[:, j, k0] = H[:, j + 1, k0] - 0.5 * h2 * (lineH2[:, j + 1] + lineH2[:, j])
    for k in range(k0 + 1, ax3.count):
        H[:, :, k] = H[:, :, k - 1] + 0.5 * h3 * (H3[:, :, k - 1] + H3[:, :, k])
    for k in range(k0 - 1, -1, -1):
        H[:, :, k] = H[:, :, k + 1] - 0.5 * h3 * (H3[:, :, k + 1] + H3[:, :, k])

    H_grid = Grid.make(inner_axes, "H", H)
    g2 = Grid.make(inner_axes, "H2", H2)
    g3 = Grid.make(inner_axes, "H3", H3)
    d3H2 = fd_slab(g2, (0, 0, 1))
    d2H3 = fd_slab(g3, (0, 1, 0))
    closedness = float(np.max(np.abs(d3H2 - d2H3)))
    report = residual_grid(pde_catalog("eq4"), {"H": H_grid})
    report["closedness"] = closedness
    return H_grid, report


def backlund_h_to_f_4d(h_solution, initial_text, axes=None, h=1.0 / 8,
                       check=True):
    """4D analog: transport along V_i = d_i + H_{i+1} d_3, i = 0, 1, 2 from
    the q3-axis; residual checked against the symmetric 4D system."""
    axes = axes or tuple(Axis(-1.0, h, int(round(2 / h)) + 1) for _ in range(4))
    zero_idx = [_index_of_zero(a) for a in axes[:3]]
    fields = [
        _ClosedFormField(h_solution, Q4, Q4.coords[i].name) for i in (1, 2, 3)
    ]  # H1, H2, H3
    init_ast = minilang.parse(initial_text)
    pts = [a.points() for a in axes]
    hsteps = [a.spacing / 4 for a in axes[:3]]
    box = (axes[3].origin, axes[3].origin + axes[3].spacing * (axes[3].count - 1))

    n0, n1, n2, n3 = (a.count for a in axes)
    values = np.empty((n0, n1, n2, n3))
    # backward legs in the order q2, q1, q0; iterate over (q0, q2) levels and
    # transport arrays over (q1, q3)
    Q1g, Q3g = np.meshgrid(pts[1], pts[3], indexing="ij")
    for a0 in range(n0):
        x0 = pts[0][a0]
        for a2 in range(n2):
            x2 = pts[2][a2]
            q = Q3g.copy()
            esc = np.zeros(q.shape, dtype=bool)
            # leg along q2 to 0 (dq3/dq2 = H3)
            steps = 4 * abs(a2 - zero_idx[2])
            if steps:
                sgn = -1.0 if x2 > 0 else 1.0

                def fld2(coords, s, qq):
                    return fields[2]((np.full(qq.shape, x0), Q1g,
                                      np.full(qq.shape, s), qq))

                q, esc = _rk4_leg({}, x2, q, fld2, steps, sgn * hsteps[2], box, esc)
            # leg along q1 to 0 (dq3/dq1 = H2), q2 = 0
            out = np.empty(q.shape)
            for a1 in range(n1):
                x1 = pts[1][a1]
                qi = q[a1].copy()
                esci = esc[a1].copy()
                steps = 4 * abs(a1 - zero_idx[1])
                if steps:
                    sgn = -1.0 if x1 > 0 else 1.0

                    def fld1(coords, s, qq):
                        return fields[1]((np.full(qq.shape, x0),
                                          np.full(qq.shape, s),
                                          np.zeros(qq.shape), qq))

                    qi, esci = _rk4_leg({}, x1, qi, fld1, steps,
                                        sgn * hsteps[1], box, esci)
                # leg along q0 to 0 (dq3/dq0 = H1), q1 = q2 = 0
                steps = 4 * abs(a0 - zero_idx[0])
                if steps:
                    sgn = -1.0 if x0 > 0 else 1.0

                    def fld0(coords, s, qq):
                        return fields[0]((np.full(qq.shape, s),
                                          np.zeros(qq.shape),
                                          np.zeros(qq.shape), qq))

                    qi, esci = _rk4_leg({}, x0, qi, fld0, steps,
                                        sgn * hsteps[0], box, esci)
                vals = minilang.eval_numeric(init_ast, {"q3": qi, "p3": qi, "r3": qi})
                out[a1] = np.where(esci, np.nan, vals)
            values[a0, :, a2, :] = out

    f_grid = Grid(axes, "f", values)
    report = {}
    if check:
        report = residual_grid(pde_catalog("sys2"), {"f": f_grid})
    return f_grid, report


def backlund_f_to_h_4d(f_grid, floor=0.1):
    """4D analog of the reconstruction: H_i = -f_{i-1}/f_3, gauge
    H(., 0, 0, 0) = 0, path order q1, q2, q3; residual against the hyper-CR
    4D system."""
    f0 = fd_slab(f_grid, (1, 0, 0, 0))
    f1 = fd_slab(f_grid, (0, 1, 0, 0))
    f2 = fd_slab(f_grid, (0, 0, 1, 0))
    f3 = fd_slab(f_grid, (0, 0, 0, 1))
    if np.nanmin(np.abs(f3)) < floor:
        raise SmallDenominator(f"|f3| dips below {floor}")
    H1, H2, H3 = -f0 / f3, -f1 / f3, -f2 / f3
    inner_axes = tuple(
        Axis(a.origin + a.spacing, a.spacing, a.count - 2) for a in f_grid.axes
    )
    zero = [_index_of_zero(a) for a in inner_axes]
    hs = [a.spacing for a in inner_axes]
    H = np.zeros(H1.shape)
    j1, j2, j3 = zero[1], zero[2], zero[3]
    # along q1 at q2 = q3 = 0
    for j in range(j1 + 1, inner_axes[1].count):
        H[:, j, j2, j3] = H[:, j - 1, j2, j3] + 0.5 * hs[1] * (
            H1[:, j - 1, j2, j3] + H1[:, j, j2, j3])
    for j in range(j1 - 1, -1, -1):
        H[:, j, j2, j3] = H[:, j + 1, j2, j3] - 0.5 * hs[1] * (
            H1[:, j + 1, j2, j3] + H1[:, j, j2, j3])
    # along q2 at q3 = 0
    for k in range(j2 + 1, inner_axes[2].count):
        H[:, :, k, j3] = H[:, :, k - 1, j3] + 0.5 * hs[2] * (
            H2[:, :, k - 1, j3] + H2[:, :, k, j3])
    for k in range(j2 - 1, -1, -1):
        H[:, :, k, j3] = H[:, :, k + 1, j3] - 0.5 * hs[2] * (
            H2[:, :, k + 1, j3] + H2[:, :, k, j3])
    # along q3
    for m in range(j3 + 1, inner_axes[3].count):
        H[:, :, :, m] = H[:, :, :, m - 1] + 0.5 * hs[3] * (
            H3[:, :, :, m - 1] + H3[:, :, :, m])
    for m in range(j3 - 1, -1, -1):
        H[:, :, :, m] = H[:, :, :, m + 1] - 0.5 * hs[3] * (
            H3[:, :, :, m + 1] + H3[:, :, :, m])
    H_grid = Grid.make(inner_axes, "H", H)
    report = residual_grid(pde_catalog("sys3"), {"H": H_grid})
    return H_grid, report
