"""Charts, metrics, general Weyl structures and torsion-free connections.

Index conventions (all arrays are dense, component index order as written):

* ``g[i, j] = g_ij``, ``g_inv[i, j] = g^ij``
* ``gamma[k, i, j] = Gamma^k_ij`` (symmetric in ``i, j``)
* projectors ``sigma[k, l, i, j] = Sigma^{kl}_{ij}`` and ``S[k, l, i, j] = S^{kl}_{ij}``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import exprdsl
from .errors import InputError, SingularMetricError
from .jets import Jet3, jeinsum

DET_FLOOR = 1e-12
CONNECTION_KINDS = ("projective", "conformal")


@dataclass(frozen=True)
class Chart:
    coord_names: tuple
    validity_hint: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "coord_names", tuple(self.coord_names))
        if len(self.coord_names) < 2:
            raise InputError(f"a chart needs at least 2 coordinates, got {len(self.coord_names)}")
        if len(set(self.coord_names)) != len(self.coord_names):
            raise InputError(f"coordinate names must be distinct: {self.coord_names}")
        for name in self.coord_names:
            if name in exprdsl.FUNCTIONS or not isinstance(exprdsl.parse(name), exprdsl.Sym):
                raise InputError(f"invalid coordinate name {name!r}")

    @property
    def n(self):
        return len(self.coord_names)


def _parse_all(items):
    return tuple(item if not isinstance(item, str) else exprdsl.parse(item) for item in items)


@dataclass(frozen=True)
class MetricField:
    """``g_ij(x)`` as expression trees; only ``i <= j`` is stored, symmetry is by construction."""

    chart: Chart
    upper: tuple  # row-major upper triangle, length n(n+1)/2
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        n = self.chart.n
        upper = _parse_all(self.upper)
        if len(upper) != n * (n + 1) // 2:
            raise InputError(f"metric needs {n * (n + 1) // 2} upper-triangle entries, got {len(upper)}")
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "params", {k: float(v) for k, v in dict(self.params).items()})
        clash = set(self.params) & set(self.chart.coord_names)
        if clash:
            raise InputError(f"parameters shadow coordinates: {sorted(clash)}")

    @classmethod
    def from_grid(cls, coord_names, grid, params=None, validity_hint=None):
        """Build from an ``n x n`` grid; only the upper triangle is read."""
        chart = Chart(tuple(coord_names), validity_hint)
        n = chart.n
        if len(grid) != n or any(len(row) != n for row in grid):
            raise InputError(f"metric grid must be {n}x{n}")
        upper = [grid[i][j] for i in range(n) for j in range(i, n)]
        return cls(chart, tuple(upper), params or {})

    @classmethod
    def diagonal(cls, coord_names, entries, params=None, validity_hint=None):
        n = len(coord_names)
        grid = [[entries[i] if i == j else "0" for j in range(n)] for i in range(n)]
        return cls.from_grid(coord_names, grid, params, validity_hint)

    @property
    def n(self):
        return self.chart.n

    def component(self, i, j):
        if i > j:
            i, j = j, i
        n = self.n
        return self.upper[i * n - i * (i - 1) // 2 + (j - i)]

    def grid(self):
        return [[self.component(i, j) for j in range(self.n)] for i in range(self.n)]

    def with_params(self, **params):
        return MetricField(self.chart, self.upper, {**self.params, **params})

    def rescaled(self, omega):
        """The conformally related metric ``exp(2*omega) * g``."""
        omega = exprdsl.parse(omega) if isinstance(omega, str) else omega
        factor = exprdsl.Call("exp", exprdsl.BinOp("*", exprdsl.Num(2.0), omega))
        upper = tuple(exprdsl.BinOp("*", factor, c) for c in self.upper)
        return MetricField(self.chart, upper, self.params)

    def env(self, point, order):
        return exprdsl.EvalEnv.at_point(self.chart.coord_names, point, order, self.params)


@dataclass(frozen=True)
class WeylStructure:
    """A conformal class representative ``g`` plus the 1-form ``f`` with ``nabla g = -2 f g``."""

    metric: MetricField
    f: tuple = None

    def __post_init__(self):
        f = ("0",) * self.metric.n if self.f is None else self.f
        f = _parse_all(f)
        if len(f) != self.metric.n:
            raise InputError(f"1-form needs {self.metric.n} components, got {len(f)}")
        object.__setattr__(self, "f", f)

    @property
    def n(self):
        return self.metric.n

    @property
    def is_metric_only(self):
        return all(isinstance(c, exprdsl.Num) and c.value == 0 for c in self.f)


@dataclass(frozen=True)
class ConnectionChange:
    kind: str
    b: tuple

    def __post_init__(self):
        if self.kind not in CONNECTION_KINDS:
            raise InputError(f"connection change kind must be one of {CONNECTION_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "b", _parse_all(self.b))


@dataclass(frozen=True)
class MetricAtPoint:
    point: np.ndarray
    g: Jet3
    g_inv: Jet3
    det: Jet3

    def truncate(self, order):
        return MetricAtPoint(self.point, self.g.truncate(order), self.g_inv.truncate(order), self.det.truncate(order))


@dataclass(frozen=True)
class Connection:
    """Connection coefficients at one point, as jets (a ConnectionField sampled at ``point``)."""

    gamma: Jet3
    metric: MetricAtPoint
    coord_names: tuple
    params: Mapping[str, float]
    kind: str = "levi-civita"

    @property
    def point(self):
        return self.metric.point

    @property
    def order(self):
        return self.gamma.order

    @property
    def n(self):
        return self.gamma.shape[0]

    def env(self, order=None):
        order = self.order if order is None else order
        return exprdsl.EvalEnv.at_point(self.coord_names, self.point, order, self.params)


# -- algebraic projectors --------------------------------------------------


def kronecker(n):
    return np.eye(n)


def sigma_projector(n):
    """``Sigma^{kl}_{ij} = delta^k_i delta^l_j + delta^l_i delta^k_j`` as ``[k, l, i, j]``."""
    d = np.eye(n)
    return np.einsum("ki,lj->klij", d, d) + np.einsum("li,kj->klij", d, d)


def s_projector(g, g_inv):
    """``S^{kl}_{ij} = Sigma^{kl}_{ij} - g_ij g^kl``; jets in, jets out (or plain arrays)."""
    n = g.shape[0]
    if isinstance(g, Jet3):
        return Jet3.constant(sigma_projector(n), g.dim, g.order) - jeinsum("ij,kl->klij", g, g_inv)
    return sigma_projector(n) - np.einsum("ij,kl->klij", g, g_inv)


# -- evaluation ------------------------------------------------------------


def eval_components(exprs, env):
    return Jet3.stack([exprdsl.eval_jet(e, env) for e in exprs])


def jet_inverse(g):
    """Inverse and determinant of a jet-valued square matrix.

    Gauss-Jordan elimination with partial pivoting on the values; every row
    operation is a jet operation, so the inverse is exact at all orders.
    """
    n = g.shape[0]
    aug = np.concatenate([g.coeffs, np.zeros_like(g.coeffs)], axis=1)
    aug[np.arange(n), n + np.arange(n), 0] = 1.0
    dim, order = g.dim, g.order
    det = Jet3.constant(1.0, dim, order)
    for c in range(n):
        p = c + int(np.argmax(np.abs(aug[c:, c, 0])))
        if aug[p, c, 0] == 0.0:
            raise SingularMetricError("metric is singular at the point")
        if p != c:
            aug[[c, p]] = aug[[p, c]]
            det = -det
        pivot = Jet3(aug[c, c], dim, order)
        det = det * pivot
        row = Jet3(aug[c], dim, order) * pivot.reciprocal()
        aug[c] = row.coeffs
        factors = aug[:, c].copy()
        factors[c] = 0.0
        aug -= jeinsum("r,j->rj", Jet3(factors, dim, order), row).coeffs
    return Jet3(aug[:, n:], dim, order), det


def metric_at(metric: MetricField, point, order: int) -> MetricAtPoint:
    """Metric, inverse metric and determinant as jets of ``order`` at ``point``."""
    point = np.asarray(point, dtype=float)
    env = metric.env(point, order)
    n = metric.n
    upper = [exprdsl.eval_jet(e, env) for e in metric.upper]
    coeffs = np.zeros((n, n, upper[0].coeffs.shape[-1]))
    k = 0
    for i in range(n):
        for j in range(i, n):
            coeffs[i, j] = coeffs[j, i] = upper[k].coeffs
            k += 1
    g = Jet3(coeffs, env.dim, order)
    scale = max(1.0, float(np.max(np.abs(g.value))))
    g_inv, det = jet_inverse(g)
    if not abs(det.value) > DET_FLOOR * scale**n:
        raise SingularMetricError(f"|det g| = {abs(det.value):.3g} below floor at point {point.tolist()}")
    return MetricAtPoint(point, g, g_inv, det)


def _reindex(jet, spec):
    return Jet3(np.einsum(spec.replace("->", "...->") + "...", jet.coeffs), jet.dim, jet.order)


def levi_civita(metric: MetricField, point, order: int = 2) -> Connection:
    """Christoffel symbols ``Gamma^k_ij`` as jets of ``order`` (metric evaluated at ``order + 1``)."""
    mp = metric_at(metric, point, order + 1)
    dg = mp.g.grad()  # dg[m, i, j] = d_m g_ij
    bracket = dg + _reindex(dg, "jim->ijm") - _reindex(dg, "mij->ijm")
    gamma = 0.5 * jeinsum("km,ijm->kij", mp.g_inv, bracket)
    return Connection(gamma, mp, metric.chart.coord_names, metric.params, "levi-civita")


def _s_change(metric, b):
    g = metric.g.truncate(b.order)
    g_inv = metric.g_inv.truncate(b.order)
    return jeinsum("klij,l->kij", s_projector(g, g_inv), b)


def weyl_connection(ws: WeylStructure, point, order: int = 2) -> Connection:
    """``Gamma = LC(g) + S^{kl}_{ij} f_l``, the torsion-free solution of ``nabla g = -2 f g``."""
    lc = levi_civita(ws.metric, point, order)
    if ws.is_metric_only:
        return lc
    f = eval_components(ws.f, lc.env(order))
    gamma = lc.gamma + _s_change(lc.metric, f)
    return Connection(gamma, lc.metric, lc.coord_names, lc.params, "weyl")


def apply_change(conn: Connection, change: ConnectionChange) -> Connection:
    """Projective ``Gamma + Sigma.b`` or conformal ``Gamma + S.b`` change of connection."""
    if len(change.b) != conn.n:
        raise InputError(f"1-form needs {conn.n} components, got {len(change.b)}")
    b = eval_components(change.b, conn.env())
    if change.kind == "projective":
        delta = jeinsum("klij,l->kij", sigma_projector(conn.n), b)
    else:
        delta = _s_change(conn.metric, b)
    return Connection(conn.gamma + delta, conn.metric, conn.coord_names, conn.params,
                      f"{conn.kind}+{change.kind}")


def metric_gradient_residual(conn: Connection, f_values):
    """``d_i g_kl - Gamma^m_ik g_ml - Gamma^m_il g_km + 2 f_i g_kl`` at the point, as ``[i, k, l]``."""
    g = conn.metric.g
    dg = g.grad().value
    gv = g.value
    gamma = conn.gamma.value
    term = np.einsum("mik,ml->ikl", gamma, gv)
    return dg - term - term.transpose(0, 2, 1) + 2 * np.einsum("i,kl->ikl", f_values, gv)


def check_compatibility(conn: Connection, ws: WeylStructure, point=None) -> float:
    """Max-abs residual of ``nabla_i g_kl + 2 f_i g_kl`` at the connection's point."""
    if point is not None and not np.allclose(point, conn.point, rtol=0, atol=0):
        raise InputError("connection was evaluated at a different point")
    env = exprdsl.EvalEnv.at_point(ws.metric.chart.coord_names, conn.point, 0, ws.metric.params)
    f = eval_components(ws.f, env).value
    return float(np.max(np.abs(metric_gradient_residual(conn, f))))
