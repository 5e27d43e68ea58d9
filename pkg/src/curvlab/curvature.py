"""Curvature of a torsion-free connection at a point.

Conventions: ``2 nabla_[i nabla_j] v^k = R_ij^k_l v^l`` and ``R_jl = R_kj^k_l``;
(anti)symmetrisation carries weight 1/2. Tensors are stored with indices in
the order they are written, e.g. ``riemann[i, j, k, l] = R_ij^k_l``.

Jet orders are fixed by the pipeline: the connection arrives with order-2
jets, so Riemann, Ricci, the Schouten and Weyl tensors carry order-1 jets and
their covariant derivatives (Cotton-York, Weyl divergences, dR) are plain
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import einsum, max_abs, skew, sym, trace
from .errors import InputError
from .geometry import Connection, ConnectionChange, MetricField, WeylStructure, apply_change, weyl_connection
from .jets import Jet3

PIPELINE_ORDER = 2


@dataclass(frozen=True)
class TensorValue:
    """Dense tensor at a point; ``variance`` has one ``'u'``/``'d'`` per slot."""

    components: Jet3
    variance: str

    def __post_init__(self):
        if len(self.variance) != len(self.components.shape) or set(self.variance) - {"u", "d"}:
            raise InputError(f"variance {self.variance!r} does not match shape {self.components.shape}")

    @property
    def rank(self):
        return len(self.variance)

    @property
    def order(self):
        return self.components.order

    @property
    def values(self):
        return np.asarray(self.components.value)


def riemann(conn: Connection) -> TensorValue:
    """``R_ij^k_l = d_i G^k_jl - d_j G^k_il + G^k_im G^m_jl - G^k_jm G^m_il``."""
    if conn.order < 1:
        raise InputError("Riemann needs connection jets of order >= 1")
    gamma = conn.gamma
    d = gamma.grad()  # d[i, k, j, l] = d_i Gamma^k_jl
    a = einsum("ikjl->ijkl", d) + einsum("kim,mjl->ijkl", gamma, gamma)
    return TensorValue(a - a.transpose(1, 0, 2, 3), "ddud")


def ricci(r: TensorValue) -> TensorValue:
    """``R_jl = R_kj^k_l`` (contraction of the first and third slots)."""
    if r.variance != "ddud":
        raise InputError(f"ricci expects variance 'ddud', got {r.variance!r}")
    return TensorValue(einsum("kjkl->jl", r.components), "dd")


def _raw(t):
    return t.components if isinstance(t, TensorValue) else t


def ricci_decompose(ric, g, g_inv):
    """Split a Ricci tensor into (Phi, varphi, scalar): trace-free symmetric, skew, and ``g^jl R_jl``."""
    ric = _raw(ric)
    n = ric.shape[0]
    scalar = trace(ric, g_inv)
    phi = sym(ric) - (scalar / n) * g
    return phi, skew(ric), scalar


def schouten_projective(ric, g=None, g_inv=None, route="direct"):
    """``rho = R_(ij)/(n-1) + R_[ij]/(n+1)``; ``route='irreducible'`` builds it from (Phi, varphi, R)."""
    ric = _raw(ric)
    n = ric.shape[0]
    if n < 2:
        raise InputError("projective Schouten tensor needs n >= 2")
    if route == "direct":
        return sym(ric) * (1.0 / (n - 1)) + skew(ric) * (1.0 / (n + 1))
    phi, varphi, scalar = ricci_decompose(ric, g, g_inv)
    return phi * (1.0 / (n - 1)) + varphi * (1.0 / (n + 1)) + (scalar * g) * (1.0 / (n * (n - 1)))


def schouten_conformal(ric, g, g_inv, route="direct"):
    """``P = R_(ij)/(n-2) + R_[ij]/n - R g_ij / (2(n-2)(n-1))``."""
    ric = _raw(ric)
    n = ric.shape[0]
    if n < 3:
        raise InputError(f"conformal Schouten tensor needs n >= 3, got n = {n}")
    if route == "direct":
        scalar = trace(ric, g_inv)
        return (sym(ric) * (1.0 / (n - 2)) + skew(ric) * (1.0 / n)
                - (scalar * g) * (1.0 / (2 * (n - 2) * (n - 1))))
    phi, varphi, scalar = ricci_decompose(ric, g, g_inv)
    return phi * (1.0 / (n - 2)) + varphi * (1.0 / n) + (scalar * g) * (1.0 / (2 * n * (n - 1)))


def weyl_projective(r, rho):
    """``W = R - 2 Sigma_{l[i}^{km} rho_{j]m}``."""
    return _raw(r) - algebra.glue_projective(rho)


def weyl_conformal(r, p, g, g_inv):
    """``C = R - 2 S_{l[i}^{km} P_{j]m}``."""
    return _raw(r) - algebra.glue_conformal(p, g, g_inv)


def covariant_derivative(t: TensorValue, conn: Connection) -> TensorValue:
    """``nabla_m T``; the derivative index is prepended (slot 0 of the result)."""
    comps = t.components
    if comps.order < 1:
        raise InputError("jet order exhausted: covariant derivative needs order >= 1")
    order = comps.order - 1
    gamma = conn.gamma.truncate(order)
    low = comps.truncate(order)
    letters = "abcdefgh"[: t.rank]
    result = comps.grad()
    for s, v in enumerate(t.variance):
        moved = letters[:s] + "x" + letters[s + 1:]
        if v == "u":
            result = result + einsum(f"{letters[s]}mx,{moved}->m{letters}", gamma, low)
        else:
            result = result - einsum(f"xm{letters[s]},{moved}->m{letters}", gamma, low)
    return TensorValue(result, "d" + t.variance)


def cotton_york(schouten: TensorValue, conn: Connection) -> TensorValue:
    """``2 nabla_[i S_j]l`` for a Schouten tensor ``S`` (rho gives y, P gives Y)."""
    d = covariant_derivative(schouten, conn).components  # d[i, j, l] = nabla_i S_jl
    return TensorValue(d - d.transpose(1, 0, 2), "ddd")


def weyl_divergence(w: TensorValue, conn: Connection) -> TensorValue:
    """``nabla_k W_ij^k_l`` for W or C."""
    d = covariant_derivative(w, conn).components  # d[m, i, j, k, l]
    return TensorValue(einsum("mijml->ijl", d), "ddd")


@dataclass(frozen=True)
class CurvaturePack:
    """Every curvature object of a connection at one point.

    ``p``, ``yy`` and ``div_c`` are ``None`` in dimension 2, where the
    conformal Schouten tensor is undefined; ``c`` is then the zero tensor.
    """

    connection: Connection
    riemann: TensorValue
    ricci: TensorValue
    scalar: Jet3
    phi: TensorValue
    varphi: TensorValue
    rho: TensorValue
    p: TensorValue | None
    w: TensorValue
    c: TensorValue
    y: TensorValue
    yy: TensorValue | None
    div_w: TensorValue
    div_c: TensorValue | None
    grad_scalar: np.ndarray

    @property
    def n(self):
        return self.connection.n

    @property
    def point(self):
        return self.connection.point

    @property
    def kind(self):
        return self.connection.kind

    def scale(self, *tensors):
        """``max(1, max|Riemann|, max|T| for T in tensors)`` for relative tolerances."""
        mags = [max_abs(self.riemann.values)] + [max_abs(_raw(t) if not isinstance(t, np.ndarray) else t)
                                                  for t in tensors if t is not None]
        return max([1.0] + mags)


def curvature_pack(conn: Connection) -> CurvaturePack:
    if conn.order != PIPELINE_ORDER:
        raise InputError(f"curvature_pack needs connection jets of order {PIPELINE_ORDER}, got {conn.order}")
    n = conn.n
    r = riemann(conn)
    ric = ricci(r)
    mp = conn.metric.truncate(r.order)
    g, g_inv = mp.g, mp.g_inv
    phi, varphi, scalar = ricci_decompose(ric, g, g_inv)
    rho = TensorValue(schouten_projective(ric), "dd")
    w = TensorValue(weyl_projective(r, rho.components), "ddud")
    y = cotton_york(rho, conn)
    if n >= 3:
        p = TensorValue(schouten_conformal(ric, g, g_inv), "dd")
        c = TensorValue(weyl_conformal(r, p.components, g, g_inv), "ddud")
        yy = cotton_york(p, conn)
        div_c = weyl_divergence(c, conn)
    else:
        p = yy = div_c = None
        c = TensorValue(Jet3.zeros(r.components.shape, r.components.dim, r.order), "ddud")
    return CurvaturePack(
        connection=conn,
        riemann=r,
        ricci=ric,
        scalar=scalar,
        phi=TensorValue(phi, "dd"),
        varphi=TensorValue(varphi, "dd"),
        rho=rho,
        p=p,
        w=w,
        c=c,
        y=y,
        yy=yy,
        div_w=weyl_divergence(w, conn),
        div_c=div_c,
        grad_scalar=np.asarray(scalar.grad().value),
    )


def connection_for(source, point, changes=()):
    """Connection (order-2 jets) of a metric or Weyl structure, with optional changes applied."""
    if isinstance(source, MetricField):
        source = WeylStructure(source)
    conn = weyl_connection(source, point, PIPELINE_ORDER)
    for change in changes:
        if not isinstance(change, ConnectionChange):
            raise InputError(f"expected ConnectionChange, got {type(change).__name__}")
        conn = apply_change(conn, change)
    return conn


def compute_pack(source, point, changes=()) -> CurvaturePack:
    """Full curvature pack of ``source`` (MetricField or WeylStructure) at ``point``."""
    return curvature_pack(connection_for(source, point, changes))


def kretschmann(pack: CurvaturePack) -> float:
    """``R_abcd R^abcd`` from the stored ``R_ij^k_l`` (values only)."""
    g = pack.connection.metric.g.value
    g_inv = pack.connection.metric.g_inv.value
    r = pack.riemann.values
    return float(np.einsum("ijkl,abcd,ia,jb,kc,ld->", r, r, g_inv, g_inv, g, g_inv, optimize=True))
