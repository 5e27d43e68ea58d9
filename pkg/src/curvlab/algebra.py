"""Pointwise tensor algebra shared by the curvature pipeline and the theorem checks.

Every function accepts either plain ``numpy`` arrays or :class:`~curvlab.jets.Jet3`
tensors (jets carry one more derivative along). Rank-4 outputs use the layout
``[i, j, k, l]`` for ``T_ij^k_l``.

The "glue" of a Schouten-type tensor is the part of the Riemann tensor it
accounts for::

    glue_projective(rho)[i,j,k,l] = 2 Sigma_{l[i}^{km} rho_{j]m}
    glue_conformal(P)[i,j,k,l]    = 2 S_{l[i}^{km} P_{j]m}

so that ``R = W + glue_projective(rho) = C + glue_conformal(P)``.
"""

from __future__ import annotations

import numpy as np

from .geometry import s_projector, sigma_projector
from .jets import Jet3, jeinsum


def einsum(subscripts, *operands):
    return jeinsum(subscripts, *operands)


def sym(t):
    """``T_(ij)`` with weight 1/2."""
    return 0.5 * (t + t.transpose(1, 0))


def skew(t):
    """``T_[ij]`` with weight 1/2."""
    return 0.5 * (t - t.transpose(1, 0))


def trace(t, g_inv):
    """``g^ij T_ij``."""
    return einsum("ij,ij->", g_inv, t)


def max_abs(t):
    if isinstance(t, Jet3):
        t = t.value
    return float(np.max(np.abs(t))) if np.size(t) else 0.0


def _delta_wedge(t):
    """``delta_[i^k T_j]l`` as ``[i, j, k, l]``."""
    n = t.shape[0]
    d = np.eye(n)
    a = einsum("ki,jl->ijkl", d, t)
    return 0.5 * (a - a.transpose(1, 0, 2, 3))


def _g_wedge(t, g, g_inv):
    """``g_l[i T_j]m g^km`` as ``[i, j, k, l]``."""
    a = einsum("li,jm,km->ijkl", g, t, g_inv)
    return 0.5 * (a - a.transpose(1, 0, 2, 3))


def _delta_skew(t):
    """``delta^k_l T_ij`` as ``[i, j, k, l]``."""
    return einsum("kl,ij->ijkl", np.eye(t.shape[0]), t)


def glue_projective(rho):
    """``2 Sigma_{l[i}^{km} rho_{j]m}`` by direct contraction with the projector."""
    a = einsum("kmli,jm->ijkl", sigma_projector(rho.shape[0]), rho)
    return a - a.transpose(1, 0, 2, 3)


def glue_conformal(p, g, g_inv):
    """``2 S_{l[i}^{km} P_{j]m}`` by direct contraction with the projector."""
    a = einsum("kmli,jm->ijkl", s_projector(g, g_inv), p)
    return a - a.transpose(1, 0, 2, 3)


def glue_projective_expanded(phi, varphi, scalar, g):
    """The same glue written through the irreducible Ricci parts (Phi, varphi, R)."""
    n = g.shape[0]
    return (
        (2.0 / (n - 1)) * _delta_wedge(phi)
        + (2.0 / (n * (n - 1))) * (scalar * _delta_wedge(g))
        + (2.0 / (n + 1)) * _delta_wedge(varphi)
        - (2.0 / (n + 1)) * _delta_skew(varphi)
    )


def glue_conformal_expanded(phi, varphi, scalar, g, g_inv):
    n = g.shape[0]
    return (
        (2.0 / (n - 2)) * _delta_wedge(phi)
        - (2.0 / (n - 2)) * _g_wedge(phi, g, g_inv)
        + (2.0 / (n * (n - 1))) * (scalar * _delta_wedge(g))
        + (2.0 / n) * _delta_wedge(varphi)
        - (2.0 / n) * _g_wedge(varphi, g, g_inv)
        - (2.0 / n) * _delta_skew(varphi)
    )
