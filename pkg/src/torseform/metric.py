"""Intrinsic tensor calculus of an ambient Riemannian metric.

All quantities are evaluated pointwise from metric jets:

    Γᵏᵢⱼ   = ½ gᵏˡ (∂ᵢ g_lj + ∂ⱼ g_li − ∂ˡ g_ij)
    Rˡ_kij = ∂ᵢ Γˡⱼₖ − ∂ⱼ Γˡᵢₖ + Γˡᵢₐ Γᵃⱼₖ − Γˡⱼₐ Γᵃᵢₖ
    R(X,Y)Z = Rˡ_kij Zᵏ Xⁱ Yʲ ∂ˡ
    K(u,v) = g(R(u,v)v, u) / (g(u,u) g(v,v) − g(u,v)²)

with the curvature convention R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z,
under which the round unit sphere has K = +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import expr as ex
from .config import DEFAULT, Tolerances
from .errors import (DegeneratePlaneError, OrderInsufficientError,
                     PreconditionError, SingularMetricError)
from .jets import Jet, chart_names, eval_jet_env, jet_variables
from .linalg import cholesky_spd, inverse_spd


@dataclass(frozen=True)
class MetricAtPoint:
    """Metric data at one point.

    dg[a, i, j]     = ∂_a g_ij          (present when order >= 1)
    d2g[a, b, i, j] = ∂_a ∂_b g_ij      (present when order >= 2)
    """

    point: np.ndarray
    g: np.ndarray
    dg: np.ndarray | None = None
    d2g: np.ndarray | None = None
    spd_tol: float = DEFAULT.spd_tol

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @cached_property
    def inverse(self) -> np.ndarray:
        return inverse_spd(self.g, self.spd_tol)

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.g @ np.asarray(v))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))


@dataclass(frozen=True)
class VectorAtPoint:
    """A vector at a point; jacobian[k, j] = ∂_j V^k when available."""

    components: np.ndarray
    jacobian: np.ndarray | None = None


class MetricField:
    """Symmetric matrix of component expressions g_ij(x1..xm)."""

    def __init__(self, entries, *, spd_tol: float = DEFAULT.spd_tol):
        m = len(entries)
        self.dim = m
        self.var_names = chart_names(m)
        self.spd_tol = spd_tol
        exprs = [[None] * m for _ in range(m)]
        for i, row in enumerate(entries):
            if len(row) not in (i + 1, m):
                raise ValueError(
                    f"metric row {i} must have {i + 1} (lower triangle) or {m} entries")
            for j in range(min(len(row), i + 1)):
                e = ex.ensure_expr(row[j], self.var_names)
                exprs[i][j] = e
                exprs[j][i] = e
        self.exprs = tuple(tuple(row) for row in exprs)

    @classmethod
    def euclidean(cls, m: int) -> "MetricField":
        return cls([[("1" if i == j else "0") for j in range(i + 1)] for i in range(m)])

    def entry_jets(self, env) -> list:
        """Lower-triangle entries evaluated over a jet environment; used for
        pullbacks through an immersion."""
        m = self.dim
        out = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(i + 1):
                jet = eval_jet_env(self.exprs[i][j], env)
                out[i][j] = out[j][i] = jet
        return out

    def at(self, point: Sequence[float], order: int = 2) -> MetricAtPoint:
        """Evaluate the metric and its derivatives to the requested order."""
        m = self.dim
        env = jet_variables(self.var_names, point, order)
        g = np.zeros((m, m))
        dg = np.zeros((m, m, m)) if order >= 1 else None
        d2g = np.zeros((m, m, m, m)) if order >= 2 else None
        for i in range(m):
            for j in range(i + 1):
                jet = eval_jet_env(self.exprs[i][j], env)
                g[i, j] = g[j, i] = jet.value
                if order >= 1:
                    grad = jet.gradient()
                    dg[:, i, j] = grad
                    dg[:, j, i] = grad
                if order >= 2:
                    hess = jet.hessian()
                    d2g[:, :, i, j] = hess
                    d2g[:, :, j, i] = hess
        cholesky_spd(g, self.spd_tol)  # positive definiteness is a hard requirement
        return MetricAtPoint(point=np.asarray(point, dtype=float), g=g, dg=dg,
                             d2g=d2g, spd_tol=self.spd_tol)


class VectorField:
    """Ambient vector field with component expressions V^k(x1..xm)."""

    def __init__(self, components, dim: int | None = None):
        self.dim = dim if dim is not None else len(components)
        if len(components) != self.dim:
            raise ValueError("component count does not match dimension")
        self.var_names = chart_names(self.dim)
        self.exprs = tuple(ex.ensure_expr(c, self.var_names) for c in components)

    def at(self, point: Sequence[float], order: int = 1) -> VectorAtPoint:
        env = jet_variables(self.var_names, point, order)
        comps = np.zeros(self.dim)
        jac = np.zeros((self.dim, self.dim)) if order >= 1 else None
        for k, e in enumerate(self.exprs):
            jet = eval_jet_env(e, env)
            comps[k] = jet.value
            if order >= 1:
                jac[k, :] = jet.gradient()
        return VectorAtPoint(components=comps, jacobian=jac)

    def norm_jet(self, point: Sequence[float], metric: MetricField, order: int = 1) -> Jet:
        """Jet of |V|(x) = sqrt(g_ij V^i V^j) at the point."""
        env = jet_variables(self.var_names, point, order)
        vjets = [eval_jet_env(e, env) for e in self.exprs]
        gjets = metric.entry_jets(env)
        acc = None
        for i in range(self.dim):
            for j in range(self.dim):
                term = gjets[i][j] * vjets[i] * vjets[j]
                acc = term if acc is None else acc + term
        return acc.sqrt()

    def unit_at(self, point: Sequence[float], metric: MetricField) -> VectorAtPoint:
        """V/|V| with jacobian, differentiated through the normalization."""
        env = jet_variables(self.var_names, point, 1)
        vjets = [eval_jet_env(e, env) for e in self.exprs]
        gjets = metric.entry_jets(env)
        acc = None
        for i in range(self.dim):
            for j in range(self.dim):
                term = gjets[i][j] * vjets[i] * vjets[j]
                acc = term if acc is None else acc + term
        norm = acc.sqrt()
        comps = np.zeros(self.dim)
        jac = np.zeros((self.dim, self.dim))
        for k in range(self.dim):
            unit_k = vjets[k] / norm
            comps[k] = unit_k.value
            jac[k, :] = unit_k.gradient()
        return VectorAtPoint(components=comps, jacobian=jac)


# ---------------------------------------------------------------------------
# Connection and curvature
# ---------------------------------------------------------------------------

def christoffel(mp: MetricAtPoint) -> np.ndarray:
    """Γ[k, i, j] = Γᵏᵢⱼ from the Koszul expansion; symmetric in (i, j)."""
    if mp.dg is None:
        raise OrderInsufficientError("christoffel needs metric jets of order >= 1")
    dg = mp.dg
    # T[l, i, j] = ∂_i g_lj + ∂_j g_li − ∂_l g_ij
    T = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    return 0.5 * np.einsum("kl,lij->kij", mp.inverse, T)


def christoffel_derivatives(mp: MetricAtPoint):
    """(Γ, dΓ) with dΓ[a, k, i, j] = ∂_a Γᵏᵢⱼ; needs order-2 metric jets."""
    if mp.d2g is None:
        raise OrderInsufficientError("curvature needs metric jets of order >= 2")
    dg, d2g, ginv = mp.dg, mp.d2g, mp.inverse
    T = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, T)
    # ∂_a g^{kl} = −g^{kp} (∂_a g_pq) g^{ql}
    dginv = -np.einsum("kp,apq,ql->akl", ginv, dg, ginv)
    # dT[a, l, i, j] = ∂_a∂_i g_lj + ∂_a∂_j g_li − ∂_a∂_l g_ij
    dT = (np.einsum("ailj->alij", d2g) + np.einsum("ajli->alij", d2g) - d2g)
    dgamma = 0.5 * (np.einsum("akl,lij->akij", dginv, T)
                    + np.einsum("kl,alij->akij", ginv, dT))
    return gamma, dgamma


def riemann_components(mp: MetricAtPoint) -> np.ndarray:
    """R[l, k, i, j] = Rˡ_kij so that R(∂i, ∂j)∂k = Rˡ_kij ∂l."""
    gamma, dgamma = christoffel_derivatives(mp)
    # dgamma[a, l, i, j] = ∂_a Γ^l_{ij}
    term1 = np.einsum("iljk->lkij", dgamma)       # ∂_i Γ^l_{jk}
    term2 = np.einsum("jlik->lkij", dgamma)       # ∂_j Γ^l_{ik}
    term3 = np.einsum("lia,ajk->lkij", gamma, gamma)
    term4 = np.einsum("lja,aik->lkij", gamma, gamma)
    return term1 - term2 + term3 - term4


def riemann(mp: MetricAtPoint, X, Y, Z) -> np.ndarray:
    """R(X, Y)Z at the point."""
    R = riemann_components(mp)
    return np.einsum("lkij,k,i,j->l", R, np.asarray(Z, float),
                     np.asarray(X, float), np.asarray(Y, float))


def sectional_curvature(mp: MetricAtPoint, u, v,
                        tols: Tolerances = DEFAULT) -> float:
    """K of the plane spanned by u, v; invariant under basis changes of the
    plane.  Raises DegeneratePlaneError when u, v are nearly dependent."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    guu = mp.inner(u, u)
    gvv = mp.inner(v, v)
    guv = mp.inner(u, v)
    denom = guu * gvv - guv * guv
    if denom <= tols.degeneracy_tol * guu * gvv:
        raise DegeneratePlaneError(
            f"plane section is degenerate (denominator {denom:.3e})")
    ruvv = riemann(mp, u, v, v)
    return mp.inner(ruvv, u) / denom


def covariant_derivative(mp: MetricAtPoint, field: VectorAtPoint, direction) -> np.ndarray:
    """(∇_X V)^k = X^i ∂_i V^k + Γᵏᵢⱼ X^i V^j at the point."""
    if field.jacobian is None:
        raise PreconditionError("covariant derivative needs the field jacobian")
    X = np.asarray(direction, float)
    gamma = christoffel(mp)
    return field.jacobian @ X + np.einsum("kij,i,j->k", gamma, X, field.components)


def orthonormal_coordinate_frame(mp: MetricAtPoint, tols: Tolerances = DEFAULT):
    """Gram-Schmidt the coordinate basis into a g-orthonormal frame.

    Returns C with e_i = Σ_j C[i, j] ∂_j (rows are ambient components).
    """
    from .linalg import orthonormalize
    m = mp.dim
    basis, _, kept = orthonormalize(list(np.eye(m)), mp.g, keep_tol=tols.frame_tol)
    if len(kept) != m:
        raise SingularMetricError("coordinate frame lost rank under the metric")
    return basis
