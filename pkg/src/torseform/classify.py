"""Classification of ambient vector fields against the torse-forming ansatz

    ∇̃_X V = f X + ω(X) V.

The fit is a least-squares problem over a g̃-orthonormal frame {e_i} in the
unknowns (f, ω(e_1), ..., ω(e_m)); its normal equations

    [[m, v], [vᵀ, |v|² I]] (f, w) = (tr a, a v),   a_ik = <∇̃_{e_i}V, e_k>

are solved by Cholesky.  Specializations are measured on the fitted pair:
|ω| (concircular), |ω(V)| (torqued) and |ω + f ν| with ν the dual of V
(anti-torqued).  Verdict precedence, most specific first:
parallel > concircular > anti-torqued > torqued > torse-forming > none.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (InconsistentSampleError, PreconditionError,
                     SingularFitError, SingularMetricError, ZeroFieldError)
from .linalg import solve_spd
from .metric import (MetricField, VectorField, christoffel,
                     orthonormal_coordinate_frame)

PARALLEL = "parallel"
CONCIRCULAR = "concircular"
ANTI_TORQUED = "anti-torqued"
TORQUED = "torqued"
TORSE_FORMING = "torse-forming"
NONE = "none"

#: most specific class first
PRECEDENCE = (PARALLEL, CONCIRCULAR, ANTI_TORQUED, TORQUED, TORSE_FORMING)

#: bound on max |∇̃_V V| for a unit anti-torqued field
GEODESIC_TOL = 1e-8
#: bound on max | |V| - 1 | for the unit-field precondition
UNIT_NORM_TOL = 1e-8


@dataclass(frozen=True)
class ClassificationReport:
    """Per-point fit of the torse-forming ansatz."""

    point: np.ndarray
    f: float
    omega: np.ndarray          # coordinate covector ω_j = ω(∂_j)
    w_dual: np.ndarray         # vector dual of ω: W^k = g^{kl} ω_l
    residual_torse: float
    residual_concircular: float
    residual_torqued: float
    residual_antitorqued: float
    verdict: str
    v_norm: float
    grad_norm: float           # Frobenius norm of <∇̃_{e_i}V, e_k>
    geodesic_defect: float     # |∇̃_V V|


def _passes(rep: ClassificationReport, cls: str, tols: Tolerances) -> bool:
    if cls == PARALLEL:
        return rep.grad_norm <= tols.parallel_tol
    if rep.residual_torse > tols.class_tol:
        return False
    if cls == CONCIRCULAR:
        return rep.residual_concircular <= tols.class_tol
    if cls == ANTI_TORQUED:
        return rep.residual_antitorqued <= tols.class_tol
    if cls == TORQUED:
        return rep.residual_torqued <= tols.class_tol
    return True  # torse-forming


def _residual_for(rep: ClassificationReport, cls: str) -> float:
    return {PARALLEL: rep.grad_norm,
            CONCIRCULAR: rep.residual_concircular,
            ANTI_TORQUED: rep.residual_antitorqued,
            TORQUED: rep.residual_torqued,
            TORSE_FORMING: rep.residual_torse}[cls]


def fit_torse_forming(metric: MetricField, field: VectorField, point,
                      tols: Tolerances = DEFAULT) -> ClassificationReport:
    """Least-squares fit of (f, ω) at one point, with specialization
    residuals and a per-point verdict."""
    point = np.asarray(point, dtype=float)
    m = metric.dim
    vap = field.at(point, order=1)
    mp = metric.at(point, order=1)
    G = mp.g
    v_norm = mp.norm(vap.components)
    if v_norm <= tols.min_field_norm:
        raise ZeroFieldError(f"|V| = {v_norm:.3e} at {point.tolist()}")

    C = orthonormal_coordinate_frame(mp, tols)          # e_i = Σ_j C[i, j] ∂_j
    gamma = christoffel(mp)
    # dcoord[j, :] = ∇̃_{∂_j} V (ambient components)
    dcoord = vap.jacobian.T + np.einsum("kjb,b->jk", gamma, vap.components)
    a = C @ dcoord @ G @ C.T                            # a[i, k] = <∇̃_{e_i}V, e_k>
    v = C @ (G @ vap.components)                        # frame components of V

    normal = np.zeros((m + 1, m + 1))
    normal[0, 0] = m
    normal[0, 1:] = v
    normal[1:, 0] = v
    normal[1:, 1:] = (v @ v) * np.eye(m)
    rhs = np.concatenate(([np.trace(a)], a @ v))
    try:
        sol = solve_spd(normal, rhs, tols.spd_tol)
    except SingularMetricError as exc:
        raise SingularFitError("torse-forming normal equations are singular",
                               float(np.linalg.cond(normal))) from exc
    f = float(sol[0])
    w = sol[1:]

    resid = a - f * np.eye(m) - np.outer(w, v)
    grad_norm = float(np.linalg.norm(a))
    residual_torse = float(np.linalg.norm(resid)) / max(1.0, grad_norm)
    residual_concircular = float(np.linalg.norm(w))
    residual_torqued = float(abs(w @ v))
    residual_antitorqued = float(np.linalg.norm(w + f * v))

    omega = np.linalg.solve(C, w)                       # ω(∂_j) from ω(e_i) = w_i
    w_dual = mp.inverse @ omega
    geodesic_defect = mp.norm(vap.components @ dcoord)

    verdict = NONE
    probe = ClassificationReport(point, f, omega, w_dual, residual_torse,
                                 residual_concircular, residual_torqued,
                                 residual_antitorqued, NONE, v_norm,
                                 grad_norm, geodesic_defect)
    for cls in PRECEDENCE:
        if _passes(probe, cls, tols):
            verdict = cls
            break
    return ClassificationReport(point, f, omega, w_dual, residual_torse,
                                residual_concircular, residual_torqued,
                                residual_antitorqued, verdict, v_norm,
                                grad_norm, geodesic_defect)


@dataclass(frozen=True)
class SceneClassification:
    """Aggregated verdict over a point sample."""

    verdict: str
    reports: tuple
    witness_index: int          # worst residual for the winning class
    witness_residual: float
    f_values: np.ndarray
    v_norms: np.ndarray

    @property
    def points(self):
        return [rep.point for rep in self.reports]

    def f_summary(self) -> dict:
        return {"min": float(self.f_values.min()),
                "max": float(self.f_values.max()),
                "mean": float(self.f_values.mean())}

    def class_residuals(self) -> dict:
        return {cls: max(_residual_for(rep, cls) for rep in self.reports)
                for cls in PRECEDENCE}


def classify(metric: MetricField, field: VectorField, points,
             tols: Tolerances = DEFAULT) -> SceneClassification:
    """Scene-level verdict: the most specific class whose membership residual
    is within class_tol at every sampled point.

    A sample whose per-point verdicts cannot be covered by a single class
    raises InconsistentSampleError (the field changes class over the domain,
    which is reported rather than guessed).
    """
    points = list(points)
    if len(points) < tols.class_min_points:
        raise PreconditionError(
            f"need at least {tols.class_min_points} sample points, got {len(points)}")
    reports = tuple(fit_torse_forming(metric, field, p, tols) for p in points)

    for cls in PRECEDENCE:
        if all(_passes(rep, cls, tols) for rep in reports):
            residuals = [_residual_for(rep, cls) for rep in reports]
            worst = int(np.argmax(residuals))
            return SceneClassification(
                verdict=cls, reports=reports, witness_index=worst,
                witness_residual=float(residuals[worst]),
                f_values=np.array([rep.f for rep in reports]),
                v_norms=np.array([rep.v_norm for rep in reports]))

    if all(rep.residual_torse > tols.class_tol for rep in reports):
        residuals = [rep.residual_torse for rep in reports]
        worst = int(np.argmax(residuals))
        return SceneClassification(
            verdict=NONE, reports=reports, witness_index=worst,
            witness_residual=float(residuals[worst]),
            f_values=np.array([rep.f for rep in reports]),
            v_norms=np.array([rep.v_norm for rep in reports]))

    histogram: dict = {}
    for rep in reports:
        histogram[rep.verdict] = histogram.get(rep.verdict, 0) + 1
    raise InconsistentSampleError(
        f"field changes class across the domain: {histogram}", histogram)


def geodesic_unit_check(metric: MetricField, field: VectorField, points,
                        classification: SceneClassification,
                        tols: Tolerances = DEFAULT) -> float:
    """max |∇̃_V V| over the points; a unit anti-torqued field is a unit
    geodesic field, so this must be ~0.

    Preconditions: the scene verdict is anti-torqued and ||V| − 1| <= 1e-8
    over the sample.
    """
    if classification.verdict != ANTI_TORQUED:
        raise PreconditionError(
            f"geodesic check requires an anti-torqued verdict, got "
            f"'{classification.verdict}'")
    worst = 0.0
    for p in points:
        vap = field.at(p, order=1)
        mp = metric.at(p, order=1)
        nv = mp.norm(vap.components)
        if abs(nv - 1.0) > UNIT_NORM_TOL:
            raise PreconditionError(
                f"field is not unit at {np.asarray(p).tolist()}: |V| = {nv!r}",
                witness=p)
        gamma = christoffel(mp)
        dcoord = vap.jacobian.T + np.einsum("kjb,b->jk", gamma, vap.components)
        worst = max(worst, mp.norm(vap.components @ dcoord))
    return worst
