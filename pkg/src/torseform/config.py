"""Central tolerance configuration.

Every numeric cutoff used by the toolkit lives here so that a scene file can
override any of them by name.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # metric / linear algebra
    spd_tol: float = 1e-12        # Cholesky pivot floor; below this the metric is singular
    degeneracy_tol: float = 1e-10  # relative floor for plane-section denominators
    frame_tol: float = 1e-10      # orthonormality slack for tangent/normal frames
    rank_tol: float = 1e-10       # relative smallest-singular-value floor for immersions
    svd_rank_tol: float = 1e-8    # relative singular-value cutoff for the first normal space
    min_field_norm: float = 1e-12  # points with |V| below this are outside the scene domain

    # field classification
    class_tol: float = 1e-7       # residual cutoff for class membership
    parallel_tol: float = 1e-9    # |grad V| cutoff for the parallel verdict
    class_min_points: int = 50    # minimum sample size for a scene-level verdict

    # rectifying verification
    proper_tol: float = 1e-8      # both |V_tan| and |V_nor| must exceed this for properness
    rect_tol: float = 1e-7        # normalized rectifying residual cutoff

    # warped-product checks
    ode_tol: float = 1e-6         # warping ODE residual cutoff
    warp_tol: float = 1e-6        # tanh-model deviation cutoff

    def override(self, **kwargs) -> "Tolerances":
        """Return a copy with the given named tolerances replaced."""
        return replace(self, **kwargs)


DEFAULT = Tolerances()

#: names accepted in a scene document's "tolerances" block
TOLERANCE_NAMES = tuple(f.name for f in fields(Tolerances))
