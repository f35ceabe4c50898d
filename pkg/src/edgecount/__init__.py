"""Counting boundary-localized eigenvalues of magnetic Neumann operators.

Semiclassical eigenvalue counts for the 2D magnetic Schrodinger operator
with Neumann boundary conditions: exact model counts on half-cylinders and
strips, closed-form Weyl-type leading terms, and direct 2D verification on
radial domains, all built on exact Sturm/inertia counting kernels.
"""

from .band_eig import (BandedHermitian, Inertia, SymTridiag, banded_inertia,
                       bisect_eigenvalue, bisect_eigenvalues_batch,
                       count_below, dense_eigs_oracle, realify, sturm_count,
                       sturm_counts_batch)
from .de_gennes import (DeGennesConstants, HalfLineDisc, InverseBranch,
                        build_branch_tables, default_branches,
                        default_constants, find_constants, mu, mu_batch,
                        mu_fast, nu)
from .direct2d import (CountReport, RadialProblem, convergence_study,
                       count_edge_states, sector_operator, theorem2_study)
from .geometry import (EXTERIOR, INTERIOR, BoundaryCurve, BoundaryField,
                       circle, ellipse)
from .model_ops import (CurvedModelSpec, HalfCylinderSpec, StripSpec,
                        assemble_strip, count_curved_cylinder,
                        count_half_cylinder_exact, count_half_cylinder_oracle,
                        count_strip, curved_model_eig,
                        half_cylinder_estimate_gap)
from .weyl_law import (EdgePrediction, bulk_weyl_term, curvature_term,
                       edge_weyl_term)

__version__ = "0.1.0"

__all__ = [
    "BandedHermitian", "Inertia", "SymTridiag", "banded_inertia",
    "bisect_eigenvalue", "bisect_eigenvalues_batch", "count_below",
    "dense_eigs_oracle", "realify", "sturm_count", "sturm_counts_batch",
    "DeGennesConstants", "HalfLineDisc", "InverseBranch",
    "build_branch_tables", "default_branches", "default_constants",
    "find_constants", "mu", "mu_batch", "mu_fast", "nu",
    "CountReport", "RadialProblem", "convergence_study", "count_edge_states",
    "sector_operator", "theorem2_study",
    "EXTERIOR", "INTERIOR", "BoundaryCurve", "BoundaryField", "circle",
    "ellipse",
    "CurvedModelSpec", "HalfCylinderSpec", "StripSpec", "assemble_strip",
    "count_curved_cylinder", "count_half_cylinder_exact",
    "count_half_cylinder_oracle", "count_strip", "curved_model_eig",
    "half_cylinder_estimate_gap",
    "EdgePrediction", "bulk_weyl_term", "curvature_term", "edge_weyl_term",
]
