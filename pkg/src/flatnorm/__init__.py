"""Multiscale simplicial flat norm of integer chains, computed exactly.

Typical use::

    from flatnorm import build_complex, MsfnProblem, compute_msfn

    K = build_complex([(0, 1, 2), (0, 2, 3)], [(0, 0), (1, 0), (1, 1), (0, 1)])
    t = K.chain(1, {(0, 1): 1, (1, 2): 1})
    result = compute_msfn(MsfnProblem(K, 1, t, lam=1))
"""

from .deform import (
    DeformationBounds,
    PLCurve,
    RetractionTrace,
    compare_bounds,
    deformation_bounds,
    refinement_convergence,
    retract_curve,
    sullivan_bounds,
)
from .errors import FlatNormError
from .geometry import RegularityReport, SimplexGeometry, regularity_report, simplex_geometry, simplex_volume
from .lp import IlpSolution, LinearProgram, LpSolution, Status, is_integral, solve_ilp, solve_lp
from .msfn import MsfnProblem, MsfnResult, SolverPath, compute_msfn, formulate, lambda_sweep, ohcp_mode
from .pyramid import generate_noisy_pyramid
from .simplicial import BoundaryMatrix, Chain, SimplicialComplex, apply_boundary, boundary_matrix, build_complex, chain_mass
from .tu import TuCertificate, Verdict, brute_force_tu, certify, check_moebius_free, check_orientable_manifold

__version__ = "0.1.0"
