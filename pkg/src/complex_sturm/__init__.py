"""Numerics for one-dimensional Schrodinger operators ``-f'' + V f`` with
complex-valued potentials on an open interval: initial-value and endpoint
solutions, Green's kernels, endpoint classification, nested Weyl disks,
dissipativity certificates, and eigenvalue location with an independent
finite-difference oracle.
"""

from .boundary import (BoundaryFunctional, BoundarySpec,
                       ClassificationReport, boundary_index, classify,
                       dim_U, dissipativity_certificate, symplectic_form,
                       wronskian_at_endpoint)
from .exceptions import (ArgumentError, ComplexSturmError,
                         ContractionError, ConvergenceError,
                         DegenerateBasisError, EigenvalueSearchError,
                         ExpressionSyntaxError, IndeterminateError,
                         QuadratureBudgetError)
from .greens import (DIFFERENCE_IDENTITIES, KERNEL_KINDS, apply_kernel,
                     build_kernel, difference_identity_residual,
                     jump_diagnostics, kernel_eval)
from .ivp import (QuadSystemTrajectory, SolutionTrajectory, combine,
                  kodaira_check, lagrange_residual, neumann_solve,
                  solve_ivp, solve_quad_system, solve_semiregular,
                  wronskian)
from .potential import (Interval, Potential, PotentialExpr, parse_expr,
                        parse_interval, parse_potential,
                        pathological_potential, potential_from_json,
                        potential_to_json, probe_endpoint)
from .spectra import (Eigenvalue, FDMatrix, Realization,
                      characteristic_wronskian, fd_eigenvalues,
                      fd_maximal_kernel_dim, fd_numerical_range,
                      fd_oracle_build, find_eigenvalues,
                      one_sided_fd_eigenvalues, resolvent_kernel,
                      richardson_eigenvalues, shooting_solutions)
from .boundary import DissipativityCertificate, greens_identity_residual
from .weyl import (TrichotomyReport, WeylDisk, disk_membership_defect,
                   trichotomy, weighted_norm, weyl_disk)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # potential
    "Interval", "Potential", "PotentialExpr", "parse_expr", "parse_interval",
    "parse_potential", "pathological_potential", "potential_to_json",
    "potential_from_json", "probe_endpoint",
    # ivp
    "SolutionTrajectory", "QuadSystemTrajectory", "solve_ivp",
    "solve_semiregular", "neumann_solve", "solve_quad_system",
    "combine", "wronskian", "lagrange_residual", "kodaira_check",
    # greens
    "KERNEL_KINDS", "DIFFERENCE_IDENTITIES", "build_kernel", "kernel_eval",
    "apply_kernel", "jump_diagnostics", "difference_identity_residual",
    # boundary
    "BoundaryFunctional", "BoundarySpec", "ClassificationReport",
    "wronskian_at_endpoint", "symplectic_form", "dim_U", "boundary_index",
    "classify", "DissipativityCertificate", "dissipativity_certificate",
    "greens_identity_residual",
    # weyl
    "WeylDisk", "weyl_disk", "disk_membership_defect", "weighted_norm",
    "TrichotomyReport", "trichotomy",
    # spectra
    "Realization", "Eigenvalue", "characteristic_wronskian",
    "find_eigenvalues", "shooting_solutions", "resolvent_kernel",
    "FDMatrix", "fd_oracle_build", "fd_eigenvalues",
    "richardson_eigenvalues", "fd_numerical_range",
    "fd_maximal_kernel_dim", "one_sided_fd_eigenvalues",
    # errors
    "ComplexSturmError", "ArgumentError", "ExpressionSyntaxError",
    "IndeterminateError", "ConvergenceError", "ContractionError",
    "QuadratureBudgetError", "DegenerateBasisError",
    "EigenvalueSearchError",
]
