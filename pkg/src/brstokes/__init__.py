"""Bernardi-Raugel finite elements for the 2D Stokes problem with optional
pressure-robust RT0/BDM1 reconstruction of the load, on uniform and
Shishkin-graded meshes of the unit square."""

from .assembly import SaddleSystem, assemble_divergence, assemble_rhs, assemble_stiffness, build_system
from .errors import DegenerateElementError, EigenSolverError, MeshError, SingularSystemError
from .fe_space import (FemFunction, PressureSpace, VelocitySpace, apply_dirichlet,
                       eval_velocity_basis, interpolate_br)
from .fields import FieldFunction
from .linsolve import Solution, solve
from .mesh import (Mesh, build_shishkin_mesh, build_uniform_mesh, export_mesh, import_mesh,
                   shishkin_transition)
from .norms import ErrorReport, broken_h1_seminorm, l2_norm, project_p0
from .quadrature import QuadratureRule, quadrature
from .reconstruction import (LocalHdivField, Reconstruction, ReconstructionVariant, bdm1_interpolate,
                             eval_reconstructed, reconstruct_divergence, rt0_interpolate)

__version__ = "0.1.0"
