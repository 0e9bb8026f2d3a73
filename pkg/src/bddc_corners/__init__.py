"""Interface classification, corner selection and BDDC verification for substructuring."""

from .assembly import Elasticity, Laplace, SparseSystem, assemble
from .bddc import build_constraints, build_preconditioner, check_invertibility, pcg, reduce_to_schur, solve_interface
from .corners import CornerSet, SelectionReport, augment_random, select_corners
from .errors import CoarseMechanism, SingularConfigurationError, SingularLocalProblem
from .fixtures import generate_serial_strip, generate_structured, generate_wedged_beam, hinge_corners
from .interface import InterfaceClassification, classify, classify_mesh, extract_interface, promote_to_corners
from .mesh import Mesh, MeshFormatError, StructuredSpec, load_mesh, save_mesh
from .partition import Partition, load_partition, partition_geometric, save_partition
from .pipeline import Problem, prepare, solve_with

__version__ = "0.1.0"
