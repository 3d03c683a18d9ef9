"""Weyl-Heisenberg and Clifford groups in the k-nomial basis, with SIC tools."""

from .numtheory import Dim, SL2
from .heisenberg import displacement, build_X, build_Z
from .imprimitivity import change_of_basis, to_knomial, block_structure, eigenspace_map
from .cliffordrep import symplectic_unitary, antisymplectic_antiunitary, assemble_knomial
from .sic import sic_defect, search_fiducial, dim8_fiducial

__version__ = "0.1.0"
