"""Quasi root systems and free-boson Virasoro constructions on their lattices."""

from .axioms import ValidationReport, check_axioms, is_simple
from .catalog import CatalogEntry, CatalogFile, read_catalog, write_catalog
from .cocycle import Cocycle, cocycle_for, epsilon, integral_basis, make_cocycle
from .enumeration import Catalog, enumerate_simple, extend, saturate
from .equations import AnsatzAssignment, PolynomialSystem, assemble, check_duality, dual
from .errors import (BadParams, BudgetExceeded, DegenerateGram, GradeOverflow, InadmissibleProduct,
                     NoIntegralBasis, NonIntegerProduct, QuasiRootError, SchemaError, SingularC,
                     UnknownName)
from .fock import FockState, OracleReport, check_virasoro
from .geometry import QuasiRootSystem, RootId, canonicalize, embed, isomorphic, validate_gram
from .named import cartan, named_system
from .solvers import (SigmaSequence, SolutionRecord, SolverConfig, an_all_solutions, solve_an,
                      solve_itype, solve_multistart)
from .surd import Surd

__version__ = "0.1.0"

__all__ = [
    "AnsatzAssignment", "BadParams", "BudgetExceeded", "Catalog", "CatalogEntry", "CatalogFile",
    "Cocycle", "DegenerateGram", "FockState", "GradeOverflow", "InadmissibleProduct",
    "NoIntegralBasis", "NonIntegerProduct", "OracleReport", "PolynomialSystem", "QuasiRootError",
    "QuasiRootSystem", "RootId", "SchemaError", "SigmaSequence", "SingularC", "SolutionRecord",
    "SolverConfig", "Surd", "UnknownName", "ValidationReport", "an_all_solutions", "assemble",
    "canonicalize", "cartan", "check_axioms", "check_duality", "check_virasoro", "cocycle_for",
    "dual", "embed", "enumerate_simple", "epsilon", "extend", "integral_basis", "is_simple",
    "isomorphic", "make_cocycle", "named_system", "read_catalog", "saturate", "solve_an",
    "solve_itype", "solve_multistart", "validate_gram", "write_catalog",
]
