"""Sufficient input dimensions and continuity bounds for energy-constrained channels."""

from .errors import (
    CapabilityError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    EcdimError,
    SearchCapExceeded,
)
from .scalarfun import LogBase, binary_entropy, eta, g_func
from .spectrum import (
    EnergyBudget,
    GibbsSolution,
    SpectrumModel,
    condition_diagnostics,
    eigenvalue_at,
    eigenvalues,
    fbar,
    fhat,
    gibbs_entropy,
    load_spectrum,
)
from .dimbounds import (
    BoundEvaluation,
    CapacityKind,
    EnergyLimitParams,
    f_theorem1,
    f_theorem2,
    generate_table,
    m_theorem1,
    m_theorem2,
)

__version__ = "0.1.0"
