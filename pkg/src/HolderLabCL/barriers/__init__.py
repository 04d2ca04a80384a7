from .barrier import Barrier, BarrierCertificate, TaylorData, build_barrier
from .budget import (
    REGIMES,
    HolderBudget,
    achievable_alpha_prime,
    budget,
    gamma_0,
    gamma_n,
    regime_of,
)
from .chain import ChainReport, boundary_chain
from .linfty import LinftyReport, linfty_check
