from .domain.domain import Ball, TaylorDomain
from .domain.grid import Grid, GridFn, build_grid, integrate, norm
from .exact.profiles import ma_density, make_profile, true_holder_exponent
from .solver.radial import solve_radial
from .solver.poisson import solve_poisson_n1
from .mollify.kernels import make_kernel
from .mollify.mollifier import mollify, subharmonic_gap
from .mollify.kiselman import kiselman_transform
from .holder.modulus import fit_exponent, modulus
from .holder.certificate import verify_lemma21
from .holder.stability import stability_check
from .barriers.budget import achievable_alpha_prime, budget
from .barriers.barrier import TaylorData, build_barrier
from .barriers.chain import boundary_chain
from .barriers.linfty import linfty_check
from .pipeline.runner import run_pipeline
from .utils.config import ExperimentConfig
from .utils.utils import (
    check_file,
    check_path_exists,
    loglog_fit,
)
