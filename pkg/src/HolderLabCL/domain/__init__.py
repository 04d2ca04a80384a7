from .domain import Ball, Domain, TaylorDomain, domain_from_dict, to_complex, to_real
from .grid import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    BoundaryLinks,
    Grid,
    GridFn,
    ShrunkDomain,
    build_grid,
    dist_to_boundary,
    integrate,
    is_subharmonic,
    norm,
    omitted_volume,
    submean_violation,
)
from .io import read_gridfn, write_gridfn
