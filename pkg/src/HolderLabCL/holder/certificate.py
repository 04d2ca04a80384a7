import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from dask import compute, delayed
from scipy.integrate import quad

from ..mollify.kernels import sphere_area
from ..mollify.mollifier import mollify
from ..utils.errors import (
    DomainError,
    KernelInadmissibleError,
    KernelUnresolvedWarning,
    ParameterError,
    ShapeError,
)
from .modulus import modulus

PLATEAU_BALL = 3.0
BOUNDARY_CHUNK = 16

REFLECTION_NOTE = (
    "The iteration is replayed on the measured modulus of continuity; reflected "
    "points 2x - z - y that leave the domain never enter a modulus sample, so the "
    "replay only covers pairs whose reflection stays on the grid support."
)


@dataclass(eq=False)
class Lemma21Certificate:
    """
    Explicit Holder constants obtained from a boundary Holder bound and a
    regularization gap bound, checked against the measured modulus.

    Attributes
    ----------
    alpha, eps0 : float
    R : float
        Support radius of the kernel after rescaling its plateau to radius 3.
    scale : float
        Dilation applied to the kernel.
    C1 : float
        Boundary Holder constant, sup |u(x) - u(y)| / |x - y|^alpha, y on the boundary.
    C2 : float
        Regularization gap constant, sup |u_eps - u| / eps^alpha over dyadic eps.
    kappa, delta : float
        Mass of g(z) = inf_{B_1(z)} eta / 2 and plateau lower bound of eta.
    diam : float
    C3, C4, C : float
    conclusion : pandas.DataFrame
        ``r``, ``omega``, ``bound`` and ``holds`` per resolvable dyadic radius.
    replay : pandas.DataFrame
        One row per descent step of the dyadic iteration.
    notes : list of str
    passed : bool
    """

    alpha: float
    eps0: float
    R: float
    scale: float
    C1: float
    C2: float
    kappa: float
    delta: float
    diam: float
    C3: float
    C4: float
    C: float
    conclusion: pd.DataFrame
    replay: pd.DataFrame
    notes: list = field(default_factory=list)
    passed: bool = False

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "eps0": self.eps0,
            "R": self.R,
            "scale": self.scale,
            "C1": self.C1,
            "C2": self.C2,
            "kappa": self.kappa,
            "delta": self.delta,
            "diam": self.diam,
            "C3": self.C3,
            "C4": self.C4,
            "C": self.C,
            "conclusion": self.conclusion.to_dict(orient="records"),
            "replay": self.replay.to_dict(orient="records"),
            "notes": list(self.notes),
            "passed": self.passed,
        }


def averaging_mass(kernel):
    """
    kappa = int g dmu with g(z) = inf_{B_1(z)} eta / 2 = eta(|z| + 1) / 2 for a
    radial nonincreasing eta.
    """
    upper = kernel.support_radius - 1.0
    if upper <= 0:
        return 0.0
    value, _ = quad(
        lambda r: float(kernel.profile(r + 1.0)) * r ** (kernel.dim - 1),
        0.0,
        upper,
        limit=200,
    )
    return 0.5 * sphere_area(kernel.dim) * value


def _boundary_samples(u):
    """Boundary points and values: crossings plus grid points lying on the boundary."""
    grid = u.grid
    points, values = [], []
    if u.boundary is not None and len(grid.links):
        finite = np.isfinite(u.boundary)
        points.append(grid.links.points[finite])
        values.append(u.boundary[finite])
    on = grid.on_boundary & u.support
    points.append(grid.points[on])
    values.append(u.values[on])
    return np.concatenate(points), np.concatenate(values)


def _ratio_chunk(x, ux, y, uy, alpha):
    distance = np.linalg.norm(x[np.newaxis] - y[:, np.newaxis], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(ux[np.newaxis] - uy[:, np.newaxis]) / distance**alpha
    ratio = ratio[distance > 0]
    return float(ratio.max()) if ratio.size else 0.0


def boundary_holder_constant(u, alpha):
    """Sup of |u(x) - u(y)| / |x - y|^alpha over interior x and boundary y."""
    grid = u.grid
    inside = u.support & grid.interior
    x, ux = grid.points[inside], u.values[inside]
    y, uy = _boundary_samples(u)
    if y.size == 0:
        raise DomainError("The function carries no boundary samples")
    tasks = [
        delayed(_ratio_chunk)(x, ux, y[i : i + BOUNDARY_CHUNK], uy[i : i + BOUNDARY_CHUNK], alpha)
        for i in range(0, len(y), BOUNDARY_CHUNK)
    ]
    return max(compute(*tasks, scheduler="threads"))


def regularization_gap_constant(u, kernel, alpha, eps0):
    """
    Sup over dyadic eps = eps0 / 2^j, j >= 1, of sup |u_eps - u| / eps^alpha, for
    every eps whose kernel support spans two grid cells.

    Returns
    -------
    C2 : float
    frame : pandas.DataFrame
        ``eps`` and ``gap`` per scale used.
    """
    h = u.grid.h
    rows = []
    j = 1
    while kernel.support_radius * eps0 / 2**j >= 2 * h:
        eps = eps0 / 2**j
        j += 1
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", KernelUnresolvedWarning)
                gap = mollify(u, kernel, eps) - u
        except DomainError:
            continue
        rows.append({"eps": eps, "gap": float(np.max(np.abs(gap.samples))) / eps**alpha})
    frame = pd.DataFrame(rows, columns=["eps", "gap"])
    C2 = float(max(frame["gap"].max(), 0.0)) if len(frame) else 0.0
    return C2, frame


def verify_lemma21(
    u,
    kernel,
    alpha,
    eps0,
    s_max=6,
    conclusion_factor=1.05,
    exhaustive_limit=129,
    pair_samples=1_000_000,
    seed=0,
):
    """
    Measures the boundary Holder constant and the regularization gap constant of
    ``u``, assembles the global Holder constant and checks it on the modulus.

    The kernel is dilated so that its plateau contains the ball of radius 3; the
    constants are

        C3 = 2 C1 (R + 1)^alpha diam^alpha / eps0^alpha
        C4 = max{C3, C2 / ((1 - 2^(alpha - 1)) kappa)}
        C  = max{C3, 2^alpha C4}.

    Parameters
    ----------
    u : GridFn
    kernel : Kernel
        Radial kernel with a plateau.
    alpha : float
        In (0, 1).
    eps0 : float
        Top of the dyadic ladder.
    s_max : int
        Depth of the modulus ladder.
    conclusion_factor : float
        Slack on C r^alpha in the conclusion check.

    Returns
    -------
    Lemma21Certificate

    Raises
    ------
    ParameterError
        If alpha is not in (0, 1).
    KernelInadmissibleError
        If the kernel has no plateau; use the plateau-bump kernel instead.
    """
    if u.radial:
        raise ShapeError("The certificate needs a grid function")
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if kernel.plateau_radius <= 0:
        raise KernelInadmissibleError(
            f"Kernel {kernel.kind!r} has no plateau, so kappa = 0; use the plateau-bump kernel"
        )

    scale = PLATEAU_BALL / kernel.plateau_radius
    rescaled = kernel.dilated(scale)
    R = rescaled.support_radius
    kappa = averaging_mass(rescaled)
    if not kappa > 0:
        raise KernelInadmissibleError(f"Averaging mass of kernel {kernel.kind!r} vanishes")

    C1 = boundary_holder_constant(u, alpha)
    C2, _ = regularization_gap_constant(u, rescaled, alpha, eps0)
    diam = u.grid.domain.diameter

    C3 = 2 * C1 * (R + 1) ** alpha * diam**alpha / eps0**alpha
    C4 = max(C3, C2 / ((1 - 2 ** (alpha - 1)) * kappa))
    C = max(C3, 2**alpha * C4)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        curve = modulus(u, eps0, s_max, exhaustive_limit, pair_samples, seed)

    bound = C * curve.radii**alpha
    conclusion = pd.DataFrame(
        {
            "r": curve.radii,
            "omega": curve.omega,
            "bound": bound,
            "holds": curve.omega <= conclusion_factor * bound,
        }
    )

    replay = []
    for k in range(1, curve.radii.size):
        r, omega_r, omega_2r = curve.radii[k], curve.omega[k], curve.omega[k - 1]
        hypothesis = omega_2r <= conclusion_factor * C4 * (2 * r) ** alpha
        key = max(
            2 * C1 * (R + 1) ** alpha * r**alpha,
            (2 * C2 * r**alpha + kappa * omega_2r) / (2 * kappa),
        )
        claim = C4 * r**alpha
        holds = (not hypothesis) or (
            omega_r <= conclusion_factor * key and key <= conclusion_factor * claim
        )
        replay.append(
            {
                "step": k,
                "r": r,
                "omega_2r": omega_2r,
                "omega_r": omega_r,
                "hypothesis": bool(hypothesis),
                "key_bound": key,
                "claim": claim,
                "holds": bool(holds),
            }
        )
    replay = pd.DataFrame(
        replay,
        columns=["step", "r", "omega_2r", "omega_r", "hypothesis", "key_bound", "claim", "holds"],
    )

    notes = [REFLECTION_NOTE]
    base = curve.omega[0] <= conclusion_factor * C3 * eps0**alpha
    if not base:
        notes.append("The measured modulus at eps0 exceeds C3 eps0^alpha")
    passed = (
        np.isfinite(C1)
        and np.isfinite(C2)
        and bool(conclusion["holds"].all())
        and bool(replay["holds"].all())
        and bool(base)
    )
    return Lemma21Certificate(
        alpha=float(alpha),
        eps0=float(eps0),
        R=float(R),
        scale=float(scale),
        C1=float(C1),
        C2=float(C2),
        kappa=float(kappa),
        delta=float(rescaled.delta),
        diam=float(diam),
        C3=float(C3),
        C4=float(C4),
        C=float(C),
        conclusion=conclusion,
        replay=replay,
        notes=notes,
        passed=bool(passed),
    )
