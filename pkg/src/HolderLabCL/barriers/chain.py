from dataclasses import dataclass, field

import numpy as np

from ..utils.errors import ParameterError
from .barrier import build_barrier

CONDITIONS = {
    "integrability": "beta < gamma0, so that the local L-infinity bound applies",
    "data-exponent": "beta <= alpha / (2 + alpha), so that L r^alpha <= L |x0|^beta",
}


@dataclass
class ChainReport:
    """
    Lower bound on u(x0) near a boundary point, with its ingredients.

    Attributes
    ----------
    applicable : bool
        False when one of the exponent conditions fails.
    failed_condition : str or None
        ``"integrability"`` or ``"data-exponent"``.
    branch : str
        ``"barrier"``, ``"trivial"`` (r > r0) or ``"inapplicable"``.
    x0_norm, r, eps, A, delta : float
    addends : dict
        ``boundary`` (L r^alpha), ``barrier`` (C_cmp A rho(x0)) and ``comparison``
        (C_cmp ||f||^(1/n) r^(2 beta / (1 - beta))).
    constants : dict
        Per addend, the constant K with addend <= K |x0|^beta.
    within_bound : dict
        Per addend, whether that inequality holds.
    bound : float
        The lower bound on u(x0).
    notes : list of str
    """

    applicable: bool
    failed_condition: str = None
    branch: str = "inapplicable"
    x0_norm: float = np.nan
    r: float = np.nan
    eps: float = np.nan
    A: float = np.nan
    delta: float = np.nan
    addends: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    within_bound: dict = field(default_factory=dict)
    bound: float = np.nan
    notes: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def boundary_chain(x0, budget, data, M, L, f_norm, c_cmp=1.0, barrier=None):
    """
    Bounds u(x0) from below through the barrier comparison at the boundary point
    the Taylor data is centered on.

    With d = |x0| and beta the budget's boundary exponent: r = d^((1 - beta) / 2),
    eps = L r^alpha, A = M / r^2 and 2 n delta = 2 beta / (1 - beta). When r <= r0

        u(x0) >= -(L r^alpha + C_cmp A rho(x0) + C_cmp ||f||^(1/n) r^(2 beta / (1 - beta))),

    and otherwise u(x0) >= -M r0^(-2 beta / (1 - beta)) d^beta.

    Parameters
    ----------
    x0 : array_like
        Point of the domain in coordinates centered at the boundary point.
    budget : HolderBudget
    data : TaylorData
    M : float
        Bound on |inf u|.
    L : float
        Holder constant of the boundary data.
    f_norm : float
        L^p norm of the density.
    c_cmp : float
        Comparison constant of the local L-infinity bound.
    barrier : Barrier, optional
        Built from ``data`` when missing.

    Returns
    -------
    ChainReport

    Raises
    ------
    ParameterError
        Negative M, L or f_norm, or x0 at the boundary point.
    """
    x0 = np.asarray(x0, dtype=float)
    d = float(np.linalg.norm(x0))
    if not d > 0:
        raise ParameterError("x0 must differ from the boundary point")
    if min(M, L, f_norm, c_cmp) < 0:
        raise ParameterError("M, L, f_norm and c_cmp must be nonnegative")

    beta, alpha, n = budget.beta, budget.alpha, budget.n
    if not beta < budget.gamma0:
        return ChainReport(False, "integrability", notes=[CONDITIONS["integrability"]])
    if not beta <= alpha / (2 + alpha) * (1 + 1e-12):
        return ChainReport(False, "data-exponent", notes=[CONDITIONS["data-exponent"]])

    if barrier is None:
        barrier, _ = build_barrier(data)
    notes = [
        "The comparison addend uses ||f||^(1/n), the form of the L-infinity estimate.",
        "Only the lower bound on u(x0) is derived; the upper side is checked on the "
        "measured boundary modulus.",
    ]

    power = 2 * beta / (1 - beta)
    r = d ** ((1 - beta) / 2)
    delta = beta / (n * (1 - beta))
    if r > barrier.r0:
        trivial = M * barrier.r0 ** (-power) * d**beta
        return ChainReport(
            True,
            branch="trivial",
            x0_norm=d,
            r=r,
            delta=delta,
            addends={"trivial": trivial},
            constants={"trivial": M * barrier.r0 ** (-power)},
            within_bound={"trivial": True},
            bound=-trivial,
            notes=notes,
        )

    eps = L * r**alpha
    A = M / r**2
    addends = {
        "boundary": eps,
        "barrier": c_cmp * A * float(barrier(x0)),
        "comparison": c_cmp * f_norm ** (1.0 / n) * r**power,
    }
    constants = {
        "boundary": L,
        "barrier": c_cmp * M * barrier.lipschitz_at_origin(),
        "comparison": c_cmp * f_norm ** (1.0 / n),
    }
    within = {
        key: bool(addends[key] <= constants[key] * d**beta * (1 + 1e-9))
        for key in addends
    }
    return ChainReport(
        True,
        branch="barrier",
        x0_norm=d,
        r=r,
        eps=eps,
        A=A,
        delta=delta,
        addends=addends,
        constants=constants,
        within_bound=within,
        bound=-sum(addends.values()),
        notes=notes,
    )
