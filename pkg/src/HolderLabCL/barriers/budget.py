from dataclasses import asdict, dataclass

from ..utils.errors import ParameterError

REGIMES = ("gamma0-limited", "barrier-limited", "data-limited")


def conjugate(p):
    return p / (p - 1)


def gamma_0(p):
    """1 / (p* + 1)."""
    return 1.0 / (conjugate(p) + 1)


def gamma_n(p, n):
    """1 / (n p* + 1)."""
    return 1.0 / (n * conjugate(p) + 1)


@dataclass(frozen=True)
class HolderBudget:
    """
    Exponent bookkeeping of the global Holder estimate.

    Attributes
    ----------
    alpha : float
        Holder exponent of the boundary data.
    p, p_star : float
        Integrability of the density and its conjugate.
    n : int
    gamma0, gamma_n : float
        1 / (p* + 1) and 1 / (n p* + 1).
    gamma, gamma_prime, gamma_dblprime : float
        Chosen exponents below gamma_n, gamma_n and gamma0.
    beta : float
        Boundary exponent max{min{gamma'', alpha / (2 + alpha)}, min{alpha / 2, gamma'}}.
    alpha_prime : float
        Global exponent min{beta, (1 + beta) gamma}.
    regime : str
        Which bound limits beta: ``"gamma0-limited"`` when alpha / (2 + alpha) >= gamma0,
        ``"barrier-limited"`` when gamma_n <= alpha / (2 + alpha) < gamma0 and
        ``"data-limited"`` otherwise.
    """

    alpha: float
    p: float
    p_star: float
    n: int
    gamma0: float
    gamma_n: float
    gamma: float
    gamma_prime: float
    gamma_dblprime: float
    beta: float
    alpha_prime: float
    regime: str

    @property
    def data_ratio(self):
        return self.alpha / (2 + self.alpha)

    def to_dict(self):
        return asdict(self)


def regime_of(alpha, p, n):
    ratio = alpha / (2 + alpha)
    if ratio >= gamma_0(p):
        return REGIMES[0]
    if ratio >= gamma_n(p, n):
        return REGIMES[1]
    return REGIMES[2]


def _check_open(name, value, lo, hi):
    if not lo < value < hi:
        raise ParameterError(f"{name} must lie in the open interval ({lo:.6g}, {hi:.6g}), got {value}")


def budget(alpha, p, n, gamma, gamma_prime, gamma_dblprime):
    """
    Derives the boundary and global Holder exponents from the data exponents.

    Parameters
    ----------
    alpha : float
        In (0, 1].
    p : float
        Greater than 1.
    n : int
        Complex dimension.
    gamma, gamma_prime : float
        In (0, gamma_n).
    gamma_dblprime : float
        In (0, gamma0).

    Returns
    -------
    HolderBudget

    Raises
    ------
    ParameterError
        Any input outside its open interval.
    """
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if not p > 1:
        raise ParameterError(f"p must exceed 1, got {p}")
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    n = int(n)
    g0, gn = gamma_0(p), gamma_n(p, n)
    _check_open("gamma", gamma, 0.0, gn)
    _check_open("gamma'", gamma_prime, 0.0, gn)
    _check_open("gamma''", gamma_dblprime, 0.0, g0)

    beta = max(min(gamma_dblprime, alpha / (2 + alpha)), min(alpha / 2, gamma_prime))
    alpha_prime = min(beta, (1 + beta) * gamma)
    return HolderBudget(
        alpha=float(alpha),
        p=float(p),
        p_star=conjugate(p),
        n=n,
        gamma0=g0,
        gamma_n=gn,
        gamma=float(gamma),
        gamma_prime=float(gamma_prime),
        gamma_dblprime=float(gamma_dblprime),
        beta=beta,
        alpha_prime=alpha_prime,
        regime=regime_of(alpha, p, n),
    )


def achievable_alpha_prime(alpha, p, n):
    """
    Supremum of alpha' over the open exponent box, reached as gamma, gamma' tend to
    gamma_n and gamma'' to gamma0; never attained.
    """
    g0, gn = gamma_0(p), gamma_n(p, n)
    beta = max(min(g0, alpha / (2 + alpha)), min(alpha / 2, gn))
    return min(beta, (1 + beta) * gn)
