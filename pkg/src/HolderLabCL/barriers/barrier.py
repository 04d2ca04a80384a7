from dataclasses import dataclass
from itertools import product

import numpy as np

from ..domain.domain import TaylorDomain, to_complex
from ..utils.errors import BarrierConstructionError, DomainError, ParameterError, ShapeError
from ..utils.utils import complex_array

C_LADDER_MAX = 2**20
R_LADDER_MIN = 1e-4
MIN_INSIDE = 100
BOUNDARY_TOL = 1e-8


class TaylorData:
    """
    Second order Taylor model of a defining function at a boundary point,

        f(w) = Re(sum a_j w_j) + Re(sum b_ij w_i w_j) + sum c_ij w_i conj(w_j),

    in coordinates w centered at the point.

    Attributes
    ----------
    a : numpy.ndarray
        Complex first order coefficients, shape (n,).
    b : numpy.ndarray
        Complex symmetric coefficients, shape (n, n).
    c : numpy.ndarray
        Hermitian positive definite coefficients, shape (n, n).
    r0 : float
        Radius of the neighbourhood the barrier is sought on.
    anchor : numpy.ndarray
        The boundary point in R^{2n}.
    defining_function : callable or None
        Exact defining function of absolute points, used instead of the model
        to decide which points lie in the domain.

    Methods
    -------
    evaluate
        Model value at shifted points.
    real_derivatives
        Real gradient and Hessian of the model.
    from_samples
        Least squares fit of the model to samples.
    from_defining_function
        Model of a defining function read off a finite difference stencil.
    domain
        The domain cut out by the model.
    """

    def __init__(self, a, b, c, r0=0.5, anchor=None, defining_function=None):
        self.a = np.atleast_1d(np.asarray(a, dtype=complex))
        self.n = self.a.size
        self.b = np.asarray(b, dtype=complex).reshape(self.n, self.n)
        self.c = np.asarray(c, dtype=complex).reshape(self.n, self.n)
        if not np.allclose(self.b, self.b.T, atol=1e-10):
            raise ParameterError("Second order coefficients b must be symmetric")
        if not np.allclose(self.c, self.c.conj().T, atol=1e-10):
            raise ParameterError("Hermitian coefficients c must be Hermitian")
        if not r0 > 0:
            raise ParameterError(f"Barrier radius must be positive, got {r0}")
        self.r0 = float(r0)
        self.anchor = (
            np.zeros(2 * self.n) if anchor is None else np.asarray(anchor, dtype=float)
        )
        if self.anchor.shape != (2 * self.n,):
            raise ShapeError(f"Anchor must have {2 * self.n} real coordinates")
        self.defining_function = defining_function

    def evaluate(self, w):
        z = to_complex(w)
        linear = np.real(z @ self.a)
        holomorphic = np.real(np.einsum("...i,ij,...j->...", z, self.b, z))
        hermitian = np.real(np.einsum("...i,ij,...j->...", z, self.c, z.conj()))
        return linear + holomorphic + hermitian

    def quadratic(self, w):
        return self.evaluate(w) - np.real(to_complex(w) @ self.a)

    def real_derivatives(self):
        """
        Returns
        -------
        gradient : numpy.ndarray
            Shape (2n,); (Re a_j, -Im a_j) per complex coordinate.
        hessian : numpy.ndarray
            Shape (2n, 2n), recovered from the quadratic part by polarization.
        """
        dim = 2 * self.n
        gradient = np.empty(dim)
        gradient[0::2] = self.a.real
        gradient[1::2] = -self.a.imag

        eye = np.eye(dim)
        diag = self.quadratic(eye)
        pairs = eye[:, None, :] + eye[None, :, :]
        hessian = self.quadratic(pairs) - diag[:, None] - diag[None, :]
        hessian[np.diag_indices(dim)] = 2.0 * diag
        return gradient, hessian

    @classmethod
    def from_real_derivatives(cls, gradient, hessian, **kwargs):
        """Complex coefficients (a, b, c) of a real gradient and Hessian."""
        gradient = np.asarray(gradient, dtype=float)
        H = np.asarray(hessian, dtype=float)
        H = 0.5 * (H + H.T)
        a = gradient[0::2] - 1j * gradient[1::2]
        xx, yy = H[0::2, 0::2], H[1::2, 1::2]
        xy, yx = H[0::2, 1::2], H[1::2, 0::2]
        b = 0.25 * (xx - yy - 1j * (xy + yx))
        c = 0.25 * (xx + yy + 1j * (xy - yx))
        return cls(a, b, c, **kwargs)

    @classmethod
    def from_samples(cls, points, values, **kwargs):
        """
        Least squares fit of a quadratic to samples at shifted points.

        Parameters
        ----------
        points : numpy.ndarray
            Shape (m, 2n), coordinates relative to the boundary point.
        values : numpy.ndarray
            Defining function at those points.
        **kwargs
            ``r0``, ``anchor`` and ``defining_function``.

        Returns
        -------
        TaylorData
        """
        points = np.asarray(points, dtype=float)
        values = np.asarray(values, dtype=float)
        m, dim = points.shape
        pairs = [(k, l) for k in range(dim) for l in range(k, dim)]
        if m < 1 + dim + len(pairs):
            raise ShapeError(f"A quadratic fit in R^{dim} needs {1 + dim + len(pairs)} samples")

        design = np.column_stack(
            [np.ones(m), points] + [points[:, k] * points[:, l] for k, l in pairs]
        )
        coef = np.linalg.lstsq(design, values, rcond=None)[0]
        gradient = coef[1 : 1 + dim]
        hessian = np.zeros((dim, dim))
        for (k, l), value in zip(pairs, coef[1 + dim :]):
            if k == l:
                hessian[k, k] = 2.0 * value
            else:
                hessian[k, l] = hessian[l, k] = value
        return cls.from_real_derivatives(gradient, hessian, **kwargs)

    @classmethod
    def from_defining_function(cls, func, point, h=1e-3, r0=0.5):
        """
        Samples ``func`` on the stencil point + h {-1, 0, 1}^{2n} and fits the model.

        Raises
        ------
        DomainError
            If ``point`` is not on the zero set of ``func``.
        """
        point = np.asarray(point, dtype=float)
        value = float(func(point[None, :])[0])
        if abs(value) > BOUNDARY_TOL:
            raise DomainError(f"Point {point.tolist()} is not a boundary point, f = {value:.3e}")
        offsets = h * np.array(list(product((-1.0, 0.0, 1.0), repeat=point.size)))
        values = func(point + offsets)
        return cls.from_samples(
            offsets, values, r0=r0, anchor=point, defining_function=func
        )

    def inside(self, w):
        """Membership of shifted points in the domain."""
        if self.defining_function is not None:
            return self.defining_function(np.asarray(w) + self.anchor) < 0
        return self.evaluate(w) < 0

    def domain(self):
        return TaylorDomain(self)

    def to_dict(self):
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "r0": self.r0,
            "anchor": self.anchor,
        }

    @classmethod
    def from_dict(cls, record):
        """Reads complex entries written as ``[re, im]`` pairs."""
        n = int(record.get("n", len(record["a"])))
        a = complex_array(record["a"]).reshape(n)
        b = complex_array(record.get("b", np.zeros((n, n, 2)))).reshape(n, n)
        c = complex_array(record["c"]).reshape(n, n)
        return cls(a, b, c, r0=record.get("r0", 0.5), anchor=record.get("anchor"))


class Barrier:
    """
    rho(w) = -C (f(w) - eps |w|^2), with f the Taylor model.

    rho(0) = 0 and -rho has complex Hessian C (c - eps I).
    """

    def __init__(self, data, C, eps, r0):
        self.data = data
        self.C = float(C)
        self.eps = float(eps)
        self.r0 = float(r0)

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return -self.C * (self.data.evaluate(w) - self.eps * np.sum(w * w, axis=-1))

    def lipschitz_at_origin(self):
        """Bound on rho(w) / |w| over B_{r0}."""
        d = self.data
        quadratic = np.linalg.norm(d.b, 2) + np.linalg.norm(d.c, 2) + self.eps
        return self.C * (np.linalg.norm(d.a) + quadratic * self.r0)


@dataclass(frozen=True)
class BarrierCertificate:
    C_bar: float
    r0: float
    eps_bar: float
    margin: float
    relative_margin: float
    min_eigenvalue: float
    samples: int
    attempts: int

    @property
    def passed(self):
        return self.margin > 0 and self.min_eigenvalue > 0

    def to_dict(self):
        return {
            "C_bar": self.C_bar,
            "r0": self.r0,
            "eps_bar": self.eps_bar,
            "margin": self.margin,
            "relative_margin": self.relative_margin,
            "min_eigenvalue": self.min_eigenvalue,
            "samples": self.samples,
            "attempts": self.attempts,
            "passed": self.passed,
        }


def _sample_inside(data, r, n_samples, rng, batches=50):
    """Uniform samples of B_r in the domain, ``n_samples`` at most."""
    dim = 2 * data.n
    found = []
    count = 0
    for _ in range(batches):
        directions = rng.normal(size=(n_samples, dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = r * rng.uniform(size=(n_samples, 1)) ** (1.0 / dim)
        w = directions * radii
        w = w[data.inside(w) & (radii[:, 0] > 0)]
        found.append(w)
        count += len(w)
        if count >= n_samples:
            break
    return np.concatenate(found)[:n_samples]


def build_barrier(data, seed=0, n_samples=10_000):
    """
    Finds C and r0 with rho(w) >= |w|^2 on the domain near the boundary point.

    eps is half the smallest eigenvalue of c; C climbs 1, 2, 4, ... up to 2^20 for
    every r on r0, r0 / 2, ... down to 1e-4, and a pair is accepted once rho - |w|^2
    is positive on ``n_samples`` seeded points of the domain inside B_r.

    Parameters
    ----------
    data : TaylorData
    seed : int
    n_samples : int

    Returns
    -------
    barrier : Barrier
    certificate : BarrierCertificate

    Raises
    ------
    BarrierConstructionError
        If c is not positive definite, the model has no linear part, or the ladder
        is exhausted.
    """
    eig = np.linalg.eigvalsh(data.c)
    if eig.min() <= 0:
        raise BarrierConstructionError(
            "Hermitian part is not positive definite", {"eigenvalues": eig.tolist()}
        )
    if np.linalg.norm(data.a) <= BOUNDARY_TOL:
        raise BarrierConstructionError(
            "The model has no linear part, the origin is not a boundary point",
            {"a": np.abs(data.a).tolist()},
        )

    eps = 0.5 * float(eig.min())
    shifted = float(np.linalg.eigvalsh(data.c - eps * np.eye(data.n)).min())
    rng = np.random.default_rng(seed)

    attempts = 0
    best = -np.inf
    r = data.r0
    while r >= R_LADDER_MIN:
        w = _sample_inside(data, r, n_samples, rng)
        if len(w) >= MIN_INSIDE:
            norm2 = np.sum(w * w, axis=1)
            C = 1.0
            while C <= C_LADDER_MAX:
                attempts += 1
                gap = Barrier(data, C, eps, r)(w) - norm2
                best = max(best, float(gap.min()))
                if gap.min() > 0:
                    barrier = Barrier(data, C, eps, r)
                    certificate = BarrierCertificate(
                        C_bar=C,
                        r0=r,
                        eps_bar=eps,
                        margin=float(gap.min()),
                        relative_margin=float(np.min(gap / norm2)),
                        min_eigenvalue=shifted,
                        samples=len(w),
                        attempts=attempts,
                    )
                    return barrier, certificate
                C *= 2
        r /= 2

    raise BarrierConstructionError(
        "No (C, r0) pair on the ladder satisfies rho >= |z|^2",
        {"best_margin": best, "attempts": attempts, "eps_bar": eps},
    )
