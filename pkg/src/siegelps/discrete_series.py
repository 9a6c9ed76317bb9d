"""Weight-m holomorphic vectors, their lifts to the group, and matrix coefficients.

The basic family is

    f_{mu,m}(z) = (2i)^{mn} mu((z - iI)(z + iI)^{-1}) / det(z + iI)^m,

a polynomial weight mu composed with the Cayley image of z.  Lifting by the
slash action evaluates the translated function at the base point iI; in
Cartan coordinates g = k_u h_t k_{u'} the lift has the closed form
implemented by ``matrix_coeff_kak``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, DomainError, NumericalError
from .polynomials import MatrixPolynomial
from .symplectic import (
    KAKFactors,
    NAKFactors,
    SiegelPoint,
    SymplecticMatrix,
    act,
    chi,
    j_factor,
)

HalfSpaceFunction = Callable[[SiegelPoint], complex]


@dataclass(frozen=True)
class Weight:
    """Scalar weight m at genus n; m > n keeps the family well defined."""

    m: int
    n: int

    def __post_init__(self):
        if int(self.n) < 1:
            raise DimensionError("genus must be a positive integer")
        if int(self.m) <= int(self.n):
            raise DomainError(f"weight must exceed the genus, got m={self.m}, n={self.n}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))

    @property
    def integrable(self) -> bool:
        """m > 2n: square-integrable range, where the pairings converge."""
        return self.m > 2 * self.n

    def require_integrable(self) -> "Weight":
        if not self.integrable:
            raise DomainError(f"operation needs m > 2n, got m={self.m}, n={self.n}")
        return self


@dataclass(frozen=True)
class MatrixCoefficientSpec:
    """A polynomial K-type paired with a scalar weight."""

    mu: MatrixPolynomial
    weight: Weight

    def __post_init__(self):
        if self.mu.n != self.weight.n:
            raise DimensionError("polynomial size and weight genus differ")


# ---------------------------------------------------------------------------
# the function family and the slash action
# ---------------------------------------------------------------------------

def _cayley_batch(Z: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(z - iI)(z + iI)^{-1} and det(z + iI) over a stack of points."""
    eye = np.eye(n)
    M = Z + 1j * eye
    W = np.linalg.solve(np.swapaxes(M, -1, -2), np.swapaxes(Z - 1j * eye, -1, -2))
    return np.swapaxes(W, -1, -2), np.linalg.det(M)


def f_values(mu: MatrixPolynomial, weight: Weight, Z: np.ndarray) -> np.ndarray:
    """f_{mu,m} over a stack of half-space points given as complex matrices."""
    n = weight.n
    W, dets = _cayley_batch(np.asarray(Z, dtype=np.complex128), n)
    return (2j) ** (weight.m * n) * mu.evaluate_batch(W) / dets ** weight.m


def f_mu_m(mu: MatrixPolynomial, weight: Weight, z: SiegelPoint) -> complex:
    """The weight vector f_{mu,m} at a single point."""
    if mu.n != weight.n or z.n != weight.n:
        raise DimensionError("mu, weight and z must share the same genus")
    zc = z.z
    if np.linalg.cond(zc + 1j * np.eye(z.n)) > 1e12:
        raise NumericalError("z + iI is too ill-conditioned")   # unreachable on H_n
    return complex(f_values(mu, weight, zc[None, ...])[0])


def slash(f: HalfSpaceFunction, weight: Weight, g: SymplecticMatrix) -> HalfSpaceFunction:
    """The weight-m slash action: (f|g)(z) = j(g, z)^{-m} f(g.z)."""
    if g.n != weight.n:
        raise DimensionError("group element and weight must share the same genus")
    m = weight.m

    def translated(z: SiegelPoint) -> complex:
        return j_factor(g, z) ** (-m) * f(act(g, z))

    return translated


def lift(f: HalfSpaceFunction, weight: Weight, g: SymplecticMatrix) -> complex:
    """Classical-to-group lift F_f(g) = (f|g)(iI)."""
    if g.n != weight.n:
        raise DimensionError("group element and weight must share the same genus")
    z0 = SiegelPoint.center(weight.n)
    return j_factor(g, z0) ** (-weight.m) * f(act(g, z0))


def lift_nak(f: HalfSpaceFunction, weight: Weight, factors: NAKFactors) -> complex:
    """The lift in Iwasawa coordinates: chi_m(u) det(y)^{m/2} f(x + iy)."""
    if factors.n != weight.n:
        raise DimensionError("factors and weight must share the same genus")
    dety = float(np.linalg.det(factors.y))
    return chi(weight.m, factors.u) * dety ** (weight.m / 2) * f(SiegelPoint(factors.x, factors.y))


def matrix_coeff_kak(spec: MatrixCoefficientSpec, factors: KAKFactors) -> complex:
    """Lift of f_{mu,m} in Cartan coordinates g = k_u h_t k_{u'}:

        det(u)^m det(u')^m mu(u tanh(d_t) u^T) / det(cosh(d_t))^m.
    """
    if factors.n != spec.weight.n:
        raise DimensionError("factors and spec must share the same genus")
    m = spec.weight.m
    u = factors.u
    W = (u.mat * np.tanh(factors.t)[None, :]) @ u.mat.T
    log_cosh = float(np.sum(np.log(np.cosh(factors.t))))
    return (chi(m, u) * chi(m, factors.uprime)
            * spec.mu.evaluate(W) * np.exp(-m * log_cosh))


# ---------------------------------------------------------------------------
# normalization constant and the point-evaluation kernel
# ---------------------------------------------------------------------------

def c_mn(weight: Weight) -> float:
    """The formal-degree constant

        C_{m,n} = 2^{n(n+3)/2} pi^{n(n+1)/2}
                  prod_{r=1}^{n} Gamma(m - (n+r)/2) / Gamma(m - (r-1)/2).

    For n = 1 this reduces to 4 pi / (m - 1).
    """
    m, n = weight.m, weight.n
    log = (n * (n + 3) / 2) * np.log(2.0) + (n * (n + 1) / 2) * np.log(np.pi)
    for r in range(1, n + 1):
        log += gammaln(m - (n + r) / 2) - gammaln(m - (r - 1) / 2)
    return float(np.exp(log))


def kernel_values(weight: Weight, xi: SiegelPoint, Z: np.ndarray) -> np.ndarray:
    """Point-evaluation kernel over a stack of half-space points."""
    weight.require_integrable()
    xibar = np.conj(xi.z)
    M = (np.asarray(Z, dtype=np.complex128) - xibar) / 2j
    return np.linalg.det(M) ** (-weight.m) / c_mn(weight)


def f_kernel(weight: Weight, xi: SiegelPoint, z: SiegelPoint) -> complex:
    """f_{1,m,xi}(z) = C_{m,n}^{-1} det((z - conj(xi)) / 2i)^{-m}."""
    if xi.n != weight.n or z.n != weight.n:
        raise DimensionError("xi, z and the weight must share the same genus")
    return complex(kernel_values(weight, xi, z.z[None, ...])[0])
