"""Genus-1 inner-product quadrature and Monte Carlo volume cross-checks.

The quadrature works on the classical fundamental domain |x| <= 1/2,
|z| >= 1, split at a moderate height: below the split a tensor Gauss rule
follows the circular lower boundary, above it the substitution u = 1/y
compactifies the strip up to the height cutoff.  Pairings are normalized by
the order of the central subgroup, so they match the averaged-series
identities directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .discrete_series import Weight, c_mn
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    SamplingError,
)
from .nonvanishing import METHOD_MC, METHOD_QUAD, IntegralResult
from .poincare import CongruenceGroup, enumerate_ball, series_evaluator_genus1
from .polynomials import MatrixPolynomial
from .symplectic import SiegelPoint


@dataclass(frozen=True)
class FundamentalDomainSpec:
    """Quadrature layout for the genus-1 fundamental domain."""

    y_max: float = 8.0
    y_split: float = 2.0
    base_nodes: int = 24
    max_doublings: int = 4
    tol: float = 1e-8

    def __post_init__(self):
        if self.y_max < 2.0:
            raise DomainError("height cutoff must be at least 2")
        if not (1.0 <= self.y_split < self.y_max):
            raise DomainError("split height must lie in [1, y_max)")
        if self.base_nodes < 4 or self.max_doublings < 1:
            raise DomainError("grid parameters too small")


# ---------------------------------------------------------------------------
# the classical weight-12 form, from the 24th power of the Euler product
# ---------------------------------------------------------------------------

def _euler_coeffs(K: int) -> list[int]:
    out = [0] * (K + 1)
    out[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= K:
        sign = -1 if k % 2 else 1
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g <= K:
                out[g] += sign
        k += 1
    return out


def _conv(a: list[int], b: list[int], K: int) -> list[int]:
    out = [0] * (K + 1)
    for i, ai in enumerate(a):
        if ai:
            top = min(K - i, len(b) - 1)
            for j in range(top + 1):
                if b[j]:
                    out[i + j] += ai * b[j]
    return out


def _tau_coeffs(K: int) -> list[int]:
    """Coefficients tau(1..K) of the weight-12 form, exact integers."""
    base = _euler_coeffs(K)
    result = [1] + [0] * K
    power = 24
    while power:
        if power & 1:
            result = _conv(result, base, K)
        power >>= 1
        if power:
            base = _conv(base, base, K)
    return result[: K]          # shifted by one: coefficient of q^{k} is result[k-1]


class DiscriminantForm:
    """The normalized weight-12 cusp form as a truncated q-expansion.

    Callable on complex scalars or arrays; exact integer coefficients give
    a self-contained oracle independent of everything else in the package.
    """

    m = 12

    def __init__(self, cutoff: int = 40):
        if cutoff < 5:
            raise DomainError("cutoff too small to be useful")
        self.cutoff = int(cutoff)
        self.tau = np.array(_tau_coeffs(self.cutoff), dtype=np.float64)

    def __call__(self, z):
        arr = np.asarray(z, dtype=np.complex128)
        q = np.exp(2j * np.pi * arr)
        acc = np.zeros_like(q)
        for t in self.tau[::-1]:
            acc = acc * q + t
        out = acc * q
        return complex(out) if np.isscalar(z) or arr.ndim == 0 else out

    def truncation_bound(self, y_min: float) -> float:
        """Rigorous tail bound via |tau(k)| <= k^{13/2}."""
        q0 = math.exp(-2.0 * math.pi * y_min)
        ks = np.arange(self.cutoff + 1, self.cutoff + 600)
        return float(np.sum(ks ** 6.5 * q0 ** ks))


# ---------------------------------------------------------------------------
# Monte Carlo value of the normalization constant
# ---------------------------------------------------------------------------

def mc_cmn(weight: Weight, samples: int = 10 ** 6, seed: int = 0) -> IntegralResult:
    """Estimate C_{m,n} as 2^{n(n+1)} times the bounded-domain volume integral.

    Samples the symmetric-matrix box uniformly, keeps points with
    I - w*w positive definite, and averages det(I - w*w)^{m-n-1}.
    """
    m, n = weight.m, weight.n
    if samples < 1000:
        raise DomainError("need at least 1000 samples for a meaningful estimate")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n)
    total = 0.0
    total_sq = 0.0
    accepted = 0
    done = 0
    while done < samples:
        count = min(200_000, samples - done)
        re = rng.uniform(-1.0, 1.0, size=(count, len(iu)))
        im = rng.uniform(-1.0, 1.0, size=(count, len(iu)))
        W = np.zeros((count, n, n), dtype=np.complex128)
        W[:, iu, ju] = re + 1j * im
        W[:, ju, iu] = re + 1j * im
        Mh = np.eye(n)[None] - np.conj(W) @ W
        evs = np.linalg.eigvalsh(Mh)
        inside = evs[:, 0] > 0.0
        dets = np.where(inside, np.prod(evs, axis=1), 1.0)
        vals = np.where(inside, dets ** (m - n - 1), 0.0)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        accepted += int(np.sum(inside))
        done += count
    if accepted / samples < 1e-4:
        raise SamplingError(
            f"box acceptance rate {accepted / samples:.2e} too low at genus {n}")
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    factor = 2.0 ** (2 * n * (n + 1))
    return IntegralResult(value=factor * mean,
                          error_estimate=factor * math.sqrt(var / samples),
                          evaluations=samples, method=METHOD_MC)


# ---------------------------------------------------------------------------
# fundamental-domain quadrature
# ---------------------------------------------------------------------------

def _grid_value(f1, f2, m: int, dom: FundamentalDomainSpec, nodes: int) -> complex:
    xg, wx = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * xg
    wxs = 0.5 * wx
    # region A: circular floor up to the split height
    ylow = np.sqrt(1.0 - x * x)
    half = 0.5 * (dom.y_split - ylow)
    mid = 0.5 * (dom.y_split + ylow)
    Y = mid[:, None] + half[:, None] * xg[None, :]
    WY = half[:, None] * wx[None, :]
    Z = x[:, None] + 1j * Y
    FA = f1(Z) * np.conj(f2(Z)) * Y ** (m - 2)
    total = np.sum(wxs[:, None] * WY * FA)
    # region B: u = 1/y flattens the tall strip
    lo, hi = 1.0 / dom.y_max, 1.0 / dom.y_split
    U = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xg
    WU = 0.5 * (hi - lo) * wx
    Yb = 1.0 / U
    Zb = x[:, None] + 1j * Yb[None, :]
    FB = f1(Zb) * np.conj(f2(Zb)) * Yb[None, :] ** m
    total += np.sum(wxs[:, None] * WU[None, :] * FB)
    return complex(total)


def petersson(f1, f2, weight: Weight, domain: FundamentalDomainSpec | None = None,
              eps_gamma: int = 2) -> IntegralResult:
    """Normalized pairing eps^{-1} integral of f1 conj(f2) y^{m-2} dx dy.

    ``f1`` and ``f2`` must accept complex arrays.  Node counts double until
    two successive grids agree to the domain tolerance; the last doubling
    difference is the reported error estimate.
    """
    if weight.n != 1:
        raise DimensionError("the quadrature harness is genus-1 only")
    dom = domain or FundamentalDomainSpec()
    m = weight.m
    prev = None
    evals = 0
    err = math.inf
    value = 0j
    for level in range(dom.max_doublings + 1):
        nodes = dom.base_nodes * 2 ** level
        value = _grid_value(f1, f2, m, dom, nodes)
        evals += 2 * nodes * nodes
        if prev is not None:
            err = abs(value - prev)
            if err <= dom.tol * max(abs(value), 1e-30):
                return IntegralResult(value=value / eps_gamma,
                                      error_estimate=err / eps_gamma,
                                      evaluations=evals, method=METHOD_QUAD)
        prev = value
    raise ConvergenceError(
        f"grid doubling stalled at {err:.3e} relative to tolerance {dom.tol}",
        IntegralResult(value=value / eps_gamma, error_estimate=err / eps_gamma,
                       evaluations=evals, method=METHOD_QUAD))


# ---------------------------------------------------------------------------
# end-to-end identity checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    """One checked identity with its error decomposition."""

    identity: str
    lhs: complex
    rhs: complex
    rel_err: float
    error_budget: dict = field(compare=False)
    passed: bool = False


def _cusp_height_budget(f1, f2, m: int, dom: FundamentalDomainSpec) -> float:
    """Crude bound for the mass above the height cutoff."""
    xs = np.linspace(-0.5, 0.5, 16)
    z_top = xs + 1j * dom.y_max
    row = np.abs(f1(z_top) * np.conj(f2(z_top))) * dom.y_max ** (m - 2)
    decay = 2.0 * math.pi - max(m - 2, 0) / dom.y_max
    if decay <= 0:
        decay = 2.0 * math.pi / 2
    return float(np.max(row)) / decay


def verify_cor62(radius: float = 40.0, cutoff: int = 40,
                 domain: FundamentalDomainSpec | None = None,
                 tol: float = 0.02, ball=None) -> VerificationReport:
    """Pairing of the weight-12 form against the averaged weight vector.

    The computed pairing must reproduce C_{12,1} times the form's value at
    the center, within ``tol`` relative error.
    """
    w = Weight(12, 1)
    group = CongruenceGroup(1, 1)
    dom = domain or FundamentalDomainSpec()
    if ball is None:
        ball = enumerate_ball(group, radius)
    delta = DiscriminantForm(cutoff)
    one = MatrixPolynomial.one(1)
    series = series_evaluator_genus1(w, ball, mu=one)
    series_half = series_evaluator_genus1(w, ball.restrict(radius / 2.0), mu=one)
    res = petersson(delta, series, w, dom)
    res_half = petersson(delta, series_half, w, dom)
    lhs = res.value
    rhs = c_mn(w) * delta(1j)
    rel = abs(lhs - rhs) / abs(rhs)
    budget = {
        "series": abs(lhs - res_half.value),
        "quadrature": res.error_estimate,
        "cutoff": (_cusp_height_budget(delta, series, w.m, dom)
                   + delta.truncation_bound(math.sqrt(3.0) / 2.0)),
    }
    return VerificationReport(identity="pairing-vs-center-value",
                              lhs=lhs, rhs=complex(rhs), rel_err=rel,
                              error_budget=budget, passed=rel <= tol)


def verify_thm93(points=(1j, 2j, 0.3 + 0.8j), radius: float = 40.0,
                 cutoff: int = 40, domain: FundamentalDomainSpec | None = None,
                 tol: float = 0.02, ball=None) -> list[VerificationReport]:
    """Pairing against the averaged point kernel reproduces point values."""
    w = Weight(12, 1)
    group = CongruenceGroup(1, 1)
    dom = domain or FundamentalDomainSpec()
    if ball is None:
        ball = enumerate_ball(group, radius)
    delta = DiscriminantForm(cutoff)
    reports = []
    for pt in points:
        pt = complex(pt)
        if pt.imag <= 0:
            raise DomainError("evaluation points must lie in the upper half-plane")
        xi = SiegelPoint(np.array([[pt.real]]), np.array([[pt.imag]]))
        series = series_evaluator_genus1(w, ball, xi=xi)
        series_half = series_evaluator_genus1(w, ball.restrict(radius / 2.0), xi=xi)
        res = petersson(delta, series, w, dom)
        res_half = petersson(delta, series_half, w, dom)
        lhs = res.value
        rhs = delta(pt)
        rel = abs(lhs - rhs) / abs(rhs)
        budget = {
            "series": abs(lhs - res_half.value),
            "quadrature": res.error_estimate,
            "cutoff": (_cusp_height_budget(delta, series, w.m, dom)
                       + delta.truncation_bound(math.sqrt(3.0) / 2.0)),
        }
        reports.append(VerificationReport(
            identity=f"kernel-pairing@{pt.real:g}+{pt.imag:g}i",
            lhs=lhs, rhs=complex(rhs), rel_err=rel,
            error_budget=budget, passed=rel <= tol))
    return reports
