"""Quadratic-order center-manifold functions in complex and real coordinates.

Every coefficient is built from the eigenvalues beta_n(lam) directly, so the
same code serves any lam near lambda0.  Real coordinates use

    u = u1 cos(k rho x) + u2 sin(k rho x) [+ u3 cos((k+1) rho x) + u4 sin((k+1) rho x)],
    z1 = (u1 - i u2) / 2,   z2 = (u3 - i u4) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominator, WrongClass
from .spectrum import (
    DEFAULT_TIE_TOL,
    CriticalAnalysis,
    PartitionClass,
    SystemParams,
    analyze,
    growth_rate,
)


@dataclass(frozen=True)
class TrigSeries:
    """Finite real Fourier series  sum_m a_m cos(m rho x) + b_m sin(m rho x).

    ``terms`` maps the mode number m >= 0 to the pair (a_m, b_m); the constant
    lives at m = 0 with b_0 ignored.
    """

    ell: float
    terms: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        rho = 2.0 * math.pi / self.ell
        out = np.zeros_like(x)
        for m, (a, b) in self.terms.items():
            out = out + a * np.cos(m * rho * x) + b * np.sin(m * rho * x)
        return out

    def modes(self, atol: float = 0.0) -> set[int]:
        return {m for m, (a, b) in self.terms.items() if abs(a) > atol or abs(b) > atol}


def _inv(num: complex, den: complex, what: str) -> complex:
    if den == 0:
        raise DegenerateDenominator(f"{what} vanishes")
    return num / den


def _analysis(ell, wanted, tie_tol) -> CriticalAnalysis:
    a = analyze(ell, tie_tol)
    if a.partition_class is not wanted:
        raise WrongClass(f"ell={ell!r} is in {a.partition_class.name}, expected {wanted.name}")
    return a


@dataclass(frozen=True)
class MuCoefficients:
    mu1: complex
    mu2: complex
    mu3: complex
    mu4: complex
    mu5: complex


@dataclass(frozen=True)
class NuCoefficients:
    nu1: complex
    nu2: complex
    nu3: complex


def mu_coefficients(
    ell: float, sigma: float, b: float, lam: float, tie_tol: float = DEFAULT_TIE_TOL
) -> MuCoefficients:
    a = _analysis(ell, PartitionClass.I4, tie_tol)
    k = a.k
    if k < 2:
        raise WrongClass("mu coefficients need k >= 2; use nu_coefficients for k = 1")
    p = SystemParams(ell, sigma, b, lam)

    def beta(n):
        return growth_rate(n, p)

    bk, bk1 = beta(k), beta(k + 1)
    return MuCoefficients(
        mu1=_inv(b, 2 * bk - beta(2 * k), "2 beta_k - beta_2k"),
        mu2=_inv(b, 2 * bk1 - beta(2 * k + 2), "2 beta_k+1 - beta_2k+2"),
        mu3=_inv(b, (bk + bk.conjugate() - beta(0)).real, "2 Re beta_k - beta_0"),
        mu4=_inv(b, (bk1 + bk1.conjugate() - beta(0)).real, "2 Re beta_k+1 - beta_0"),
        mu5=_inv(2 * b, bk.conjugate() + bk1 - beta(1), "conj beta_k + beta_k+1 - beta_1"),
    )


def nu_coefficients(
    ell: float, sigma: float, b: float, lam: float, tie_tol: float = DEFAULT_TIE_TOL
) -> NuCoefficients:
    a = _analysis(ell, PartitionClass.I4, tie_tol)
    if a.k != 1:
        raise WrongClass("nu coefficients are defined for k = 1 only")
    p = SystemParams(ell, sigma, b, lam)
    b0, b1, b2 = (growth_rate(n, p) for n in (0, 1, 2))
    return NuCoefficients(
        nu1=_inv(b, 2 * b2 - growth_rate(4, p), "2 beta_2 - beta_4"),
        nu2=_inv(b, (b1 + b1.conjugate() - b0).real, "2 Re beta_1 - beta_0"),
        nu3=_inv(b, (b2 + b2.conjugate() - b0).real, "2 Re beta_2 - beta_0"),
    )


class I2Manifold:
    """Center manifold for a single critical pair +-k.

    Complex form:  Phi = mu_sq z^2 phi_k^2 + mu_0 |z|^2 + c.c.
    Real form:     Phi = A cos(2k rho x) + B sin(2k rho x) + C.
    """

    def __init__(self, ell: float, sigma: float, b: float, lam: float,
                 tie_tol: float = DEFAULT_TIE_TOL):
        self.analysis = _analysis(ell, PartitionClass.I2, tie_tol)
        self.ell, self.sigma, self.b, self.lam = ell, sigma, b, lam
        k = self.k = self.analysis.k
        p = SystemParams(ell, sigma, b, lam)
        bk = growth_rate(k, p)
        self.mu_sq = _inv(b, 2 * bk - growth_rate(2 * k, p), "2 beta_k - beta_2k")
        self.mu_0 = _inv(b, (bk + bk.conjugate() - growth_rate(0, p)).real,
                         "2 Re beta_k - beta_0").real

    def coefficients(self, u1: float, u2: float) -> tuple[float, float, float]:
        c, d = self.mu_sq.real, self.mu_sq.imag
        x, y = u1 * u1 - u2 * u2, 2.0 * u1 * u2
        A = 0.5 * (c * x + d * y)
        B = 0.5 * (c * y - d * x)
        C = 0.5 * self.mu_0 * (u1 * u1 + u2 * u2)
        return A, B, C

    def phi(self, u1: float, u2: float) -> TrigSeries:
        A, B, C = self.coefficients(u1, u2)
        return TrigSeries(self.ell, {0: (C, 0.0), 2 * self.k: (A, B)})

    def transition_number(self) -> complex:
        """Cubic coefficient 2b mu_sq + 4b mu_0 - 3 of the projected equation at lam."""
        return 2.0 * self.b * self.mu_sq + 4.0 * self.b * self.mu_0 - 3.0


def phi_i2(u1, u2, lam, ell, sigma, b, tie_tol=DEFAULT_TIE_TOL) -> TrigSeries:
    return I2Manifold(ell, sigma, b, lam, tie_tol).phi(u1, u2)


def cubic_coefficient(ell, sigma, b, lam, tie_tol=DEFAULT_TIE_TOL) -> complex:
    """P(lam) for an I2 length; equals the transition number at lam = lambda0."""
    return I2Manifold(ell, sigma, b, lam, tie_tol).transition_number()


class I4Manifold:
    """Center manifold for two critical pairs +-k, +-(k+1).

    For k >= 2 the expansion carries modes 2k, 2k+2, 0 and 1 with the
    coefficients c_i + i d_i.  For k = 1 modes 1 and 2 are critical, so only
    the 2k+2 = 4 and constant terms survive (nu coefficients).
    """

    def __init__(self, ell: float, sigma: float, b: float, lam: float,
                 tie_tol: float = DEFAULT_TIE_TOL):
        self.analysis = _analysis(ell, PartitionClass.I4, tie_tol)
        self.ell, self.sigma, self.b, self.lam = ell, sigma, b, lam
        self.k = self.analysis.k
        if self.k == 1:
            nu = nu_coefficients(ell, sigma, b, lam, tie_tol)
            self.c1 = self.d1 = self.c5 = self.d5 = 0.0
            sq2, self.c3, self.c4 = nu.nu1, nu.nu2.real, nu.nu3.real
        else:
            mu = mu_coefficients(ell, sigma, b, lam, tie_tol)
            self.c1, self.d1 = mu.mu1.real, mu.mu1.imag
            self.c5, self.d5 = mu.mu5.real, mu.mu5.imag
            sq2, self.c3, self.c4 = mu.mu2, mu.mu3.real, mu.mu4.real
        self.c2, self.d2 = sq2.real, sq2.imag

    def coefficients(self, u1, u2, u3, u4) -> dict:
        x1, y1 = u1 * u1 - u2 * u2, 2.0 * u1 * u2
        x2, y2 = u3 * u3 - u4 * u4, 2.0 * u3 * u4
        s, t = u1 * u3 + u2 * u4, u1 * u4 - u2 * u3
        return {
            "A1": 0.5 * (self.c1 * x1 + self.d1 * y1),
            "A2": 0.5 * (self.c1 * y1 - self.d1 * x1),
            "B1": 0.5 * (self.c2 * x2 + self.d2 * y2),
            "B2": 0.5 * (self.c2 * y2 - self.d2 * x2),
            "C": 0.5 * (self.c3 * (u1 * u1 + u2 * u2) + self.c4 * (u3 * u3 + u4 * u4)),
            "D1": 0.5 * (self.c5 * s + self.d5 * t),
            "D2": 0.5 * (self.c5 * t - self.d5 * s),
        }

    def phi(self, u1, u2, u3, u4) -> TrigSeries:
        c = self.coefficients(u1, u2, u3, u4)
        k = self.k
        terms = {0: (c["C"], 0.0), 2 * k + 2: (c["B1"], c["B2"])}
        if k >= 2:
            terms[2 * k] = (c["A1"], c["A2"])
            terms[1] = (c["D1"], c["D2"])
        return TrigSeries(self.ell, terms)


def phi_i4(u, lam, ell, sigma, b, tie_tol=DEFAULT_TIE_TOL) -> TrigSeries:
    return I4Manifold(ell, sigma, b, lam, tie_tol).phi(*u)
