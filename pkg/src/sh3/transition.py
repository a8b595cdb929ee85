"""Transition numbers and the continuous / catastrophic / mixed classification.

Single Hopf (class I2): the reduced equation dz/dt = beta z + P z|z|^2 decides
the transition by the sign of Re P.  Double Hopf (class I4): four numbers
A, B, C, D enter the amplitude system for (|z1|^2, |z2|^2) and the verdict
follows a sign table.  Classes I1 and I3 only depend on whether b vanishes.

All transition numbers are evaluated at the critical value lambda0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from scipy.optimize import brentq

from .errors import (
    DegenerateDenominator,
    DegenerateTransitionNumber,
    IndeterminateBranch,
    WrongClass,
)
from .spectrum import (
    DEFAULT_TIE_TOL,
    CriticalAnalysis,
    PartitionClass,
    SystemParams,
    analyze,
    growth_rate,
)

DEGENERACY_TOL = 1e-12


class TransitionType(enum.Enum):
    CONTINUOUS = "continuous"
    CATASTROPHIC = "catastrophic"
    MIXED = "mixed"


@dataclass(frozen=True)
class SingleHopfNumbers:
    P: complex
    beta_k: complex
    k: int


@dataclass(frozen=True)
class DoubleHopfNumbers:
    A: complex
    B: complex
    C: complex
    D: complex
    eta1: float
    eta2: float
    eta3: float
    k: int
    m1: Optional[float] = None
    m2: Optional[float] = None


@dataclass(frozen=True)
class ClassificationReport:
    analysis: CriticalAnalysis
    ttype: TransitionType
    numbers: Union[None, SingleHopfNumbers, DoubleHopfNumbers]
    bifurcation: str
    sigma: float = 0.0
    b: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        a = self.analysis
        out = {
            "ell": a.ell,
            "sigma": self.sigma,
            "b": self.b,
            "partition": a.partition_class.name,
            "k": a.k,
            "multiplicity": a.multiplicity,
            "lambda0": a.lambda0,
            "type": self.ttype.value,
            "numbers": _numbers_dict(self.numbers),
            "bifurcation": self.bifurcation,
        }
        out.update(self.extra)
        return out


def _cdict(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _numbers_dict(numbers) -> Optional[dict]:
    if numbers is None:
        return None
    if isinstance(numbers, SingleHopfNumbers):
        return {"P": _cdict(numbers.P), "beta_k": _cdict(numbers.beta_k), "k": numbers.k}
    return {
        "A": _cdict(numbers.A),
        "B": _cdict(numbers.B),
        "C": _cdict(numbers.C),
        "D": _cdict(numbers.D),
        "eta1": numbers.eta1,
        "eta2": numbers.eta2,
        "eta3": numbers.eta3,
        "m1": numbers.m1,
        "m2": numbers.m2,
        "k": numbers.k,
    }


def _require(ell: float, wanted: PartitionClass, tie_tol: float) -> CriticalAnalysis:
    a = analyze(ell, tie_tol)
    if a.partition_class is not wanted:
        raise WrongClass(f"ell={ell!r} is in {a.partition_class.name}, expected {wanted.name}")
    return a


def _self_interaction(q: float, sigma: float) -> complex:
    """2 beta_k - beta_2k at criticality, for wavenumber q = k rho."""
    return complex(15.0 * q**4 - 6.0 * q**2, 6.0 * sigma * q**3)


def _mean_flow(lambda0: float, b: float) -> float:
    if 1.0 - lambda0 == 0.0:
        raise DegenerateDenominator("1 - lambda0 vanishes")
    return 4.0 * b * b / (1.0 - lambda0)


def single_hopf_numbers(
    ell: float, sigma: float, b: float, tie_tol: float = DEFAULT_TIE_TOL
) -> SingleHopfNumbers:
    a = _require(ell, PartitionClass.I2, tie_tol)
    assert a.lambda0 < 1.0
    q = a.k * a.rho
    P = 2.0 * b * b / _self_interaction(q, sigma) + _mean_flow(a.lambda0, b) - 3.0
    beta = growth_rate(a.k, SystemParams(ell, sigma, b, a.lambda0))
    return SingleHopfNumbers(P=P, beta_k=beta, k=a.k)


def transition_number_2pi(sigma: float, b: float) -> complex:
    """P at ell = 2 pi in the simplified form 2b^2/(9 + 6 i sigma) + 4b^2 - 3."""
    return 2.0 * b * b / complex(9.0, 6.0 * sigma) + 4.0 * b * b - 3.0


def _cross_denominator(k: int, rho: float, sigma: float, sign: float, quadratic: float) -> complex:
    re = (2 * k * k - 2) * rho**2 - (k**4 - 1) * rho**4
    return complex(re, sign * sigma * quadratic * rho**3)


def double_hopf_numbers(
    ell: float,
    sigma: float,
    b: float,
    tie_tol: float = DEFAULT_TIE_TOL,
    eta2_printed: bool = False,
) -> DoubleHopfNumbers:
    """A, B, C, D and eta1..eta3 for a length in I4.

    ``eta2_printed`` switches eta2 to the alternative dispersion factor
    (k^2 + 3k) instead of (3k^2 + 3k); A..D are unaffected.
    """
    a = _require(ell, PartitionClass.I4, tie_tol)
    k, rho, lam0 = a.k, a.rho, a.lambda0
    mean = _mean_flow(lam0, b)
    b2 = b * b
    D = mean + 2.0 * b2 / _self_interaction((k + 1) * rho, sigma) - 3.0
    if k == 1:
        A = complex(mean - 3.0)
        B = C = complex(mean - 6.0)
        eta2 = B.real
    else:
        A = mean + 2.0 * b2 / _self_interaction(k * rho, sigma) - 3.0
        quad = 3 * k * k + 3 * k
        B = mean + 4.0 * b2 / _cross_denominator(k, rho, sigma, +1.0, quad) - 6.0
        C = mean + 4.0 * b2 / _cross_denominator(k, rho, sigma, -1.0, quad) - 6.0
        if eta2_printed:
            alt = _cross_denominator(k, rho, sigma, +1.0, k * k + 3 * k)
            eta2 = (mean + 4.0 * b2 / alt - 6.0).real
        else:
            eta2 = B.real
    m1 = -A.real / B.real if B.real != 0.0 else None
    m2 = -C.real / D.real if D.real != 0.0 else None
    return DoubleHopfNumbers(
        A=A, B=B, C=C, D=D, eta1=A.real, eta2=eta2, eta3=D.real, k=k, m1=m1, m2=m2
    )


def _sign(x: float, what: str) -> int:
    if abs(x) <= DEGENERACY_TOL:
        raise DegenerateTransitionNumber(f"{what} = {x!r} is zero within {DEGENERACY_TOL}")
    return 1 if x > 0 else -1


def classify_single_hopf(P: complex) -> TransitionType:
    if _sign(complex(P).real, "Re P") < 0:
        return TransitionType.CONTINUOUS
    return TransitionType.CATASTROPHIC


def _compare_slopes(m1: float, m2: float) -> int:
    if abs(m1 - m2) <= DEGENERACY_TOL * max(1.0, abs(m1), abs(m2)):
        raise DegenerateTransitionNumber(f"m1 = m2 = {m1!r}")
    return 1 if m1 > m2 else -1


def classify_double_hopf(A: complex, B: complex, C: complex, D: complex) -> TransitionType:
    """General double-Hopf sign table, branch by branch.

    Branches the table leaves without a verdict raise IndeterminateBranch.
    """
    a, bb, c, d = (complex(v).real for v in (A, B, C, D))
    sa, sb = _sign(a, "Re A"), _sign(bb, "Re B")
    sc, sd = _sign(c, "Re C"), _sign(d, "Re D")
    cont, cat, mixed = (
        TransitionType.CONTINUOUS,
        TransitionType.CATASTROPHIC,
        TransitionType.MIXED,
    )

    if sa < 0 and sb < 0:
        if sc < 0 and sd < 0:
            return cont
        if sc < 0 and sd > 0:
            return mixed if a - c > 0 else cat
        if sc > 0 and sd < 0:
            return cont
        return cat

    if sa < 0 and sb > 0:
        if sc < 0 and sd < 0:
            return cont
        m1, m2 = -a / bb, -c / d
        if sc > 0 and sd < 0:
            return cont if _compare_slopes(m1, m2) > 0 else cat
        if sc < 0 and sd > 0:
            if _compare_slopes(m1, m2) < 0:
                return cont
            raise IndeterminateBranch("Re A<0, Re B>0, Re C<0, Re D>0 with m1 > m2")
        return cat

    if sa > 0 and sb < 0:
        if sc < 0 and sd < 0:
            return mixed if d - bb > 0 else cat
        if sc < 0 and sd > 0:
            m1, m2 = -a / bb, -c / d
            if _compare_slopes(m1, m2) > 0:
                return cat
            raise IndeterminateBranch("Re A>0, Re B<0, Re C<0, Re D>0 with m1 < m2")
        if sc > 0 and sd < 0:
            _sign(a - c, "Re A - Re C")
            return mixed if (d - bb) / (a - c) > 0 else cat
        return cat

    return cat


def classify_eta(eta1: float, eta2: float, eta3: float) -> TransitionType:
    """Verdict table in terms of (eta1, eta2, eta3) for I4 lengths with k >= 2."""
    s1, s2, s3 = _sign(eta1, "eta1"), _sign(eta2, "eta2"), _sign(eta3, "eta3")
    if s1 > 0 and s3 > 0:
        if s2 > 0:
            return TransitionType.CATASTROPHIC
        if eta1 * eta3 < eta2 * eta2:
            return TransitionType.CONTINUOUS
        return TransitionType.CATASTROPHIC
    if s1 > 0 and s3 < 0:
        if s2 > 0:
            return TransitionType.CATASTROPHIC
        return TransitionType.MIXED if eta3 > eta2 else TransitionType.CATASTROPHIC
    if s1 < 0 and s3 < 0:
        if s2 > 0:
            if eta1 * eta3 > eta2 * eta2:
                return TransitionType.CONTINUOUS
            return TransitionType.CATASTROPHIC
        return TransitionType.CONTINUOUS
    raise IndeterminateBranch("eta1 < 0 < eta3 is not covered by the eta table")


def _i1_i3_report(a: CriticalAnalysis, sigma: float, b: float) -> ClassificationReport:
    if b != 0.0:
        ttype = TransitionType.MIXED
        side = "u0 < 0" if b > 0 else "u0 > 0"
        desc = (
            f"mixed: data with mode-0 projection {side} returns to 0, the opposite "
            f"sign leaves a neighbourhood of 0 for lambda > lambda0 = 1"
        )
    elif a.partition_class is PartitionClass.I1:
        ttype = TransitionType.CONTINUOUS
        desc = "two stable equilibria bifurcate on lambda > lambda0 = 1"
    else:
        ttype = TransitionType.CONTINUOUS
        desc = (
            "S^2 attractor on lambda > lambda0 = 1 containing two stable equilibria "
            "and an unstable periodic orbit"
        )
    return ClassificationReport(a, ttype, None, desc, sigma, b)


def classify(
    ell: float, sigma: float, b: float, tie_tol: float = DEFAULT_TIE_TOL
) -> ClassificationReport:
    a = analyze(ell, tie_tol)
    cls = a.partition_class
    if cls in (PartitionClass.I1, PartitionClass.I3):
        return _i1_i3_report(a, sigma, b)

    if cls is PartitionClass.I2:
        nums = single_hopf_numbers(ell, sigma, b, tie_tol)
        ttype = classify_single_hopf(nums.P)
        if ttype is TransitionType.CONTINUOUS:
            desc = "stable periodic orbit on lambda > lambda0"
        else:
            desc = "unstable periodic orbit on lambda < lambda0"
        return ClassificationReport(a, ttype, nums, desc, sigma, b)

    nums = double_hopf_numbers(ell, sigma, b, tie_tol)
    if nums.k == 1:
        ttype = (
            TransitionType.CONTINUOUS
            if _sign(nums.eta3, "eta3") < 0
            else TransitionType.CATASTROPHIC
        )
    else:
        ttype = classify_eta(nums.eta1, nums.eta2, nums.eta3)
    if ttype is TransitionType.CONTINUOUS:
        desc = "S^3 attractor on lambda > lambda0"
    elif ttype is TransitionType.MIXED:
        desc = "mixed: part of a neighbourhood returns to 0, the rest leaves on lambda > lambda0"
    else:
        desc = "catastrophic: nearby data leave a neighbourhood of 0 on lambda > lambda0"
    return ClassificationReport(a, ttype, nums, desc, sigma, b)


def lyapunov_number(a1: dict, a2: dict, omega: float) -> float:
    """Planar Hopf bifurcation number from the Taylor coefficients a^i_pq.

    ``a1``/``a2`` map (p, q) to the coefficient of u1^p u2^q in the two
    components of the projected nonlinearity; ``omega`` is Im(conj beta).
    Quadratic terms only enter through 1/omega and are skipped when they
    all vanish.
    """

    def g(d, p, q):
        return d.get((p, q), 0.0)

    eta = 0.75 * math.pi * (g(a1, 3, 0) + g(a2, 0, 3))
    eta += 0.25 * math.pi * (g(a1, 1, 2) + g(a2, 2, 1))
    quad = (
        g(a1, 0, 2) * g(a2, 0, 2) - g(a1, 2, 0) * g(a2, 2, 0),
        g(a1, 1, 1) * g(a1, 2, 0)
        + g(a1, 1, 1) * g(a1, 0, 2)
        - g(a2, 1, 1) * g(a2, 2, 0)
        - g(a2, 1, 1) * g(a2, 0, 2),
    )
    if any(quad):
        eta += math.pi / (2.0 * omega) * quad[0] + math.pi / (4.0 * omega) * quad[1]
    return eta


def taylor_coefficients_2pi(sigma: float, b: float) -> tuple[dict, dict]:
    """a^i_pq entering the Lyapunov number at ell = 2 pi (quadratic ones vanish)."""
    diag = -0.75 + b * b + 0.5 * b * b / (9.0 + 4.0 * sigma * sigma)
    return {(3, 0): diag, (1, 2): diag}, {(0, 3): diag, (2, 1): diag}


def lyapunov_number_2pi(sigma: float, b: float) -> float:
    a1, a2 = taylor_coefficients_2pi(sigma, b)
    return lyapunov_number(a1, a2, omega=sigma)


def critical_sigma(
    b: float, ell: float = 2.0 * math.pi, bracket: tuple[float, float] = (0.0, 100.0)
) -> float:
    """Dispersion at which Re P changes sign for fixed b (class I2 lengths)."""

    def re_p(s):
        return single_hopf_numbers(ell, s, b).P.real

    return brentq(re_p, *bracket, xtol=1e-14, rtol=1e-14)
