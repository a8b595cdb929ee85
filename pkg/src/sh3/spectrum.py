"""Linear spectrum of the dispersive Swift-Hohenberg operator on a periodic domain.

The linearisation about u = 0 is diagonal in the Fourier basis exp(i n rho x),
rho = 2 pi / ell, with eigenvalues

    beta_n(lam) = lam - (1 - (n rho)^2)^2 - i sigma (n rho)^3.

The modes whose real part is largest at lam = 0 are the first to lose
stability.  Their number m(ell) sorts domain lengths into four classes:

    I1  {0}                 real simple        m = 1
    I2  {+-k}               one complex pair   m = 2
    I3  {0, +-1}            real + pair        m = 3  (ell = 2 pi / sqrt 2)
    I4  {+-k, +-(k+1)}      two complex pairs  m = 4  (discrete lengths)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousPartition, InvalidParameters

DEFAULT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """One problem instance: domain length, dispersion, quadratic coefficient, control."""

    ell: float
    sigma: float = 0.0
    b: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        for name in ("ell", "sigma", "b", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
        if self.ell <= 0:
            raise InvalidParameters(f"ell must be positive, got {self.ell!r}")

    @property
    def rho(self) -> float:
        return 2.0 * math.pi / self.ell

    def with_lambda(self, lam: float) -> "SystemParams":
        return SystemParams(self.ell, self.sigma, self.b, lam)


class PartitionClass(enum.Enum):
    I1 = 1
    I2 = 2
    I3 = 3
    I4 = 4


@dataclass(frozen=True)
class CriticalAnalysis:
    """Which modes go unstable first for a given domain length.

    ``k`` is the critical wavenumber (0 for I1 and I3, the lower of the pair
    for I4).  ``modes`` lists the nonnegative representatives of the critical
    set; negative indices are implied by conjugate symmetry.
    """

    ell: float
    partition_class: PartitionClass
    k: int
    multiplicity: int
    lambda0: float
    modes: tuple[int, ...]

    @property
    def rho(self) -> float:
        return 2.0 * math.pi / self.ell


def growth_rate(n: int, p: SystemParams) -> complex:
    q = n * p.rho
    return complex(p.lam - (1.0 - q * q) ** 2, -p.sigma * q**3)


def growth_rates(n, ell: float, sigma: float, lam: float) -> np.ndarray:
    """Vectorised ``growth_rate`` over an integer array of mode numbers."""
    q = np.asarray(n, dtype=float) * (2.0 * math.pi / ell)
    return lam - (1.0 - q * q) ** 2 - 1j * sigma * q**3


def search_bound(ell: float) -> int:
    # Re beta_n(0) decreases strictly once n rho > 1, i.e. n > ell / (2 pi).
    return math.ceil(ell / math.pi) + 2


def max_real_indices(ell: float, tie_tol: float = DEFAULT_TIE_TOL) -> set[int]:
    """All n whose Re beta_n(0) ties the maximum to relative tolerance ``tie_tol``."""
    if not ell > 0:
        raise InvalidParameters(f"ell must be positive, got {ell!r}")
    if not tie_tol > 0:
        raise InvalidParameters(f"tie_tol must be positive, got {tie_tol!r}")
    bound = search_bound(ell)
    n = np.arange(-bound, bound + 1)
    re = growth_rates(n, ell, 0.0, 0.0).real
    top = re.max()
    band = tie_tol * max(1.0, abs(top))
    return {int(i) for i in n[re >= top - band]}


def critical_lambda(k: int, ell: float) -> float:
    q = k * 2.0 * math.pi / ell
    return (1.0 - q * q) ** 2


def analyze(ell: float, tie_tol: float = DEFAULT_TIE_TOL) -> CriticalAnalysis:
    idx = max_real_indices(ell, tie_tol)
    pos = sorted(i for i in idx if i > 0)
    symmetric = all(-i in idx for i in pos) and all(-i in idx for i in idx if i < 0)

    if idx == {0}:
        return CriticalAnalysis(ell, PartitionClass.I1, 0, 1, 1.0, (0,))
    if idx == {-1, 0, 1}:
        return CriticalAnalysis(ell, PartitionClass.I3, 0, 3, 1.0, (0, 1))
    if symmetric and 0 not in idx:
        if len(pos) == 1:
            k = pos[0]
            return CriticalAnalysis(ell, PartitionClass.I2, k, 2, critical_lambda(k, ell), (k,))
        if len(pos) == 2 and pos[1] == pos[0] + 1:
            k = pos[0]
            return CriticalAnalysis(
                ell, PartitionClass.I4, k, 4, critical_lambda(k, ell), (k, k + 1)
            )
    raise AmbiguousPartition(
        f"maximal set {sorted(idx)} at ell={ell!r} matches no partition class; "
        f"tie_tol={tie_tol!r} may be too large"
    )


def i4_length(k: int) -> float:
    """Domain length at which modes k and k+1 destabilise together."""
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k!r}")
    return 2.0 * math.pi * math.sqrt((k * k + (k + 1) ** 2) / 2.0)


I3_LENGTH = 2.0 * math.pi / math.sqrt(2.0)
