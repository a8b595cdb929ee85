"""Independent reference computations used by the tests.

Nothing here imports the package; every quantity is rebuilt from the
dispersion relation or from closed forms.
"""

import cmath
import itertools
import math

import numpy as np


def beta(n, ell, sigma, lam):
    q = 2 * math.pi * n / ell
    return complex(lam - (1 - q * q) ** 2, -sigma * q**3)


def re_p_2pi(sigma, b):
    """Real part of the cubic coefficient at ell = 2 pi (closed form)."""
    return 2 * b * b * 9 / (81 + 36 * sigma**2) + 4 * b * b - 3


def im_p_2pi(sigma, b):
    return -12 * sigma * b * b / (81 + 36 * sigma**2)


def brute_force_argmax(ell, n_max=200):
    vals = {n: beta(n, ell, 0, 0).real for n in range(-n_max, n_max + 1)}
    top = max(vals.values())
    return sorted(n for n, v in vals.items() if v >= top - 1e-9 * max(1, abs(top)))


def quadratic_manifold(ell, sigma, b, lam, modes, z, x, drop=()):
    """Quadratic center-manifold term from the homological equation.

    ``modes`` are the positive critical wavenumbers, ``z`` their complex
    amplitudes.  Products of b u^2 landing on a critical mode (or on a mode
    in ``drop``) are left out; every other term gets the factor
    1 / (sum of monomial eigenvalues - beta_m).
    """
    rho = 2 * math.pi / ell
    J = len(modes)
    eig = []
    for k in modes:
        bk = beta(k, ell, sigma, lam)
        eig += [bk, bk.conjugate()]
    linear = []
    for j, k in enumerate(modes):
        e = [0] * (2 * J)
        e[2 * j] = 1
        linear.append((tuple(e), k))
        e = [0] * (2 * J)
        e[2 * j + 1] = 1
        linear.append((tuple(e), -k))
    vals = []
    for zj in z:
        vals += [zj, complex(zj).conjugate()]
    crit = set(modes) | {-k for k in modes}
    out = np.zeros_like(np.asarray(x, dtype=float), dtype=complex)
    for (e1, m1), (e2, m2) in itertools.product(linear, repeat=2):
        m = m1 + m2
        if m in crit or abs(m) in drop:
            continue
        expo = [a + c for a, c in zip(e1, e2)]
        lam_mono = sum(p * ev for p, ev in zip(expo, eig))
        h = b / (lam_mono - beta(m, ell, sigma, lam))
        mono = np.prod([v**p for v, p in zip(vals, expo)])
        out = out + h * mono * np.exp(1j * m * rho * np.asarray(x))
    return out


def radial_cycle(lam, re_p):
    """Cycle radius of r' = lam r + (re_p / 4) r^3."""
    return 2 * math.sqrt(-lam / re_p)


def dft_modes(values, atol):
    c = np.fft.rfft(values) / len(values)
    return {m for m, v in enumerate(c) if abs(v) > atol}


def separable_logistic_cubic(u0, a, t):
    """Closed-form solution of u' = a u - u^3."""
    return u0 * math.exp(a * t) / math.sqrt(1 + u0 * u0 * (math.exp(2 * a * t) - 1) / a)


def unit(theta):
    return cmath.exp(1j * theta)
