"""Independent reference computations used across the test suite."""

import math

import mpmath
import numpy as np

from tfqkd.decoy_bounds import INTENSITY_NAMES, GainsTable, IntensityTriple

N_MAX = 12


def poisson_weights(x, n_max=N_MAX):
    return np.array([math.exp(-x) * x**n / math.factorial(n) for n in range(n_max + 1)])


def gains_from_yields(yields, s: IntensityTriple) -> GainsTable:
    """Brute-force double-Poisson sum ``Q^{ab} = sum_nm P_a(n) P_b(m) Y_nm``.

    ``yields`` has shape ``(N_MAX + 1, N_MAX + 1, 2)``.
    """
    q = np.empty((3, 3, 2))
    for i, a in enumerate(INTENSITY_NAMES):
        pa = poisson_weights(float(s[a]))
        for j, b in enumerate(INTENSITY_NAMES):
            pb = poisson_weights(float(s[b]))
            for o in range(2):
                q[i, j, o] = sum(
                    pa[n] * pb[m] * yields[n, m, o] for n in range(N_MAX + 1) for m in range(N_MAX + 1)
                )
    return GainsTable(q)


def random_yields(rng):
    y10 = rng.uniform(0, 1, size=(N_MAX + 1, N_MAX + 1))
    y01 = rng.uniform(0, 1, size=y10.shape) * (1 - y10)
    return np.stack([y10, y01], axis=-1)


def random_triple(rng, mu_max=0.2):
    mu = rng.uniform(0.02, mu_max)
    nu = rng.uniform(0.05, 0.9) * mu
    omega = rng.uniform(0.0, 0.9) * nu if rng.random() < 0.8 else 0.0
    return IntensityTriple(mu, nu, omega)


def mp_coeff(alpha2, n, dps=50):
    with mpmath.workdps(dps):
        a2 = mpmath.mpf(alpha2)
        return mpmath.exp(-a2 / 2) * mpmath.sqrt(a2) ** n / mpmath.sqrt(mpmath.factorial(n))


def mp_residuals(alpha2, cutoff=60, dps=50):
    """``(sum_even c)^2 - c0^2 - 2 c0 c2`` and ``(sum_odd c)^2 - c1^2`` in high precision."""
    with mpmath.workdps(dps):
        c = [mp_coeff(alpha2, n, dps) for n in range(cutoff + 1)]
        even = sum(c[0::2])
        odd = sum(c[1::2])
        return even**2 - c[0] ** 2 - 2 * c[0] * c[2], odd**2 - c[1] ** 2
