"""Independent high-precision reference oracles used to freeze expected values.

Everything here is deliberately written against mpmath primitives only, so the
reference path shares no code with the package under test.  The frozen
constants sprinkled through the test modules were produced by these functions
(see gen_frozen_values.py next to this file); the cheap ones are also called
live at test time.
"""

from __future__ import annotations

import mpmath as mp


def stirling_lngamma(z, dps: int = 50):
    """ln Gamma(z) by the Stirling series with recurrence shift.

    Shifts z up until Re z is large enough for the asymptotic series, then
    subtracts the accumulated log factors.  Independent of mpmath.gamma.
    """
    with mp.workdps(dps + 20):
        z = mp.mpc(z)
        shift = mp.mpc(0)
        # Push the argument far enough right that the Bernoulli tail is
        # below the working precision.
        while mp.re(z) < 2 * dps:
            shift += mp.log(z)
            z = z + 1
        s = (z - mp.mpf(1) / 2) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
        zk = z
        for n in range(1, 60):
            b = mp.bernoulli(2 * n)
            term = b / ((2 * n) * (2 * n - 1) * zk)
            s += term
            zk *= z * z
            if abs(term) < mp.mpf(10) ** (-(dps + 15)):
                break
        return s - shift


def gamma_ref(z, dps: int = 50):
    """Gamma(z) from the Stirling/recurrence oracle."""
    with mp.workdps(dps + 10):
        return mp.exp(stirling_lngamma(z, dps=dps))


def ml_series_ref(alpha, beta, z, terms: int = 250, dps: int = 60):
    """Mittag-Leffler E_{alpha,beta}(z) by brute-force series in mpmath.

    Valid wherever `terms` steps get past the peak term; the callers keep
    |z|**(1/alpha) small enough that this is guaranteed.
    """
    with mp.workdps(dps):
        alpha = mp.mpf(alpha)
        beta = mp.mpf(beta)
        z = mp.mpc(z)
        s = mp.mpc(0)
        for k in range(terms):
            s += z**k / mp.gamma(alpha * k + beta)
        return s


def shift_entry_quadrature_ref(n, alpha, b, dps: int = 40):
    """a_sk(alpha) for s-k = n by direct quadrature of the defining integral."""
    with mp.workdps(dps):
        alpha = mp.mpf(alpha)
        b = mp.mpf(b)
        c = alpha - 1j * mp.pi * n / b
        return mp.quad(lambda xi: mp.e ** (-c * xi), [-b, 0, b])


def coefficient_c_ref(gamma, alpha, dps: int = 50):
    """Gamma(1-gamma+alpha)/Gamma(1-gamma) from the Stirling oracle."""
    with mp.workdps(dps + 10):
        g = mp.mpc(gamma)
        a = mp.mpf(alpha)
        return mp.exp(stirling_lngamma(1 - g + a, dps=dps) - stirling_lngamma(1 - g, dps=dps))


def assembly_fixture_ref(lam, alpha, lam0, rho, delta_eta, m, dps: int = 40):
    """Dense matrix for {lam D^alpha + lam0 I} on the (rho, delta_eta, m) grid.

    Entry (s, j) = lam * C(gamma_s, alpha) * a_{s-j}(alpha) / (2b) + lam0 * delta_sj,
    built entirely from mpmath closed forms.
    """
    with mp.workdps(dps):
        b = mp.pi / mp.mpf(delta_eta)
        rows = []
        for s in range(-m, m + 1):
            gamma_s = mp.mpf(rho) + 1j * s * mp.mpf(delta_eta)
            c = coefficient_c_ref(gamma_s, alpha, dps=dps)
            row = []
            for j in range(-m, m + 1):
                n = s - j
                a_n = 2 * b * (-1) ** n * mp.sinh(b * mp.mpf(alpha)) / (
                    b * mp.mpf(alpha) - 1j * mp.pi * n
                )
                entry = lam * c * a_n / (2 * b)
                if s == j:
                    entry += lam0
                row.append(entry)
            rows.append(row)
        return rows
