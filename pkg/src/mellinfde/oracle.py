"""Independent reference solutions and fractional operators.

Two unrelated routes to the same solutions keep the transform solver
honest: Mittag-Leffler convolution integrals for one- and two-derivative
problems, and a Grünwald-Letnikov stepper that needs no special functions
at all. Riemann-Liouville integrals and Caputo derivatives by quadrature
round out the toolkit for operator-level identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .errors import StepSizeError
from .quadrature import graded_edges, integrate_refining
from .solver import FdeProblem
from .specfun import mittag_leffler

__all__ = [
    "TimeSeries",
    "caputo_derivative",
    "gl_stepper",
    "ml_convolution_solution",
    "ml_solution_for_problem",
    "ml_two_term_solution",
    "rl_integral",
]


@dataclass(frozen=True)
class TimeSeries:
    """Real sample path on strictly increasing positive times."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("TimeSeries: times and values must be equal-length 1-D")
        if times.size and (times[0] <= 0.0 or np.any(np.diff(times) <= 0.0)):
            raise ValueError("TimeSeries: times must be positive and strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-D array")
    if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be positive and strictly increasing")
    return times


def _singular_convolution(weight, a: float, f, t: float, *, abs_tol: float,
                          breakpoints=(), support=None, what: str = "convolution") -> float:
    """integral_0^t u^{a-1} W(u) f(t-u) du with the endpoint made smooth.

    The substitution v = u^a absorbs the algebraic singularity exactly;
    weight W (None means 1) and f are evaluated vectorized on the nodes.
    `support` truncates where f's argument exceeds its support; breakpoints
    of f become interior panel edges.
    """
    inv_a = 1.0 / a
    u_lo = 0.0
    if support is not None and t > support:
        u_lo = t - support
    v_lo = u_lo ** a
    v_hi = t ** a
    if not v_hi > v_lo:
        return 0.0

    if v_lo == 0.0:
        # W(v^{1/a}) and f(t - v^{1/a}) keep fractional-power derivative
        # blowups at v = 0 even after the substitution
        edges = graded_edges(v_lo, v_hi, toward="left", base=16)
    else:
        edges = np.linspace(v_lo, v_hi, 9)

    cuts = []
    for tb in breakpoints:
        ub = t - float(tb)
        if u_lo < ub < t:
            cuts.append(ub ** a)
    if cuts:
        edges = np.union1d(edges, np.asarray(cuts))

    def integrand(v: np.ndarray) -> np.ndarray:
        u = v ** inv_a
        tau = np.maximum(t - u, 0.0)
        fv = np.asarray(f(tau), dtype=float)
        if weight is not None:
            fv = fv * weight(u)
        return fv * inv_a

    return integrate_refining(integrand, edges, abs_tol=abs_tol,
                              rel_tol=1e-9, what=what)


def _green_solution(a: float, delta: float, lam: float, forcing, times,
                    what: str) -> TimeSeries:
    times = _check_times(times)
    support = getattr(forcing, "t_max", None)
    breaks = getattr(forcing, "breakpoints", ())

    if lam == 0.0:
        # E_{delta,a}(0) = 1/Gamma(a): plain fractional integral of f
        values = [rl_integral(forcing, a, t) for t in times]
        return TimeSeries(times, np.array(values))

    def weight(u: np.ndarray) -> np.ndarray:
        return np.real(mittag_leffler(delta, a, -lam * u ** delta))

    values = [
        _singular_convolution(weight, a, forcing, float(t), abs_tol=1e-7,
                              breakpoints=breaks, support=support, what=what)
        for t in times
    ]
    return TimeSeries(times, np.array(values))


def ml_convolution_solution(alpha: float, lam: float, forcing, times) -> TimeSeries:
    """Solution of D^alpha x + lam x = f with quiescent start:
    x(t) = integral_0^t u^{alpha-1} E_{alpha,alpha}(-lam u^alpha) f(t-u) du,
    pointwise absolute tolerance 1e-6."""
    alpha = float(alpha)
    if not (np.isfinite(alpha) and alpha > 0.0):
        raise ValueError("ml_convolution_solution: alpha must be positive")
    return _green_solution(alpha, alpha, float(lam), forcing, times,
                           what="one-derivative reference solution")


def ml_two_term_solution(alpha: float, beta: float, lam: float, forcing,
                         times) -> TimeSeries:
    """Solution of D^alpha x + lam D^beta x = f with quiescent start:
    x(t) = integral_0^t u^{alpha-1} E_{alpha-beta,alpha}(-lam u^{alpha-beta})
    f(t-u) du; requires alpha > beta >= 0."""
    alpha = float(alpha)
    beta = float(beta)
    if not (np.isfinite(alpha) and np.isfinite(beta) and alpha > beta >= 0.0):
        raise ValueError("ml_two_term_solution: need alpha > beta >= 0")
    return _green_solution(alpha, alpha - beta, float(lam), forcing, times,
                           what="two-derivative reference solution")


def ml_solution_for_problem(problem: FdeProblem, times) -> TimeSeries:
    """Map a one- or two-term problem onto the convolution forms.

    The closed forms assume the highest-order coefficient is 1 and, for two
    terms, that the lower order trails; general problems are normalized by
    dividing through by the leading coefficient. Problems with more than
    two terms have no shipped closed form and are rejected.
    """
    terms = sorted(problem.terms, key=lambda trm: trm.order, reverse=True)
    if len(terms) > 2:
        raise ValueError(
            "no closed-form reference for problems with more than two terms"
        )
    lead = terms[0]
    if lead.coefficient == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    if len(terms) == 1:
        series = ml_convolution_solution(lead.order, 0.0, problem.forcing, times)
    else:
        low = terms[1]
        series = ml_two_term_solution(
            lead.order, low.order, low.coefficient / lead.coefficient,
            problem.forcing, times,
        )
    return TimeSeries(series.times, series.values / lead.coefficient)


def rl_integral(f, alpha: float, t: float, *, abs_tol: float = 1e-8) -> float:
    """Riemann-Liouville integral (1/Gamma(alpha)) integral_0^t
    f(xi) (t-xi)^{alpha-1} dxi, by the same smoothing substitution.

    Returns 0 for t <= 0 (causal extension), which keeps compositions
    like the Caputo inversion well-defined near the origin."""
    alpha = float(alpha)
    if not (np.isfinite(alpha) and alpha > 0.0):
        raise ValueError("rl_integral: alpha must be positive")
    t = float(t)
    if t <= 0.0:
        return 0.0
    raw = _singular_convolution(
        None, alpha, f, t, abs_tol=abs_tol * max(float(_gamma(alpha)), 0.25),
        breakpoints=getattr(f, "breakpoints", ()),
        support=getattr(f, "t_max", None),
        what="fractional integral",
    )
    return raw / float(_gamma(alpha))


def _fd_derivative(f, order: int):
    """6th-order central finite differences for the first two derivatives.

    Assumes f is smooth in a neighborhood of the evaluation points; used
    only as the fallback when no analytic derivative is supplied."""
    if order == 0:
        return lambda x: np.asarray(f(x), dtype=float)
    if order == 1:
        def d1(x):
            x = np.asarray(x, dtype=float)
            h = 5e-3 * max(1.0, float(np.max(np.abs(x), initial=0.0)))
            return (45.0 * (f(x + h) - f(x - h))
                    - 9.0 * (f(x + 2 * h) - f(x - 2 * h))
                    + (f(x + 3 * h) - f(x - 3 * h))) / (60.0 * h)
        return d1
    if order == 2:
        def d2(x):
            x = np.asarray(x, dtype=float)
            h = 1e-2 * max(1.0, float(np.max(np.abs(x), initial=0.0)))
            return (2.0 * (f(x + 3 * h) + f(x - 3 * h))
                    - 27.0 * (f(x + 2 * h) + f(x - 2 * h))
                    + 270.0 * (f(x + h) + f(x - h))
                    - 490.0 * f(x)) / (180.0 * h * h)
        return d2
    raise ValueError("finite-difference fallback supports orders 1 and 2 only")


def caputo_derivative(f, alpha: float, t: float, *, derivative=None) -> float:
    """Caputo derivative as I^{n-alpha} f^{(n)} with n = floor(alpha) + 1.

    `derivative`, when given, is the analytic n-th derivative of f;
    otherwise a finite-difference approximation of f^{(n)} is used
    (adequate for smooth f at the 1e-5 identity tolerances)."""
    alpha = float(alpha)
    if not (np.isfinite(alpha) and alpha > 0.0):
        raise ValueError("caputo_derivative: alpha must be positive")
    n = math.floor(alpha) + 1
    dfn = derivative if derivative is not None else _fd_derivative(f, n)
    return rl_integral(dfn, n - alpha, t)


def gl_stepper(problem: FdeProblem, h: float, t_end: float) -> TimeSeries:
    """Grünwald-Letnikov time stepping for quiescent initial state.

    Each D^{alpha_i} is replaced by h^{-alpha_i} sum_j w_j^{(i)} x_{n-j}
    with w_0 = 1, w_j = w_{j-1} (j-1-alpha_i)/j; the per-term weights
    collapse into one combined kernel. First-order accurate in h. Uses no
    special functions, which is what makes it an independent oracle.
    """
    h = float(h)
    t_end = float(t_end)
    if not (h > 0.0 and np.isfinite(h)):
        raise ValueError("gl_stepper: h must be positive")
    steps = int(round(t_end / h))
    if steps < 1:
        raise ValueError("gl_stepper: t_end must allow at least one step")

    j = np.arange(1, steps + 1, dtype=float)
    combined = np.zeros(steps + 1)
    for term in problem.terms:
        weights = np.empty(steps + 1)
        weights[0] = 1.0
        np.cumprod((j - 1.0 - term.order) / j, out=weights[1:])
        combined += term.coefficient * h ** (-term.order) * weights

    lead = combined[0]
    if not np.isfinite(lead) or lead == 0.0:
        raise StepSizeError(
            f"leading coefficient sum(lambda_i h^-alpha_i) = {lead!r} "
            f"at h = {h:g}; choose a different step"
        )

    times = h * np.arange(1, steps + 1)
    force = np.asarray(problem.forcing(times), dtype=float)

    # history kept reversed so every step's dot product is contiguous
    buf = np.zeros(steps + 1)
    for n in range(1, steps + 1):
        acc = np.dot(combined[1:n + 1], buf[steps - n + 1: steps + 1])
        buf[steps - n] = (force[n - 1] - acc) / lead
    return TimeSeries(times, buf[:steps][::-1].copy())
