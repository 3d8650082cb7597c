"""Assembly and solution of the transform-domain linear system.

A problem sum_i lambda_i D^{alpha_i} x = f with quiescent initial state
turns, on the sampled vertical line, into M X = F with

    M[s, j] = sum_i lambda_i C(gamma_s, alpha_i) a_{s-j}(alpha_i) / (2 b),
    C(gamma, alpha) = Gamma(1 - gamma + alpha) / Gamma(1 - gamma),

where a_n are the order-shift entries of the sampling line. Each term
contributes a Toeplitz block scaled rowwise by C; an order-0 term
degenerates to lambda times the identity exactly. F is the forward
transform of the forcing on the same line.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import lapack
from scipy.special import loggamma

from .errors import (
    FitFailureError,
    IllConditioningWarning,
    ResidualError,
    SingularMatrixError,
    SymmetryViolationError,
    ValidationError,
)
from .forcing import Forcing
from .mellin import (
    MellinGrid,
    MellinSpectrum,
    _shift_entries,
    estimate_strip,
    forward_transform,
)

__all__ = [
    "Diagnostic",
    "FdeProblem",
    "FdeTerm",
    "SolverReport",
    "assemble_system",
    "coefficient_C",
    "solve_fde",
    "solve_linear",
    "validate_problem",
]

INTEGER_POLE_TOL = 1e-9
CONDITION_WARN_THRESHOLD = 1e12
RESIDUAL_LIMIT = 1e-8
SYMMETRY_LIMIT = 1e-8


@dataclass(frozen=True)
class FdeTerm:
    """One term lambda * D^alpha x; alpha = 0 means the undifferentiated term."""

    coefficient: float
    order: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.order) and self.order >= 0.0):
            raise ValueError("term order must be finite and >= 0")
        if not np.isfinite(self.coefficient):
            raise ValueError("term coefficient must be finite")


@dataclass(frozen=True)
class FdeProblem:
    """Terms plus forcing.  Orders must be distinct; degeneracy checks that
    need a sampling line (e.g. no term of positive order) live in
    validate_problem so assembly can still be unit tested on edge cases."""

    terms: tuple[FdeTerm, ...]
    forcing: Forcing

    def __init__(self, terms: Sequence[FdeTerm], forcing: Forcing):
        terms = tuple(terms)
        if not terms:
            raise ValueError("problem needs at least one term")
        orders = [t.order for t in terms]
        if len(set(orders)) != len(orders):
            raise ValueError("term orders must be distinct")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "forcing", forcing)

    @property
    def max_order(self) -> float:
        return max(t.order for t in self.terms)


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; severity is 'error' or 'warning'."""

    severity: str
    code: str
    message: str


@dataclass(frozen=True)
class SolverReport:
    """Solve outcome: spectrum on the line plus linear-algebra health figures."""

    spectrum: MellinSpectrum
    grid: MellinGrid
    condition_estimate: float
    residual_norm: float


def coefficient_C(gamma: complex, alpha: float) -> complex:
    """Gamma(1 - gamma + alpha) / Gamma(1 - gamma); exactly 1 for alpha = 0."""
    if alpha == 0.0:
        return 1.0 + 0.0j
    g = complex(gamma)
    return complex(np.exp(loggamma(1.0 - g + alpha) - loggamma(1.0 - g)))


def _coefficient_column(line: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 0.0:
        return np.ones(line.shape, dtype=complex)
    return np.exp(loggamma(1.0 - line + alpha) - loggamma(1.0 - line))


def _near_positive_integer(x: float, tol: float = INTEGER_POLE_TOL) -> bool:
    if x < 0.5:
        return False
    return abs(x - round(x)) <= tol


def validate_problem(problem: FdeProblem, grid: MellinGrid) -> list[Diagnostic]:
    """Screen a problem/line pairing.  Returns diagnostics, never raises;
    callers decide whether an 'error' entry aborts the run."""
    diags: list[Diagnostic] = []
    rho = grid.rho
    orders = [t.order for t in problem.terms]
    amax = max(orders)

    if amax <= 0.0:
        diags.append(Diagnostic(
            "error", "no-derivative-term",
            "every term has order 0; the problem is algebraic, not differential",
        ))
        return diags

    # (a) the line must stay right of the solution's analyticity strip edge:
    # x ~ t^{amax + ...} near 0 shifts the strip by the integer ceiling n.
    n = math.ceil(amax)
    if rho - amax <= -float(n):
        diags.append(Diagnostic(
            "error", "line-below-solution-strip",
            f"rho = {rho:g} lies at or below the solution strip for "
            f"max order {amax:g} (need rho > {amax - n:g})",
        ))

    # (b) fractional-part screening: moments of the forced response decay
    # slowly once rho reaches the fractional part of any order, 0 included.
    offending = sorted(a for a in orders if rho >= a - math.floor(a))
    if offending:
        listed = ", ".join(f"{a:g}" for a in offending)
        diags.append(Diagnostic(
            "warning", "line-at-order-fractional-part",
            f"rho = {rho:g} is >= the fractional part of order(s) {listed}; "
            "reconstruction may lose accuracy at large t",
        ))

    # (c) the forcing transform must converge on the chosen line.
    if not problem.forcing.is_zero:
        try:
            strip = estimate_strip(problem.forcing, problem.forcing.t_max)
        except FitFailureError as exc:
            diags.append(Diagnostic(
                "error", "forcing-strip-unknown",
                f"could not bound the forcing transform strip: {exc}",
            ))
        else:
            if not strip.contains(rho):
                diags.append(Diagnostic(
                    "error", "line-outside-forcing-strip",
                    f"rho = {rho:g} is outside the forcing transform strip "
                    f"(lower edge {strip.lower:g})",
                ))

    # (d) Gamma poles on the real node k = 0: 1 - rho or 1 - rho + alpha
    # at a nonpositive integer makes C blow up there.
    if _near_positive_integer(rho):
        diags.append(Diagnostic(
            "error", "gamma-pole-on-line",
            f"rho = {rho:g} places a Gamma pole on the real node",
        ))
    for a in orders:
        if a > 0.0 and _near_positive_integer(rho - a):
            diags.append(Diagnostic(
                "error", "gamma-pole-on-line",
                f"rho - alpha = {rho - a:g} places a Gamma pole on the real "
                f"node for the order-{a:g} term",
            ))

    return diags


def assemble_system(problem: FdeProblem, grid: MellinGrid) -> tuple[np.ndarray, np.ndarray]:
    """Build (M, F).  Rows/columns follow grid.line() ordering k = -m..m."""
    size = grid.size
    m = grid.m
    line = grid.line()
    matrix = np.zeros((size, size), dtype=complex)
    idx = np.arange(size)

    for term in problem.terms:
        if term.order == 0.0:
            matrix[idx, idx] += term.coefficient
            continue
        cvec = _coefficient_column(line, term.order)
        col = _shift_entries(idx, term.order, grid)
        row = _shift_entries(-idx, term.order, grid)
        toep = scipy.linalg.toeplitz(col, row)
        matrix += (term.coefficient / (2.0 * grid.b)) * cvec[:, None] * toep

    if problem.forcing.is_zero:
        rhs = np.zeros(size, dtype=complex)
    else:
        # transform the unit-amplitude shape and scale afterwards: the
        # amplitude then multiplies the rhs (and, by LU linearity, the
        # solution) exactly instead of re-steering the quadrature
        forcing = problem.forcing
        forced = forward_transform(
            forcing.unit(), forcing.t_max, grid,
            breakpoints=forcing.breakpoints,
        )
        rhs = forcing.amplitude * forced.values
    return matrix, rhs


def solve_linear(matrix: np.ndarray, rhs: np.ndarray, *, details: bool = False):
    """LU solve with a 1-norm condition estimate and residual check.

    Returns the solution vector, or (solution, condition_estimate,
    relative_residual) when details=True.  Warns IllConditioningWarning
    above CONDITION_WARN_THRESHOLD; exact singularity raises.
    """
    matrix = np.asarray(matrix, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    anorm = np.linalg.norm(matrix, 1)
    try:
        with warnings.catch_warnings():
            # scipy warns on an exactly zero pivot; the diagonal check
            # below turns that case into an exception
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(matrix)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularMatrixError(f"LU factorization failed: {exc}") from exc
    if np.any(np.diagonal(lu) == 0.0):
        raise SingularMatrixError("system matrix is exactly singular")

    x = scipy.linalg.lu_solve((lu, piv), rhs)

    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond):
        raise SingularMatrixError("condition estimation failed")
    condition = float(1.0 / rcond) if rcond > 0.0 else np.inf
    if condition > CONDITION_WARN_THRESHOLD:
        warnings.warn(
            f"system condition estimate {condition:.3e} exceeds "
            f"{CONDITION_WARN_THRESHOLD:.0e}; solution digits are suspect",
            IllConditioningWarning,
            stacklevel=2,
        )

    rhs_norm = np.linalg.norm(rhs, np.inf)
    res = np.linalg.norm(matrix @ x - rhs, np.inf)
    residual = float(res / rhs_norm) if rhs_norm > 0.0 else float(res)
    if residual > RESIDUAL_LIMIT:
        raise ResidualError(
            f"linear-system residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e}"
        )

    if details:
        return x, condition, residual
    return x


def solve_fde(problem: FdeProblem, grid: MellinGrid) -> SolverReport:
    """Validate, assemble, solve; raises on error diagnostics and on a
    solution that fails the residual or conjugate-symmetry contract."""
    diags = validate_problem(problem, grid)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ValidationError("; ".join(d.message for d in errors))

    matrix, rhs = assemble_system(problem, grid)
    values, condition, residual = solve_linear(matrix, rhs, details=True)

    # real time-domain solutions force X(conj gamma) = conj X(gamma)
    scale = max(1.0, float(np.max(np.abs(values))))
    sym = np.max(np.abs(values - np.conj(values[::-1]))) / scale
    if sym > SYMMETRY_LIMIT:
        raise SymmetryViolationError(
            f"solution spectrum breaks conjugate symmetry by {sym:.3e}"
        )

    spectrum = MellinSpectrum(grid=grid, values=values)
    return SolverReport(
        spectrum=spectrum,
        grid=grid,
        condition_estimate=condition,
        residual_norm=residual,
    )
