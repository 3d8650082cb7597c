"""Composite Gauss-Legendre quadrature with panel doubling.

The same engine serves the Mittag-Leffler kernel integrals and the
convolution oracles: integrands are evaluated on flat node arrays so a
whole batch of integrals sharing one node layout costs a single call.
Endpoint singularities are handled by geometric panel grading rather
than by special weights; algebraic endpoints should additionally be
substituted away by the caller where the exponent is harsh.
"""

from __future__ import annotations

from typing import Callable, Literal

import numpy as np

from .errors import QuadratureError

GAUSS_ORDER = 16
_GX, _GW = np.polynomial.legendre.leggauss(GAUSS_ORDER)


def panel_nodes(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights for the panels between edges.

    edges is a sorted 1-D array of panel boundaries; returns flat arrays
    of length (len(edges)-1) * GAUSS_ORDER.
    """
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    pts = a[:, None] + half[:, None] * (_GX[None, :] + 1.0)
    wts = half[:, None] * _GW[None, :]
    return pts.ravel(), wts.ravel()


def split_edges(edges: np.ndarray) -> np.ndarray:
    """Insert the midpoint of every panel, doubling the panel count."""
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(edges.size + mids.size)
    out[0::2] = edges
    out[1::2] = mids
    return out


def graded_edges(
    a: float,
    b: float,
    *,
    toward: Literal["left", "right", "both"] = "left",
    ratio: float = 3.0,
    tiny: float = 1e-12,
    base: int = 8,
) -> np.ndarray:
    """Panel edges on [a, b] geometrically refined toward an endpoint.

    The refined end accumulates panels shrinking by `ratio` until the
    innermost panel is below `tiny` times the interval length; `base`
    coarse panels cover the rest. Grading both ends resolves a boundary
    layer at one end and an integrable singularity at the other.
    """
    if not b > a:
        raise ValueError("graded_edges needs b > a")
    length = b - a
    levels = int(np.ceil(np.log(1.0 / tiny) / np.log(ratio)))
    geo = length * ratio ** (-np.arange(1, levels + 1, dtype=float))
    coarse = a + length * np.linspace(0.0, 1.0, base + 1)
    pieces = [coarse]
    if toward in ("left", "both"):
        pieces.append(a + geo)
    if toward in ("right", "both"):
        pieces.append(b - geo)
    edges = np.unique(np.concatenate(pieces))
    return edges[(edges >= a) & (edges <= b)]


def integrate_refining(
    func: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    *,
    abs_tol: float,
    rel_tol: float,
    scale: np.ndarray | float = 0.0,
    max_doublings: int = 7,
    what: str = "integral",
) -> np.ndarray:
    """Integrate func over the panels, doubling until certified.

    func maps a flat array of nodes to values of shape (..., n_nodes);
    leading axes are batch dimensions integrated simultaneously. Each
    batch entry must satisfy |I_k - I_{k-1}| <= max(abs_tol,
    rel_tol * (|I_k| + scale)) before the last refinement is accepted.
    `scale` widens the relative criterion for integrals that are one
    cancelling part of a larger sum. Raises QuadratureError when the
    budget of doublings is exhausted.
    """
    pts, wts = panel_nodes(edges)
    current = func(pts) @ wts
    for _ in range(max_doublings):
        edges = split_edges(edges)
        pts, wts = panel_nodes(edges)
        refined = func(pts) @ wts
        err = np.abs(refined - current)
        bound = np.maximum(abs_tol, rel_tol * (np.abs(refined) + scale))
        if np.all(err <= bound):
            return refined
        current = refined
    raise QuadratureError(
        f"{what}: no convergence after {max_doublings} panel doublings "
        f"({edges.size - 1} panels)"
    )
