"""Independent reference solvers for cross-checking segment solutions.

This module deliberately shares no numerics with the series/recurrence path:
gamma values come from scipy.special, polynomials are evaluated with numpy,
and the time stepping is the standard fractional Adams-Bashforth-Moulton
predictor-corrector (PECE).  It ships with the library so users can verify
solver output, but nothing in the solve path depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy.special import gamma as sp_gamma, gammaln as sp_gammaln

from .model import PolyMatrix

_MAX_ML_TERMS = 10_000
_MAX_ABM_STEPS = 5_000_000


@dataclass(frozen=True)
class MLParams:
    """One-parameter Mittag-Leffler index and summation tolerance."""

    alpha: float
    tol: float = 1e-13

    def __post_init__(self):
        if self.alpha <= 0 or self.tol <= 0:
            raise ValueError("Mittag-Leffler needs alpha > 0 and tol > 0")


def mittag_leffler(params: MLParams, z: float) -> float:
    """E_alpha(z) = sum_k z^k / gamma(alpha*k + 1) by direct partial summation.

    Terms are formed in log space so large intermediate powers cannot
    overflow; summation stops once the geometric tail bound drops below tol.
    """
    z = float(z)
    if z == 0.0:
        return 1.0
    log_abs_z = np.log(abs(z))
    total = 0.0
    prev = np.inf
    for k in range(_MAX_ML_TERMS):
        log_term = float(k * log_abs_z - sp_gammaln(params.alpha * k + 1.0))
        term = np.inf if log_term > 709.0 else np.exp(log_term)
        if z < 0 and k % 2 == 1:
            term = -term
        total += term
        mag = abs(term)
        if mag < 0.5 * params.tol and mag < 0.5 * prev:
            # ratio <= 1/2 from here on, so the tail is below 2*mag < tol
            return float(total)
        prev = mag
    raise RuntimeError(f"Mittag-Leffler series did not converge within {_MAX_ML_TERMS} terms")


def abm_solve(
    A0: PolyMatrix,
    forcing: list[list[tuple[float, float]]],
    nu: float,
    x0,
    t0: float,
    t1: float,
    h: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Fractional PECE predictor-corrector for  D^nu x = A0(t) x + F(t)  on [t0, t1].

    Parameters
    ----------
    A0 : PolyMatrix
        n x n polynomial matrix, evaluated in absolute time t.
    forcing : list of term lists, one per component
        Each term is (coefficient, exponent); component i contributes
        sum_j c_j * (t - t0)**e_j.  Exponents may be fractional (>= 0).
    nu : float in (0, 1]
        Caputo order, restarted at t0.
    x0 : array-like, shape (n,)
        State at t0.
    h : float
        Nominal step; must divide t1 - t0 (to within 1e-9 relative).

    Returns (times, states) with states of shape (steps+1, n).  The scheme's
    global error is O(h^(1+nu)) for smooth forcing.
    """
    if not (0 < nu <= 1):
        raise ValueError(f"nu out of (0,1]: {nu}")
    span = float(t1) - float(t0)
    if span <= 0 or h <= 0:
        raise ValueError("need t1 > t0 and h > 0")
    steps = int(round(span / h))
    if steps < 1 or abs(steps * h - span) > 1e-9 * span:
        raise ValueError(f"h={h} does not divide t1 - t0 = {span}")
    if steps > _MAX_ABM_STEPS:
        raise ValueError(f"step-count overflow: {steps} > {_MAX_ABM_STEPS}")

    n = A0.rows
    x0 = np.asarray(x0, dtype=float)
    times = t0 + h * np.arange(steps + 1)

    mat_nodes = np.empty((steps + 1, n, n))
    for i in range(n):
        for j in range(n):
            entry = A0.entry(i, j)
            c = entry.coeff if entry else np.zeros(1)
            mat_nodes[:, i, j] = np.polyval(c[::-1], times)

    rel = times - t0
    force_nodes = np.zeros((steps + 1, n))
    for i, terms in enumerate(forcing):
        for coeff, exponent in terms:
            force_nodes[:, i] += coeff * np.power(rel, float(exponent))

    d = np.arange(steps + 1, dtype=float)
    predictor_w = (d + 1.0) ** nu - d**nu
    corrector_w = (d + 2.0) ** (nu + 1.0) + d ** (nu + 1.0) - 2.0 * (d + 1.0) ** (nu + 1.0)

    pred_scale = h**nu / sp_gamma(nu + 1.0)
    corr_scale = h**nu / sp_gamma(nu + 2.0)

    X = np.empty((steps + 1, n))
    X[0] = x0
    fvals = np.empty((steps + 1, n))
    fvals[0] = mat_nodes[0] @ x0 + force_nodes[0]

    for m in range(steps):
        pred = x0 + pred_scale * (predictor_w[m::-1] @ fvals[: m + 1])
        head_w = m ** (nu + 1.0) - (m - nu) * (m + 1.0) ** nu
        corr = head_w * fvals[0]
        if m >= 1:
            corr = corr + corrector_w[m - 1 :: -1] @ fvals[1 : m + 1]
        f_pred = mat_nodes[m + 1] @ pred + force_nodes[m + 1]
        X[m + 1] = x0 + corr_scale * (corr + f_pred)
        fvals[m + 1] = mat_nodes[m + 1] @ X[m + 1] + force_nodes[m + 1]

    return times, X


def abm_steps_for(span: float, target_h: float) -> int:
    """Step count giving a uniform step no larger than target_h."""
    return max(1, ceil(span / target_h))
