"""Descent-direction search for nonsmooth quasi-Newton steps.

At a subdifferentiable point the quasi-Newton direction -B g for an
arbitrary subgradient g need not be a descent direction.  This module
minimizes the pseudo-quadratic model

    M(p) = (1/2) p' B^{-1} p + max_{g in dJ(w)} g'p

by aggregating violating subgradients returned by the objective's
steepest-subgradient oracle: each iteration mixes the current aggregate
gbar with the newest violator using the exactly optimal convex
coefficient, which only requires products with B.  A duality-gap bound
is tracked as the stopping measure, and the best direction seen (by
model value) is returned with a final descent certificate.
"""

from dataclasses import dataclass, field

import numpy as np

#: Denominator floor below which the optimal mixing step is treated as
#: converged (the new violator coincides with the aggregate).
MIX_DENOM_FLOOR = 1e-15


def model_value(sup_pg, p, gbar):
    """Pseudo-quadratic model value of p, given sup g'p and the aggregate
    gbar with p = -B gbar; avoids inverting B."""
    return sup_pg - 0.5 * float(p @ gbar)


@dataclass
class DirectionResult:
    """Outcome of the direction search.

    is_descent is the certificate sup g'p < 0 evaluated at return time;
    when it is False the caller should stop at the current iterate.
    """

    is_descent: bool
    p: np.ndarray
    gbar: np.ndarray
    model_min: float
    sup_value: float
    iterations: int
    gap_history: list = field(default_factory=list)


def descent_direction(oracle, model, w, g_first, tol, max_iterations):
    """Search for a quasi-Newton descent direction at w.

    oracle supplies sup_subgradient; model supplies apply(v) = B v;
    g_first must be a subgradient at w.  Stops once the newest violator
    satisfies g'p <= 0 and the duality-gap bound falls to tol (or the
    bound hits zero, or max_iterations is reached), then returns the
    direction with the smallest model value.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    gbar = np.asarray(g_first, dtype=float).copy()
    p = -model.apply(gbar)
    g_next, sup_pg = oracle.sup_subgradient(w, p)

    best_model = model_value(sup_pg, p, gbar)
    best_p = p
    best_gbar = gbar
    best_sup = sup_pg
    gap = best_model - 0.5 * float(p @ gbar)
    history = [gap]

    i = 1
    while (sup_pg > 0.0 or gap > tol) and gap > 0.0 and i < max_iterations:
        Bg = model.apply(g_next)
        gbar_p = float(gbar @ p)
        numer = sup_pg - gbar_p
        denom = float(g_next @ Bg) + 2.0 * sup_pg - gbar_p
        if denom <= MIX_DENOM_FLOOR:
            break
        mix = min(1.0, max(0.0, numer / denom))
        gbar = (1.0 - mix) * gbar + mix * g_next
        p = (1.0 - mix) * p - mix * Bg
        g_next, sup_pg = oracle.sup_subgradient(w, p)
        current_model = model_value(sup_pg, p, gbar)
        if current_model < best_model:
            best_model = current_model
            best_p = p
            best_gbar = gbar
            best_sup = sup_pg
        gap = best_model - 0.5 * float(p @ gbar)
        history.append(gap)
        i += 1

    if best_p is not p:
        best_sup = oracle.sup_subgradient(w, best_p)[1]
    return DirectionResult(
        is_descent=bool(best_sup < 0.0),
        p=best_p.copy(),
        gbar=best_gbar.copy(),
        model_min=best_model,
        sup_value=best_sup,
        iterations=i,
        gap_history=history,
    )
