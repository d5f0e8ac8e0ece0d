"""Quasi-Newton driver for nonsmooth convex minimization.

solve() iterates: find a certified descent direction from the bundle
search, take a step accepted by the subgradient Wolfe conditions
(exactly minimized along the ray by default), pick a subgradient at the
new point whose displacement has positive curvature, and apply the
safeguarded rank-two update to the inverse-Hessian model.  Two reference
methods reuse the same loop: solve_gd steps along a raw negative
subgradient, and solve_subgd runs the direction search with the model
pinned to the identity.

Each run returns the final iterate plus a trace with one record per
iteration (objective, step, timing, direction-search effort and the
quantities needed to audit the Wolfe conditions afterwards).
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .direction import descent_direction
from .line_search import (
    LineSearchError,
    UnboundedRayError,
    WolfeParams,
    backtracking_search,
)
from .quasi_newton import (
    DegenerateDisplacementError,
    DenseInverseHessian,
    DisplacementPair,
    IdentityModel,
    LimitedMemoryInverseHessian,
    curvature_safeguard,
    skip_update_test,
)


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs; the defaults are the ones used throughout the tests."""

    direction_tol: float = 1e-5
    direction_tol_at_zero: float | None = None
    direction_max_iterations: int = 50
    curvature_floor: float = 1e-8
    skip_ratio: float = 1e-12
    wolfe: WolfeParams = field(default_factory=WolfeParams)
    buffer_size: int = 15
    dense: bool = False
    scale_initial: bool = False
    max_iterations: int = 500
    max_seconds: float | None = None
    improvement_tol: float = 1e-8
    improvement_window: int = 5
    seed: int = 0
    line_search: str = "exact"
    backtrack_eta0: float = 1.0
    backtrack_decay: float = 0.9
    backtrack_trials: int = 100
    unbounded_drop: float = 1e8
    subgradient_redraws: int = 30

    def __post_init__(self):
        if self.line_search not in ("exact", "backtracking"):
            raise ValueError("line_search must be 'exact' or 'backtracking'")
        if self.improvement_window < 1:
            raise ValueError("improvement_window must be >= 1")

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


@dataclass
class TraceRecord:
    iteration: int
    cpu_seconds: float
    objective: float
    step_size: float
    dir_iterations: int
    gbar_norm: float
    sup_initial: float
    sup_step: float


@dataclass
class SolverTrace:
    records: list
    reason: str = ""
    #: (s'y, s'y / y'y) of every displacement pair accepted into the model.
    pair_log: list = field(default_factory=list)

    @property
    def objectives(self):
        return np.array([r.objective for r in self.records])

    @property
    def iterations(self):
        return len(self.records) - 1


CSV_HEADER = "iter,cpu_seconds,objective,step_size,dir_iters,gbar_norm"


def trace_to_csv(trace, path):
    """Write the per-iteration trace as delimited text."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in trace.records:
            fh.write(
                f"{r.iteration},{float(r.cpu_seconds)!r},{float(r.objective)!r},"
                f"{float(r.step_size)!r},{r.dir_iterations},{float(r.gbar_norm)!r}\n"
            )


def wolfe_certify(trace, params=None):
    """True when every recorded step obeyed both subgradient Wolfe conditions.

    Steps taken on an unbounded ray carry no recorded slope at the new
    point and are skipped; an empty run is vacuously certified.
    """
    params = params or WolfeParams()
    recs = trace.records
    for here, there in zip(recs, recs[1:]):
        if not math.isfinite(here.step_size) or not math.isfinite(here.sup_step):
            continue
        decrease = there.objective <= here.objective + params.c1 * here.step_size * here.sup_initial
        curvature = here.sup_step >= params.c2 * here.sup_initial
        if not (decrease and curvature):
            return False
    return True


def _effective_direction_tol(oracle, config, t, started_at_zero):
    if t == 0 and started_at_zero:
        if config.direction_tol_at_zero is not None:
            return config.direction_tol_at_zero
        if getattr(oracle, "relax_tolerance_at_zero", False):
            return max(config.direction_tol, 1.0)
    return config.direction_tol


def _pick_curvature_subgradient(oracle, rng, config, w_next, g_prev, s, g_sup):
    """Subgradient at the new iterate giving s'(g_new - g_prev) > 0.

    Starts from an arbitrary draw (re-drawing a bounded number of times)
    and falls back to the steepest subgradient along the step direction,
    which satisfies the inequality whenever the step made the directional
    derivative nonnegative.
    """
    g_new = oracle.any_subgradient(w_next, rng)
    if float(s @ (g_new - g_prev)) > 0.0:
        return g_new
    for _ in range(config.subgradient_redraws):
        g_new = oracle.any_subgradient(w_next, rng)
        if float(s @ (g_new - g_prev)) > 0.0:
            return g_new
    return g_sup


def _run(oracle, config, w0, model, update_model, gd_mode):
    w = np.asarray(w0, dtype=float).copy()
    if w.shape != (oracle.dim,):
        raise ValueError(f"w0 must have shape ({oracle.dim},)")
    if not np.isfinite(w).all():
        raise ValueError("w0 must be finite")
    rng = np.random.default_rng(config.seed)
    started_at_zero = not w.any()

    g = oracle.any_subgradient(w, rng)
    objective = oracle.value(w)
    history = [objective]
    records = []
    pair_log = []
    reason = "max_iterations"
    clock_start = time.process_time()

    for t in range(config.max_iterations):
        elapsed = time.process_time() - clock_start
        if config.max_seconds is not None and elapsed >= config.max_seconds:
            reason = "max_seconds"
            break

        if gd_mode:
            p = -g
            gbar_norm = float(np.linalg.norm(g))
            dir_iterations = 0
            sup_initial = oracle.sup_subgradient(w, p)[1]
        else:
            tol = _effective_direction_tol(oracle, config, t, started_at_zero)
            result = descent_direction(
                oracle, model, w, g, tol, config.direction_max_iterations
            )
            if not result.is_descent:
                reason = "direction_failure"
                break
            p = result.p
            gbar_norm = float(np.linalg.norm(result.gbar))
            dir_iterations = result.iterations
            sup_initial = result.sup_value

        unit_first_gd_step = gd_mode and t == 0 and started_at_zero
        if unit_first_gd_step:
            eta = 1.0
        elif config.line_search == "exact":
            restriction = oracle.line_restriction(w, p)
            if restriction is None:
                raise ValueError(
                    "objective provides no line restriction; use backtracking"
                )
            try:
                eta = restriction.minimize()
            except UnboundedRayError as ray:
                # The restriction is eventually affine with negative slope:
                # take one long step down the tail, then stop.
                drop = config.unbounded_drop + 10.0 * abs(objective)
                eta = ray.eta_last + drop / (-ray.slope)
                w = w + eta * p
                records.append(TraceRecord(
                    t, elapsed, objective, eta, dir_iterations, gbar_norm,
                    sup_initial, math.nan,
                ))
                objective = oracle.value(w)
                reason = "unbounded"
                break
        else:
            try:
                eta = backtracking_search(
                    oracle, w, p, config.wolfe,
                    eta0=config.backtrack_eta0,
                    decay=config.backtrack_decay,
                    max_trials=config.backtrack_trials,
                )
            except LineSearchError:
                reason = "line_search_failure"
                break

        eta = float(eta)
        if eta <= 0.0:
            reason = "zero_step"
            break

        step = eta * p
        w_next = w + step
        objective_next = oracle.value(w_next)
        g_sup, sup_step = oracle.sup_subgradient(w_next, p)

        if update_model:
            g_new = _pick_curvature_subgradient(
                oracle, rng, config, w_next, g, step, g_sup
            )
            y = g_new - g
            if float(step @ y) > 0.0 and not skip_update_test(step, y, config.skip_ratio):
                try:
                    s_adj = curvature_safeguard(step, y, config.curvature_floor)
                    sy = float(s_adj @ y)
                    if sy > 0.0:
                        model.update(DisplacementPair(s_adj, y))
                        pair_log.append((sy, sy / float(y @ y)))
                except DegenerateDisplacementError:
                    pass
        else:
            g_new = oracle.any_subgradient(w_next, rng)

        records.append(TraceRecord(
            t, elapsed, objective, eta, dir_iterations, gbar_norm,
            sup_initial, sup_step,
        ))
        w = w_next
        objective = objective_next
        g = g_new
        history.append(objective)

        window = config.improvement_window
        if len(history) > window:
            reference = history[-window - 1]
            gain = (reference - objective) / (window * max(abs(reference), 1e-12))
            if gain < config.improvement_tol:
                reason = "converged"
                break

    records.append(TraceRecord(
        len(records), time.process_time() - clock_start, objective,
        math.nan, 0, math.nan, math.nan, math.nan,
    ))
    return w, SolverTrace(records=records, reason=reason, pair_log=pair_log)


def solve(oracle, config=None, w0=None):
    """Run the quasi-Newton solver; dense or limited-memory per config."""
    config = config or SolverConfig()
    w0 = np.zeros(oracle.dim) if w0 is None else w0
    if config.dense:
        model = DenseInverseHessian(oracle.dim)
    else:
        model = LimitedMemoryInverseHessian(
            oracle.dim, config.buffer_size, scale_initial=config.scale_initial
        )
    return _run(oracle, config, w0, model, update_model=True, gd_mode=False)


def solve_subgd(oracle, config=None, w0=None):
    """Direction-finding descent with the model pinned to the identity."""
    config = config or SolverConfig()
    w0 = np.zeros(oracle.dim) if w0 is None else w0
    model = IdentityModel(oracle.dim)
    return _run(oracle, config, w0, model, update_model=False, gd_mode=False)


def solve_gd(oracle, config=None, w0=None):
    """Plain descent along a random negative subgradient.

    Takes a unit first step when started at the all-zero point so the
    run does not immediately stall on a subdifferentiable start.
    """
    config = config or SolverConfig()
    w0 = np.zeros(oracle.dim) if w0 is None else w0
    model = IdentityModel(oracle.dim)
    return _run(oracle, config, w0, model, update_model=False, gd_mode=True)
