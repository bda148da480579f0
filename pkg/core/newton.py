import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from core.energy import DofVector, EnergyModel
from core.errors import ContractError, DomainError
from core.problem import ProblemSpec, SolveReport, SolverConfig

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
# stationarity spot check: a single-unknown step of this size must not lower the energy by more than the drop
SADDLE_STEP = 1e-4
SADDLE_DROP = 1e-9


def projected_norm(model: EnergyModel, x: np.ndarray, g: np.ndarray) -> float:
    """Gradient norm ignoring open-curve parameters held at a bound"""
    return float(np.linalg.norm(np.where(model.blocked(x, g), 0.0, g)))


def fd_hessian(model: EnergyModel, x: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """Forward differences of the analytic gradient, symmetrised"""
    n = len(x)
    H = np.empty((n, n))
    for j in range(n):
        xp = x.copy()
        xp[j] += h
        try:
            H[:, j] = (model.gradient(xp) - g) / h
        except DomainError:
            xp[j] = x[j] - h
            H[:, j] = (g - model.gradient(xp)) / h
    return 0.5 * (H + H.T)


def newton_direction(H: np.ndarray, g: np.ndarray, free: np.ndarray) -> Optional[np.ndarray]:
    """Minimum-norm solution of H d = -g on the free unknowns; None when unusable"""
    d = np.zeros_like(g)
    if not free.any():
        return None
    try:
        sol = linalg.lstsq(H[np.ix_(free, free)], -g[free], cond=1e-12)[0]
    except (linalg.LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(sol)):
        return None
    d[free] = sol
    return d


def line_search(model: EnergyModel, x: np.ndarray, E: float, g: np.ndarray, gnorm: float,
                d: np.ndarray, cfg: SolverConfig) -> Optional[Tuple[float, np.ndarray, float, np.ndarray]]:
    """Armijo backtracking on the energy; infeasible trial points are halved away"""
    slope = float(g @ d)
    alpha = 1.0
    for _ in range(cfg.max_backtracks + 1):
        trial = model.normalize(x + alpha * d)
        try:
            Et = model.energy(trial)
        except DomainError:
            alpha *= cfg.backtrack_ratio
            continue
        if Et <= E + cfg.armijo_slope * alpha * slope:
            return alpha, trial, Et, model.gradient(trial)
        # energy flat to rounding: accept when the gradient still improves
        if Et - E <= 8 * EPS * max(1.0, abs(E)):
            gt = model.gradient(trial)
            if projected_norm(model, trial, gt) < gnorm:
                return alpha, trial, Et, gt
        alpha *= cfg.backtrack_ratio
    return None


def is_local_minimum(model: EnergyModel, x: np.ndarray, E: float) -> bool:
    """Step every unknown by +-SADDLE_STEP; False means a saddle was detected"""
    for j in range(len(x)):
        for delta in (SADDLE_STEP, -SADDLE_STEP):
            trial = x.copy()
            trial[j] += delta
            try:
                Et = model.energy(model.normalize(trial))
            except DomainError:
                continue
            if Et < E - SADDLE_DROP:
                return False
    return True


def solve_newton(problem: ProblemSpec, init: DofVector, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Damped Newton iteration on grad E = 0 starting from init"""
    cfg = cfg or SolverConfig()
    if init.mode is not problem.mode:
        raise ContractError(f"initial dof is in mode {init.mode.value}, problem is {problem.mode.value}")
    model = problem.energy_model()

    x = model.normalize(init.values)
    E = E0 = model.energy(x)
    g = model.gradient(x)
    gnorm = projected_norm(model, x, g)
    iterations = 0

    while gnorm > cfg.grad_tol and iterations < cfg.max_iters:
        iterations += 1
        free = ~model.blocked(x, g)
        H = fd_hessian(model, x, g, cfg.fd_hessian_step)
        d = newton_direction(H, g, free)
        kind = "newton"
        if d is None or not g @ d < 0:
            d, kind = np.where(free, -g, 0.0), "steepest"

        step = line_search(model, x, E, g, gnorm, d, cfg)
        if step is None and kind == "newton":
            d, kind = np.where(free, -g, 0.0), "steepest"
            step = line_search(model, x, E, g, gnorm, d, cfg)
        if step is None:
            logger.warning("candidate %d: line search found no acceptable step at iteration %d (|g|=%.3e)",
                           problem.candidate_index, iterations, gnorm)
            break

        alpha, x, E, g = step
        gnorm = projected_norm(model, x, g)
        moved = alpha * float(np.linalg.norm(d))
        logger.debug("iter %3d  %-8s  E=%.16e  |g|=%.3e  alpha=%.3e", iterations, kind, E, gnorm, alpha)
        if moved <= cfg.step_tol * (1.0 + float(np.linalg.norm(x))):
            break

    converged = gnorm <= cfg.grad_tol
    saddle = converged and not is_local_minimum(model, x, E)
    if not converged:
        logger.warning("candidate %d: stopped after %d iterations with |g|=%.3e",
                       problem.candidate_index, iterations, gnorm)
    elif saddle:
        logger.warning("candidate %d: stationary point is not a local minimum", problem.candidate_index)

    return SolveReport(
        curve=model.curve(x),
        dof=model.dof(x),
        length=model.length(x),
        energy=E,
        grad_norm=gnorm,
        iterations=iterations,
        candidate_index=problem.candidate_index,
        converged=converged,
        problem=problem,
        initial_energy=E0,
        saddle=saddle,
    )
