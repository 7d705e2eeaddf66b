"""Primal log-barrier method for one separable convex constraint plus linear ones.

Solves::

    minimize    c @ z
    subject to  G @ z <= h
                sum_j f_j((D @ z)_j) + a @ z <= budget

where every ``f_j`` is convex and twice differentiable on ``(0, inf)`` (or
absent).  Newton centering with backtracking, barrier weight grown by a
fixed factor, stop when the duality gap bound ``m / tau`` is below the
requested relative tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import NonConvergence


@dataclass(frozen=True)
class SolverConfig:
    eps_opt: float = 1e-6
    eps_feas: float = 1e-6
    max_iterations: int = 10000

    def __post_init__(self):
        if not (self.eps_opt > 0 and self.eps_feas > 0 and self.max_iterations > 0):
            raise ValueError("solver tolerances and iteration limit must be positive")


@dataclass
class ConvexProblem:
    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    D: np.ndarray
    funcs: Sequence  # per row of D: energy curve with value/derivative/second_derivative, or None
    a: np.ndarray
    budget: float
    has_energy: bool = True

    @property
    def n_constraints(self) -> int:
        return len(self.h) + (1 if self.has_energy else 0)


@dataclass
class BarrierResult:
    z: np.ndarray
    objective: float
    gap: float
    iterations: int


_GROWTH = 20.0
_NEWTON_TOL = 1e-10
_MAX_HALVINGS = 80


class _Evaluator:
    def __init__(self, prob: ConvexProblem):
        self.p = prob
        self.rows = [k for k, f in enumerate(prob.funcs) if f is not None]
        self.Ds = prob.D[self.rows] if self.rows else np.zeros((0, len(prob.c)))

    def energy_parts(self, z):
        d = self.Ds @ z
        if np.any(d <= 0):
            return None
        fs = [self.p.funcs[k] for k in self.rows]
        val = sum(f.value(x) for f, x in zip(fs, d)) + self.p.a @ z
        return d, fs, val

    def slack(self, z):
        """Returns (linear slacks, energy slack) or None outside the domain."""
        s = self.p.h - self.p.G @ z
        if np.any(s <= 0):
            return None
        if not self.p.has_energy:
            return s, None
        parts = self.energy_parts(z)
        if parts is None:
            return None
        gv = self.p.budget - parts[2]
        if not gv > 0:
            return None
        return s, gv

    def phi(self, z, tau):
        sl = self.slack(z)
        if sl is None:
            return np.inf
        s, gv = sl
        out = tau * (self.p.c @ z) - np.sum(np.log(s))
        if gv is not None:
            out -= np.log(gv)
        return out

    def newton(self, z, tau):
        p = self.p
        s, gv = self.slack(z)
        inv = 1.0 / s
        grad = tau * p.c + p.G.T @ inv
        H = (p.G.T * inv**2) @ p.G
        if gv is not None:
            d, fs, _ = self.energy_parts(z)
            d1 = np.array([f.derivative(x) for f, x in zip(fs, d)])
            d2 = np.array([f.second_derivative(x) for f, x in zip(fs, d)])
            gg = self.Ds.T @ d1 + p.a
            grad = grad + gg / gv
            H = H + np.outer(gg, gg) / gv**2 + (self.Ds.T * (d2 / gv)) @ self.Ds
        scale = 1.0 / np.sqrt(np.maximum(np.diag(H), 1e-300))
        Hs = H * scale[:, None] * scale[None, :]
        try:
            step = -np.linalg.solve(Hs, grad * scale) * scale
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(Hs, grad * scale, rcond=None)[0] * scale
        return step, grad


def barrier_solve(prob: ConvexProblem, z0: np.ndarray, cfg: SolverConfig) -> BarrierResult:
    """Minimize from the strictly feasible point ``z0``."""
    ev = _Evaluator(prob)
    z = np.array(z0, dtype=float)
    if ev.slack(z) is None:
        raise ValueError("barrier start point is not strictly feasible")
    mc = prob.n_constraints
    obj = float(prob.c @ z)
    tau = mc / max(abs(obj), 1e-12)
    iters = 0
    while True:
        # centering
        for _ in range(200):
            if iters >= cfg.max_iterations:
                raise NonConvergence(f"barrier method did not converge in {cfg.max_iterations} Newton steps")
            iters += 1
            step, grad = ev.newton(z, tau)
            lam2 = float(-grad @ step)
            if lam2 / 2 <= _NEWTON_TOL:
                break
            f0 = ev.phi(z, tau)
            alpha = 1.0
            for _ in range(_MAX_HALVINGS):
                f1 = ev.phi(z + alpha * step, tau)
                if f1 <= f0 - 0.25 * alpha * lam2:
                    break
                alpha *= 0.5
            else:
                break  # no progress possible at this precision
            z = z + alpha * step
        obj = float(prob.c @ z)
        gap = mc / tau
        if gap <= 0.1 * cfg.eps_opt * max(abs(obj), 1e-12):
            return BarrierResult(z=z, objective=obj, gap=gap, iterations=iters)
        tau *= _GROWTH


def smooth_energy_terms(funcs: Sequence) -> list[Optional[object]]:
    """Keep only curves the barrier differentiates; others enter as epigraphs or constants."""
    return [f if getattr(f, "smooth", False) else None for f in funcs]
