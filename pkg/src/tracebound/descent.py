"""Support optimization on the interval endpoints.

Two stages share one merit function, the weighted squared residual
norm from primal_dual.  A projected gradient descent with central
finite differences and a backtracking line search does the large
moves; because the minimum is an exact zero of a smooth residual
vector, a damped Gauss-Newton polish takes over once first-order
progress stops paying, and converges in a handful of rounds where
gradient steps would crawl along the valley floor.

Trial steps seed from Barzilai and Borwein's secant estimate of the
inverse curvature along the latest displacement, then halve until the
objective decreases, so accepted objectives are non-increasing.
Candidate endpoint vectors are projected back onto the feasible cone
(ordered, min separation, inside (0, 18]) before evaluation, and any
candidate whose combinatorics break (a gap losing its root, a
collapsed period system) just evaluates to +inf and is rejected by
the search.  No stochasticity anywhere; runs are bit-for-bit
reproducible.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .measures import IllConditioned
from .polyarith import PolySet
from .primal_dual import SingularW, objective, weighted_residuals
from .support import Support, SupportError


class StalledLineSearch(RuntimeError):
    """No acceptable step found within the halving budget."""


class NotConverged(RuntimeError):
    """Descent stopped above tolerance; .state holds the best iterate."""

    def __init__(self, message: str, state: "DescentState"):
        super().__init__(message)
        self.state = state


@dataclass
class DescentConfig:
    tol_obj: float = 1e-12
    max_iters: int = 5000
    fd_step: float = 1e-7
    min_width: float = 1e-6
    weights: Tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    nodes_per_interval: int = 128
    polish: bool = True
    polish_rounds: int = 40
    # gradient phase hands over to the polish once the objective drops
    # by less than stall_factor over stall_window accepted steps
    stall_window: int = 20
    stall_factor: float = 1.05

    def to_json(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_json(cls, data) -> "DescentConfig":
        if isinstance(data, str):
            data = json.loads(data)
        kwargs = dict(data)
        if "weights" in kwargs:
            kwargs["weights"] = tuple(float(w) for w in kwargs["weights"])
        return cls(**kwargs)


@dataclass
class DescentState:
    support: Support
    residuals: np.ndarray
    objective: float
    iterations: int
    step: float
    converged: bool
    stop_reason: str
    history: List[float] = field(default_factory=list)


def project(endpoints: np.ndarray, min_width: float) -> np.ndarray:
    """Nearest-ish point of the ordered cone: forward sweep enforcing
    separation from below, backward sweep pulling back under the cap."""
    e = np.array(endpoints, dtype=float)
    e[0] = max(e[0], min_width)
    for i in range(1, len(e)):
        e[i] = max(e[i], e[i - 1] + min_width)
    if e[-1] > 18.0:
        e[-1] = 18.0
        for i in range(len(e) - 2, -1, -1):
            e[i] = min(e[i], e[i + 1] - min_width)
    return e


_BAD = (SupportError, IllConditioned, SingularW, np.linalg.LinAlgError)


def _safe_objective(endpoints: np.ndarray, polys: PolySet, cfg: DescentConfig) -> float:
    try:
        return objective(Support(endpoints), polys, cfg.nodes_per_interval,
                         cfg.weights)
    except _BAD:
        return np.inf


def _safe_residuals(endpoints: np.ndarray, polys: PolySet,
                    cfg: DescentConfig) -> Optional[np.ndarray]:
    try:
        return weighted_residuals(Support(endpoints), polys,
                                  cfg.nodes_per_interval, cfg.weights)
    except _BAD:
        return None


def gradient(endpoints: np.ndarray, polys: PolySet, cfg: DescentConfig,
             f0: float) -> np.ndarray:
    """Central differences, one-sided next to an infeasible probe."""
    g = np.zeros_like(endpoints)
    for i in range(len(endpoints)):
        h = cfg.fd_step * max(1.0, abs(endpoints[i]))
        up, dn = endpoints.copy(), endpoints.copy()
        up[i] += h
        dn[i] -= h
        fu = _safe_objective(up, polys, cfg)
        fd = _safe_objective(dn, polys, cfg)
        if np.isfinite(fu) and np.isfinite(fd):
            g[i] = (fu - fd) / (2 * h)
        elif np.isfinite(fu):
            g[i] = (fu - f0) / h
        elif np.isfinite(fd):
            g[i] = (f0 - fd) / h
    return g


ARMIJO_C1 = 1e-4
MAX_HALVINGS = 30


def step(endpoints: np.ndarray, polys: PolySet, cfg: DescentConfig,
         f0: float, g: np.ndarray, t0: float):
    """One backtracking line search along -g; returns (endpoints, f, t),
    halving the trial step until sufficient decrease below f0."""
    gnorm2 = float(g @ g)
    t = t0
    for _ in range(MAX_HALVINGS + 1):
        cand = project(endpoints - t * g, cfg.min_width)
        f = _safe_objective(cand, polys, cfg)
        if np.isfinite(f) and f <= f0 - ARMIJO_C1 * t * gnorm2:
            return cand, f, t
        t /= 2
    raise StalledLineSearch(f"no acceptable step below t = {t0:.3g}")


def _bb_step_length(s: np.ndarray, y: np.ndarray, fallback: float) -> float:
    """Spectral step s.s/s.y, clamped; fallback when curvature is lost."""
    sy = float(s @ y)
    if sy <= 0:
        return fallback
    return float(np.clip((s @ s) / sy, 1e-12, 1.0))


def _jacobian(endpoints: np.ndarray, polys: PolySet, cfg: DescentConfig,
              r0: np.ndarray) -> np.ndarray:
    """Residual Jacobian by the same differencing policy as gradient."""
    J = np.zeros((len(r0), len(endpoints)))
    for i in range(len(endpoints)):
        h = cfg.fd_step * max(1.0, abs(endpoints[i]))
        up, dn = endpoints.copy(), endpoints.copy()
        up[i] += h
        dn[i] -= h
        ru = _safe_residuals(up, polys, cfg)
        rd = _safe_residuals(dn, polys, cfg)
        if ru is not None and rd is not None:
            J[:, i] = (ru - rd) / (2 * h)
        elif ru is not None:
            J[:, i] = (ru - r0) / h
        elif rd is not None:
            J[:, i] = (r0 - rd) / h
    return J


def _polish(endpoints: np.ndarray, polys: PolySet, cfg: DescentConfig):
    """Levenberg-Marquardt rounds on the residual vector.

    Near the zero-residual optimum each round is essentially a
    Gauss-Newton step; far from it the damping degrades gracefully
    toward small gradient steps.  Only improving candidates are
    accepted, so the merit value keeps the descent's monotonicity.
    Returns (endpoints, objective, rounds, last_step_norm).
    """
    e = project(endpoints, cfg.min_width)
    r = _safe_residuals(e, polys, cfg)
    if r is None:
        return e, np.inf, 0, 0.0
    f = float(r @ r)
    lam, rounds, step_norm = 1e-4, 0, 0.0
    while rounds < cfg.polish_rounds and f > cfg.tol_obj:
        J = _jacobian(e, polys, cfg, r)
        A = J.T @ J
        gvec = J.T @ r
        damp = np.diag(np.maximum(np.diag(A), 1e-12))
        improved = False
        for _ in range(16):
            try:
                d = np.linalg.solve(A + lam * damp, -gvec)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            cand = project(e + d, cfg.min_width)
            rc = _safe_residuals(cand, polys, cfg)
            if rc is not None:
                fc = float(rc @ rc)
                if fc < f:
                    step_norm = float(np.linalg.norm(cand - e))
                    e, r, f = cand, rc, fc
                    lam = max(lam / 3.0, 1e-12)
                    improved = True
                    break
            lam *= 10.0
            if lam > 1e10:
                break
        rounds += 1
        if not improved:
            break
    return e, f, rounds, step_norm


def _write_checkpoint(path: str, endpoints: np.ndarray, it: int, f: float,
                      t_prev: float, cfg: DescentConfig) -> None:
    blob = {
        "iteration": it,
        "endpoints": [f"{a:.16g}" for a in endpoints],
        "objective": f,
        "t_prev": t_prev,
        "config": cfg.to_json(),
    }
    with open(path, "w") as fh:
        json.dump(blob, fh, indent=1)


def load_checkpoint(path: str):
    with open(path) as fh:
        blob = json.load(fh)
    return blob


def _stalling(history: List[float], cfg: DescentConfig) -> bool:
    w = cfg.stall_window
    return len(history) > w and history[-w - 1] <= history[-1] * cfg.stall_factor


def solve(support: Support, polys: PolySet, cfg: DescentConfig = None,
          checkpoint_path: Optional[str] = None,
          resume_from=None) -> DescentState:
    """Run the two-stage optimization to tolerance.

    Returns a DescentState on success (objective <= tol_obj); raises
    NotConverged carrying the best iterate when the budget runs out or
    neither stage can improve further.

    checkpoint_path, when given, receives a JSON snapshot every 100
    iterations (and at the end); resume_from accepts such a snapshot
    (path or parsed dict) and picks up where it left off.
    """
    cfg = cfg or DescentConfig()
    e = support.as_array()
    it0, t_prev = 0, 1.0
    if resume_from is not None:
        blob = resume_from if isinstance(resume_from, dict) else load_checkpoint(resume_from)
        e = np.array([float(s) for s in blob["endpoints"]])
        it0 = int(blob["iteration"])
        t_prev = float(blob["t_prev"])
    e = project(e, cfg.min_width)
    f = _safe_objective(e, polys, cfg)
    if not np.isfinite(f):
        raise SupportError("objective undefined at the starting support")
    history = [f]
    e_prev = g_prev = None
    stop = "iteration budget"

    it = it0
    while it < cfg.max_iters:
        if f <= cfg.tol_obj:
            stop = "tolerance reached"
            break
        if _stalling(history, cfg):
            stop = "gradient progress stalled"
            break
        g = gradient(e, polys, cfg, f)
        if not np.any(g):
            stop = "zero gradient"
            break
        fallback = min(2 * t_prev, 1.0)
        t0 = fallback if e_prev is None else _bb_step_length(e - e_prev,
                                                             g - g_prev,
                                                             fallback)
        try:
            cand, f_new, t = step(e, polys, cfg, f, g, t0)
        except StalledLineSearch:
            stop = "line search stalled"
            break
        e_prev, g_prev = e, g
        e, f, t_prev = cand, f_new, t
        history.append(f)
        it += 1
        if checkpoint_path and it % 100 == 0:
            _write_checkpoint(checkpoint_path, e, it, f, t_prev, cfg)
    if f <= cfg.tol_obj:
        stop = "tolerance reached"

    last_step = t_prev
    if cfg.polish and f > cfg.tol_obj:
        e, f, rounds, step_norm = _polish(e, polys, cfg)
        if rounds:
            it += rounds
            last_step = step_norm
            stop = "polish " + ("converged" if f <= cfg.tol_obj else "exhausted")
            history.append(f)

    if checkpoint_path:
        _write_checkpoint(checkpoint_path, e, it, f, last_step, cfg)
    r = _safe_residuals(e, polys, cfg)
    state = DescentState(Support(e), r, f, it, last_step,
                         f <= cfg.tol_obj, stop, history)
    if state.converged:
        return state
    raise NotConverged(
        f"objective {f:.3e} above tolerance {cfg.tol_obj:.1e} "
        f"after {it} iterations ({stop})", state)
