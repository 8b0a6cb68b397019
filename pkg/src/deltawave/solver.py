"""Method-of-lines evolution with jump-corrected space and time discretisation.

The second-order equation is reduced to the first-order system

    Psi_tau = Pi + (delta term),
    Z Pi_tau + A Pi_s + B Pi + C Psi_ss + E Psi_s = (delta term),

where ``Pi`` is the regular (delta-free) part of ``Psi_tau``. On the
Gauss-Lobatto grid the right-hand side becomes ``L u + s(tau)`` with
``u = (Psi, Pi)`` and ``s`` the effective source produced by the jump
corrections. Time stepping uses the discontinuous trapezium (order 2)
or Hermite (order 4) rule, each written as a single implicit solve per
step. When the particle crosses a node inside a step, that node receives
the jump in ``u`` (the "kick") together with the rule's jump terms built
from the node's time jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .chart import CoefficientSet, ParticleMotion, coefficient_set
from .collocation import correction_from_kappa, heaviside, kappa, NODE_TOL
from .exact import ExactSolution
from .jumps import JumpState, jump_state, time_jumps
from .quadrature import dh2_jump_term, dh4_jump_term
from .spectral_grid import SpectralGrid

__all__ = [
    "WaveConfig",
    "StateVector",
    "OperatorMatrix",
    "CrossingEvent",
    "EvolutionResult",
    "WaveSolver",
    "assemble_L",
    "dh2_step",
    "dh4_step",
    "cfl_estimate",
    "effective_source",
    "fit_slope",
    "convergence_study",
    "StabilityError",
]

STEPPERS = ("dh2", "dh4")
ABLATIONS = (None, "time", "all")


class StabilityError(ArithmeticError):
    """Raised when the state stops being finite."""


@dataclass(frozen=True)
class WaveConfig:
    """Parameters of one evolution.

    ``ablation`` switches off parts of the jump handling for comparison
    runs: ``"time"`` drops the jump terms of the time-stepping rules (the
    kick is kept), ``"all"`` also drops the kick and the spatial
    corrections.
    """

    solution: str = "II"
    v: float = 0.5
    N: int = 45
    M: int = 10
    dtau: float = 0.05
    tau_end: float = 4.3
    stepper: str = "dh2"
    ablation: str | None = None
    convention: str = "derived"

    def validate(self):
        if self.solution not in ("I", "II"):
            raise ValueError(f"solution must be I or II, got {self.solution!r}")
        if not 0.0 <= self.v < 1.0:
            raise ValueError(f"need 0 <= v < 1, got {self.v}")
        if self.N < 8:
            raise ValueError(f"need N >= 8, got {self.N}")
        if not -1 <= self.M <= self.N:
            raise ValueError(f"need -1 <= M <= N, got {self.M}")
        if not self.dtau > 0:
            raise ValueError("dtau must be positive")
        if self.stepper not in STEPPERS:
            raise ValueError(f"stepper must be one of {STEPPERS}")
        if self.ablation not in ABLATIONS:
            raise ValueError(f"ablation must be one of {ABLATIONS}")
        return self

    def replace(self, **kw) -> "WaveConfig":
        d = asdict(self)
        d.update(kw)
        return WaveConfig(**d)


@dataclass
class StateVector:
    psi: np.ndarray
    pi: np.ndarray
    tau: float

    @property
    def u(self) -> np.ndarray:
        return np.concatenate([self.psi, self.pi])

    @classmethod
    def from_u(cls, u: np.ndarray, tau: float) -> "StateVector":
        n = u.size // 2
        if not np.all(np.isfinite(u)):
            raise StabilityError(f"non-finite state at tau = {tau}")
        return cls(u[:n].copy(), u[n:].copy(), tau)


def assemble_L(grid: SpectralGrid, coeffs: CoefficientSet) -> np.ndarray:
    """Dense operator of the semi-discrete system ``u_tau = L u``."""
    Z, A, B, C, E = (np.asarray(c, dtype=float) * np.ones(grid.size) for c in coeffs(grid.nodes))
    if np.any(Z == 0):
        raise ValueError("Z vanishes at a grid node")
    n = grid.size
    L = np.zeros((2 * n, 2 * n))
    L[:n, n:] = np.eye(n)
    zi = (1.0 / Z)[:, None]
    L[n:, :n] = -zi * (C[:, None] * grid.D2 + E[:, None] * grid.D1)
    L[n:, n:] = -zi * (A[:, None] * grid.D1 + np.diag(B))
    return L


class OperatorMatrix:
    """``L`` with cached LU factorisations of the implicit step matrices."""

    def __init__(self, grid: SpectralGrid, coeffs: CoefficientSet):
        self.grid = grid
        self.L = assemble_L(grid, coeffs)
        self._L2 = None
        self._lu = {}

    @property
    def L2(self):
        if self._L2 is None:
            self._L2 = self.L @ self.L
        return self._L2

    def matrix(self, dtau: float, stepper: str) -> np.ndarray:
        I = np.eye(self.L.shape[0])
        if stepper == "dh2":
            return I - 0.5 * dtau * self.L
        return I - 0.5 * dtau * (self.L - dtau / 6.0 * self.L2)

    def solve(self, dtau: float, stepper: str, rhs: np.ndarray) -> np.ndarray:
        key = (stepper, float(dtau))
        lu = self._lu.get(key)
        if lu is None:
            lu = sla.lu_factor(self.matrix(dtau, stepper), check_finite=True)
            self._lu[key] = lu
        return sla.lu_solve(lu, rhs)


@dataclass
class CrossingEvent:
    """The particle passing node ``node`` at ``tau_c`` inside a step."""

    node: int
    sigma: float
    tau_c: float
    dtau_c: float
    kick: np.ndarray          # jump of (Psi, Pi) at the node
    K_psi: np.ndarray         # time jumps of Psi: K_0 .. K_5
    J0: float
    zeta_dot: float

    @property
    def K_pi(self) -> np.ndarray:
        return self.K_psi[1:]


def _source_block(grid, nodes_coef, zeta: float, psiJ, piJ):
    """Pi-block of the effective source for jump coefficients ``psiJ``, ``piJ``."""
    Z, A, C, E = nodes_coef
    d = grid.nodes - zeta
    theta = heaviside(d)
    kp = kappa(psiJ, d)
    out = C * correction_from_kappa(grid.D2, kp, theta) + E * correction_from_kappa(grid.D1, kp, theta)
    if len(piJ):
        kq = kappa(piJ, d)
        out = out + A * correction_from_kappa(grid.D1, kq, theta)
    return -out / Z


def effective_source(grid: SpectralGrid, coeffs: CoefficientSet, js: JumpState, k: int = 0) -> np.ndarray:
    """Effective source ``s`` (k = 0) or its time derivative (k = 1) at ``js.tau``.

    The derivative keeps the node sides fixed, which is exact between crossings.
    """
    Z, A, B, C, E = (np.asarray(c, dtype=float) * np.ones(grid.size) for c in coeffs(grid.nodes))
    n = grid.size
    z = js.zeta0
    if np.min(np.abs(grid.nodes - z)) <= NODE_TOL:
        raise ValueError("source requested with the particle on a node")
    s = np.zeros(2 * n)
    if js.M < 0:
        return s
    if k == 0:
        psiJ, piJ = js.psi_jumps(0), js.pi_jumps(0)
    elif k == 1:
        zd = js.zeta_dot
        # d/dtau of sum_n J_n (s - zeta)^n / n!  =  sum_n (J_n' - zeta' J_{n+1}) (s - zeta)^n / n!
        J0, J1 = js.psi_jumps(0), js.psi_jumps(1)
        W0, W1 = js.pi_jumps(0), js.pi_jumps(1)
        psiJ = J1 - zd * np.append(J0[1:], 0.0)
        piJ = W1 - zd * np.append(W0[1:], 0.0) if W0.size else W0
    else:
        raise ValueError("only k = 0 or 1 is supported")
    s[n:] = _source_block(grid, (Z, A, C, E), z, psiJ, piJ)
    return s


def dh2_step(u, op: OperatorMatrix, dtau: float, s0, s1, jump_vector=None) -> np.ndarray:
    """Discontinuous trapezium update in increment form."""
    rhs = dtau * (op.L @ u) + 0.5 * dtau * (s0 + s1)
    if jump_vector is not None:
        rhs = rhs + jump_vector
    return u + op.solve(dtau, "dh2", rhs)


def dh4_step(u, op: OperatorMatrix, dtau: float, s0, s1, sd0, sd1, jump_vector=None) -> np.ndarray:
    """Discontinuous Hermite update in increment form.

    ``sd0`` and ``sd1`` are the time derivatives of the sources at the two ends.
    """
    rhs = (dtau * (op.L @ (u + dtau / 12.0 * (s0 - s1)))
           + 0.5 * dtau * (s0 + s1) + dtau**2 / 12.0 * (sd0 - sd1))
    if jump_vector is not None:
        rhs = rhs + jump_vector
    return u + op.solve(dtau, "dh4", rhs)


def cfl_estimate(grid: SpectralGrid, convention: str = "derived") -> float:
    """Explicit step bound ``min(spacing / max |characteristic speed|)``."""
    from .chart import characteristic_speeds
    s = grid.nodes
    vp, vm = characteristic_speeds(s, convention)
    speed = np.maximum(np.abs(vp), np.abs(vm))
    gaps = np.diff(s)
    # each gap is limited by the faster of its two end nodes
    local = gaps / np.maximum(speed[:-1], speed[1:])
    return float(np.min(local))


@dataclass
class EvolutionResult:
    config: WaveConfig
    taus: np.ndarray
    errors: np.ndarray                 # l-infinity error of Psi per stored time
    psi: np.ndarray                    # (steps + 1, N + 1)
    pi: np.ndarray
    crossings: list = field(default_factory=list)
    tau0: float = 0.0
    sigma_star: float = 0.0

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))


class WaveSolver:
    """Evolves one exact-solution configuration and tracks the error."""

    def __init__(self, config: WaveConfig, jump_cache: dict | None = None):
        self.config = config.validate()
        self.grid = SpectralGrid(config.N, 0.0, 1.0)
        self.coeffs = coefficient_set(config.convention)
        self.exact = ExactSolution(config.solution, config.v, config.tau_end + 1.0)
        self.motion: ParticleMotion = self.exact.motion
        self.op = OperatorMatrix(self.grid, self.coeffs)
        self._jumps = jump_cache if jump_cache is not None else {}
        self._src = {}
        nodes = self.grid.nodes
        inner = np.arange(1, config.N)
        if config.v > 0:
            self.node_times = np.array([self.motion.crossing_time(nodes[i]) for i in inner])
        else:
            self.node_times = np.full(inner.size, np.inf)
        self.inner = inner

    # cached per-time data ------------------------------------------------------
    def jumps_at(self, tau: float) -> JumpState:
        key = float(tau)
        js = self._jumps.get(key)
        if js is None:
            js = jump_state(tau, self.exact.source, self.motion, self.coeffs, max(self.config.M, 0))
            self._jumps[key] = js
        return js

    def source_at(self, tau: float, k: int = 0) -> np.ndarray:
        if self.config.ablation == "all" or self.config.M < 0:
            return np.zeros(2 * self.grid.size)
        key = (float(tau), k)
        s = self._src.get(key)
        if s is None:
            js = self.jumps_at(tau)
            if js.M != self.config.M:
                js = JumpState(js.tau, self.config.M, js.zeta, js.J, js.W)
            s = effective_source(self.grid, self.coeffs, js, k)
            self._src[key] = s
        return s

    def initial_state(self) -> StateVector:
        tau0 = self.motion.tau0
        nodes = self.grid.nodes
        return StateVector(self.exact.psi(tau0, nodes), self.exact.psi_tau(tau0, nodes), tau0)

    def error(self, state: StateVector) -> float:
        return float(np.max(np.abs(state.psi - self.exact.psi(state.tau, self.grid.nodes))))

    # crossings -------------------------------------------------------------------
    def crossings_in(self, ta: float, tb: float) -> list:
        mask = (self.node_times > ta) & (self.node_times <= tb)
        idx = np.nonzero(mask)[0]
        return sorted(((float(self.node_times[k]), int(self.inner[k])) for k in idx))

    def event(self, node: int, tau_c: float, ta: float) -> CrossingEvent:
        sigma = float(self.grid.nodes[node])
        js = self.jumps_at(tau_c)
        K = time_jumps(js.J, js.zeta, sigma, 5)
        return CrossingEvent(node, sigma, tau_c, tau_c - ta, np.array([K[0], K[1]]), K,
                             float(js.J[0].value), js.zeta_dot)

    # stepping --------------------------------------------------------------------
    def _jump_vector(self, ev: CrossingEvent | None, dtau: float, stepper: str) -> np.ndarray:
        n = self.grid.size
        out = np.zeros(2 * n)
        if ev is None or self.config.ablation == "all":
            return out
        i = ev.node
        out[i] += ev.kick[0]
        out[n + i] += ev.kick[1]
        if self.config.ablation == "time":
            return out
        if stepper == "dh2":
            out[i] += dh2_jump_term(dtau, ev.dtau_c, ev.K_psi[1:3])
            out[n + i] += dh2_jump_term(dtau, ev.dtau_c, ev.K_psi[2:4])
        else:
            out[i] += dh4_jump_term(dtau, ev.dtau_c, ev.K_psi[1:5])
            out[n + i] += dh4_jump_term(dtau, ev.dtau_c, ev.K_psi[2:6])
        return out

    def detect_crossings(self, ta: float, tb: float) -> list:
        """Crossing events for the nodes the particle passes in ``(ta, tb]``."""
        return [self.event(node, tc, ta) for tc, node in self.crossings_in(ta, tb)]

    def step(self, u: np.ndarray, ta: float, tb: float, stepper: str,
             event: CrossingEvent | None = None) -> np.ndarray:
        """Advance ``u`` from ``ta`` to ``tb`` with at most one crossing inside.

        ``tb < ta`` steps backwards in time.
        """
        dtau = tb - ta
        jv = self._jump_vector(event, dtau, stepper)
        s0, s1 = self.source_at(ta), self.source_at(tb)
        if stepper == "dh2":
            return dh2_step(u, self.op, dtau, s0, s1, jv)
        return dh4_step(u, self.op, dtau, s0, s1, self.source_at(ta, 1), self.source_at(tb, 1), jv)

    def _plan(self, ta: float, tb: float) -> list:
        """Split ``[ta, tb]`` so each piece holds at most one interior crossing."""
        tol = 1e-10
        dtau = tb - ta
        cross = self.crossings_in(ta, tb)
        if cross and abs(cross[-1][0] - tb) <= tol:
            tb = tb - 1e-6 * dtau
            cross = self.crossings_in(ta, tb)
        if len(cross) <= 1:
            return [(ta, tb, cross[0] if cross else None)]
        m = 2
        while True:
            edges = ta + (tb - ta) * np.arange(m + 1) / m
            pieces = []
            ok = True
            for a, b in zip(edges[:-1], edges[1:]):
                c = self.crossings_in(a, b)
                if len(c) > 1 or (c and (abs(c[0][0] - b) <= tol or abs(c[0][0] - a) <= tol)):
                    ok = False
                    break
                pieces.append((float(a), float(b), c[0] if c else None))
            if ok:
                return pieces
            m += 1

    def evolve(self, stepper: str | None = None, store: bool = True,
               callback: Callable | None = None) -> EvolutionResult:
        cfg = self.config
        stepper = stepper or cfg.stepper
        state = self.initial_state()
        u = state.u
        tau0 = state.tau
        nsteps = int(math.ceil((cfg.tau_end - tau0) / cfg.dtau - 1e-9))
        grid_times = tau0 + cfg.dtau * np.arange(nsteps + 1)
        grid_times[-1] = cfg.tau_end   # the last step is shortened to land on tau_end
        taus = [tau0]
        errs = [self.error(state)]
        psis = [state.psi.copy()] if store else []
        pis = [state.pi.copy()] if store else []
        events = []
        t = tau0
        for k in range(1, nsteps + 1):
            target = float(grid_times[k])
            while t < target - 1e-14:
                for a, b, c in self._plan(t, target):
                    ev = self.event(c[1], c[0], a) if c is not None else None
                    u = self.step(u, a, b, stepper, ev)
                    if not np.all(np.isfinite(u)):
                        raise StabilityError(f"non-finite state at tau = {b:.6f}")
                    if ev is not None:
                        events.append(ev)
                    t = b
            st = StateVector.from_u(u, t)
            taus.append(t)
            errs.append(self.error(st))
            if store:
                psis.append(st.psi)
                pis.append(st.pi)
            if callback is not None:
                callback(st)
        return EvolutionResult(cfg.replace(stepper=stepper), np.array(taus), np.array(errs),
                               np.array(psis), np.array(pis), events,
                               tau0=tau0, sigma_star=self.motion.sigma_star)


def fit_slope(h, err) -> float:
    """Least-squares slope of ``log(err)`` against ``log(h)``."""
    return float(np.polyfit(np.log(np.asarray(h, float)), np.log(np.asarray(err, float)), 1)[0])


def convergence_study(base: WaveConfig, dtaus, steppers=("dh2",), workers: int | None = None):
    """Max-over-run errors for each ``dtau`` and stepper, plus fitted slopes.

    Runs sharing a ``dtau`` share jump evaluations. Independent ``dtau``
    values run on a thread pool; results are ordered by ``dtau``.
    """
    from concurrent.futures import ThreadPoolExecutor

    def run(dt):
        cfg = base.replace(dtau=float(dt))
        cache = {}
        out = {}
        for st in steppers:
            solver = WaveSolver(cfg.replace(stepper=st), jump_cache=cache)
            out[st] = solver.evolve(stepper=st, store=False)
        return dt, out

    dtaus = list(dtaus)
    with ThreadPoolExecutor(max_workers=workers or 1) as pool:
        results = list(pool.map(run, dtaus))
    table = {st: np.array([[dt, r[st].max_error] for dt, r in results]) for st in steppers}
    slopes = {st: fit_slope(table[st][:, 0], table[st][:, 1]) for st in steppers}
    runs = {st: [r[st] for _, r in results] for st in steppers}
    return table, slopes, runs
