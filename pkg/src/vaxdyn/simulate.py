"""Long-horizon integration of the stiff scaled system and attractor classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .equilibria import ede_state, find_ede_roots, polish_equilibrium
from .model import AttitudePolicy, ModelParams, ScaledState, _rhs, jacobian

METHODS = ("LSODA", "Radau", "BDF")


class IntegrationError(RuntimeError):
    """Integration aborted; ``time`` is the scaled time of failure."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (T={time:.17g})")
        self.time = time


@dataclass(frozen=True)
class SimulationConfig:
    initial: ScaledState
    T_end: float = 10.0
    rtol: float = 1e-8
    atol: float = 1e-10
    record_stride: float = 5e-4
    method: str = "LSODA"

    def __post_init__(self):
        if not self.T_end > 0:
            raise ValueError("T_end must be positive")
        if not 0 < self.rtol <= 1e-3:
            raise ValueError("rtol must lie in (0, 1e-3]")
        if not self.atol > 0:
            raise ValueError("atol must be positive")
        if not self.record_stride > 0:
            raise ValueError("record_stride must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if any(c < 0 for c in self.initial):
            raise ValueError("initial state must be non-negative")


@dataclass
class TrajectoryRecord:
    """Sampled trajectory; ``states`` has one row ``(Y, Z, S, P, R, X)`` per time."""

    times: np.ndarray
    states: np.ndarray
    epsilon: float
    conservation_drift: float

    @property
    def U(self) -> np.ndarray:
        Y, Z, S, P, R, X = self.states.T
        return (S - P) + self.epsilon * (Y - Z) + X

    @property
    def Y(self) -> np.ndarray:
        return self.states[:, 0]

    def state_at(self, i: int) -> ScaledState:
        return ScaledState.from_array(self.states[i])

    @property
    def final(self) -> ScaledState:
        return self.state_at(-1)


@dataclass(frozen=True)
class AttractorClassification:
    kind: str  # converged_EDE | limit_cycle | undecided
    target_Y: float = math.nan
    amplitude: float = math.nan
    period: float = math.nan
    detail: dict = field(default_factory=dict, compare=False)


def near_ede_initial(params: ModelParams, policy: AttitudePolicy, Y: float,
                     bump: float = 0.05) -> ScaledState:
    """Endemic state with ``Y`` raised by ``bump``, placed on ``S + eps Y + R = 1``."""
    st = ede_state(params, policy, Y)
    Yp = Y * (1.0 + bump)
    return st._replace(Y=Yp, R=1.0 - st.S - params.epsilon * Yp)


def integrate(params: ModelParams, policy: AttitudePolicy,
              config: SimulationConfig) -> TrajectoryRecord:
    """Integrate from ``config.initial`` to ``config.T_end`` with error control.

    Raises
    ------
    IntegrationError
        On solver failure (e.g. step-size underflow), when a sampled component
        drops below ``-10 * atol``, or when the population drifts from its exact
        law by more than 1e-4.
    """
    eps = params.epsilon
    floor = -10.0 * config.atol

    # Stage values may dip marginally below zero; the attitude functions are
    # only defined for Y >= 0, so they see the clamped value.
    def f(t, u):
        w = policy._omega(max(u[0], 0.0))
        return _rhs(params, policy, u, w, policy.Sigma - w)

    def jac(t, u):
        if u[0] < 0:
            u = u.copy()
            u[0] = 0.0
        return jacobian(params, policy, u)

    n = int(math.floor(config.T_end / config.record_stride + 1e-9))
    t_eval = np.arange(n + 1) * config.record_stride
    if t_eval[-1] < config.T_end:
        t_eval = np.append(t_eval, config.T_end)
    u0 = np.asarray(config.initial, dtype=float)
    sol = solve_ivp(f, (0.0, config.T_end), u0, method=config.method, jac=jac,
                    rtol=config.rtol, atol=config.atol, t_eval=t_eval)
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integrator failed: {sol.message}", t_fail)

    states = sol.y.T.copy()
    if np.any(states < floor):
        i = int(np.argmax(np.any(states < floor, axis=1)))
        raise IntegrationError("state component fell below -10*atol", float(sol.t[i]))
    states[states < 0] = 0.0

    # dN/dT = 1 - N for N = S + eps Y + R, so N(T) = 1 + (N0 - 1) exp(-T).
    N = states[:, 2] + eps * states[:, 0] + states[:, 4]
    N0 = u0[2] + eps * u0[0] + u0[4]
    drift = float(np.max(np.abs(N - 1.0 - (N0 - 1.0) * np.exp(-sol.t))))
    if drift > 1e-4:
        raise IntegrationError(f"population conservation drift {drift:.3g}", float(sol.t[-1]))
    return TrajectoryRecord(sol.t, states, eps, drift)


def _peaks(t: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima from sign changes of the first difference, refined by a parabola."""
    dy = np.diff(y)
    idx = np.where((dy[:-1] > 0) & (dy[1:] <= 0))[0] + 1
    times, heights = [], []
    for i in idx:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        den = y0 - 2.0 * y1 + y2
        if den >= 0:
            times.append(t[i])
            heights.append(y1)
            continue
        s = 0.5 * (y0 - y2) / den
        h = t[i + 1] - t[i]
        times.append(t[i] + s * h)
        heights.append(y1 - 0.25 * (y0 - y2) * s)
    return np.array(times), np.array(heights)


def classify_attractor(record: TrajectoryRecord, params: ModelParams,
                       policy: AttitudePolicy) -> AttractorClassification:
    """Label the trailing half of a trajectory.

    ``converged_EDE`` needs a flat tail (amplitude below 1e-6) whose mean
    state is within 1e-3 of an endemic equilibrium; ``limit_cycle`` needs a
    visible oscillation whose last peaks agree within 1%.  Anything else is
    ``undecided`` and the caller should extend the horizon.
    """
    half = len(record.times) // 2
    t = record.times[half:]
    Y = record.Y[half:]
    if len(Y) < 5:
        return AttractorClassification("undecided")
    amp = float(np.max(Y) - np.min(Y))
    meanY = float(np.mean(Y))

    if amp > max(1e-3, 1e-3 * meanY):
        pt, ph = _peaks(t, Y)
        if len(ph) >= 3:
            last = ph[-3:]
            spread = float(np.max(np.abs(np.diff(last))) / np.max(last))
            if spread <= 0.01:
                period = float(np.mean(np.diff(pt[-3:])))
                troughs = -_peaks(t, -Y)[1]
                trough = float(troughs[-1]) if len(troughs) else float(np.min(Y))
                return AttractorClassification(
                    "limit_cycle", amplitude=float(last[-1] - trough), period=period,
                    detail={"peaks": len(ph), "peak_spread": spread},
                )
        return AttractorClassification("undecided", amplitude=amp)

    if amp < 1e-6:
        mean_state = np.mean(record.states[half:], axis=0)
        for k, root in enumerate(find_ede_roots(params, policy)):
            exact = polish_equilibrium(params, policy, root.state)
            if np.max(np.abs(mean_state - np.asarray(exact))) <= 1e-3:
                return AttractorClassification(
                    "converged_EDE", target_Y=float(mean_state[0]), amplitude=amp,
                    detail={"root_index": k, "root_Y": root.Y},
                )
    return AttractorClassification("undecided", amplitude=amp)


def simulate_and_classify(params: ModelParams, policy: AttitudePolicy,
                          config: SimulationConfig, max_T_end: float = 160.0):
    """Integrate and classify, doubling the horizon while the result is undecided."""
    cfg = config
    while True:
        rec = integrate(params, policy, cfg)
        cls = classify_attractor(rec, params, policy)
        if cls.kind != "undecided" or cfg.T_end * 2 > max_T_end:
            return rec, cls
        cfg = SimulationConfig(cfg.initial, cfg.T_end * 2, cfg.rtol, cfg.atol,
                               cfg.record_stride, cfg.method)


def bistability_experiment(params: ModelParams, policy: AttitudePolicy, ic1, ic2,
                           T_end: float = 10.0, **kw):
    """Classify the attractors reached from two initial states."""
    out = []
    for ic in (ic1, ic2):
        cfg = SimulationConfig(ScaledState(*ic), T_end=T_end, **kw)
        out.append(simulate_and_classify(params, policy, cfg)[1])
    return tuple(out)
