"""Mean gate fidelity, parameter sweeps, optimal-working-point search,
noise-response fits, and the robustness figure of merit.

The fidelity target is always the adiabatic-limit gate of the same loop;
inputs are pure states on the dark-subspace Bloch sphere, sampled on a
deterministic golden-spiral lattice so runs are reproducible without
seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ModelMismatch,
    NoPeakInWindow,
    TooFewStates,
    UnderdeterminedFit,
)
from .lindblad import (
    DEFAULT_GAMMA0,
    NoiseModel,
    default_step_count,
    high_temperature_noise,
    loop_channel,
)
from .loops import LoopSpec, optimal_time, wedge_order, with_total_time
from .parallel import ordered_map
from .propagators import adiabatic_gate, loop_propagator, start_frame

DEFAULT_STATE_COUNT = 100
PEAK_WINDOW = (0.7, 1.3)
PEAK_TOL = 1e-4
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class InputStateSet:
    """Pure dark-subspace input states with their Bloch angles."""

    states: np.ndarray        # (N, 4) complex unit vectors
    bloch_angles: np.ndarray  # (N, 2) polar/azimuthal pairs

    @property
    def count(self) -> int:
        return self.states.shape[0]

    def bloch_vectors(self) -> np.ndarray:
        th, ph = self.bloch_angles[:, 0], self.bloch_angles[:, 1]
        return np.stack(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1
        )


def _spiral_angles(n: int) -> np.ndarray:
    """Golden-spiral lattice on the Bloch sphere (deterministic)."""
    i = np.arange(n)
    theta = np.arccos(1.0 - 2.0 * (i + 0.5) / n)
    phi = np.mod(2.0 * np.pi * i * _GOLDEN, 2.0 * np.pi)
    return np.stack([theta, phi], axis=1)


def bloch_states(n: int, dark_basis: np.ndarray | None = None) -> InputStateSet:
    """Quasi-uniform pure states cos(t/2)|D0> + e^{i p} sin(t/2)|D1>.

    dark_basis is a 4x2 matrix whose columns span the dark subspace at the
    loop start; default is the standard-family start frame (pole, phi=0),
    where D0 = |0> and D1 = |1>.
    """
    if n < 6:
        raise TooFewStates(f"need at least 6 input states, got {n}")
    if dark_basis is None:
        dark_basis = np.eye(4, dtype=complex)[:, :2]
    angles = _spiral_angles(n)
    amp0 = np.cos(angles[:, 0] / 2.0)
    amp1 = np.exp(1j * angles[:, 1]) * np.sin(angles[:, 0] / 2.0)
    states = amp0[:, None] * dark_basis[:, 0] + amp1[:, None] * dark_basis[:, 1]
    return InputStateSet(states=states, bloch_angles=angles)


def _loop_states(loop: LoopSpec, n_states: int) -> InputStateSet:
    return bloch_states(n_states, dark_basis=start_frame(loop).dark)


def per_state_fidelities(
    loop: LoopSpec,
    noise: NoiseModel,
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    target: np.ndarray | None = None,
) -> np.ndarray:
    """Fidelity of each sampled input against the adiabatic target."""
    states = _loop_states(loop, n_states)
    if target is None:
        target = adiabatic_gate(loop).matrix
    if noise.lambda_sq == 0.0:
        u = loop_propagator(loop).matrix
        overlaps = np.einsum("ni,ij,nj->n", states.states.conj(), target.conj().T @ u, states.states)
        fids = np.abs(overlaps) ** 2
    else:
        channel = loop_channel(loop, noise, steps)
        fids = np.empty(states.count)
        for i, psi in enumerate(states.states):
            sigma0 = np.outer(psi, psi.conj())
            sigma_ad = target @ sigma0 @ target.conj().T
            fids[i] = np.trace(sigma_ad @ channel.apply(sigma0)).real
    return fids


def mean_fidelity(
    loop: LoopSpec,
    noise: NoiseModel,
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    target: np.ndarray | None = None,
) -> float:
    """Bloch-sphere average of Tr{sigma_ad sigma(tau)}."""
    fids = per_state_fidelities(loop, noise, n_states, steps, target)
    value = float(np.mean(fids))
    if not -1e-9 <= value <= 1.0 + 1e-9:
        raise ValueError(f"mean fidelity {value} outside [0, 1]")
    return value


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepCurve:
    """Sampled (Omega*tau, <F>) curve at fixed noise strength."""

    lambda_sq: float
    omega_tau: np.ndarray
    mean_fidelity: np.ndarray
    n_states: int
    steps: int | None
    noise_label: str = ""

    def __post_init__(self) -> None:
        ot = np.asarray(self.omega_tau, dtype=float)
        mf = np.asarray(self.mean_fidelity, dtype=float)
        if ot.shape != mf.shape or ot.ndim != 1:
            raise ValueError("omega_tau and mean_fidelity must be matching 1-d arrays")
        if len(ot) > 1 and not np.all(np.diff(ot) > 0):
            raise ValueError("omega_tau samples must be strictly increasing")
        if np.any(mf < -1e-9) or np.any(mf > 1.0 + 1e-9):
            raise ValueError("mean fidelity outside [0, 1]")
        object.__setattr__(self, "omega_tau", ot)
        object.__setattr__(self, "mean_fidelity", mf)


def _sweep_task(args: tuple) -> float:
    loop, noise, n_states, steps, omega_tau = args
    run = with_total_time(loop, omega_tau / loop.omega_scale)
    return mean_fidelity(run, noise, n_states, steps)


def sweep(
    loop: LoopSpec,
    omega_tau_grid: np.ndarray,
    lambda_sq_list: list[float],
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    noise: NoiseModel | None = None,
) -> list[SweepCurve]:
    """One fidelity curve per coupling strength over a shared time grid.

    `noise` supplies the rate tables; its lambda_sq field is overridden by
    each entry of lambda_sq_list. Grid points fan out to the worker pool;
    reduction order is fixed.
    """
    grid = np.asarray(omega_tau_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("omega_tau grid must be a non-empty 1-d array")
    if len(grid) > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("omega_tau grid must be strictly increasing")
    if noise is None:
        noise = high_temperature_noise(0.0)
    tasks = [
        (loop, noise.with_lambda_sq(lam), n_states, steps, float(ot))
        for lam in lambda_sq_list
        for ot in grid
    ]
    values = ordered_map(_sweep_task, tasks)
    curves = []
    for j, lam in enumerate(lambda_sq_list):
        block = values[j * len(grid) : (j + 1) * len(grid)]
        curves.append(
            SweepCurve(
                lambda_sq=float(lam),
                omega_tau=grid.copy(),
                mean_fidelity=np.array(block),
                n_states=n_states,
                steps=steps,
                noise_label=noise.label,
            )
        )
    return curves


def sweep_curve_to_csv(curve: SweepCurve) -> str:
    """CSV rendering: header plus one row per sample, 12 significant digits."""
    lines = ["omega_tau,mean_fidelity"]
    for ot, mf in zip(curve.omega_tau, curve.mean_fidelity):
        lines.append(f"{ot:.12g},{mf:.12g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Optimal working point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimalPoint:
    """First-revival peak coordinates at fixed noise."""

    tau_star: float
    f_star: float
    lambda_sq: float
    bracket: tuple[float, float]
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "tau_star": self.tau_star,
            "f_star": self.f_star,
            "lambda_sq": self.lambda_sq,
            "bracket": list(self.bracket),
            "tolerance": self.tolerance,
        }


def _golden_section_max(fn, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal function."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while abs(b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc > fd else (d, fd)


def find_optimal_point(
    loop: LoopSpec,
    noise: NoiseModel,
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    window: tuple[float, float] | None = None,
    coarse_points: int = 21,
    tol: float = PEAK_TOL,
) -> OptimalPoint:
    """Locate the first fidelity peak: coarse scan over the window (in
    Omega*tau), then golden-section refinement of the best bracket."""
    omega = loop.omega_scale
    if window is None:
        tau1 = omega * optimal_time(1, wedge_order(loop), omega)
        window = (PEAK_WINDOW[0] * tau1, PEAK_WINDOW[1] * tau1)
    lo, hi = window
    if not (hi > lo > 0):
        raise ValueError(f"invalid search window {window}")
    if steps is None:
        steps = default_step_count(with_total_time(loop, 0.5 * (lo + hi) / omega))

    def f(omega_tau: float) -> float:
        return mean_fidelity(with_total_time(loop, omega_tau / omega), noise, n_states, steps)

    grid = np.linspace(lo, hi, coarse_points)
    values = [f(x) for x in grid]
    best = int(np.argmax(values))
    if best == 0 or best == coarse_points - 1:
        raise NoPeakInWindow(f"no interior maximum in window ({lo}, {hi})")
    bracket = (float(grid[best - 1]), float(grid[best + 1]))
    x_star, f_star = _golden_section_max(f, bracket[0], bracket[1], tol)
    if values[best] > f_star:
        x_star, f_star = float(grid[best]), float(values[best])
    return OptimalPoint(
        tau_star=x_star / omega,
        f_star=f_star,
        lambda_sq=noise.lambda_sq,
        bracket=bracket,
        tolerance=tol,
    )


# ---------------------------------------------------------------------------
# Noise-response fits
# ---------------------------------------------------------------------------

# model id -> (default fixed intercept, polynomial powers of lambda^2,
#              reported sign of each power, coefficient names)
FIT_MODELS = {
    "f_linear": (1.0, (1,), (-1.0,), ("F2",)),
    "f_quartic": (1.0, (1, 2), (-1.0, 1.0), ("F2", "F4")),
    "tau_linear": (None, (1,), (-1.0,), ("tau2",)),
    "tau_cubic": (None, (1, 2, 3), (-1.0, 1.0, -1.0), ("tau2", "tau4", "tau6")),
}


@dataclass(frozen=True)
class FitCoefficient:
    name: str
    value: float
    stderr: float


@dataclass(frozen=True)
class FitResult:
    """Constrained polynomial fit in powers of lambda^2."""

    model: str
    intercept: float
    coefficients: tuple[FitCoefficient, ...]
    residual_norm: float
    x: np.ndarray
    y: np.ndarray

    def coefficient(self, name: str) -> float:
        for c in self.coefficients:
            if c.name == name:
                return c.value
        raise KeyError(name)

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        _, powers, signs, names = FIT_MODELS[self.model]
        out = np.full_like(x, self.intercept)
        for p, s, name in zip(powers, signs, names):
            out = out + s * self.coefficient(name) * x**p
        return out

    def residuals(self) -> np.ndarray:
        return self.y - self.predict(self.x)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "intercept": self.intercept,
            "coefficients": [
                {"name": c.name, "value": c.value, "stderr": c.stderr}
                for c in self.coefficients
            ],
            "residual_norm": self.residual_norm,
        }


def fit_noise_response(
    points: list[tuple[float, float]],
    model: str,
    intercept: float | None = None,
    free_intercept: bool = False,
) -> FitResult:
    """Least squares in powers of lambda^2 with the intercept held fixed.

    For tau models the intercept is the analytic noiseless value and must
    be supplied (in the same units as the y data). free_intercept releases
    the constraint for diagnostics; the fitted intercept then appears as an
    extra coefficient.
    """
    if model not in FIT_MODELS:
        raise ModelMismatch(f"unknown fit model {model!r}")
    default_intercept, powers, signs, names = FIT_MODELS[model]
    if intercept is None:
        intercept = default_intercept
    if intercept is None and not free_intercept:
        raise ValueError(f"model {model!r} needs an explicit intercept")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (lambda_sq, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    n_free = len(powers) + (1 if free_intercept else 0)
    if len(x) < n_free + 1:
        raise UnderdeterminedFit(f"{model} needs at least {n_free + 1} points, got {len(x)}")

    columns = [s * x**p for p, s in zip(powers, signs)]
    if free_intercept:
        columns.append(np.ones_like(x))
        rhs = y
    else:
        rhs = y - intercept
    design = np.stack(columns, axis=1)
    coef, _, _, _ = np.linalg.lstsq(design, rhs, rcond=None)
    resid = rhs - design @ coef
    dof = len(x) - n_free
    sigma_sq = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = sigma_sq * np.linalg.inv(design.T @ design)
    stderr = np.sqrt(np.diag(cov))

    fitted = [
        FitCoefficient(name=name, value=float(c), stderr=float(e))
        for name, c, e in zip(names, coef, stderr)
    ]
    if free_intercept:
        intercept_value = float(coef[-1])
        fitted.append(FitCoefficient("intercept", intercept_value, float(stderr[-1])))
        intercept_out = intercept_value
    else:
        intercept_out = float(intercept)
    return FitResult(
        model=model,
        intercept=intercept_out,
        coefficients=tuple(fitted),
        residual_norm=float(np.linalg.norm(resid)),
        x=x,
        y=y,
    )


def f_of_tau_relation(f_fit: FitResult, tau_fit: FitResult) -> float:
    """Slope of the linear F*(tau*) relation: F2 / (Omega tau2)."""
    if f_fit.model != "f_linear" or tau_fit.model != "tau_linear":
        raise ModelMismatch("f_of_tau_relation needs the two linear fits")
    return f_fit.coefficient("F2") / tau_fit.coefficient("tau2")


# ---------------------------------------------------------------------------
# Robustness and calibration
# ---------------------------------------------------------------------------


def robustness(
    loop: LoopSpec,
    noise: NoiseModel,
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    window: tuple[float, float] | None = None,
) -> float:
    """(F* - F_adiab) / F*, with F_adiab taken at the third revival, where
    the adiabatic limit is effectively reached."""
    omega = loop.omega_scale
    point = find_optimal_point(loop, noise, n_states, steps, window)
    tau3 = optimal_time(3, wedge_order(loop), omega)
    f_adiab = mean_fidelity(with_total_time(loop, tau3), noise, n_states, steps=None)
    return (point.f_star - f_adiab) / point.f_star


def optimal_point_table(
    loop: LoopSpec,
    noise: NoiseModel,
    lambda_sq_list: list[float],
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    window: tuple[float, float] | None = None,
) -> list[OptimalPoint]:
    """Optimal point per coupling strength (shared window and resolution)."""
    return [
        find_optimal_point(loop, noise.with_lambda_sq(lam), n_states, steps, window)
        for lam in lambda_sq_list
    ]


DEFAULT_FIT_LAMBDAS = tuple(np.linspace(1e-4, 1e-3, 7))


def calibrate_gamma0(
    loop: LoopSpec,
    target_f2: float = 6.34,
    lambda_sq_list: tuple[float, ...] = DEFAULT_FIT_LAMBDAS,
    gamma0_init: float | None = None,
    n_states: int = DEFAULT_STATE_COUNT,
    steps: int | None = None,
    max_rounds: int = 3,
    rel_tol: float = 0.02,
) -> tuple[float, FitResult]:
    """Scale the flat rate gamma0 until the fitted F2 matches target_f2.

    The leading fidelity loss is linear in gamma0, so one proportional
    update per round converges immediately for small couplings.
    """
    gamma0 = DEFAULT_GAMMA0 if gamma0_init is None else gamma0_init
    fit = None
    for _ in range(max_rounds):
        noise = high_temperature_noise(0.0, gamma0=gamma0)
        points = [
            (p.lambda_sq, p.f_star)
            for p in optimal_point_table(loop, noise, list(lambda_sq_list), n_states, steps)
        ]
        fit = fit_noise_response(points, "f_linear")
        f2 = fit.coefficient("F2")
        if abs(f2 - target_f2) <= rel_tol * target_f2:
            return gamma0, fit
        gamma0 *= target_f2 / f2
    return gamma0, fit
