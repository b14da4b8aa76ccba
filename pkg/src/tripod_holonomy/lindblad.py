"""Time-dependent Lindblad evolution for the driven tripod.

The bath couples to the |0> <-> |e> transition only. Jump operators come
from the eigenoperator decomposition of that coupling in the instantaneous
eigenbasis, at transition frequencies {0, +-Omega, +-2*Omega}; rates and
Lamb shifts are configuration inputs (flat high-temperature table by
default).

The master equation is integrated in the transport picture, where the
coherent generator is piecewise constant. In the coordinates of the
start-frame eigenbasis the pieces are simple:

  - coherent part:  diag(0, 0, +Omega, -Omega) - i * M_arc, with M_arc the
    constant frame-overlap matrix of the arc,
  - jump operators: block-masked F(t)^dag A F(t).

A classical fixed-step 4th-order scheme propagates the full 16x16
superoperator, so one integration serves every input state.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import StepCountTooSmall
from .linalg import is_hermitian
from .loops import LoopSpec
from .tripod import (
    DIM,
    STATE_0,
    STATE_EXCITED,
    SphericalPoint,
    _frame_columns,
    eigenframe,
    eigenframe_rate,
)

FREQUENCY_MULTIPLES = (0, 1, -1, 2, -2)
DEFAULT_GAMMA0 = 0.5

# Lab-basis system-bath coupling operator.
COUPLING = np.zeros((DIM, DIM), dtype=complex)
COUPLING[STATE_0, STATE_EXCITED] = 1.0
COUPLING[STATE_EXCITED, STATE_0] = 1.0

# Frame-column energies in units of Omega: (D0, D1, D+, D-).
_FRAME_ENERGY = np.array([0, 0, 1, -1])
_MASKS = {
    k: ((_FRAME_ENERGY[None, :] - _FRAME_ENERGY[:, None]) == k).astype(float)
    for k in FREQUENCY_MULTIPLES
}
_MASK_STACK = np.stack([_MASKS[k] for k in FREQUENCY_MULTIPLES])

_IDENTITY4 = np.eye(DIM, dtype=complex)
_VEC_IDENTITY = _IDENTITY4.reshape(-1)


@dataclass(frozen=True)
class NoiseModel:
    """Bath coupling strength and rate tables.

    gamma and lamb_shift map frequency multiples k (omega = k * Omega,
    k in {0, +-1, +-2}) to rates in units of inverse time.
    """

    lambda_sq: float
    gamma: dict[int, float] = field(default_factory=dict)
    lamb_shift: dict[int, float] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self) -> None:
        if not (self.lambda_sq >= 0 and np.isfinite(self.lambda_sq)):
            raise ValueError("lambda_sq must be finite and >= 0")
        for k, g in self.gamma.items():
            if k not in FREQUENCY_MULTIPLES:
                raise ValueError(f"gamma keyed by unknown frequency multiple {k}")
            if g < 0:
                raise ValueError("decay rates must be >= 0")
        for k in self.lamb_shift:
            if k not in FREQUENCY_MULTIPLES:
                raise ValueError(f"lamb_shift keyed by unknown frequency multiple {k}")

    def rate(self, k: int) -> float:
        return float(self.gamma.get(k, 0.0))

    def shift(self, k: int) -> float:
        return float(self.lamb_shift.get(k, 0.0))

    def with_lambda_sq(self, lambda_sq: float) -> "NoiseModel":
        return replace(self, lambda_sq=lambda_sq)

    def scaled_rates(self, factor: float) -> "NoiseModel":
        return replace(
            self,
            gamma={k: g * factor for k, g in self.gamma.items()},
            lamb_shift={k: s * factor for k, s in self.lamb_shift.items()},
        )


def high_temperature_noise(
    lambda_sq: float, gamma0: float = DEFAULT_GAMMA0, label: str = "high-T flat"
) -> NoiseModel:
    """Flat rate table gamma(omega) = gamma0, zero Lamb shifts."""
    return NoiseModel(
        lambda_sq=lambda_sq,
        gamma={k: gamma0 for k in FREQUENCY_MULTIPLES},
        lamb_shift={},
        label=label,
    )


def noise_to_dict(noise: NoiseModel) -> dict:
    return {
        "lambda_sq": noise.lambda_sq,
        "gamma": {str(k): v for k, v in noise.gamma.items()},
        "lamb_shift": {str(k): v for k, v in noise.lamb_shift.items()},
        "label": noise.label,
    }


def noise_from_dict(doc: dict) -> NoiseModel:
    return NoiseModel(
        lambda_sq=float(doc["lambda_sq"]),
        gamma={int(k): float(v) for k, v in doc.get("gamma", {}).items()},
        lamb_shift={int(k): float(v) for k, v in doc.get("lamb_shift", {}).items()},
        label=str(doc.get("label", "")),
    )


def noise_to_json(noise: NoiseModel) -> str:
    return json.dumps(noise_to_dict(noise), indent=2)


def noise_from_json(text: str) -> NoiseModel:
    return noise_from_dict(json.loads(text))


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 system density matrix (Hermitian, unit trace)."""

    matrix: np.ndarray
    check: bool = True

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if self.check:
            validate_density(m)

    @classmethod
    def pure(cls, state: np.ndarray) -> "DensityMatrix":
        v = np.asarray(state, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))


def validate_density(
    m: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-10,
    eig_floor: float = -1e-8,
) -> None:
    if m.shape != (DIM, DIM):
        raise ValueError(f"density matrix must be {DIM}x{DIM}")
    if not is_hermitian(m, herm_tol):
        raise ValueError("density matrix is not Hermitian to tolerance")
    if abs(np.trace(m).real - 1.0) > trace_tol or abs(np.trace(m).imag) > trace_tol:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(m).min() < eig_floor:
        raise ValueError("density matrix has an eigenvalue below the positivity floor")


@dataclass(frozen=True)
class JumpOperatorSet:
    """Lab-basis eigenoperators of the coupling at one path point.

    ops maps frequency multiples k to 4x4 operators A_{k*Omega}; the five
    pieces sum back to the bare coupling operator.
    """

    point: SphericalPoint
    ops: tuple[tuple[int, np.ndarray], ...]

    def operator(self, k: int) -> np.ndarray:
        for kk, op in self.ops:
            if kk == k:
                return op
        raise KeyError(k)

    def total(self) -> np.ndarray:
        return sum(op for _, op in self.ops)


def jump_operators(p: SphericalPoint) -> JumpOperatorSet:
    """Eigenoperator decomposition of the coupling at a path point."""
    f = eigenframe(p).matrix
    b = f.conj().T @ COUPLING @ f
    ops = tuple(
        (k, f @ (b * _MASKS[k]) @ f.conj().T) for k in FREQUENCY_MULTIPLES
    )
    return JumpOperatorSet(point=p, ops=ops)


def dissipator_apply(
    ops: JumpOperatorSet, noise: NoiseModel, sigma: DensityMatrix | np.ndarray
) -> np.ndarray:
    """Apply the dissipation superoperator (without the lambda^2 factor)."""
    s = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    out = np.zeros((DIM, DIM), dtype=complex)
    h_ls = np.zeros((DIM, DIM), dtype=complex)
    for k, a in ops.ops:
        ad_a = a.conj().T @ a
        out += noise.rate(k) * (a @ s @ a.conj().T - 0.5 * (ad_a @ s + s @ ad_a))
        h_ls += noise.shift(k) * ad_a
    out += -1j * (h_ls @ s - s @ h_ls)
    return out


# ---------------------------------------------------------------------------
# Superoperator integration in start-frame coordinates
# ---------------------------------------------------------------------------


def default_step_count(loop: LoopSpec) -> int:
    """Resolution giving ~1e-8 propagator error over the tested range."""
    return max(1000, int(np.ceil(60.0 * loop.omega_scale * loop.total_time)))


def _coherent_generator_frame(loop: LoopSpec, arc_index: int) -> np.ndarray:
    """H(0) + D(t,0) of one arc in start-frame coordinates (constant)."""
    arc = loop.arcs[arc_index]
    th, ph = arc.angles(0.0)
    th_dot, ph_dot = arc.rates()
    p = SphericalPoint(theta=th, phi=ph, omega=loop.omega_scale)
    f = eigenframe(p).matrix
    gen = -1j * (f.conj().T @ eigenframe_rate(p, th_dot, ph_dot))
    return np.diag(loop.omega_scale * _FRAME_ENERGY).astype(complex) + gen


def _commutator_superop(h: np.ndarray) -> np.ndarray:
    """Superoperator of -i[h, .] acting on row-major vec(sigma)."""
    return -1j * (np.kron(h, _IDENTITY4) - np.kron(_IDENTITY4, h.T))


def _batched_kron(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    m = x.shape[0]
    return np.einsum("mab,mcd->macbd", x, y).reshape(m, 16, 16)


def _dissipator_superops(arc, local_times: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Dissipator superoperators (no lambda^2 factor) at local arc times,
    in start-frame coordinates: jump operators are block-masked F^dag A F."""
    moving = arc.start_angle + arc.rate * local_times
    if arc.kind.value == "meridian":
        thetas, phis = moving, np.full_like(moving, arc.fixed_angle)
    else:
        thetas, phis = np.full_like(moving, np.pi / 2.0), moving
    frames = _frame_columns(thetas, phis)
    b = np.einsum("mji,jk,mkl->mil", frames.conj(), COUPLING, frames)
    m = len(local_times)
    # stack the five frequency components: (5, m, 4, 4)
    bk = b[None, :, :, :] * _MASK_STACK[:, None, :, :]
    gk = np.einsum("kmji,kmjl->kmil", bk.conj(), bk)
    rates = np.array([noise.rate(k) for k in FREQUENCY_MULTIPLES])
    shifts = np.array([noise.shift(k) for k in FREQUENCY_MULTIPLES])
    eye = np.broadcast_to(_IDENTITY4, (m, DIM, DIM))
    # sandwich term sum_k gamma_k A_k . A_k^dag
    out = np.einsum("k,kmab,kmcd->macbd", rates, bk, bk.conj()).reshape(m, 16, 16)
    # anticommutator and Lamb-shift terms collapse onto weighted sums of G_k
    g_tot = np.einsum("k,kmil->mil", rates, gk)
    out -= 0.5 * (_batched_kron(g_tot, eye) + _batched_kron(eye, g_tot.transpose(0, 2, 1)))
    if np.any(shifts):
        h_ls = np.einsum("k,kmil->mil", shifts, gk)
        out += -1j * (
            _batched_kron(h_ls, eye) - _batched_kron(eye, h_ls.transpose(0, 2, 1))
        )
    return out


@dataclass(frozen=True)
class LoopChannel:
    """Propagated quantum channel of a full loop at fixed noise.

    phi is the 16x16 superoperator propagator in start-frame coordinates;
    apply() maps an initial lab-frame density matrix to the final one.
    """

    loop: LoopSpec
    noise: NoiseModel
    steps: int
    phi: np.ndarray

    def trace_defect(self) -> float:
        """Worst-case |trace(out) - trace(in)| over unit-Frobenius inputs."""
        return float(np.linalg.norm(_VEC_IDENTITY @ self.phi - _VEC_IDENTITY))

    def apply(self, sigma0_lab: np.ndarray) -> np.ndarray:
        f_start = eigenframe(self.loop.start_point()).matrix
        f_end = eigenframe(self.loop.end_point()).matrix
        sigma_frame = f_start.conj().T @ sigma0_lab @ f_start
        final_frame = (self.phi @ sigma_frame.reshape(-1)).reshape(DIM, DIM)
        return f_end @ final_frame @ f_end.conj().T


def loop_channel(loop: LoopSpec, noise: NoiseModel, steps: int | None = None) -> LoopChannel:
    """Integrate the transport-picture master equation over the loop."""
    if steps is None:
        steps = default_step_count(loop)
    if steps < len(loop.arcs):
        raise StepCountTooSmall(f"need at least one step per arc, got {steps}")
    lam = noise.lambda_sq
    dissipative = lam > 0 and (
        any(g != 0 for g in noise.gamma.values())
        or any(s != 0 for s in noise.lamb_shift.values())
    )
    phi = np.eye(16, dtype=complex)
    total = loop.total_time
    for i, arc in enumerate(loop.arcs):
        n = max(1, int(round(steps * arc.duration / total)))
        h = arc.duration / n
        l_unit = _commutator_superop(_coherent_generator_frame(loop, i))
        if dissipative:
            local = np.arange(2 * n + 1) * (h / 2.0)
            local[-1] = arc.duration
            l_all = l_unit[None, :, :] + lam * _dissipator_superops(arc, local, noise)
        else:
            l_all = None
        for j in range(n):
            if l_all is not None:
                la, lb, lc = l_all[2 * j], l_all[2 * j + 1], l_all[2 * j + 2]
            else:
                la = lb = lc = l_unit
            k1 = la @ phi
            k2 = lb @ (phi + (0.5 * h) * k1)
            k3 = lb @ (phi + (0.5 * h) * k2)
            k4 = lc @ (phi + h * k3)
            phi = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    channel = LoopChannel(loop=loop, noise=noise, steps=steps, phi=phi)
    if channel.trace_defect() > 1e-6:
        raise StepCountTooSmall(
            f"trace drift {channel.trace_defect():.2e} above 1e-6; increase steps"
        )
    return channel


def evolve_density(
    loop: LoopSpec,
    noise: NoiseModel,
    sigma0: DensityMatrix | np.ndarray,
    steps: int | None = None,
) -> DensityMatrix:
    """Propagate a density matrix around the loop; returns the lab-frame
    state at loop closure."""
    s0 = sigma0.matrix if isinstance(sigma0, DensityMatrix) else np.asarray(sigma0, dtype=complex)
    validate_density(s0)
    channel = loop_channel(loop, noise, steps)
    out = channel.apply(s0)
    trace_drift = abs(np.trace(out) - 1.0)
    if trace_drift > 1e-6:
        raise StepCountTooSmall(f"trace drift {trace_drift:.2e} above 1e-6; increase steps")
    if not is_hermitian(out, 1e-8):
        raise StepCountTooSmall("evolved state lost Hermiticity; increase steps")
    floor = float(np.linalg.eigvalsh(0.5 * (out + out.conj().T)).min())
    if floor < -1e-6:
        warnings.warn(
            f"evolved state has eigenvalue {floor:.2e} below -1e-6", stacklevel=2
        )
    return DensityMatrix(out, check=False)
