"""Exact and adiabatic propagators for tripod control loops.

The exact propagator uses the factorized form: on each arc the transport
generator (built from the analytic eigenframe) is constant, so the arc
evolution is a product of two matrix exponentials. Arc factors are
assembled in the lab basis, each from its own arc-start frame, and compose
by plain matrix multiplication; a brute-force midpoint integrator provides
an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange
from .linalg import exp_i_hermitian, is_unitary
from .loops import ArcKind, LoopSpec, check_wedge_family, solid_angle
from .tripod import (
    EigenFrame,
    SphericalPoint,
    _frame_columns,
    eigenframe,
    eigenframe_rate,
    hamiltonian,
)

PROPAGATOR_UNITARY_TOL = 1e-10
# Constancy tolerance for the per-arc transport generator.
GENERATOR_CONST_TOL = 1e-9


@dataclass(frozen=True)
class TransportGenerator:
    """Hermitian generator of frame transport, constant along its arc."""

    matrix: np.ndarray
    arc_index: int


@dataclass(frozen=True)
class GatePropagator:
    """Unitary acquired over a full loop, tagged by how it was computed."""

    matrix: np.ndarray
    loop: LoopSpec = field(repr=False)
    kind: str = "exact"  # exact | adiabatic | oracle

    def __post_init__(self) -> None:
        if not is_unitary(self.matrix, PROPAGATOR_UNITARY_TOL):
            raise ValueError("propagator is not unitary to tolerance")


def _arc_start_point(loop: LoopSpec, arc_index: int) -> SphericalPoint:
    if not 0 <= arc_index < len(loop.arcs):
        raise IndexOutOfRange(f"arc index {arc_index} outside 0..{len(loop.arcs) - 1}")
    th, ph = loop.arcs[arc_index].angles(0.0)
    return SphericalPoint(theta=th, phi=ph, omega=loop.omega_scale)


def start_frame(loop: LoopSpec) -> EigenFrame:
    """Eigenframe at the loop's start point (t = 0)."""
    return eigenframe(loop.start_point())


def transport_generator(loop: LoopSpec, arc_index: int) -> TransportGenerator:
    """Lab-basis transport generator of one arc, evaluated at the arc start."""
    return TransportGenerator(
        matrix=transport_generator_at(loop, arc_index, 0.0), arc_index=arc_index
    )


def transport_generator_at(loop: LoopSpec, arc_index: int, s: float) -> np.ndarray:
    """Generator re-evaluated at local arc time s, expressed in the
    arc-start transported frame; constant in s for meridian/equator arcs."""
    if not 0 <= arc_index < len(loop.arcs):
        raise IndexOutOfRange(f"arc index {arc_index} outside 0..{len(loop.arcs) - 1}")
    arc = loop.arcs[arc_index]
    th, ph = arc.angles(s)
    th_dot, ph_dot = arc.rates()
    p = SphericalPoint(theta=th, phi=ph, omega=loop.omega_scale)
    frame_t = eigenframe(p).matrix
    rate_t = eigenframe_rate(p, th_dot, ph_dot)
    gen_frame = -1j * (frame_t.conj().T @ rate_t)
    frame_0 = eigenframe(_arc_start_point(loop, arc_index)).matrix
    return frame_0 @ gen_frame @ frame_0.conj().T


def arc_propagator(loop: LoopSpec, arc_index: int) -> np.ndarray:
    """Exact lab-basis propagator of one arc:
    exp(i dt D) exp(-i dt (H_start + D))."""
    arc = loop.arcs[arc_index]
    dt = arc.duration
    d = transport_generator(loop, arc_index).matrix
    h0 = hamiltonian(_arc_start_point(loop, arc_index))
    return exp_i_hermitian(d, dt) @ exp_i_hermitian(h0 + d, -dt)


def loop_propagator(loop: LoopSpec) -> GatePropagator:
    """Exact propagator of the whole loop (arc 1 applied first)."""
    u = np.eye(4, dtype=complex)
    for i in range(len(loop.arcs)):
        u = arc_propagator(loop, i) @ u
    return GatePropagator(matrix=u, loop=loop, kind="exact")


def _dark_rotation(angle: float) -> np.ndarray:
    """exp(i sigma_y angle) on span{D0, D1}: [[cos, sin], [-sin, cos]]."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def adiabatic_holonomy(loop: LoopSpec) -> np.ndarray:
    """Closed-form adiabatic holonomy on span{D0(0), D1(0)}."""
    return _dark_rotation(solid_angle(loop))


def _arc_angle_grid(arc, m: int) -> tuple[np.ndarray, np.ndarray]:
    moving = np.linspace(arc.start_angle, arc.end_angle, m + 1)
    fixed = np.full(m + 1, arc.fixed_angle)
    if arc.kind is ArcKind.MERIDIAN:
        return moving, fixed
    return np.full(m + 1, np.pi / 2.0), moving


def holonomy_path_ordered(loop: LoopSpec, steps: int = 2000) -> np.ndarray:
    """Holonomy by discrete parallel transport along the loop.

    Accumulates the dark-block frame overlaps between consecutive path
    samples (projected back to the unitary group each step, the Wilson-line
    discretization of the path-ordered connection integral), then applies
    the start/end gauge mismatch. Serves as the numerical cross-check of
    the closed form.
    """
    check_wedge_family(loop)
    w = np.eye(2, dtype=complex)
    for arc in loop.arcs:
        m = max(2, int(round(steps * arc.duration / loop.total_time)))
        thetas, phis = _arc_angle_grid(arc, m)
        frames = _frame_columns(thetas, phis)
        for j in range(m):
            overlap = frames[j + 1].conj().T @ frames[j]
            w = _polar_unitary(overlap[:2, :2]) @ w
    f_start = start_frame(loop).matrix
    th_end, ph_end = loop.arcs[-1].angles(loop.arcs[-1].duration)
    f_end = _frame_columns(np.asarray(th_end), np.asarray(ph_end))
    closure = (f_start.conj().T @ f_end)[:2, :2]
    return closure @ w


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def adiabatic_gate(loop: LoopSpec) -> GatePropagator:
    """Full 4x4 adiabatic-limit gate: holonomy on the dark block plus the
    bright dynamical phases exp(-+ i omega tau), in the lab basis."""
    f0 = start_frame(loop).matrix
    tau = loop.total_time
    omega = loop.omega_scale
    block = np.zeros((4, 4), dtype=complex)
    block[:2, :2] = adiabatic_holonomy(loop)
    block[2, 2] = np.exp(-1j * omega * tau)
    block[3, 3] = np.exp(+1j * omega * tau)
    return GatePropagator(matrix=f0 @ block @ f0.conj().T, loop=loop, kind="adiabatic")


def dark_block(u: np.ndarray, loop: LoopSpec) -> np.ndarray:
    """2x2 block of a lab-basis operator on span{D0(0), D1(0)}."""
    f0 = start_frame(loop).matrix
    return (f0.conj().T @ u @ f0)[:2, :2]


def _ordered_product(stack: np.ndarray) -> np.ndarray:
    """Product stack[n-1] @ ... @ stack[0] by pairwise tree reduction."""
    while stack.shape[0] > 1:
        n = stack.shape[0]
        if n % 2:
            head, tail = stack[:-1], stack[-1]
        else:
            head, tail = stack, None
        paired = np.matmul(head[1::2], head[0::2])
        if tail is not None:
            paired = np.concatenate([paired, tail[None]], axis=0)
        stack = paired
    return stack[0]


def schrodinger_oracle(loop: LoopSpec, steps: int = 100_000) -> GatePropagator:
    """Brute-force propagator: time-ordered product of midpoint-sampled
    step exponentials, second-order accurate in the step size."""
    total = loop.total_time
    u = np.eye(4, dtype=complex)
    for arc in loop.arcs:
        m = max(1, int(round(steps * arc.duration / total)))
        dt = arc.duration / m
        mid = (np.arange(m) + 0.5) * dt
        rate = arc.rate
        moving = arc.start_angle + rate * mid
        if arc.kind is ArcKind.MERIDIAN:
            thetas, phis = moving, np.full(m, arc.fixed_angle)
        else:
            thetas, phis = np.full(m, np.pi / 2.0), moving
        h = _hamiltonian_stack(thetas, phis, loop.omega_scale)
        w, v = np.linalg.eigh(h)
        phase = np.exp(-1j * dt * w)
        step_us = np.einsum("nij,nj,nkj->nik", v, phase, v.conj())
        u = _ordered_product(step_us) @ u
    return GatePropagator(matrix=u, loop=loop, kind="oracle")


def _hamiltonian_stack(thetas: np.ndarray, phis: np.ndarray, omega: float) -> np.ndarray:
    st, ct = np.sin(thetas), np.cos(thetas)
    w0 = omega * st * np.sin(phis)
    w1 = omega * st * np.cos(phis)
    wa = omega * ct
    h = np.zeros((len(thetas), 4, 4), dtype=complex)
    h[:, 3, 0] = w0
    h[:, 0, 3] = w0
    h[:, 3, 1] = w1
    h[:, 1, 3] = w1
    h[:, 3, 2] = wa
    h[:, 2, 3] = wa
    return h
