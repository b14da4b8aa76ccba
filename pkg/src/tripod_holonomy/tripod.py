"""Four-level tripod system: Hamiltonian, spherical control parametrization,
and the analytic dark/bright eigenframe with its time derivative.

Basis ordering is fixed globally: index 0 -> |0>, 1 -> |1>, 2 -> |a>
(ancilla), 3 -> |e> (excited). The lower three levels couple to |e> through
real Rabi frequencies; the two zero-energy dark states span the
computational subspace.

The eigenframe is always the closed-form expression in the chosen gauge,
never a numerical eigensolver output: this keeps it smooth along any
control path and makes the transport generator piecewise constant on
meridian and equator arcs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Global basis ordering used by every module.
STATE_0 = 0
STATE_1 = 1
STATE_ANCILLA = 2
STATE_EXCITED = 3
LEVEL_LABELS = ("0", "1", "a", "e")
DIM = 4

# Tolerance for eigenframe orthonormality and eigenvector residuals.
FRAME_TOL = 1e-11


@dataclass(frozen=True)
class SphericalPoint:
    """Point on the control sphere of radius omega (hbar = 1).

    theta in [0, pi], phi in [0, 2*pi); omega > 0 is the constant energy
    gap between bright and dark states.
    """

    theta: float
    phi: float
    omega: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise ValueError("angles must be finite")
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise ValueError("omega must be positive and finite")


@dataclass(frozen=True)
class EigenFrame:
    """Instantaneous eigenbasis, columns ordered (D0, D1, D+, D-).

    D0, D1 are the zero-energy dark states; D+/- the bright states at
    +/- omega. `matrix` is the 4x4 with these vectors as columns.
    """

    matrix: np.ndarray
    omega: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.omega, -self.omega])

    @property
    def dark(self) -> np.ndarray:
        """4x2 block (D0, D1)."""
        return self.matrix[:, :2]


def rabi_from_angles(p: SphericalPoint) -> tuple[float, float, float]:
    """Rabi triple (omega_0, omega_1, omega_a) for a control point."""
    s, c = np.sin(p.theta), np.cos(p.theta)
    return (
        p.omega * s * np.sin(p.phi),
        p.omega * s * np.cos(p.phi),
        p.omega * c,
    )


def hamiltonian(p: SphericalPoint) -> np.ndarray:
    """4x4 coupling Hamiltonian |e>(w0<0| + w1<1| + wa<a|) + h.c."""
    w0, w1, wa = rabi_from_angles(p)
    h = np.zeros((DIM, DIM), dtype=complex)
    h[STATE_EXCITED, STATE_0] = w0
    h[STATE_EXCITED, STATE_1] = w1
    h[STATE_EXCITED, STATE_ANCILLA] = wa
    h[STATE_0, STATE_EXCITED] = w0
    h[STATE_1, STATE_EXCITED] = w1
    h[STATE_ANCILLA, STATE_EXCITED] = wa
    return h


def _frame_columns(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Closed-form frame for arrays of angles; returns (..., 4, 4)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    z = np.zeros_like(st)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    d0 = np.stack([cp, -sp, z, z], axis=-1)
    d1 = np.stack([ct * sp, ct * cp, -st, z], axis=-1)
    dp = inv_sqrt2 * np.stack([st * sp, st * cp, ct, z + 1.0], axis=-1)
    dm = inv_sqrt2 * np.stack([st * sp, st * cp, ct, z - 1.0], axis=-1)
    return np.stack([d0, d1, dp, dm], axis=-1).astype(complex)


def eigenframe(p: SphericalPoint) -> EigenFrame:
    """Analytic eigenframe at a control point (fixed gauge)."""
    return EigenFrame(matrix=_frame_columns(p.theta, p.phi), omega=p.omega)


def eigenframe_rate(p: SphericalPoint, theta_dot: float, phi_dot: float) -> np.ndarray:
    """Time derivative of the eigenframe columns via the chain rule."""
    if not (np.isfinite(theta_dot) and np.isfinite(phi_dot)):
        raise ValueError("angle rates must be finite")
    st, ct = np.sin(p.theta), np.cos(p.theta)
    sp, cp = np.sin(p.phi), np.cos(p.phi)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)

    # d/dtheta of each column
    d0_t = np.zeros(4)
    d1_t = np.array([-st * sp, -st * cp, -ct, 0.0])
    dpm_t = inv_sqrt2 * np.array([ct * sp, ct * cp, -st, 0.0])
    # d/dphi of each column
    d0_p = np.array([-sp, -cp, 0.0, 0.0])
    d1_p = np.array([ct * cp, -ct * sp, 0.0, 0.0])
    dpm_p = inv_sqrt2 * np.array([st * cp, -st * sp, 0.0, 0.0])

    cols = [
        theta_dot * d0_t + phi_dot * d0_p,
        theta_dot * d1_t + phi_dot * d1_p,
        theta_dot * dpm_t + phi_dot * dpm_p,
        theta_dot * dpm_t + phi_dot * dpm_p,
    ]
    return np.stack(cols, axis=-1).astype(complex)
