"""Small 2x2 helpers: rotations, unitarity checks and ZYZ Euler angles."""

from __future__ import annotations

import cmath
import math

import numpy as np

UNITARY_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array(
        [[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=complex
    )


def unitarity_error(m: np.ndarray) -> float:
    """Return max|M^dagger M - I|."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(m) <= tol


def is_pauli_x(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(np.asarray(m) - PAULI_X)) <= tol)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Euler decomposition of a 2x2 unitary.

    Returns ``(phase, beta, gamma, delta)`` such that
    ``u == exp(1j*phase) * rz(beta) @ ry(gamma) @ rz(delta)``.
    """
    u = np.asarray(u, dtype=complex)
    det = complex(np.linalg.det(u))
    phase = cmath.phase(det) / 2
    v = u * cmath.exp(-1j * phase)  # now in SU(2): [[a, b], [-b*, a*]]
    a, b = v[0, 0], v[0, 1]
    gamma = 2 * math.atan2(abs(b), abs(a))
    # Rz(beta) Ry(gamma) Rz(delta) has a = e^{-i(beta+delta)/2} cos(gamma/2)
    # and b = -e^{-i(beta-delta)/2} sin(gamma/2).
    plus = -2 * cmath.phase(a) if abs(a) > 1e-15 else 0.0
    minus = -2 * cmath.phase(-b) if abs(b) > 1e-15 else 0.0
    beta = (plus + minus) / 2
    delta = (plus - minus) / 2
    # the half-angle convention leaves a sign ambiguity; fold it into the phase
    rebuilt = rz(beta) @ ry(gamma) @ rz(delta)
    if np.max(np.abs(rebuilt + v)) < np.max(np.abs(rebuilt - v)):
        phase += math.pi
    return phase, beta, gamma, delta
