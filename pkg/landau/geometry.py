"""Constant complex structures on the plane parametrized by the upper half-plane.

For sigma = tau1 + i tau2 the complex structure J(sigma) makes dx + sigma dy a
(1,0)-form. With omega = dx ^ dy the metric g = Omega J is

    g  = (1/tau2) [[1, tau1], [tau1, |sigma|^2]],   g~ = g^-1.

A tangent direction V = v1 + i v2 acts as v1 d/dtau1 + v2 d/dtau2.
"""

from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidGeometryError

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
IDENTITY = np.eye(2)


def _check_point(sigma: complex) -> None:
    if not np.isfinite(sigma) or sigma.imag <= 0:
        raise InvalidGeometryError(f"sigma must lie in the upper half-plane, got {sigma}")


def complex_structure(sigma: complex) -> np.ndarray:
    _check_point(sigma)
    t1, t2 = sigma.real, sigma.imag
    return np.array([[-t1, -abs(sigma) ** 2], [1.0, t1]]) / t2


def metric(sigma: complex) -> np.ndarray:
    _check_point(sigma)
    t1, t2 = sigma.real, sigma.imag
    return np.array([[1.0, t1], [t1, abs(sigma) ** 2]]) / t2


def inverse_metric(sigma: complex) -> np.ndarray:
    _check_point(sigma)
    t1, t2 = sigma.real, sigma.imag
    return np.array([[abs(sigma) ** 2, -t1], [-t1, 1.0]]) / t2


def inverse_metric_derivative(sigma: complex, direction: complex) -> np.ndarray:
    """V[g~] from the closed-form partial derivatives in tau1 and tau2."""
    _check_point(sigma)
    t1, t2 = sigma.real, sigma.imag
    d_tau1 = np.array([[2 * t1, -1.0], [-1.0, 0.0]]) / t2
    d_tau2 = np.array([[1 - t1 ** 2 / t2 ** 2, t1 / t2 ** 2], [t1 / t2 ** 2, -1 / t2 ** 2]])
    return direction.real * d_tau1 + direction.imag * d_tau2


def holomorphic_projector(sigma: complex) -> np.ndarray:
    """P = (1 - iJ)/2, the projection onto the (1,0) part."""
    return 0.5 * (IDENTITY - 1j * complex_structure(sigma))


def G_tensor(sigma: complex, direction: complex) -> np.ndarray:
    """(2,0) part of -V[g~]."""
    P = holomorphic_projector(sigma)
    return P @ (-inverse_metric_derivative(sigma, direction)) @ P.T


def G_bar_tensor(sigma: complex, direction: complex) -> np.ndarray:
    """(0,2) part of -V[g~]."""
    P = holomorphic_projector(sigma).conj()
    return P @ (-inverse_metric_derivative(sigma, direction)) @ P.T


def commutator_tensor(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Tensor T with [nabla^2_A, nabla^2_B] = -2ik nabla^2_T, i.e. T = K + K^T for K = A Omega B."""
    K = first @ OMEGA @ second
    return K + K.T


@dataclass(frozen=True)
class GeometryData:
    """All constant tensors at one Teichmueller point and one direction."""

    sigma: complex
    direction: complex
    J: np.ndarray
    g: np.ndarray
    g_tilde: np.ndarray
    dg_tilde: np.ndarray
    G: np.ndarray
    G_bar: np.ndarray

    def invariant_residuals(self) -> dict:
        """Max-entry residuals of the structural identities."""
        P = holomorphic_projector(self.sigma)
        eigenvalues = np.linalg.eigvalsh(self.g)
        return {
            "J_squared": float(np.max(np.abs(self.J @ self.J + IDENTITY))),
            "g_symmetric": float(np.max(np.abs(self.g - self.g.T))),
            "g_positive": float(max(0.0, -eigenvalues.min())),
            "g_tilde_inverse": float(np.max(np.abs(self.g_tilde @ self.g - IDENTITY))),
            "G_split": float(np.max(np.abs(self.G + self.G_bar + self.dg_tilde))),
            "G_type": float(np.max(np.abs(P.conj() @ self.G))),
            "G_bar_type": float(np.max(np.abs(P @ self.G_bar))),
        }


def geometry(sigma: complex, direction: complex = 1.0) -> GeometryData:
    """Tensors at sigma for the direction V; checks J^2 = -1 and positivity."""
    sigma = complex(sigma)
    direction = complex(direction)
    data = GeometryData(
        sigma=sigma,
        direction=direction,
        J=complex_structure(sigma),
        g=metric(sigma),
        g_tilde=inverse_metric(sigma),
        dg_tilde=inverse_metric_derivative(sigma, direction),
        G=G_tensor(sigma, direction),
        G_bar=G_bar_tensor(sigma, direction),
    )
    residuals = data.invariant_residuals()
    if residuals["J_squared"] > 1e-9 or residuals["g_positive"] > 0:
        raise InvalidGeometryError(f"convention broken at sigma={sigma}: {residuals}")
    return data


def finite_difference(fn, sigma: complex, direction: complex, h: float):
    """Central difference (f(sigma + hV) - f(sigma - hV)) / 2h."""
    return (fn(sigma + h * direction) - fn(sigma - h * direction)) / (2 * h)
