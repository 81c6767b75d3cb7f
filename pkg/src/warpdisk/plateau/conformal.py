"""Explicit conformal maps: the Joukowski pair and the Theodorsen solver.

J(zeta) = zeta + rho^2/zeta maps {|zeta| > rho} conformally onto the
complement of the segment [-2*rho, 2*rho] x {0}, sending the unit circle to
the ellipse with semiaxes 1 + rho^2 and 1 - rho^2.  The boundary
correspondence theta -> phi(theta) of the Riemann map onto a star-shaped
domain with polar boundary rho_b(phi) solves the classical fixed point

    phi(theta) = theta + H[log rho_b(phi(.))](theta),

with H the circle conjugation operator; the iteration contracts when
|d log rho_b / d phi| < 1.  Interior values follow from the Schwarz integral
of the boundary modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BranchCutError, ContractionError, DomainError

TWO_PI = 2.0 * math.pi


def joukowski_pair(rho: float):
    """(J, J_inv) for fiber radius rho in (0, 1).

    J_inv picks the branch with |J_inv(w)| >= rho and J_inv(inf) = inf;
    evaluating it strictly inside the branch cut raises BranchCutError
    unless on_cut='accept', which returns the upper-circle limit |.| = rho.
    """
    if not 0.0 < rho < 1.0:
        raise DomainError("fiber radius must lie in (0, 1)")
    rho2 = rho * rho

    def J(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return zeta + rho2 / zeta

    def J_inv(w, on_cut: str = "raise"):
        w = np.asarray(w, dtype=complex)
        # sqrt(w - 2 rho) * sqrt(w + 2 rho) keeps the cut exactly on the segment
        s = np.sqrt(w - 2.0 * rho) * np.sqrt(w + 2.0 * rho)
        zeta = 0.5 * (w + s)
        alt = 0.5 * (w - s)
        swap = np.abs(zeta) < np.abs(alt)
        zeta = np.where(swap, alt, zeta)
        on_segment = (np.abs(w.imag) < 1e-14) & (np.abs(w.real) < 2.0 * rho - 1e-14)
        if np.any(on_segment) and on_cut != "accept":
            raise BranchCutError("J_inv evaluated on the branch cut")
        return zeta

    return J, J_inv


def _conjugate_multiplier(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n)
    mult = -1j * np.sign(k)
    mult[0] = 0.0
    if n % 2 == 0:
        mult[n // 2] = 0.0
    return mult


def _trig_interp(values: np.ndarray, theta, chunk: int = 8192) -> np.ndarray:
    """Spectral evaluation of a periodic grid function at arbitrary angles."""
    n = len(values)
    coeffs = np.fft.rfft(values) / n
    coeffs[1:] *= 2.0
    if n % 2 == 0:
        coeffs[-1] *= 0.5
    k = np.arange(len(coeffs))
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty(th.shape, dtype=float)
    for start in range(0, th.size, chunk):
        sel = slice(start, start + chunk)
        out[sel] = np.real(np.exp(1j * np.outer(th[sel], k)) @ coeffs)
    if np.ndim(theta) == 0:
        return float(out[0])
    return out


@dataclass
class TheodorsenMap:
    """Converged boundary correspondence with an interior evaluator.

    ``thetas`` is the uniform grid on the disk circle, ``phis`` the target
    polar angles phi(theta); g(0) = 0 and g'(0) > 0.  Calling the object on
    points w with |w| < 1 evaluates the Schwarz integral (spectrally accurate
    away from the boundary); boundary points map through the correspondence.
    """

    thetas: np.ndarray
    phis: np.ndarray
    log_radii: np.ndarray
    gprime0: float
    residual: float
    iterations: int
    residual_history: list = field(default_factory=list)

    def boundary(self, theta) -> np.ndarray:
        phi = self.boundary_angle(theta)
        logr = _trig_interp(self.log_radii, theta)
        return np.exp(logr) * np.exp(1j * phi)

    def boundary_angle(self, theta):
        return np.asarray(theta, dtype=float) + _trig_interp(
            self.phis - self.thetas, theta
        )

    def __call__(self, w, chunk: int = 4096) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        out = np.empty_like(flat)
        nodes = np.exp(1j * self.thetas)
        u = self.log_radii
        near = np.abs(flat) >= 1.0 - 1e-9
        out[near] = self.boundary(np.angle(flat[near]))
        far = ~near
        idx = np.nonzero(far)[0]
        for start in range(0, idx.size, chunk):
            sel = idx[start: start + chunk]
            ws = flat[sel][:, None]
            kern = (nodes[None, :] + ws) / (nodes[None, :] - ws)
            log_g = (kern * u[None, :]).mean(axis=1)
            out[sel] = flat[sel] * np.exp(log_g)
        return out.reshape(w.shape)


def theodorsen_map(rho_b, fft_size: int = 1024, tol: float = 1e-12,
                   max_iter: int = 400) -> TheodorsenMap:
    """Conformal map of the disk onto {r < rho_b(phi)} by the classical
    boundary-correspondence iteration.

    ``rho_b`` maps polar angles to boundary radii and must be smooth with
    |d log rho_b/d phi| < 1 (checked numerically; ContractionError otherwise,
    carrying the residual history if the iteration diverges).
    """
    n = int(fft_size)
    thetas = TWO_PI * np.arange(n) / n
    probe = np.log(np.asarray(rho_b(thetas), dtype=float))
    if not np.all(np.isfinite(probe)):
        raise DomainError("boundary radius function must be finite and positive")
    dlog = np.real(np.fft.ifft(np.fft.fft(probe) * 1j * np.fft.fftfreq(n, 1.0 / n)))
    eps = float(np.max(np.abs(dlog)))
    if eps >= 0.999:
        raise ContractionError(
            f"epsilon-condition violated: |d log rho_b/d phi| reaches {eps:.3f}"
        )
    mult = _conjugate_multiplier(n)
    phis = thetas.copy()
    history = []
    residual = math.inf
    for it in range(1, max_iter + 1):
        u = np.log(np.asarray(rho_b(phis), dtype=float))
        conj = np.real(np.fft.ifft(np.fft.fft(u) * mult))
        new_phis = thetas + conj
        residual = float(np.max(np.abs(new_phis - phis)))
        history.append(residual)
        phis = new_phis
        if residual < tol:
            break
        if it > 12 and residual > 2.0 * history[0]:
            raise ContractionError(
                "boundary-correspondence iteration diverged",
                residual_history=history,
            )
    else:
        if residual > math.sqrt(tol):
            raise ContractionError(
                "boundary-correspondence iteration hit the cap",
                residual_history=history,
            )
    log_radii = np.log(np.asarray(rho_b(phis), dtype=float))
    gprime0 = float(np.exp(np.mean(log_radii)))
    return TheodorsenMap(thetas, phis, log_radii, gprime0, residual, it, history)


def ellipse_radius(a: float, b: float):
    """Polar boundary radius of the axis-aligned ellipse x^2/a^2+y^2/b^2=1."""

    def rho_b(phi):
        phi = np.asarray(phi, dtype=float)
        return 1.0 / np.sqrt((np.cos(phi) / a) ** 2 + (np.sin(phi) / b) ** 2)

    return rho_b
