"""
Generalized symmetric eigensolution K phi = lambda M phi
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, eigh, lu_factor, lu_solve

from ..exceptions import EigenSolveError

logger = logging.getLogger(__name__)

RIGID_THRESHOLD_HZ = 0.5
RESIDUAL_TOLERANCE = 1e-8
RIGID_BODY_MODES = 6
REFINEMENT_STEPS = 2


@dataclass
class ModalResult:
    """Lowest elastic natural frequencies (Hz), ascending"""
    frequencies_hz: np.ndarray
    rigid_mode_count: int
    rigid_frequencies_hz: np.ndarray = field(default_factory=lambda: np.empty(0))
    mode_shapes: Optional[np.ndarray] = None
    max_residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "frequencies_hz": self.frequencies_hz.tolist(),
            "rigid_mode_count": self.rigid_mode_count,
            "rigid_frequencies_hz": self.rigid_frequencies_hz.tolist(),
            "max_residual": self.max_residual,
        }


def _eigenpairs(Ks: np.ndarray, Ms: np.ndarray, upper: Optional[int]):
    try:
        if upper is None:
            return eigh(Ks, Ms)
        return eigh(Ks, Ms, subset_by_index=[0, upper])
    except LinAlgError as e:
        raise EigenSolveError(
            "Mass matrix is not positive definite",
            details={"error": str(e)}
        ) from e


def relative_residuals(K: np.ndarray, M: np.ndarray, lam: np.ndarray, shapes: np.ndarray) -> np.ndarray:
    """||K phi - lambda M phi|| / ||K phi|| per column"""
    Kphi = K @ shapes
    return np.linalg.norm(Kphi - (M @ shapes) * lam, axis=0) / np.linalg.norm(Kphi, axis=0)


def refine_modes(
    K: np.ndarray,
    M: np.ndarray,
    lam: np.ndarray,
    shapes: np.ndarray,
    steps: int = REFINEMENT_STEPS
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Shift-invert steps with a Rayleigh quotient update, one mode at a time.

    A refined pair replaces the dense one only if its residual is lower.
    Returns eigenvalues in ascending order with matching columns.
    """
    lam = lam.astype(float).copy()
    shapes = shapes.copy()
    best = relative_residuals(K, M, lam, shapes)

    for j in range(lam.size):
        sigma, x = lam[j], shapes[:, j]
        for _ in range(steps):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", LinAlgWarning)
                    factors = lu_factor(K - sigma * M, check_finite=False)
                x = lu_solve(factors, M @ x, check_finite=False)
            except (LinAlgError, ValueError):
                break
            if not np.all(np.isfinite(x)):
                break
            x = x / np.sqrt(x @ M @ x)
            sigma = float(x @ K @ x)
        residual = relative_residuals(K, M, np.array([sigma]), x[:, None])[0]
        if np.isfinite(residual) and residual < best[j]:
            lam[j], shapes[:, j], best[j] = sigma, x, residual

    order = np.argsort(lam, kind="stable")
    return lam[order], shapes[:, order]


def solve_modes(
    K: np.ndarray,
    M: np.ndarray,
    n_elastic: int,
    rigid_threshold_hz: float = RIGID_THRESHOLD_HZ,
    residual_tolerance: float = RESIDUAL_TOLERANCE,
    keep_shapes: bool = False
) -> ModalResult:
    """
    Lowest `n_elastic` elastic frequencies; modes below the rigid threshold are dropped.

    The pencil is equilibrated with diag(M)^-1/2 before the dense solve,
    which leaves the eigenvalues unchanged. Retained elastic pairs are then
    refined against the original K and M; EigenSolveError is raised if the
    relative residual still exceeds `residual_tolerance`.
    """
    ndof = K.shape[0]
    if n_elastic < 1:
        raise EigenSolveError("At least one elastic mode must be requested", details={"n_elastic": n_elastic})

    diag = np.diag(M)
    if np.any(diag <= 0.0):
        raise EigenSolveError(
            "Mass matrix is not positive definite",
            details={"non_positive_diagonal": np.flatnonzero(diag <= 0.0).tolist()}
        )
    scale = 1.0 / np.sqrt(diag)
    Ks = K * np.outer(scale, scale)
    Ms = M * np.outer(scale, scale)

    upper = n_elastic + 2 * RIGID_BODY_MODES - 1
    lam, phi = _eigenpairs(Ks, Ms, upper if upper < ndof - 1 else None)
    freqs = np.sqrt(np.clip(lam, 0.0, None)) / (2.0 * np.pi)
    elastic = freqs >= rigid_threshold_hz

    if elastic.sum() < n_elastic and lam.size < ndof:
        lam, phi = _eigenpairs(Ks, Ms, None)
        freqs = np.sqrt(np.clip(lam, 0.0, None)) / (2.0 * np.pi)
        elastic = freqs >= rigid_threshold_hz

    if elastic.sum() < n_elastic:
        raise EigenSolveError(
            "Not enough elastic modes",
            details={"requested": n_elastic, "available": int(elastic.sum()), "ndof": ndof}
        )

    selected = np.flatnonzero(elastic)[:n_elastic]
    lam_sel, shapes = refine_modes(K, M, lam[selected], scale[:, None] * phi[:, selected])

    residual = relative_residuals(K, M, lam_sel, shapes)
    max_residual = float(residual.max())
    if max_residual > residual_tolerance:
        logger.error(f"Eigen residual {max_residual:.3e} above tolerance {residual_tolerance:.1e}")
        raise EigenSolveError(
            "Eigenpairs did not reach the residual tolerance",
            details={"max_residual": max_residual, "tolerance": residual_tolerance}
        )

    return ModalResult(
        frequencies_hz=np.sqrt(np.clip(lam_sel, 0.0, None)) / (2.0 * np.pi),
        rigid_mode_count=int(np.count_nonzero(~elastic)),
        rigid_frequencies_hz=freqs[~elastic],
        mode_shapes=shapes if keep_shapes else None,
        max_residual=max_residual,
    )
