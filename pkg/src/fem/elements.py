"""
Euler-Bernoulli 3-D frame element

Local DOF order per node is (u, v, w, rx, ry, rz); an element has 12 DOFs.
Bending in the local x-y plane uses Iz, bending in the x-z plane uses Iy.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import MeshError, ValidationError

logger = logging.getLogger(__name__)

AXIAL = [0, 6]
TORSION = [3, 9]
BENDING_XY = [1, 5, 7, 11]
BENDING_XZ = [2, 4, 8, 10]

# theta_y = -dw/dx flips the rotation terms of the x-z bending blocks
_XZ_SIGNS = np.diag([1.0, -1.0, 1.0, -1.0])


@dataclass(frozen=True)
class Material:
    E: float
    G: float
    rho: float

    @classmethod
    def isotropic(cls, E: float, poisson: float, rho: float) -> 'Material':
        return cls(E=E, G=E / (2.0 * (1.0 + poisson)), rho=rho)


@dataclass(frozen=True)
class Section:
    """Area, bending inertias, torsion constant and polar mass moment (all per unit rho)"""
    A: float
    Iy: float
    Iz: float
    J: float
    ip: float

    @classmethod
    def rectangle(cls, width: float, height: float) -> 'Section':
        """Solid rectangle; `height` is measured along the local y axis"""
        a, b = max(width, height), min(width, height)
        J = a * b ** 3 * (1.0 / 3.0 - 0.21 * (b / a) * (1.0 - b ** 4 / (12.0 * a ** 4)))
        Iz = width * height ** 3 / 12.0
        Iy = height * width ** 3 / 12.0
        return cls(A=width * height, Iy=Iy, Iz=Iz, J=J, ip=Iy + Iz)


def frame_triad(xa: np.ndarray, xb: np.ndarray, reference: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Rows are the local x, y, z axes in global coordinates.

    The reference vector lies in the local x-y plane; by default global Z,
    or global Y for elements close to vertical.
    """
    axis = np.asarray(xb, dtype=float) - np.asarray(xa, dtype=float)
    length = np.linalg.norm(axis)
    if length <= 0.0:
        raise MeshError("Element has zero length", details={"xa": list(xa), "xb": list(xb)})
    ex = axis / length

    if reference is None:
        reference = np.array([0.0, 1.0, 0.0]) if abs(ex[2]) > 0.9 else np.array([0.0, 0.0, 1.0])
    ez = np.cross(ex, reference)
    norm = np.linalg.norm(ez)
    if norm < 1e-9:
        raise MeshError(
            "Orientation reference is parallel to the element axis",
            details={"axis": ex.tolist(), "reference": list(reference)}
        )
    ez /= norm
    ey = np.cross(ez, ex)
    return np.vstack([ex, ey, ez])


@dataclass
class FrameElement:
    node_a: int
    node_b: int
    E: float
    G: float
    rho: float
    A: float
    Iy: float
    Iz: float
    J: float
    length: float
    triad: np.ndarray
    ip: Optional[float] = None
    group: str = ""

    def __post_init__(self):
        if self.ip is None:
            self.ip = self.Iy + self.Iz
        self.triad = np.asarray(self.triad, dtype=float)
        self.validate()

    def validate(self) -> None:
        """Validate element data"""
        values = {
            "E": self.E, "G": self.G, "rho": self.rho, "A": self.A,
            "Iy": self.Iy, "Iz": self.Iz, "J": self.J, "ip": self.ip,
            "length": self.length,
        }
        bad = {name: value for name, value in values.items() if not value > 0.0}
        if bad:
            raise ValidationError(
                "Element properties must be strictly positive",
                details={"element": (self.node_a, self.node_b), "invalid": bad}
            )
        if self.triad.shape != (3, 3) or not np.allclose(self.triad @ self.triad.T, np.eye(3), atol=1e-10):
            raise ValidationError(
                "Element triad must be a 3x3 orthonormal matrix",
                details={"element": (self.node_a, self.node_b)}
            )

    @classmethod
    def between(
        cls,
        node_a: int,
        node_b: int,
        xa: Sequence[float],
        xb: Sequence[float],
        material: Material,
        section: Section,
        group: str = "",
        reference: Optional[np.ndarray] = None
    ) -> 'FrameElement':
        xa = np.asarray(xa, dtype=float)
        xb = np.asarray(xb, dtype=float)
        return cls(
            node_a=node_a,
            node_b=node_b,
            E=material.E,
            G=material.G,
            rho=material.rho,
            A=section.A,
            Iy=section.Iy,
            Iz=section.Iz,
            J=section.J,
            ip=section.ip,
            length=float(np.linalg.norm(xb - xa)),
            triad=frame_triad(xa, xb, reference),
            group=group,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": [self.node_a, self.node_b],
            "group": self.group,
            "E": self.E, "G": self.G, "rho": self.rho,
            "A": self.A, "Iy": self.Iy, "Iz": self.Iz, "J": self.J, "ip": self.ip,
            "length": self.length,
            "triad": self.triad.tolist(),
        }


def bending_stiffness(EI: float, L: float) -> np.ndarray:
    """(v1, theta1, v2, theta2) with theta = dv/dx"""
    return EI / L ** 3 * np.array([
        [12.0, 6.0 * L, -12.0, 6.0 * L],
        [6.0 * L, 4.0 * L ** 2, -6.0 * L, 2.0 * L ** 2],
        [-12.0, -6.0 * L, 12.0, -6.0 * L],
        [6.0 * L, 2.0 * L ** 2, -6.0 * L, 4.0 * L ** 2],
    ])


def bending_mass(mass_per_length: float, L: float) -> np.ndarray:
    """Consistent translational mass for the Hermite cubic"""
    return mass_per_length * L / 420.0 * np.array([
        [156.0, 22.0 * L, 54.0, -13.0 * L],
        [22.0 * L, 4.0 * L ** 2, 13.0 * L, -3.0 * L ** 2],
        [54.0, 13.0 * L, 156.0, -22.0 * L],
        [-13.0 * L, -3.0 * L ** 2, -22.0 * L, 4.0 * L ** 2],
    ])


def bar_stiffness(k: float) -> np.ndarray:
    return k * np.array([[1.0, -1.0], [-1.0, 1.0]])


def bar_mass(total: float) -> np.ndarray:
    return total / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])


def local_stiffness(elem: FrameElement) -> np.ndarray:
    L = elem.length
    k = np.zeros((12, 12))
    k[np.ix_(AXIAL, AXIAL)] = bar_stiffness(elem.E * elem.A / L)
    k[np.ix_(TORSION, TORSION)] = bar_stiffness(elem.G * elem.J / L)
    k[np.ix_(BENDING_XY, BENDING_XY)] = bending_stiffness(elem.E * elem.Iz, L)
    k[np.ix_(BENDING_XZ, BENDING_XZ)] = _XZ_SIGNS @ bending_stiffness(elem.E * elem.Iy, L) @ _XZ_SIGNS
    return k


def local_mass(elem: FrameElement) -> np.ndarray:
    L = elem.length
    m = elem.rho * elem.A
    mass = np.zeros((12, 12))
    mass[np.ix_(AXIAL, AXIAL)] = bar_mass(m * L)
    mass[np.ix_(TORSION, TORSION)] = bar_mass(elem.rho * elem.ip * L)
    mass[np.ix_(BENDING_XY, BENDING_XY)] = bending_mass(m, L)
    mass[np.ix_(BENDING_XZ, BENDING_XZ)] = _XZ_SIGNS @ bending_mass(m, L) @ _XZ_SIGNS
    return mass


def transformation(elem: FrameElement) -> np.ndarray:
    """12x12 block-diagonal rotation from global to local DOFs"""
    return np.kron(np.eye(4), elem.triad)


def element_matrices(elem: FrameElement) -> Tuple[np.ndarray, np.ndarray]:
    """Global-axis stiffness and consistent mass, both 12x12"""
    elem.validate()
    T = transformation(elem)
    k = T.T @ local_stiffness(elem) @ T
    m = T.T @ local_mass(elem) @ T
    # exact symmetry for the eigensolver
    return 0.5 * (k + k.T), 0.5 * (m + m.T)
