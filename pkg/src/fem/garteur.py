"""
GARTEUR-like aeroplane frame model

Fuselage along +X (nose at the origin), wings along Y (left wing +Y),
vertical tail up +Z from the fuselage tail and a T-mounted horizontal tail.
The updating vector sets the density of every element and the wing and
fin inertias; all other section values are fixed model constants.
"""

import logging
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Sequence

import numpy as np

from ..exceptions import DimensionMismatchError, ValidationError
from .assembly import Mesh, assemble
from .elements import FrameElement, Material, Section
from .modal import RIGID_THRESHOLD_HZ, ModalResult, solve_modes

logger = logging.getLogger(__name__)

PARAMETER_NAMES = [
    "rho", "vtp_imin", "l_imin", "l_imax", "l_itors", "r_imin", "r_imax", "r_itors",
]

# Fixed plate sections (100 mm x 10 mm aluminium plate)
PLATE_WIDTH = 0.1
PLATE_THICKNESS = 0.01
PLATE_AREA = PLATE_WIDTH * PLATE_THICKNESS
PLATE_POLAR = PLATE_AREA * (PLATE_WIDTH ** 2 + PLATE_THICKNESS ** 2) / 12.0
PLATE_IMIN = 8.3e-9
PLATE_IMAX = 8.3e-7
PLATE_ITORS = 4.0e-8

FUSELAGE_SECTION = Section.rectangle(width=0.05, height=0.15)


@dataclass
class ParameterVector:
    """Density (kg/m^3) and the seven updated second moments of area (m^4)"""
    rho: float
    vtp_imin: float
    l_imin: float
    l_imax: float
    l_itors: float
    r_imin: float
    r_imax: float
    r_itors: float

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        bad = {f.name: getattr(self, f.name) for f in fields(self) if not getattr(self, f.name) > 0.0}
        if bad:
            raise ValidationError(
                "Updating parameters must be strictly positive",
                details={"invalid": bad}
            )

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in PARAMETER_NAMES], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> 'ParameterVector':
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size != len(PARAMETER_NAMES):
            raise DimensionMismatchError(
                f"Expected {len(PARAMETER_NAMES)} parameters, got {values.size}",
                details={"expected": len(PARAMETER_NAMES), "actual": int(values.size)}
            )
        return cls(**{name: float(v) for name, v in zip(PARAMETER_NAMES, values)})

    @classmethod
    def initial(cls) -> 'ParameterVector':
        """Nominal model values"""
        return cls(
            rho=2700.0,
            vtp_imin=8.3e-9,
            l_imin=8.3e-9,
            l_imax=8.3e-7,
            l_itors=4.0e-8,
            r_imin=8.3e-9,
            r_imax=8.3e-7,
            r_itors=4.0e-8,
        )

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ParameterVector':
        return cls(**{name: float(data[name]) for name in PARAMETER_NAMES})


@dataclass
class MeshSettings:
    """Element counts, geometry and material constants of the frame model"""
    fuselage_elements: int = 12
    wing_elements: int = 12
    vertical_tail_elements: int = 4
    horizontal_tail_elements: int = 4
    fuselage_length: float = 1.5
    wing_span: float = 3.0
    wing_root_x: float = 0.5
    vertical_tail_height: float = 0.4
    horizontal_tail_span: float = 0.8
    youngs_modulus: float = 70e9
    poisson: float = 0.3

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        counts = {
            "fuselage_elements": self.fuselage_elements,
            "wing_elements": self.wing_elements,
            "vertical_tail_elements": self.vertical_tail_elements,
            "horizontal_tail_elements": self.horizontal_tail_elements,
        }
        bad = {k: v for k, v in counts.items() if v < 1}
        if bad:
            raise ValidationError("Element counts must be positive", details=bad)
        if self.fuselage_elements < 2:
            raise ValidationError(
                "Fuselage needs at least two elements to carry the wing root",
                details={"fuselage_elements": self.fuselage_elements}
            )
        if self.horizontal_tail_elements % 2:
            raise ValidationError(
                "Horizontal tail element count must be even (split left/right)",
                details={"horizontal_tail_elements": self.horizontal_tail_elements}
            )
        if not 0.0 < self.wing_root_x < self.fuselage_length:
            raise ValidationError(
                "Wing root must lie inside the fuselage",
                details={"wing_root_x": self.wing_root_x, "fuselage_length": self.fuselage_length}
            )
        dims = {
            "fuselage_length": self.fuselage_length,
            "wing_span": self.wing_span,
            "vertical_tail_height": self.vertical_tail_height,
            "horizontal_tail_span": self.horizontal_tail_span,
            "youngs_modulus": self.youngs_modulus,
        }
        bad = {k: v for k, v in dims.items() if not v > 0.0}
        if bad:
            raise ValidationError("Geometry and modulus must be positive", details=bad)
        if not 0.0 <= self.poisson < 0.5:
            raise ValidationError("Poisson ratio must be in [0, 0.5)", details={"poisson": self.poisson})

    def refined(self, factor: int = 2) -> 'MeshSettings':
        data = asdict(self)
        for key in ("fuselage_elements", "wing_elements", "vertical_tail_elements", "horizontal_tail_elements"):
            data[key] *= factor
        return MeshSettings(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _plate(iz: float = PLATE_IMIN, iy: float = PLATE_IMAX, j: float = PLATE_ITORS) -> Section:
    return Section(A=PLATE_AREA, Iy=iy, Iz=iz, J=j, ip=PLATE_POLAR)


def _add_line(
    mesh: Mesh,
    start_node: int,
    end: np.ndarray,
    count: int,
    material: Material,
    section: Section,
    group: str
) -> List[int]:
    """Chain of `count` equal elements from an existing node to `end`"""
    start = mesh.nodes[start_node]
    chain = [start_node]
    for k in range(1, count + 1):
        chain.append(mesh.add_node(start + (end - start) * k / count))
    for a, b in zip(chain[:-1], chain[1:]):
        mesh.elements.append(
            FrameElement.between(a, b, mesh.nodes[a], mesh.nodes[b], material, section, group)
        )
    return chain


def build_garteur(p: ParameterVector, settings: MeshSettings = None) -> Mesh:
    """Beam-frame aeroplane with the updating vector mapped onto its sections"""
    p.validate()
    settings = settings or MeshSettings()
    material = Material.isotropic(settings.youngs_modulus, settings.poisson, p.rho)

    mesh = Mesh()
    nose = mesh.add_node([0.0, 0.0, 0.0])

    n_front = min(max(1, round(settings.fuselage_elements * settings.wing_root_x / settings.fuselage_length)),
                  settings.fuselage_elements - 1)
    n_rear = settings.fuselage_elements - n_front
    front = _add_line(mesh, nose, np.array([settings.wing_root_x, 0.0, 0.0]), n_front,
                      material, FUSELAGE_SECTION, "fuselage")
    root = front[-1]
    rear = _add_line(mesh, root, np.array([settings.fuselage_length, 0.0, 0.0]), n_rear,
                     material, FUSELAGE_SECTION, "fuselage")
    tail = rear[-1]

    half_span = settings.wing_span / 2.0
    root_x = settings.wing_root_x
    _add_line(mesh, root, np.array([root_x, half_span, 0.0]), settings.wing_elements,
              material, _plate(p.l_imin, p.l_imax, p.l_itors), "left_wing")
    _add_line(mesh, root, np.array([root_x, -half_span, 0.0]), settings.wing_elements,
              material, _plate(p.r_imin, p.r_imax, p.r_itors), "right_wing")

    fin = _add_line(mesh, tail, np.array([settings.fuselage_length, 0.0, settings.vertical_tail_height]),
                    settings.vertical_tail_elements, material, _plate(iz=p.vtp_imin), "vertical_tail")
    fin_top = fin[-1]

    half_tail = settings.horizontal_tail_span / 2.0
    per_side = settings.horizontal_tail_elements // 2
    top = mesh.nodes[fin_top]
    for side in (1.0, -1.0):
        _add_line(mesh, fin_top, top + np.array([0.0, side * half_tail, 0.0]), per_side,
                  material, _plate(), "horizontal_tail")

    logger.debug(f"Built GARTEUR mesh: {len(mesh.nodes)} nodes, {len(mesh.elements)} elements")
    return mesh


def model_frequencies(
    p: ParameterVector,
    n: int = 10,
    settings: MeshSettings = None,
    rigid_threshold_hz: float = RIGID_THRESHOLD_HZ
) -> ModalResult:
    """The `n` lowest elastic frequencies of the free-free aeroplane"""
    K, M = assemble(build_garteur(p, settings))
    return solve_modes(K, M, n, rigid_threshold_hz=rigid_threshold_hz)
