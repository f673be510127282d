"""Euler-Bernoulli frame finite elements and the GARTEUR-like aeroplane model"""

from .assembly import Mesh, assemble, constrain
from .elements import FrameElement, Material, Section, element_matrices
from .garteur import MeshSettings, ParameterVector, PARAMETER_NAMES, build_garteur, model_frequencies
from .modal import ModalResult, solve_modes

__all__ = [
    'Mesh', 'assemble', 'constrain',
    'FrameElement', 'Material', 'Section', 'element_matrices',
    'MeshSettings', 'ParameterVector', 'PARAMETER_NAMES', 'build_garteur', 'model_frequencies',
    'ModalResult', 'solve_modes',
]
