"""
Mesh container and global matrix assembly
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..exceptions import MeshError
from .elements import FrameElement, element_matrices

logger = logging.getLogger(__name__)

DOFS_PER_NODE = 6


@dataclass
class Mesh:
    """Node coordinates keyed by id (insertion order fixes DOF numbering) and frame elements"""
    nodes: Dict[int, np.ndarray] = field(default_factory=dict)
    elements: List[FrameElement] = field(default_factory=list)

    def add_node(self, xyz: Sequence[float]) -> int:
        node_id = len(self.nodes)
        while node_id in self.nodes:
            node_id += 1
        self.nodes[node_id] = np.asarray(xyz, dtype=float)
        return node_id

    @property
    def node_index(self) -> Dict[int, int]:
        return {node_id: i for i, node_id in enumerate(self.nodes)}

    @property
    def ndof(self) -> int:
        return DOFS_PER_NODE * len(self.nodes)

    def node_dofs(self, node_id: int) -> np.ndarray:
        i = self.node_index[node_id]
        return np.arange(DOFS_PER_NODE * i, DOFS_PER_NODE * (i + 1))

    def element_dofs(self, elem: FrameElement) -> np.ndarray:
        return np.concatenate([self.node_dofs(elem.node_a), self.node_dofs(elem.node_b)])

    def elements_in(self, group: str) -> List[FrameElement]:
        return [e for e in self.elements if e.group == group]

    def to_dict(self) -> Dict[str, Any]:
        """Structured dump for inspection"""
        return {
            "nodes": {str(k): v.tolist() for k, v in self.nodes.items()},
            "elements": [e.to_dict() for e in self.elements],
            "ndof": self.ndof,
        }


def check_connected(mesh: Mesh) -> None:
    """A free-free mesh must form a single connected component"""
    if not mesh.nodes or not mesh.elements:
        raise MeshError("Mesh needs at least one element")

    index = mesh.node_index
    missing = {n for e in mesh.elements for n in (e.node_a, e.node_b)} - set(index)
    if missing:
        raise MeshError(
            "Elements reference unknown nodes",
            details={"nodes": sorted(missing)}
        )

    rows = [index[e.node_a] for e in mesh.elements]
    cols = [index[e.node_b] for e in mesh.elements]
    n = len(index)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    count, labels = connected_components(graph, directed=False)
    if count > 1:
        raise MeshError(
            "Mesh is disconnected",
            details={"components": int(count), "sizes": np.bincount(labels).tolist()}
        )


def assemble(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray]:
    """Dense global stiffness and mass, 6 DOFs per node"""
    check_connected(mesh)

    ndof = mesh.ndof
    K = np.zeros((ndof, ndof))
    M = np.zeros((ndof, ndof))
    for elem in mesh.elements:
        k, m = element_matrices(elem)
        dofs = mesh.element_dofs(elem)
        K[np.ix_(dofs, dofs)] += k
        M[np.ix_(dofs, dofs)] += m

    logger.debug(f"Assembled {len(mesh.elements)} elements, {ndof} DOFs")
    return K, M


def constrain(K: np.ndarray, M: np.ndarray, fixed_dofs: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Remove fixed DOFs (clamped supports)"""
    free = np.setdiff1d(np.arange(K.shape[0]), np.asarray(fixed_dofs, dtype=int))
    return K[np.ix_(free, free)], M[np.ix_(free, free)]
