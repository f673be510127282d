"""Tests for the frame finite element model"""

from dataclasses import replace

import numpy as np
import numpy.testing as npt
import pytest

from src.exceptions import DimensionMismatchError, EigenSolveError, MeshError, ValidationError
from src.fem.assembly import Mesh, assemble, constrain
from src.fem.elements import FrameElement, Material, Section, element_matrices
from src.fem.garteur import MeshSettings, ParameterVector, build_garteur, model_frequencies
from src.fem.modal import refine_modes, relative_residuals, solve_modes

E = 70e9
RHO = 2700.0
SIDE = 0.05


def beam_mesh(n: int, length: float = 2.0, rho: float = RHO) -> Mesh:
    """Straight square-section beam along X"""
    material = Material.isotropic(E, 0.3, rho)
    section = Section.rectangle(SIDE, SIDE)
    mesh = Mesh()
    ids = [mesh.add_node([length * i / n, 0.0, 0.0]) for i in range(n + 1)]
    for a, b in zip(ids[:-1], ids[1:]):
        mesh.elements.append(FrameElement.between(a, b, mesh.nodes[a], mesh.nodes[b], material, section))
    return mesh


def beam_frequency(beta_l: float, length: float = 2.0) -> float:
    """Euler-Bernoulli bending frequency for a given eigenvalue beta*L"""
    inertia = SIDE ** 4 / 12.0
    area = SIDE ** 2
    return beta_l ** 2 / (2.0 * np.pi * length ** 2) * np.sqrt(E * inertia / (RHO * area))


@pytest.fixture
def skew_element() -> FrameElement:
    return FrameElement.between(
        0, 1, [0.0, 0.0, 0.0], [0.8, 0.3, 0.2],
        Material.isotropic(E, 0.3, RHO), Section.rectangle(0.1, 0.01),
    )


class TestElement:
    def test_symmetric(self, skew_element):
        k, m = element_matrices(skew_element)
        npt.assert_array_equal(k, k.T)
        npt.assert_array_equal(m, m.T)

    @pytest.mark.parametrize("axis", [0, 1, 2])
    def test_translation_has_no_energy(self, skew_element, axis):
        k, _ = element_matrices(skew_element)
        u = np.zeros(12)
        u[[axis, axis + 6]] = 1.0
        assert np.linalg.norm(k @ u) <= 1e-9 * np.linalg.norm(k)

    def test_mass_positive_definite(self, skew_element):
        _, m = element_matrices(skew_element)
        assert np.all(np.linalg.eigvalsh(m) > 0.0)

    def test_axial_entry(self):
        section = Section.rectangle(0.1, 0.01)
        elem = FrameElement.between(0, 1, [0.0, 0.0, 0.0], [0.5, 0.0, 0.0], Material.isotropic(E, 0.3, RHO), section)
        k, _ = element_matrices(elem)
        assert k[0, 0] == pytest.approx(E * section.A / 0.5, rel=1e-12)
        assert k[0, 6] == pytest.approx(-E * section.A / 0.5, rel=1e-12)

    def test_non_positive_property_rejected(self, skew_element):
        with pytest.raises(ValidationError):
            replace(skew_element, Iz=0.0)

    def test_zero_length_rejected(self):
        with pytest.raises(MeshError):
            FrameElement.between(0, 1, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0],
                                 Material.isotropic(E, 0.3, RHO), Section.rectangle(0.1, 0.01))


class TestAssembly:
    def test_single_element_is_identity(self):
        mesh = beam_mesh(1)
        K, M = assemble(mesh)
        k, m = element_matrices(mesh.elements[0])
        npt.assert_array_equal(K, k)
        npt.assert_array_equal(M, m)

    def test_two_elements_null_space(self):
        K, M = assemble(beam_mesh(2))
        assert K.shape == (18, 18)
        eigs = np.linalg.eigvalsh(K)
        assert np.sum(np.abs(eigs) < 1e-10 * eigs.max()) == 6

    def test_density_scales_mass_only(self):
        K1, M1 = assemble(beam_mesh(3, rho=RHO))
        K2, M2 = assemble(beam_mesh(3, rho=3.0 * RHO))
        npt.assert_array_equal(K1, K2)
        npt.assert_allclose(M2, 3.0 * M1, rtol=1e-12)

    def test_disconnected_mesh(self):
        mesh = beam_mesh(2)
        material = Material.isotropic(E, 0.3, RHO)
        a = mesh.add_node([5.0, 0.0, 0.0])
        b = mesh.add_node([6.0, 0.0, 0.0])
        mesh.elements.append(FrameElement.between(a, b, mesh.nodes[a], mesh.nodes[b], material, Section.rectangle(SIDE, SIDE)))
        with pytest.raises(MeshError):
            assemble(mesh)

    def test_unknown_node(self):
        mesh = beam_mesh(1)
        mesh.elements.append(replace(mesh.elements[0], node_b=99))
        with pytest.raises(MeshError):
            assemble(mesh)


class TestModes:
    def test_free_free_beam(self):
        K, M = assemble(beam_mesh(20))
        modes = solve_modes(K, M, 2)
        assert modes.rigid_mode_count == 6
        assert np.all(modes.rigid_frequencies_hz < 0.05)
        assert modes.frequencies_hz[0] == pytest.approx(beam_frequency(4.730041), rel=0.01)
        assert modes.max_residual <= 1e-8

    def test_cantilever(self):
        K, M = assemble(beam_mesh(20))
        Kc, Mc = constrain(K, M, range(6))
        modes = solve_modes(Kc, Mc, 1)
        assert modes.rigid_mode_count == 0
        assert modes.frequencies_hz[0] == pytest.approx(beam_frequency(1.875104), rel=0.01)

    def test_density_scaling_halves_frequencies(self):
        K1, M1 = assemble(beam_mesh(10, rho=RHO))
        K4, M4 = assemble(beam_mesh(10, rho=4.0 * RHO))
        f1 = solve_modes(K1, M1, 6).frequencies_hz
        f4 = solve_modes(K4, M4, 6).frequencies_hz
        npt.assert_allclose(f4, f1 / 2.0, rtol=1e-9)

    def test_ascending(self):
        K, M = assemble(beam_mesh(8))
        freqs = solve_modes(K, M, 10).frequencies_hz
        assert np.all(np.diff(freqs) >= 0.0)

    def test_too_many_modes_requested(self):
        K, M = assemble(beam_mesh(2))
        with pytest.raises(EigenSolveError):
            solve_modes(K, M, 20)

    def test_singular_mass(self):
        K, M = assemble(beam_mesh(2))
        M[0, 0] = 0.0
        with pytest.raises(EigenSolveError):
            solve_modes(K, M, 2)

    def test_mode_shapes_kept_on_request(self):
        K, M = assemble(beam_mesh(4))
        modes = solve_modes(K, M, 3, keep_shapes=True)
        assert modes.mode_shapes.shape == (30, 3)

    def test_residual_above_tolerance_raises(self):
        K, M = assemble(beam_mesh(10))
        with pytest.raises(EigenSolveError) as exc:
            solve_modes(K, M, 2, residual_tolerance=1e-30)
        assert exc.value.details["tolerance"] == 1e-30

    def test_refinement_recovers_perturbed_pair(self):
        K, M = assemble(beam_mesh(10))
        modes = solve_modes(K, M, 2, keep_shapes=True)
        lam = (2.0 * np.pi * modes.frequencies_hz) ** 2
        noise = np.random.default_rng(3).normal(size=modes.mode_shapes.shape)
        shapes = modes.mode_shapes + 1e-4 * np.abs(modes.mode_shapes).max() * noise
        assert relative_residuals(K, M, lam * (1.0 + 1e-6), shapes).max() > 1e-6

        refined_lam, refined = refine_modes(K, M, lam * (1.0 + 1e-6), shapes)
        assert relative_residuals(K, M, refined_lam, refined).max() <= 1e-8
        npt.assert_allclose(refined_lam, lam, rtol=1e-9)


class TestParameterVector:
    def test_round_trip(self):
        p = ParameterVector.initial()
        assert ParameterVector.from_array(p.to_array()) == p
        assert ParameterVector.from_dict(p.to_dict()) == p

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            ParameterVector.from_array([1.0] * 7)

    def test_non_positive(self):
        with pytest.raises(ValidationError):
            replace(ParameterVector.initial(), l_imax=-1.0)


class TestGarteur:
    def test_nominal_wing_sections(self):
        mesh = build_garteur(ParameterVector.initial())
        left = mesh.elements_in("left_wing")
        assert len(left) == MeshSettings().wing_elements
        for elem in left:
            assert (elem.Iz, elem.Iy, elem.J) == (8.3e-9, 8.3e-7, 4.0e-8)

    def test_fin_minor_inertia(self):
        p = replace(ParameterVector.initial(), vtp_imin=9.0e-9)
        assert all(e.Iz == 9.0e-9 for e in build_garteur(p).elements_in("vertical_tail"))

    def test_right_torsion_is_local(self):
        base = build_garteur(ParameterVector.initial())
        changed = build_garteur(replace(ParameterVector.initial(), r_itors=5.0e-8))
        for a, b in zip(base.elements, changed.elements):
            if a.group == "right_wing":
                assert b.J == 5.0e-8
                assert (a.Iz, a.Iy) == (b.Iz, b.Iy)
            else:
                assert a.to_dict() == b.to_dict()

    def test_density_applies_everywhere(self):
        mesh = build_garteur(replace(ParameterVector.initial(), rho=2500.0))
        assert {e.rho for e in mesh.elements} == {2500.0}

    def test_pure(self):
        a = build_garteur(ParameterVector.initial())
        b = build_garteur(ParameterVector.initial())
        assert a.to_dict() == b.to_dict()

    def test_odd_tail_count_rejected(self):
        with pytest.raises(ValidationError):
            MeshSettings(horizontal_tail_elements=3)

    def test_six_rigid_modes(self):
        modes = model_frequencies(ParameterVector.initial())
        assert modes.rigid_mode_count == 6
        assert np.all(modes.rigid_frequencies_hz < 0.05)
        assert modes.max_residual <= 1e-8

    def test_nominal_frequencies_are_plausible(self):
        freqs = model_frequencies(ParameterVector.initial()).frequencies_hz
        assert freqs.size == 10
        assert 1.0 < freqs[0] < 10.0
        assert freqs[-1] < 1000.0
        assert np.all(np.diff(freqs) >= 0.0)

    def test_density_doubling(self):
        p = ParameterVector.initial()
        f1 = model_frequencies(p).frequencies_hz
        f2 = model_frequencies(replace(p, rho=2.0 * p.rho)).frequencies_hz
        npt.assert_allclose(f2, f1 / np.sqrt(2.0), rtol=1e-9)

    @pytest.mark.parametrize("factor", [1.02, 1.1, 1.25])
    def test_stiffer_sections_raise_frequencies(self, factor):
        p = ParameterVector.initial()
        stiffer = ParameterVector.from_array(np.concatenate([[p.rho], p.to_array()[1:] * factor]))
        f0 = model_frequencies(p).frequencies_hz
        f1 = model_frequencies(stiffer).frequencies_hz
        assert np.all(f1 >= f0 * (1.0 - 1e-9))

    def test_renumbering_invariance(self):
        mesh = build_garteur(ParameterVector.initial())
        reordered = Mesh(
            nodes={k: mesh.nodes[k] for k in reversed(list(mesh.nodes))},
            elements=mesh.elements,
        )
        f_a = solve_modes(*assemble(mesh), 10).frequencies_hz
        f_b = solve_modes(*assemble(reordered), 10).frequencies_hz
        npt.assert_allclose(f_b, f_a, rtol=1e-9)

    def test_refinement_converged(self):
        settings = MeshSettings()
        coarse = model_frequencies(ParameterVector.initial(), settings=settings).frequencies_hz
        fine = model_frequencies(ParameterVector.initial(), settings=settings.refined(2)).frequencies_hz
        npt.assert_allclose(fine, coarse, rtol=0.005)
