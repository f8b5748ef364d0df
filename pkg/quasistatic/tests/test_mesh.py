import json
import logging
import tempfile
import unittest
from pathlib import Path

import numpy as np

from ..fem import FemSpace
from ..mesh import (
    MeshError,
    SimplicialMesh,
    gating_poincare_constant,
    poincare_constant,
    refine,
    refinement_family,
    save_mesh,
    structured_mesh,
    unit_interval,
    unit_square,
)

logging.getLogger('quasistatic').setLevel(logging.WARNING)


class TestBuilders(unittest.TestCase):
    """Test cases for the structured meshes and refinement"""

    def test_mesh_sizes(self):
        """Test h = 1/n on the interval and sqrt(2)/n on the square"""
        self.assertAlmostEqual(unit_interval(8).h, 1.0 / 8)
        self.assertAlmostEqual(unit_square(4).h, np.sqrt(2.0) / 4)
        self.assertAlmostEqual(unit_square(4).quasiuniformity, 1.0)

    def test_square_counts_and_area(self):
        """Test vertex and cell counts and that the cells tile the square"""
        mesh = unit_square(3)
        self.assertEqual(mesh.num_vertices, 16)
        self.assertEqual(mesh.num_cells, 18)
        self.assertEqual(int(mesh.boundary.sum()), 12)
        self.assertAlmostEqual(float(mesh.volumes.sum()), 1.0)

    def test_red_refinement(self):
        """Test refinement of the 2x2 square keeps the coarse vertices as a prefix"""
        coarse = unit_square(2)
        fine = refine(coarse)
        self.assertEqual(fine.num_cells, 32)
        self.assertEqual(fine.num_vertices, 25)
        self.assertEqual(int(fine.boundary.sum()), 16)
        np.testing.assert_array_equal(fine.vertices[:coarse.num_vertices], coarse.vertices)
        self.assertAlmostEqual(fine.h, coarse.h / 2)
        self.assertAlmostEqual(float(fine.volumes.sum()), 1.0)

    def test_interval_bisection(self):
        """Test bisection of the interval"""
        fine = refine(unit_interval(4))
        self.assertEqual(fine.num_cells, 8)
        self.assertEqual(int(fine.boundary.sum()), 2)
        self.assertAlmostEqual(fine.h, 1.0 / 8)

    def test_refinement_family(self):
        """Test the family holds the base plus levels - 1 refinements"""
        family = refinement_family(unit_interval(2), 3)
        self.assertEqual([mesh.num_cells for mesh in family], [2, 4, 8])
        with self.assertRaises(MeshError):
            refinement_family(unit_interval(2), 0)

    def test_invalid_requests_raise(self):
        """Test that degenerate or unsupported meshes are rejected"""
        with self.assertRaises(MeshError):
            unit_interval(1)
        with self.assertRaises(MeshError):
            structured_mesh(3, 4)
        with self.assertRaises(MeshError):
            SimplicialMesh(vertices=np.zeros((3, 1)), cells=np.array([[0, 5]]), boundary=np.zeros(3, dtype=bool))

    def test_save_mesh_writes_json(self):
        """Test the JSON export lists boundary vertex indices"""
        with tempfile.TemporaryDirectory() as tmp:
            path = save_mesh(unit_interval(2), Path(tmp) / 'mesh.json')
            with open(path) as f:
                document = json.load(f)
        self.assertEqual(document['boundary'], [0, 2])
        self.assertEqual(document['cells'], [[0, 1], [1, 2]])


class TestLocate(unittest.TestCase):
    """Test cases for point location"""

    def test_barycentric_coordinates_reproduce_points(self):
        """Test that located points are recovered from their barycentric coordinates"""
        mesh = unit_square(4)
        points = np.random.default_rng(1).random((40, 2))
        cells, bary = mesh.locate(points)
        recovered = np.einsum('pa,pad->pd', bary, mesh.cell_coordinates[cells])
        np.testing.assert_allclose(recovered, points, atol=1e-12)
        self.assertTrue(np.all(bary >= -1e-10))

    def test_outside_point_raises(self):
        """Test that a point off the mesh is reported"""
        with self.assertRaises(MeshError):
            unit_interval(4).locate(np.array([[1.5]]))


class TestPoincare(unittest.TestCase):
    """Test cases for the discrete Poincare constant"""

    def test_interval_constant(self):
        """Test C_P on the unit interval approaches 1/pi from below"""
        value = poincare_constant(FemSpace(unit_interval(64)))
        self.assertLessEqual(abs(value - 1.0 / np.pi), 1e-4)
        self.assertLess(value, 1.0 / np.pi)

    def test_square_constant(self):
        """Test C_P on the unit square approaches 1/(pi sqrt 2)"""
        value = poincare_constant(FemSpace(unit_square(32)))
        self.assertLessEqual(abs(value - 1.0 / (np.pi * np.sqrt(2.0))), 1e-3)

    def test_constant_grows_under_refinement(self):
        """Test the conforming constants increase towards the continuous one"""
        coarse = poincare_constant(FemSpace(unit_interval(8)))
        fine = poincare_constant(FemSpace(unit_interval(16)))
        self.assertLess(coarse, fine)

    def test_lumped_constant_bounds_from_above(self):
        """Test the lumped and consistent constants bracket 1/pi on a coarse interval"""
        space = FemSpace(unit_interval(8))
        h = 1.0 / 8
        consistent = poincare_constant(space)
        lumped = poincare_constant(space, mass='lumped')
        lam_consistent = 6.0 / h ** 2 * (1.0 - np.cos(np.pi * h)) / (2.0 + np.cos(np.pi * h))
        lam_lumped = 4.0 / h ** 2 * np.sin(np.pi * h / 2.0) ** 2
        self.assertAlmostEqual(consistent, 1.0 / np.sqrt(lam_consistent), places=6)
        self.assertAlmostEqual(lumped, 1.0 / np.sqrt(lam_lumped), places=6)
        self.assertLess(consistent, 1.0 / np.pi)
        self.assertGreater(lumped, 1.0 / np.pi)
        self.assertEqual(gating_poincare_constant(space), lumped)

    def test_unknown_mass_raises(self):
        """Test only consistent and lumped masses exist"""
        with self.assertRaises(MeshError):
            poincare_constant(FemSpace(unit_interval(4)), mass='diagonal')


if __name__ == '__main__':
    unittest.main()
