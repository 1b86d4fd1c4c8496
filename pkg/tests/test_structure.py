import numpy as np
import pytest

from labloop.frontend.registry import MaterialRegistry
from labloop.structure import (
    CifParseError,
    InvalidReps,
    NonPositiveCutoff,
    neighbor_pairs,
    parse_cif,
    write_cif,
)
from labloop.structure.model import Structure, make_supercell

AR_CIF = MaterialRegistry.builtin().get("Ar-fcc").cif_text


def brute_force_pairs(s: Structure, cutoff: float):
    """Oracle: enumerate every image offset in [-2, 2]^3 and filter."""
    cart = s.cart_coords
    n = len(s)
    found = set()
    offsets = [(a, b, c) for a in range(-2, 3) for b in range(-2, 3) for c in range(-2, 3)] \
        if s.periodic else [(0, 0, 0)]
    for i in range(n):
        for j in range(n):
            for off in offsets:
                if i == j and off == (0, 0, 0):
                    continue
                d = np.linalg.norm(cart[j] + np.array(off, float) @ s.lattice - cart[i])
                if d <= cutoff:
                    # canonical key for the unordered pair/image
                    key = min((i, j, off), (j, i, tuple(-o for o in off)))
                    found.add((key[0], key[1], key[2], round(d, 9)))
    return found


def as_canonical_set(pairs):
    out = set()
    for i, j, d, off in pairs:
        key = min((i, j, off), (j, i, tuple(-o for o in off)))
        out.add((key[0], key[1], key[2], round(d, 9)))
    return out


class TestParseCif:
    def test_bundled_ar_fcc(self):
        s = parse_cif(AR_CIF)
        assert len(s) == 4
        assert set(s.species) == {"Ar"}
        assert np.allclose(s.lattice, np.diag([5.40, 5.40, 5.40]))
        expected = {(0.0, 0.0, 0.0), (0.5, 0.5, 0.0), (0.5, 0.0, 0.5), (0.0, 0.5, 0.5)}
        got = {tuple(np.round(f, 6)) for f in s.frac_coords}
        assert got == expected

    def test_missing_cell_length_reports_tag(self):
        text = "\n".join(line for line in AR_CIF.splitlines()
                         if not line.startswith("_cell_length_c"))
        with pytest.raises(CifParseError, match="_cell_length_c"):
            parse_cif(text)

    def test_frac_to_cart_cubic(self):
        text = AR_CIF.replace("5.40", "2.0")
        s = parse_cif(text)
        cube_center = [c for f, c in zip(s.frac_coords, s.cart_coords)
                       if np.allclose(f, [0.5, 0.5, 0.0])]
        assert np.allclose(cube_center[0], [1.0, 1.0, 0.0])
        assert np.allclose(s.cart_coords, s.frac_coords @ s.lattice)

    def test_unknown_element_rejected(self):
        with pytest.raises(CifParseError, match="Qq"):
            parse_cif(AR_CIF.replace("Ar 0.5 0.5 0.0", "Qq 0.5 0.5 0.0"))

    def test_zero_atoms_rejected(self):
        head = AR_CIF.split("loop_")[0]
        with pytest.raises(CifParseError, match="zero atoms"):
            parse_cif(head)

    def test_malformed_row_reports_line(self):
        bad = AR_CIF.replace("Ar 0.5 0.5 0.0", "Ar 0.5 0.5")
        with pytest.raises(CifParseError, match="line"):
            parse_cif(bad)

    def test_uncertainty_suffix_accepted(self):
        s = parse_cif(AR_CIF.replace("_cell_length_a   5.40", "_cell_length_a   5.40(2)"))
        assert s.lattice[0, 0] == pytest.approx(5.40)


class TestRoundTrip:
    def test_write_parse_round_trip(self):
        s = parse_cif(AR_CIF)
        again = parse_cif(write_cif(s))
        assert np.allclose(again.lattice, s.lattice, atol=1e-12)
        assert again.species == s.species
        assert np.allclose(again.frac_coords, s.frac_coords, atol=1e-12)

    def test_round_trip_triclinic(self):
        rng = np.random.default_rng(7)
        lattice = np.array([[6.1, 0, 0], [1.3, 5.7, 0], [0.4, 0.9, 7.2]])
        frac = rng.random((5, 3))
        s = Structure(lattice, ("Ar",) * 5, frac)
        again = parse_cif(write_cif(s))
        assert np.allclose(again.lattice, s.lattice, atol=1e-12)
        assert np.allclose(again.frac_coords, s.frac_coords, atol=1e-12)


class TestSupercell:
    def test_atom_count(self):
        s = parse_cif(AR_CIF)
        sc = make_supercell(s, (2, 2, 2))
        assert len(sc) == 32
        assert np.allclose(sc.lattice, s.lattice * 2)

    def test_identity(self):
        s = parse_cif(AR_CIF)
        sc = make_supercell(s, (1, 1, 1))
        assert np.allclose(sc.lattice, s.lattice)
        assert np.allclose(sc.frac_coords, s.frac_coords)

    def test_zero_rep_rejected(self):
        with pytest.raises(InvalidReps):
            make_supercell(parse_cif(AR_CIF), (0, 1, 1))


class TestNeighborPairs:
    def test_fcc_coordination_is_12(self):
        s = parse_cif(AR_CIF)
        pl = neighbor_pairs(s, 4.0)   # nn at a/sqrt(2) = 3.82, next shell at 5.40
        counts = np.zeros(4)
        for i, j, d, off in pl:
            counts[i] += 1
            counts[j] += 1
            assert d == pytest.approx(5.40 / np.sqrt(2), abs=1e-9)
        assert np.all(counts == 12)

    def test_below_minimum_separation_empty(self):
        assert len(neighbor_pairs(parse_cif(AR_CIF), 1.0)) == 0

    def test_nonperiodic_dimer(self):
        s = Structure.from_cartesian(["Ar", "Ar"], [[0, 0, 0], [3.0, 0, 0]])
        pl = neighbor_pairs(s, 5.0)
        assert len(pl) == 1
        (i, j, d, off), = list(pl)
        assert (i, j, off) == (0, 1, (0, 0, 0))
        assert d == pytest.approx(3.0)

    def test_nonpositive_cutoff(self):
        with pytest.raises(NonPositiveCutoff):
            neighbor_pairs(parse_cif(AR_CIF), 0.0)

    def test_matches_brute_force_random_cells(self):
        rng = np.random.default_rng(2024)
        for _ in range(12):
            n = int(rng.integers(2, 9))
            lattice = np.diag(rng.uniform(3.5, 6.0, 3)) + rng.uniform(-0.4, 0.4, (3, 3))
            if np.linalg.det(lattice) < 0:
                lattice[2] *= -1
            s = Structure(lattice, ("Ar",) * n, rng.random((n, 3)))
            cutoff = float(rng.uniform(2.0, 1.7 * min(s.cell_heights())))
            assert as_canonical_set(neighbor_pairs(s, cutoff)) == brute_force_pairs(s, cutoff)

    def test_every_distance_within_cutoff(self):
        pl = neighbor_pairs(parse_cif(AR_CIF), 6.0)
        assert np.all(pl.distance <= 6.0)
