from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_random_hamiltonian
from sqdkit.configurations import (
    ALPHA,
    BETA,
    Configuration,
    ExcitationOperator,
    MalformedOperatorError,
    Sector,
    SectorError,
    SubspaceBasis,
    enumerate_sector,
    reference_configuration,
)
from sqdkit.fockspace import DenseFock, dense_hamiltonian
from sqdkit.hamiltonian import (
    FcidumpError,
    Hamiltonian,
    SparseState,
    apply_operator,
    build_subspace_operator,
    connected_configurations,
    diagonal_element,
    hamiltonian_terms,
    hubbard_chain,
    matrix_element,
    overlap,
    parse_fcidump,
    write_fcidump,
)

SINGLE_ORBITAL_DUMP = """\
 &FCI NORB=1,NELEC=2,MS2=0,
  ORBSYM=1,
  ISYM=1,
 &END
 2.0 1 1 1 1
 -1.0 1 1 0 0
 0.5 0 0 0 0
"""


class TestFcidump:
    def test_single_orbital_diagonal(self):
        data = parse_fcidump(SINGLE_ORBITAL_DUMP)
        assert data.sector == Sector(1, 1, 1)
        assert data.duplicates == 0
        doubly = Configuration(0b1, 0b1)
        # E0 + 2 h11 + (11|11) = 0.5 - 2.0 + 2.0
        assert diagonal_element(data.hamiltonian, doubly) == pytest.approx(0.5, abs=1e-14)

    def test_symmetry_completion(self):
        text = " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n 0.7 1 2 1 1\n"
        eri = parse_fcidump(text).hamiltonian.eri
        for slot in [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]:
            assert eri[slot] == 0.7

    def test_sector_hint(self):
        text = " &FCI NORB=8,NELEC=10,MS2=0,\n &END\n"
        assert parse_fcidump(text).sector == Sector(8, 5, 5)

    def test_fortran_exponents(self):
        text = " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 1.5D-03 1 1 0 0\n"
        assert parse_fcidump(text).hamiltonian.h[0, 0] == 1.5e-3

    def test_duplicate_records_last_wins(self):
        text = " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 1.0 1 1 0 0\n 2.0 1 1 0 0\n"
        data = parse_fcidump(text)
        assert data.hamiltonian.h[0, 0] == 2.0
        assert data.duplicates == 1

    @pytest.mark.parametrize(
        "text",
        [
            "NORB=2\n 1.0 1 1 0 0\n",  # no &FCI header
            " &FCI NELEC=2,MS2=0,\n &END\n",  # missing NORB
            " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 1.0 2 1 0 0\n",  # index range
            " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n abc 1 1 0 0\n",  # non-numeric
            " &FCI NORB=1,NELEC=2,MS2=1,\n &END\n",  # odd NELEC+MS2
            " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 1.0 1 1 0\n",  # ragged record
        ],
    )
    def test_malformed_inputs(self, text):
        with pytest.raises(FcidumpError):
            parse_fcidump(text)

    def test_write_parse_round_trip_bit_exact(self):
        hamiltonian = make_random_hamiltonian(3, seed=23)
        sector = Sector(3, 2, 1)
        buffer = io.StringIO()
        write_fcidump(hamiltonian, sector, buffer)
        data = parse_fcidump(buffer.getvalue())
        assert data.sector == sector
        assert data.hamiltonian.e0 == hamiltonian.e0
        assert np.array_equal(data.hamiltonian.h, hamiltonian.h)
        assert np.array_equal(data.hamiltonian.eri, hamiltonian.eri)


class TestHubbard:
    def test_two_site_u0_ground(self):
        hamiltonian = hubbard_chain(2, 1.0, 0.0)
        basis = enumerate_sector(Sector(2, 1, 1))
        evals = np.linalg.eigvalsh(build_subspace_operator(hamiltonian, basis).to_matrix())
        assert evals[0] == pytest.approx(-2.0, abs=1e-12)

    def test_two_site_analytic_singlet_triplet(self):
        u, t = 4.0, 1.0
        hamiltonian = hubbard_chain(2, t, u)
        basis = enumerate_sector(Sector(2, 1, 1))
        evals = np.linalg.eigvalsh(build_subspace_operator(hamiltonian, basis).to_matrix())
        singlet = (u - np.sqrt(u * u + 16 * t * t)) / 2
        assert evals[0] == pytest.approx(singlet, abs=1e-12)
        assert evals[1] == pytest.approx(0.0, abs=1e-12)  # lowest triplet

    def test_periodic_single_site_error(self):
        with pytest.raises(ValueError):
            hubbard_chain(1, 1.0, 0.0, periodic=True)
        with pytest.raises(ValueError):
            hubbard_chain(0, 1.0, 0.0)

    def test_onsite_interaction_structure(self):
        hamiltonian = hubbard_chain(3, 0.7, 2.5)
        assert hamiltonian.eri[1, 1, 1, 1] == 2.5
        assert hamiltonian.eri[0, 1, 0, 1] == 0.0
        assert hamiltonian.h[0, 1] == -0.7
        assert hamiltonian.h[0, 2] == 0.0


class TestMatrixElement:
    def test_vacuum_diagonal(self):
        hamiltonian = make_random_hamiltonian(2, seed=1)
        vac = Configuration(0, 0)
        assert matrix_element(hamiltonian, vac, vac) == hamiltonian.e0

    def test_degree_three_vanishes(self):
        hamiltonian = make_random_hamiltonian(6, seed=2)
        x = Configuration(0b000111, 0b000011)
        all_alpha = Configuration(0b111000, 0b000011)  # three alpha moves
        assert matrix_element(hamiltonian, x, all_alpha) == 0.0
        mixed = Configuration(0b011001, 0b000101)  # two alpha moves + one beta move
        assert matrix_element(hamiltonian, x, mixed) == 0.0

    def test_sector_mismatch_error(self):
        hamiltonian = make_random_hamiltonian(2, seed=4)
        with pytest.raises(SectorError):
            matrix_element(hamiltonian, Configuration(0b1, 0b1), Configuration(0b11, 0b1))

    @pytest.mark.parametrize("seed", [7, 8])
    def test_exhaustive_oracle_equivalence_m3(self, seed):
        hamiltonian = make_random_hamiltonian(3, seed=seed)
        oracle = DenseFock(3)
        dense = dense_hamiltonian(hamiltonian, oracle)
        for sector in [Sector(3, 2, 1), Sector(3, 1, 1), Sector(3, 3, 2)]:
            basis = enumerate_sector(sector)
            for x in basis:
                col = dense[:, oracle.index_of(x)]
                for y in basis:
                    assert matrix_element(hamiltonian, x, y) == pytest.approx(
                        col[oracle.index_of(y)], abs=5e-13
                    )

    def test_hubbard_pairs_match_oracle(self):
        hamiltonian = hubbard_chain(3, 1.0, 4.0)
        oracle = DenseFock(3)
        dense = dense_hamiltonian(hamiltonian, oracle)
        basis = enumerate_sector(Sector(3, 2, 2))
        for x in basis:
            for y in basis:
                assert matrix_element(hamiltonian, x, y) == pytest.approx(
                    dense[oracle.index_of(y), oracle.index_of(x)], abs=1e-12
                )


class TestConnectedConfigurations:
    def test_trivial_hamiltonian_only_diagonal(self):
        hamiltonian = hubbard_chain(3, 0.0, 0.0)
        config = reference_configuration(Sector(3, 2, 1))
        rows = connected_configurations(hamiltonian, config)
        assert rows == [(config, 0.0)]

    def test_row_matches_dense_action(self):
        hamiltonian = make_random_hamiltonian(3, seed=9)
        oracle = DenseFock(3)
        dense = dense_hamiltonian(hamiltonian, oracle)
        for config in enumerate_sector(Sector(3, 2, 1)):
            expected = dense @ oracle.basis_vector(config)
            got = np.zeros(oracle.dim)
            seen = set()
            for z, value in connected_configurations(hamiltonian, config):
                assert z not in seen
                seen.add(z)
                got[oracle.index_of(z)] = value
            np.testing.assert_allclose(got, expected, atol=5e-13)

    def test_row_norm_equals_dense(self):
        hamiltonian = make_random_hamiltonian(3, seed=10)
        oracle = DenseFock(3)
        dense = dense_hamiltonian(hamiltonian, oracle)
        config = reference_configuration(Sector(3, 2, 2))
        values = np.array([v for _, v in connected_configurations(hamiltonian, config)])
        expected = np.linalg.norm(dense @ oracle.basis_vector(config))
        assert np.sqrt((values**2).sum()) == pytest.approx(expected, rel=1e-12)

    def test_count_bound(self):
        hamiltonian = make_random_hamiltonian(4, seed=12)
        sector = Sector(4, 2, 2)
        singles = 2 * sector.n_alpha * (4 - sector.n_alpha)
        same_spin_pairs = 2 * 1 * 1  # C(2,2) occupied pairs x C(2,2) virtual pairs per spin
        cross_spin_pairs = (2 * 2) * (2 * 2)
        bound = 1 + singles + same_spin_pairs + cross_spin_pairs
        for config in enumerate_sector(sector):
            assert len(connected_configurations(hamiltonian, config)) <= bound


class TestSubspaceOperator:
    def test_vacuum_operator(self):
        hamiltonian = make_random_hamiltonian(2, seed=13)
        basis = SubspaceBasis([Configuration(0, 0)])
        op = build_subspace_operator(hamiltonian, basis)
        np.testing.assert_allclose(op.to_matrix(), [[hamiltonian.e0]], atol=1e-15)

    def test_full_sector_equals_dense_oracle(self):
        hamiltonian = make_random_hamiltonian(3, seed=14)
        oracle = DenseFock(3)
        sector = Sector(3, 2, 1)
        basis = enumerate_sector(sector)
        sub = build_subspace_operator(hamiltonian, basis).to_matrix()
        dense = dense_hamiltonian(hamiltonian, oracle)
        idx = oracle.sector_indices(sector)
        np.testing.assert_allclose(np.linalg.eigvalsh(sub),
                                   np.linalg.eigvalsh(dense[np.ix_(idx, idx)]),
                                   atol=1e-10)

    def test_matrix_free_matches_materialized(self, hubbard66, sector66):
        basis = enumerate_sector(sector66)
        materialized = build_subspace_operator(hubbard66, basis)
        matrix_free = build_subspace_operator(
            hubbard66, basis, materialize_threshold=0, chunk=64, workers=2
        )
        rng = np.random.default_rng(0)
        block = rng.normal(size=(len(basis), 3))
        diff = np.abs(materialized.matmat(block) - matrix_free.matmat(block)).max()
        assert diff < 1e-12
        np.testing.assert_allclose(
            materialized.diagonal(), matrix_free.diagonal(), atol=1e-12
        )

    def test_symmetry_on_random_vectors(self, hubbard66, sector66):
        basis = enumerate_sector(sector66)
        op = build_subspace_operator(hubbard66, basis)
        rng = np.random.default_rng(1)
        for _ in range(5):
            u = rng.normal(size=len(basis))
            v = rng.normal(size=len(basis))
            assert u @ op.matvec(v) == pytest.approx(op.matvec(u) @ v, abs=1e-12)

    def test_variational_monotonicity(self, hubbard66, sector66):
        basis = enumerate_sector(sector66)
        small = SubspaceBasis(basis.configurations[:100])
        large = SubspaceBasis(basis.configurations[:250])
        e_small = np.linalg.eigvalsh(build_subspace_operator(hubbard66, small).to_matrix())[0]
        e_large = np.linalg.eigvalsh(build_subspace_operator(hubbard66, large).to_matrix())[0]
        assert e_large <= e_small + 1e-12

    def test_empty_and_mixed_bases_rejected(self, hubbard66):
        with pytest.raises(ValueError):
            build_subspace_operator(hubbard66, SubspaceBasis([]))
        mixed = SubspaceBasis([Configuration(0b1, 0b1), Configuration(0b11, 0b1)])
        with pytest.raises(SectorError):
            build_subspace_operator(hubbard66, mixed)


class TestApplyOperator:
    def test_number_operator_on_reference(self):
        sector = Sector(6, 3, 3)
        ref = reference_configuration(sector)
        state = SparseState({ref: 1.0}, sector)
        number = [(1.0, ExcitationOperator(((0, ALPHA),), ((0, ALPHA),)))]
        out = apply_operator(number, state)
        assert out.entries == {ref: 1.0}
        assert out.sector == sector

    def test_s_plus_annihilates_closed_shell(self):
        sector = Sector(3, 2, 2)
        ref = Configuration(0b011, 0b011)
        state = SparseState({ref: 1.0}, sector)
        s_plus = [
            (1.0, ExcitationOperator(((p, ALPHA),), ((p, BETA),))) for p in range(3)
        ]
        out = apply_operator(s_plus, state)
        assert out.entries == {}

    def test_s_plus_at_sector_boundary_returns_zero_state(self):
        sector = Sector(2, 2, 0)
        state = SparseState({Configuration(0b11, 0): 1.0}, sector)
        s_plus = [
            (1.0, ExcitationOperator(((p, ALPHA),), ((p, BETA),))) for p in range(2)
        ]
        out = apply_operator(s_plus, state)
        assert out.entries == {} and out.sector == sector

    def test_hamiltonian_expansion_matches_connected(self):
        hamiltonian = make_random_hamiltonian(3, seed=15)
        sector = Sector(3, 2, 1)
        for config in list(enumerate_sector(sector))[:4]:
            state = SparseState({config: 1.0}, sector)
            applied = apply_operator(hamiltonian_terms(hamiltonian), state)
            row = dict(connected_configurations(hamiltonian, config))
            row = {z: v for z, v in row.items() if v != 0.0}
            assert set(applied.entries) == set(row)
            for z, value in row.items():
                assert applied.entries[z] == pytest.approx(value, abs=1e-12)

    def test_inconsistent_spin_deltas_rejected(self):
        sector = Sector(2, 1, 1)
        state = SparseState({Configuration(0b1, 0b1): 1.0}, sector)
        terms = [
            (1.0, ExcitationOperator(((0, ALPHA),), ((0, BETA),))),
            (1.0, ExcitationOperator(((0, BETA),), ((0, ALPHA),))),
        ]
        with pytest.raises(MalformedOperatorError):
            apply_operator(terms, state)


class TestSparseState:
    def test_pruning(self):
        sector = Sector(2, 1, 1)
        state = SparseState.from_items(
            [(Configuration(0b1, 0b1), 1.0), (Configuration(0b1, 0b10), 1e-16)], sector
        )
        assert len(state) == 1

    def test_normalize_and_overlap(self):
        sector = Sector(2, 1, 1)
        a = SparseState({Configuration(0b1, 0b1): 3.0}, sector).normalized()
        assert a.norm() == pytest.approx(1.0)
        b = SparseState({Configuration(0b1, 0b1): 1.0, Configuration(0b1, 0b10): 1.0}, sector)
        assert overlap(a, b) == pytest.approx(1.0)
        other = SparseState({Configuration(0b1, 0): 1.0}, Sector(2, 1, 0))
        assert overlap(a, other) == 0.0
        with pytest.raises(ValueError):
            SparseState({}, sector).normalized()


class TestMatrixElementProperties:
    HAMILTONIAN = None

    @classmethod
    def _hamiltonian(cls):
        if cls.HAMILTONIAN is None:
            cls.HAMILTONIAN = make_random_hamiltonian(4, seed=2024)
        return cls.HAMILTONIAN

    @given(st.data())
    @settings(max_examples=150, deadline=None)
    def test_hermiticity_on_random_pairs(self, data):
        from sqdkit.configurations import enumerate_sector as enum

        n_alpha = data.draw(st.integers(1, 3))
        n_beta = data.draw(st.integers(0, 3))
        basis = enum(Sector(4, n_alpha, n_beta))
        x = data.draw(st.sampled_from(basis.configurations))
        y = data.draw(st.sampled_from(basis.configurations))
        hamiltonian = self._hamiltonian()
        forward = matrix_element(hamiltonian, x, y)
        backward = matrix_element(hamiltonian, y, x)
        assert forward == pytest.approx(backward, abs=1e-12)


def test_hamiltonian_validation():
    with pytest.raises(ValueError):
        Hamiltonian(0.0, np.array([[0.0, 1.0], [0.5, 0.0]]), np.zeros((2, 2, 2, 2)))
    eri = np.zeros((2, 2, 2, 2))
    eri[0, 1, 0, 0] = 1.0  # breaks 8-fold symmetry
    with pytest.raises(ValueError):
        Hamiltonian(0.0, np.zeros((2, 2)), eri)
    with pytest.raises(ValueError):
        Hamiltonian(np.nan, np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))
