import dataclasses
import json

import pytest

from schubert_tables.config import Settings
from schubert_tables.fixtures import EvenGroupEntry, FixtureSet, RingIdentitySpec, load_fixtures
from schubert_tables.intlat import LatticeBasis, express_in, lattice_equal
from schubert_tables.pipeline import (
    UnknownCaseError,
    UnknownDegreeError,
    additive_table,
    case_spec,
    combination_label,
    compare_matrix,
    convention_bootstrap,
    describe_structure,
    evaluate_identity,
    extra_products,
    load_case,
    regenerate_fixture,
    ring_table,
    verify_all,
    verify_case,
)


def _identity(factors, coefficient, target, up_to_sign=False):
    return RingIdentitySpec(tuple(factors), coefficient, target, up_to_sign)


def _edit(path, change):
    data = json.loads(path.read_text(encoding="utf-8"))
    change(data)
    path.write_text(json.dumps(data), encoding="utf-8")


class TestCaseSpec:
    def test_f4_c3(self, fixture_set):
        spec = case_spec("F4:C3", fixture_set)
        assert spec.excluded_node == 1
        assert spec.dimension == 31
        assert spec.m_list == (3, 6, 8, 12)
        assert spec.orientation(3) == "classes_by_monomials"
        assert [dict(m) for m in spec.basis(3)] == [{"y3": 1}, {"y1": 3}]
        with pytest.raises(UnknownDegreeError):
            spec.basis(5)

    @pytest.mark.parametrize(
        "case_id,node,m_list,dimension",
        [("E6:D5", 6, (9, 12), 33), ("E8:E7", 8, (15, 20, 24, 30), 115), ("E7:E6", 7, (10, 14, 18), 55)],
    )
    def test_exceptional_cases(self, fixture_set, case_id, node, m_list, dimension):
        spec = case_spec(case_id, fixture_set)
        assert spec.excluded_node == node
        assert spec.m_list == m_list
        assert spec.dimension == dimension
        assert spec.generator_map()["y1"] == (1, 1)

    def test_reads_fixture_directory_without_set(self, settings):
        assert case_spec("F4:B3", settings=settings).excluded_node == 4

    def test_custom_case(self):
        spec = case_spec(" a_4 : 2 ")
        assert spec.case_id == "A4:2"
        assert spec.custom
        assert spec.top_length == 6
        assert spec.m_list == ()

    @pytest.mark.parametrize("case_id", ["X9:1", "F4:7", "F4", "nonsense", "B1:1"])
    def test_unknown_cases(self, case_id):
        with pytest.raises(UnknownCaseError):
            case_spec(case_id)


class TestAdditive:
    def test_f4_c3_groups(self, f4_c3):
        table = additive_table(f4_c3)
        described = {e.degree: e.describe() for e in table.nontrivial()}
        assert described == {
            0: "Z",
            6: "Z_2",
            8: "Z",
            12: "Z_4",
            14: "Z_2",
            16: "Z_3",
            18: "Z_2",
            20: "Z_4",
            23: "Z",
            26: "Z_2",
            31: "Z",
        }
        assert table.entry(12).invariant_factors == (4,)
        with pytest.raises(UnknownDegreeError):
            table.entry(40)

    def test_listed_generators_generate(self, f4_c3):
        table = additive_table(f4_c3)
        # H^16 = Z_3 is generated by s̄8,1, H^12 = Z_4 by s̄6,2
        for degree, ordinal in ((16, 1), (12, 2)):
            entry = table.entry(degree)
            unit = tuple(1 if j == ordinal else 0 for j in range(1, 3))
            assert express_in(unit, unit, entry.presentation) is not None

    def test_odd_kernel(self, f4_c3):
        entry = additive_table(f4_c3).entry(23)
        assert entry.parity == "odd"
        assert entry.generators[0] in ((2, -1), (-2, 1))
        assert entry.labels[0].startswith("β⁻¹(")

    @pytest.mark.parametrize(
        "case_id",
        ["F4:C3", "F4:B3", "E6:A6", "E6:D5"]
        + [pytest.param(c, marks=pytest.mark.slow) for c in ("E7:E6", "E7:D6", "E8:E7")],
    )
    def test_poincare_duality(self, case_cache, case_id):
        ctx = case_cache(case_id)
        table = additive_table(ctx)
        dim = ctx.spec.dimension
        ranks = table.free_ranks()
        torsion = {e.degree: tuple(d for d in e.invariant_factors if d) for e in table.entries}
        for d in range(dim + 1):
            assert ranks[d] == ranks[dim - d], d
            if 0 < d <= dim:
                assert torsion[d] == torsion.get(dim + 1 - d, ()), d

    def test_combination_label(self):
        assert combination_label((1, -2), 11) == "s̄11,1 - 2 s̄11,2"
        assert combination_label((0, -1), 4) == "-s̄4,2"
        assert combination_label((0, 0), 4) == "0"
        assert combination_label((1,), 0) == "1"


class TestRing:
    def test_f4_c3_identities_hold(self, f4_c3):
        table = ring_table(f4_c3)
        assert table.all_hold
        assert len(table.identities) == len(f4_c3.fixture.ring)

    def test_square_of_s31(self, f4_c3):
        result = evaluate_identity(f4_c3, _identity([((3, 1), 2)], -2, (6, 2)))
        assert result.holds
        assert result.product == (3, 4)
        assert result.group == (4,)
        assert result.computed == 2  # -2 = 2 in Z_4
        assert result.label == "s̄3,1^2 = -2 s̄6,2"

    def test_wrong_coefficient(self, f4_c3):
        assert not evaluate_identity(f4_c3, _identity([((3, 1), 2)], 1, (6, 2))).holds

    def test_up_to_sign(self, f4_c3):
        square = [((4, 2), 2)]
        assert evaluate_identity(f4_c3, _identity(square, -1, (8, 1))).holds
        assert not evaluate_identity(f4_c3, _identity(square, 1, (8, 1))).holds
        signed = evaluate_identity(f4_c3, _identity(square, 1, (8, 1), up_to_sign=True))
        assert signed.holds
        assert signed.label == "s̄4,2^2 = ±1 s̄8,1"

    def test_extra_products_are_not_listed(self, f4_c3):
        listed = {spec.factor_key() for spec in f4_c3.fixture.ring}
        for extra in extra_products(f4_c3):
            key = tuple(sorted(ref for ref, p in extra.factors for _ in range(p)))
            assert key not in listed
            assert any(extra.residues)

    def test_every_listed_ring_identity(self, case_cache):
        for case_id in ("F4:B3", "E6:A6", "E6:D5", "E7:E6"):
            assert ring_table(case_cache(case_id), include_extras=False).all_hold, case_id


class TestStructure:
    def test_f4_c3_m3(self, f4_c3):
        printed, nullspace = describe_structure(f4_c3, 3)
        assert printed.to_list() == [[1, 2]]
        assert lattice_equal(nullspace, LatticeBasis.from_rows([[-2, 1]], 2))

    def test_f4_b3_m8(self, f4_b3):
        printed, nullspace = describe_structure(f4_b3, 8)
        assert printed.to_list() == [[4, 7, 12], [3, 5, 9]]
        assert lattice_equal(nullspace, LatticeBasis.from_rows([[-3, 0, 1]], 3))

    def test_e7_e6_m10(self, case_cache):
        printed, _ = describe_structure(case_cache("E7:E6"), 10)
        assert printed.to_list() == [[2, 1, 4, 9], [2, 1, 5, 12], [0, 0, 1, 2]]

    def test_unknown_degree(self, f4_c3):
        with pytest.raises(UnknownDegreeError):
            describe_structure(f4_c3, 7)


class TestCompare:
    def test_cells(self):
        mismatches = compare_matrix([[1, 2], [0, 1]], [[1, 3], [0, 1]])
        assert [(m.location, m.computed, m.expected) for m in mismatches] == [("cell (1,2)", 2, 3)]

    def test_shape(self):
        mismatches = compare_matrix([[1, 2]], [[1, 2, 0]])
        assert len(mismatches) == 1
        assert mismatches[0].location == "shape"
        assert mismatches[0].computed == (1, 2)
        assert mismatches[0].expected == (1, 3)


class TestVerify:
    def test_f4_c3_matches(self, f4_c3, fixture_set):
        report = verify_case(f4_c3, fixture_set)
        assert report.passed
        assert report.mismatch_count == 0
        names = [t.name for t in report.tables]
        assert names[0] == "cosets"
        assert "A_5" in names and "M(pi_12)" in names and "N(pi_12)" in names
        assert all(t.status == "match" for t in report.tables)
        assert report.bootstrap is not None and report.bootstrap.passed

    def test_perturbed_euler_matrix(self, data_copy, settings):
        _edit(data_copy / "f4_c3.json", lambda d: d["euler_matrices"].__setitem__("5", [[1, 3], [0, 1]]))
        fixtures = load_fixtures(data_copy)
        report = verify_case("F4:C3", fixtures, settings=settings, bootstrap=False)
        assert not report.passed
        a5 = report.table("A_5")
        assert a5.status == "mismatch"
        assert [(m.location, m.computed, m.expected) for m in a5.mismatches] == [("cell (1,2)", 2, 3)]
        assert report.table("A_4").status == "match"
        assert report.mismatch_count == 1

    def _mismatches(self, data_copy, settings, change, table):
        _edit(data_copy / "f4_c3.json", change)
        report = verify_case("F4:C3", load_fixtures(data_copy), settings=settings, bootstrap=False)
        assert report.mismatch_count == len(report.table(table).mismatches)
        return [(m.location, m.computed, m.expected) for m in report.table(table).mismatches]

    def test_perturbed_additive_generator(self, data_copy, settings):
        def change(data):
            for entry in data["additive"]["even"]:
                if entry["degree"] == 16:
                    entry["generator"] = [8, 2]

        assert self._mismatches(data_copy, settings, change, "additive") == [("H^16 generator", "s̄8,1", "s̄8,2")]

    def test_additive_generator_must_generate(self, data_copy, settings):
        def change(data):
            for entry in data["additive"]["even"]:
                if entry["degree"] == 12:
                    entry["generator"] = [6, 1]

        found = self._mismatches(data_copy, settings, change, "additive")
        assert [location for location, _, _ in found] == ["H^12 generator", "H^12 generator"]
        assert found[0][1:] == ("s̄6,2", "s̄6,1")
        assert found[1][1].endswith("in Z_4")

    def test_perturbed_odd_kernel(self, data_copy, settings):
        def change(data):
            data["additive"]["odd"][0]["kernel"][0]["coefficient"] = -3

        found = self._mismatches(data_copy, settings, change, "additive")
        assert [(location, expected) for location, _, expected in found] == [("H^23", (-3, 1))]

    def test_listed_degree_beyond_top(self, f4_c3, fixture_set):
        fixture = fixture_set.case("F4:C3")
        extended = dataclasses.replace(fixture, even=fixture.even + (EvenGroupEntry(40, 2, None),))
        ctx = dataclasses.replace(f4_c3, fixture=extended)
        report = verify_case(ctx, bootstrap=False)
        found = [(m.location, m.computed, m.expected) for m in report.table("additive").mismatches]
        assert found == [("H^40", "außerhalb von 0..31", "Z_2")]
        assert not report.passed

    def test_perturbed_ring_coefficient(self, data_copy, settings):
        def change(data):
            data["ring"][0]["coefficient"] = 1

        found = self._mismatches(data_copy, settings, change, "ring")
        assert [(computed, expected) for _, computed, expected in found] == [(2, 1)]

    def test_scaled_nullspace_row(self, data_copy, settings):
        def change(data):
            data["structure"][0]["nullspace"] = [[-4, 2]]

        assert self._mismatches(data_copy, settings, change, "N(pi_3)") == [
            ("row 1", "ggT 2", "primitiv"),
            ("index", 2, 1),
        ]

    def test_nullspace_index_is_checked(self, data_copy, settings):
        def change(data):
            del data["structure"][3]["nullspace_index"]

        assert self._mismatches(data_copy, settings, change, "N(pi_12)") == [("index", 3, 1)]

    def test_bad_coset_word(self, data_copy, settings):
        def swap(data):
            for entry in data["cosets"]:
                if (entry["degree"], entry["ordinal"]) == (2, 1):
                    entry["word"] = [1, 2]

        _edit(data_copy / "f4_c3.json", swap)
        fixtures = load_fixtures(data_copy)
        ctx = load_case("F4:C3", fixtures, settings)
        assert ctx.label_problems
        report = verify_case(ctx, fixtures, bootstrap=False)
        cosets = report.table("cosets")
        assert cosets.status == "mismatch"
        assert cosets.mismatches[0].location == "w2,1"
        assert cosets.mismatches[0].expected == (1, 2)

    def test_degree_cap(self, f4_c3, fixture_set):
        settings = Settings(max_degree=6)
        report = verify_case(f4_c3, fixture_set, settings=settings, bootstrap=False)
        assert report.table("A_6").status == "match"
        assert report.table("A_7").status == "skipped"
        assert report.table("M(pi_8)").status == "skipped"
        assert report.table("M(pi_6)").status == "match"
        assert report.passed

    def test_custom_case_has_nothing_to_compare(self):
        with pytest.raises(UnknownCaseError):
            verify_case("A4:2")

    def test_verify_all_keeps_order(self, fixture_set, settings):
        reports = verify_all(("F4:B3", "F4:C3"), fixture_set, settings)
        assert [r.case_id for r in reports] == ["F4:B3", "F4:C3"]
        assert all(r.bootstrap is None for r in reports)
        assert all(r.passed for r in reports)

    @pytest.mark.slow
    def test_e8_gates_large_structure_matrices(self, case_cache, fixture_set):
        report = verify_case(case_cache("E8:E7"), fixture_set, bootstrap=False)
        assert report.table("M(pi_24)").status == "skipped-extended"
        assert report.table("N(pi_30)").status == "skipped-extended"
        assert report.table("M(pi_15)").status == "match"
        assert report.passed

    @pytest.mark.slow
    @pytest.mark.extended
    def test_e8_large_structure_matrices(self, case_cache, fixture_set):
        report = verify_case(case_cache("E8:E7"), fixture_set, extended=True, bootstrap=False)
        for name in ("M(pi_24)", "N(pi_24)", "M(pi_30)", "N(pi_30)"):
            assert report.table(name).status == "match", name

    @pytest.mark.slow
    @pytest.mark.parametrize("case_id",["F4:B3", "E6:A6", "E6:D5", "E7:E6", "E7:D6"])
    def test_every_case_matches(self, case_cache, fixture_set, case_id):
        report = verify_case(case_cache(case_id), fixture_set, bootstrap=False)
        assert report.passed, [m for t in report.tables for m in t.mismatches]


class TestBootstrap:
    def test_pinned_conventions_reproduce_tables(self):
        outcome = convention_bootstrap()
        assert outcome.passed
        assert not outcome.flipped_passed
        assert dict(outcome.matrices)[5] == ((1, 2), (0, 1))
        assert dict(outcome.conventions)["word_order"] == "left-to-right"


class TestRegenerate:
    def test_regenerated_fixture_verifies(self, f4_c3):
        regenerated = regenerate_fixture(f4_c3)
        assert regenerated.validate() == []
        assert regenerated.words() == f4_c3.fixture.words()
        orders = {e.degree: e.order for e in regenerated.even}
        assert orders == {e.degree: e.order for e in f4_c3.fixture.even}
        fixtures = FixtureSet("", {"F4:C3": regenerated})
        report = verify_case("F4:C3", fixtures, bootstrap=False)
        assert report.passed

    def test_custom_case(self, settings):
        ctx = load_case("A4:2", settings=settings)
        assert len(ctx.table) == 10
        regenerated = regenerate_fixture(ctx)
        assert regenerated.case_id == "A4:2"
        assert regenerated.structure == ()
        assert regenerated.validate() == []
