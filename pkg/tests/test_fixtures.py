import json

import pytest

from schubert_tables.constants import CASE_IDS
from schubert_tables.fixtures import (
    CaseFixture,
    FixtureError,
    dump_fixtures,
    fixture_filename,
    load_case_fixture,
    load_fixtures,
    write_case_fixture,
)


def _edit(path, change):
    data = json.loads(path.read_text(encoding="utf-8"))
    change(data)
    path.write_text(json.dumps(data), encoding="utf-8")


class TestLoading:
    def test_all_cases_load(self, fixture_set):
        assert set(fixture_set.cases) == set(CASE_IDS)
        for case_id in CASE_IDS:
            assert case_id in fixture_set
            assert fixture_set.case(case_id).case_id == case_id

    def test_f4_c3_contents(self, fixture_set):
        fixture = fixture_set.case("F4:C3")
        assert len(fixture.cosets) == 23
        assert fixture.top_length == 15
        assert dict(fixture.generators)["y4"] == (4, 2)
        assert fixture.euler(5) == ((1, 2), (0, 1))
        assert fixture.words()[(7, 1)] == (1, 3, 2, 4, 3, 2, 1)
        assert fixture.coset_counts()[0] == 1
        assert fixture.structure_for(3).nullspace == ((-2, 1),)
        assert fixture.structure_for(3).nullspace_index == 1
        assert fixture.structure_for(12).nullspace_index == 3
        assert fixture.structure_for(5) is None

    def test_odd_entry_vector(self, fixture_set):
        odd = {o.degree: o for o in fixture_set.case("F4:C3").odd}
        assert odd[23].vector(2) == (-2, 1)

    def test_ring_identity_degree(self, fixture_set):
        first = fixture_set.case("F4:C3").ring[0]
        assert first.degree == 6
        assert first.factor_key() == ((3, 1), (3, 1))

    def test_unknown_case_in_set(self, fixture_set):
        with pytest.raises(KeyError):
            fixture_set.case("G2:1")

    def test_filenames(self):
        assert fixture_filename("F4:C3") == "f4_c3.json"
        assert fixture_filename("A4:2") == "a4_2.json"


class TestFaults:
    def test_empty_directory_lists_every_missing_file(self, tmp_path):
        with pytest.raises(FixtureError) as info:
            load_fixtures(tmp_path)
        assert len(info.value.problems) == len(CASE_IDS)
        assert all("fehlt" in p for p in info.value.problems)

    def test_wrong_euler_dimension(self, data_copy):
        path = data_copy / "f4_c3.json"
        _edit(path, lambda d: d["euler_matrices"].__setitem__("5", [[1, 2, 0], [0, 1, 0]]))
        with pytest.raises(FixtureError) as info:
            load_case_fixture(path)
        assert any("A_5: Dimension 2x3, erwartet 2x2" in p for p in info.value.problems)

    def test_problems_are_collected(self, data_copy):
        path = data_copy / "f4_c3.json"

        def break_several(data):
            data["generators"]["y3"] = [3, 7]
            data["cosets"][0]["word"] = [2]
            data["ring"][0]["target"] = [5, 1]

        _edit(path, break_several)
        with pytest.raises(FixtureError) as info:
            load_case_fixture(path)
        text = " | ".join(info.value.problems)
        assert "Erzeuger y3" in text
        assert "w1,1" in text
        assert "Ring #1" in text
        assert all(p.startswith("f4_c3.json") for p in info.value.problems)

    def test_schema_errors(self, data_copy):
        path = data_copy / "f4_b3.json"
        _edit(path, lambda d: d.pop("cosets"))
        with pytest.raises(FixtureError):
            load_case_fixture(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "f4_c3.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(FixtureError) as info:
            load_case_fixture(path)
        assert "ungültiges JSON" in info.value.problems[0]

    def test_case_id_must_match_file(self, data_copy):
        (data_copy / "f4_c3.json").write_text(
            (data_copy / "f4_b3.json").read_text(encoding="utf-8"), encoding="utf-8"
        )
        with pytest.raises(FixtureError) as info:
            load_fixtures(data_copy)
        assert any("erwartet 'F4:C3'" in p for p in info.value.problems)

    def test_bad_structure_orientation(self, data_copy):
        path = data_copy / "f4_c3.json"
        _edit(path, lambda d: d["structure"][0].__setitem__("orientation", "sideways"))
        with pytest.raises(FixtureError) as info:
            load_case_fixture(path)
        assert any("M(pi_3)" in p for p in info.value.problems)


    def test_nullspace_index_must_be_positive(self, data_copy):
        path = data_copy / "f4_c3.json"
        _edit(path, lambda d: d["structure"][0].__setitem__("nullspace_index", 0))
        with pytest.raises(FixtureError) as info:
            load_case_fixture(path)
        assert any("structure[0].nullspace_index" in p for p in info.value.problems)

class TestWriting:
    def test_dump_and_reload(self, fixture_set, tmp_path):
        written = dump_fixtures(fixture_set, tmp_path)
        assert len(written) == len(CASE_IDS)
        reloaded = load_fixtures(tmp_path)
        assert reloaded.cases == fixture_set.cases

    def test_written_file_is_stable(self, fixture_set, tmp_path):
        fixture = fixture_set.case("E6:D5")
        first = write_case_fixture(fixture, tmp_path / "a.json").read_text(encoding="utf-8")
        again = CaseFixture.from_dict(json.loads(first))
        second = write_case_fixture(again, tmp_path / "b.json").read_text(encoding="utf-8")
        assert first == second
