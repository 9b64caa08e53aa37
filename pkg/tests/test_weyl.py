import pytest

from schubert_tables.weyl import (
    CartanMatrix,
    CartanMatrixError,
    CosetLabelError,
    WeylError,
    WeylWord,
    bruhat_leq,
    cartan_matrix,
    element_of,
    identity_element,
    length,
    minimal_coset_reps,
    positive_roots,
    reduced_words,
    reflect,
)

CASE_NODES = {
    "F4:C3": ("F4", 1, 24, 15),
    "F4:B3": ("F4", 4, 24, 15),
    "E6:A6": ("E6", 2, 72, 21),
    "E6:D5": ("E6", 6, 27, 16),
    "E7:E6": ("E7", 7, 56, 27),
    "E7:D6": ("E7", 1, 126, 33),
    "E8:E7": ("E8", 8, 240, 57),
}


class TestCartanMatrix:
    def test_f4_entries(self):
        C = cartan_matrix("F4")
        assert C.entries[1] == (-1, 2, -2, 0)
        assert C.entries[2] == (0, -1, 2, -1)

    @pytest.mark.parametrize("label", ["A3", "a3", "A_3", " a_3 "])
    def test_label_spellings(self, label):
        assert cartan_matrix(label).label == "A3"

    def test_classical_b_and_c_are_transposes(self):
        assert cartan_matrix("B3").entries == tuple(zip(*cartan_matrix("C3").entries))

    def test_d4_fork(self):
        C = cartan_matrix("D4")
        assert C.entries[1] == (-1, 2, -1, -1)
        assert C.entries[2][3] == 0

    @pytest.mark.parametrize("label", ["H3", "B1", "D2", "E9", "", "F"])
    def test_unknown_labels(self, label):
        with pytest.raises(CartanMatrixError):
            cartan_matrix(label)

    def test_invariants_checked(self):
        with pytest.raises(CartanMatrixError):
            CartanMatrix("X", ((2, -1), (0, 2)))
        with pytest.raises(CartanMatrixError):
            CartanMatrix("X", ((2, 1), (1, 2)))
        with pytest.raises(CartanMatrixError):
            CartanMatrix("X", ((1, 0), (0, 2)))


class TestRoots:
    @pytest.mark.parametrize(
        "label,count,top_height",
        [("A2", 3, 2), ("B2", 4, 3), ("G2", 6, 5), ("F4", 24, 11), ("E6", 36, 11), ("E7", 63, 17), ("E8", 120, 29)],
    )
    def test_counts_and_highest_root(self, label, count, top_height):
        roots = positive_roots(cartan_matrix(label))
        assert len(roots) == count
        assert max(r.height for r in roots) == top_height
        assert all(r.is_positive for r in roots)

    def test_simple_roots_first(self):
        roots = positive_roots(cartan_matrix("E6"))
        for i in range(6):
            assert roots[i].root_coords == tuple(1 if j == i else 0 for j in range(6))

    def test_reflect_simple_root_is_negated(self):
        C = cartan_matrix("F4")
        for i in range(1, 5):
            unit = tuple(1 if j == i - 1 else 0 for j in range(4))
            assert reflect(C, i, unit) == tuple(-x for x in unit)
            assert reflect(C, i, unit, basis="coroot") == tuple(-x for x in unit)

    def test_reflect_follows_pairing(self):
        # <alpha_2, alpha_3^vee> = -2 in F4
        C = cartan_matrix("F4")
        assert reflect(C, 3, (0, 1, 0, 0)) == (0, 1, 2, 0)
        assert reflect(C, 2, (0, 0, 1, 0)) == (0, 1, 1, 0)

    def test_reflect_rejects_bad_index(self):
        with pytest.raises(WeylError):
            reflect(cartan_matrix("A2"), 3, (1, 0))

    def test_coroots_of_long_roots_in_b2(self):
        roots = {r.root_coords: r.coroot_coords for r in positive_roots(cartan_matrix("B2"))}
        assert set(roots) == {(1, 0), (0, 1), (1, 1), (1, 2)}
        assert roots[(1, 2)] == (1, 1)
        assert roots[(1, 1)] == (2, 1)


class TestWeylElements:
    def test_braid_relation_a2(self):
        C = cartan_matrix("A2")
        assert element_of([1, 2, 1], C) == element_of([2, 1, 2], C)
        assert element_of([1, 2], C) != element_of([2, 1], C)

    def test_length_and_cancellation(self):
        C = cartan_matrix("F4")
        assert length(element_of([1, 1], C)) == 0
        assert element_of([1, 1], C) == identity_element(C)
        assert length(element_of([1, 3, 2, 4, 3, 2, 1], C)) == 7

    def test_longest_element_lengths(self):
        for label, count in (("A3", 6), ("B3", 9), ("G2", 6)):
            C = cartan_matrix(label)
            table = minimal_coset_reps(C, None)
            assert table.top_length == count

    def test_letter_out_of_range(self):
        with pytest.raises(WeylError):
            element_of([5], cartan_matrix("F4"))
        with pytest.raises(WeylError):
            WeylWord((0, 1))
        with pytest.raises(WeylError, match="außerhalb von 1..2"):
            WeylWord((1, 3)).check_rank(2)
        w = element_of([1, 2], cartan_matrix("A2"))
        with pytest.raises(WeylError):
            w.right_multiply(3)
        with pytest.raises(WeylError):
            w.left_multiply(0)

    def test_descents(self):
        C = cartan_matrix("A3")
        w = element_of([1, 2], C)
        assert w.right_descents() == (2,)
        assert w.left_descents() == (1,)

    def test_inverse(self):
        C = cartan_matrix("E6")
        w = element_of([2, 4, 3, 1, 5, 4], C)
        assert (w * w.inverse).is_identity

    def test_canonical_word_is_lexicographically_smallest(self):
        C = cartan_matrix("A3")
        w = element_of([3, 1], C)
        assert w.canonical_word.letters == (1, 3)
        words = reduced_words(w)
        assert [x.letters for x in words] == [(1, 3), (3, 1)]

    def test_reduced_words_of_longest_a2(self):
        C = cartan_matrix("A2")
        words = reduced_words(element_of([1, 2, 1], C))
        assert [w.letters for w in words] == [(1, 2, 1), (2, 1, 2)]

    def test_reduced_words_limit(self):
        C = cartan_matrix("A3")
        longest = element_of([1, 2, 1, 3, 2, 1], C)
        assert len(reduced_words(longest, limit=5)) == 5
        assert len(reduced_words(longest, limit=100)) == 16


class TestBruhat:
    def test_basic(self):
        C = cartan_matrix("A2")
        e = identity_element(C)
        s1, s2 = element_of([1], C), element_of([2], C)
        w0 = element_of([1, 2, 1], C)
        assert bruhat_leq(e, s1)
        assert bruhat_leq(s1, element_of([1, 2], C))
        assert bruhat_leq(s1, element_of([2, 1], C))
        assert not bruhat_leq(s1, s2)
        assert not bruhat_leq(w0, s1)
        assert all(bruhat_leq(row.element, w0) for row in minimal_coset_reps(C, None).rows)

    def test_subword_property_in_a3(self):
        C = cartan_matrix("A3")
        w = element_of([2, 1, 3, 2], C)
        assert bruhat_leq(element_of([2, 3, 2], C), w)
        assert bruhat_leq(element_of([1, 3], C), w)
        assert bruhat_leq(element_of([1, 2, 1], C), w)
        assert not bruhat_leq(element_of([1, 2, 3], C), w)


class TestCosets:
    @pytest.mark.parametrize("case_id", list(CASE_NODES))
    def test_counts_and_top_length(self, case_id):
        group, node, count, top = CASE_NODES[case_id]
        table = minimal_coset_reps(cartan_matrix(group), node, case_id)
        assert len(table) == count
        assert table.top_length == top
        assert table.count(0) == 1 and table.count(top) == 1
        assert table.rows[1].word.letters == (node,)

    def test_poincare_symmetry(self):
        table = minimal_coset_reps(cartan_matrix("E7"), 7)
        counts = table.degree_counts()
        top = table.top_length
        assert all(counts[k] == counts[top - k] for k in counts)

    def test_all_rows_minimal_and_reduced(self):
        table = minimal_coset_reps(cartan_matrix("F4"), 4)
        for row in table.rows:
            assert row.element.length == row.degree == len(row.word)
            assert set(row.element.right_descents()) <= {4}

    def test_fixture_words_define_same_set(self, case_cache):
        for case_id in CASE_NODES:
            ctx = case_cache(case_id)
            assert ctx.label_problems == ()
            assert len(ctx.table) == CASE_NODES[case_id][2]

    def test_f4_c3_degree_seven_word(self, f4_c3):
        assert f4_c3.table.row(7, 1).word.letters == (1, 3, 2, 4, 3, 2, 1)

    def test_borel_case(self):
        assert len(minimal_coset_reps(cartan_matrix("A3"), None)) == 24
        assert len(minimal_coset_reps(cartan_matrix("B2"), None)) == 8

    def test_borel_cap(self):
        with pytest.raises(WeylError):
            minimal_coset_reps(cartan_matrix("E6"), None)

    def test_multiple_nodes_refused(self):
        C = cartan_matrix("F4")
        with pytest.raises(WeylError):
            minimal_coset_reps(C, [1, 4])
        assert len(minimal_coset_reps(C, [1])) == 24

    def test_node_out_of_range(self):
        with pytest.raises(WeylError):
            minimal_coset_reps(cartan_matrix("F4"), 5)

    def test_rank_one(self):
        table = minimal_coset_reps(cartan_matrix("A1"), 1)
        assert [row.word.letters for row in table.rows] == [(), (1,)]

    def test_relabel_rejects_bad_words(self):
        table = minimal_coset_reps(cartan_matrix("F4"), 1)
        labels = {(row.degree, row.ordinal): row.word.letters for row in table.rows if row.degree}
        bad = dict(labels)
        bad[(2, 1)] = (1, 2)
        with pytest.raises(CosetLabelError) as info:
            table.relabel(bad)
        assert any(p.startswith("w2,1") for p in info.value.problems)

        missing = dict(labels)
        del missing[(4, 2)]
        with pytest.raises(CosetLabelError) as info:
            table.relabel(missing)
        assert any("Grad 4" in p for p in info.value.problems)

    def test_relabel_swaps_ordinals(self):
        table = minimal_coset_reps(cartan_matrix("F4"), 1)
        labels = {(row.degree, row.ordinal): row.word.letters for row in table.rows if row.degree}
        labels[(4, 1)], labels[(4, 2)] = labels[(4, 2)], labels[(4, 1)]
        relabeled = table.relabel(labels)
        assert relabeled.row(4, 1).element == table.row(4, 2).element
        assert relabeled.lookup(table.row(4, 1).element).ordinal == 2
