from __future__ import annotations

import itertools
import json

import pytest

from geodetic_forge.groups import check_genset, make_cyclic, make_klein, make_symmetric
from geodetic_forge.nabla import compose_free_product, free_group_system, nabla, presentation_of
from geodetic_forge.rewriting import RewritingSystem, check_confluence_bounded
from geodetic_forge.verify import (
    PieceGluing,
    TruncatedBall,
    VerificationReport,
    verify_cayley_correspondence,
    verify_free_product_composition,
    verify_iterated_subdivision,
    verify_subdivision_relabel,
    verify_theorem_a,
    verify_theorem_b,
)
from geodetic_forge.words import Letter


def _brute_presentation_homs(pres, target):
    count = 0
    for images in itertools.product(range(target.order), repeat=pres.generator_count):
        ok = True
        for rel in pres.relators:
            acc = target.identity
            for g, e in rel:
                acc = target.mul(acc, images[g] if e == 1 else target.inv(images[g]))
            if acc != target.identity:
                ok = False
                break
        count += ok
    return count


def test_report_requires_details_on_failure():
    with pytest.raises(ValueError):
        VerificationReport("x", {}, False)
    report = VerificationReport("x", {"a": 1}, True, {"k": [1, 2]}, 1.5)
    assert report.to_json() == {"check": "x", "inputs": {"a": 1}, "pass": True, "details": {"k": [1, 2]}, "millis": 1.5}
    assert report.to_text().splitlines() == ["PASS x(a=1)", "  k: [1, 2]"]


@pytest.mark.parametrize(
    "m,gens,n,expected",
    [(4, [1, 2, 3], 1, True), (4, [1, 3], 1, False), (5, [1, 4], 2, True)],
)
def test_theorem_b_examples(m, gens, n, expected):
    group = make_cyclic(m)
    report = verify_theorem_b(group, check_genset(group, gens), n)
    assert report.passed
    d = report.details
    assert d["base_geodetic"] == d["subdivided_geodetic"] == d["length_reducing"] == expected


def test_correspondence_k4(k4_system):
    report = verify_cayley_correspondence(k4_system, 4)
    assert report.passed
    assert report.details["census"] == [1, 9, 72, 576, 4608]


def test_correspondence_free_group_tree():
    report = verify_cayley_correspondence(free_group_system(2), 3)
    assert report.passed and report.details["spheres"] == [1, 4, 12, 36]


def test_correspondence_needs_pieces():
    bare = RewritingSystem.build("pq", [(("p", "q"), ())])
    with pytest.raises(ValueError):
        verify_cayley_correspondence(bare, 2)


def test_piece_gluing_rejects_overlapping_types():
    from geodetic_forge.graphs import LabeledGraph

    x, y, z = Letter("b", 1), Letter("c", 1), Letter("a", 1)
    # vertex 0 offers {x, z}, vertex 2 offers {z}: z would lie in two types
    graph = LabeledGraph(3, {(0, 1): x, (1, 0): y, (0, 2): z, (2, 0): z}, {x: y, y: x, z: z})
    with pytest.raises(ValueError):
        PieceGluing([graph])


def test_piece_gluing_of_single_cayley_graph_is_the_graph():
    c5 = make_cyclic(5)
    system = nabla(c5, check_genset(c5, [1, 4]), 0)
    sizes, _ = PieceGluing(system.pieces).spheres(3)
    assert sizes == [1, 2, 2, 0]


def _mutants(system):
    for rule in system.rules_of("R2"):
        yield rule, system.system.with_rules(r for r in system.system.rules if r != rule)


def test_mutation_sensitivity(k4_system):
    caught = 0
    for rule, mutant in _mutants(k4_system):
        corr = verify_cayley_correspondence(mutant, 5, pieces=k4_system.pieces)
        conf = check_confluence_bounded(mutant, 6)
        assert not (corr.passed and conf.confluent), f"removing {rule} went unnoticed"
        if not corr.passed:
            assert corr.details.get("surplus_irreducible_words", 0) > 0 or "same_vertex" in corr.details
        caught += 1
    assert caught == 18


@pytest.mark.parametrize(
    "m,gens,n,probe,expected",
    [(4, [1, 2, 3], 1, 2, 16), (5, [1, 4], 1, 2, 4), (3, [1, 2], 1, 3, 3 * 9)],
)
def test_hom_counts_against_brute_force(m, gens, n, probe, expected):
    group = make_cyclic(m)
    genset = check_genset(group, gens)
    report = verify_theorem_a(group, genset, n, [make_cyclic(probe)])
    assert report.passed
    (counts,) = report.details["hom_counts"].values()
    pres = presentation_of(nabla(group, genset, n).system)
    assert counts["actual"] == counts["expected"] == expected == _brute_presentation_homs(pres, make_cyclic(probe))


def test_theorem_a_abelianizations():
    c4 = make_cyclic(4)
    report = verify_theorem_a(c4, check_genset(c4, [1, 2, 3]), 1, [make_cyclic(2)])
    assert report.details["abelianization"] == "Z/4 + Z + Z + Z"
    c5 = make_cyclic(5)
    report = verify_theorem_a(c5, check_genset(c5, [1, 4]), 1, [make_cyclic(2)])
    assert report.passed and report.details["abelianization"] == "Z/5 + Z + Z"


@pytest.mark.parametrize(
    "group,gens",
    [(make_cyclic(4), [1, 2, 3]), (make_cyclic(4), [1, 3]), (make_symmetric(3), [1, 2, 3, 4, 5]), (make_klein(), [1, 2, 3])],
)
def test_theorem_a_at_zero_is_the_group_itself(group, gens):
    report = verify_theorem_a(group, check_genset(group, gens), 0)
    assert report.passed
    for counts in report.details["hom_counts"].values():
        assert "skipped" not in counts


def test_theorem_a_skips_probes_over_cap():
    s3 = make_symmetric(3)
    report = verify_theorem_a(s3, check_genset(s3, [1, 2, 3, 4, 5]), 1, [make_symmetric(3)], hom_cap=10)
    assert report.details["hom_counts"]["S3"]["skipped"] == "cap exceeded"
    assert report.passed


@pytest.mark.parametrize("m,gens", [(4, [1, 2, 3]), (5, [1, 4]), (3, [1, 2])])
@pytest.mark.parametrize("n,m2", [(0, 2), (1, 1), (2, 1)])
def test_iterated_subdivision(m, gens, n, m2):
    group = make_cyclic(m)
    report = verify_iterated_subdivision(group, check_genset(group, gens), n, m2)
    assert report.passed
    assert report.details["k"] == 2 * n * m2 + n + m2


def test_zero_subdivision_report():
    klein = make_klein()
    assert verify_subdivision_relabel(klein, check_genset(klein, [1, 2, 3])).passed


def test_composition_small():
    c2, c3 = make_cyclic(2), make_cyclic(3)
    report = verify_free_product_composition(check_genset(c2, [1]), check_genset(c3, [1, 2]), 1, 4)
    assert report.passed and report.details["ball_geodetic"] is True


def test_composition_with_trivial_free_factor():
    c2 = make_cyclic(2)
    report = verify_free_product_composition(check_genset(c2, [1]), 0, 1, 4)
    assert report.passed and report.details["letters"] == 3


def test_composition_non_geodetic_factor_skips_ball():
    # the 4-cycle factor yields bcc -> c and bcc -> bbb: a genuine non-confluence
    c4, c2 = make_cyclic(4), make_cyclic(2)
    report = verify_free_product_composition(check_genset(c4, [1, 3]), check_genset(c2, [1]), 0, 4)
    assert report.details["length_reducing"] is False
    assert report.details["ball_geodetic"] == "skipped"
    assert report.details["confluent_up_to"] is None
    assert report.details["counterexample"]
    assert not report.passed
    json.dumps(report.to_json())


def test_truncated_ball_detects_two_geodesics():
    # C4 presented by b, c with bbb -> c and ccc -> b: not confluent, and bb, cc stay distinct
    b, c = "b", "c"
    system = RewritingSystem.build(
        [b, c], [((b, c), ()), ((c, b), ()), ((b, b, b), (c,)), ((c, c, c), (b,))], {b: c, c: b}
    )
    ball = TruncatedBall(system, 2)
    assert len(ball) == 5
    pair = ball.geodetic_within(1)
    assert pair is not None and set(pair) == {(b,), (c,)}
    with pytest.raises(ValueError):
        ball.geodetic_within(2)


def test_truncated_ball_free_group_is_tree():
    ball = TruncatedBall(free_group_system(2), 4)
    assert len(ball) == 1 + 4 + 12 + 36 + 108
    assert ball.geodetic_within(2) is None


def test_composed_correspondence():
    c5, c3 = make_cyclic(5), make_cyclic(3)
    first = compose_free_product(nabla(c5, check_genset(c5, [1, 4]), 1), free_group_system(2))
    second = compose_free_product(nabla(c3, check_genset(c3, [1, 2]), 1), free_group_system(2))
    composed = compose_free_product(first, second)
    report = verify_cayley_correspondence(composed, 3)
    assert report.passed
