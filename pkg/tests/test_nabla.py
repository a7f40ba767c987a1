from __future__ import annotations

import json

import pytest

from conftest import cached_nabla, fixture_matrix, non_geodetic_extras
from geodetic_forge.errors import AlphabetCollision, SystemNotInverseClosed
from geodetic_forge.graphs import cayley_graph, is_geodetic
from geodetic_forge.groups import (
    AbelianInvariants,
    abelianization,
    check_genset,
    make_cyclic,
    partition_generators,
)
from geodetic_forge.nabla import (
    build_alphabet,
    combined_depth,
    compose_free_product,
    enumerate_rules,
    free_group_system,
    intermediate_names,
    load_system,
    nabla,
    phi_bijection,
    presentation_of,
    system_to_json,
)
from geodetic_forge.rewriting import (
    RewritingSystem,
    Rule,
    check_confluence_bounded,
    irreducible_words,
    is_inverse_closed,
    is_length_reducing,
    normal_form,
)
from geodetic_forge.words import Letter, LetterOrder, parse_word

W = parse_word
ALL_CELLS = [(label, g, s, n) for label, g, s in fixture_matrix() + non_geodetic_extras() for n in (0, 1, 2)]


def test_build_alphabet_c4():
    c4 = make_cyclic(4)
    part = partition_generators(c4, check_genset(c4, [1, 2, 3]))
    alphabet, inverse = build_alphabet(part, 1)
    assert len(alphabet) == 9
    assert inverse[Letter("a", 1, 1)] == Letter("a", 1, 3)
    assert inverse[Letter("a", 1, 2)] == Letter("a", 1, 2)
    alphabet0, inverse0 = build_alphabet(part, 0)
    assert inverse0[Letter("b", 1, 1)] == Letter("c", 1, 1)
    assert all(inverse[inverse[x]] == x for x in alphabet)
    with pytest.raises(ValueError):
        build_alphabet(part, -1)


def test_example_rules(k4_system):
    rules = set(k4_system.system.rules)
    for lhs, rhs in [
        ("a_1_1 a_1_3", "_"),
        ("a_1_3 a_1_1", "_"),
        ("a_1_2 a_1_2", "_"),
        ("b_1_1 c_1_1", "_"),
        ("c_1_1 b_1_1", "_"),
        ("a_1_1 a_1_2 a_1_3 b_1_1 b_1_2", "c_1_3 c_1_2 c_1_1 c_1_3"),
        ("a_1_2 a_1_3 b_1_1 b_1_2 b_1_3", "a_1_3 c_1_3 c_1_2 c_1_1"),
    ]:
        assert Rule(W(lhs), W(rhs)) in rules
    assert len(k4_system.rules_of("R1")) == 9
    assert k4_system.rules_of("R3") == []


def test_five_cycle_has_one_lifted_circuit(c5_system):
    assert c5_system.graph.n_vertices == 15
    circuits = {c5_system.provenance[r].circuit for r in c5_system.rules_of("R2")}
    assert len(circuits) == 1
    # labels along the 15-cycle repeat with period 3: two directions times three phases
    assert len(c5_system.rules_of("R2")) == 6
    assert all(len(r.lhs) == 8 for r in c5_system.rules_of("R2"))


def test_four_cycle_is_not_length_reducing():
    c4 = make_cyclic(4)
    system = nabla(c4, check_genset(c4, [1, 3]), 0)
    assert system.rules_of("R3")
    assert not is_length_reducing(system.system)
    assert all(len(r.lhs) == len(r.rhs) == 2 for r in system.rules_of("R3"))


@pytest.mark.parametrize("label,group,genset,n", ALL_CELLS)
def test_rule_invariants(label, group, genset, n):
    system = cached_nabla(label, group, genset, n)
    graph = system.graph
    for rule in system.system.rules:
        prov = system.provenance[rule]
        # lhs and rhs label paths with common endpoints, from some vertex
        starts = [v for v in range(graph.n_vertices) if graph.read(v, rule.lhs) is not None]
        assert any(graph.read(v, rule.lhs) == graph.read(v, rule.rhs) for v in starts)
        if prov.kind == "R1":
            assert rule.rhs == () and len(rule.lhs) == 2
        elif prov.kind == "R2":
            assert len(rule.lhs) == len(rule.rhs) + 1 and len(prov.circuit) % 2 == 1
        else:
            assert len(rule.lhs) == len(rule.rhs) and len(prov.circuit) % 2 == 0 >= 4 - len(prov.circuit)
    r1 = {r.lhs for r in system.rules_of("R1")}
    inv = system.system.inverse
    assert r1 == {(x, inv[x]) for x in system.system.alphabet}


@pytest.mark.parametrize("label,group,genset,n", ALL_CELLS)
def test_length_reducing_iff_geodetic(label, group, genset, n):
    system = cached_nabla(label, group, genset, n)
    geodetic = is_geodetic(cayley_graph(group, genset)).geodetic
    assert is_length_reducing(system.system) == geodetic
    if geodetic:
        assert system.rules_of("R3") == []


@pytest.mark.parametrize("label,group,genset,n", ALL_CELLS)
def test_inverse_closed_and_confluent(label, group, genset, n):
    system = cached_nabla(label, group, genset, n)
    assert is_inverse_closed(system.system)
    if system.length_reducing:
        assert check_confluence_bounded(system.system, 6).confluent


GEODETIC = [cell for cell in fixture_matrix() if cell[0] != "C4-cyclic"]


@pytest.mark.parametrize("label,group,genset", GEODETIC)
@pytest.mark.parametrize("n", [0, 1, 2])
def test_order_independence_on_geodetic_inputs(label, group, genset, n):
    system = cached_nabla(label, group, genset, n)
    assert is_geodetic(system.base).geodetic
    rules = enumerate_rules(system.graph, system.smap, system.order.reversed())
    assert {r for r, _ in rules} == set(system.system.rules)


def test_order_matters_on_four_cycle():
    c4 = make_cyclic(4)
    genset = check_genset(c4, [1, 3])
    forward = nabla(c4, genset, 0)
    backward = nabla(c4, genset, 0, forward.order.reversed())
    assert set(forward.system.rules) != set(backward.system.rules)
    with pytest.raises(ValueError):
        nabla(c4, genset, 0, ["b_1_1"])


def test_free_group_system():
    assert free_group_system(0).alphabet == () and free_group_system(0).rules == ()
    f1 = free_group_system(1)
    assert len(f1.alphabet) == 2 and len(f1.rules) == 2
    f2 = free_group_system(2)
    assert len(f2.alphabet) == 4 and len(f2.rules) == 4
    assert irreducible_words(f2, 2) == [1, 4, 12]
    assert is_inverse_closed(f2)
    with pytest.raises(ValueError):
        free_group_system(-1)


def test_compose_counts(k4_system):
    composed = compose_free_product(k4_system, free_group_system(2))
    assert len(composed.system.alphabet) == 13
    assert len(composed.system.rules) == len(k4_system.system.rules) + 4
    assert composed.factors == 2 and len(composed.pieces) == 1 + 2
    assert Letter("a", 1, 1, 1) in composed.system.alphabet
    assert Letter("b", 2, None, 2) in composed.system.alphabet


def test_compose_with_trivial_free_factor(k4_system):
    composed = compose_free_product(k4_system, free_group_system(0))
    untag = {x: Letter(x.klass, x.i, x.j) for x in composed.system.alphabet}
    assert {Rule(tuple(untag[x] for x in r.lhs), tuple(untag[x] for x in r.rhs)) for r in composed.system.rules} == set(
        k4_system.system.rules
    )


def test_compose_nested_keeps_factors_apart(k4_system, c5_system):
    inner = compose_free_product(c5_system, free_group_system(2))
    outer = compose_free_product(inner, compose_free_product(k4_system, free_group_system(1)))
    assert outer.factors == 4
    assert {x.factor for x in outer.system.alphabet} == {1, 2, 3, 4}
    assert is_inverse_closed(outer.system)
    assert check_confluence_bounded(outer.system, 5).confluent


def test_compose_collision_on_untagged_letters():
    a = RewritingSystem.build(["p", "P"], [(("p", "P"), ()), (("P", "p"), ())], {"p": "P", "P": "p"})
    with pytest.raises(AlphabetCollision):
        compose_free_product(a, a)


def test_presentation_abelianizations(k4_system):
    f2 = presentation_of(free_group_system(2))
    assert abelianization(f2) == AbelianInvariants((), 2)
    c4 = make_cyclic(4)
    zero = nabla(c4, check_genset(c4, [1, 2, 3]), 0)
    assert abelianization(presentation_of(zero.system)) == AbelianInvariants((4,), 0)
    assert abelianization(presentation_of(k4_system.system)) == AbelianInvariants((4,), 3)
    with pytest.raises(SystemNotInverseClosed):
        presentation_of(RewritingSystem.build("p", []))


def test_presentation_relators_are_lhs_times_inverse_rhs(k4_system):
    pres = presentation_of(k4_system.system)
    alphabet = k4_system.system.alphabet
    rule = k4_system.system.rules[-1]
    rel = pres.relators[-1]
    assert [alphabet[g] for g, e in rel if e == 1] == list(rule.lhs)
    assert [alphabet[g] for g, e in rel if e == -1] == list(reversed(rule.rhs))


def test_phi_examples():
    c4 = make_cyclic(4)
    part = partition_generators(c4, check_genset(c4, [1, 2, 3]))
    assert combined_depth(1, 1) == 4 and combined_depth(1, 2) == combined_depth(2, 1) == 7
    phi = phi_bijection(part, 1, 1)
    names = intermediate_names(part, 1)
    # x'_{i,1} goes to the first sub-letter of the renamed x_{i,1}
    first = names[Letter("b", 1, 1)]
    assert phi[Letter("b", 1, 1)] == Letter(first.klass, first.i, 1)
    last = names[Letter("b", 1, 3)]
    assert phi[Letter("b", 1, 9)] == Letter(last.klass, last.i, 3)
    assert len(set(phi.values())) == len(phi) == (1 + 2) * 9


def test_intermediate_partition_has_centre_involutions_only():
    c4 = make_cyclic(4)
    part = partition_generators(c4, check_genset(c4, [1, 2, 3]))
    names = intermediate_names(part, 2)
    involutions = [x for x, y in names.items() if y.klass == "a"]
    assert involutions == [Letter("a", 1, 3)]
    assert sum(1 for y in names.values() if y.klass == "b") == sum(1 for y in names.values() if y.klass == "c")


def test_json_roundtrip(tmp_path, k4_system):
    doc = k4_system.to_json()
    assert doc["n"] == 1 and len(doc["alphabet"]) == 9 and doc["length_reducing"] is True
    assert {r["type"] for r in doc["rules"]} == {"R1", "R2"}
    path = tmp_path / "k4.json"
    path.write_text(json.dumps(doc))
    loaded = load_system(path)
    assert loaded.rules == k4_system.system.rules
    assert loaded.inverse == k4_system.system.inverse
    assert system_to_json(loaded)["rules"][0] == {"lhs": "a_1_1 a_1_3", "rhs": "_"}
    word = W("a_1_1 a_1_2 a_1_3 b_1_1 b_1_2")
    assert normal_form(word, loaded) == normal_form(word, k4_system.system)


def test_rules_file_loading(tmp_path):
    path = tmp_path / "free.rules"
    path.write_text("b_1 c_1 -> _\nc_1 b_1 -> _\n")
    system = load_system(path)
    assert len(system.rules) == 2 and system.inverse is None
