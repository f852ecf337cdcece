import pytest
from hypothesis import given, settings, strategies as st

from lamplighter.groups import (C2, Z, Z2, BFSCapExceeded, ElementError, GroupSyntaxError, Wreath,
                                ball, element_from_json, element_to_json, generators, identity,
                                inverse, multiply, parse_group_spec, random_element, word_length)

SPECS = ["C2", "Z", "Z2", "C2 wr Z", "C2 wr Z2", "Z wr Z", "(C2 wr Z) wr Z", "C2 wr Z wr Z"]


def test_parse_round_trip():
    for text in SPECS:
        spec = parse_group_spec(text)
        assert parse_group_spec(str(spec)) == spec


def test_wr_is_left_associative():
    assert parse_group_spec("C2 wr Z wr Z") == parse_group_spec("(C2 wr Z) wr Z")
    assert parse_group_spec("C2 wr (Z wr Z)") != parse_group_spec("C2 wr Z wr Z")


@pytest.mark.parametrize("text,offset", [("C2 wr", 5), ("C3", 0), ("(C2 wr Z", 8), ("", 0)])
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(GroupSyntaxError) as exc:
        parse_group_spec(text)
    assert exc.value.offset == offset


def test_non_ascii_rejected():
    with pytest.raises(GroupSyntaxError):
        parse_group_spec("C2 ≀ Z")


def test_identity_and_generators():
    G = parse_group_spec("C2 wr Z")
    e = identity(G)
    assert e.lamps == () and e.position == 0
    labels = [lab for lab, _ in generators(G)]
    assert labels == ["switch[flip]", "move[+1]", "move[-1]"]
    assert len(generators("C2 wr Z2")) == 5


def test_lamplighter_product_by_hand():
    G = parse_group_spec("C2 wr Z")
    a = G.element({0: 1}, 1)  # flip at 0 then step right
    b = G.element({0: 1}, 0)
    # a * b flips the lamp at a's position
    assert multiply(G, a, b) == G.element({0: 1, 1: 1}, 1)
    assert multiply(G, b, a) == G.element({}, 1)


def test_inverse_by_hand():
    G = parse_group_spec("C2 wr Z")
    a = G.element({0: 1, 2: 1}, 3)
    ai = inverse(G, a)
    assert ai == G.element({-3: 1, -1: 1}, -3)
    assert multiply(G, a, ai) == G.identity()


def test_membership_errors():
    G = parse_group_spec("C2 wr Z")
    with pytest.raises(ElementError):
        multiply(G, G.identity(), (1, 2))
    with pytest.raises(ElementError):
        G.element({0: 2}, 0)


def test_json_round_trip(rng):
    for text in SPECS:
        G = parse_group_spec(text)
        for _ in range(20):
            x = random_element(G, rng)
            assert element_from_json(G, element_to_json(G, x)) == x


@pytest.mark.parametrize("text", SPECS)
def test_group_laws_on_random_triples(text, rng):
    G = parse_group_spec(text)
    e = G.identity()
    for _ in range(200):
        a, b, c = (random_element(G, rng) for _ in range(3))
        assert G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c))
        assert G.multiply(a, e) == a == G.multiply(e, a)
        assert G.multiply(a, G.inverse(a)) == e == G.multiply(G.inverse(a), a)


def _elements(spec):
    pos = st.integers(-4, 4) if spec.base == Z else st.tuples(st.integers(-3, 3), st.integers(-3, 3))
    cfg = st.dictionaries(pos, st.just(1), max_size=4)
    return st.builds(lambda c, p: spec.element(c, p), cfg, pos)


@settings(max_examples=150, deadline=None)
@given(_elements(Wreath(C2, Z)), _elements(Wreath(C2, Z)))
def test_word_length_triangle_and_symmetry(a, b):
    G = Wreath(C2, Z)
    la = word_length(G, a, mode="exact-line")
    lb = word_length(G, b, mode="exact-line")
    assert word_length(G, G.inverse(a), mode="exact-line") == la
    assert word_length(G, G.multiply(a, b), mode="exact-line") <= la + lb


@settings(max_examples=60, deadline=None)
@given(_elements(Wreath(C2, Z2)))
def test_bounds_sandwich_exact_tour(a):
    G = Wreath(C2, Z2)
    lo, hi = word_length(G, a, mode="bounds")
    assert lo <= word_length(G, a, mode="exact-tour") <= hi


def test_exact_line_matches_bfs_on_radius_6_ball():
    G = Wreath(C2, Z)
    for x, d in ball(G, 6).items():
        assert word_length(G, x, mode="exact-line") == d


def test_exact_tour_matches_bfs_on_small_grid_ball():
    G = Wreath(C2, Z2)
    for x, d in ball(G, 5).items():
        assert word_length(G, x, mode="exact-tour") == d


def test_ball_sizes_and_cap():
    assert len(ball("Z", 3)) == 7
    assert len(ball("Z2", 2)) == 13
    with pytest.raises(BFSCapExceeded):
        ball("C2 wr Z2", 8, limit=1000)


def test_bfs_cap():
    G = Wreath(C2, Z)
    with pytest.raises(BFSCapExceeded):
        word_length(G, G.element({}, 20), cap=5)


def test_short_words():
    G = Wreath(C2, Z)
    assert word_length(G, G.identity(), mode="exact-line") == 0
    assert word_length(G, G.element({0: 1}, 0), mode="exact-line") == 1
    assert word_length(G, G.element({1: 1}, 0), mode="exact-line") == 3
    assert word_length(G, G.element({}, -5), mode="exact-line") == 5
