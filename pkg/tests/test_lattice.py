from itertools import combinations

import pytest
from hypothesis import given

from props import check_moebius_roundtrip, seeds
from pidkit.lattice import (Antichain, LatticeError, PIDResult, build_lattice, cumulative_redundancy,
                            moebius_inversion, order_structure_collapse, precedes_or_equal)
from pidkit.measures import pid
from pidkit.systems import get_example

# node and Hasse-edge counts for n = 1..4 (frozen from the brute-force oracle below)
GOLDEN = {1: (1, 0), 2: (4, 4), 3: (18, 30), 4: (166, 452)}


def brute_antichains(n):
    subsets = [frozenset(c) for k in range(1, n + 1) for c in combinations(range(1, n + 1), k)]
    out = []
    for mask in range(1, 1 << len(subsets)):
        fam = [s for i, s in enumerate(subsets) if mask >> i & 1]
        if all(not (a <= b or b <= a) for a, b in combinations(fam, 2)):
            out.append(frozenset(fam))
    return out


def brute_hasse_count(nodes):
    def le(a, b):
        return all(any(x <= y for x in a) for y in b)
    count = 0
    for a in nodes:
        for b in nodes:
            if a != b and le(a, b):
                if not any(c not in (a, b) and le(a, c) and le(c, b) for c in nodes):
                    count += 1
    return count


@pytest.mark.parametrize("n", [1, 2, 3])
def test_counts_match_brute_force(n):
    fams = brute_antichains(n)
    assert len(fams) == GOLDEN[n][0]
    assert brute_hasse_count(fams) == GOLDEN[n][1]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lattice_sizes(n):
    lat = build_lattice(n)
    assert (len(lat), len(lat.covers)) == GOLDEN[n]


def test_four_predictor_nodes_match_brute_force():
    lat = build_lattice(4)
    assert {frozenset(a.sources) for a in lat} == set(brute_antichains(4))


def test_two_predictor_order():
    lat = build_lattice(2)
    assert [a.label for a in lat] == ["{1}{2}", "{1}", "{2}", "{12}"]
    assert lat.bottom.label == "{1}{2}" and lat.top.label == "{12}"
    assert {(a.label, b.label) for a, b in lat.covers} == {
        ("{1}{2}", "{1}"), ("{1}{2}", "{2}"), ("{1}", "{12}"), ("{2}", "{12}")}


def test_three_predictor_levels():
    lat = build_lattice(3)
    assert lat.bottom.label == "{1}{2}{3}" and lat.top.label == "{123}"
    assert max(lat.level.values()) == 7
    assert lat.level[lat.node("{12}{13}{23}")] == 4


def test_topological_order_respects_ordering():
    lat = build_lattice(3)
    pos = {a: i for i, a in enumerate(lat.topological_order)}
    for lo, hi in lat.covers:
        assert pos[lo] < pos[hi]


def test_antichain_parse_and_validation():
    a = Antichain.parse("{23}{1}")
    assert a.label == "{1}{23}"
    assert a.order_structure == (1, 2)
    assert a.members() == frozenset({1, 2, 3})
    with pytest.raises(LatticeError):
        Antichain([{1}, {1, 2}])
    with pytest.raises(LatticeError):
        Antichain.parse("{1}x")
    with pytest.raises(LatticeError):
        build_lattice(2).node("{3}")
    with pytest.raises(LatticeError):
        build_lattice(5)


def test_precedes():
    assert precedes_or_equal(Antichain.parse("{1}{2}"), Antichain.parse("{12}"))
    assert not precedes_or_equal(Antichain.parse("{1}"), Antichain.parse("{2}"))
    assert precedes_or_equal(Antichain.parse("{1}"), Antichain.parse("{1}"))


@given(seeds())
def test_moebius_roundtrip(seed):
    check_moebius_roundtrip(seed % 10**6, n=3)


@given(seeds())
def test_moebius_roundtrip_four(seed):
    check_moebius_roundtrip(seed % 10**6, n=4, tol=1e-10)


def test_moebius_missing_value():
    lat = build_lattice(2)
    with pytest.raises(LatticeError, match="missing"):
        moebius_inversion(lat, {lat.bottom: 0.0})


def test_rdnunqxor_chain():
    lat = build_lattice(2)
    icap = {lat.node(k): v for k, v in zip(["{1}{2}", "{1}", "{2}", "{12}"], [1, 2, 2, 4])}
    atoms = moebius_inversion(lat, icap)
    assert [atoms[a] for a in lat] == [1, 1, 1, 1]
    assert cumulative_redundancy(lat, atoms) == icap


def test_pid_result_accessors():
    res = pid(get_example("rdnunqxor"))
    assert isinstance(res, PIDResult)
    assert res["{1}"] == pytest.approx(1.0, abs=1e-9)
    assert res.icap("{12}") == pytest.approx(4.0, abs=1e-9)
    assert res.total == pytest.approx(4.0, abs=1e-9)
    assert [r["node"] for r in res.as_rows()] == ["{1}{2}", "{1}", "{2}", "{12}"]


def test_order_structure_collapse_dblxor():
    col = order_structure_collapse(pid(get_example("dblxor")))
    assert col[6][(2,)] == pytest.approx(3.0, abs=1e-9)
    assert col[7][(3,)] == pytest.approx(-1.0, abs=1e-9)
    assert sum(v for lev in col.values() for v in lev.values()) == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(LatticeError):
        order_structure_collapse(pid(get_example("and")))
