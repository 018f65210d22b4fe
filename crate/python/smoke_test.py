"""Quick check of the compiled bindings: python python/smoke_test.py"""

import pylogchart as lc


def main():
    m = lc.Monoid(1, [[2], [3]])
    assert not m.classify()["saturated"]
    assert m.saturate().generators == [[1]]
    assert [5] in m and [1] not in m

    n1 = lc.Monoid.free(1)
    square = lc.Hom(n1, n1, [[2]])
    assert square.is_kummer() and square.is_exact()
    assert square.galois_group().order == 2
    assert square.chart(3)["kummer_etale"]
    assert not square.chart(2)["kummer_etale"]

    diagonal = lc.Hom(n1, lc.Monoid.free(2), [[1], [1]])
    assert not diagonal.is_kummer()

    product, group, certified = square.self_product(3)
    assert certified and group.invariants == [2]

    assert len(lc.covers(n1, 6)) == 4
    passed, covers, pairs = lc.galois_correspondence(lc.Monoid.free(2), 2)
    assert passed and (covers, pairs) == (5, 25)

    assert lc.FiniteGroup([2, 2]).cohomology(2, 4) == [1, 2, 3, 4, 5]
    matches, group_dims, cech_dims = square.cech_matches_group_cohomology(3, 2, 6)
    assert matches and group_dims == cech_dims == [1, 0, 0]
    assert lc.polydisc(2, 6) == [1, 2, 1]

    try:
        lc.Hom(n1, lc.Monoid(2, [[2, 0], [0, 1]]), [[1], [0]])
    except ValueError:
        pass
    else:
        raise AssertionError("map outside the codomain was accepted")

    again = lc.Hom.from_json(square.to_json())
    assert again.group_map == [[2]]
    print("pylogchart smoke test passed")


if __name__ == "__main__":
    main()
