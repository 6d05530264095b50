from fractions import Fraction

import pytest

from sympwalk.combinat import (
    PartitionFn,
    a_mu,
    class_size,
    class_size_qsq,
    conjugate,
    coset_space_size,
    dim_irrep,
    enumerate_anchored_fns,
    enumerate_partition_fns,
    gl_order,
    hook_lengths,
    hook_poly,
    multiplicities,
    n_stat,
    orbit_count,
    partitions_of,
    psi_factor,
    removable_corners,
    remove_corner,
    sp_order,
    union_double,
)
from sympwalk.errors import NonIntegerResultError
from sympwalk.field import build_field
from sympwalk.linalg import MatFq


# ---------------------------------------------------------------------------
# partition operations
# ---------------------------------------------------------------------------

def test_partitions_of_small():
    assert partitions_of(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    assert len(partitions_of(10)) == 42


def test_removable_corners_square():
    assert removable_corners((2, 2)) == [(2, 2)]
    assert removable_corners((3, 1)) == [(1, 3), (2, 1)]
    assert remove_corner((2, 2), (2, 2)) == (2, 1)


def test_union_double_and_n_stat():
    assert union_double((2,)) == (2, 2)
    assert n_stat((2, 2)) == 2
    assert n_stat(conjugate((2, 2))) == 2
    assert conjugate((3, 1)) == (2, 1, 1)


def test_hooks_of_square():
    flat = sorted(h for row in hook_lengths((2, 2)) for h in row)
    assert flat == [1, 2, 2, 3]
    assert hook_poly((2, 2), 2) == (2 ** 3 - 1) * 3 * 3 * 1  # 63


def test_multiplicities():
    assert multiplicities((3, 2, 2, 1)) == {3: 1, 2: 2, 1: 1}


# ---------------------------------------------------------------------------
# enumeration of partition-valued function types
# ---------------------------------------------------------------------------

def test_enumerate_weight2_q2():
    fns = enumerate_partition_fns(2, 2, "M")
    assert len(fns) == 3
    assert all(cnt == 1 for _, cnt in fns)
    entries = {fn.entries for fn, _ in fns}
    assert entries == {((1, (2,)),), ((1, (1, 1)),), ((2, (1,)),)}


def test_enumerate_weight1_q3():
    fns = enumerate_partition_fns(1, 3, "M")
    assert len(fns) == 1
    fn, cnt = fns[0]
    assert fn.entries == ((1, (1,)),) and cnt == 2  # two degree-1 orbits


def brute_force_conjugacy_classes_gl2_f2():
    """Oracle: orbit partition of GL_2(F_2) under conjugation."""
    F2 = build_field(2, 1)
    elems = []
    for bits in range(16):
        rows = [[(bits >> 0) & 1, (bits >> 1) & 1], [(bits >> 2) & 1, (bits >> 3) & 1]]
        m = MatFq(F2, rows)
        if m.is_invertible():
            elems.append(m)
    classes = []
    seen = set()
    for x in elems:
        if x.key() in seen:
            continue
        orbit = {(g * x * g.inverse()).key() for g in elems}
        seen |= orbit
        classes.append(len(orbit))
    return sorted(classes)


def test_class_count_matches_brute_force_gl2_f2():
    fns = enumerate_partition_fns(2, 2, "M")
    brute = brute_force_conjugacy_classes_gl2_f2()
    assert len(brute) == sum(cnt for _, cnt in fns) == 3
    sizes = sorted(class_size(fn, 2) for fn, _ in fns)
    assert sizes == brute == [1, 2, 3]


def test_orbit_counts():
    assert orbit_count(1, 2) == 1
    assert orbit_count(1, 3) == 2
    assert orbit_count(2, 2) == 1
    assert orbit_count(3, 2) == 2
    assert orbit_count(2, 3) == 3


# ---------------------------------------------------------------------------
# orders, class sizes, dimensions
# ---------------------------------------------------------------------------

def test_orders():
    assert gl_order(4, 2) == 20160
    assert sp_order(2, 2) == 720
    assert gl_order(4, 2) // sp_order(2, 2) == 28
    assert coset_space_size(2, 2) == 28
    assert psi_factor(4, 2) == 1 * 3 * 7 * 15


def test_transvection_class_size_gl4_f2():
    mu = PartitionFn.make([(1, (2, 1, 1))])
    assert class_size(mu, 2) == 105
    # the displayed closed form
    q, n2 = 2, 4
    assert 105 == (q ** n2 - 1) * (q ** (n2 - 1) - 1) // (q - 1)


def test_identity_class_is_singleton():
    for n, q in ((2, 2), (3, 2), (2, 3)):
        mu = PartitionFn.make([(1, (1,) * n)])
        assert class_size(mu, q) == 1
        assert class_size_qsq(mu, q) == 1


def test_class_size_qsq_values_2_2():
    by_entries = {
        fn.entries: class_size_qsq(fn, 2) for fn, _ in enumerate_partition_fns(2, 2, "M")
    }
    assert by_entries == {
        ((1, (1, 1)),): 1,
        ((1, (2,)),): 15,
        ((2, (1,)),): 12,
    }
    assert sum(by_entries.values()) == 28


def test_dim_irrep_values_2_2():
    assert dim_irrep(PartitionFn.make([(1, (1, 1, 1, 1))]), 2) == 1
    assert dim_irrep(PartitionFn.make([(1, (2, 2))]), 2) == 20
    assert dim_irrep(PartitionFn.make([(2, (1, 1))]), 2) == 7
    # the pieces of the (2,2) value: psi_4(2) = 315, q^n(conj) = 4, H = 63
    assert psi_factor(4, 2) == 315
    assert 2 ** n_stat(conjugate((2, 2))) == 4
    assert hook_poly((2, 2), 2) == 63


@pytest.mark.parametrize("q", [2, 3])
def test_sum_class_sizes_equals_group_order(q):
    for n in range(1, 6):
        total = sum(cnt * class_size(fn, q) for fn, cnt in enumerate_partition_fns(n, q, "M"))
        assert total == gl_order(n, q)


@pytest.mark.parametrize("q", [2, 3])
def test_sum_coset_sizes_and_doubled_dims(q):
    for n in range(1, 5):
        fns = enumerate_partition_fns(n, q, "M")
        assert sum(cnt * class_size_qsq(fn, q) for fn, cnt in fns) == coset_space_size(n, q)
        lns = enumerate_partition_fns(n, q, "L")
        assert sum(cnt * dim_irrep(fn.doubled(), q) for fn, cnt in lns) == coset_space_size(n, q)
    if q == 2:
        fns = enumerate_partition_fns(2, 2, "L")
        dims = sorted(dim_irrep(fn.doubled(), 2) for fn, _ in fns)
        assert dims == [1, 7, 20]


def test_sum_dims_squared_equals_group_order():
    for N in range(1, 5):
        total = sum(
            cnt * dim_irrep(fn, 2) ** 2 for fn, cnt in enumerate_partition_fns(N, 2, "L")
        )
        assert total == gl_order(N, 2)


def test_a_mu_is_integral_and_exact():
    for q in (2, 3):
        for n in range(1, 5):
            for fn, _ in enumerate_partition_fns(n, q, "M"):
                val = a_mu(fn, q)
                assert val.denominator == 1
                assert gl_order(n, q) % val.numerator == 0


def test_non_integer_guard_fires(monkeypatch):
    import sympwalk.combinat as cb

    orig = cb.a_mu
    monkeypatch.setattr(cb, "a_mu", lambda mu, q: orig(mu, q) * Fraction(7919, 2))
    with pytest.raises(NonIntegerResultError):
        cb.class_size(PartitionFn.make([(1, (2,))]), 2)


def test_doubled_weight():
    fn = PartitionFn.make([(1, (2, 1)), (2, (1,))])
    assert fn.weight == 5
    assert fn.doubled().weight == 10
    assert fn.doubled().entries == ((1, (2, 2, 1, 1)), (2, (1, 1)))


def test_json_roundtrip():
    fn = PartitionFn.make([(1, (2,)), (1, (1,)), (2, (1,))])
    js = fn.to_json()
    assert js == [
        {"degree": 1, "partition": [1], "orbit": 0},
        {"degree": 1, "partition": [2], "orbit": 1},
        {"degree": 2, "partition": [1], "orbit": 0},
    ]
    assert PartitionFn.from_json(js) == fn


def test_anchored_enumeration_consistency():
    for n, q in ((2, 2), (3, 2), (2, 3), (4, 2), (3, 3)):
        plain = {}
        for fn, cnt in enumerate_partition_fns(n, q, "M"):
            plain[fn] = plain.get(fn, 0) + cnt
        anchored = {}
        for fn, _pi0, cnt in enumerate_anchored_fns(n, q):
            anchored[fn] = anchored.get(fn, 0) + cnt
        assert anchored == plain
