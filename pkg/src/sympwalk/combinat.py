"""Partition combinatorics and GL_n(F_q) class/representation counting.

Conjugacy classes of GL_n(F_q) are labeled by functions assigning a
partition to each Frobenius orbit of nonzero eigenvalues (equivalently,
to each monic irreducible polynomial != x over F_q), with degree-weighted
total size n.  Irreducible characters are labeled the same way over
character orbits.  Every formula used downstream depends only on the
multiset of (orbit degree, partition) pairs, so enumeration happens over
such "types" together with the exact number of concrete labelings of each
type.  All values are exact: Fraction for intermediate quotients, int for
anything provably integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import NonIntegerResultError, WeightMismatchError
from .field import _moebius


# ---------------------------------------------------------------------------
# Partitions (tuples of weakly decreasing positive ints)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions_of(n):
    """All partitions of n as weakly decreasing tuples."""
    if n == 0:
        return ((),)
    out = []

    def rec(remaining, maxpart, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for part in range(min(remaining, maxpart), 0, -1):
            acc.append(part)
            rec(remaining - part, part, acc)
            acc.pop()

    rec(n, n, [])
    return tuple(out)


def conjugate(lam):
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > i) for i in range(lam[0]))


def n_stat(lam):
    """n(lam) = sum (i-1) lam_i  (rows indexed from 1)."""
    return sum(i * part for i, part in enumerate(lam))


def arm(lam, i, j):
    """Boxes strictly right of box (i, j); 1-indexed box in row i, column j."""
    return lam[i - 1] - j


def leg(lam, i, j):
    """Boxes strictly below box (i, j)."""
    return sum(1 for r in range(i, len(lam)) if lam[r] >= j)


def hook_lengths(lam):
    """Hook length of every box, as a list of rows of ints."""
    return [
        [arm(lam, i, j) + leg(lam, i, j) + 1 for j in range(1, lam[i - 1] + 1)]
        for i in range(1, len(lam) + 1)
    ]


def hook_poly(lam, t):
    """H_lam(t) = prod over boxes of (t^hook - 1)."""
    out = 1
    for row in hook_lengths(lam):
        for h in row:
            out *= t ** h - 1
    return out


def multiplicities(lam):
    """m_i(lam): how many parts equal i."""
    out = {}
    for part in lam:
        out[part] = out.get(part, 0) + 1
    return out


def removable_corners(lam):
    """Boxes (i, j), 1-indexed, whose removal leaves a partition."""
    out = []
    for i, part in enumerate(lam, start=1):
        below = lam[i] if i < len(lam) else 0
        if part > below:
            out.append((i, part))
    return out


def remove_corner(lam, corner):
    i, j = corner
    assert lam[i - 1] == j, "not the corner of its row"
    out = list(lam)
    out[i - 1] -= 1
    if out[i - 1] == 0:
        out.pop(i - 1)
    return tuple(out)


def union_double(lam):
    """Each part of lam twice: (a, b, ...) -> (a, a, b, b, ...)."""
    out = []
    for part in lam:
        out.extend((part, part))
    return tuple(out)


# ---------------------------------------------------------------------------
# Partition-valued functions, represented by type
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class PartitionFn:
    """Multiset of (orbit degree, partition) pairs.

    Entries are kept sorted; repeats mean distinct orbits of the same
    degree carrying the same partition.  The concrete assignment of orbits
    is deliberately not stored: every class-size, dimension, and eigenvalue
    formula depends only on this data, and enumeration supplies the number
    of concrete functions per type.
    """

    entries: tuple  # of (degree, partition-tuple)

    @staticmethod
    def make(entries):
        entries = tuple(sorted((int(d), tuple(lam)) for d, lam in entries))
        if any(not lam or any(p <= 0 for p in lam) for _, lam in entries):
            raise ValueError("partitions must be nonempty with positive parts")
        if any(
            lam[i] < lam[i + 1]
            for _, lam in entries
            for i in range(len(lam) - 1)
        ):
            raise ValueError("parts must be weakly decreasing")
        return PartitionFn(entries)

    @property
    def weight(self):
        return sum(d * sum(lam) for d, lam in self.entries)

    def degree_one_indices(self):
        return [i for i, (d, _) in enumerate(self.entries) if d == 1]

    def replace_partition(self, index, new_lam):
        """Copy with entry `index` carrying new_lam (dropped if empty)."""
        items = list(self.entries)
        if new_lam:
            items[index] = (items[index][0], tuple(new_lam))
        else:
            items.pop(index)
        return PartitionFn(tuple(sorted(items)))

    def doubled(self):
        """Every partition replaced by its doubled version (parts repeated)."""
        return PartitionFn(
            tuple(sorted((d, union_double(lam)) for d, lam in self.entries))
        )

    def to_json(self):
        seen = {}
        out = []
        for d, lam in self.entries:
            idx = seen.get(d, 0)
            seen[d] = idx + 1
            out.append({"degree": d, "partition": list(lam), "orbit": idx})
        return out

    @staticmethod
    def from_json(items):
        return PartitionFn.make([(it["degree"], tuple(it["partition"])) for it in items])


def orbit_count(d, q):
    """Number of degree-d Frobenius orbits labeling classes/characters.

    Degree 1: the q-1 units.  Degree d >= 2: all monic irreducibles of
    degree d (necklace count); those automatically avoid the root 0.
    """
    if d == 1:
        return q - 1
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _moebius(e) * q ** (d // e)
    return total // d


def _partition_multisets(total, max_slots, max_key=None):
    """Multisets of nonempty partitions with given total weight.

    Yields canonically sorted tuples; partitions are chosen in weakly
    decreasing (size, partition) order so each multiset appears once.
    """
    if total == 0:
        yield ()
        return
    if max_slots == 0:
        return
    for w in range(total, 0, -1):
        for lam in partitions_of(w):
            key = (w, lam)
            if max_key is not None and key > max_key:
                continue
            for rest in _partition_multisets(total - w, max_slots - 1, key):
                yield (lam,) + rest


def _assignment_count(mset, n_orbits):
    """Number of injective orbit assignments for a partition multiset."""
    m = len(mset)
    if m > n_orbits:
        return 0
    ways = 1
    for i in range(m):
        ways *= n_orbits - i
    for cnt in multiplicities_of_items(mset).values():
        ways //= math.factorial(cnt)
    return ways


def multiplicities_of_items(items):
    out = {}
    for it in items:
        out[it] = out.get(it, 0) + 1
    return out


@lru_cache(maxsize=None)
def enumerate_partition_fns(n, q, context="M"):
    """All types of partition-valued functions of weight n over F_q.

    Returns a tuple of (PartitionFn, count) where count is the number of
    concrete functions of that type.  `context` is "M" (class labels) or
    "L" (character labels); the orbit counts agree degree by degree, so it
    only documents intent.
    """
    if context not in ("M", "L"):
        raise ValueError("context must be 'M' or 'L'")
    degrees = [d for d in range(1, n + 1) if orbit_count(d, q) > 0]
    results = []

    def rec(idx, remaining, acc_entries, acc_count):
        if remaining == 0:
            results.append((PartitionFn(tuple(sorted(acc_entries))), acc_count))
            return
        if idx == len(degrees):
            return
        d = degrees[idx]
        n_orb = orbit_count(d, q)
        for used in range(0, remaining // d + 1):
            if used == 0:
                rec(idx + 1, remaining, acc_entries, acc_count)
                continue
            for mset in _partition_multisets(used, n_orb):
                ways = _assignment_count(mset, n_orb)
                if ways == 0:
                    continue
                entries = acc_entries + [(d, lam) for lam in mset]
                rec(idx + 1, remaining - d * used, entries, acc_count * ways)

    rec(0, n, [], 1)
    return tuple(sorted(results))


def enumerate_anchored_fns(n, q):
    """Types with the partition at one marked degree-1 orbit resolved.

    Yields (fn, anchored_partition, count): `anchored_partition` (possibly
    empty) sits at a fixed degree-1 orbit -- the minimal polynomial of 1 --
    and `count` is the number of concrete functions with that anchored
    value whose remaining entries realize the rest of the type.  Summing
    counts over all anchored partitions reproduces the plain enumeration.
    """
    out = []
    for w0 in range(0, n + 1):
        pi0s = partitions_of(w0) if w0 else ((),)
        for pi0 in pi0s:
            rest_weight = n - w0
            for rest, count in _enumerate_with_reduced_degree_one(rest_weight, q):
                entries = list(rest.entries)
                if pi0:
                    entries.append((1, pi0))
                fn = PartitionFn(tuple(sorted(entries)))
                out.append((fn, pi0, count))
    return out


@lru_cache(maxsize=None)
def _enumerate_with_reduced_degree_one(n, q):
    """Like enumerate_partition_fns but with one degree-1 orbit removed."""
    if n == 0:
        return ((PartitionFn(()), 1),)
    degrees = [1] + [d for d in range(2, n + 1) if orbit_count(d, q) > 0]
    results = []

    def rec(idx, remaining, acc_entries, acc_count):
        if remaining == 0:
            results.append((PartitionFn(tuple(sorted(acc_entries))), acc_count))
            return
        if idx == len(degrees):
            return
        d = degrees[idx]
        n_orb = orbit_count(d, q) - (1 if d == 1 else 0)
        for used in range(0, remaining // d + 1):
            if used == 0:
                rec(idx + 1, remaining, acc_entries, acc_count)
                continue
            if n_orb == 0:
                continue
            for mset in _partition_multisets(used, n_orb):
                ways = _assignment_count(mset, n_orb)
                if ways == 0:
                    continue
                entries = acc_entries + [(d, lam) for lam in mset]
                rec(idx + 1, remaining - d * used, entries, acc_count * ways)

    rec(0, n, [], 1)
    return tuple(results)


# ---------------------------------------------------------------------------
# Group orders, class sizes, dimensions
# ---------------------------------------------------------------------------

def gl_order(n, q):
    """|GL_n(F_q)| = prod_{i=0}^{n-1} (q^n - q^i)."""
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def sp_order(n, q):
    """|Sp_2n(F_q)| = q^(n^2) prod_{i=1}^n (q^(2i) - 1)."""
    out = q ** (n * n)
    for i in range(1, n + 1):
        out *= q ** (2 * i) - 1
    return out


def psi_factor(n, q):
    """psi_n(q) = prod_{i=1}^n (q^i - 1)."""
    out = 1
    for i in range(1, n + 1):
        out *= q ** i - 1
    return out


def a_mu(mu: PartitionFn, q) -> Fraction:
    """Centralizer order of the class labeled mu in GL_n(F_q).

    a_mu(q) = q^n prod_f q_f^(2 n(mu(f))) prod_i prod_{j<=m_i} (1 - q_f^-j)
    evaluated exactly in rationals; the result is provably an integer and
    consumers check that.
    """
    n = mu.weight
    out = Fraction(q) ** n
    for d, lam in mu.entries:
        qf = q ** d
        out *= Fraction(qf) ** (2 * n_stat(lam))
        for _, m_i in multiplicities(lam).items():
            for j in range(1, m_i + 1):
                out *= 1 - Fraction(1, qf ** j)
    return out


def class_size(mu: PartitionFn, q) -> int:
    """|C_mu| = |GL_n(F_q)| / a_mu(q), checked integral."""
    n = mu.weight
    val = Fraction(gl_order(n, q)) / a_mu(mu, q)
    if val.denominator != 1:
        raise NonIntegerResultError(f"class size not integral for {mu} at q={q}")
    return val.numerator


def class_size_qsq(mu: PartitionFn, q) -> int:
    """The class-size rational function evaluated at q^2.

    This converts GL_n class data into the size (per unit of |Sp_2n|) of
    the corresponding double coset of GL_2n(F_q)/Sp_2n(F_q).  The symbolic
    product is re-evaluated at parameter q^2; orbit degrees stay fixed.
    """
    return class_size(mu, q * q)


def dim_irrep(lam: PartitionFn, q) -> int:
    """Dimension of the irreducible character labeled lam.

    d_lam = psi_N(q) prod_phi q_phi^(n(lam(phi)')) / H_(lam(phi))(q_phi)
    with N the weight, q_phi = q^deg(phi), H the hook polynomial.
    """
    N = lam.weight
    val = Fraction(psi_factor(N, q))
    for d, part in lam.entries:
        qphi = q ** d
        val *= Fraction(qphi ** n_stat(conjugate(part)), hook_poly(part, qphi))
    if val.denominator != 1:
        raise NonIntegerResultError(f"dimension not integral for {lam} at q={q}")
    return val.numerator


def coset_space_size(n, q):
    """|GL_2n| / |Sp_2n|: the number of symplectic forms on F_q^(2n)."""
    size, rem = divmod(gl_order(2 * n, q), sp_order(n, q))
    if rem:
        raise NonIntegerResultError("Sp order does not divide GL order")
    return size


def check_weight(fn: PartitionFn, n):
    if fn.weight != n:
        raise WeightMismatchError(f"weight {fn.weight} != {n}")
