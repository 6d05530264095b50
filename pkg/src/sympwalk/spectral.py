"""Eigenvalues of the non-symplectic transvection walk on symplectic forms.

The walk's transition operator is diagonalized by the zonal/spherical
decomposition of GL_2n(F_q)/Sp_2n(F_q): one eigenvalue phi_lam per
partition-valued label lam of weight n, with multiplicity d_(lam u lam).

Two independent evaluation routes are provided and must agree exactly:

* eigenvalue_phi -- the combinatorial formula built from Macdonald-type
  arm/leg data at parameter (q, t = q^2), in both a "global" c'-ratio form
  and a "local" row/column product form;
* eigenvalue_via_lift -- the character ratio of GL_2n at a transvection
  (the classical transvection-walk eigenvalue), pushed through the affine
  relation T = aS + bI between the two walks.

All arithmetic is exact (Fraction); signs are carried, never stripped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .combinat import (
    PartitionFn,
    arm,
    check_weight,
    conjugate,
    dim_irrep,
    enumerate_partition_fns,
    hook_poly,
    leg,
    n_stat,
    remove_corner,
    removable_corners,
)
from .errors import NotSingleBoxError


def proportions_a_b(n, q):
    """(a, b): proportions of transvections that are non-symplectic resp.
    symplectic relative to a fixed form on F_q^(2n).  a + b = 1."""
    a = Fraction(q * (q ** (2 * n - 2) - 1), q ** (2 * n - 1) - 1)
    b = Fraction(q - 1, q ** (2 * n - 1) - 1)
    return a, b


# ---------------------------------------------------------------------------
# Macdonald-type factors at (q, t = q^2)
# ---------------------------------------------------------------------------

def macdonald_c(lam, q) -> Fraction:
    """c_lam(q, q^2) = prod over boxes (1 - q^(a) t^(l+1)), t = q^2."""
    out = Fraction(1)
    for i in range(1, len(lam) + 1):
        for j in range(1, lam[i - 1] + 1):
            out *= 1 - Fraction(q) ** (arm(lam, i, j) + 2 * leg(lam, i, j) + 2)
    return out


def macdonald_cprime(lam, q) -> Fraction:
    """c'_lam(q, q^2) = prod over boxes (1 - q^(a+1) t^l), t = q^2."""
    out = Fraction(1)
    for i in range(1, len(lam) + 1):
        for j in range(1, lam[i - 1] + 1):
            out *= 1 - Fraction(q) ** (arm(lam, i, j) + 1 + 2 * leg(lam, i, j))
    return out


def macdonald_b(lam, i, j, q) -> Fraction:
    """b_lam(s; q, q^2) = (1 - q^a t^(l+1)) / (1 - q^(a+1) t^l) at box s."""
    a = arm(lam, i, j)
    l = leg(lam, i, j)
    return Fraction(1 - q ** (a + 2 * l + 2), 1 - q ** (a + 1 + 2 * l))


def psi_prime(lam, mu, q) -> Fraction:
    """psi'_(lam/mu) for a single-box skew, at (q, t = q^2).

    The product runs over boxes in the column of the removed box but not
    its row, i.e. the boxes directly above the removed corner.
    """
    diff = [
        (i, j)
        for i in range(1, len(lam) + 1)
        for j in range(1, lam[i - 1] + 1)
        if i > len(mu) or j > mu[i - 1]
    ]
    if len(diff) != 1:
        raise NotSingleBoxError(f"skew {lam}/{mu} is not a single box")
    (ri, rj) = diff[0]
    out = Fraction(1)
    for i in range(1, ri):
        # box (i, rj) lies above the removed corner
        out *= macdonald_b(lam, i, rj, q) / macdonald_b(mu, i, rj, q)

    return out


# ---------------------------------------------------------------------------
# The eigenvalue formula (both forms)
# ---------------------------------------------------------------------------

def _degree_one_removals(lam_fn: PartitionFn):
    """All single-box removals from degree-1 entries.

    Entries repeat when distinct orbits carry equal partitions; each copy
    is a distinct reduced label and contributes its own term.  Only the
    affected partition matters to the ratios below; every other factor of
    the label cancels.
    """
    for idx in lam_fn.degree_one_indices():
        _, part = lam_fn.entries[idx]
        for corner in removable_corners(part):
            yield idx, part, corner, remove_corner(part, corner)


def _term_global(part, corner, reduced, q) -> Fraction:
    """c'-ratio form of one removal term (without the leading prefactor)."""
    i, j = corner
    ratio = (
        macdonald_cprime(part, q)
        * psi_prime(part, reduced, q)
        / (macdonald_cprime(reduced, q) * (1 - Fraction(q)))
    )
    return ratio * Fraction(q) ** (1 - j)


def _term_local(part, corner, reduced, q) -> Fraction:
    """Row/column product form of the same term.

    Boxes above the removed corner contribute even-exponent ratios, boxes
    to its left odd-exponent ratios; exponents are a + 2l + 2 resp.
    a + 2l + 1 taken in the partition before and after removal.
    """
    ri, rj = corner
    out = Fraction(1)
    for i in range(1, ri):  # column above the corner
        e_full = arm(part, i, rj) + 2 * leg(part, i, rj) + 2
        e_red = arm(reduced, i, rj) + 2 * leg(reduced, i, rj) + 2
        out *= Fraction(1 - q ** e_full, 1 - q ** e_red)
    for j in range(1, rj):  # row left of the corner
        e_full = arm(part, ri, j) + 2 * leg(part, ri, j) + 1
        e_red = arm(reduced, ri, j) + 2 * leg(reduced, ri, j) + 1
        out *= Fraction(1 - q ** e_full, 1 - q ** e_red)
    return out * Fraction(q) ** (1 - rj)


def eigenvalue_phi(lam_fn: PartitionFn, n, q, method="local") -> Fraction:
    """Walk eigenvalue phi for the label lam_fn of weight n.

    method="local" uses the row/column product; method="global" the
    c'/psi' ratio.  The two are algebraically equal and tested as such.
    For n = 1 every transvection of GL_2 is symplectic, the walk is
    trivial, and the only label is the trivial one with eigenvalue 1.
    """
    check_weight(lam_fn, n)
    if n == 1:
        return Fraction(1)
    term_fn = {"local": _term_local, "global": _term_global}[method]
    total = Fraction(0)
    for _, part, corner, reduced in _degree_one_removals(lam_fn):
        total += term_fn(part, corner, reduced, q)
    const = Fraction(q ** (2 * n) - 1, q ** (2 * n - 2) * (q * q - 1))
    pref = Fraction(
        q ** (2 * n - 2) * (q * q - 1),
        (q ** (2 * n) - 1) * (q ** (2 * n - 2) - 1),
    )
    return pref * (total - const)


# ---------------------------------------------------------------------------
# Character-ratio route (transvection walk on GL_N)
# ---------------------------------------------------------------------------

def _delta(lam_fn: PartitionFn, q) -> Fraction:
    """prod_phi q_phi^(n(lam(phi)')) / H_(lam(phi))(q_phi)."""
    out = Fraction(1)
    for d, part in lam_fn.entries:
        qphi = q ** d
        out *= Fraction(qphi ** n_stat(conjugate(part)), hook_poly(part, qphi))
    return out


def char_ratio_transvection(lam_fn: PartitionFn, N, q) -> Fraction:
    """chi_lam(transvection)/d_lam for a label of weight N on GL_N(F_q).

    Sum over single-box removals from degree-1 entries of
    delta(lam_1) / ((q-1) delta(lam)), minus (q^N - 1)/(q^(N-1)(q-1)),
    times q^(N-1)(q-1) / ((q^N - 1)(q^(N-1) - 1)).
    """
    check_weight(lam_fn, N)
    dl = _delta(lam_fn, q)
    total = Fraction(0)
    for idx, part, corner, _ in _degree_one_removals(lam_fn):
        reduced_fn = lam_fn.replace_partition(idx, remove_corner(part, corner))
        total += _delta(reduced_fn, q) / ((q - 1) * dl)
    const = Fraction(q ** N - 1, q ** (N - 1) * (q - 1))
    pref = Fraction(q ** (N - 1) * (q - 1), (q ** N - 1) * (q ** (N - 1) - 1))
    return pref * (total - const)


def eigenvalue_via_lift(lam_fn: PartitionFn, n, q) -> Fraction:
    """phi via the doubled label: (1/a) chi(transvection)/d - b/a.

    Independent of eigenvalue_phi except for shared partition plumbing;
    exact agreement between the two is the primary anti-bug oracle.
    """
    check_weight(lam_fn, n)
    if n == 1:
        return Fraction(1)
    a, b = proportions_a_b(n, q)
    ratio = char_ratio_transvection(lam_fn.doubled(), 2 * n, q)
    return (ratio - b) / a


# ---------------------------------------------------------------------------
# Bounds on individual eigenvalues
# ---------------------------------------------------------------------------

def eigenvalue_floor(n, q) -> Fraction:
    """Lower bound -1/(q^(2n-2) - 1) valid for every label."""
    return Fraction(-1, q ** (2 * n - 2) - 1)


def corner_bound(lam_fn: PartitionFn, n, q) -> Fraction:
    """Upper bound from removable corners:

    phi <= pref * sum over degree-1 corners (i, j) of
           (q^(2i) - 1)(q^j - 1) / (q^(j-1) (q-1)(q^2-1)).
    """
    check_weight(lam_fn, n)
    pref = Fraction(
        q ** (2 * n - 2) * (q * q - 1),
        (q ** (2 * n) - 1) * (q ** (2 * n - 2) - 1),
    )
    total = Fraction(0)
    for _, part, (i, j), _reduced in _degree_one_removals(lam_fn):
        total += Fraction(
            (q ** (2 * i) - 1) * (q ** j - 1),
            q ** (j - 1) * (q - 1) * (q * q - 1),
        )
    return pref * total


# ---------------------------------------------------------------------------
# Full spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralLine:
    """One eigenvalue line: its label type, exact value, the dimension
    d_(lam u lam) it carries, and how many concrete labels share it."""

    lam: PartitionFn
    phi: Fraction
    multiplicity: int
    type_count: int


def spectrum(n, q, method="local"):
    """All eigenvalue lines for given (n, q), sorted by descending phi.

    For n = 1 the walk is trivial (SL_2 = Sp_2, every transvection is
    symplectic): the single line is the trivial one.
    """
    lines = []
    for lam_fn, count in enumerate_partition_fns(n, q, context="L"):
        phi = eigenvalue_phi(lam_fn, n, q, method=method)
        mult = dim_irrep(lam_fn.doubled(), q)
        lines.append(SpectralLine(lam_fn, phi, mult, count))
    lines.sort(key=lambda line: (-line.phi, line.lam.entries))
    return lines


def trivial_label(n):
    """The label of the trivial character: (1^n) at one degree-1 orbit."""
    return PartitionFn.make([(1, (1,) * n)])


def spectrum_json(n, q):
    lines = spectrum(n, q)
    return {
        "n": n,
        "q": q,
        "lines": [
            {
                "lambda": line.lam.to_json(),
                "phi": f"{line.phi.numerator}/{line.phi.denominator}"
                if line.phi.denominator != 1
                else str(line.phi.numerator),
                "multiplicity": str(line.multiplicity),
                "type_count": line.type_count,
            }
            for line in lines
        ],
    }
