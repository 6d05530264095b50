"""Total-variation upper and lower bounds for the walk, evaluated exactly.

The upper bound is the spectral sum  sqrt( (1/4) sum' d_(lam u lam)
|phi_lam|^(2k) )  where the primed sum drops the trivial label and every
label supported on a single degree-1 orbit carrying (1^n) -- those lift to
one-dimensional determinant characters whose randomness is supplied by the
initial diagonal twist, not by the transvection steps.

The lower bound comes from a support estimate: after n-c steps the walk
sits inside the double cosets whose class label has at least c parts at
the polynomial x - 1, and the total mass of those cosets is exponentially
small in c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .combinat import (
    PartitionFn,
    class_size,
    class_size_qsq,
    dim_irrep,
    enumerate_anchored_fns,
    enumerate_partition_fns,
    gl_order,
    sp_order,
)
from .errors import EnumerationTooLargeError
from .spectral import eigenvalue_phi

EXACT_MODE_MAX_N = 8
ENUMERATION_MAX_N = 14


@dataclass(frozen=True)
class BoundValue:
    """A bound with its evaluation mode.

    `squared` carries the exact rational square in exact mode (the square
    root itself is irrational); comparisons against exact TV values should
    use it.  `value` is the float square root in either mode.
    """

    value: float
    squared: Fraction | None
    mode: str


@dataclass(frozen=True)
class BoundCurve:
    n: int
    q: int
    points: tuple  # of (k, BoundValue)


def _is_determinant_twist(lam_fn: PartitionFn, n) -> bool:
    """Labels fixed by the initial randomization: a single degree-1 orbit
    carrying (1^n).  Includes the trivial label."""
    return len(lam_fn.entries) == 1 and lam_fn.entries[0] == (1, (1,) * n)


@lru_cache(maxsize=None)
def _spectral_terms(n, q):
    """(phi, multiplicity, count) per non-excluded label type."""
    if n > ENUMERATION_MAX_N:
        raise EnumerationTooLargeError(f"n={n} beyond enumeration cap {ENUMERATION_MAX_N}")
    out = []
    for fn, cnt in enumerate_partition_fns(n, q, context="L"):
        if _is_determinant_twist(fn, n):
            continue
        out.append((eigenvalue_phi(fn, n, q), dim_irrep(fn.doubled(), q), cnt))
    return tuple(out)


def _log_int(x: int) -> float:
    """log of a positive big integer without float overflow."""
    if x <= 0:
        raise ValueError("log of non-positive integer")
    shift = max(0, x.bit_length() - 53)
    return math.log(x >> shift) + shift * math.log(2)


def _log_fraction_abs(fr: Fraction) -> float:
    return _log_int(abs(fr.numerator)) - _log_int(fr.denominator)


def upper_bound_tv(n, q, k, mode="auto") -> BoundValue:
    """Spectral upper bound on TV distance after k steps.

    mode "exact" keeps the squared bound as one Fraction (default for
    n <= 8); "logfloat" accumulates term logs in float (per-term relative
    error well under 1e-9), needed once dimensions reach q^Theta(n^2).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode == "auto":
        mode = "exact" if n <= EXACT_MODE_MAX_N else "logfloat"
    terms = _spectral_terms(n, q)
    if mode == "exact":
        sq = Fraction(0)
        for phi, mult, cnt in terms:
            sq += Fraction(cnt * mult) * phi ** (2 * k)
        sq /= 4
        return BoundValue(math.sqrt(sq), sq, "exact")
    logs = []
    for phi, mult, cnt in terms:
        if phi == 0:
            continue
        logs.append(_log_int(cnt * mult) + 2 * k * _log_fraction_abs(phi))
    if not logs:
        return BoundValue(0.0, None, "logfloat")
    top = max(logs)
    acc = sum(math.exp(lg - top) for lg in logs)
    log_sq = top + math.log(acc) - math.log(4)
    return BoundValue(math.exp(log_sq / 2), None, "logfloat")


def bound_curve(n, q, ks, mode="auto") -> BoundCurve:
    return BoundCurve(n, q, tuple((k, upper_bound_tv(n, q, k, mode)) for k in ks))


# ---------------------------------------------------------------------------
# Support estimate and the lower bound
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _anchored_kernel_data(n, q):
    """(parts at x-1, double-coset size, count) per anchored class type.

    The number of parts of the partition at x - 1 equals the dimension of
    the fixed space of the class representative.
    """
    out = []
    for fn, pi0, cnt in enumerate_anchored_fns(n, q):
        out.append((len(pi0), fn, cnt))
    return tuple(out)


def support_fraction(n, q, c) -> Fraction:
    """Mass fraction (within GL_2n) of the union of double cosets whose
    label has at least c parts at x - 1."""
    if not 0 <= c <= n:
        raise ValueError("need 0 <= c <= n")
    total = 0
    for kdim, fn, cnt in _anchored_kernel_data(n, q):
        if kdim >= c:
            total += cnt * class_size_qsq(fn, q)
    return Fraction(total * sp_order(n, q), gl_order(2 * n, q))


def lower_bound_raw(n, q, c) -> Fraction:
    """1 - q * support_fraction, not clamped (vacuous values go negative)."""
    return 1 - q * support_fraction(n, q, c)


def lower_bound_tv(n, q, c) -> Fraction:
    """Certified TV lower bound after n - c steps, clamped to [0, 1]."""
    return max(Fraction(0), lower_bound_raw(n, q, c))


def fixed_space_tail_check(n, q, c):
    """Exact check of the class-mass tail inequality at parameter q:

        sum over classes with >= c-dim fixed space of |C_mu|
            <= 4 |GL_n(F_q)| / q^c.

    Returns (lhs, rhs, ok).
    """
    if not 0 <= c <= n:
        raise ValueError("need 0 <= c <= n")
    lhs = 0
    for kdim, fn, cnt in _anchored_kernel_data(n, q):
        if kdim >= c:
            lhs += cnt * class_size(fn, q)
    rhs = Fraction(4 * gl_order(n, q), q ** c)
    return lhs, rhs, Fraction(lhs) <= rhs


def ratio_constant_check(n, q):
    """prod_{i=1}^n (q^(2i) - 1)/(q^(2i) - q) and whether it stays <= 4.

    This is the exact constant linking the double-coset tail at parameter
    q^2 to the class tail at parameter q; it increases in n but converges.
    """
    val = Fraction(1)
    for i in range(1, n + 1):
        val *= Fraction(q ** (2 * i) - 1, q ** (2 * i) - q)
    return val, val <= 4


def negative_mass_bound(n, q, k):
    """Crude bound q^(2n^2) (q^(2n-2) - 1)^(-2k) on the negative-eigenvalue
    part of the spectral sum, plus the exact negative partial sum."""
    if k < 1:
        raise ValueError("k must be >= 1")
    crude = Fraction(q ** (2 * n * n), (q ** (2 * n - 2) - 1) ** (2 * k))
    exact = Fraction(0)
    for phi, mult, cnt in _spectral_terms(n, q):
        if phi <= 0:
            exact += Fraction(cnt * mult) * abs(phi) ** (2 * k)
    return crude, exact
