"""Finite fields F_q (q = p^k) and univariate polynomials over them.

An element of F_{p^k} is stored as an integer code in [0, q): the residue
class with coefficient vector (c_0, ..., c_{k-1}) in the power basis has
code sum(c_i * p**i).  For prime fields the code is the residue itself.
The modulus is chosen deterministically (lexicographically smallest monic
irreducible of its degree), so codes mean the same thing across runs.
"""

from __future__ import annotations

from .errors import (
    DivisionByZeroError,
    EnumerationTooLargeError,
    FieldTooLargeError,
    NotPrimeError,
)

DEFAULT_MAX_FIELD_SIZE = 2 ** 20
ENUMERATION_CAP = 2 ** 24
_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# Polynomial arithmetic over F_p on raw coefficient lists (low-to-high).
# Used for modulus selection before any FieldSpec exists.
# ---------------------------------------------------------------------------

def _ptrim(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pmod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, c in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * c) % p
        a.pop()
    return _ptrim(a)


def _pmulmod(a, b, m, p):
    return _pmod(_pmul(a, b, p), m, p)


def _ppowmod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        inv = pow(b[-1], p - 2, p)
        bm = [(c * inv) % p for c in b]
        a, b = b, _pmod(a, bm, p)
    return a


def _prime_factors(n):
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _pdiff(a, b, p):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append((x - y) % p)
    return _ptrim(out)


def _irreducible_mod_p(coeffs, p):
    """Rabin test for a monic polynomial over F_p, degree >= 1."""
    d = len(coeffs) - 1
    if d == 1:
        return True
    x = [0, 1]
    if _pdiff(_ppowmod(x, p ** d, coeffs, p), x, p):
        return False  # x^(p^d) != x mod f
    for r in _prime_factors(d):
        diff = _pdiff(_ppowmod(x, p ** (d // r), coeffs, p), x, p)
        if not diff:
            return False  # f divides x^(p^(d/r)) - x: all factors have small degree
        if len(_pgcd(coeffs, diff, p)) - 1 >= 1:
            return False
    return True


def _smallest_irreducible(p, k):
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Candidates are ordered by their low-to-high coefficient tuple read as a
    base-p counter, which makes the choice reproducible.
    """
    if k == 1:
        return (0, 1)  # the polynomial x
    for code in range(p ** k):
        coeffs = []
        c = code
        for _ in range(k):
            coeffs.append(c % p)
            c //= p
        coeffs.append(1)
        if coeffs[0] == 0:
            continue  # divisible by x
        if _irreducible_mod_p(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible found; unreachable for prime p")


class FieldSpec:
    """A finite field F_{p^k} with fixed modulus; immutable and shareable.

    All arithmetic operates on integer codes in [0, q).
    """

    def __init__(self, p, k, modulus):
        if not is_prime(p):
            raise NotPrimeError(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if k > 1 and not _irreducible_mod_p(list(modulus), p):
            raise ValueError("modulus is reducible")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = modulus
        self._mul_table = None
        self._inv_table = None
        if self.k > 1 and self.q <= _TABLE_LIMIT:
            self._build_tables()

    def __repr__(self):
        return f"FieldSpec(p={self.p}, k={self.k})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    # -- code <-> coefficient vector ---------------------------------------

    def decode(self, a):
        """Coefficient tuple (low-to-high, length k) of the code a."""
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def encode(self, coeffs):
        a = 0
        for c in reversed(list(coeffs)[: self.k]):
            a = a * self.p + (c % self.p)
        return a

    def elements(self):
        return range(self.q)

    def element(self, a):
        return FieldElement(self, a % self.q if self.k == 1 else a)

    # -- arithmetic on codes ------------------------------------------------

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mul = 1
        for _ in range(self.k):
            out += ((a % p + b % p) % p) * mul
            a //= p
            b //= p
            mul *= p
        return out

    def neg(self, a):
        if self.k == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mul = 1
        for _ in range(self.k):
            out += ((-a) % p % p) * mul
            a //= p
            mul *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        if self._mul_table is not None:
            return self._mul_table[a][b]
        return self._mul_slow(a, b)

    def _mul_slow(self, a, b):
        ca = list(self.decode(a))
        cb = list(self.decode(b))
        prod = _pmod(_pmul(ca, cb, self.p), list(self.modulus), self.p)
        return self.encode(prod + [0] * (self.k - len(prod)))

    def inv(self, a):
        if a == 0:
            raise DivisionByZeroError("inverse of zero")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        if self._inv_table is not None:
            return self._inv_table[a]
        return self.pow(a, self.q - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _build_tables(self):
        q = self.q
        self._mul_table = [[self._mul_slow(a, b) for b in range(q)] for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            if inv[a]:
                continue
            for b in range(1, q):
                if self._mul_table[a][b] == 1:
                    inv[a] = b
                    inv[b] = a
                    break
        self._inv_table = inv


_FIELD_CACHE = {}


def build_field(p, k, max_size=DEFAULT_MAX_FIELD_SIZE):
    """Return F_{p^k} with the deterministic (lex-smallest) modulus.

    Instances are cached per (p, k): FieldSpec is immutable, so sharing is
    safe across threads and workers.
    """
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    if p ** k > max_size:
        raise FieldTooLargeError(f"q = {p}^{k} exceeds cap {max_size}")
    key = (p, k)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldSpec(p, k, _smallest_irreducible(p, k))
    return _FIELD_CACHE[key]


def field_from_order(q, max_size=DEFAULT_MAX_FIELD_SIZE):
    """Return F_q for a prime power q."""
    if q < 2:
        raise ValueError("field order must be >= 2")
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise NotPrimeError(f"{q} is not a prime power")
            return build_field(p, k, max_size=max_size)
    raise NotPrimeError(f"{q} is not a prime power")


class FieldElement:
    """Thin wrapper pairing a code with its field; supports operators."""

    __slots__ = ("field", "code")

    def __init__(self, field, code):
        self.field = field
        self.code = code % field.q

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements from different fields")
            return other.code
        return int(other) % self.field.q

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.code, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.code, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.code))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.code, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.code, self._coerce(other)))

    def __pow__(self, e):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.code))

    @property
    def coeffs(self):
        return self.field.decode(self.code)

    def __repr__(self):
        return f"FieldElement({self.code} in F_{self.field.q})"


class PolyFq:
    """Univariate polynomial over F_q; coefficients are codes, low-to-high."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def one(cls, field):
        return cls(field, (1,))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other):
        return (
            isinstance(other, PolyFq)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coeffs))

    def __add__(self, other):
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else 0
            b = other.coeffs[i] if i < len(other.coeffs) else 0
            out.append(F.add(a, b))
        return PolyFq(F, out)

    def __sub__(self, other):
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else 0
            b = other.coeffs[i] if i < len(other.coeffs) else 0
            out.append(F.sub(a, b))
        return PolyFq(F, out)

    def __mul__(self, other):
        F = self.field
        if self.is_zero or other.is_zero:
            return PolyFq(F, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = F.add(out[i + j], F.mul(a, b))
        return PolyFq(F, out)

    def scale(self, c):
        F = self.field
        return PolyFq(F, [F.mul(c, a) for a in self.coeffs])

    def monic(self):
        if self.is_zero:
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def __divmod__(self, other):
        if other.is_zero:
            raise DivisionByZeroError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        dd = other.degree
        lead_inv = F.inv(other.coeffs[-1])
        quot = [0] * max(0, len(rem) - dd)
        while len(rem) - 1 >= dd and rem:
            c = F.mul(rem[-1], lead_inv)
            shift = len(rem) - 1 - dd
            if c:
                quot[shift] = c
                for i, oc in enumerate(other.coeffs):
                    rem[shift + i] = F.sub(rem[shift + i], F.mul(c, oc))
            rem.pop()
        return PolyFq(F, quot), PolyFq(F, rem)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def pow_mod(self, e, mod):
        result = PolyFq.one(self.field)
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def __call__(self, a):
        """Evaluate at the code a (Horner)."""
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, a), c)
        return acc

    def __repr__(self):
        if self.is_zero:
            return "PolyFq(0)"
        terms = []
        for i in reversed(range(len(self.coeffs))):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("x" if c == 1 else f"{c}*x")
            else:
                terms.append(f"x^{i}" if c == 1 else f"{c}*x^{i}")
        return "PolyFq(" + "+".join(terms) + ")"


def is_irreducible(poly: PolyFq) -> bool:
    """Rabin irreducibility test over F_q (monic input, degree >= 1)."""
    if poly.degree < 1:
        return False
    if poly.degree == 1:
        return True
    F = poly.field
    q = F.q
    d = poly.degree
    x = PolyFq.x(F)
    t = x.pow_mod(q ** d, poly)
    if t != x % poly:
        return False
    for r in _prime_factors(d):
        t = x.pow_mod(q ** (d // r), poly)
        g = poly.gcd(t - x)
        if g.degree >= 1:
            return False
    return True


def _moebius(n):
    if n == 1:
        return 1
    result = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            result = -result
        f += 1
    if n > 1:
        result = -result
    return result


def irreducible_count(q, d, exclude_x=False):
    """Number of monic irreducibles of degree d over F_q (necklace formula)."""
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _moebius(e) * q ** (d // e)
    count = total // d
    if d == 1 and exclude_x:
        count -= 1
    return count


def enumerate_irreducibles(field, d, exclude_x=False, cap=ENUMERATION_CAP):
    """All monic irreducible polynomials of degree d over F_q, lex order.

    With exclude_x set and d == 1 the polynomial x is omitted (its root 0
    is not a unit, so it never labels an invertible-matrix orbit).
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    if field.q ** d > cap:
        raise EnumerationTooLargeError(f"q^d = {field.q}^{d} exceeds cap {cap}")
    out = []
    q = field.q
    for code in range(q ** d):
        coeffs = []
        c = code
        for _ in range(d):
            coeffs.append(c % q)
            c //= q
        coeffs.append(1)
        if exclude_x and d == 1 and coeffs[0] == 0:
            continue
        poly = PolyFq(field, coeffs)
        if is_irreducible(poly):
            out.append(poly)
    return out
