"""Exact dense linear algebra over F_q.

Houses the standard symplectic Gram matrix J, form-preservation tests,
transvection construction/enumeration/sampling, uniform sampling from the
symplectic group, and the conjugacy-class invariant (primary/Jordan block
partitions per irreducible factor of the characteristic polynomial).

Everything here is exact; no floating point.  Matrices are value types
(tuples of tuples of field codes) and all samplers take an explicit RNG so
parallel shards can own independent generators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimensionMismatchError,
    InternalError,
    NotInvertibleError,
    SingularMatrixError,
)
from .field import PolyFq, enumerate_irreducibles


class MatFq:
    """Dense matrix over F_q with row-major field-code entries."""

    __slots__ = ("field", "rows")

    def __init__(self, field, rows):
        self.field = field
        self.rows = tuple(tuple(r) for r in rows)
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix must be nonempty")
        w = len(self.rows[0])
        if any(len(r) != w for r in self.rows):
            raise ValueError("ragged rows")

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, field, n):
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field, n, m=None):
        m = n if m is None else m
        return cls(field, [[0] * m for _ in range(n)])

    @classmethod
    def diagonal(cls, field, codes):
        n = len(codes)
        return cls(field, [[codes[i] if i == j else 0 for j in range(n)] for i in range(n)])

    # -- shape / access -----------------------------------------------------

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0])

    @property
    def is_square(self):
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, MatFq)
            and self.field == other.field
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.rows))

    def key(self):
        """Canonical bytes key (codes < 256 by construction of small fields)."""
        return bytes(c for row in self.rows for c in row)

    def to_lists(self):
        return [list(r) for r in self.rows]

    def to_json(self):
        """Rows of integer residues; for extension fields, coefficient lists."""
        if self.field.k == 1:
            return self.to_lists()
        return [[list(self.field.decode(c)) for c in row] for row in self.rows]

    def __repr__(self):
        body = "; ".join(" ".join(str(c) for c in r) for r in self.rows)
        return f"MatFq[{body}]"

    # -- arithmetic ---------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, MatFq):
            if self.ncols != other.nrows:
                raise DimensionMismatchError(
                    f"{self.nrows}x{self.ncols} times {other.nrows}x{other.ncols}"
                )
            F = self.field
            bt = list(zip(*other.rows))
            if F.k == 1:
                p = F.p
                return MatFq(
                    F,
                    [
                        [sum(a * b for a, b in zip(row, col)) % p for col in bt]
                        for row in self.rows
                    ],
                )
            out = []
            for row in self.rows:
                orow = []
                for col in bt:
                    acc = 0
                    for a, b in zip(row, col):
                        if a and b:
                            acc = F.add(acc, F.mul(a, b))
                    orow.append(acc)
                out.append(orow)
            return MatFq(F, out)
        return NotImplemented

    __matmul__ = __mul__

    def __add__(self, other):
        F = self.field
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatchError("shape mismatch in add")
        return MatFq(
            F,
            [
                [F.add(a, b) for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other):
        F = self.field
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatchError("shape mismatch in sub")
        return MatFq(
            F,
            [
                [F.sub(a, b) for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
        )

    def __neg__(self):
        F = self.field
        return MatFq(F, [[F.neg(a) for a in r] for r in self.rows])

    def scale(self, c):
        F = self.field
        return MatFq(F, [[F.mul(c, a) for a in r] for r in self.rows])

    def transpose(self):
        return MatFq(self.field, list(zip(*self.rows)))

    def mat_vec(self, v):
        F = self.field
        if len(v) != self.ncols:
            raise DimensionMismatchError("vector length mismatch")
        if F.k == 1:
            p = F.p
            return tuple(sum(a * b for a, b in zip(row, v)) % p for row in self.rows)
        out = []
        for row in self.rows:
            acc = 0
            for a, b in zip(row, v):
                if a and b:
                    acc = F.add(acc, F.mul(a, b))
            out.append(acc)
        return tuple(out)

    def pow_int(self, e):
        if not self.is_square:
            raise DimensionMismatchError("power of non-square matrix")
        result = MatFq.identity(self.field, self.nrows)
        base = self
        if e < 0:
            base = base.inverse()
            e = -e
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- elimination-based operations ----------------------------------------

    def _echelon(self, rows):
        """In-place echelon form of a list of row lists; returns pivot count."""
        F = self.field
        m, n = len(rows), len(rows[0])
        rank = 0
        for col in range(n):
            piv = None
            for r in range(rank, m):
                if rows[r][col]:
                    piv = r
                    break
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            inv = F.inv(rows[rank][col])
            if inv != 1:
                rows[rank] = [F.mul(inv, a) for a in rows[rank]]
            for r in range(m):
                if r != rank and rows[r][col]:
                    c = rows[r][col]
                    rows[r] = [
                        F.sub(a, F.mul(c, b)) for a, b in zip(rows[r], rows[rank])
                    ]
            rank += 1
            if rank == m:
                break
        return rank

    def rank(self):
        return self._echelon([list(r) for r in self.rows])

    def kernel_dim(self):
        return self.ncols - self.rank()

    def kernel_basis(self):
        """Basis of {v : M v = 0} as a list of column vectors (tuples)."""
        F = self.field
        work = [list(r) for r in self.rows]
        self._echelon(work)
        n = self.ncols
        pivots = {}
        r = 0
        for row in work:
            for j in range(n):
                if row[j]:
                    pivots[j] = r
                    break
            else:
                break
            r += 1
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for j in free:
            v = [0] * n
            v[j] = 1
            for pj, pr in pivots.items():
                v[pj] = F.neg(work[pr][j])
            basis.append(tuple(v))
        return basis

    def inverse(self):
        if not self.is_square:
            raise DimensionMismatchError("inverse of non-square matrix")
        F = self.field
        n = self.nrows
        work = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)]
        self._echelon(work)
        for i in range(n):
            if any(work[i][j] != (1 if i == j else 0) for j in range(n)):
                raise SingularMatrixError("matrix is singular")
        return MatFq(F, [row[n:] for row in work])

    def det(self):
        F = self.field
        if not self.is_square:
            raise DimensionMismatchError("det of non-square matrix")
        rows = [list(r) for r in self.rows]
        n = self.nrows
        det = 1
        sign_swaps = 0
        r = 0
        for col in range(n):
            piv = None
            for i in range(r, n):
                if rows[i][col]:
                    piv = i
                    break
            if piv is None:
                return 0
            if piv != r:
                rows[r], rows[piv] = rows[piv], rows[r]
                sign_swaps += 1
            det = F.mul(det, rows[r][col])
            inv = F.inv(rows[r][col])
            for i in range(r + 1, n):
                if rows[i][col]:
                    c = F.mul(rows[i][col], inv)
                    rows[i] = [F.sub(a, F.mul(c, b)) for a, b in zip(rows[i], rows[r])]
            r += 1
        if sign_swaps % 2:
            det = F.neg(det)
        return det

    def is_invertible(self):
        return self.is_square and self.rank() == self.nrows

    def is_alternating(self):
        """Gram test: zero diagonal and M^T = -M.

        The zero diagonal is explicit because in characteristic 2 skewness
        is vacuous while alternation is not.
        """
        if not self.is_square:
            return False
        F = self.field
        n = self.nrows
        for i in range(n):
            if self.rows[i][i] != 0:
                return False
            for j in range(i + 1, n):
                if self.rows[i][j] != F.neg(self.rows[j][i]):
                    return False
        return True


def standard_J(n, field):
    """The 2n x 2n block Gram matrix [[0, I], [-I, 0]]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    F = field
    neg1 = F.neg(1)
    rows = []
    for i in range(n):
        rows.append([0] * (2 * n))
        rows[-1][n + i] = 1
    for i in range(n):
        rows.append([0] * (2 * n))
        rows[-1][i] = neg1
    return MatFq(F, rows)


def is_form_preserving(g, omega):
    """True iff g^T . omega . g == omega."""
    if not (g.is_square and omega.is_square and g.nrows == omega.nrows):
        raise DimensionMismatchError("form check needs square matrices of equal size")
    return g.transpose() * omega * g == omega


# ---------------------------------------------------------------------------
# Transvections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transvection:
    """The linear map I + v.f with f(v) = 0, v != 0, f != 0."""

    field: object
    v: tuple
    f: tuple

    def __post_init__(self):
        F = self.field
        if not any(self.v) or not any(self.f):
            raise ValueError("v and f must be nonzero")
        acc = 0
        for a, b in zip(self.f, self.v):
            acc = F.add(acc, F.mul(a, b))
        if acc != 0:
            raise ValueError("transvection needs f(v) = 0")

    def matrix(self):
        F = self.field
        n = len(self.v)
        return MatFq(
            F,
            [
                [
                    F.add(1 if i == j else 0, F.mul(self.v[i], self.f[j]))
                    for j in range(n)
                ]
                for i in range(n)
            ],
        )

    def inverse_matrix(self):
        # (I + vf)^(-1) = I - vf since f(v) = 0
        F = self.field
        n = len(self.v)
        return MatFq(
            F,
            [
                [
                    F.sub(1 if i == j else 0, F.mul(self.v[i], self.f[j]))
                    for j in range(n)
                ]
                for i in range(n)
            ],
        )


def _nonzero_vectors(dim, field):
    q = field.q
    for code in range(1, q ** dim):
        v = []
        c = code
        for _ in range(dim):
            v.append(c % q)
            c //= q
        yield tuple(v)


def projective_vectors(dim, field):
    """One representative per line: first nonzero coordinate equals 1."""
    for v in _nonzero_vectors(dim, field):
        for c in v:
            if c:
                lead = c
                break
        if lead == 1:
            yield v


def annihilator_basis(v, field):
    """Basis of {f : f(v) = 0} in the dual, given v != 0."""
    F = field
    n = len(v)
    j = next(i for i, c in enumerate(v) if c)
    inv = F.inv(v[j])
    basis = []
    for i in range(n):
        if i == j:
            continue
        f = [0] * n
        f[i] = 1
        f[j] = F.neg(F.mul(v[i], inv))
        basis.append(tuple(f))
    return basis


def all_transvections(dim, field):
    """Every transvection of GL_dim(F_q) exactly once.

    (v, f) and (cv, f/c) give the same map, so v runs over projective
    representatives and f over all nonzero annihilator functionals.
    """
    F = field
    for v in projective_vectors(dim, field):
        basis = annihilator_basis(v, field)
        m = len(basis)
        for code in range(1, F.q ** m):
            coeffs = []
            c = code
            for _ in range(m):
                coeffs.append(c % F.q)
                c //= F.q
            f = [0] * dim
            for coeff, b in zip(coeffs, basis):
                if coeff:
                    f = [F.add(a, F.mul(coeff, x)) for a, x in zip(f, b)]
            yield Transvection(F, v, tuple(f))


def transvection_count(dim, q):
    """(q^dim - 1)(q^(dim-1) - 1)/(q - 1)."""
    return (q ** dim - 1) * (q ** (dim - 1) - 1) // (q - 1)


def symplectic_transvection_count(dim, q):
    """q^dim - 1: maps of the shape I + a.v.omega(v, .)."""
    return q ** dim - 1


def sample_transvection(n, field, rng):
    """Uniform transvection on F_q^(2n).

    Each transvection arises from exactly q-1 pairs (v, f), so drawing v
    uniform nonzero and f uniform nonzero in the annihilator of v is
    uniform over transvections.
    """
    return _sample_transvection_dim(2 * n, field, rng)


def _sample_transvection_dim(dim, field, rng):
    if dim < 2:
        raise ValueError("need dimension >= 2")
    F = field
    q = F.q
    while True:
        v = tuple(rng.randrange(q) for _ in range(dim))
        if any(v):
            break
    basis = annihilator_basis(v, F)
    while True:
        coeffs = [rng.randrange(q) for _ in basis]
        if any(coeffs):
            break
    f = [0] * dim
    for coeff, b in zip(coeffs, basis):
        if coeff:
            f = [F.add(a, F.mul(coeff, x)) for a, x in zip(f, b)]
    return Transvection(F, v, tuple(f))


def preserves_form(t: Transvection, omega: MatFq) -> bool:
    """I + vf preserves omega iff f is proportional to v^T.omega.

    (v^T omega v = 0 automatically for alternating omega, and the rank-one
    perturbation of the Gram matrix cancels exactly on that line.)
    """
    F = t.field
    w = tuple(omega.transpose().mat_vec(t.v))  # w_j = sum_i v_i omega_ij
    j = next((i for i, c in enumerate(w) if c), None)
    if j is None:
        raise InternalError("degenerate form in preserves_form")
    c = F.div(t.f[j], w[j])
    if c == 0:
        return False
    return all(t.f[i] == F.mul(c, w[i]) for i in range(len(w)))


def sample_nonpreserving_transvection(omega, rng, max_tries=10 ** 6):
    """Uniform transvection t with t^T.omega.t != omega, by rejection."""
    dim = omega.nrows
    for _ in range(max_tries):
        t = _sample_transvection_dim(dim, omega.field, rng)
        if not preserves_form(t, omega):
            return t
    raise InternalError("rejection sampling did not terminate")


# ---------------------------------------------------------------------------
# Uniform symplectic group sampling
# ---------------------------------------------------------------------------

def _omega_std(n, field, x, y):
    """x^T J y for the standard J, without building J."""
    F = field
    acc = 0
    for i in range(n):
        acc = F.add(acc, F.mul(x[i], y[n + i]))
        acc = F.sub(acc, F.mul(x[n + i], y[i]))
    return acc


def sample_symplectic(n, field, rng):
    """Uniform element of Sp_2n(F_q) w.r.t. the standard form.

    Builds a uniformly random symplectic basis pair by pair: e_i uniform
    nonzero in the current orthogonal complement W, f_i uniform among
    vectors of W pairing to 1 with e_i.  The symplectic group acts simply
    transitively on symplectic bases, so the output is uniform.
    """
    F = field
    q = F.q
    N = 2 * n
    if F.k == 1:
        add = lambda a, b: (a + b) % q
        mul = lambda a, b: (a * b) % q
        sub = lambda a, b: (a - b) % q
        inv_of = lambda a: pow(a, q - 2, q)
    else:
        add, mul, sub, inv_of = F.add, F.mul, F.sub, F.inv

    def omega(x, y):
        acc = 0
        for i in range(n):
            acc = add(acc, mul(x[i], y[n + i]))
            acc = sub(acc, mul(x[n + i], y[i]))
        return acc

    def combine(target, c, vec):
        return [add(a, mul(c, x)) for a, x in zip(target, vec)]

    basis = [tuple(1 if i == j else 0 for j in range(N)) for i in range(N)]
    es, fs = [], []
    for _ in range(n):
        m = len(basis)
        # e: uniform nonzero combination of the current basis of W
        while True:
            coeffs = [rng.randrange(q) for _ in range(m)]
            if any(coeffs):
                break
        e = [0] * N
        for c, b in zip(coeffs, basis):
            if c:
                e = combine(e, c, b)
        e = tuple(e)
        # pairings of e against the basis of W
        pair = [omega(e, b) for b in basis]
        piv = next(i for i, c in enumerate(pair) if c)
        inv = inv_of(pair[piv])
        f0 = tuple(mul(inv, c) for c in basis[piv])
        # kernel of omega(e, .) inside W
        kernel = []
        for i, b in enumerate(basis):
            if i == piv:
                continue
            c = mul(pair[i], inv)
            kernel.append(tuple(sub(a, mul(c, x)) for a, x in zip(b, basis[piv])))
        # f: f0 plus uniform kernel element
        coeffs = [rng.randrange(q) for _ in kernel]
        f = list(f0)
        for c, b in zip(coeffs, kernel):
            if c:
                f = combine(f, c, b)
        f = tuple(f)
        # W' = vectors of the kernel also pairing to 0 with f
        pair_f = [omega(f, b) for b in kernel]
        piv2 = next((i for i, c in enumerate(pair_f) if c), None)
        if piv2 is None:
            new_basis = kernel
        else:
            inv2 = inv_of(pair_f[piv2])
            new_basis = []
            for i, b in enumerate(kernel):
                if i == piv2:
                    continue
                c = mul(pair_f[i], inv2)
                new_basis.append(
                    tuple(sub(a, mul(c, x)) for a, x in zip(b, kernel[piv2]))
                )
        basis = new_basis
        es.append(e)
        fs.append(f)
    cols = es + fs
    return MatFq(F, [[cols[j][i] for j in range(N)] for i in range(N)])


# ---------------------------------------------------------------------------
# Characteristic polynomial and class invariants
# ---------------------------------------------------------------------------

def charpoly(M: MatFq) -> PolyFq:
    """det(xI - M) by the Berkowitz algorithm (division-free)."""
    if not M.is_square:
        raise DimensionMismatchError("charpoly of non-square matrix")
    F = M.field
    n = M.nrows
    rows = M.rows
    # v holds coefficients of the char poly of the leading k x k block,
    # highest degree first.
    v = [1, F.neg(rows[0][0])]
    for k in range(1, n):
        a = rows[k][k]
        R = rows[k][:k]
        C = [rows[i][k] for i in range(k)]
        sub = [rows[i][:k] for i in range(k)]
        # Toeplitz column: 1, -a, -(R C), -(R sub C), ..., -(R sub^(k-1) C)
        col = [1, F.neg(a)]
        w = list(C)
        for j in range(k):
            if j > 0:
                w = [_dot(F, sub[i], w) for i in range(k)]
            col.append(F.neg(_dot(F, R, w)))
        # v' = T v for the (k+2) x (k+1) lower-triangular Toeplitz T
        new_v = [0] * (k + 2)
        for i in range(k + 2):
            acc = 0
            for j in range(len(v)):
                if 0 <= i - j < len(col):
                    acc = F.add(acc, F.mul(col[i - j], v[j]))
            new_v[i] = acc
        v = new_v
    return PolyFq(F, list(reversed(v)))


def _dot(F, a, b):
    if F.k == 1:
        return sum(x * y for x, y in zip(a, b)) % F.p
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = F.add(acc, F.mul(x, y))
    return acc


_IRRED_CACHE = {}


def _irreducibles_of_degree(field, d):
    key = (field.p, field.k, d)
    if key not in _IRRED_CACHE:
        _IRRED_CACHE[key] = enumerate_irreducibles(field, d)
    return _IRRED_CACHE[key]


def factor_poly(poly: PolyFq):
    """Factor a monic polynomial by trial division, ascending degree.

    Returns a list of (irreducible PolyFq, multiplicity).  Desk-scale only:
    enumerates irreducibles up to half the remaining degree.
    """
    if not poly.is_monic:
        poly = poly.monic()
    factors = []
    rem = poly
    d = 1
    while rem.degree >= 1:
        if d > rem.degree // 2:
            factors.append((rem, 1))
            break
        hit = False
        for cand in _irreducibles_of_degree(poly.field, d):
            mult = 0
            while True:
                quo, r = divmod(rem, cand)
                if r.is_zero:
                    rem = quo
                    mult += 1
                else:
                    break
            if mult:
                factors.append((cand, mult))
                hit = True
                if rem.degree < 1:
                    break
        d += 1
    # merge exact equal factors (possible when the tail was irreducible)
    merged = {}
    for f, m in factors:
        merged[f] = merged.get(f, 0) + m
    return sorted(merged.items(), key=lambda fm: (fm[0].degree, fm[0].coeffs))


@dataclass(frozen=True)
class ClassInvariant:
    """Per irreducible factor f of the characteristic polynomial, the
    partition of primary (Jordan) block sizes.  A complete conjugacy
    invariant for invertible matrices."""

    entries: tuple  # of (PolyFq, partition tuple), sorted

    def degree_partition_pairs(self):
        return tuple((f.degree, lam) for f, lam in self.entries)

    def total_weight(self):
        return sum(f.degree * sum(lam) for f, lam in self.entries)


def partition_from_rank_sequence(ranks, d):
    """Block-size partition from r_j = rank(f(X)^j), r_0 = dimension.

    The number of parts of size >= j is (r_(j-1) - r_j)/d.
    """
    parts_ge = []
    for j in range(1, len(ranks)):
        diff = ranks[j - 1] - ranks[j]
        if diff % d:
            raise InternalError("rank drop not divisible by factor degree")
        parts_ge.append(diff // d)
    lam = []
    for j, cnt in enumerate(parts_ge, start=1):
        nxt = parts_ge[j] if j < len(parts_ge) else 0
        lam.extend([j] * (cnt - nxt))
    return tuple(sorted(lam, reverse=True))


def class_invariant(X: MatFq) -> ClassInvariant:
    """Recover block-size partitions from rank sequences of f(X)^j."""
    if not X.is_square:
        raise DimensionMismatchError("class invariant of non-square matrix")
    N = X.nrows
    cp = charpoly(X)
    if cp.coeffs[0] == 0:
        raise NotInvertibleError("matrix has eigenvalue 0")
    entries = []
    for f, mult in factor_poly(cp):
        d = f.degree
        fX = _eval_poly_at_matrix(f, X)
        ranks = [N]
        power = fX
        while True:
            r = power.rank()
            ranks.append(r)
            if r == 0 or ranks[-1] == ranks[-2]:
                break
            power = power * fX
        lam = partition_from_rank_sequence(ranks, d)
        if sum(lam) != mult:
            raise InternalError("partition weight disagrees with factor multiplicity")
        entries.append((f, lam))
    inv = ClassInvariant(tuple(sorted(entries, key=lambda e: (e[0].degree, e[0].coeffs))))
    if inv.total_weight() != N:
        raise InternalError("class invariant weight mismatch")
    return inv


def _eval_poly_at_matrix(poly: PolyFq, X: MatFq) -> MatFq:
    F = X.field
    n = X.nrows
    acc = MatFq.zeros(F, n)
    ident = MatFq.identity(F, n)
    for c in reversed(poly.coeffs):
        acc = acc * X
        if c:
            acc = acc + ident.scale(c)
    return acc
