"""Exact sparse linear algebra over Q and F_p.

Vectors are dicts {index: nonzero scalar}.  Matrices are sparse with entries
{(row, col): scalar}.  Elimination is reduced column echelon with deterministic
pivoting (smallest available row index, columns in input order), with optional
bookkeeping of the combination of input columns behind each stored column.
Everything is exact; no floats anywhere.
"""


def vec_add(field, u, v):
    w = dict(u)
    for i, x in v.items():
        y = field.add(w.get(i, field.zero), x)
        if field.iszero(y):
            w.pop(i, None)
        else:
            w[i] = y
    return w


def vec_scale(field, c, u):
    if field.iszero(c):
        return {}
    return {i: field.mul(c, x) for i, x in u.items()}


def vec_sub(field, u, v):
    return vec_add(field, u, vec_scale(field, field.neg(field.one), v))


def vec_eq(u, v):
    return u == v


class SparseMatrix:
    """A linear map R^ncols -> R^nrows."""

    def __init__(self, field, nrows, ncols, entries=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        if entries:
            for (i, j), x in entries.items():
                self[i, j] = x

    def __setitem__(self, ij, x):
        i, j = ij
        assert 0 <= i < self.nrows and 0 <= j < self.ncols, (ij, self.nrows, self.ncols)
        if self.field.iszero(x):
            self.entries.pop(ij, None)
        else:
            self.entries[ij] = x

    def __getitem__(self, ij):
        return self.entries.get(ij, self.field.zero)

    def __eq__(self, other):
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) \
            and self.entries == other.entries

    def is_zero(self):
        return not self.entries

    def copy(self):
        return SparseMatrix(self.field, self.nrows, self.ncols, dict(self.entries))

    @classmethod
    def from_columns(cls, field, nrows, cols):
        A = cls(field, nrows, len(cols))
        for j, col in enumerate(cols):
            for i, x in col.items():
                A[i, j] = x
        return A

    @classmethod
    def identity(cls, field, n):
        A = cls(field, n, n)
        for i in range(n):
            A[i, i] = field.one
        return A

    def column(self, j):
        return {i: x for (i, jj), x in self.entries.items() if jj == j}

    def columns(self):
        cols = [dict() for _ in range(self.ncols)]
        for (i, j), x in self.entries.items():
            cols[j][i] = x
        return cols

    def apply(self, v):
        "matrix-vector product; v is a dict over column indices"
        out = {}
        F = self.field
        for j, c in v.items():
            for (i, jj), x in self.entries.items():
                if jj != j:
                    continue
                y = F.add(out.get(i, F.zero), F.mul(x, c))
                if F.iszero(y):
                    out.pop(i, None)
                else:
                    out[i] = y
        return out

    def mul(self, other):
        "self o other"
        assert self.ncols == other.nrows
        F = self.field
        out = SparseMatrix(F, self.nrows, other.ncols)
        rows_of = {}
        for (i, k), x in self.entries.items():
            rows_of.setdefault(k, []).append((i, x))
        for (k, j), y in other.entries.items():
            for i, x in rows_of.get(k, ()):
                out[i, j] = F.add(out[i, j], F.mul(x, y))
        return out

    def add(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        out = self.copy()
        for ij, x in other.entries.items():
            out[ij] = self.field.add(out[ij], x)
        return out

    def scale(self, c):
        out = SparseMatrix(self.field, self.nrows, self.ncols)
        for ij, x in self.entries.items():
            out[ij] = self.field.mul(c, x)
        return out

    def sub(self, other):
        return self.add(other.scale(self.field.neg(self.field.one)))

    def transpose(self):
        out = SparseMatrix(self.field, self.ncols, self.nrows)
        for (i, j), x in self.entries.items():
            out[j, i] = x
        return out

    def rank(self):
        ech = Echelon(self.field)
        for col in self.columns():
            ech.add(col)
        return len(ech.order)


class Echelon:
    """Reduced column echelon form, built incrementally.

    Stored columns are normalized (pivot entry 1) and mutually reduced:
    each stored column vanishes at the other pivot rows.  With `track`,
    each stored column also carries the combination of tagged input
    vectors that produced it.
    """

    def __init__(self, field, track=False):
        self.field = field
        self.track = track
        self.cols = {}    # pivot row -> column dict
        self.combos = {}  # pivot row -> {tag: scalar}
        self.order = []   # pivot rows in insertion order

    def reduce(self, v, want_combo=False):
        "eliminate all pivot rows from v; returns residual (and tag combo)"
        F = self.field
        v = dict(v)
        combo = {}
        for prow in list(v.keys() & self.cols.keys()):
            c = v.get(prow)
            if c is None or F.iszero(c):
                continue
            col = self.cols[prow]
            for i, x in col.items():
                y = F.sub(v.get(i, F.zero), F.mul(c, x))
                if F.iszero(y):
                    v.pop(i, None)
                else:
                    v[i] = y
            if want_combo and self.track:
                for tag, x in self.combos[prow].items():
                    y = F.add(combo.get(tag, F.zero), F.mul(c, x))
                    if F.iszero(y):
                        combo.pop(tag, None)
                    else:
                        combo[tag] = y
        # one pass suffices: stored columns are zero at the other pivot rows
        if want_combo:
            return v, combo
        return v

    def add(self, v, tag=None):
        "insert v; returns the new pivot row, or None if v was dependent"
        F = self.field
        if self.track:
            r, combo = self.reduce(v, want_combo=True)
        else:
            r = self.reduce(v)
            combo = None
        if not r:
            return None
        prow = min(r.keys())
        cinv = F.inv(r[prow])
        col = {i: F.mul(cinv, x) for i, x in r.items()}
        if self.track:
            combo = {t: F.mul(cinv, x) for t, x in combo.items()}
            if tag is not None:
                # residual = v - sum(combo); store v-combination for the column
                combo = {t: F.neg(x) for t, x in combo.items()}
                combo[tag] = F.add(combo.get(tag, F.zero), cinv)
            self.combos[prow] = combo
        # back-eliminate the new pivot row from the stored columns
        for q in self.order:
            oc = self.cols[q]
            c = oc.get(prow)
            if c is None:
                continue
            for i, x in col.items():
                y = F.sub(oc.get(i, F.zero), F.mul(c, x))
                if F.iszero(y):
                    oc.pop(i, None)
                else:
                    oc[i] = y
            if self.track:
                ocombo = self.combos[q]
                for t, x in self.combos[prow].items():
                    y = F.sub(ocombo.get(t, F.zero), F.mul(c, x))
                    if F.iszero(y):
                        ocombo.pop(t, None)
                    else:
                        ocombo[t] = y
        self.cols[prow] = col
        self.order.append(prow)
        return prow

    def contains(self, v):
        return not self.reduce(v)


def kernel_basis(A):
    "basis of ker(A), as vectors over column indices, in column order"
    ech = Echelon(A.field, track=True)
    basis = []
    for j, col in enumerate(A.columns()):
        r, combo = ech.reduce(col, want_combo=True)
        if not r:
            # col = sum combo: kernel vector e_j - combo
            k = {t: A.field.neg(x) for t, x in combo.items()}
            k[j] = A.field.one
            basis.append(k)
        else:
            ech.add(col, tag=j)
    return basis


def image_echelon(A):
    ech = Echelon(A.field)
    for col in A.columns():
        ech.add(col)
    return ech


def solve(A, b):
    "one solution x of A x = b, or None if inconsistent"
    F = A.field
    ech = Echelon(F, track=True)
    for j, col in enumerate(A.columns()):
        ech.add(col, tag=j)
    r, combo = ech.reduce(b, want_combo=True)
    if r:
        return None
    return combo


def in_span(field, cols, v):
    ech = Echelon(field)
    for c in cols:
        ech.add(c)
    return ech.contains(v)


def span_equal(field, cols1, cols2):
    e1 = Echelon(field)
    for c in cols1:
        e1.add(c)
    e2 = Echelon(field)
    for c in cols2:
        e2.add(c)
    return all(e1.contains(c) for c in cols2) and all(e2.contains(c) for c in cols1)


def span_intersection(field, n, cols1, cols2):
    "basis of span(cols1) & span(cols2)"
    m1, m2 = len(cols1), len(cols2)
    A = SparseMatrix(field, n, m1 + m2)
    for j, c in enumerate(cols1):
        for i, x in c.items():
            A[i, j] = x
    for j, c in enumerate(cols2):
        for i, x in c.items():
            A[i, m1 + j] = field.neg(x)
    out = Echelon(field)
    for k in kernel_basis(A):
        v = {}
        for j, c in k.items():
            if j < m1:
                v = vec_add(field, v, vec_scale(field, c, cols1[j]))
        out.add(v)
    return [dict(out.cols[p]) for p in out.order]


class Quotient:
    """R^n modulo the span of some columns, with canonical representatives.

    Representative coordinates are the ambient rows that are not pivot rows
    of the reduced span.
    """

    def __init__(self, field, n, span_cols):
        self.field = field
        self.n = n
        self.ech = Echelon(field)
        for c in span_cols:
            self.ech.add(c)
        pivots = set(self.ech.cols.keys())
        self.free = [i for i in range(n) if i not in pivots]
        self.index = {row: k for k, row in enumerate(self.free)}

    @property
    def dim(self):
        return len(self.free)

    def project(self, v):
        "coordinates of the class of v, as a dict over 0..dim-1"
        r = self.ech.reduce(v)
        out = {}
        for i, x in r.items():
            assert i in self.index, "reduction left a pivot row"
            out[self.index[i]] = x
        return out

    def include(self, k):
        "ambient representative of the k-th quotient basis vector"
        return {self.free[k]: self.field.one}


class Subquotient:
    """ker(d_out) / im(d_in) inside R^n, with representatives and coordinates."""

    def __init__(self, field, n, d_out=None, d_in=None):
        self.field = field
        self.n = n
        if d_out is None:
            cycles = [{i: field.one} for i in range(n)]
        else:
            assert d_out.ncols == n
            cycles = []
            for k in kernel_basis(d_out):
                cycles.append(k)
        self.bech = Echelon(field)
        if d_in is not None:
            assert d_in.nrows == n
            for c in d_in.columns():
                self.bech.add(c)
        self.rech = Echelon(field, track=True)
        self.reps = []
        for z in cycles:
            r = self.bech.reduce(z)
            if not r:
                continue
            if self.rech.add(r, tag=len(self.reps)) is not None:
                self.reps.append(r)

    @property
    def dim(self):
        return len(self.reps)

    def coords(self, v):
        "coordinates of the class of the cycle v in the representative basis"
        r = self.bech.reduce(v)
        res, combo = self.rech.reduce(r, want_combo=True)
        assert not res, "vector is not a cycle modulo boundaries"
        return combo

    def is_boundary(self, v):
        return not self.bech.reduce(v)
