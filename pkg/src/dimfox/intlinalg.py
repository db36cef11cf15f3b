"""Exact row-lattice arithmetic over Z and Z/m.

Everything downstream (group-ring ideals, abelian-group presentations,
kernel/image computations) reduces to a handful of primitives on integer
row lattices: incremental Hermite echelon forms, membership with
coefficient recovery, Smith normal form with column transforms, left
kernels and lattice intersections.

A submodule of (Z/m)^n is represented by its full preimage lattice in
Z^n, which always contains m*Z^n.  The Hermite basis of the preimage,
read modulo m, is the Howell form of the submodule, so span equality and
membership over Z/m come for free from the integer machinery.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Iterable, Sequence


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


class IntLattice:
    """A lattice in Z^n kept in row-echelon (Hermite) shape.

    Rows have strictly increasing pivot columns and positive pivots.
    With ``modulus`` m > 0 the lattice is seeded with m*Z^n, so it stays
    full rank and all entries remain bounded once normalized.

    All mutating operations are span-preserving; `canonical()` returns
    the unique fully reduced basis (modulo m when a modulus is set, with
    zero rows dropped), so two spans are equal iff their canonical forms
    are equal.
    """

    __slots__ = ("ncols", "modulus", "rows", "pivcols", "_dirty", "_canonical", "_changes")

    # structural changes tolerated before entries are re-reduced; keeps
    # intermediate integer growth bounded during long insertion runs
    NORMALIZE_EVERY = 12

    def __init__(self, ncols: int, modulus: int = 0):
        if ncols < 0:
            raise ValueError("ncols must be >= 0")
        if modulus < 0:
            raise ValueError("modulus must be >= 0")
        self.ncols = ncols
        self.modulus = modulus
        self.rows: list[list[int]] = []
        self.pivcols: list[int] = []
        self._dirty = False
        self._canonical: tuple[tuple[int, ...], ...] | None = None
        self._changes = 0
        if modulus:
            for j in range(ncols):
                row = [0] * ncols
                row[j] = modulus
                self.rows.append(row)
                self.pivcols.append(j)

    def copy(self) -> "IntLattice":
        other = IntLattice.__new__(IntLattice)
        other.ncols = self.ncols
        other.modulus = self.modulus
        other.rows = [row[:] for row in self.rows]
        other.pivcols = self.pivcols[:]
        other._dirty = self._dirty
        other._canonical = self._canonical
        other._changes = self._changes
        return other

    def _find_pivot_row(self, col: int) -> int | None:
        i = bisect_left(self.pivcols, col)
        if i < len(self.pivcols) and self.pivcols[i] == col:
            return i
        return None

    def add(self, vec: Sequence[int]) -> bool:
        """Insert a vector; returns True if the span grew."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        m = self.modulus
        v = [x % m for x in vec] if m else list(vec)
        n = self.ncols
        changed = False
        j = 0
        while j < n:
            if v[j] == 0:
                j += 1
                continue
            i = self._find_pivot_row(j)
            if i is None:
                if v[j] < 0:
                    v = [-x for x in v]
                insort(self.pivcols, j)
                self.rows.insert(bisect_left(self.pivcols, j), v)
                # insort + insert must agree on position; pivcols was
                # updated first so bisect_left finds the new slot.
                self._touch()
                return True
            row = self.rows[i]
            a = row[j]
            b = v[j]
            if b % a == 0:
                q = b // a
                if m:
                    v = [(x - q * y) % m for x, y in zip(v, row)]
                else:
                    v = [x - q * y for x, y in zip(v, row)]
            else:
                g, s, t = xgcd(a, b)
                qa = a // g
                qb = b // g
                if m:
                    new_row = [(s * x + t * y) % m for x, y in zip(row, v)]
                    new_row[j] = g
                    v = [(qa * y - qb * x) % m for x, y in zip(row, v)]
                else:
                    new_row = [s * x + t * y for x, y in zip(row, v)]
                    v = [qa * y - qb * x for x, y in zip(row, v)]
                self.rows[i] = new_row
                changed = True
            # v[j] is now 0 in both branches
        if changed:
            self._touch()
        return changed

    def _touch(self) -> None:
        self._dirty = True
        self._canonical = None
        self._changes += 1
        if self._changes >= self.NORMALIZE_EVERY:
            self._normalize()
            self._changes = 0

    def add_all(self, vecs: Iterable[Sequence[int]]) -> None:
        for v in vecs:
            self.add(v)

    def reduce(self, vec: Sequence[int]) -> list[int]:
        """Residual of vec after reduction against the rows (pure)."""
        m = self.modulus
        v = [x % m for x in vec] if m else list(vec)
        for i, j in enumerate(self.pivcols):
            if v[j] == 0:
                continue
            row = self.rows[i]
            q = v[j] // row[j]
            if q:
                if m:
                    v = [(x - q * y) % m for x, y in zip(v, row)]
                else:
                    v = [x - q * y for x, y in zip(v, row)]
        return v

    def reduce_with_coeffs(self, vec: Sequence[int]) -> tuple[list[int], list[int]]:
        """Residual plus the coefficients used against each stored row.

        vec == coeffs . rows + residual (modulo m*Z^n when a modulus is
        set).  Rows should be normalized first if deterministic
        coefficients matter; callers that build presentations include
        modulus relations anyway.
        """
        m = self.modulus
        v = [x % m for x in vec] if m else list(vec)
        coeffs = [0] * len(self.rows)
        for i, j in enumerate(self.pivcols):
            if v[j] == 0:
                continue
            row = self.rows[i]
            q = v[j] // row[j]
            if q:
                coeffs[i] = q
                if m:
                    v = [(x - q * y) % m for x, y in zip(v, row)]
                else:
                    v = [x - q * y for x, y in zip(v, row)]
        return v, coeffs

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def contains_lattice(self, other: "IntLattice") -> bool:
        return all(self.contains(row) for row in other.rows)

    def _normalize(self) -> None:
        if not self._dirty:
            return
        m = self.modulus
        rows = self.rows
        piv = self.pivcols
        for i in range(len(rows)):
            for k in range(i + 1, len(rows)):
                c = piv[k]
                a = rows[k][c]
                q = rows[i][c] // a
                if q:
                    if m:
                        rows[i] = [(x - q * y) % m for x, y in zip(rows[i], rows[k])]
                    else:
                        rows[i] = [x - q * y for x, y in zip(rows[i], rows[k])]
        self._dirty = False

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        """Unique reduced basis; over Z/m the Howell-form rows."""
        if self._canonical is not None:
            return self._canonical
        self._normalize()
        m = self.modulus
        if m:
            out = []
            for row in self.rows:
                disp = tuple(x % m for x in row)
                if any(disp):
                    out.append(disp)
            self._canonical = tuple(out)
        else:
            self._canonical = tuple(tuple(row) for row in self.rows)
        return self._canonical

    def basis_rows(self) -> tuple[tuple[int, ...], ...]:
        """Normalized integer basis of the (preimage) lattice."""
        self._normalize()
        return tuple(tuple(row) for row in self.rows)

    def rank(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntLattice):
            return NotImplemented
        return (
            self.ncols == other.ncols
            and self.modulus == other.modulus
            and self.canonical() == other.canonical()
        )

    def __hash__(self):
        return hash((self.ncols, self.modulus, self.canonical()))


def lattice_from_rows(rows: Iterable[Sequence[int]], ncols: int, modulus: int = 0) -> IntLattice:
    lat = IntLattice(ncols, modulus)
    lat.add_all(rows)
    return lat


def left_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of {x in Z^r : x . rows = 0} for r = len(rows).

    Computed from the echelon form of the augmented rows [row_i | e_i]:
    augmented basis rows whose left block vanished carry kernel
    combinations in the right block.
    """
    r = len(rows)
    if r == 0:
        return []
    aug = IntLattice(ncols + r)
    for i, row in enumerate(rows):
        v = list(row) + [0] * r
        v[ncols + i] = 1
        aug.add(v)
    out = []
    for row in aug.basis_rows():
        if not any(row[:ncols]):
            out.append(list(row[ncols:]))
    return out


def intersect_lattices(a: IntLattice, b: IntLattice) -> IntLattice:
    """Intersection of two lattices in the same ambient Z^n."""
    if a.ncols != b.ncols:
        raise ValueError("ambient dimension mismatch")
    rows_a = a.basis_rows()
    rows_b = b.basis_rows()
    stacked = [list(r) for r in rows_a] + [[-x for x in r] for r in rows_b]
    out = IntLattice(a.ncols)
    for comb in left_kernel(stacked, a.ncols):
        vec = [0] * a.ncols
        for c, row in zip(comb[: len(rows_a)], rows_a):
            if c:
                vec = [x + c * y for x, y in zip(vec, row)]
        out.add(vec)
    return out


def preimage_lattice(matrix_rows: Sequence[Sequence[int]], target: IntLattice) -> IntLattice:
    """Lattice {x in Z^r : x . matrix in target} for r = len(matrix_rows)."""
    r = len(matrix_rows)
    out = IntLattice(r) if r else IntLattice(1)
    if r == 0:
        return out
    trows = target.basis_rows()
    stacked = [list(row) for row in matrix_rows] + [list(row) for row in trows]
    for comb in left_kernel(stacked, target.ncols):
        out.add(comb[:r])
    # x with x.M = 0 outright are found too; nothing else needed.
    return out


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n, k = len(a), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(k)] for i in range(n)]


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(relations: Sequence[Sequence[int]], ncols: int):
    """Diagonalize the row span of an integer matrix.

    Returns (diag, V, Vinv) where diag is a length-ncols list with
    diag[i] | diag[i+1] (zeros trailing), V and Vinv are unimodular
    ncols x ncols matrices, and in the coordinates c = x . V the row
    span becomes the diagonal lattice diag[i] * e_i.
    """
    rows = [list(r) for r in relations]
    nr = len(rows)
    V = _identity(ncols)
    Vinv = _identity(ncols)

    def col_swap(i, j):
        for row in rows:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def col_negate(i):
        for row in rows:
            row[i] = -row[i]
        for row in V:
            row[i] = -row[i]
        Vinv[i] = [-x for x in Vinv[i]]

    def col_addmul(dst, src, q):
        # col_dst += q * col_src ; inverse op on Vinv rows
        for row in rows:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vinv[src] = [x - q * y for x, y in zip(Vinv[src], Vinv[dst])]

    def row_swap(i, j):
        rows[i], rows[j] = rows[j], rows[i]

    def row_addmul(dst, src, q):
        rows[dst] = [x + q * y for x, y in zip(rows[dst], rows[src])]

    k = 0
    limit = min(nr, ncols)
    while k < limit:
        # locate a nonzero entry of minimal magnitude in the trailing block
        best = None
        for i in range(k, nr):
            for j in range(k, ncols):
                v = rows[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != k:
            row_swap(k, bi)
        if bj != k:
            col_swap(k, bj)
        if rows[k][k] < 0:
            col_negate(k)
        # clear column k and row k; repeat until both stay clear
        while True:
            changed = False
            for i in range(k + 1, nr):
                if rows[i][k]:
                    q = rows[i][k] // rows[k][k]
                    row_addmul(i, k, -q)
                    if rows[i][k]:
                        row_swap(k, i)
                        changed = True
            for j in range(k + 1, ncols):
                if rows[k][j]:
                    q = rows[k][j] // rows[k][k]
                    col_addmul(j, k, -q)
                    if rows[k][j]:
                        col_swap(k, j)
                        changed = True
            if rows[k][k] < 0:
                col_negate(k)
            if not changed:
                break
        # enforce divisibility d_k | every trailing entry
        d = rows[k][k]
        offender = None
        for i in range(k + 1, nr):
            for j in range(k + 1, ncols):
                if rows[i][j] % d:
                    offender = (i, j)
                    break
            if offender:
                break
        if offender:
            col_addmul(k, offender[1], 1)
            continue
        k += 1

    diag = [0] * ncols
    for i in range(min(nr, ncols)):
        diag[i] = abs(rows[i][i])
    return diag, V, Vinv
