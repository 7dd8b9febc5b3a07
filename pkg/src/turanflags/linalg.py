"""Exact rational symmetric matrices and positive-semidefiniteness.

PSD is decided by an LDL^T factorization over the rationals with
symmetric pivoting on the largest remaining diagonal entry: the matrix is
PSD iff every pivot is nonnegative and any zero-diagonal step has an
all-zero remaining row.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class RationalMatrix:
    entries: tuple  # tuple of row tuples of Fractions

    @staticmethod
    def from_rows(rows) -> "RationalMatrix":
        ent = tuple(tuple(Fraction(x) for x in row) for row in rows)
        d = len(ent)
        if any(len(r) != d for r in ent):
            raise ShapeError("matrix must be square")
        return RationalMatrix(ent)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_symmetric(self) -> bool:
        d = self.dim
        return all(self.entries[i][j] == self.entries[j][i]
                   for i in range(d) for j in range(i + 1, d))

    def permuted(self, perm) -> "RationalMatrix":
        """Conjugation P M P^T with P the 0-based index permutation:
        result[i][j] = M[perm[i]][perm[j]]."""
        d = self.dim
        if sorted(perm) != list(range(d)):
            raise ShapeError("not a permutation of the index set")
        return RationalMatrix(tuple(
            tuple(self.entries[perm[i]][perm[j]] for j in range(d))
            for i in range(d)))

    def add_entry(self, i: int, j: int, delta) -> "RationalMatrix":
        """Single-entry (symmetric) perturbation, for mutation tests."""
        delta = Fraction(delta)
        rows = [list(r) for r in self.entries]
        rows[i][j] += delta
        if i != j:
            rows[j][i] += delta
        return RationalMatrix.from_rows(rows)


def is_psd_exact(m: RationalMatrix) -> bool:
    """Exact PSD test by pivoted LDL^T over the rationals."""
    if not m.is_symmetric():
        raise ShapeError("PSD test requires a symmetric matrix")
    d = m.dim
    a = [[Fraction(x) for x in row] for row in m.entries]
    active = list(range(d))
    for step in range(d):
        # pivot on the largest remaining diagonal entry
        rest = active[step:]
        p = max(rest, key=lambda i: a[i][i])
        pi = active.index(p)
        active[step], active[pi] = active[pi], active[step]
        piv = a[p][p]
        if piv < 0:
            return False
        if piv == 0:
            # a zero diagonal with a nonzero remaining row breaks PSD
            if any(a[p][j] != 0 for j in active[step:]):
                return False
            continue
        for i in active[step + 1:]:
            if a[i][p] == 0:
                continue
            factor = a[i][p] / piv
            for j in active[step + 1:]:
                a[i][j] -= factor * a[p][j]
    return True


def ldlt_diagonal(m: RationalMatrix) -> list:
    """Pivot sequence of the factorization (diagnostic; PSD iff all >= 0
    with the zero-row condition, which ``is_psd_exact`` enforces)."""
    if not m.is_symmetric():
        raise ShapeError("requires a symmetric matrix")
    d = m.dim
    a = [[Fraction(x) for x in row] for row in m.entries]
    active = list(range(d))
    pivots = []
    for step in range(d):
        rest = active[step:]
        p = max(rest, key=lambda i: a[i][i])
        pi = active.index(p)
        active[step], active[pi] = active[pi], active[step]
        piv = a[p][p]
        pivots.append(piv)
        if piv == 0:
            continue
        for i in active[step + 1:]:
            if a[i][p] == 0:
                continue
            factor = a[i][p] / piv
            for j in active[step + 1:]:
                a[i][j] -= factor * a[p][j]
    return pivots
