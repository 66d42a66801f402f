"""Boundary matrices and Betti numbers over GF(2) and Q."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import SimplicialComplex


class Field(str, enum.Enum):
    GF2 = "GF2"
    RATIONAL = "RATIONAL"


class TruncatedComplexError(ValueError):
    """The complex was not stored high enough to answer the query exactly."""


@dataclass(frozen=True)
class BoundaryMatrix:
    degree: int
    rows: list  # (k-1)-faces, lexicographic
    cols: list  # k-faces, lexicographic
    entries: np.ndarray
    field: Field

    @property
    def shape(self):
        return self.entries.shape

    def rank(self) -> int:
        if self.field is Field.GF2:
            return rank_gf2(self.entries)
        return rank_rational(self.entries)


@dataclass(frozen=True)
class BettiVector:
    betti: tuple[int, ...]
    field: Field

    def __getitem__(self, k):
        return self.betti[k]

    def __len__(self):
        return len(self.betti)

    def __iter__(self):
        return iter(self.betti)

    def same_as(self, other) -> bool:
        """Equality as finitely supported sequences: trailing zeros are ignored."""
        a, b = list(self.betti), list(other)
        n = max(len(a), len(b))
        return a + [0] * (n - len(a)) == b + [0] * (n - len(b))

    def to_json(self) -> dict:
        return {"field": self.field.value, "betti": list(self.betti)}


def boundary_matrix(K: SimplicialComplex, k: int, field: Field | str = Field.GF2) -> BoundaryMatrix:
    field = Field(field)
    if k < 1:
        raise ValueError(f"boundary degree must be >= 1, got {k}")
    if K.truncated and k > K.dim_cap:
        raise TruncatedComplexError(f"no faces stored above dim_cap={K.dim_cap}")
    rows = K.faces_of_dim(k - 1)
    cols = K.faces_of_dim(k)
    index = {f: i for i, f in enumerate(rows)}
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, f in enumerate(cols):
        for i in range(len(f)):
            sub = f[:i] + f[i + 1:]
            M[index[sub], j] = 1 if field is Field.GF2 else (-1) ** i
    return BoundaryMatrix(k, rows, cols, M, field)


def rank_gf2(M: np.ndarray) -> int:
    """Rank over GF(2), rows packed into Python ints."""
    rows = []
    for r in np.asarray(M) % 2:
        bits = 0
        for j in np.flatnonzero(r):
            bits |= 1 << int(j)
        if bits:
            rows.append(bits)
    rank = 0
    pivots: dict[int, int] = {}  # leading bit -> reduced row
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead in pivots:
                r ^= pivots[lead]
            else:
                pivots[lead] = r
                rank += 1
                break
    return rank


def rank_rational(M: np.ndarray) -> int:
    """Exact rank over Q by Gaussian elimination on Fractions."""
    A = [[Fraction(int(x)) for x in row] for row in np.asarray(M)]
    if not A or not A[0]:
        return 0
    n_rows, n_cols = len(A), len(A[0])
    rank = 0
    for c in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        pr = A[rank]
        for r in range(rank + 1, n_rows):
            if A[r][c] != 0:
                factor = A[r][c] / pr[c]
                row = A[r]
                for cc in range(c, n_cols):
                    if pr[cc] != 0:
                        row[cc] -= factor * pr[cc]
        rank += 1
        if rank == n_rows:
            break
    return rank


def betti_numbers(K: SimplicialComplex, field: Field | str = Field.GF2,
                  max_degree: int | None = None) -> BettiVector:
    """Unreduced Betti numbers b_0..b_max_degree.

    Without ``max_degree`` the vector runs up to the complex's dimension, or
    to ``dim_cap - 1`` when the stored faces are truncated.
    """
    field = Field(field)
    if max_degree is None:
        max_degree = K.dim_cap - 1 if K.truncated else K.dimension
    elif K.truncated and max_degree >= K.dim_cap:
        raise TruncatedComplexError(
            f"b_{max_degree} needs faces of dimension {max_degree + 1}, "
            f"but the complex is truncated at dim_cap={K.dim_cap}"
        )
    if max_degree < 0:
        return BettiVector((), field)
    counts = [len(K.faces_of_dim(k)) for k in range(max_degree + 2)]
    ranks = [0] * (max_degree + 3)
    for k in range(1, max_degree + 2):
        if counts[k] and counts[k - 1]:
            ranks[k] = boundary_matrix(K, k, field).rank()
    betti = tuple(counts[k] - ranks[k] - ranks[k + 1] for k in range(max_degree + 1))
    return BettiVector(betti, field)


def euler_characteristic(K: SimplicialComplex) -> int:
    if K.truncated:
        raise TruncatedComplexError("Euler characteristic needs every face")
    return sum((-1) ** k * c for k, c in enumerate(K.f_vector()))
