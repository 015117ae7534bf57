"""
Sparse exact integer matrices and elimination
Columns are stored compressed (column -> {row: value}); a row index is kept
alongside so pivots can find their row partners without scanning.
"""

import heapq
import logging
from typing import Dict, Iterable, List, Optional, Tuple

from sympy import factorint
from sympy.polys.domains import GF, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

DENSE_FALLBACK_LIMIT = 200


class SparseMatrix:
    """Integer matrix with compressed columns"""

    def __init__(self, n_rows: int, n_cols: int,
                 triplets: Optional[Iterable[Tuple[int, int, int]]] = None):
        if n_rows < 0 or n_cols < 0:
            raise InvalidInputError(f"Negative matrix shape {n_rows}x{n_cols}")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.columns: List[Dict[int, int]] = [{} for _ in range(n_cols)]
        for i, j, v in triplets or ():
            self.add(i, j, v)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self.columns)

    def add(self, i: int, j: int, value: int) -> None:
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise InvalidInputError(f"Entry ({i},{j}) outside a {self.n_rows}x{self.n_cols} matrix")
        col = self.columns[j]
        new = col.get(i, 0) + value
        if new:
            col[i] = new
        else:
            col.pop(i, None)

    def triplets(self) -> List[Tuple[int, int, int]]:
        return [(i, j, v) for j, col in enumerate(self.columns) for i, v in sorted(col.items())]

    def is_zero(self) -> bool:
        return not any(self.columns)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.n_cols != other.n_rows:
            raise InvalidInputError(f"Cannot multiply {self.shape} by {other.shape}")
        product = SparseMatrix(self.n_rows, other.n_cols)
        for j, col in enumerate(other.columns):
            acc: Dict[int, int] = {}
            for k, b in col.items():
                for i, a in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            product.columns[j] = {i: v for i, v in acc.items() if v}
        return product

    @classmethod
    def from_dense(cls, rows: List[List[int]]) -> "SparseMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        return cls(n_rows, n_cols, ((i, j, v) for i, row in enumerate(rows) for j, v in enumerate(row) if v))

    def __repr__(self) -> str:
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


class _Workspace:
    """Mutable copy of a matrix with row and column dictionaries kept in sync"""

    def __init__(self, columns: Iterable[Tuple[int, Dict[int, int]]], modulus: Optional[int] = None):
        self.modulus = modulus
        self.cols: Dict[int, Dict[int, int]] = {}
        self.rows: Dict[int, Dict[int, int]] = {}
        for j, col in columns:
            entries = {}
            for i, v in col.items():
                v = v % modulus if modulus else v
                if v:
                    entries[i] = v
                    self.rows.setdefault(i, {})[j] = v
            if entries:
                self.cols[j] = entries

    def _set(self, i: int, j: int, value: int) -> None:
        if self.modulus:
            value %= self.modulus
        if value:
            self.cols.setdefault(j, {})[i] = value
            self.rows.setdefault(i, {})[j] = value
        else:
            col = self.cols.get(j)
            if col is not None:
                col.pop(i, None)
                if not col:
                    del self.cols[j]
            row = self.rows.get(i)
            if row is not None:
                row.pop(j, None)
                if not row:
                    del self.rows[i]

    def add_column(self, dst: int, src: int, factor: int) -> None:
        """col_dst += factor * col_src"""
        for i, v in list(self.cols.get(src, {}).items()):
            self._set(i, dst, self.cols.get(dst, {}).get(i, 0) + factor * v)

    def add_row(self, dst: int, src: int, factor: int) -> None:
        """row_dst += factor * row_src"""
        for j, v in list(self.rows.get(src, {}).items()):
            self._set(dst, j, self.rows.get(dst, {}).get(j, 0) + factor * v)

    def drop(self, i: int, j: int) -> None:
        for r in list(self.cols.get(j, {})):
            self._set(r, j, 0)
        for c in list(self.rows.get(i, {})):
            self._set(i, c, 0)

    def eliminate(self, i: int, j: int, inverse: int) -> None:
        """Clear row i with column operations using the invertible pivot (i, j), then drop row i and column j"""
        for k, v in list(self.rows.get(i, {}).items()):
            if k != j:
                self.add_column(k, j, -v * inverse)
        self.drop(i, j)

    def nnz(self) -> int:
        return sum(len(col) for col in self.cols.values())


def _markowitz_pivot(work: _Workspace, j: int) -> Optional[Tuple[int, int, int]]:
    """Cheapest invertible entry of column j as (cost, row, value), cost = (|row| - 1)(|col| - 1)"""
    col = work.cols.get(j)
    if not col:
        return None
    best = None
    for i, v in col.items():
        if work.modulus or v in (1, -1):
            cost = (len(work.rows[i]) - 1) * (len(col) - 1)
            if best is None or cost < best[0]:
                best = (cost, i, v)
    return best


def _unit_phase(work: _Workspace) -> int:
    """
    Markowitz-ordered elimination on invertible pivots. Over Z only +-1 are
    invertible; over F_p every nonzero entry is. Returns the number of pivots.
    Heap keys are refreshed lazily; only columns touched by a pivot are re-pushed.
    """
    modulus = work.modulus
    heap = []
    for j in work.cols:
        best = _markowitz_pivot(work, j)
        if best is not None:
            heap.append((best[0], j))
    heapq.heapify(heap)

    pivots = 0
    while heap:
        cost, j = heapq.heappop(heap)
        best = _markowitz_pivot(work, j)
        if best is None:
            continue
        if best[0] != cost:
            heapq.heappush(heap, (best[0], j))
            continue
        _, i, v = best
        touched = [k for k in work.rows[i] if k != j]
        inverse = pow(v, -1, modulus) if modulus else v
        work.eliminate(i, j, inverse)
        pivots += 1
        for k in touched:
            refreshed = _markowitz_pivot(work, k)
            if refreshed is not None:
                heapq.heappush(heap, (refreshed[0], k))
    return pivots


def _euclidean_phase(work: _Workspace) -> List[int]:
    """Diagonalise what is left (no unit entries) by repeated division on the smallest entry"""
    diagonal = []
    while work.cols:
        _, i, j = min((abs(v), i, j) for j, col in work.cols.items() for i, v in col.items())
        a = work.cols[j][i]
        clean = True
        for k, v in list(work.rows[i].items()):
            if k != j:
                work.add_column(k, j, -(v // a))
                clean = clean and v % a == 0
        for r, v in list(work.cols[j].items()):
            if r != i:
                work.add_row(r, i, -(v // a))
                clean = clean and v % a == 0
        if clean:
            diagonal.append(abs(a))
            work.drop(i, j)
    return diagonal


def _core_matrix(work: _Workspace) -> DomainMatrix:
    row_ids = sorted(work.rows)
    col_ids = sorted(work.cols)
    row_pos = {r: t for t, r in enumerate(row_ids)}
    dense = [[ZZ(0)] * len(col_ids) for _ in row_ids]
    for s, j in enumerate(col_ids):
        for i, v in work.cols[j].items():
            dense[row_pos[i]][s] = ZZ(v)
    return DomainMatrix(dense, (len(row_ids), len(col_ids)), ZZ)


def _dense_invariants(work: _Workspace) -> List[int]:
    return [abs(int(d)) for d in invariant_factors(_core_matrix(work)) if d]


def invariant_factors_from_diagonal(diagonal: Iterable[int]) -> List[int]:
    """Invariant factors d_1 | d_2 | ... (> 1) of a diagonal integer matrix"""
    by_prime: Dict[int, List[int]] = {}
    for d in diagonal:
        for prime, exp in factorint(abs(d)).items():
            by_prime.setdefault(prime, []).append(prime ** exp)
    if not by_prime:
        return []
    length = max(len(powers) for powers in by_prime.values())
    factors = [1] * length
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for t, q in enumerate(powers):
            factors[t] *= q
    return sorted(f for f in factors if f > 1)


def smith_invariants(matrix: SparseMatrix) -> Tuple[int, List[int]]:
    """
    Rank and nontrivial invariant factors of an integer matrix.
    Unit pivots go first; the remaining core goes to sympy when it is small
    and to a sparse Euclidean reduction otherwise.
    """
    work = _Workspace(enumerate(matrix.columns))
    before = work.nnz()
    units = _unit_phase(work)
    core_rows, core_cols = len(work.rows), len(work.cols)
    logger.debug(
        f"SNF {matrix.shape}: nnz={before}, unit pivots={units}, core={core_rows}x{core_cols}"
    )
    if not work.cols:
        return units, []
    if core_rows <= DENSE_FALLBACK_LIMIT and core_cols <= DENSE_FALLBACK_LIMIT:
        factors = _dense_invariants(work)
        return units + len(factors), sorted(f for f in factors if f > 1)
    diagonal = _euclidean_phase(work)
    return units + len(diagonal), invariant_factors_from_diagonal(diagonal)


def rank_mod_p(matrix: SparseMatrix, p: int) -> int:
    """Rank over F_p by direct elimination, independent of the integral path"""
    work = _Workspace(enumerate(matrix.columns), modulus=p)
    if not work.cols:
        return 0
    if len(work.rows) <= DENSE_FALLBACK_LIMIT and len(work.cols) <= DENSE_FALLBACK_LIMIT:
        return int(_core_matrix(work).convert_to(GF(p)).rank())
    return _unit_phase(work)
