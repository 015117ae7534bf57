"""
Chain complexes and their homology
Boundary matrices are sparse; integral homology goes through Smith invariants,
mod-p homology through an independent F_p elimination.
"""

import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime

from .cactus_cells import Shape, cells_with_facets
from .errors import ConsistencyError, InvalidInputError
from .sparse_matrix import SparseMatrix, rank_mod_p, smith_invariants

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Coefficients:
    """Integers when p is None, otherwise the prime field F_p"""
    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not isprime(self.p):
            raise InvalidInputError(f"Coefficient field needs a prime, got {self.p}")

    @property
    def is_field(self) -> bool:
        return self.p is not None

    @property
    def label(self) -> str:
        return "Z" if self.p is None else f"F{self.p}"

    @classmethod
    def parse(cls, text: str) -> "Coefficients":
        token = text.strip().lower()
        if token in ("z", "zz", "int", "integers"):
            return cls()
        if token.startswith("f"):
            token = token[1:].lstrip("_")
            if token.isdigit():
                return cls(int(token))
        raise InvalidInputError(f"Unknown coefficients '{text}' (expected z, f2, f3, f5, ...)")


INTEGERS = Coefficients()


@dataclass
class ChainComplex:
    dims: List[int]
    boundaries: Dict[int, SparseMatrix] = field(default_factory=dict)
    labels: Optional[List[List[Any]]] = None

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def boundary(self, d: int) -> SparseMatrix:
        """d_d : C_d -> C_{d-1}; zero outside the stored range"""
        if d in self.boundaries:
            return self.boundaries[d]
        rows = self.dims[d - 1] if 0 <= d - 1 < len(self.dims) else 0
        cols = self.dims[d] if 0 <= d < len(self.dims) else 0
        return SparseMatrix(rows, cols)

    def label(self, d: int, index: int) -> Any:
        if self.labels is None:
            return f"{d}:{index}"
        return self.labels[d][index]

    def verify(self) -> None:
        for d, matrix in self.boundaries.items():
            if d < 1 or d > self.top_degree:
                raise ConsistencyError(f"Boundary stored in degree {d} outside 1..{self.top_degree}")
            if matrix.shape != (self.dims[d - 1], self.dims[d]):
                raise ConsistencyError(
                    f"Boundary d_{d} has shape {matrix.shape}, expected {(self.dims[d - 1], self.dims[d])}"
                )
        for d in range(2, self.top_degree + 1):
            product = self.boundary(d - 1).matmul(self.boundary(d))
            if not product.is_zero():
                i, j, v = product.triplets()[0]
                raise ConsistencyError(
                    f"d^2 != 0: coefficient {v} of {self.label(d - 2, i)} in the boundary of the "
                    f"boundary of {self.label(d, j)}"
                )


@dataclass(frozen=True)
class HomologyDegree:
    degree: int
    betti: int
    torsion: Tuple[int, ...] = ()


@dataclass(frozen=True)
class HomologyResult:
    coefficients: Coefficients
    degrees: Tuple[HomologyDegree, ...]

    @property
    def betti_numbers(self) -> Tuple[int, ...]:
        return tuple(h.betti for h in self.degrees)

    @property
    def field_dims(self) -> Tuple[int, ...]:
        if not self.coefficients.is_field:
            raise InvalidInputError("Field dimensions only make sense over F_p")
        return self.betti_numbers

    def torsion(self, d: int) -> Tuple[int, ...]:
        return self.degrees[d].torsion if 0 <= d < len(self.degrees) else ()

    def all_torsion(self) -> List[int]:
        return [t for h in self.degrees for t in h.torsion]

    def betti(self, d: int) -> int:
        return self.degrees[d].betti if 0 <= d < len(self.degrees) else 0

    def is_point(self) -> bool:
        return self.betti(0) == 1 and not self.degrees[0].torsion and all(
            h.betti == 0 and not h.torsion for h in self.degrees[1:]
        )

    def euler_characteristic(self) -> int:
        return sum((-1) ** h.degree * h.betti for h in self.degrees)


def assemble(cells: Iterable[Tuple[Hashable, Sequence[Tuple[Hashable, int, int]]]]) -> ChainComplex:
    """
    Build a chain complex from (cell, facets) pairs. Cells need a `dim`
    attribute; facets are (face, position, sign) triples.
    """
    cells = list(cells)
    by_dim: Dict[int, List[Hashable]] = {}
    for cell, _ in cells:
        by_dim.setdefault(cell.dim, []).append(cell)
    if not by_dim:
        return ChainComplex(dims=[0], labels=[[]])

    top = max(by_dim)
    labels = [sorted(by_dim.get(d, [])) for d in range(top + 1)]
    index = [{cell: t for t, cell in enumerate(level)} for level in labels]
    dims = [len(level) for level in labels]

    boundaries = {d: SparseMatrix(dims[d - 1], dims[d]) for d in range(1, top + 1)}
    for cell, faces in cells:
        d = cell.dim
        for face, _, sign in faces:
            if d == 0 or face not in index[d - 1]:
                raise ConsistencyError(f"Facet {face} of {cell} is not a cell of dimension {d - 1}")
            boundaries[d].add(index[d - 1][face], index[d][cell], sign)

    complex_ = ChainComplex(dims=dims, boundaries=boundaries, labels=labels)
    complex_.verify()
    logger.info(f"Assembled chain complex with dims {dims}")
    return complex_


@lru_cache(maxsize=16)
def cactus_chain_complex(n: int, shape: Shape) -> ChainComplex:
    """Cellular chains of C_n (Linear) or C_n/S^1 (Cyclic); cached, do not mutate"""
    return assemble(cells_with_facets(n, shape))


def euler_characteristic(complex_: ChainComplex) -> int:
    return sum((-1) ** d * dim for d, dim in enumerate(complex_.dims))


def homology(complex_: ChainComplex, coefficients: Coefficients = INTEGERS) -> HomologyResult:
    started = time.perf_counter()
    top = complex_.top_degree
    ranks: Dict[int, int] = {}
    factors: Dict[int, List[int]] = {}
    for d in range(1, top + 1):
        matrix = complex_.boundary(d)
        if coefficients.is_field:
            ranks[d] = rank_mod_p(matrix, coefficients.p)
        else:
            ranks[d], factors[d] = smith_invariants(matrix)

    degrees = []
    for d in range(top + 1):
        betti = complex_.dims[d] - ranks.get(d, 0) - ranks.get(d + 1, 0)
        torsion = tuple(factors.get(d + 1, ()))
        if betti < 0:
            raise ConsistencyError(f"Negative Betti number in degree {d}")
        degrees.append(HomologyDegree(d, betti, torsion))

    result = HomologyResult(coefficients, tuple(degrees))
    if result.euler_characteristic() != euler_characteristic(complex_):
        raise ConsistencyError(
            f"Euler characteristic mismatch: cells give {euler_characteristic(complex_)}, "
            f"homology gives {result.euler_characteristic()}"
        )
    elapsed = time.perf_counter() - started
    logger.info(
        f"Homology over {coefficients.label} of dims {complex_.dims}: "
        f"{result.betti_numbers} torsion {result.all_torsion()} ({elapsed:.2f}s)"
    )
    return result


def universal_coefficients_check(integral: HomologyResult, mod_p: HomologyResult) -> bool:
    """dim H_d(F_p) = b_d + #p-divisible torsion in degrees d and d-1"""
    if integral.coefficients.is_field or not mod_p.coefficients.is_field:
        raise InvalidInputError("Expected an integral result and a mod-p result")
    p = mod_p.coefficients.p
    top = max(len(integral.degrees), len(mod_p.degrees))
    for d in range(top):
        divisible = sum(1 for t in integral.torsion(d) if t % p == 0)
        divisible += sum(1 for t in integral.torsion(d - 1) if t % p == 0)
        if mod_p.betti(d) != integral.betti(d) + divisible:
            logger.warning(f"Universal coefficients fail in degree {d} for p={p}")
            return False
    return True


def point_complex() -> ChainComplex:
    return ChainComplex(dims=[1], labels=[["pt"]])
