"""
Lens complexes L(m; b_0, ..., b_{k-1}) and the local homology obstruction at
the singular point of P(n, n-1, ..., 2).

S^{2k-1} is modelled as the join of k circles, each cut into m arcs at the
m-th roots of unity. The generator of Z/m turns circle j by b_j arcs.
"""

import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import factorial, gcd
from typing import Dict, FrozenSet, List, Tuple

from .chain_algebra import ChainComplex, HomologyDegree, HomologyResult, homology
from .equivariant_quotient import barycentric_subdivision, from_chain_complex, quotient_complex
from .errors import ConsistencyError, InvalidInputError, ResourceLimitError
from .sparse_matrix import SparseMatrix

logger = logging.getLogger(__name__)

EMPTY = -1

# a join cell holds one code per circle: EMPTY, 2i for vertex i, 2i + 1 for the arc from vertex i to i + 1
JoinCell = Tuple[int, ...]


@dataclass(frozen=True)
class LensSpec:
    m: int
    weights: Tuple[int, ...]

    def __post_init__(self):
        if self.m < 2:
            raise InvalidInputError(f"Group order must be at least 2, got {self.m}")
        if not self.weights:
            raise InvalidInputError("A lens complex needs at least one weight")
        if any(b < 1 for b in self.weights):
            raise InvalidInputError(f"Weights must be positive, got {list(self.weights)}")

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def sphere_dim(self) -> int:
        return 2 * self.k - 1

    @property
    def is_free(self) -> bool:
        return all(gcd(b, self.m) == 1 for b in self.weights)

    @property
    def label(self) -> str:
        return f"L({self.m};{','.join(str(b) for b in self.weights)})"


@dataclass(frozen=True)
class ObstructionReport:
    n: int
    lens: LensSpec
    reduced: HomologyResult
    local_homology: Dict[int, Tuple[int, Tuple[int, ...]]]
    homology_sphere: bool

    @property
    def is_manifold_point(self) -> bool:
        return self.homology_sphere


def _code_dim(code: int) -> int:
    return -1 if code == EMPTY else code % 2


def join_dim(cell: JoinCell) -> int:
    used = [c for c in cell if c != EMPTY]
    return sum(c % 2 for c in used) + len(used) - 1


def _factor_boundary(code: int, m: int) -> List[Tuple[int, int]]:
    """Augmented boundary on one circle: vertex -> empty, arc i -> v_{i+1} - v_i"""
    if code == EMPTY:
        return []
    if code % 2 == 0:
        return [(EMPTY, 1)]
    i = code // 2
    return [(2 * ((i + 1) % m), 1), (2 * i, -1)]


def join_boundary(cell: JoinCell, m: int) -> List[Tuple[JoinCell, int]]:
    terms: Dict[JoinCell, int] = {}
    shift = 0
    for j, code in enumerate(cell):
        sign = -1 if shift % 2 else 1
        for face_code, coefficient in _factor_boundary(code, m):
            face = cell[:j] + (face_code,) + cell[j + 1:]
            if all(c == EMPTY for c in face):
                continue
            terms[face] = terms.get(face, 0) + sign * coefficient
        shift += _code_dim(code) + 1
    return [(face, v) for face, v in sorted(terms.items()) if v]


def _rotate(cell: JoinCell, spec: LensSpec, steps: int) -> JoinCell:
    out = []
    for code, b in zip(cell, spec.weights):
        if code == EMPTY:
            out.append(EMPTY)
        else:
            out.append(2 * ((code // 2 + steps * b) % spec.m) + code % 2)
    return tuple(out)


def join_cells(spec: LensSpec) -> List[JoinCell]:
    codes = [EMPTY] + list(range(2 * spec.m))
    return sorted(
        (cell for cell in product(codes, repeat=spec.k) if any(c != EMPTY for c in cell)),
        key=lambda c: (join_dim(c), c),
    )


def _faces_closure(cell: JoinCell, m: int, cache: Dict[JoinCell, FrozenSet[JoinCell]]) -> FrozenSet[JoinCell]:
    if cell not in cache:
        below = set()
        for face, _ in join_boundary(cell, m):
            below.add(face)
            below |= _faces_closure(face, m, cache)
        cache[cell] = frozenset(below)
    return cache[cell]


def verify_admissible(spec: LensSpec, cells: List[JoinCell]) -> None:
    """Any power of the generator fixing a cell must fix all of its faces"""
    cache: Dict[JoinCell, FrozenSet[JoinCell]] = {}
    for steps in range(1, spec.m):
        for cell in cells:
            if _rotate(cell, spec, steps) != cell:
                continue
            for face in _faces_closure(cell, spec.m, cache):
                if _rotate(face, spec, steps) != face:
                    raise ConsistencyError(
                        f"{spec.label}: g^{steps} fixes {cell} but moves its face {face}"
                    )


def sphere_chain_complex(spec: LensSpec) -> ChainComplex:
    """Join-of-circles chain complex of S^{2k-1}, before taking the quotient"""
    cells = join_cells(spec)
    top = spec.sphere_dim
    levels = [[c for c in cells if join_dim(c) == d] for d in range(top + 1)]
    index = [{c: t for t, c in enumerate(level)} for level in levels]
    boundaries = {}
    for d in range(1, top + 1):
        matrix = SparseMatrix(len(levels[d - 1]), len(levels[d]))
        for j, cell in enumerate(levels[d]):
            for face, v in join_boundary(cell, spec.m):
                matrix.add(index[d - 1][face], j, v)
        boundaries[d] = matrix
    complex_ = ChainComplex(dims=[len(level) for level in levels], boundaries=boundaries, labels=levels)
    complex_.verify()
    return complex_


@lru_cache(maxsize=32)
def lens_chain_complex(spec: LensSpec) -> ChainComplex:
    """Orbit chain complex of the join model; cached, do not mutate"""
    cells = join_cells(spec)
    verify_admissible(spec, cells)

    orbit_rep: Dict[JoinCell, JoinCell] = {}
    for cell in cells:
        if cell in orbit_rep:
            continue
        orbit = {_rotate(cell, spec, s) for s in range(spec.m)}
        rep = min(orbit)
        for member in orbit:
            orbit_rep[member] = rep

    top = spec.sphere_dim
    levels = [sorted({r for c, r in orbit_rep.items() if join_dim(c) == d}) for d in range(top + 1)]
    index = [{c: t for t, c in enumerate(level)} for level in levels]
    boundaries = {}
    for d in range(1, top + 1):
        matrix = SparseMatrix(len(levels[d - 1]), len(levels[d]))
        for j, rep in enumerate(levels[d]):
            for face, v in join_boundary(rep, spec.m):
                matrix.add(index[d - 1][orbit_rep[face]], j, v)
        boundaries[d] = matrix
    complex_ = ChainComplex(dims=[len(level) for level in levels], boundaries=boundaries, labels=levels)
    complex_.verify()
    logger.info(f"{spec.label}: {len(cells)} join cells, orbit complex dims {complex_.dims}")
    return complex_


def lens_homology(spec: LensSpec) -> HomologyResult:
    return homology(lens_chain_complex(spec))


def oracle_limit() -> int:
    """Largest first subdivision (in top simplices) the oracle builds (WORKBENCH_ORACLE_LIMIT)"""
    return int(os.getenv("WORKBENCH_ORACLE_LIMIT", "200000"))


def subdivision_size(spec: LensSpec) -> int:
    """Top simplices of the first barycentric subdivision: m^k top join cells, each a (2k-1)-simplex"""
    return spec.m ** spec.k * factorial(2 * spec.k)


def subdivision_oracle(spec: LensSpec) -> HomologyResult:
    """Same quotient computed by subdividing the sphere and taking simplicial orbits"""
    size = subdivision_size(spec)
    if size > oracle_limit():
        raise ResourceLimitError(
            f"{spec.label}: subdivision has {size} top simplices, above WORKBENCH_ORACLE_LIMIT={oracle_limit()}"
        )
    sphere = sphere_chain_complex(spec)
    index = [{c: t for t, c in enumerate(level)} for level in sphere.labels]
    group = [
        tuple(tuple(index[d][_rotate(c, spec, s)] for c in level) for d, level in enumerate(sphere.labels))
        for s in range(spec.m)
    ]
    action = barycentric_subdivision(from_chain_complex(sphere, group))
    return homology(quotient_complex(action))


def is_homology_sphere(result: HomologyResult, dim: int) -> bool:
    """Reduced homology is Z in degree dim and zero elsewhere"""
    if result.coefficients.is_field:
        raise InvalidInputError("Homology sphere test needs integral homology")
    if dim == 0:
        return result.betti(0) == 2 and not result.all_torsion() and len(result.degrees) == 1
    for d, h in enumerate(result.degrees):
        expected = 1 if d in (0, dim) else 0
        if h.betti != expected or h.torsion:
            return False
    return len(result.degrees) > dim


def reduced_homology(result: HomologyResult) -> HomologyResult:
    degrees = list(result.degrees)
    if degrees:
        first = degrees[0]
        degrees[0] = HomologyDegree(0, max(first.betti - 1, 0), first.torsion)
    return HomologyResult(result.coefficients, tuple(degrees))


def local_homology(reduced: HomologyResult, cone_dim: int) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
    """H_k(P, P - pt) = reduced H_{k-1}(L) for the cone on L, k = 1..cone_dim"""
    return {k: (reduced.betti(k - 1), reduced.torsion(k - 1)) for k in range(1, cone_dim + 1)}


def moduli_lens(n: int) -> LensSpec:
    """Link of the singular point [0:...:0:1] of P(n, n-1, ..., 2)"""
    if n < 3:
        raise InvalidInputError(f"The weighted projective model needs n >= 3, got {n}")
    return LensSpec(n, tuple(range(n - 1, 1, -1)))


def manifold_obstruction(n: int) -> ObstructionReport:
    spec = moduli_lens(n)
    result = lens_homology(spec)
    sphere = is_homology_sphere(result, spec.sphere_dim)
    reduced = reduced_homology(result)
    report = ObstructionReport(
        n=n,
        lens=spec,
        reduced=reduced,
        local_homology=local_homology(reduced, spec.sphere_dim + 1),
        homology_sphere=sphere,
    )
    verdict = "no obstruction" if sphere else "not a manifold at the cone point"
    logger.info(f"n={n}: {spec.label} homology {result.betti_numbers} torsion {result.all_torsion()}: {verdict}")
    return report
