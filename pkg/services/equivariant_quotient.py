"""
Equivariant quotients of regular cell complexes
The generic path subdivides a complex carrying a cellular group action and
takes the orbit chain complex; the fast path builds the orbit complex of the
subdivided unbased cacti complex one Sigma_n-orbit at a time.
"""

import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Dict, FrozenSet, Hashable, Iterator, List, Optional, Sequence, Tuple, Union

from .cactus_cells import (
    CactusCell,
    Shape,
    Word,
    configured_max_n,
    facet_words,
    orbit_normal_form,
    orbit_representatives,
    relabel,
    relabel_word,
    word_stabilizer,
)
from .chain_algebra import (
    INTEGERS,
    ChainComplex,
    Coefficients,
    HomologyResult,
    cactus_chain_complex,
    homology,
)
from .errors import ConsistencyError, InvalidInputError, ResourceLimitError
from .sparse_matrix import SparseMatrix

logger = logging.getLogger(__name__)

MAX_SUBDIVISION_ROUNDS = 2

# one group element = one index permutation per dimension
GroupElement = Tuple[Tuple[int, ...], ...]


@dataclass
class SimplicialComplexWithAction:
    """
    Graded poset of a regular complex with a cellular group action.
    Before subdivision the elements are cells; after it they are chains of
    cells, i.e. simplices of the order complex.
    """
    labels: List[List[Hashable]]
    facets: List[List[Tuple[Tuple[int, int], ...]]]
    group: List[GroupElement]
    rounds: int = 0
    closure_cache: Dict[Tuple[int, int], FrozenSet[Tuple[int, int]]] = field(
        default_factory=dict, repr=False, compare=False
    )

    @property
    def dims(self) -> List[int]:
        return [len(level) for level in self.labels]

    def faces_below(self, d: int, index: int) -> FrozenSet[Tuple[int, int]]:
        """Every (dim, index) strictly below the element"""
        return _closure(self, d, index)

    def to_chain_complex(self) -> ChainComplex:
        dims = self.dims
        boundaries = {}
        for d in range(1, len(dims)):
            matrix = SparseMatrix(dims[d - 1], dims[d])
            for j, faces in enumerate(self.facets[d]):
                for i, sign in faces:
                    matrix.add(i, j, sign)
            boundaries[d] = matrix
        complex_ = ChainComplex(dims=list(dims), boundaries=boundaries, labels=self.labels)
        complex_.verify()
        return complex_


def _closure(poset: SimplicialComplexWithAction, d: int, index: int) -> FrozenSet[Tuple[int, int]]:
    cache = poset.closure_cache
    key = (d, index)
    if key not in cache:
        below = set()
        for i, _ in poset.facets[d][index]:
            below.add((d - 1, i))
            below |= _closure(poset, d - 1, i)
        cache[key] = frozenset(below)
    return cache[key]


def _identity_element(dims: Sequence[int]) -> GroupElement:
    return tuple(tuple(range(size)) for size in dims)


def from_chain_complex(complex_: ChainComplex,
                       group: Optional[Sequence[GroupElement]] = None) -> SimplicialComplexWithAction:
    """Face poset read off the nonzero incidences; rejects anything that is not regular"""
    dims = list(complex_.dims)
    facets: List[List[Tuple[Tuple[int, int], ...]]] = [[() for _ in range(dims[0])]]
    for d in range(1, len(dims)):
        level = []
        for j, col in enumerate(complex_.boundary(d).columns):
            for i, v in col.items():
                if v not in (1, -1):
                    raise InvalidInputError(
                        f"Incidence {v} between {complex_.label(d - 1, i)} and {complex_.label(d, j)}: "
                        f"complex is not regular"
                    )
            level.append(tuple(sorted(col.items())))
        facets.append(level)

    labels = complex_.labels or [[(d, t) for t in range(size)] for d, size in enumerate(dims)]
    group = list(group) if group else [_identity_element(dims)]
    for g in group:
        if [len(level) for level in g] != dims or any(sorted(level) != list(range(len(level))) for level in g):
            raise InvalidInputError("Group element is not a permutation of the cells in each dimension")
        for d in range(1, len(dims)):
            for j, faces in enumerate(facets[d]):
                image = {g[d - 1][i] for i, _ in faces}
                if image != {i for i, _ in facets[d][g[d][j]]}:
                    raise InvalidInputError(f"Group element does not map faces of {labels[d][j]} to faces")
    return SimplicialComplexWithAction([list(level) for level in labels], facets, group)


def symmetric_group_action(complex_: ChainComplex, n: int) -> List[GroupElement]:
    """Sigma_n acting on a cacti complex by relabelling lobes"""
    if complex_.labels is None:
        raise InvalidInputError("Relabelling needs a complex labelled by cactus cells")
    index = [{cell: t for t, cell in enumerate(level)} for level in complex_.labels]
    group = []
    for perm in permutations(range(1, n + 1)):
        group.append(tuple(
            tuple(index[d][relabel(cell, perm)] for cell in level)
            for d, level in enumerate(complex_.labels)
        ))
    return group


def barycentric_subdivision(source: Union[ChainComplex, SimplicialComplexWithAction],
                            check_homology: bool = False) -> SimplicialComplexWithAction:
    """Order complex of the face poset, with the induced action on chains"""
    poset = from_chain_complex(source) if isinstance(source, ChainComplex) else source

    chains: List[Tuple[Tuple[int, int], ...]] = []

    def extend(chain: Tuple[Tuple[int, int], ...]) -> None:
        chains.append(chain)
        d, index = chain[0]
        for below in poset.faces_below(d, index):
            extend((below,) + chain)

    for d, level in enumerate(poset.labels):
        for index in range(len(level)):
            extend(((d, index),))

    top = max(len(c) for c in chains) - 1 if chains else 0
    levels: List[List[Tuple[Tuple[int, int], ...]]] = [[] for _ in range(top + 1)]
    for chain in chains:
        levels[len(chain) - 1].append(chain)
    for level in levels:
        level.sort()
    position = [{chain: t for t, chain in enumerate(level)} for level in levels]

    facets = [[() for _ in levels[0]]]
    for k in range(1, top + 1):
        facets.append([
            tuple(sorted(
                (position[k - 1][chain[:i] + chain[i + 1:]], -1 if i % 2 else 1)
                for i in range(k + 1)
            ))
            for chain in levels[k]
        ])

    group = []
    for g in poset.group:
        group.append(tuple(
            tuple(
                position[k][tuple((d, g[d][index]) for d, index in chain)]
                for chain in level
            )
            for k, level in enumerate(levels)
        ))

    labels = [
        [tuple(poset.labels[d][index] for d, index in chain) for chain in level]
        for level in levels
    ]
    subdivided = SimplicialComplexWithAction(labels, facets, group, poset.rounds + 1)
    logger.info(f"Subdivided poset with dims {poset.dims} into order complex with dims {subdivided.dims}")

    if check_homology:
        before = homology(poset.to_chain_complex())
        after = homology(subdivided.to_chain_complex())
        if before.degrees != after.degrees[:len(before.degrees)] or any(
            h.betti or h.torsion for h in after.degrees[len(before.degrees):]
        ):
            raise ConsistencyError(f"Subdivision changed homology: {before} vs {after}")
    return subdivided


def regularity_check(action: SimplicialComplexWithAction) -> bool:
    """Every group element fixing an element setwise fixes everything below it"""
    for g in action.group:
        if all(level == tuple(range(len(level))) for level in g):
            continue
        for d, level in enumerate(g):
            for index, image in enumerate(level):
                if image != index:
                    continue
                for below_d, below in action.faces_below(d, index):
                    if g[below_d][below] != below:
                        logger.debug(f"Element fixes {action.labels[d][index]} but moves a face")
                        return False
    return True


def subdivide_until_regular(action: SimplicialComplexWithAction,
                            max_rounds: int = MAX_SUBDIVISION_ROUNDS) -> SimplicialComplexWithAction:
    current = action
    for _ in range(max_rounds + 1):
        if regularity_check(current):
            return current
        if current.rounds - action.rounds >= max_rounds:
            break
        current = barycentric_subdivision(current)
    logger.error(f"Action still not regular after {max_rounds} subdivisions")
    raise ConsistencyError(f"Group action not regular after {max_rounds} rounds of subdivision")


def quotient_complex(action: SimplicialComplexWithAction) -> ChainComplex:
    """Orbit chain complex; representatives are the least labels of each orbit"""
    trivial = all(all(level == tuple(range(len(level))) for level in g) for g in action.group)
    if not trivial and action.rounds == 0:
        raise InvalidInputError("Quotients of cells need a subdivided complex (orientations may flip)")
    if not regularity_check(action):
        raise InvalidInputError("Quotient requested for an action that is not regular")

    orbit_of: List[List[int]] = []
    reps: List[List[int]] = []
    for d, level in enumerate(action.labels):
        owner = [-1] * len(level)
        rep_list = []
        for index in sorted(range(len(level)), key=lambda t: level[t]):
            if owner[index] >= 0:
                continue
            members = {g[d][index] for g in action.group}
            for member in members:
                owner[member] = len(rep_list)
            rep_list.append(index)
        orbit_of.append(owner)
        reps.append(rep_list)

    dims = [len(r) for r in reps]
    boundaries = {}
    for d in range(1, len(dims)):
        matrix = SparseMatrix(dims[d - 1], dims[d])
        for j, index in enumerate(reps[d]):
            for face, sign in action.facets[d][index]:
                matrix.add(orbit_of[d - 1][face], j, sign)
        boundaries[d] = matrix
    labels = [[action.labels[d][index] for index in rep_list] for d, rep_list in enumerate(reps)]
    complex_ = ChainComplex(dims=dims, boundaries=boundaries, labels=labels)
    complex_.verify()
    logger.info(f"Orbit complex of {action.dims} under {len(action.group)} elements: {dims}")
    return complex_


def generic_full_quotient(n: int) -> ChainComplex:
    """Unbased complex -> subdivide -> Sigma_n orbit complex, fully materialised"""
    unbased = cactus_chain_complex(n, Shape.CYCLIC)
    action = from_chain_complex(unbased, symmetric_group_action(unbased, n))
    return quotient_complex(subdivide_until_regular(barycentric_subdivision(action)))


@lru_cache(maxsize=None)
def _strict_faces(word: Word, n: int) -> FrozenSet[Word]:
    below = set()
    for face, _, _ in facet_words(word, True, n):
        below.add(face)
        below |= _strict_faces(face, n)
    return frozenset(below)


@lru_cache(maxsize=None)
def _stabilizer_perms(rep: Word) -> Tuple[Tuple[int, ...], ...]:
    return word_stabilizer(rep).permutations


def _canonical_chain(chain: Tuple[Word, ...]) -> Tuple[Word, ...]:
    """Least image of a chain under the stabilizer of its top element"""
    best = chain
    for perm in _stabilizer_perms(chain[-1]):
        image = tuple(relabel_word(c, perm, True) for c in chain)
        if image < best:
            best = image
    return best


def _transport(chain: Tuple[Word, ...]) -> Tuple[Word, ...]:
    """Move a chain so that its top is an orbit representative, then canonicalise"""
    _, perm = orbit_normal_form(chain[-1])
    return _canonical_chain(tuple(relabel_word(c, perm, True) for c in chain))


def _chains_under(rep: Word, n: int) -> Iterator[Tuple[Word, ...]]:
    def walk(chain: Tuple[Word, ...]) -> Iterator[Tuple[Word, ...]]:
        yield chain
        for below in _strict_faces(chain[0], n):
            yield from walk((below,) + chain)

    yield from walk((rep,))


@lru_cache(maxsize=8)
def full_quotient_complex(n: int) -> ChainComplex:
    """
    Orbit complex of the subdivided unbased complex under Sigma_n, built from
    chains whose top cell is an orbit representative. Agrees with
    generic_full_quotient without listing every labelled chain.
    """
    if n < 1:
        raise InvalidInputError(f"Lobe count must be positive, got {n}")
    if n > configured_max_n():
        raise ResourceLimitError(f"n={n} exceeds WORKBENCH_MAX_N={configured_max_n()}")
    started = time.perf_counter()
    orbit_chains = set()
    for words in orbit_representatives(n).values():
        for rep in words:
            for chain in _chains_under(rep, n):
                orbit_chains.add(_canonical_chain(chain))

    top = max(len(c) for c in orbit_chains) - 1
    levels: List[List[Tuple[Word, ...]]] = [[] for _ in range(top + 1)]
    for chain in orbit_chains:
        levels[len(chain) - 1].append(chain)
    for level in levels:
        level.sort()
    position = [{chain: t for t, chain in enumerate(level)} for level in levels]

    boundaries = {}
    for k in range(1, top + 1):
        matrix = SparseMatrix(len(levels[k - 1]), len(levels[k]))
        for j, chain in enumerate(levels[k]):
            for i in range(k):
                face = _canonical_chain(chain[:i] + chain[i + 1:])
                matrix.add(position[k - 1][face], j, -1 if i % 2 else 1)
            face = _transport(chain[:-1])
            matrix.add(position[k - 1][face], j, -1 if k % 2 else 1)
        boundaries[k] = matrix

    labels = [[tuple(CactusCell(w, Shape.CYCLIC, n) for w in chain) for chain in level] for level in levels]
    complex_ = ChainComplex(dims=[len(level) for level in levels], boundaries=boundaries, labels=labels)
    complex_.verify()
    logger.info(
        f"Full quotient n={n}: orbit complex dims {complex_.dims} "
        f"({time.perf_counter() - started:.2f}s)"
    )
    return complex_


def full_quotient_homology(n: int, coefficients: Coefficients = INTEGERS) -> HomologyResult:
    try:
        return homology(full_quotient_complex(n), coefficients)
    except ConsistencyError as e:
        logger.error(f"Full quotient n={n} over {coefficients.label} is inconsistent: {e}")
        raise
