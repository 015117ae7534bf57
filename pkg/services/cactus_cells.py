"""
Cacti cell complexes
Cells of the based complex C_n (linear lobe words) and of the unbased complex
C_n/S^1 (cyclic lobe words), their facets with incidence signs, and the
Sigma_n action that relabels lobes.
"""

import logging
import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import ConsistencyError, InvalidInputError, ResourceLimitError

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Permutation = Tuple[int, ...]


class Shape(str, Enum):
    LINEAR = "linear"
    CYCLIC = "cyclic"


def configured_max_n() -> int:
    """Largest lobe count the cactus pipelines accept (WORKBENCH_MAX_N)"""
    return int(os.getenv("WORKBENCH_MAX_N", "7"))


@dataclass(frozen=True, order=True)
class CactusCell:
    word: Word
    shape: Shape
    n: int

    @property
    def dim(self) -> int:
        return len(self.word) - self.n

    @property
    def multiplicities(self) -> Tuple[int, ...]:
        return _multiplicities(self.word, self.n)

    def to_dict(self) -> Dict:
        return {
            "word": list(self.word),
            "shape": self.shape.value,
            "n": self.n,
            "dim": self.dim,
        }


class Facet(NamedTuple):
    cell: CactusCell
    position: int
    sign: int


@dataclass(frozen=True)
class LabeledPermutationStabilizer:
    """(rotation offset, permutation) pairs fixing a cyclic word"""
    elements: Tuple[Tuple[int, Permutation], ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def permutations(self) -> Tuple[Permutation, ...]:
        return tuple(perm for _, perm in self.elements)


class OrbitSummary(NamedTuple):
    representative: CactusCell
    orbit_size: int
    stabilizer: LabeledPermutationStabilizer


def _multiplicities(word: Word, n: int) -> Tuple[int, ...]:
    counts = [0] * n
    for label in word:
        counts[label - 1] += 1
    return tuple(counts)


def canonical_rotation(word: Word) -> Tuple[Word, int]:
    """Lexicographically least rotation and the offset r with result == word[r:] + word[:r]"""
    best, best_offset = word, 0
    for r in range(1, len(word)):
        candidate = word[r:] + word[:r]
        if candidate < best:
            best, best_offset = candidate, r
    return best, best_offset


def _has_alternation(word: Word, cyclic: bool) -> bool:
    # (i,j,i,j) exists iff the word restricted to {i,j}, with repeats merged, has length >= 4
    labels = sorted(set(word))
    for a, i in enumerate(labels):
        for j in labels[a + 1:]:
            reduced: List[int] = []
            for x in word:
                if (x == i or x == j) and (not reduced or reduced[-1] != x):
                    reduced.append(x)
            if cyclic and len(reduced) > 1 and reduced[0] == reduced[-1]:
                reduced.pop()
            if len(reduced) >= 4:
                return True
    return False


def is_admissible(word: Sequence[int], shape: Shape, n: Optional[int] = None) -> bool:
    word = tuple(word)
    if not word:
        raise InvalidInputError("A lobe word needs at least one letter")
    if n is None:
        n = max(word)
    if n < 1:
        raise InvalidInputError(f"Lobe count must be positive, got {n}")
    for label in word:
        if not 1 <= label <= n:
            raise InvalidInputError(f"Label {label} is outside 1..{n}")

    if len(set(word)) != n:
        return False
    cyclic = shape == Shape.CYCLIC
    for t in range(len(word) - 1):
        if word[t] == word[t + 1]:
            return False
    if cyclic and len(word) > 1 and word[0] == word[-1]:
        return False
    return not _has_alternation(word, cyclic)


def make_cell(word: Sequence[int], shape: Shape, n: Optional[int] = None) -> CactusCell:
    """Validated constructor; cyclic words are stored as their canonical rotation"""
    word = tuple(word)
    n = max(word) if n is None and word else n
    if not is_admissible(word, shape, n):
        raise InvalidInputError(f"{list(word)} is not an admissible {shape.value} word for n={n}")
    if shape == Shape.CYCLIC:
        word = canonical_rotation(word)[0]
    return CactusCell(word, shape, n)


def _normalized_words(n: int) -> Iterator[Word]:
    """
    Depth-first search over words with no repeated neighbours and no (i,j,i,j)
    pattern, labels introduced in increasing order. Yields every such word that
    uses all n labels. Search stops by itself: no extension survives the pruning.
    """
    word: List[int] = []
    positions: Dict[int, List[int]] = {}

    def extendable(x: int) -> bool:
        if word and word[-1] == x:
            return False
        mine = positions.get(x)
        if not mine:
            return True
        for i, occ in positions.items():
            if i == x or len(occ) < 2:
                continue
            lo, hi = occ[0], occ[-1]
            if any(lo < q < hi for q in mine):
                return False
        return True

    def search() -> Iterator[Word]:
        used = len(positions)
        if used == n:
            yield tuple(word)
        for x in range(1, min(used + 1, n) + 1):
            if not extendable(x):
                continue
            positions.setdefault(x, []).append(len(word))
            word.append(x)
            yield from search()
            word.pop()
            positions[x].pop()
            if not positions[x]:
                del positions[x]

    yield from search()


def _cyclic_closes(word: Word) -> bool:
    if len(word) > 1 and word[0] == word[-1]:
        return False
    return not _has_alternation(word, True)


def enumerate_cells(n: int, shape: Shape) -> Dict[int, List[CactusCell]]:
    """All admissible cells of C_n (Linear) or C_n/S^1 (Cyclic), keyed by dimension"""
    if n < 1:
        raise InvalidInputError(f"Lobe count must be positive, got {n}")
    if n > configured_max_n():
        raise ResourceLimitError(f"n={n} exceeds WORKBENCH_MAX_N={configured_max_n()}")

    cyclic = shape == Shape.CYCLIC
    words = set()
    for base in _normalized_words(n):
        if cyclic and not _cyclic_closes(base):
            continue
        for perm in permutations(range(1, n + 1)):
            word = tuple(perm[x - 1] for x in base)
            if cyclic:
                word = canonical_rotation(word)[0]
            words.add(word)

    longest = max(len(w) for w in words)
    bound = 2 * n - 1 if not cyclic else (2 * n - 2 if n >= 2 else 1)
    if longest > bound:
        raise ConsistencyError(f"Found a {shape.value} word of length {longest} > {bound} for n={n}")

    grouped: Dict[int, List[CactusCell]] = {}
    for word in sorted(words):
        grouped.setdefault(len(word) - n, []).append(CactusCell(word, shape, n))
    for dim in grouped:
        grouped[dim].sort()

    counts = {dim: len(cells) for dim, cells in sorted(grouped.items())}
    logger.info(f"Enumerated {shape.value} cells for n={n}: {counts}")
    return dict(sorted(grouped.items()))


def _rotation_sign(word: Word, r: int, n: int) -> int:
    # moving word[:r] to the back cyclically shifts each label's occurrence list
    if r == 0:
        return 1
    mult = _multiplicities(word, n)
    moved = [0] * n
    for label in word[:r]:
        moved[label - 1] += 1
    parity = sum(s * (m - 1) for s, m in zip(moved, mult))
    return -1 if parity % 2 else 1


@lru_cache(maxsize=1 << 20)
def facet_words(word: Word, cyclic: bool, n: int) -> Tuple[Tuple[Word, int, int], ...]:
    """(facet word, deleted position, incidence sign) for every deletable occurrence"""
    mult = _multiplicities(word, n)
    offsets = [0] * n
    for label in range(1, n):
        offsets[label] = offsets[label - 1] + mult[label - 1] - 1

    seen = [0] * n
    result = []
    for t, label in enumerate(word):
        k = seen[label - 1]
        seen[label - 1] += 1
        if mult[label - 1] < 2:
            continue
        sign = -1 if (offsets[label - 1] + k) % 2 else 1
        face = word[:t] + word[t + 1:]
        if cyclic:
            face, r = canonical_rotation(face)
            sign *= _rotation_sign(word[:t] + word[t + 1:], r, n)
        result.append((face, t, sign))
    return tuple(result)


def facets(cell: CactusCell) -> List[Facet]:
    cyclic = cell.shape == Shape.CYCLIC
    return [
        Facet(CactusCell(face, cell.shape, cell.n), position, sign)
        for face, position, sign in facet_words(cell.word, cyclic, cell.n)
    ]


def _check_permutation(perm: Sequence[int], n: int) -> Permutation:
    perm = tuple(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise InvalidInputError(f"{list(perm)} is not a permutation of 1..{n}")
    return perm


def compose(rho: Permutation, pi: Permutation) -> Permutation:
    """rho after pi"""
    return tuple(rho[pi[i] - 1] for i in range(len(pi)))


def relabel_word(word: Word, perm: Permutation, cyclic: bool) -> Word:
    image = tuple(perm[x - 1] for x in word)
    return canonical_rotation(image)[0] if cyclic else image


def relabel(cell: CactusCell, perm: Sequence[int]) -> CactusCell:
    perm = _check_permutation(perm, cell.n)
    cyclic = cell.shape == Shape.CYCLIC
    return CactusCell(relabel_word(cell.word, perm, cyclic), cell.shape, cell.n)


def orbit_normal_form(word: Word) -> Tuple[Word, Permutation]:
    """
    Lexicographically least cyclic word in the Sigma_n-orbit of `word` and a
    permutation taking `word` to it. Relabelling each rotation by first
    occurrence gives its least relabelling, so minimising over rotations
    suffices.
    """
    n = max(word)
    best: Optional[Word] = None
    best_map: Dict[int, int] = {}
    for r in range(len(word)):
        rotated = word[r:] + word[:r]
        mapping: Dict[int, int] = {}
        for x in rotated:
            if x not in mapping:
                mapping[x] = len(mapping) + 1
        candidate = tuple(mapping[x] for x in rotated)
        if best is None or candidate < best:
            best, best_map = candidate, mapping
    return best, tuple(best_map[i] for i in range(1, n + 1))


def word_stabilizer(word: Word) -> LabeledPermutationStabilizer:
    elements = []
    for r in range(len(word)):
        rotated = word[r:] + word[:r]
        mapping: Dict[int, int] = {}
        consistent = True
        for src, dst in zip(word, rotated):
            if mapping.setdefault(src, dst) != dst:
                consistent = False
                break
        if consistent and len(set(mapping.values())) == len(mapping):
            n = max(word)
            elements.append((r, tuple(mapping[i] for i in range(1, n + 1))))
    return LabeledPermutationStabilizer(tuple(elements))


def orbits_and_stabilizers(cells: Sequence[CactusCell], n: int) -> List[OrbitSummary]:
    orbits: Dict[Word, int] = {}
    for cell in cells:
        if cell.shape != Shape.CYCLIC or cell.n != n:
            raise InvalidInputError(f"Expected cyclic cells with n={n}, got {cell}")
        rep, _ = orbit_normal_form(cell.word)
        orbits[rep] = orbits.get(rep, 0) + 1

    summaries = [
        OrbitSummary(CactusCell(rep, Shape.CYCLIC, n), size, word_stabilizer(rep))
        for rep, size in orbits.items()
    ]
    summaries.sort(key=lambda s: (s.representative.dim, s.representative.word))
    logger.info(f"Sigma_{n} splits {len(cells)} cells into {len(summaries)} orbits")
    return summaries


def orbit_representatives(n: int) -> Dict[int, List[Word]]:
    """Orbit normal forms of all unbased cells, keyed by dimension, without listing every cell"""
    if n < 1:
        raise InvalidInputError(f"Lobe count must be positive, got {n}")
    if n > configured_max_n():
        raise ResourceLimitError(f"n={n} exceeds WORKBENCH_MAX_N={configured_max_n()}")
    reps = set()
    for base in _normalized_words(n):
        if _cyclic_closes(base):
            reps.add(orbit_normal_form(base)[0])
    grouped: Dict[int, List[Word]] = {}
    for word in sorted(reps):
        grouped.setdefault(len(word) - n, []).append(word)
    logger.info(f"Unbased n={n}: {sum(len(v) for v in grouped.values())} Sigma_{n}-orbits")
    return dict(sorted(grouped.items()))


def cells_with_facets(n: int, shape: Shape) -> List[Tuple[CactusCell, List[Facet]]]:
    grouped = enumerate_cells(n, shape)
    return [(cell, facets(cell)) for dim in grouped for cell in grouped[dim]]
