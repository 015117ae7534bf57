"""
Cohen's description of H_*(C(C); F_p) as a free graded commutative algebra
graded by weight (number of points), with the Delta operator, the S^1
equivariant series, C_q(C*) homology and Z/p fixed points.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple

from sympy import isprime

from .errors import HypothesisError, InvalidInputError, UnsupportedError
from .sparse_matrix import SparseMatrix, rank_mod_p

logger = logging.getLogger(__name__)


class GeneratorKind:
    POINT = "a"
    BRACKET = "bracket"
    POWER = "Q"
    BOCKSTEIN_POWER = "betaQ"
    POWER_OF_POINT = "Qa"


@dataclass(frozen=True, order=True)
class Generator:
    weight: int
    degree: int
    name: str
    kind: str

    @property
    def is_odd(self) -> bool:
        return self.degree % 2 == 1


@dataclass(frozen=True, order=True)
class Monomial:
    """Sorted (generator, exponent) pairs; the empty monomial is the unit"""
    factors: Tuple[Tuple[Generator, int], ...] = ()

    @property
    def degree(self) -> int:
        return sum(g.degree * e for g, e in self.factors)

    @property
    def weight(self) -> int:
        return sum(g.weight * e for g, e in self.factors)

    def exponent(self, kind: str) -> int:
        return sum(e for g, e in self.factors if g.kind == kind)

    @property
    def name(self) -> str:
        if not self.factors:
            return "1"
        return "".join(g.name if e == 1 else f"{g.name}^{e}" for g, e in self.factors)

    def to_dict(self) -> Dict:
        return {"monomial": self.name, "degree": self.degree, "weight": self.weight}


class DeltaTerm(NamedTuple):
    coefficient: int
    raw_coefficient: int
    target: Optional[Monomial]


class FixedPoints(NamedTuple):
    n: int
    p: int
    q: Optional[int]

    @property
    def empty(self) -> bool:
        return self.q is None


@dataclass(frozen=True)
class EquivariantSeries:
    n: int
    p: int
    branch: str
    fiber_dims: Tuple[int, ...]
    dims: Tuple[int, ...]


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not isprime(p):
        raise InvalidInputError(f"p must be prime, got {p}")


@lru_cache(maxsize=None)
def generators(max_weight: int, p: int) -> Tuple[Generator, ...]:
    """Generators of weight <= max_weight"""
    _check_prime(p)
    gens = []
    if p == 2:
        i = 0
        while 2 ** i <= max_weight:
            name = "a" if i == 0 else f"Q^{i}(a)"
            kind = GeneratorKind.POINT if i == 0 else GeneratorKind.POWER_OF_POINT
            gens.append(Generator(2 ** i, 2 ** i - 1, name, kind))
            i += 1
    else:
        if max_weight >= 1:
            gens.append(Generator(1, 0, "a", GeneratorKind.POINT))
        if max_weight >= 2:
            gens.append(Generator(2, 1, "[a,a]", GeneratorKind.BRACKET))
        i = 1
        while 2 * p ** i <= max_weight:
            gens.append(Generator(2 * p ** i, 2 * p ** i - 2, f"βQ^{i}[a,a]", GeneratorKind.BOCKSTEIN_POWER))
            gens.append(Generator(2 * p ** i, 2 * p ** i - 1, f"Q^{i}[a,a]", GeneratorKind.POWER))
            i += 1
    return tuple(sorted(gens))


@lru_cache(maxsize=None)
def _weight_basis(n: int, p: int) -> Tuple[Monomial, ...]:
    gens = generators(n, p)
    found: List[Monomial] = []

    def search(t: int, remaining: int, chosen: Tuple[Tuple[Generator, int], ...]) -> None:
        if remaining == 0:
            found.append(Monomial(chosen))
            return
        if t == len(gens):
            return
        g = gens[t]
        cap = remaining // g.weight
        if p != 2 and g.is_odd:
            cap = min(cap, 1)
        for e in range(cap, -1, -1):
            search(t + 1, remaining - e * g.weight, chosen + (((g, e),) if e else ()))

    search(0, n, ())
    return tuple(sorted(found, key=lambda m: (m.degree, m.name)))


def basis(n: int, p: int, degree: Optional[int] = None) -> List[Monomial]:
    """Monomials of total weight n (and the given degree)"""
    _check_prime(p)
    if n < 0:
        raise InvalidInputError(f"Weight must be non-negative, got {n}")
    monomials = _weight_basis(n, p)
    if degree is not None:
        return [m for m in monomials if m.degree == degree]
    return list(monomials)


def fiber_dims(n: int, p: int) -> Tuple[int, ...]:
    """dim H_d(C_n(C); F_p) for d = 0..top"""
    monomials = basis(n, p)
    top = max(m.degree for m in monomials)
    dims = [0] * (top + 1)
    for m in monomials:
        dims[m.degree] += 1
    return tuple(dims)


def generating_function_counts(max_weight: int, p: int) -> Dict[Tuple[int, int], int]:
    """
    Coefficients of prod 1/(1 - s^w t^d) over even generators times
    prod (1 + s^w t^d) over odd ones (both polynomial at p = 2), keyed by (weight, degree)
    """
    series: Dict[Tuple[int, int], int] = {(0, 0): 1}
    for g in generators(max_weight, p):
        cap = 1 if (p != 2 and g.is_odd) else max_weight // g.weight
        updated: Dict[Tuple[int, int], int] = {}
        for (w, d), count in series.items():
            for e in range(cap + 1):
                if w + e * g.weight > max_weight:
                    break
                key = (w + e * g.weight, d + e * g.degree)
                updated[key] = updated.get(key, 0) + count
        series = updated
    return series


def delta(m: Monomial, p: int) -> DeltaTerm:
    """Delta(a^k x) = k(k-1) a^(k-2) [a,a] x and Delta(a^k [a,a] x) = 0"""
    _check_prime(p)
    if p == 2:
        raise UnsupportedError("Delta formulas are only used for odd p")
    for g, _ in m.factors:
        if g.kind not in (GeneratorKind.POINT, GeneratorKind.BRACKET,
                          GeneratorKind.POWER, GeneratorKind.BOCKSTEIN_POWER):
            raise UnsupportedError(f"Delta is not defined on the letter {g.name}")
    if m.exponent(GeneratorKind.BRACKET):
        return DeltaTerm(0, 0, None)
    k = m.exponent(GeneratorKind.POINT)
    if k < 2:
        return DeltaTerm(0, 0, None)

    gens = {g.kind: g for g in generators(max(m.weight, 2), p)}
    factors = dict(m.factors)
    point, bracket = gens[GeneratorKind.POINT], gens[GeneratorKind.BRACKET]
    if k == 2:
        del factors[point]
    else:
        factors[point] = k - 2
    factors[bracket] = 1
    raw = k * (k - 1)
    return DeltaTerm(raw % p, raw, Monomial(tuple(sorted(factors.items()))))


def delta_matrix_rank(n: int, p: int, degree: int) -> int:
    """Rank of Delta from degree-1 to degree in weight n, by elimination over F_p"""
    source = basis(n, p, degree - 1)
    target = basis(n, p, degree)
    position = {m: i for i, m in enumerate(target)}
    matrix = SparseMatrix(len(target), len(source))
    for j, m in enumerate(source):
        term = delta(m, p)
        if term.coefficient and term.target is not None:
            matrix.add(position[term.target], j, term.coefficient)
    return rank_mod_p(matrix, p)


def delta_cokernel(n: int, p: int) -> Dict[int, int]:
    """dim coker(Delta) per degree computed by brute force, no hypothesis on n"""
    dims = fiber_dims(n, p)
    return {d: dims[d] - (delta_matrix_rank(n, p, d) if d > 0 else 0) for d in range(len(dims))}


def coker_delta_dims(n: int, p: int) -> Dict[int, int]:
    """Bracket-free monomials per degree, checked against the brute-force cokernel"""
    _check_prime(p)
    if p == 2:
        raise UnsupportedError("The Delta cokernel description is for odd p")
    if n % p in (0, 1):
        raise HypothesisError(f"n={n} is 0 or 1 mod {p}; use the tensor form of the equivariant series")

    dims = fiber_dims(n, p)
    bracket_free = {d: 0 for d in range(len(dims))}
    for m in basis(n, p):
        if not m.exponent(GeneratorKind.BRACKET):
            bracket_free[m.degree] += 1
    honest = delta_cokernel(n, p)
    if honest != bracket_free:
        logger.error(f"coker Delta mismatch for n={n}, p={p}: {honest} vs {bracket_free}")
        raise HypothesisError(f"Bracket-free count {bracket_free} differs from rank computation {honest}")
    return bracket_free


def equivariant_series(n: int, p: int, max_degree: Optional[int] = None) -> EquivariantSeries:
    """dim H^{S^1}_d(C_n(C); F_p) for d = 0..max_degree"""
    _check_prime(p)
    fiber = fiber_dims(n, p)
    if max_degree is None:
        max_degree = 2 * n + 2
    if p == 2 or n % p in (0, 1):
        dims = [sum(fiber[d - 2 * j] for j in range(d // 2 + 1) if d - 2 * j < len(fiber))
                for d in range(max_degree + 1)]
        branch = "tensor"
    else:
        coker = coker_delta_dims(n, p)
        dims = [coker.get(d, 0) for d in range(max_degree + 1)]
        branch = "cokernel"
    return EquivariantSeries(n, p, branch, fiber, tuple(dims))


def _cstar_letter(k: int) -> str:
    letter = "b"
    for _ in range(k):
        letter = f"[{letter},a]"
    return letter


def cstar_classes(q: int, p: int) -> List[Tuple[str, int]]:
    """(name, degree) for each class of H_*(C_q(C*); F_p) = sum_k b_k . H_*(C_{q-k}(C))"""
    _check_prime(p)
    if q < 0:
        raise InvalidInputError(f"Point count must be non-negative, got {q}")
    classes = []
    for k in range(q + 1):
        for m in basis(q - k, p):
            name = _cstar_letter(k) if not m.factors else f"{_cstar_letter(k)}·{m.name}"
            classes.append((name, k + m.degree))
    return sorted(classes, key=lambda c: (c[1], c[0]))


def cstar_homology(q: int, p: int) -> Tuple[int, ...]:
    classes = cstar_classes(q, p)
    dims = [0] * (max(d for _, d in classes) + 1)
    for _, d in classes:
        dims[d] += 1
    return tuple(dims)


def fixed_points(n: int, p: int) -> FixedPoints:
    """C_n(C)^{Z/p} is C_q(C*) with q = n/p or (n-1)/p, and empty otherwise"""
    _check_prime(p)
    if n < 0:
        raise InvalidInputError(f"n must be non-negative, got {n}")
    if n % p == 0:
        return FixedPoints(n, p, n // p)
    if n % p == 1:
        return FixedPoints(n, p, (n - 1) // p)
    return FixedPoints(n, p, None)
