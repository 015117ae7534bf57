"""
Numerical map from configurations of n points in C to P(n, n-1, ..., 2)
Coefficients of the monic polynomial whose roots are the points moved to
barycenter zero; a_k has weight n - k.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConsistencyError, InvalidInputError

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
MAX_WEIGHT = 12


@dataclass(frozen=True)
class Configuration:
    points: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise InvalidInputError(f"A configuration needs at least 2 points, got {len(self.points)}")
        z = np.asarray(self.points, dtype=complex)
        scale = max(1.0, float(np.max(np.abs(z))))
        gaps = np.abs(z[:, None] - z[None, :])
        off_diagonal = ~np.eye(len(z), dtype=bool)
        if float(gaps[off_diagonal].min()) <= TOLERANCE * scale:
            raise InvalidInputError("Configuration has coincident points")

    @property
    def n(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)

    @classmethod
    def from_array(cls, z: np.ndarray) -> "Configuration":
        return cls(tuple(complex(v) for v in z))


@dataclass(frozen=True)
class WeightedPoint:
    coords: Tuple[complex, ...]
    weights: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.weights):
            raise InvalidInputError("Coordinates and weights differ in length")
        if not any(abs(c) > TOLERANCE for c in self.coords):
            raise InvalidInputError("All weighted coordinates vanish")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=complex)


def embed(config: Configuration) -> WeightedPoint:
    n = config.n
    z = config.as_array()
    shifted = z - z.mean()
    # np.poly lists coefficients from z^n down to z^0
    coefficients = np.poly(shifted)
    a = coefficients[::-1][:n]
    scale = max(1.0, float(np.max(np.abs(shifted))))
    if abs(a[n - 1]) > TOLERANCE * scale:
        raise ConsistencyError(f"Coefficient a_{n - 1} = {a[n - 1]} should vanish after centering")
    weights = tuple(range(n, 1, -1))
    return WeightedPoint(tuple(complex(v) for v in a[: n - 1]), weights)


def weighted_equal(x: WeightedPoint, y: WeightedPoint, tol: float = TOLERANCE) -> bool:
    """Is there t != 0 with t^{w_k} x_k = y_k for every k (up to tol)?"""
    if x.weights != y.weights:
        raise InvalidInputError(f"Weight vectors differ: {x.weights} vs {y.weights}")
    if max(x.weights) > MAX_WEIGHT:
        raise InvalidInputError(f"Root-branch search is limited to weights <= {MAX_WEIGHT}")
    xs, ys = x.as_array(), y.as_array()
    w = np.asarray(x.weights)
    j = int(np.argmax(np.abs(xs)))
    scale = max(float(np.max(np.abs(ys))), float(np.max(np.abs(xs))))
    if abs(ys[j]) <= tol * scale:
        return False

    ratio = ys[j] / xs[j]
    base = ratio ** (1.0 / w[j])
    for s in range(w[j]):
        t = base * np.exp(2j * np.pi * s / w[j])
        if np.allclose(t ** w * xs, ys, rtol=tol, atol=tol * scale):
            return True
    return False


def weight_action(point: WeightedPoint, t: complex) -> WeightedPoint:
    w = np.asarray(point.weights)
    return WeightedPoint(tuple(complex(v) for v in (t ** w) * point.as_array()), point.weights)


@dataclass(frozen=True)
class EmbeddingTrialReport:
    n: int
    samples: int
    seed: int
    invariance_failures: int
    vanishing_failures: int
    distinguished: int

    @property
    def distinguished_fraction(self) -> float:
        return self.distinguished / self.samples if self.samples else 1.0

    @property
    def passed(self) -> bool:
        return (
            self.invariance_failures == 0
            and self.vanishing_failures == 0
            and self.distinguished_fraction >= 0.99
        )


def random_configuration(rng: np.random.Generator, n: int) -> Configuration:
    return Configuration.from_array(rng.normal(size=n) + 1j * rng.normal(size=n))


def transformed(config: Configuration, rng: np.random.Generator) -> Configuration:
    """Random translation, rotation, dilation and relabelling of the points"""
    z = config.as_array()
    shift = complex(rng.normal(), rng.normal())
    angle = rng.uniform(0.0, 2 * np.pi)
    scale = rng.uniform(0.5, 2.0)
    moved = (z * scale * np.exp(1j * angle) + shift)[rng.permutation(len(z))]
    return Configuration.from_array(moved)


def property_trials(n: int, samples: int = 1000, seed: int = 0,
                    rng: Optional[np.random.Generator] = None) -> EmbeddingTrialReport:
    rng = rng if rng is not None else np.random.default_rng(seed)
    invariance = vanishing = distinguished = 0
    for _ in range(samples):
        config = random_configuration(rng, n)
        other = random_configuration(rng, n)
        moved = transformed(config, rng)
        try:
            image, moved_image, other_image = embed(config), embed(moved), embed(other)
        except ConsistencyError:
            vanishing += 1
            continue
        if not weighted_equal(image, moved_image):
            invariance += 1
        if not weighted_equal(image, other_image):
            distinguished += 1
    report = EmbeddingTrialReport(n, samples, seed, invariance, vanishing, distinguished)
    logger.info(
        f"Embedding trials n={n}: {invariance} invariance failures, {vanishing} vanishing failures, "
        f"{report.distinguished_fraction:.3f} distinguished"
    )
    return report


def coefficients_from_points(points: Sequence[complex]) -> Tuple[complex, ...]:
    """Coefficients a_0..a_{n-2} for an explicit list of points"""
    return embed(Configuration(tuple(complex(p) for p in points))).coords
