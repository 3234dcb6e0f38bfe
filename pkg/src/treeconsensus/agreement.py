"""Priority spectrums and the double-entropy agreement index.

For each priority coordinate, the values taken across all tree-derived
vectors are rounded onto a discrete 1..N domain and accumulated into a
mass-weighted spectrum. Agreement of one spectrum is scored by combining two
entropies: H(P) over the normalized distances between occupied grades (where
the estimates sit) and H(Q) over the normalized masses (how support splits
among them). Both are min-max normalized against the extremes attainable for
the same (N, k); the index is 1 - (H*(P) + H*(Q)) / 2, so 1 means unanimity
and 0 means maximal spread with uniform mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import SpectrumDomainError, UndefinedSpectrumError
from .spantree import PriorityVector

#: supported binning precisions (the spectrum domain has 1/epsilon grades)
ALLOWED_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4)

DEFAULT_EPSILON = 1e-2
DEFAULT_THRESHOLD = 0.7

_INTEGRAL_TOL = 1e-9


@dataclass
class Spectrum:
    """Mass per occupied grade of a 1..N domain, plus the sample count."""

    grades: int
    mass: dict[int, float] = field(default_factory=dict)
    contributions: int = 0

    def support(self) -> list[int]:
        return sorted(g for g, r in self.mass.items() if r > 0)

    def total_mass(self) -> float:
        return sum(self.mass.values())

    def add(self, grade: int, weight: float) -> None:
        if not (1 <= grade <= self.grades):
            raise SpectrumDomainError(f"grade {grade} outside 1..{self.grades}")
        if weight < 0:
            raise SpectrumDomainError(f"negative weight {weight}")
        if weight == 0:
            return
        self.mass[grade] = self.mass.get(grade, 0.0) + weight
        self.contributions += 1

    def table(self) -> str:
        """Two-column export (grade, mass) for plotting."""
        lines = [f"{g}\t{self.mass[g]!r}" for g in self.support()]
        return "\n".join(lines) + "\n"


def _bin_index(value: float, epsilon: float, grades: int) -> int:
    # round half away from zero, then clamp into the 1..N grade domain
    idx = int(math.floor(value / epsilon + 0.5))
    return min(max(idx, 1), grades)


def build_spectrum(values: Iterable[tuple[float, float]],
                   epsilon: float = DEFAULT_EPSILON,
                   grades: int | None = None) -> Spectrum:
    """Round weighted values in (0, 1] onto a discrete spectrum.

    The domain is 1..round(1/epsilon), or 1..grades when an explicit grade
    count is given (binning priorities straight onto an estimation scale).
    """
    if grades is None:
        if not any(math.isclose(epsilon, e) for e in ALLOWED_EPSILONS):
            raise SpectrumDomainError(
                f"epsilon must be one of {ALLOWED_EPSILONS}, got {epsilon}"
            )
        grades = round(1 / epsilon)
    else:
        if grades < 2:
            raise SpectrumDomainError(f"spectrum needs >= 2 grades, got {grades}")
        epsilon = 1.0 / grades
    spectrum = Spectrum(grades)
    for value, weight in values:
        if not (0 < value <= 1):
            raise SpectrumDomainError(f"value {value} outside (0, 1]")
        spectrum.add(_bin_index(value, epsilon, grades), weight)
    return spectrum


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def gap_total(grades: int, k: int) -> int:
    """The fixed denominator d the distances are normalized by."""
    if k == 1:
        return grades
    return (grades - 1) + (grades - 1) // (k - 1)


def gap_distribution(support: Sequence[int], grades: int) -> np.ndarray:
    """Normalized distances between consecutive occupied grades.

    The k-th component is the residual d - sum of the k-1 gaps, so the vector
    always sums to exactly 1 and stays strictly positive.
    """
    k = len(support)
    d = gap_total(grades, k)
    if k == 1:
        return np.array([1.0])
    gaps = np.diff(np.asarray(support, dtype=float))
    residual = d - gaps.sum()
    return np.append(gaps, residual) / d


@lru_cache(maxsize=4096)
def gap_entropy_range(grades: int, k: int) -> tuple[float, float]:
    """Exact (min, max) of H(P) over all k-point supports in 1..grades.

    For a fixed support span the residual is fixed and the gap composition is
    majorization-extremal at the fully concentrated split (minimum entropy)
    and the balanced split (maximum entropy); scanning every feasible span
    then gives the global extremes without enumerating supports.
    """
    if k < 1 or k > grades:
        raise ValueError(f"support size {k} outside 1..{grades}")
    if k == 1:
        return 0.0, 0.0
    d = gap_total(grades, k)
    lo, hi = math.inf, -math.inf
    for span in range(k - 1, grades):
        residual = d - span
        quotient, remainder = divmod(span, k - 1)
        balanced = [quotient + 1] * remainder + [quotient] * (k - 1 - remainder)
        concentrated = [1] * (k - 2) + [span - (k - 2)]
        hi = max(hi, _entropy(np.array(balanced + [residual], dtype=float) / d))
        lo = min(lo, _entropy(np.array(concentrated + [residual], dtype=float) / d))
    return lo, hi


def _masses_integral(masses: Sequence[float]) -> bool:
    return all(abs(r - round(r)) <= _INTEGRAL_TOL and round(r) >= 1 for r in masses)


def _balanced_split_entropy(votes: int, bins: int) -> float:
    quotient, remainder = divmod(votes, bins)
    parts = np.array([quotient + 1] * remainder + [quotient] * (bins - remainder),
                     dtype=float)
    return _entropy(parts / votes)


def max_mass_entropy(spectrum: Spectrum) -> float:
    """The normalizer for H(Q): the largest frequency entropy attainable.

    Unit-vote spectrums (integral masses whose total matches the sample
    count) are bounded by the most even *integer* split of the m votes over
    min(m, N) grades; that equals ln min(m, N) whenever m <= N but is
    strictly smaller when m voters cannot split evenly over N grades. With
    real-valued masses any split is attainable, so the bound is
    ln min(samples, N); uniform mass rescaling cannot move it because the
    sample count, not the mass, enters. A bare mass table without a sample
    count falls back to ln k over its occupied grades.
    """
    support = spectrum.support()
    masses = [spectrum.mass[g] for g in support]
    integral = _masses_integral(masses)
    total_votes = int(round(sum(masses))) if integral else 0
    if integral and spectrum.contributions in (0, total_votes):
        if total_votes <= 1:
            return 0.0
        return _balanced_split_entropy(total_votes, min(total_votes, spectrum.grades))
    if spectrum.contributions > 0:
        m_eff = spectrum.contributions
        return math.log(min(m_eff, spectrum.grades)) if m_eff > 1 else 0.0
    return math.log(len(support)) if len(support) > 1 else 0.0


def double_entropy_index(spectrum: Spectrum) -> float:
    """Agreement index in [0, 1] for one spectrum; 1 is unanimity.

    A single occupied grade scores 1 by convention. With k = N occupied
    grades H*(P) is 1 by definition; in the rare degenerate case where every
    k-support has identical gap entropy, H*(P) is taken as 0 (the minimum),
    which keeps the unanimity convention consistent.
    """
    support = spectrum.support()
    if not support or spectrum.total_mass() <= 0:
        raise UndefinedSpectrumError("spectrum has no mass")
    k = len(support)
    if k == 1:
        return 1.0
    n = spectrum.grades

    h_p = _entropy(gap_distribution(support, n))
    if k == n:
        h_star_p = 1.0
    else:
        lo, hi = gap_entropy_range(n, k)
        h_star_p = (h_p - lo) / (hi - lo) if hi - lo > 1e-15 else 0.0

    masses = np.array([spectrum.mass[g] for g in support])
    h_q = _entropy(masses / masses.sum())
    normalizer = max_mass_entropy(spectrum)
    h_star_q = h_q / normalizer if normalizer > 0 else 0.0

    index = 1.0 - (h_star_p + h_star_q) / 2.0
    return min(1.0, max(0.0, index))


@dataclass
class AgreementReport:
    """Per-coordinate double-entropy indices against the usability threshold."""

    K: np.ndarray
    threshold: float
    spectrums: list[Spectrum]

    @property
    def passing(self) -> bool:
        return bool(np.min(self.K) > self.threshold)

    @property
    def worst_coordinate(self) -> int:
        return int(np.argmin(self.K))

    @property
    def min_index(self) -> float:
        return float(np.min(self.K))


def agreement_report(vectors: Sequence[tuple[PriorityVector, float]],
                     epsilon: float = DEFAULT_EPSILON,
                     threshold: float = DEFAULT_THRESHOLD,
                     grades: int | None = None) -> AgreementReport:
    """Score agreement of weighted priority vectors, coordinate by coordinate.

    Each vector drops one weighted sample per coordinate into that
    coordinate's spectrum; weights carry the experts' relative competences.
    """
    if not vectors:
        raise UndefinedSpectrumError("no priority vectors to score")
    n = vectors[0][0].n
    if any(v.n != n for v, _ in vectors):
        raise ValueError("priority vectors have mixed lengths")
    spectrums = [
        build_spectrum(
            ((float(v.w[coord]), weight) for v, weight in vectors),
            epsilon=epsilon,
            grades=grades,
        )
        for coord in range(n)
    ]
    indices = np.array([double_entropy_index(s) for s in spectrums])
    return AgreementReport(indices, threshold, spectrums)
