"""Amplitude alphabets, constant compositions, and analytical moment computations.

Everything downstream (codec, sequence assembly, energy metrics) derives its
statistics from the objects defined here.  Amplitude levels live on the odd
PAM grid {d, 3d, 5d, ...}; internally they are kept as exact integer grid
multiples of the scaling factor ``delta`` so that moment computations reduce
to exact integer arithmetic followed by a single float division.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import ConfigurationError, InvalidInputError


@dataclass(frozen=True)
class AmplitudeAlphabet:
    """Ordered set of positive PAM amplitudes {d, 3d, 5d, ...}.

    Parameters
    ----------
    levels : tuple of float
        Strictly increasing positive amplitudes, each an odd multiple of
        ``delta``.
    delta : float
        Grid scaling factor d (default 1.0, the pre-normalization convention).
    """

    levels: tuple[float, ...]
    delta: float = 1.0

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ConfigurationError("delta must be positive")
        if not self.levels:
            raise ConfigurationError("alphabet needs at least one level")
        prev = 0.0
        for lv in self.levels:
            if lv <= prev:
                raise ConfigurationError(
                    "levels must be strictly increasing and positive"
                )
            prev = lv
        # Levels must sit on the odd grid {d, 3d, 5d, ...}.
        for lv, g in zip(self.levels, self.grid):
            if g < 1 or g % 2 == 0 or not math.isclose(g * self.delta, lv, rel_tol=1e-9):
                raise ConfigurationError(
                    f"level {lv} is not an odd multiple of delta={self.delta}"
                )

    @property
    def grid(self) -> tuple[int, ...]:
        """Levels expressed as exact odd integer multiples of ``delta``."""
        return tuple(int(round(lv / self.delta)) for lv in self.levels)

    @classmethod
    def pam(cls, size: int, delta: float = 1.0) -> "AmplitudeAlphabet":
        """First ``size`` odd grid amplitudes, e.g. pam(4) -> {1, 3, 5, 7}."""
        if size < 1:
            raise ConfigurationError("alphabet size must be >= 1")
        return cls(tuple(delta * (2 * i + 1) for i in range(size)), delta)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=float)


@dataclass(frozen=True)
class Composition:
    """Per-codeword amplitude counts, position-aligned with an alphabet.

    The blocklength ``n`` is the sum of the counts, so the defining
    constraint (counts add up to the blocklength) holds by construction.
    """

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.counts:
            raise ConfigurationError("composition needs at least one count")
        if any(c < 0 or int(c) != c for c in self.counts):
            raise ConfigurationError("counts must be non-negative integers")
        if sum(self.counts) < 1:
            raise ConfigurationError("composition must contain at least one amplitude")

    @property
    def n(self) -> int:
        """Shaping blocklength."""
        return int(sum(self.counts))

    @property
    def pmf(self) -> np.ndarray:
        """Implied amplitude probabilities counts / n."""
        return np.asarray(self.counts, dtype=float) / self.n


def composition_from_pmf(pmf: Sequence[float], n: int) -> Composition:
    """Quantize a target amplitude PMF to integer counts for blocklength ``n``.

    Uses largest-remainder rounding; ties break toward the lower index so the
    result is deterministic.
    """
    p = np.asarray(pmf, dtype=float)
    if n < 1:
        raise ConfigurationError("blocklength must be >= 1")
    if p.ndim != 1 or p.size == 0 or np.any(p < 0):
        raise ConfigurationError("pmf must be a non-empty vector of probabilities")
    if not math.isclose(float(p.sum()), 1.0, rel_tol=0, abs_tol=1e-9):
        raise ConfigurationError("pmf must sum to 1")
    scaled = p * n
    counts = np.floor(scaled).astype(int)
    remainders = scaled - counts
    missing = n - int(counts.sum())
    # Stable sort keeps lower indices first on remainder ties.
    order = np.argsort(-remainders, kind="stable")
    for idx in order[:missing]:
        counts[idx] += 1
    return Composition(tuple(int(c) for c in counts))


@dataclass(frozen=True)
class ShapingSpec:
    """Alphabet plus composition: the full description of one CCDM shaper."""

    alphabet: AmplitudeAlphabet
    composition: Composition

    def __post_init__(self) -> None:
        if len(self.composition.counts) != len(self.alphabet.levels):
            raise ConfigurationError(
                "composition counts and alphabet levels must align"
            )

    @property
    def n(self) -> int:
        return self.composition.n

    @classmethod
    def from_dict(cls, data: dict) -> "ShapingSpec":
        """Build from the key-value config form {"levels": [...], "counts": [...]}.

        A "pmf" entry together with "n" may be given instead of "counts".
        """
        try:
            levels = tuple(float(x) for x in data["levels"])
        except KeyError as exc:
            raise ConfigurationError("shaping config requires 'levels'") from exc
        delta = float(data.get("delta", 1.0))
        alphabet = AmplitudeAlphabet(levels, delta)
        if "counts" in data:
            comp = Composition(tuple(int(c) for c in data["counts"]))
        elif "pmf" in data and "n" in data:
            comp = composition_from_pmf([float(x) for x in data["pmf"]], int(data["n"]))
        else:
            raise ConfigurationError("shaping config requires 'counts' or 'pmf'+'n'")
        return cls(alphabet, comp)

    @classmethod
    def from_file(cls, path: str | Path) -> "ShapingSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "levels": list(self.alphabet.levels),
            "delta": self.alphabet.delta,
            "counts": list(self.composition.counts),
        }


@dataclass(frozen=True)
class MomentSet:
    """Second/fourth amplitude and symbol-energy moments of one shaper.

    ``e_a2``/``e_a4`` are per-dimension amplitude moments; ``e_x2``/``e_x4``
    the complex-symbol energy moments obtained from two independent
    dimensions; ``var_x2`` the symbol-energy variance and ``kurtosis`` the
    standardized fourth moment of |X|.
    """

    e_a2: float
    e_a4: float
    e_x2: float
    e_x4: float
    var_x2: float
    kurtosis: float

    def scaled(self, energy_scale: float) -> "MomentSet":
        """Moments after scaling every symbol energy by ``energy_scale``."""
        s = float(energy_scale)
        if s <= 0:
            raise InvalidInputError("energy scale must be positive")
        return MomentSet(
            e_a2=self.e_a2 * s,
            e_a4=self.e_a4 * s * s,
            e_x2=self.e_x2 * s,
            e_x4=self.e_x4 * s * s,
            var_x2=self.var_x2 * s * s,
            kurtosis=self.kurtosis,
        )

    def normalized(self) -> "MomentSet":
        """Moments rescaled to unit mean symbol energy."""
        if self.e_x2 <= 0:
            raise InvalidInputError("cannot normalize zero-power moments")
        return self.scaled(1.0 / self.e_x2)


def moments_from_composition(
    comp: Composition, alphabet: AmplitudeAlphabet
) -> MomentSet:
    """Exact moment set implied by the composition's amplitude PMF.

    The amplitude PMF is counts / n; all sums are carried out on the integer
    grid so the only rounding is the final division.

    Raises
    ------
    ConfigurationError
        If the composition does not align with the alphabet.
    """
    if len(comp.counts) != len(alphabet.levels):
        raise ConfigurationError("composition counts and alphabet levels must align")
    n = comp.n
    grid = alphabet.grid
    num2 = sum(g * g * c for g, c in zip(grid, comp.counts))
    num4 = sum(g**4 * c for g, c in zip(grid, comp.counts))
    d2 = alphabet.delta**2
    e_a2 = d2 * num2 / n
    e_a4 = d2 * d2 * num4 / n
    e_x2 = 2.0 * e_a2
    e_x4 = 2.0 * e_a4 + 2.0 * e_a2 * e_a2
    var_x2 = 2.0 * (e_a4 - e_a2 * e_a2)
    kurtosis = e_x4 / (e_x2 * e_x2)
    return MomentSet(e_a2, e_a4, e_x2, e_x4, var_x2, kurtosis)


def normalize_to_unit_power(seq, moments: MomentSet):
    """Scale a symbol sequence so its analytical mean energy is exactly 1.

    ``seq`` is any SymbolSequence-like dataclass with ``symbols`` and ``meta``
    fields; a rescaled copy is returned with the normalization flag set.
    Pair with :meth:`MomentSet.normalized` for the matching moments.
    """
    if moments.e_x2 <= 0:
        raise InvalidInputError("cannot normalize a zero-power sequence")
    scale = 1.0 / math.sqrt(moments.e_x2)
    symbols = np.asarray(seq.symbols) * scale
    meta = dataclasses.replace(seq.meta, normalized=True)
    return dataclasses.replace(seq, symbols=symbols, meta=meta)
