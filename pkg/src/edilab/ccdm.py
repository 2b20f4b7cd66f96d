"""Constant-composition coding: exact rank/unrank codec, emulated sampler, trellis.

The codec realizes the ideal full-codebook matcher by enumerative coding over
the lexicographically ordered multiset permutations of the composition
(smallest amplitude sorts first).  Big-integer arithmetic keeps encode/decode
exactly invertible for any blocklength.  The emulated sampler draws uniform
permutations of the composition, which is the model all closed-form energy
statistics in :mod:`edilab.metrics` assume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    ConfigurationError,
    InvalidInputError,
    RangeError,
    ResourceLimitError,
)
from .shaping import AmplitudeAlphabet, Composition


def multiset_permutation_count(counts: Sequence[int]) -> int:
    """Number of distinct arrangements of the composition multiset."""
    total = 0
    out = 1
    for c in counts:
        total += c
        out *= comb(total, c)
    return out


@dataclass(frozen=True)
class CcdmCodec:
    """Fixed-composition codec mapping k-bit payloads to amplitude codewords.

    ``codebook_size`` is the full multiset-permutation count; ``input_bits``
    the largest k with 2**k <= codebook_size.
    """

    comp: Composition
    alphabet: AmplitudeAlphabet
    codebook_size: int = field(init=False)
    input_bits: int = field(init=False)

    def __post_init__(self) -> None:
        if len(self.comp.counts) != len(self.alphabet.levels):
            raise ConfigurationError(
                "composition counts and alphabet levels must align"
            )
        n_c = multiset_permutation_count(self.comp.counts)
        object.__setattr__(self, "codebook_size", n_c)
        object.__setattr__(self, "input_bits", n_c.bit_length() - 1)

    @property
    def n(self) -> int:
        return self.comp.n


def rank_decode(index: int, codec: CcdmCodec) -> np.ndarray:
    """Unrank ``index`` to the index-th codeword in lexicographic order.

    Raises
    ------
    RangeError
        If ``index`` is outside [0, codebook_size).
    """
    index = int(index)
    if index < 0 or index >= codec.codebook_size:
        raise RangeError(
            f"index {index} outside codebook of size {codec.codebook_size}"
        )
    counts = list(codec.comp.counts)
    levels = codec.alphabet.levels
    remaining = codec.n
    arrangements = codec.codebook_size
    out = np.empty(codec.n, dtype=float)
    for pos in range(codec.n):
        for li, c in enumerate(counts):
            if c == 0:
                continue
            # Arrangements of the residual multiset that start with level li.
            starting = arrangements * c // remaining
            if index < starting:
                out[pos] = levels[li]
                counts[li] -= 1
                arrangements = starting
                remaining -= 1
                break
            index -= starting
    return out


def rank_encode(codeword: Iterable[float], codec: CcdmCodec) -> int:
    """Rank of a codeword; exact inverse of :func:`rank_decode`.

    Raises
    ------
    InvalidInputError
        If the codeword's amplitude histogram differs from the composition.
    """
    level_index = {lv: i for i, lv in enumerate(codec.alphabet.levels)}
    cw = np.asarray(list(codeword), dtype=float)
    if cw.size != codec.n:
        raise InvalidInputError(f"codeword length {cw.size} != blocklength {codec.n}")
    counts = list(codec.comp.counts)
    observed = [0] * len(counts)
    indices = []
    for a in cw:
        li = level_index.get(float(a))
        if li is None:
            raise InvalidInputError(f"amplitude {a} not in alphabet")
        observed[li] += 1
        indices.append(li)
    if observed != counts:
        raise InvalidInputError("codeword histogram does not match the composition")
    remaining = codec.n
    arrangements = codec.codebook_size
    rank = 0
    for li in indices:
        for smaller in range(li):
            c = counts[smaller]
            if c:
                rank += arrangements * c // remaining
        starting = arrangements * counts[li] // remaining
        counts[li] -= 1
        arrangements = starting
        remaining -= 1
    return rank


def encode_bits(bits: str | Sequence[int], codec: CcdmCodec) -> np.ndarray:
    """Map a k-bit payload to its codeword (payload read MSB first).

    Accepts a '0'/'1' string or a sequence of bits; the length must equal
    ``codec.input_bits``.
    """
    if isinstance(bits, str):
        bit_list = bits
    else:
        bit_list = "".join(str(int(b)) for b in bits)
    if len(bit_list) != codec.input_bits:
        raise InvalidInputError(
            f"payload length {len(bit_list)} != input_bits {codec.input_bits}"
        )
    if any(ch not in "01" for ch in bit_list):
        raise InvalidInputError("payload must contain only 0/1")
    index = int(bit_list, 2) if bit_list else 0
    return rank_decode(index, codec)


def decode_bits(codeword: Iterable[float], codec: CcdmCodec) -> str:
    """Recover the k-bit payload of a codeword produced by :func:`encode_bits`."""
    rank = rank_encode(codeword, codec)
    if rank >= (1 << codec.input_bits):
        raise InvalidInputError("codeword rank lies outside the payload range")
    return format(rank, f"0{codec.input_bits}b") if codec.input_bits else ""


def sample_emulated(
    comp: Composition,
    alphabet: AmplitudeAlphabet,
    rng_seed: int,
    blocks: int,
) -> np.ndarray:
    """Draw ``blocks`` independent uniform permutations of the composition.

    Returns an array of shape (blocks, n) of amplitude levels.  Each row is an
    unbiased shuffle from a Philox counter-based stream, so results are
    reproducible across platforms and deterministic given ``rng_seed``.
    """
    if blocks < 1:
        raise InvalidInputError("blocks must be >= 1")
    if len(comp.counts) != len(alphabet.levels):
        raise ConfigurationError("composition counts and alphabet levels must align")
    base = np.repeat(alphabet.as_array(), comp.counts)
    out = np.tile(base, (blocks, 1))
    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    rng.permuted(out, axis=1, out=out)
    return out


@dataclass(frozen=True)
class ShapingTrellis:
    """Exact per-stage statistics of the drawing-without-replacement process.

    Accumulated energies are expressed on the integer grid, i.e. in units of
    delta**2 (with the default delta=1 they equal physical energies).  All
    probabilities are exact fractions.

    ``stage_energies[i]`` lists the reachable accumulated energies before the
    i-th draw (i = 0..n); ``state_prob[(i, e)]`` their probabilities;
    ``cond_prob[(i, e, g)]`` the probability of drawing grid amplitude g given
    accumulated energy e; ``joint_prob[(i, e, g)]`` the joint probability.
    """

    n: int
    grid: tuple[int, ...]
    delta: float
    stage_energies: tuple[tuple[int, ...], ...]
    state_prob: dict
    cond_prob: dict
    joint_prob: dict

    @property
    def energy_levels(self) -> tuple[int, ...]:
        """Union of reachable accumulated energies over all stages."""
        seen: set[int] = set()
        for stage in self.stage_energies:
            seen.update(stage)
        return tuple(sorted(seen))

    def state_probability(self, stage: int, energy: int) -> Fraction:
        return self.state_prob.get((stage, energy), Fraction(0))

    def cond_probability(self, stage: int, energy: int, amplitude: int) -> Fraction:
        return self.cond_prob.get((stage, energy, amplitude), Fraction(0))

    def joint_probability(self, stage: int, energy: int, amplitude: int) -> Fraction:
        return self.joint_prob.get((stage, energy, amplitude), Fraction(0))

    def amplitude_marginal(self, stage: int, amplitude: int) -> Fraction:
        """P(draw amplitude at this stage), marginalized over energies."""
        total = Fraction(0)
        for e in self.stage_energies[stage]:
            total += self.joint_probability(stage, e, amplitude)
        return total

    def to_json(self) -> str:
        stages = []
        for i, energies in enumerate(self.stage_energies):
            states = []
            for e in energies:
                entry = {
                    "energy": e,
                    "prob": float(self.state_probability(i, e)),
                }
                if i < self.n:
                    entry["transitions"] = [
                        {
                            "amplitude": g,
                            "cond_prob": float(self.cond_probability(i, e, g)),
                            "joint_prob": float(self.joint_probability(i, e, g)),
                        }
                        for g in self.grid
                        if (i, e, g) in self.cond_prob
                    ]
                states.append(entry)
            stages.append({"index": i, "states": states})
        return json.dumps(
            {
                "blocklength": self.n,
                "delta": self.delta,
                "levels": [g * self.delta for g in self.grid],
                "grid": list(self.grid),
                "stages": stages,
            },
            indent=2,
        )


def build_trellis(
    comp: Composition,
    alphabet: AmplitudeAlphabet,
    max_states: int = 1_000_000,
) -> ShapingTrellis:
    """Exact dynamic program over residual compositions.

    States are keyed by the residual multiset, which subsumes the accumulated
    energy; statistics keyed by (stage, energy) are obtained by marginalizing
    residuals that share an energy (distinct residuals can collide on the same
    accumulated energy for alphabets with more than two levels).

    Raises
    ------
    ResourceLimitError
        If any stage would track more than ``max_states`` residual states.
    """
    if len(comp.counts) != len(alphabet.levels):
        raise ConfigurationError("composition counts and alphabet levels must align")
    grid = alphabet.grid
    sq = [g * g for g in grid]
    n = comp.n
    total_energy = sum(s * c for s, c in zip(sq, comp.counts))

    states: dict[tuple[int, ...], Fraction] = {tuple(comp.counts): Fraction(1)}
    state_prob: dict = {}
    joint_prob: dict = {}
    stage_energies: list[tuple[int, ...]] = []

    for i in range(n):
        remaining = n - i
        energies_here: set[int] = set()
        next_states: dict[tuple[int, ...], Fraction] = {}
        for residual, p in states.items():
            consumed = total_energy - sum(s * r for s, r in zip(sq, residual))
            energies_here.add(consumed)
            key = (i, consumed)
            state_prob[key] = state_prob.get(key, Fraction(0)) + p
            for li, r in enumerate(residual):
                if r == 0:
                    continue
                step_p = p * Fraction(r, remaining)
                jkey = (i, consumed, grid[li])
                joint_prob[jkey] = joint_prob.get(jkey, Fraction(0)) + step_p
                nxt = residual[:li] + (r - 1,) + residual[li + 1 :]
                next_states[nxt] = next_states.get(nxt, Fraction(0)) + step_p
        if len(next_states) > max_states:
            raise ResourceLimitError(
                f"trellis stage {i + 1} needs {len(next_states)} states "
                f"(limit {max_states})"
            )
        stage_energies.append(tuple(sorted(energies_here)))
        states = next_states

    # Terminal stage: the full composition is consumed with probability one.
    stage_energies.append((total_energy,))
    state_prob[(n, total_energy)] = Fraction(1)

    cond_prob = {
        (i, e, g): jp / state_prob[(i, e)] for (i, e, g), jp in joint_prob.items()
    }
    return ShapingTrellis(
        n=n,
        grid=grid,
        delta=alphabet.delta,
        stage_energies=tuple(stage_energies),
        state_prob=state_prob,
        cond_prob=cond_prob,
        joint_prob=joint_prob,
    )
