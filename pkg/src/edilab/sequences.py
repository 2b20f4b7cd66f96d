"""Transmit-ready QAM symbol sequences: PAS assembly, baselines, interleaving, I/O.

Shaped amplitudes feed two independent PAM dimensions; uniform sign bits set
the polarity per dimension (the sign bits never enter the energy statistics).
Sequence files store interleaved (re, im) float64 pairs next to a JSON
metadata sidecar.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError, InvalidInputError
from .shaping import (
    AmplitudeAlphabet,
    Composition,
    ShapingSpec,
    moments_from_composition,
    normalize_to_unit_power,
)
from . import ccdm


@dataclass(frozen=True)
class SequenceMeta:
    """Provenance of a symbol sequence."""

    shaper: str
    blocklength: int | None = None
    seed: int | None = None
    normalized: bool = False
    interleaved: bool = False


@dataclass(frozen=True)
class SymbolSequence:
    """Complex baseband symbols plus provenance metadata."""

    symbols: np.ndarray
    meta: SequenceMeta

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.symbols, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    def __len__(self) -> int:
        return self.symbols.size

    def energies(self) -> np.ndarray:
        """Per-symbol energies |x_i|^2."""
        return np.abs(self.symbols) ** 2


def symbol_energies(seq: "SymbolSequence | np.ndarray") -> np.ndarray:
    symbols = np.asarray(getattr(seq, "symbols", seq))
    return np.abs(symbols) ** 2


def assemble_pas(
    i_amps: np.ndarray,
    q_amps: np.ndarray,
    sign_seed: int,
    *,
    shaper: str = "ccdm",
    blocklength: int | None = None,
) -> SymbolSequence:
    """Combine two shaped amplitude streams into QAM symbols with random signs.

    The streams must be equal length and should come from independently
    seeded shapers.  Sign bits are i.i.d. uniform per dimension per symbol,
    modelling systematic FEC parity as uniform bits.
    """
    ai = np.asarray(i_amps, dtype=float).ravel()
    aq = np.asarray(q_amps, dtype=float).ravel()
    if ai.size != aq.size:
        raise InvalidInputError("in-phase and quadrature streams differ in length")
    rng = np.random.Generator(np.random.Philox(key=sign_seed))
    signs = 1.0 - 2.0 * rng.integers(0, 2, size=(2, ai.size)).astype(float)
    symbols = signs[0] * ai + 1j * (signs[1] * aq)
    meta = SequenceMeta(shaper=shaper, blocklength=blocklength, seed=sign_seed)
    return SymbolSequence(symbols, meta)


def interleave(seq: SymbolSequence, seed: int) -> SymbolSequence:
    """Uniform random permutation of the symbol order (multiset preserved)."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    perm = rng.permutation(len(seq))
    meta = dataclasses.replace(seq.meta, interleaved=True)
    return SymbolSequence(seq.symbols[perm], meta)


def generate_ccdm_sequence(
    spec: ShapingSpec,
    blocks: int,
    seed: int,
    *,
    normalize: bool = True,
) -> SymbolSequence:
    """Emulated-CCDM QAM sequence of ``blocks`` shaping blocks.

    In-phase and quadrature amplitude streams use independent sub-seeds
    derived from ``seed``; block grids of the two dimensions are aligned.
    """
    ss = np.random.SeedSequence(seed)
    seed_i, seed_q, seed_s = (int(c.generate_state(1, np.uint64)[0]) for c in ss.spawn(3))
    amps_i = ccdm.sample_emulated(spec.composition, spec.alphabet, seed_i, blocks)
    amps_q = ccdm.sample_emulated(spec.composition, spec.alphabet, seed_q, blocks)
    seq = assemble_pas(
        amps_i.ravel(), amps_q.ravel(), seed_s, shaper="ccdm", blocklength=spec.n
    )
    seq = dataclasses.replace(seq, meta=dataclasses.replace(seq.meta, seed=seed))
    if normalize:
        seq = normalize_to_unit_power(seq, moments_from_composition(spec.composition, spec.alphabet))
    return seq


_BASELINE_KINDS = ("uniform-qam", "qpsk")


def generate_baseline(
    kind: str,
    count: int,
    seed: int,
    *,
    order: int = 64,
) -> SymbolSequence:
    """I.i.d. unit-power baseline sequence: square uniform QAM or QPSK.

    ``order`` applies to "uniform-qam" only and must be a square of an even
    number of PAM levels (4, 16, 64, 256, ...).
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    if kind == "qpsk":
        signs = 1.0 - 2.0 * rng.integers(0, 2, size=(2, count)).astype(float)
        symbols = (signs[0] + 1j * signs[1]) / math.sqrt(2.0)
        meta = SequenceMeta(shaper="qpsk", seed=seed, normalized=True)
        return SymbolSequence(symbols, meta)
    if kind == "uniform-qam":
        side = math.isqrt(order)
        if side * side != order or side < 2 or side % 2 != 0:
            raise ConfigurationError(f"unsupported QAM order {order}")
        pam = np.arange(-(side - 1), side, 2, dtype=float)
        e_x2 = 2.0 * (side * side - 1) / 3.0
        idx = rng.integers(0, side, size=(2, count))
        symbols = (pam[idx[0]] + 1j * pam[idx[1]]) / math.sqrt(e_x2)
        meta = SequenceMeta(
            shaper=f"uniform-{order}qam", blocklength=1, seed=seed, normalized=True
        )
        return SymbolSequence(symbols, meta)
    raise ConfigurationError(f"unknown baseline kind {kind!r}; use {_BASELINE_KINDS}")


def write_sequence(seq: SymbolSequence, path: str | Path) -> Path:
    """Write symbols as interleaved (re, im) float64 pairs plus a JSON sidecar."""
    path = Path(path)
    flat = np.empty(2 * len(seq), dtype=np.float64)
    flat[0::2] = seq.symbols.real
    flat[1::2] = seq.symbols.imag
    flat.tofile(path)
    sidecar = {
        "format": "re-im-float64",
        "count": len(seq),
        "shaper": seq.meta.shaper,
        "blocklength": seq.meta.blocklength,
        "seed": seq.meta.seed,
        "normalized": seq.meta.normalized,
        "interleaved": seq.meta.interleaved,
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
    return path


def read_sequence(path: str | Path) -> SymbolSequence:
    path = Path(path)
    flat = np.fromfile(path, dtype=np.float64)
    if flat.size % 2 != 0:
        raise InvalidInputError(f"{path} does not hold (re, im) float64 pairs")
    symbols = flat[0::2] + 1j * flat[1::2]
    meta = SequenceMeta(shaper="unknown")
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        with open(sidecar, "r", encoding="utf-8") as fh:
            info = json.load(fh)
        meta = SequenceMeta(
            shaper=info.get("shaper", "unknown"),
            blocklength=info.get("blocklength"),
            seed=info.get("seed"),
            normalized=bool(info.get("normalized", False)),
            interleaved=bool(info.get("interleaved", False)),
        )
    return SymbolSequence(symbols, meta)


def export_sequence_csv(seq: SymbolSequence, path: str | Path) -> Path:
    """CSV (re, im) export intended for small sequences."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("re,im\n")
        for x in seq.symbols:
            fh.write(f"{x.real!r},{x.imag!r}\n")
    return path


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".json")
