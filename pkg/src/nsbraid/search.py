"""Braid words, exhaustive enumeration and Monte Carlo local search.

A word ``m1 m2 ... mn`` evaluates to ``M(mn) ... M(m2) M(m1)``: the first
letter is the first braid applied. Words are plain uppercase strings, the
same notation as the published braid-word tables.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .anyon_model import GeneratorSet, ONE_QUBIT_LETTERS, TWO_QUBIT_LETTERS
from .metrics import (
    cnot_scores_batch,
    computational_block,
    phase_distance,
    phase_distance_batch,
)

INVERSE_LETTER = {"A": "C", "B": "D", "C": "A", "D": "B", "E": "G", "F": "H", "G": "E", "H": "F"}
ALPHABETS = {1: ONE_QUBIT_LETTERS, 2: TWO_QUBIT_LETTERS}

# Two scores tie when |a - b| <= TIE_ATOL + TIE_RTOL * max(|a|, |b|).
TIE_RTOL = 1e-9
TIE_ATOL = 1e-15

LOW_ERROR_CNOT = 1e-10
# A cap window is feasible when d_cnot drops below this; the window edges
# sit at ~2e-10 while everything outside scores O(1).
FEASIBLE_CNOT = 1e-9

GOLDEN64 = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

# Largest batch of words scored in one vectorized block.
_BLOCK_WORDS = {1: 60_000, 2: 20_000}


class InfeasibleError(RuntimeError):
    """No candidate word satisfies the unitarity cap."""


# ----------------------------------------------------------------- words


@dataclass(frozen=True)
class Braidword:
    letters: str
    arity: int = 1

    def __post_init__(self):
        if self.arity not in ALPHABETS:
            raise ValueError(f"arity must be 1 or 2, got {self.arity}")
        alphabet = ALPHABETS[self.arity]
        bad = set(self.letters) - set(alphabet)
        if bad:
            raise KeyError(f"unknown letter(s) {''.join(sorted(bad))} for arity {self.arity}")

    def __str__(self):
        return self.letters

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Braidword") -> "Braidword":
        if other.arity != self.arity:
            raise ValueError("cannot concatenate words of different arity")
        return Braidword(self.letters + other.letters, self.arity)


def _letters(w) -> str:
    return w.letters if isinstance(w, Braidword) else str(w)


def evaluate(w, g: GeneratorSet, reverse: bool = False) -> np.ndarray:
    """Matrix of a word; ``reverse=True`` applies the last letter first instead."""
    letters = _letters(w)
    if isinstance(w, Braidword) and w.arity != g.arity:
        raise ValueError(f"arity mismatch: word {w.arity}, generators {g.arity}")
    out = np.eye(g.dim, dtype=np.complex128)
    for c in letters:
        if c not in g.letters:
            raise KeyError(f"unknown letter {c!r}")
        if reverse:
            out = out @ g.letters[c]
        else:
            out = g.letters[c] @ out
    return out


def word_inverse(w):
    """Reverse the word and invert every letter."""
    inv = "".join(INVERSE_LETTER[c] for c in reversed(_letters(w)))
    if isinstance(w, Braidword):
        return Braidword(inv, w.arity)
    return inv


def has_cancellation(letters: str) -> bool:
    return any(INVERSE_LETTER[a] == b for a, b in zip(letters, letters[1:]))


def substream_seed(seed: int, i: int) -> int:
    """Seed of run ``i``: seed XOR (golden-ratio increment * i), 64-bit."""
    return (seed ^ ((GOLDEN64 * i) & MASK64)) & MASK64


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the only randomness source used by the searches."""
    return np.random.Generator(np.random.PCG64(seed & MASK64))


# ------------------------------------------------------------- objectives


@dataclass(frozen=True)
class OneQubitDistance:
    """Minimize the phase-invariant distance to a 2x2 target."""

    target: np.ndarray
    arity: int = field(default=1, init=False)

    def score(self, mat: np.ndarray) -> tuple[float, float | None]:
        return phase_distance(mat, self.target), None

    def score_batch(self, mats: np.ndarray):
        return phase_distance_batch(mats, self.target), None


@dataclass(frozen=True)
class CnotClass:
    """Minimize d_cnot of the computational block among words with d_u <= cap."""

    du_cap: float
    arity: int = field(default=2, init=False)

    def score(self, mat: np.ndarray) -> tuple[float, float | None]:
        block, _ = computational_block(mat)
        d_cnot, d_u = cnot_scores_batch(block[None])
        d_u = float(d_u[0])
        if d_u > self.du_cap:
            return math.inf, d_u
        return float(d_cnot[0]), d_u

    def score_batch(self, mats: np.ndarray):
        d_cnot, d_u = cnot_scores_batch(mats[..., :4, :4])
        return np.where(d_u > self.du_cap, np.inf, d_cnot), d_u


@dataclass(frozen=True)
class SearchConfig:
    length: int
    objective: OneQubitDistance | CnotClass
    tolerance: float = 1e-2
    max_sweeps: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if not self.tolerance > 0:
            raise ValueError("tolerance D must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps NUM must be at least 1")


@dataclass(frozen=True)
class SearchResult:
    best_word: Braidword
    best_score: float
    d_u: float | None = None
    evaluations: int = 0
    sweeps_used: int = 0
    seed: int | None = None
    ties: tuple[str, ...] = ()
    history: tuple[float, ...] = ()

    @property
    def low_error(self) -> bool:
        """Two-qubit only: d_cnot below the 1e-10 low-error threshold."""
        return self.d_u is not None and self.best_score < LOW_ERROR_CNOT

    @property
    def feasible(self) -> bool:
        """Two-qubit only: a word in the [CNOT] class was found under the cap."""
        return self.d_u is not None and self.best_score < FEASIBLE_CNOT


def _ties(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= TIE_ATOL + TIE_RTOL * max(abs(a), abs(b))


# ------------------------------------------------------------ brute force


def enumerate_words(alphabet: str, length: int, prune: bool = True) -> list[str]:
    """All words of a given length in lexicographic order.

    With ``prune`` the words containing a letter next to its inverse are
    skipped; those are equal to shorter words.
    """
    words = [""]
    for _ in range(length):
        words = [
            w + c
            for w in words
            for c in alphabet
            if not (prune and w and INVERSE_LETTER[w[-1]] == c)
        ]
    return words


def _stack(words: Sequence[str], g: GeneratorSet) -> np.ndarray:
    """Evaluate many words of equal length at once."""
    n = len(words)
    out = np.broadcast_to(np.eye(g.dim, dtype=np.complex128), (n, g.dim, g.dim)).copy()
    if not words or not words[0]:
        return out
    mats = np.stack([g.letters[c] for c in g.alphabet])
    index = {c: i for i, c in enumerate(g.alphabet)}
    codes = np.array([[index[c] for c in w] for w in words])
    for pos in range(codes.shape[1]):
        out = mats[codes[:, pos]] @ out
    return out


def _plan(alphabet: str, length: int, arity: int, prune: bool):
    """Split a length into (prefix words, suffix length) for blocked scoring."""
    branch = len(alphabet) - 1 if prune else len(alphabet)
    suffix_len = length
    while suffix_len > 1 and len(alphabet) * branch ** (suffix_len - 1) > _BLOCK_WORDS[arity]:
        suffix_len -= 1
    prefixes = enumerate_words(alphabet, length - suffix_len, prune)
    return prefixes, suffix_len


def _score_chunk(prefixes, suffixes, suffix_mats, g, objective, prune):
    """Near-minimal candidates of one chunk as (score, word, d_u) triples."""
    best: list[tuple[float, str, float | None]] = []
    evaluations = 0
    first = np.array([s[0] if s else "" for s in suffixes])
    for prefix in prefixes:
        if prune and prefix and suffixes and suffixes[0]:
            keep = first != INVERSE_LETTER[prefix[-1]]
            words = [s for s, k in zip(suffixes, keep) if k]
            mats = suffix_mats[keep]
        else:
            words, mats = suffixes, suffix_mats
        full = mats @ evaluate(prefix, g)
        scores, extra = objective.score_batch(full)
        evaluations += len(words)
        lo = float(np.min(scores))
        if math.isinf(lo):
            continue
        if best and lo > best[0][0] and not _ties(lo, best[0][0]):
            continue
        near = np.flatnonzero(scores - lo <= TIE_ATOL + TIE_RTOL * np.abs(scores))
        for i in near:
            best.append((float(scores[i]), prefix + words[i], None if extra is None else float(extra[i])))
        m = min(b[0] for b in best)
        best = [b for b in best if b[0] == m or _ties(b[0], m)]
    return best, evaluations


def brute_force(g: GeneratorSet, cfg: SearchConfig, prune: bool = True, workers: int = 1) -> SearchResult:
    """Exact minimizer of the objective over every word of length ``cfg.length``.

    Ties (see ``TIE_RTOL``) go to the lexicographically smallest word; all
    tied words are listed in ``ties``. Chunks of the word space can be scored
    on ``workers`` threads; the reduction is order independent, so the result
    matches a serial run.
    """
    objective = cfg.objective
    if objective.arity != g.arity:
        raise ValueError("objective and generator set arity differ")
    alphabet = g.alphabet
    prefixes, suffix_len = _plan(alphabet, cfg.length, g.arity, prune)
    suffixes = enumerate_words(alphabet, suffix_len, prune)
    suffix_mats = _stack(suffixes, g)

    if workers > 1 and len(prefixes) > 1:
        n = min(workers, len(prefixes))
        chunks = [prefixes[i::n] for i in range(n)]
        with ThreadPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(lambda c: _score_chunk(c, suffixes, suffix_mats, g, objective, prune), chunks))
    else:
        parts = [_score_chunk(prefixes, suffixes, suffix_mats, g, objective, prune)]

    candidates = [c for part, _ in parts for c in part]
    evaluations = sum(n for _, n in parts)
    if not candidates:
        raise InfeasibleError("infeasible under unitarity cap")
    global_min = min(c[0] for c in candidates)
    tied = sorted((c for c in candidates if _ties(c[0], global_min)), key=lambda c: c[1])
    score, word, d_u = tied[0]
    return SearchResult(
        best_word=Braidword(word, g.arity),
        best_score=score,
        d_u=d_u,
        evaluations=evaluations,
        ties=tuple(c[1] for c in tied),
    )


# ------------------------------------------------------------- Monte Carlo


def order_of_magnitude(x: float) -> float:
    """10**floor(log10|x|)."""
    return 10.0 ** math.floor(math.log10(abs(x)))


def acceptance_probability(d: float, d_prime: float) -> float:
    """exp(-|d' - d| / ord(d' - d)), and 1 when the scores are equal."""
    if d == d_prime:
        return 1.0
    if math.isinf(d_prime):
        return 0.0
    if math.isinf(d):
        return 1.0
    delta = abs(d_prime - d)
    if delta == 0.0:
        return 1.0
    return min(1.0, math.exp(-delta / order_of_magnitude(delta)))


def _mul2(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (a0 * b0 + a1 * b2, a0 * b1 + a1 * b3, a2 * b0 + a3 * b2, a2 * b1 + a3 * b3)


def _flat2(m) -> tuple[complex, complex, complex, complex]:
    return (complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))


_ID2 = (1 + 0j, 0j, 0j, 1 + 0j)


class _OneQubitState:
    """Scalar 2x2 arithmetic for the one-qubit hot loop."""

    def __init__(self, g: GeneratorSet, target: np.ndarray):
        self.mats = [_flat2(g.letters[c]) for c in g.alphabet]
        self.target_dag = _flat2(np.asarray(target).conj().T)

    def full(self, codes):
        out = _ID2
        for c in codes:
            out = _mul2(self.mats[c], out)
        return out

    def score_full(self, m) -> float:
        t = _mul2(m, self.target_dag)
        return math.sqrt(max(0.0, 1.0 - abs(t[0] + t[3]) / 2))

    def sweep_context(self, codes):
        n = len(codes)
        suffix = [_ID2] * (n + 1)
        for i in range(n - 1, -1, -1):
            suffix[i] = _mul2(suffix[i + 1], self.mats[codes[i]])
        return suffix

    def position_kernel(self, prefix, suffix_after):
        # Tr(S M P U^dag) = Tr(M K) with K = P U^dag S.
        return _mul2(_mul2(prefix, self.target_dag), suffix_after)

    def score_at(self, kernel, c) -> float:
        m = self.mats[c]
        k = kernel
        tr = m[0] * k[0] + m[1] * k[2] + m[2] * k[1] + m[3] * k[3]
        return math.sqrt(max(0.0, 1.0 - abs(tr) / 2))

    def advance(self, prefix, c):
        return _mul2(self.mats[c], prefix)


def mc_search(g: GeneratorSet, cfg: SearchConfig) -> SearchResult:
    """Position-sweep Monte Carlo local search.

    Starts from a random word of length L. Each sweep visits positions in
    order and tries the other letters there in alphabet order: an
    improvement is taken at once and the sweep moves on; anything else is
    taken with ``acceptance_probability``. Stops as soon as the best score
    drops below ``cfg.tolerance`` or after ``cfg.max_sweeps`` sweeps, and
    returns the best word seen. Deterministic in ``cfg.seed``.
    """
    objective = cfg.objective
    if objective.arity != g.arity:
        raise ValueError("objective and generator set arity differ")
    rng = make_rng(cfg.seed)
    alphabet = g.alphabet
    n_letters = len(alphabet)
    length = cfg.length
    codes = [int(x) for x in rng.integers(0, n_letters, size=length)]

    fast = isinstance(objective, OneQubitDistance)
    if fast:
        st = _OneQubitState(g, objective.target)
        d = st.score_full(st.full(codes))
        d_u = None
    else:
        mats = [np.asarray(g.letters[c]) for c in alphabet]
        d, d_u = objective.score(evaluate("".join(alphabet[c] for c in codes), g))
    evaluations = 1
    best, best_codes, best_du = d, list(codes), d_u
    history: list[float] = []

    def result(sweeps):
        return SearchResult(
            best_word=Braidword("".join(alphabet[c] for c in best_codes), g.arity),
            best_score=best,
            d_u=best_du,
            evaluations=evaluations,
            sweeps_used=sweeps,
            seed=cfg.seed,
            history=tuple(history),
        )

    if best < cfg.tolerance or length == 0:
        return result(0)

    for num in range(1, cfg.max_sweeps + 1):
        if fast:
            suffix = st.sweep_context(codes)
            prefix = _ID2
        else:
            suffix_m = [np.eye(g.dim, dtype=np.complex128)] * (length + 1)
            for i in range(length - 1, -1, -1):
                suffix_m[i] = suffix_m[i + 1] @ mats[codes[i]]
            prefix_m = np.eye(g.dim, dtype=np.complex128)
        for pos in range(length):
            if fast:
                kernel = st.position_kernel(prefix, suffix[pos + 1])
            for c in range(n_letters):
                if c == codes[pos]:
                    continue
                if fast:
                    d_new, du_new = st.score_at(kernel, c), None
                else:
                    d_new, du_new = objective.score(suffix_m[pos + 1] @ mats[c] @ prefix_m)
                evaluations += 1
                if d_new < d:
                    codes[pos], d, d_u = c, d_new, du_new
                    if d < best:
                        best, best_codes, best_du = d, list(codes), d_u
                        if best < cfg.tolerance:
                            history.append(best)
                            return result(num)
                    break
                if rng.random() < acceptance_probability(d, d_new):
                    codes[pos], d, d_u = c, d_new, du_new
            if fast:
                prefix = st.advance(prefix, codes[pos])
            else:
                prefix_m = mats[codes[pos]] @ prefix_m
        history.append(best)
    return result(cfg.max_sweeps)


def best_of_runs(g: GeneratorSet, cfg: SearchConfig, runs: int) -> tuple[SearchResult, list[SearchResult]]:
    """Independent MC runs on seed substreams; returns (best, all)."""
    results = []
    for i in range(runs):
        run_cfg = SearchConfig(cfg.length, cfg.objective, cfg.tolerance, cfg.max_sweeps, substream_seed(cfg.seed, i))
        results.append(mc_search(g, run_cfg))
    best = min(results, key=lambda r: (r.best_score, r.best_word.letters))
    return best, results
