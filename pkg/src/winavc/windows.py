"""Sliding-window type verification, guard words, and codebook expurgation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import TOLERANCE, ConstraintSet, Distribution

OPEN_RANGE = "open-range"
INCLUSIVE_RANGE = "inclusive-range"


@dataclass(frozen=True)
class WindowReport:
    """Outcome of checking every window of one sequence against a set."""

    valid: bool
    violations: tuple[tuple[int, Distribution], ...]
    windows_checked: int

    def first_violation(self) -> int | None:
        return self.violations[0][0] if self.violations else None


def verify_windows(
    seq,
    w: int,
    c: ConstraintSet,
    mode: str = INCLUSIVE_RANGE,
    *,
    tol: float = TOLERANCE,
    max_violations: int | None = None,
) -> WindowReport:
    """Check the type of every length-w window of seq against c.

    Start indices are 0-based.  Inclusive-range mode checks all n-w+1
    windows; open-range mode stops one start short (indices 0..n-w-1),
    matching the literal index set in the windowed-channel definition.  The
    per-window type is updated incrementally, one symbol in and one out per
    slide.
    """
    arr = np.asarray(seq, dtype=int)
    n = arr.size
    if not 1 <= w <= n:
        raise ValueError(f"window length must satisfy 1 <= w <= {n}, got {w}")
    if mode not in (OPEN_RANGE, INCLUSIVE_RANGE):
        raise ValueError(f"unknown mode {mode!r}")
    if arr.min() < 0 or arr.max() >= c.dim:
        raise ValueError("sequence symbols out of range for the constraint set")

    n_starts = n - w + 1 if mode == INCLUSIVE_RANGE else n - w
    if n_starts <= 0:
        return WindowReport(True, (), 0)

    counts = np.bincount(arr[:w], minlength=c.dim).astype(float)
    # Running values of <c_j, counts>; membership compares against w * bound.
    dots = c.coeffs @ counts if c.num_inequalities else np.zeros(0)
    limit = c.bounds * w + tol * w

    violations: list[tuple[int, Distribution]] = []
    for start in range(n_starts):
        if c.num_inequalities and np.any(dots > limit):
            violations.append((start, Distribution(counts / w)))
            if max_violations is not None and len(violations) >= max_violations:
                break
        if start + 1 < n_starts:
            out_sym = arr[start]
            in_sym = arr[start + w]
            counts[out_sym] -= 1
            counts[in_sym] += 1
            if c.num_inequalities:
                dots += c.coeffs[:, in_sym] - c.coeffs[:, out_sym]
    return WindowReport(not violations, tuple(violations), n_starts)


@dataclass(frozen=True)
class GuardWord:
    """Deterministic fixed-type buffer built from repetitions of a base block.

    Any contiguous window of length L >= base_block_length has type within
    base_block_length / L (total variation) of the target.
    """

    symbols: np.ndarray
    base_block_length: int
    target_type: Distribution

    def __post_init__(self):
        self.symbols.setflags(write=False)

    def deviation_bound(self, window_len: int) -> float:
        if window_len < self.base_block_length:
            raise ValueError("bound only applies to windows of at least one block")
        return self.base_block_length / window_len

    def __len__(self) -> int:
        return self.symbols.size


def rationalize(target: Distribution, max_denominator: int) -> tuple[np.ndarray, int]:
    """Represent target as integers a / b with a common denominator b.

    Raises ValueError when no denominator up to max_denominator reproduces
    every entry to within 1e-9.
    """
    fracs = [Fraction(float(p)).limit_denominator(max_denominator) for p in target.probs]
    b = 1
    for f in fracs:
        b = b * f.denominator // math.gcd(b, f.denominator)
        if b > max_denominator:
            raise ValueError(
                f"no common denominator <= {max_denominator} for {target.probs}"
            )
    a = np.array([round(float(p) * b) for p in target.probs], dtype=int)
    if a.sum() != b or np.max(np.abs(a / b - target.probs)) > 1e-9:
        raise ValueError(
            f"target {target.probs} is not rational with denominator <= {max_denominator}"
        )
    return a, b


def block_pattern(counts: np.ndarray) -> np.ndarray:
    """Canonical base block: counts[0] copies of 0, counts[1] of 1, ..."""
    return np.repeat(np.arange(counts.size), counts).astype(np.int8)


def guard_word(
    target: Distribution, w_x: int, *, max_denominator: int | None = None
) -> GuardWord:
    """Build the deterministic guard word of length w_x with type ~ target.

    The base block realizes target exactly as a/b; it is repeated
    ceil(w_x / b) times and truncated to w_x symbols.
    """
    cap = w_x if max_denominator is None else min(max_denominator, w_x)
    a, b = rationalize(target, cap)
    if b > w_x:
        raise ValueError(f"base block length {b} exceeds guard length {w_x}")
    base = block_pattern(a)
    reps = -(-w_x // b)  # ceil
    word = np.tile(base, reps)[:w_x]
    return GuardWord(word, b, target)


@dataclass(frozen=True)
class ExpurgationStats:
    total: int
    removed: int
    kept_indices: np.ndarray

    def __post_init__(self):
        self.kept_indices.setflags(write=False)

    @property
    def removed_fraction(self) -> float:
        return self.removed / self.total if self.total else 0.0


def expurgate(
    codebook,
    w_x: int,
    gamma: ConstraintSet,
    suffix_context=None,
    prefix_context=None,
    *,
    tol: float = TOLERANCE,
    chunk_rows: int = 2048,
) -> tuple[np.ndarray, ExpurgationStats]:
    """Drop codewords with any violating window, including boundary straddles.

    When a context is supplied, windows straddling the codeword/context
    boundary are checked as well (suffix_context follows the codeword,
    prefix_context precedes it); windows lying entirely inside a context
    are not attributed to the codeword.
    """
    mat = np.atleast_2d(np.asarray(codebook, dtype=np.int8))
    m, n = mat.shape
    if m == 0:
        raise ValueError("codebook must be non-empty")
    pre = np.asarray(prefix_context, dtype=np.int8) if prefix_context is not None else None
    suf = np.asarray(suffix_context, dtype=np.int8) if suffix_context is not None else None
    if pre is not None and pre.size >= w_x:
        pre = pre[-(w_x - 1):] if w_x > 1 else pre[:0]
    if suf is not None and suf.size >= w_x:
        suf = suf[: w_x - 1]

    # Contexts are trimmed to w_x - 1 symbols above, so every window of the
    # extended sequence overlaps the codeword itself.
    pre_len = 0 if pre is None else pre.size
    ext_len = pre_len + n + (0 if suf is None else suf.size)
    if ext_len < w_x:
        raise ValueError(f"window length {w_x} exceeds extended sequence length {ext_len}")

    keep = np.ones(m, dtype=bool)
    for lo in range(0, m, chunk_rows):
        hi = min(lo + chunk_rows, m)
        chunk = mat[lo:hi]
        parts = []
        if pre is not None:
            parts.append(np.broadcast_to(pre, (hi - lo, pre.size)))
        parts.append(chunk)
        if suf is not None:
            parts.append(np.broadcast_to(suf, (hi - lo, suf.size)))
        ext = np.concatenate(parts, axis=1)
        bad = _any_window_violation(ext, w_x, gamma, tol)
        keep[lo:hi] = ~bad

    kept_idx = np.flatnonzero(keep)
    stats = ExpurgationStats(total=m, removed=int(m - kept_idx.size), kept_indices=kept_idx)
    return mat[keep], stats


def windows_valid(seq, w: int, c: ConstraintSet, *, tol: float = TOLERANCE) -> bool:
    """Fast vectorized equivalent of verify_windows(...).valid (inclusive range)."""
    arr = np.asarray(seq, dtype=np.int8)
    if not 1 <= w <= arr.size:
        raise ValueError(f"window length must satisfy 1 <= w <= {arr.size}, got {w}")
    return not bool(_any_window_violation(arr[None, :], w, c, tol)[0])


def windows_valid_rows(mat, w: int, c: ConstraintSet, *, tol: float = TOLERANCE) -> np.ndarray:
    """Per-row window validity for a matrix of sequences."""
    arr = np.atleast_2d(np.asarray(mat, dtype=np.int8))
    return ~_any_window_violation(arr, w, c, tol)


def _any_window_violation(mat: np.ndarray, w: int, gamma: ConstraintSet, tol: float) -> np.ndarray:
    """Per-row flag: does any length-w window violate gamma (inclusive range)?"""
    if gamma.num_inequalities == 0:
        return np.zeros(mat.shape[0], dtype=bool)
    rows, n = mat.shape
    n_win = n - w + 1
    # dots[r, t, j] = <c_j, counts of window t of row r>, built per symbol.
    dots = np.zeros((rows, n_win, gamma.num_inequalities))
    for sym in range(gamma.dim):
        col = gamma.coeffs[:, sym]
        if np.all(col == 0.0):
            continue
        ind = (mat == sym).astype(np.int32)
        csum = np.concatenate(
            [np.zeros((rows, 1), dtype=np.int32), ind.cumsum(axis=1)], axis=1
        )
        win_counts = csum[:, w:] - csum[:, :-w]  # (rows, n_win)
        dots += win_counts[:, :, None] * col[None, None, :]
    limit = gamma.bounds * w + tol * w
    bad = np.any(dots > limit[None, None, :], axis=(1, 2))
    return bad
