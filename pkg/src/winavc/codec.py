"""Three-phase coding: list codes, polynomial hashing, guard layout, keys.

A transmission has three segments: a random list-decodable codeword carrying
the message concatenated with its hash, a deterministic buffer region that
keeps every sliding window feasible across segment boundaries, and a short
key codeword from which the decoder recovers the hash keys and disambiguates
the list.  Two buffer layouts are supported: a single fixed-type guard word
("thm1"), and an interleaved region whose windows mix a type-1 and a type-2
law in ratio alpha : 1-alpha ("thm2", for jammer windows shorter than
encoder windows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gf2
from .core import (
    Channel,
    ConstraintSet,
    Distribution,
    induced_channel,
)
from .symmetrize import ecn_symmetrizable, gamma_prime
from .windows import (
    ExpurgationStats,
    block_pattern,
    expurgate,
    guard_word,
    verify_windows,
    windows_valid,
)

LAYOUT_THM1 = "thm1"
LAYOUT_THM2 = "thm2"


class CodeConstructionError(RuntimeError):
    """Code building failed (empty expurgated code or invalid layout)."""


# ---------------------------------------------------------------------------
# Polynomial hash over GF(2^k)


@dataclass(frozen=True)
class HashParams:
    """Field size and chunk count for the message hash h = r1 + sum m_i r2^i."""

    field_bits: int
    chunk_count: int
    reduction_poly: int | None = None

    def __post_init__(self):
        if self.field_bits < 1:
            raise ValueError("field_bits must be >= 1")
        if self.chunk_count < 1:
            raise ValueError("chunk_count must be >= 1")

    @classmethod
    def for_message_bits(cls, message_bits: int, field_bits: int) -> "HashParams":
        k = max(1, math.ceil(message_bits / field_bits))
        return cls(field_bits=field_bits, chunk_count=k)

    @property
    def field_order(self) -> int:
        return 1 << self.field_bits

    def field(self) -> gf2.GF2m:
        return gf2.field(self.field_bits, self.reduction_poly)


def chunk_message(message: int, params: HashParams) -> list[int]:
    """Split a message id into chunk_count field elements, low bits first."""
    if message < 0:
        raise ValueError("message id must be non-negative")
    q = params.field_order
    chunks = [(message >> (params.field_bits * i)) & (q - 1) for i in range(params.chunk_count)]
    if message >> (params.field_bits * params.chunk_count):
        raise ValueError(
            f"message {message} does not fit in {params.chunk_count} chunks "
            f"of {params.field_bits} bits"
        )
    return chunks


def poly_hash(m_chunks, r1: int, r2: int, params: HashParams) -> int:
    """Evaluate r1 + sum_{i=1..K} m_i r2^i in GF(2^field_bits)."""
    f = params.field()
    f.validate(r1)
    f.validate(r2)
    if len(m_chunks) != params.chunk_count:
        raise ValueError(
            f"expected {params.chunk_count} chunks, got {len(m_chunks)}"
        )
    # Horner on sum m_i r2^i = ((m_K r2 + m_{K-1}) r2 + ...) r2
    acc = 0
    for m_i in reversed(list(m_chunks)):
        f.validate(m_i)
        acc = f.mul(f.add(acc, m_i), r2)
    return f.add(r1, acc)


# ---------------------------------------------------------------------------
# Decoding budgets


@dataclass(frozen=True)
class JamBudget:
    """Admissibility threshold used by the budget-ball list decoder."""

    kind: str  # "hamming" | "likelihood"
    radius: int = 0
    ll_table: np.ndarray | None = None  # (|X|, |Y|) per-letter log2 likelihood
    ll_floor: float = -np.inf


def max_window_corruption(w_s: int, lam: ConstraintSet) -> int:
    """Largest number of non-zero state symbols an admissible window allows."""
    weight = np.ones(lam.dim)
    weight[0] = 0.0
    hi, _ = lam.max_linear(weight)
    return int(math.floor(hi * w_s + 1e-9))


def hamming_budget(seg_len: int, w_s: int, lam: ConstraintSet, *, extra: int = 0) -> JamBudget:
    """Max total corruption inside any seg_len stretch of an admissible state.

    Every disjoint state window carries at most k non-zero symbols, so a
    segment of length L admits at most floor(L/w_s)*k + min(k, L mod w_s).
    """
    k = max_window_corruption(w_s, lam)
    radius = (seg_len // w_s) * k + min(k, seg_len % w_s)
    return JamBudget(kind="hamming", radius=radius + extra)


def likelihood_budget(
    p_x: Distribution,
    channel: Channel,
    lam: ConstraintSet,
    *,
    ref_q: Distribution | None = None,
    slack: float = 0.05,
) -> JamBudget:
    """Per-letter log-likelihood floor that admits every admissible jammer.

    Codewords are scored by the mean of ll(y|x) = log2 V_ref(y|x), where
    V_ref averages the channel over a reference state law.  For the true
    codeword the expectation of that score is linear in the jammer's state
    law, so its minimum over the admissible set is exact; the floor is that
    minimum less a concentration slack.
    """
    if ref_q is None:
        ref_q = lam.feasible_point()
    v = induced_channel(ref_q, channel)
    ll = np.log2(np.maximum(v, 1e-300))
    ll[v <= 0] = -300.0
    # d[s] = E[ll(y|x)] contribution of state s under the true input law
    d = np.einsum("x,xsy,xy->s", p_x.probs, channel.table, ll)
    worst, _ = lam.min_linear(d)
    return JamBudget(kind="likelihood", ll_table=ll, ll_floor=worst - slack)


# ---------------------------------------------------------------------------
# List code


@dataclass(frozen=True)
class ListCode:
    """Expurgated random code with a size-capped budget-ball list decoder."""

    codewords: np.ndarray  # (M, n) int8, all windows feasible
    rate: float
    l_max: int
    budget: JamBudget | None = None

    def __post_init__(self):
        self.codewords.setflags(write=False)

    @property
    def num_messages(self) -> int:
        return self.codewords.shape[0]

    @property
    def blocklength(self) -> int:
        return self.codewords.shape[1]


@dataclass(frozen=True)
class ListDecodeResult:
    messages: tuple[int, ...]
    pre_truncation_size: int
    overflow: bool


def delta_interior(p: Distribution, cset: ConstraintSet, delta: float) -> bool:
    """Sufficient check that the L1 ball of radius delta around p is in cset."""
    for c, b in cset.inequalities:
        spread = float(np.max(c) - np.min(c))
        if b - float(c @ p.probs) < delta / 2.0 * spread - 1e-12:
            return False
    return True


def sample_iid_codewords(
    count: int, n: int, p_x: Distribution, rng: np.random.Generator
) -> np.ndarray:
    u = rng.random((count, n))
    cdf = np.cumsum(p_x.probs)
    return np.searchsorted(cdf, u, side="right").astype(np.int8)


def build_list_code(
    n: int,
    rate: float,
    p_x: Distribution,
    gamma: ConstraintSet,
    w_x: int,
    *,
    l_max: int = 32,
    rng: np.random.Generator,
    delta: float = 0.02,
    message_count: int | None = None,
    max_messages: int = 1 << 14,
    suffix_context=None,
    budget: JamBudget | None = None,
) -> tuple[ListCode, ExpurgationStats]:
    """Sample ceil(2^(rate*n)) i.i.d. p_x codewords and expurgate violators.

    p_x must sit strictly inside the input set (delta-interior), otherwise
    a constant fraction of windows would violate it and the expurgation
    would gut the code.
    """
    if not delta_interior(p_x, gamma, delta):
        raise ValueError("input law is not in the delta-interior of the input set")
    if message_count is None:
        message_count = math.ceil(2.0 ** (rate * n))
    if message_count > max_messages:
        raise ValueError(
            f"{message_count} codewords exceed the desk-scale cap {max_messages}; "
            "pass message_count explicitly to clamp"
        )
    raw = sample_iid_codewords(message_count, n, p_x, rng)
    kept, stats = expurgate(raw, w_x, gamma, suffix_context=suffix_context)
    if kept.shape[0] == 0:
        raise CodeConstructionError("expurgation removed every codeword")
    code = ListCode(
        codewords=kept,
        rate=math.log2(kept.shape[0]) / n,
        l_max=l_max,
        budget=budget,
    )
    return code, stats


def _budget_scores(codewords: np.ndarray, y: np.ndarray, budget: JamBudget):
    """Returns (scores, admissible mask); lower score is better."""
    if budget.kind == "hamming":
        scores = np.count_nonzero(codewords != y[None, :], axis=1)
        return scores, scores <= budget.radius
    if budget.kind == "likelihood":
        ll = budget.ll_table[codewords, y[None, :]].mean(axis=1)
        return -ll, ll >= budget.ll_floor
    raise ValueError(f"unknown budget kind {budget.kind!r}")


def list_decode(y_seq, code: ListCode, budget: JamBudget | None = None) -> ListDecodeResult:
    """All messages within the jamming budget, best score first.

    Ties break deterministically by message index; the list is truncated to
    l_max with the overflow flagged.
    """
    budget = budget if budget is not None else code.budget
    if budget is None:
        raise ValueError("no decoding budget supplied")
    y = np.asarray(y_seq, dtype=np.int8)
    if y.size != code.blocklength:
        raise ValueError(f"output length {y.size} != blocklength {code.blocklength}")
    scores, ok = _budget_scores(code.codewords, y, budget)
    idx = np.flatnonzero(ok)
    order = np.lexsort((idx, scores[idx]))
    ranked = idx[order]
    pre = ranked.size
    return ListDecodeResult(
        messages=tuple(int(i) for i in ranked[: code.l_max]),
        pre_truncation_size=int(pre),
        overflow=pre > code.l_max,
    )


# ---------------------------------------------------------------------------
# Interleaved window layout


def interleave_allocation(
    w_x: int,
    alpha: float,
    lam_frac: float,
    window_index: int = 0,
    phase: str = "II",
) -> tuple[np.ndarray, np.ndarray]:
    """Split one length-w_x window into type-1 and type-2 position sets.

    Window i of the buffer phase starts with min(i*l, alpha*w_x) type-1
    positions (l = lam_frac*alpha*w_x) and the matching block of type-2
    positions, then fills sequentially: position j goes to type-2 exactly
    when the fraction of earlier positions in type-2 is below 1-alpha.  The
    key phase (and the last buffer window) is the plain block split.
    Positions are 0-based; the final ratio is exactly alpha : 1-alpha.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    a_wx = alpha * w_x
    if abs(a_wx - round(a_wx)) > 1e-9:
        raise ValueError(f"alpha * w_x = {a_wx} must be an integer")
    a_wx = round(a_wx)
    if phase == "III":
        return np.arange(a_wx), np.arange(a_wx, w_x)
    if phase != "II":
        raise ValueError(f"phase must be 'II' or 'III', got {phase!r}")
    if lam_frac <= 0:
        raise ValueError(f"lam_frac must be positive, got {lam_frac}")
    if window_index < 0:
        raise ValueError("window_index must be >= 0")
    l = lam_frac * a_wx
    if abs(l - round(l)) > 1e-9 or round(l) < 1:
        raise ValueError(f"l = lam_frac*alpha*w_x = {l} must be an integer >= 1")
    l = round(l)

    li = min(window_index * l, a_wx)
    ci = math.ceil((w_x - a_wx) * li / a_wx) if a_wx else 0
    in_s2 = np.zeros(w_x, dtype=bool)
    in_s2[li : li + ci] = True
    count2 = ci
    for j in range(li + ci, w_x):
        # exact integer form of count2 / j < 1 - alpha; an empty prefix
        # counts as fraction 0, so the first position is type-2 when
        # alpha < 1
        if (count2 * w_x < (w_x - a_wx) * j) or (j == 0 and a_wx < w_x):
            in_s2[j] = True
            count2 += 1
    s1 = np.flatnonzero(~in_s2)
    s2 = np.flatnonzero(in_s2)
    if s1.size != a_wx:
        raise CodeConstructionError(
            f"fill rule produced {s1.size} type-1 positions, expected {a_wx}"
        )
    return s1, s2


@dataclass(frozen=True)
class PhasePlan:
    """Segment lengths and, for the interleaved layout, the window recipe."""

    layout: str
    n1: int
    w_x: int
    phase2_len: int
    phase3_len: int
    alpha: float | None = None
    lam_frac: float | None = None
    l: int | None = None
    phase2_window_count: int | None = None
    phase3_window_count: int | None = None

    @property
    def total_length(self) -> int:
        return self.n1 + self.phase2_len + self.phase3_len

    @property
    def phase2_start(self) -> int:
        return self.n1

    @property
    def phase3_start(self) -> int:
        return self.n1 + self.phase2_len

    def phase3_s1_local(self) -> np.ndarray:
        """Type-1 positions inside the key segment (thm2 layout only)."""
        if self.layout != LAYOUT_THM2:
            raise ValueError("type-1 positions only exist in the interleaved layout")
        s1, _ = interleave_allocation(self.w_x, self.alpha, self.lam_frac, 0, "III")
        return np.concatenate(
            [s1 + i * self.w_x for i in range(self.phase3_window_count)]
        )


def make_phase_plan_thm1(n1: int, w_x: int, key_len: int) -> PhasePlan:
    if key_len < 1:
        raise ValueError("key code length must be >= 1")
    return PhasePlan(
        layout=LAYOUT_THM1, n1=n1, w_x=w_x, phase2_len=w_x, phase3_len=key_len
    )


def make_phase_plan_thm2(
    n1: int, w_x: int, alpha: float, lam_frac: float, min_key_len: int
) -> PhasePlan:
    s1, _ = interleave_allocation(w_x, alpha, lam_frac, 0, "III")
    a_wx = s1.size
    l = round(lam_frac * a_wx)
    n2_windows = 1 + math.ceil(1.0 / lam_frac)
    n3_windows = max(1, math.ceil(min_key_len / a_wx))
    return PhasePlan(
        layout=LAYOUT_THM2,
        n1=n1,
        w_x=w_x,
        phase2_len=n2_windows * w_x,
        phase3_len=n3_windows * w_x,
        alpha=alpha,
        lam_frac=lam_frac,
        l=l,
        phase2_window_count=n2_windows,
        phase3_window_count=n3_windows,
    )


def _per_window_counts(t: Distribution, slots: int, what: str) -> np.ndarray:
    counts = t.probs * slots
    rounded = np.round(counts).astype(int)
    if np.max(np.abs(counts - rounded)) > 1e-9 or rounded.sum() != slots:
        raise ValueError(
            f"{what} must scale to integer symbol counts over {slots} slots, "
            f"got {counts}"
        )
    return rounded


def build_interleaved_region(plan: PhasePlan, t1: Distribution, t2: Distribution):
    """Phase-II sequence and the phase-III skeleton (type-1 slots left as -1)."""
    a_wx = round(plan.alpha * plan.w_x)
    t1_counts = _per_window_counts(t1, a_wx, "alpha * t1")
    t2_counts = _per_window_counts(t2, plan.w_x - a_wx, "(1-alpha) * t2")
    t1_block = block_pattern(t1_counts)
    t2_block = block_pattern(t2_counts)

    phase2 = np.empty(plan.phase2_len, dtype=np.int8)
    for i in range(plan.phase2_window_count):
        s1, s2 = interleave_allocation(plan.w_x, plan.alpha, plan.lam_frac, i, "II")
        win = np.empty(plan.w_x, dtype=np.int8)
        win[s1] = t1_block
        win[s2] = t2_block
        phase2[i * plan.w_x : (i + 1) * plan.w_x] = win

    skeleton = np.empty(plan.phase3_len, dtype=np.int8)
    s1, s2 = interleave_allocation(plan.w_x, plan.alpha, plan.lam_frac, 0, "III")
    for i in range(plan.phase3_window_count):
        win = np.full(plan.w_x, -1, dtype=np.int8)
        win[s2] = t2_block
        skeleton[i * plan.w_x : (i + 1) * plan.w_x] = win
    return phase2, skeleton


def type1_window_fractions(plan: PhasePlan) -> np.ndarray:
    """Sliding-window type-1 location fractions over phases II and III."""
    marks = []
    for i in range(plan.phase2_window_count):
        s1, _ = interleave_allocation(plan.w_x, plan.alpha, plan.lam_frac, i, "II")
        m = np.zeros(plan.w_x, dtype=np.int32)
        m[s1] = 1
        marks.append(m)
    s1, _ = interleave_allocation(plan.w_x, plan.alpha, plan.lam_frac, 0, "III")
    for _ in range(plan.phase3_window_count):
        m = np.zeros(plan.w_x, dtype=np.int32)
        m[s1] = 1
        marks.append(m)
    flags = np.concatenate(marks)
    c = np.concatenate([[0], np.cumsum(flags)])
    w = plan.w_x
    return (c[w:] - c[:-w]) / w


# ---------------------------------------------------------------------------
# Key code (hash-key transmission)


@dataclass(frozen=True)
class KeyCode:
    """Small random code carrying the two hash keys (r1, r2)."""

    codewords: np.ndarray  # (K, code_len) int8
    key_ids: np.ndarray  # surviving r1 * q + r2
    field_bits: int
    budget: JamBudget | None = None

    def __post_init__(self):
        self.codewords.setflags(write=False)
        self.key_ids.setflags(write=False)

    @property
    def q(self) -> int:
        return 1 << self.field_bits

    def position_of(self, r1: int, r2: int) -> int:
        pos = int(np.searchsorted(self.key_ids, r1 * self.q + r2))
        if pos >= self.key_ids.size or self.key_ids[pos] != r1 * self.q + r2:
            raise KeyError(f"key pair ({r1}, {r2}) was expurgated")
        return pos

    def encode(self, r1: int, r2: int) -> np.ndarray:
        return self.codewords[self.position_of(r1, r2)]

    def draw_keys(self, rng: np.random.Generator) -> tuple[int, int]:
        kid = int(self.key_ids[rng.integers(self.key_ids.size)])
        return kid // self.q, kid % self.q

    def decode(self, y_seq, budget: JamBudget | None = None) -> tuple[int, int, bool]:
        """Best key under the budget scoring; returns (r1, r2, within_budget)."""
        budget = budget if budget is not None else self.budget
        y = np.asarray(y_seq, dtype=np.int8)
        scores, ok = _budget_scores(self.codewords, y, budget)
        best = int(np.lexsort((self.key_ids, scores))[0])
        kid = int(self.key_ids[best])
        return kid // self.q, kid % self.q, bool(ok[best])


def phase3_key_code(
    field_bits: int,
    t: Distribution,
    code_len: int,
    gamma: ConstraintSet,
    w_x: int,
    channel: Channel,
    lam: ConstraintSet,
    rng: np.random.Generator,
    *,
    delta: float = 0.02,
    allow_symmetrizable: bool = False,
    prefix_context=None,
    embed_fn=None,
    budget: JamBudget | None = None,
    max_keys: int = 1 << 16,
    interior_set: ConstraintSet | None = None,
) -> tuple[KeyCode, ExpurgationStats]:
    """Random i.i.d.(t) code over all (r1, r2) key pairs, window-expurgated.

    The key-carrying law t must be non-symmetrizable for (channel, lam),
    since the keys are what rescue unique decoding; pass
    allow_symmetrizable=True only to demonstrate the failure mode.
    embed_fn, when given, maps the raw codeword matrix to the full segment
    laid out around it (interleaved layout) before window checking; in that
    layout t is interior to the ratio-enlarged set, so interior_set
    overrides which set the margin check runs against.
    """
    if not delta_interior(t, interior_set if interior_set is not None else gamma, delta):
        raise ValueError("key-carrying law is not in the delta-interior of the input set")
    if not allow_symmetrizable and ecn_symmetrizable(t, channel, lam).feasible:
        raise ValueError(
            "key-carrying law is symmetrizable for the state constraints; "
            "key transmission cannot be made reliable"
        )
    q = 1 << field_bits
    if q * q > max_keys:
        raise ValueError(f"{q * q} key pairs exceed the desk-scale cap {max_keys}")
    raw = sample_iid_codewords(q * q, code_len, t, rng)
    check = embed_fn(raw) if embed_fn is not None else raw
    _, stats = expurgate(check, w_x, gamma, prefix_context=prefix_context)
    if stats.kept_indices.size == 0:
        raise CodeConstructionError("expurgation removed every key codeword")
    code = KeyCode(
        codewords=raw[stats.kept_indices],
        key_ids=stats.kept_indices.astype(np.int64),
        field_bits=field_bits,
        budget=budget,
    )
    return code, stats


# ---------------------------------------------------------------------------
# Full three-phase codec


@dataclass(frozen=True)
class CodecParams:
    """Build-time knobs for the three-phase code."""

    layout: str
    n1: int
    w_x: int
    message_bits: int
    p_x: Distribution
    field_bits: int = 6
    l_max: int = 32
    delta: float = 0.02
    key_type: Distribution | None = None  # defaults to p_x
    key_len: int | None = None  # thm1 default 2*w_x; thm2 rounded to windows
    guard_type: Distribution | None = None  # thm1; default p_x rounded to rationals
    guard_denominator: int = 8
    alpha: float | None = None  # thm2
    lam_frac: float = 0.1  # thm2
    t1: Distribution | None = None  # thm2
    t2: Distribution | None = None  # thm2
    allow_symmetrizable_key_type: bool = False
    budget_extra: int = 0
    max_messages: int = 1 << 14


@dataclass(frozen=True)
class DecodeResult:
    message_id: int | None
    status: str  # "unique" | "empty-list" | "no-survivor" | "ambiguous"
    list_size: int
    pre_truncation_size: int
    overflow: bool
    keys: tuple[int, int]
    key_within_budget: bool
    survivors: tuple[int, ...]


@dataclass(frozen=True)
class ThreePhaseCodec:
    plan: PhasePlan
    hash_params: HashParams
    gamma: ConstraintSet
    lam: ConstraintSet
    channel: Channel
    w_s: int
    message_ids: np.ndarray  # surviving original message ids
    phase1_flat: ListCode  # (M_surv * q, n1), message-major
    phase2_seq: np.ndarray
    phase3_skeleton: np.ndarray | None  # thm2 only
    key_code: KeyCode
    budget1: JamBudget
    budget3: JamBudget

    def __post_init__(self):
        self.message_ids.setflags(write=False)
        self.phase2_seq.setflags(write=False)
        if self.phase3_skeleton is not None:
            self.phase3_skeleton.setflags(write=False)

    @property
    def message_count(self) -> int:
        return self.message_ids.size

    @property
    def q(self) -> int:
        return self.hash_params.field_order

    @property
    def hash_collision_bound(self) -> float:
        """Per-wrong-message hash survival probability over uniform r2: K/q."""
        return self.hash_params.chunk_count / self.hash_params.field_order

    def hash_of(self, message_id: int, r1: int, r2: int) -> int:
        return poly_hash(chunk_message(message_id, self.hash_params), r1, r2, self.hash_params)

    def draw_message(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.message_count))

    def draw_keys(self, rng: np.random.Generator) -> tuple[int, int]:
        return self.key_code.draw_keys(rng)

    def encode(self, message_pos: int, r1: int, r2: int, *, check_windows: bool = True) -> np.ndarray:
        """Assemble the full codeword for the message at position message_pos."""
        if not 0 <= message_pos < self.message_count:
            raise ValueError(f"message position {message_pos} out of range")
        h = self.hash_of(int(self.message_ids[message_pos]), r1, r2)
        x1 = self.phase1_flat.codewords[message_pos * self.q + h]
        key_word = self.key_code.encode(r1, r2)
        if self.plan.layout == LAYOUT_THM1:
            x3 = key_word
        else:
            x3 = self.phase3_skeleton.copy()
            x3[self.plan.phase3_s1_local()] = key_word
        full = np.concatenate([x1, self.phase2_seq, x3])
        if check_windows and not windows_valid(full, self.plan.w_x, self.gamma):
            report = verify_windows(full, self.plan.w_x, self.gamma)
            raise CodeConstructionError(
                f"assembled codeword violates an input window at start "
                f"{report.first_violation()}"
            )
        return full

    def decode(self, y_seq) -> DecodeResult:
        """List-decode the first segment, recover keys, filter by hash."""
        y = np.asarray(y_seq, dtype=np.int8)
        if y.size != self.plan.total_length:
            raise ValueError(
                f"output length {y.size} != transmission length {self.plan.total_length}"
            )
        listing = list_decode(y[: self.plan.n1], self.phase1_flat, self.budget1)
        y3 = y[self.plan.phase3_start :]
        if self.plan.layout == LAYOUT_THM2:
            y3 = y3[self.plan.phase3_s1_local()]
        r1, r2, key_ok = self.key_code.decode(y3, self.budget3)

        if not listing.messages:
            return DecodeResult(None, "empty-list", 0, listing.pre_truncation_size,
                                listing.overflow, (r1, r2), key_ok, ())
        survivors = []
        for flat in listing.messages:
            pos, h = divmod(flat, self.q)
            if h == self.hash_of(int(self.message_ids[pos]), r1, r2):
                survivors.append(pos)
        if not survivors:
            return DecodeResult(None, "no-survivor", len(listing.messages),
                                listing.pre_truncation_size, listing.overflow,
                                (r1, r2), key_ok, ())
        chosen = min(survivors)
        status = "unique" if len(survivors) == 1 else "ambiguous"
        return DecodeResult(int(self.message_ids[chosen]), status, len(listing.messages),
                            listing.pre_truncation_size, listing.overflow,
                            (r1, r2), key_ok,
                            tuple(int(self.message_ids[p]) for p in sorted(survivors)))


def _round_to_denominator(p: Distribution, b: int) -> Distribution:
    """Nearest distribution with entries k/b (largest-remainder rounding)."""
    scaled = p.probs * b
    base = np.floor(scaled).astype(int)
    short = b - base.sum()
    order = np.argsort(-(scaled - base))
    base[order[:short]] += 1
    return Distribution(base / b)


def build_three_phase_codec(
    params: CodecParams,
    gamma: ConstraintSet,
    lam: ConstraintSet,
    channel: Channel,
    w_s: int,
    rng: np.random.Generator,
) -> tuple[ThreePhaseCodec, dict]:
    """Construct all three segments; returns the codec and build statistics.

    Phase-1 codewords are sampled per (message, hash value) pair; after
    expurgation any message with an incomplete hash fiber is dropped so the
    encoder can realize every key draw.
    """
    hp = HashParams.for_message_bits(params.message_bits, params.field_bits)
    q = hp.field_order
    n_msg = 1 << params.message_bits
    if n_msg * q > params.max_messages * 4:
        raise ValueError(
            f"{n_msg * q} phase-1 codewords exceed the desk-scale cap "
            f"{params.max_messages * 4}"
        )

    key_type = params.key_type if params.key_type is not None else params.p_x

    if params.layout == LAYOUT_THM1:
        guard_target = params.guard_type
        if guard_target is None:
            guard_target = _round_to_denominator(
                params.p_x, min(params.guard_denominator, params.w_x)
            )
        guard = guard_word(guard_target, params.w_x)
        if not delta_interior(guard.target_type, gamma, params.delta):
            raise ValueError("guard type is not in the delta-interior of the input set")
        key_len = params.key_len if params.key_len is not None else 2 * params.w_x
        plan = make_phase_plan_thm1(params.n1, params.w_x, key_len)
        phase2_seq = guard.symbols
        phase3_skeleton = None
        embed_fn = None
        key_sample_len = key_len
        key_t = key_type
        key_interior_set = None
    elif params.layout == LAYOUT_THM2:
        if params.alpha is None or params.t1 is None or params.t2 is None:
            raise ValueError("interleaved layout requires alpha, t1 and t2")
        min_key_len = params.key_len if params.key_len is not None else 2 * params.w_x
        plan = make_phase_plan_thm2(
            params.n1, params.w_x, params.alpha, params.lam_frac, min_key_len
        )
        _validate_interleaved_types(params, gamma, plan)
        phase2_seq, phase3_skeleton = build_interleaved_region(plan, params.t1, params.t2)
        s1_local = plan.phase3_s1_local()
        tail = phase2_seq[-(params.w_x - 1):] if params.w_x > 1 else phase2_seq[:0]

        def embed_fn(raw: np.ndarray) -> np.ndarray:
            region = np.broadcast_to(phase3_skeleton, (raw.shape[0], phase3_skeleton.size)).copy()
            region[:, s1_local] = raw
            return np.concatenate(
                [np.broadcast_to(tail, (raw.shape[0], tail.size)), region], axis=1
            )

        key_sample_len = s1_local.size
        key_t = params.t1
        key_interior_set = gamma_prime(gamma, params.alpha)
    else:
        raise ValueError(f"unknown layout {params.layout!r}")

    # The buffer region must be feasible on its own before anything random
    # is attached to it.
    if plan.phase2_len >= params.w_x:
        rep = verify_windows(phase2_seq, params.w_x, gamma)
        if not rep.valid:
            raise CodeConstructionError(
                f"deterministic buffer violates an input window at start "
                f"{rep.first_violation()}"
            )

    budget1 = hamming_budget(plan.n1, w_s, lam, extra=params.budget_extra)
    budget3 = hamming_budget(plan.phase3_len, w_s, lam, extra=params.budget_extra)
    if not channel.is_binary_additive():
        budget1 = likelihood_budget(params.p_x, channel, lam)
        budget3 = likelihood_budget(key_t, channel, lam)

    # Phase 1: one codeword per (message, hash value) pair.
    if not delta_interior(params.p_x, gamma, params.delta):
        raise ValueError("input law is not in the delta-interior of the input set")
    raw = sample_iid_codewords(n_msg * q, plan.n1, params.p_x, rng)
    suffix = phase2_seq[: params.w_x - 1] if params.w_x > 1 else phase2_seq[:0]
    _, p1_stats = expurgate(raw, params.w_x, gamma, suffix_context=suffix)
    fiber_ok = np.zeros(n_msg * q, dtype=bool)
    fiber_ok[p1_stats.kept_indices] = True
    fibers = fiber_ok.reshape(n_msg, q)
    msg_keep = fibers.all(axis=1)
    message_ids = np.flatnonzero(msg_keep)
    if message_ids.size == 0:
        raise CodeConstructionError(
            "no message kept a complete hash fiber after expurgation"
        )
    phase1 = ListCode(
        codewords=raw[np.repeat(msg_keep, q)],
        rate=math.log2(message_ids.size * q) / plan.n1,
        l_max=params.l_max,
        budget=budget1,
    )

    prefix = phase2_seq[-(params.w_x - 1):] if params.w_x > 1 else phase2_seq[:0]
    key_code, key_stats = phase3_key_code(
        params.field_bits,
        key_t,
        key_sample_len,
        gamma,
        params.w_x,
        channel,
        lam,
        rng,
        delta=params.delta,
        allow_symmetrizable=params.allow_symmetrizable_key_type,
        prefix_context=None if params.layout == LAYOUT_THM2 else prefix,
        embed_fn=embed_fn,
        budget=budget3,
        interior_set=key_interior_set,
    )

    codec = ThreePhaseCodec(
        plan=plan,
        hash_params=hp,
        gamma=gamma,
        lam=lam,
        channel=channel,
        w_s=w_s,
        message_ids=message_ids,
        phase1_flat=phase1,
        phase2_seq=np.asarray(phase2_seq, dtype=np.int8),
        phase3_skeleton=phase3_skeleton,
        key_code=key_code,
        budget1=budget1,
        budget3=budget3,
    )
    build_stats = {
        "hash_collision_bound": codec.hash_collision_bound,
        "phase1_total": int(p1_stats.total),
        "phase1_removed": int(p1_stats.removed),
        "phase1_removed_fraction": p1_stats.removed_fraction,
        "messages_built": int(n_msg),
        "messages_kept": int(message_ids.size),
        "key_total": int(key_stats.total),
        "key_removed": int(key_stats.removed),
        "key_removed_fraction": key_stats.removed_fraction,
    }
    return codec, build_stats


def _validate_interleaved_types(params: CodecParams, gamma: ConstraintSet, plan: PhasePlan):
    enlarged = gamma_prime(gamma, params.alpha)
    if not delta_interior(params.t1, enlarged, params.delta):
        raise ValueError(
            "type-1 law is not in the delta-interior of the ratio-enlarged input set"
        )
    mix = Distribution(
        params.alpha * params.t1.probs + (1.0 - params.alpha) * params.t2.probs
    )
    # Sliding windows deviate from the mix by at most lam_frac * alpha in TV.
    dev = params.lam_frac * params.alpha
    for c, b in gamma.inequalities:
        spread = float(np.max(c) - np.min(c))
        if b - float(c @ mix.probs) < dev * spread - 1e-12:
            raise ValueError(
                "window-type margin too small: alpha*t1 + (1-alpha)*t2 must sit "
                f"at least lam_frac*alpha = {dev:g} (TV) inside the input set"
            )


def encode_three_phase(
    message_pos: int, r1: int, r2: int, codec: ThreePhaseCodec, **kw
) -> np.ndarray:
    return codec.encode(message_pos, r1, r2, **kw)


def decode_three_phase(y_seq, codec: ThreePhaseCodec) -> DecodeResult:
    return codec.decode(y_seq)
