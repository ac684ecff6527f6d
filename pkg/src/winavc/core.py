"""Finite-alphabet probability primitives.

Distributions, empirical types, state-dependent channels, and convex
constraint sets on the probability simplex.  Everything is immutable after
construction; sampling takes an explicit numpy Generator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import lp

TOLERANCE = 1e-9

LOG_FLOOR = 1e-300  # guards log2 of structurally zero entries


class InfeasibleSetError(ValueError):
    """The half-space intersection has no point on the simplex."""


@dataclass(frozen=True)
class Alphabet:
    """Symbols are 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.size}")


class Distribution:
    """Probability vector over a finite alphabet.

    Entries must be non-negative and sum to 1 within `atol`; the stored
    vector is normalized exactly on construction.
    """

    __slots__ = ("probs",)

    def __init__(self, probs, *, atol: float = 1e-12):
        p = np.array(probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-D vector")
        if np.any(p < -atol):
            raise ValueError(f"negative probability entries: {p}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > atol:
            raise ValueError(f"probabilities sum to {total}, expected 1 within {atol}")
        p /= total
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return self.probs.size

    @classmethod
    def point_mass(cls, symbol: int, size: int) -> "Distribution":
        p = np.zeros(size)
        p[symbol] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def bernoulli(cls, weight: float) -> "Distribution":
        """Binary distribution with P(1) = weight."""
        if not 0.0 <= weight <= 1.0:
            raise ValueError(f"weight must be in [0, 1], got {weight}")
        return cls([1.0 - weight, weight])

    def __setattr__(self, name, value):
        raise AttributeError("Distribution is immutable")

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, k: int) -> float:
        return float(self.probs[k])

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())

    def __repr__(self) -> str:
        return f"Distribution({np.array2string(self.probs, precision=6)})"

    def close_to(self, other: "Distribution", atol: float = TOLERANCE) -> bool:
        return self.size == other.size and bool(
            np.all(np.abs(self.probs - other.probs) <= atol)
        )


@dataclass(frozen=True)
class EmpiricalType:
    """Symbol counts of a sequence together with its length."""

    counts: tuple[int, ...]
    length: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        if sum(self.counts) != self.length:
            raise ValueError(
                f"counts sum to {sum(self.counts)}, expected length {self.length}"
            )

    @property
    def distribution(self) -> Distribution:
        return Distribution(np.asarray(self.counts, dtype=float) / self.length)


class Channel:
    """Conditional distribution table W(y | x, s), shape (|X|, |S|, |Y|)."""

    __slots__ = ("table",)

    def __init__(self, table, *, atol: float = 1e-9):
        t = np.array(table, dtype=float)
        if t.ndim != 3:
            raise ValueError(f"channel table must be 3-D (x, s, y), got {t.ndim}-D")
        if np.any(t < -atol):
            raise ValueError("channel table has negative entries")
        t = np.clip(t, 0.0, None)
        sums = t.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > atol):
            raise ValueError("every channel row W(. | x, s) must sum to 1")
        t /= sums[:, :, None]
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __setattr__(self, name, value):
        raise AttributeError("Channel is immutable")

    @property
    def num_inputs(self) -> int:
        return self.table.shape[0]

    @property
    def num_states(self) -> int:
        return self.table.shape[1]

    @property
    def num_outputs(self) -> int:
        return self.table.shape[2]

    def row(self, x: int, s: int) -> Distribution:
        return Distribution(self.table[x, s])

    @classmethod
    def xor(cls) -> "Channel":
        """Binary channel y = x XOR s."""
        t = np.zeros((2, 2, 2))
        for x in range(2):
            for s in range(2):
                t[x, s, x ^ s] = 1.0
        return cls(t)

    def is_binary_additive(self) -> bool:
        """True iff the channel is exactly y = x XOR s on binary alphabets."""
        if self.table.shape != (2, 2, 2):
            return False
        return bool(np.array_equal(self.table, Channel.xor().table))


class ConstraintSet:
    """Intersection of half-spaces <c, P> <= bound with the simplex.

    Non-emptiness is verified at construction by LP feasibility.
    """

    __slots__ = ("dim", "coeffs", "bounds", "_feasible")

    def __init__(self, dim: int, inequalities=(), *, tol: float = TOLERANCE):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        coeff_rows = []
        bound_vals = []
        for c, b in inequalities:
            c = np.asarray(c, dtype=float)
            if c.shape != (dim,):
                raise ValueError(f"coefficient vector {c} does not match dim {dim}")
            coeff_rows.append(c)
            bound_vals.append(float(b))
        coeffs = np.array(coeff_rows, dtype=float).reshape(len(coeff_rows), dim)
        bounds = np.asarray(bound_vals, dtype=float)
        coeffs.setflags(write=False)
        bounds.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "bounds", bounds)

        if len(coeff_rows) == 0:
            pt = np.full(dim, 1.0 / dim)
        else:
            pt = lp.feasible_point(
                a_ub=coeffs, b_ub=bounds, a_eq=np.ones((1, dim)), b_eq=[1.0], tol=tol
            )
            if pt is None:
                raise InfeasibleSetError(
                    "constraint set has no feasible point on the simplex"
                )
        object.__setattr__(self, "_feasible", Distribution(np.clip(pt, 0, None), atol=1e-6))

    def __setattr__(self, name, value):
        raise AttributeError("ConstraintSet is immutable")

    @classmethod
    def full_simplex(cls, dim: int) -> "ConstraintSet":
        return cls(dim)

    @classmethod
    def weight_cap(cls, cap: float, dim: int = 2) -> "ConstraintSet":
        """All P with P(1) + ... + P(dim-1) <= cap (Hamming-weight budget)."""
        c = np.ones(dim)
        c[0] = 0.0
        return cls(dim, [(c, cap)])

    @property
    def num_inequalities(self) -> int:
        return self.coeffs.shape[0]

    @property
    def inequalities(self) -> list[tuple[np.ndarray, float]]:
        return [(self.coeffs[i], float(self.bounds[i])) for i in range(self.num_inequalities)]

    def feasible_point(self) -> Distribution:
        return self._feasible

    def slack(self, p: Distribution) -> float:
        """Signed margin: min over inequalities of bound - <c, p> (+inf if none)."""
        if p.size != self.dim:
            raise ValueError(f"distribution size {p.size} does not match dim {self.dim}")
        if self.num_inequalities == 0:
            return float("inf")
        return float(np.min(self.bounds - self.coeffs @ p.probs))

    def contains(self, p: Distribution, tol: float = TOLERANCE) -> bool:
        return self.slack(p) >= -tol

    def max_linear(self, direction) -> tuple[float, Distribution]:
        """Maximize <direction, P> over the set; returns (value, argmax)."""
        d = np.asarray(direction, dtype=float)
        res = lp.solve_lp(
            -d, a_ub=self.coeffs, b_ub=self.bounds,
            a_eq=np.ones((1, self.dim)), b_eq=[1.0],
        )
        if not res.is_optimal:  # pragma: no cover - set is non-empty and bounded
            raise lp.SimplexError(f"linear optimization over constraint set: {res.status}")
        return -res.value, Distribution(np.clip(res.x, 0, None), atol=1e-6)

    def min_linear(self, direction) -> tuple[float, Distribution]:
        value, arg = self.max_linear(-np.asarray(direction, dtype=float))
        return -value, arg

    def vertices(self, tol: float = 1e-7) -> list[Distribution]:
        """Vertices of the polytope (set inequalities plus simplex facets)."""
        d = self.dim
        rows = [self.coeffs[i] for i in range(self.num_inequalities)]
        rhs = [self.bounds[i] for i in range(self.num_inequalities)]
        for k in range(d):
            e = np.zeros(d)
            e[k] = 1.0
            rows.append(-e)  # P(k) >= 0
            rhs.append(0.0)
        found: list[np.ndarray] = []
        for active in itertools.combinations(range(len(rows)), d - 1):
            a = np.vstack([np.ones(d)] + [rows[i] for i in active])
            b = np.array([1.0] + [rhs[i] for i in active])
            try:
                x = np.linalg.solve(a, b)
            except np.linalg.LinAlgError:
                continue
            if np.any(x < -tol):
                continue
            x = np.clip(x, 0.0, None)
            x /= x.sum()
            if self.num_inequalities and np.any(self.coeffs @ x > self.bounds + tol):
                continue
            if not any(np.abs(x - v).max() <= 1e-8 for v in found):
                found.append(x)
        return [Distribution(v, atol=1e-6) for v in found]

    def grid_points(self, resolution: int = 21) -> list[Distribution]:
        """Lattice points of the set at denominator resolution-1, plus vertices."""
        if resolution < 2:
            raise ValueError("resolution must be >= 2")
        denom = resolution - 1
        pts: list[np.ndarray] = []
        for comp in _compositions(denom, self.dim):
            x = np.asarray(comp, dtype=float) / denom
            if self.num_inequalities == 0 or np.all(
                self.coeffs @ x <= self.bounds + TOLERANCE
            ):
                pts.append(x)
        out = [Distribution(x) for x in pts]
        for v in self.vertices():
            if not any(v.close_to(u, 1e-9) for u in out):
                out.append(v)
        return out

    def __repr__(self) -> str:
        return f"ConstraintSet(dim={self.dim}, inequalities={self.num_inequalities})"


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@dataclass(frozen=True)
class WindowedAvcSpec:
    """A channel with convex type constraints enforced on sliding windows.

    With w_x = w_s = n this reduces to the windowless constrained channel.
    """

    x_alphabet: Alphabet
    s_alphabet: Alphabet
    y_alphabet: Alphabet
    channel: Channel
    gamma: ConstraintSet
    lam: ConstraintSet
    w_x: int
    w_s: int
    n: int

    def __post_init__(self):
        if self.channel.num_inputs != self.x_alphabet.size:
            raise ValueError("channel input dimension does not match x alphabet")
        if self.channel.num_states != self.s_alphabet.size:
            raise ValueError("channel state dimension does not match s alphabet")
        if self.channel.num_outputs != self.y_alphabet.size:
            raise ValueError("channel output dimension does not match y alphabet")
        if self.gamma.dim != self.x_alphabet.size:
            raise ValueError("gamma dimension does not match x alphabet")
        if self.lam.dim != self.s_alphabet.size:
            raise ValueError("lambda dimension does not match s alphabet")
        if not 1 <= self.w_x <= self.n:
            raise ValueError(f"w_x must satisfy 1 <= w_x <= n, got {self.w_x}")
        if not 1 <= self.w_s <= self.n:
            raise ValueError(f"w_s must satisfy 1 <= w_s <= n, got {self.w_s}")

    @property
    def alpha(self) -> float:
        """Window ratio w_s / w_x at this blocklength."""
        return self.w_s / self.w_x


def bitflip_spec(w: float, p: float, n: int, w_x: int, w_s: int) -> WindowedAvcSpec:
    """Binary XOR channel with weight caps w on inputs and p on states."""
    b = Alphabet(2)
    return WindowedAvcSpec(
        x_alphabet=b, s_alphabet=b, y_alphabet=b,
        channel=Channel.xor(),
        gamma=ConstraintSet.weight_cap(w),
        lam=ConstraintSet.weight_cap(p),
        w_x=w_x, w_s=w_s, n=n,
    )


def empirical_type(seq, alphabet: Alphabet) -> EmpiricalType:
    """Histogram of a symbol sequence as an EmpiricalType."""
    arr = np.asarray(seq, dtype=int)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("sequence must be non-empty and 1-D")
    if arr.min() < 0 or arr.max() >= alphabet.size:
        raise ValueError(
            f"symbols must lie in [0, {alphabet.size}), got range "
            f"[{arr.min()}, {arr.max()}]"
        )
    counts = np.bincount(arr, minlength=alphabet.size)
    return EmpiricalType(tuple(int(c) for c in counts), int(arr.size))


def binary_convolution(p: float, w: float) -> float:
    """p * w = p(1-w) + w(1-p)."""
    if not (0.0 <= p <= 1.0 and 0.0 <= w <= 1.0):
        raise ValueError(f"arguments must be probabilities, got {p}, {w}")
    return p * (1.0 - w) + w * (1.0 - p)


def entropy(d: Distribution) -> float:
    """Shannon entropy in bits, with the 0 log 0 = 0 convention."""
    p = d.probs
    nz = p > 0
    return float(-np.sum(p[nz] * np.log2(p[nz])))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"argument must be a probability, got {p}")
    return entropy(Distribution.bernoulli(p))


def induced_channel(q_s: Distribution, channel: Channel) -> np.ndarray:
    """Average out the state: V(y|x) = sum_s Q(s) W(y|x,s), shape (|X|, |Y|)."""
    if q_s.size != channel.num_states:
        raise ValueError("state distribution does not match channel")
    return np.einsum("s,xsy->xy", q_s.probs, channel.table)


def mutual_information(p_x: Distribution, q_s: Distribution, channel: Channel) -> float:
    """I(x; y) in bits under the product law P_x Q_s W(y|x,s)."""
    if p_x.size != channel.num_inputs:
        raise ValueError("input distribution does not match channel")
    v = induced_channel(q_s, channel)
    return _mi_from_induced(p_x.probs, v)


def _mi_from_induced(px: np.ndarray, v: np.ndarray) -> float:
    py = px @ v
    ratio = np.log2(np.maximum(v, LOG_FLOOR) / np.maximum(py, LOG_FLOOR)[None, :])
    terms = px[:, None] * v * ratio
    terms[v <= 0] = 0.0
    return max(float(terms.sum()), 0.0)


def block_channel_sample(x_seq, s_seq, channel: Channel, rng: np.random.Generator):
    """Sample the block channel output; each y_i ~ W(. | x_i, s_i) independently."""
    x = np.asarray(x_seq, dtype=int)
    s = np.asarray(s_seq, dtype=int)
    if x.shape != s.shape or x.ndim != 1:
        raise ValueError(f"input and state lengths differ: {x.shape} vs {s.shape}")
    rows = channel.table[x, s]  # (n, |Y|)
    u = rng.random(x.size)
    return (rows.cumsum(axis=1) < u[:, None]).sum(axis=1).astype(np.int8)


def member(p: Distribution, c: ConstraintSet, tol: float = TOLERANCE) -> tuple[bool, float]:
    """Membership with signed margin; the boundary counts as inside."""
    s = c.slack(p)
    return s >= -tol, s
