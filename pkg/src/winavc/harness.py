"""Monte Carlo simulation driver: experiment configs, trial loops, sweeps.

Per-trial randomness is derived counter-mode from (master_seed, trial index)
so runs are bit-reproducible regardless of worker count.  The jammer only
ever receives public objects; when a strategy proposes an inadmissible state
sequence it forfeits the trial and a deterministic admissible fallback is
played instead (an adversary cannot play outside the model).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import jammers
from .capacity import list_capacity, windowed_capacity_verdict
from .codec import CodecParams, ThreePhaseCodec, build_three_phase_codec
from .core import (
    Alphabet,
    Channel,
    ConstraintSet,
    Distribution,
    WindowedAvcSpec,
    block_channel_sample,
)
from .symmetrize import ecn_symmetrizable

OUTCOMES = (
    "correct",
    "list-failure",
    "disambiguation-failure",
    "ambiguity",
    "wrong-message",
)

MAX_CRITERION_MESSAGE_CAP = 1 << 10


class ConfigError(ValueError):
    """The experiment configuration is malformed or inconsistent."""


@dataclass(frozen=True)
class JammerParams:
    kind: str  # "iid" | "spoof" | "symmetrize" | "none" | "custom"
    p_s: Distribution | None = None
    margin: float = 0.2  # iid default: back off the cap by this fraction
    rejection_cap: int = jammers.DEFAULT_REJECTION_CAP
    custom: object | None = None  # callable(rng, n) -> JamResult


@dataclass(frozen=True)
class ExperimentConfig:
    spec: WindowedAvcSpec
    code: CodecParams
    jammer: JammerParams
    trials: int
    master_seed: int
    error_criterion: str = "average"  # or "max"
    generation_failure_budget: int | None = None  # default max(10, trials // 10)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.error_criterion not in ("average", "max"):
            raise ConfigError(f"unknown error criterion {self.error_criterion!r}")

    @property
    def failure_budget(self) -> int:
        if self.generation_failure_budget is not None:
            return self.generation_failure_budget
        return max(10, self.trials // 10)


@dataclass(frozen=True)
class TrialRecord:
    index: int
    message_id: int
    keys: tuple[int, int]
    jam_rejections: int
    jam_forfeited: bool
    jam_generation_failed: bool
    list_size: int
    outcome: str


@dataclass
class RunStats:
    """Aggregated trial outcomes.

    err_max_est is the max over per-message empirical error rates for the
    one strategy that was run; the model's maximal error supremizes over
    all admissible strategies, so this (and any max over a configured
    strategy set) is a lower-bound estimate of it.
    """

    trials: int
    outcome_counts: dict
    err_avg: float
    err_max_est: float
    wilson_lo: float
    wilson_hi: float
    per_message: dict  # message_id -> (errors, trials)
    jam_forfeits: int
    jam_rejections_total: int
    jam_generation_failures: int
    build_stats: dict
    notes: list = field(default_factory=list)
    records: list = field(default_factory=list)


def wilson_interval(errors: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _trial_rng(master_seed: int, trial_index: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((master_seed, trial_index, stream)))


def build_codec_from_config(config: ExperimentConfig) -> tuple[ThreePhaseCodec, dict]:
    rng = np.random.default_rng(np.random.SeedSequence((config.master_seed, 0)))
    return build_three_phase_codec(
        config.code,
        config.spec.gamma,
        config.spec.lam,
        config.spec.channel,
        config.spec.w_s,
        rng,
    )


def _make_state_generator(config: ExperimentConfig, codec: ThreePhaseCodec):
    """Returns draw(rng) -> JamResult.  Sees only public code structure."""
    spec = config.spec
    jp = config.jammer
    n = codec.plan.total_length
    if jp.kind == "none":
        zeros = jammers.fallback_state_sequence(spec.s_alphabet.size, n, spec.w_s, spec.lam)
        return lambda rng: jammers.JamResult(zeros.copy(), True, 0)
    if jp.kind == "iid":
        p_s = jp.p_s
        if p_s is None:
            weight = np.ones(spec.lam.dim)
            weight[0] = 0.0
            cap, _ = spec.lam.max_linear(weight)
            if spec.lam.dim != 2:
                raise ConfigError("iid jammer without explicit p_s needs binary states")
            p_s = Distribution.bernoulli(cap * (1.0 - jp.margin))
        return lambda rng: jammers.iid_jammer(p_s, n, spec.w_s, spec.lam, rng, jp.rejection_cap)
    if jp.kind == "spoof":
        sampler = _public_codeword_sampler(codec)
        return lambda rng: jammers.spoof_jammer(sampler, n, spec.w_s, spec.lam, rng)
    if jp.kind == "symmetrize":
        # The symmetrizing map is derived from the public input law; the
        # dominant surviving phase-1 law is approximated by its sampler law.
        sym = ecn_symmetrizable(config.code.p_x, spec.channel, spec.lam)
        if not sym.feasible:
            raise ConfigError(
                "symmetrize jammer requested but the input law is not symmetrizable"
            )
        sampler = _public_codeword_sampler(codec)
        return lambda rng: jammers.symmetrize_jammer(
            sampler, sym.witness, n, spec.w_s, spec.lam, rng, jp.rejection_cap
        )
    if jp.kind == "custom":
        if not callable(jp.custom):
            raise ConfigError("custom jammer requires a callable")
        return lambda rng: jp.custom(rng, n)
    raise ConfigError(f"unknown jammer kind {jp.kind!r}")


def _public_codeword_sampler(codec: ThreePhaseCodec):
    """Uniform draw over the public encoder's possible transmissions."""

    def sample(rng: np.random.Generator) -> np.ndarray:
        m = codec.draw_message(rng)
        r1, r2 = codec.draw_keys(rng)
        return codec.encode(m, r1, r2, check_windows=False)

    return sample


def run_trials(
    config: ExperimentConfig,
    *,
    keep_records: bool = True,
    threads: int = 1,
    codec: ThreePhaseCodec | None = None,
    build_stats: dict | None = None,
) -> RunStats:
    """Build the code once, then simulate trials; deterministic per seed.

    Under the max criterion, messages are swept round-robin (exhaustively
    when the surviving message count is at most 2^10, else over a fixed
    seed-derived subset) so that per-message error estimates are balanced.
    """
    if codec is None:
        codec, build_stats = build_codec_from_config(config)
    draw_state = _make_state_generator(config, codec)
    spec = config.spec
    fallback = jammers.fallback_state_sequence(
        spec.s_alphabet.size, codec.plan.total_length, spec.w_s, spec.lam
    )
    notes = []

    if config.error_criterion == "max":
        if codec.message_count <= MAX_CRITERION_MESSAGE_CAP:
            message_pool = np.arange(codec.message_count)
        else:
            pool_rng = np.random.default_rng(
                np.random.SeedSequence((config.master_seed, 1))
            )
            message_pool = pool_rng.choice(
                codec.message_count, size=MAX_CRITERION_MESSAGE_CAP, replace=False
            )
            notes.append(
                f"max criterion over a fixed random subset of "
                f"{MAX_CRITERION_MESSAGE_CAP} of {codec.message_count} messages"
            )
    else:
        message_pool = None

    additive = spec.channel.is_binary_additive()

    def one_trial(i: int) -> TrialRecord:
        msg_rng = _trial_rng(config.master_seed, i, 2)
        key_rng = _trial_rng(config.master_seed, i, 3)
        jam_rng = _trial_rng(config.master_seed, i, 4)
        chan_rng = _trial_rng(config.master_seed, i, 5)
        if message_pool is not None:
            m_pos = int(message_pool[i % message_pool.size])
        else:
            m_pos = codec.draw_message(msg_rng)
        r1, r2 = codec.draw_keys(key_rng)
        x = codec.encode(m_pos, r1, r2)
        generation_failed = False
        try:
            jam = draw_state(jam_rng)
            forfeited = not jam.window_valid
            states = fallback if forfeited else jam.states
            rejections = jam.rejections
        except jammers.JammerGenerationError:
            # counted against the failure budget, not fatal per trial
            generation_failed = True
            forfeited = True
            states = fallback
            rejections = config.jammer.rejection_cap
        if additive:
            # admissible states can never exceed the decoder's budget ball,
            # so the true codeword always enters the pre-truncation list
            corruption = int(np.count_nonzero(states[: codec.plan.n1]))
            assert corruption <= codec.budget1.radius, (
                f"trial {i}: admissible corruption {corruption} exceeds the "
                f"decoding budget {codec.budget1.radius}"
            )
        y = block_channel_sample(x, states, spec.channel, chan_rng)
        result = codec.decode(y)
        sent_id = int(codec.message_ids[m_pos])
        if result.status == "empty-list":
            outcome = "list-failure"
        elif result.status == "no-survivor":
            outcome = "disambiguation-failure"
        elif result.status == "ambiguous":
            outcome = "ambiguity"
        elif result.message_id == sent_id:
            outcome = "correct"
        else:
            outcome = "wrong-message"
        return TrialRecord(
            index=i,
            message_id=sent_id,
            keys=(r1, r2),
            jam_rejections=rejections,
            jam_forfeited=forfeited,
            jam_generation_failed=generation_failed,
            list_size=result.list_size,
            outcome=outcome,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one_trial, range(config.trials)))
    else:
        records = [one_trial(i) for i in range(config.trials)]
    records.sort(key=lambda r: r.index)

    counts = {k: 0 for k in OUTCOMES}
    per_message: dict[int, list[int]] = {}
    forfeits = 0
    rejections = 0
    generation_failures = 0
    for rec in records:
        counts[rec.outcome] += 1
        err, tot = per_message.get(rec.message_id, (0, 0))
        per_message[rec.message_id] = (err + (rec.outcome != "correct"), tot + 1)
        forfeits += rec.jam_forfeited
        rejections += rec.jam_rejections
        generation_failures += rec.jam_generation_failed
    if generation_failures > config.failure_budget:
        raise jammers.JammerGenerationError(
            f"{generation_failures} trials exceeded the rejection cap "
            f"(budget {config.failure_budget}); the jammer law is incompatible "
            "with its window constraints"
        )

    errors = config.trials - counts["correct"]
    err_avg = errors / config.trials
    err_max = max(e / t for e, t in per_message.values())
    lo, hi = wilson_interval(errors, config.trials)
    return RunStats(
        trials=config.trials,
        outcome_counts=counts,
        err_avg=err_avg,
        err_max_est=err_max,
        wilson_lo=lo,
        wilson_hi=hi,
        per_message=per_message,
        jam_forfeits=forfeits,
        jam_rejections_total=rejections,
        jam_generation_failures=generation_failures,
        build_stats=build_stats or {},
        notes=notes,
        records=records if keep_records else [],
    )


# ---------------------------------------------------------------------------
# Parameter sweeps over the weight-constrained XOR family

SWEEP_COLUMNS = (
    "w", "p", "alpha", "n", "R", "c_list", "verdict",
    "err_avg", "err_max_est", "ci_lo", "ci_hi", "status",
)


def sweep(grid: dict) -> list[dict]:
    """Cross-product sweep over bit-flip cells; one row per cell.

    Grid keys: w, p (lists of weights), alpha (list, w_s = alpha*w_x), n
    (phase-1 lengths), w_x, message_bits, field_bits, p_x_weight (optional,
    defaults to w/3 rounded), jammer (list of kinds), trials (0 means
    capacity-only), seed.  Cell seeds derive from (seed, cell index).
    """
    ws = list(grid.get("w", [0.2]))
    ps = list(grid.get("p", [0.1]))
    alphas = list(grid.get("alpha", [1.0]))
    ns = list(grid.get("n", [256]))
    jam_kinds = list(grid.get("jammer", ["iid"]))
    trials = int(grid.get("trials", 0))
    seed = int(grid.get("seed", 0))
    w_x = int(grid.get("w_x", 64))
    message_bits = int(grid.get("message_bits", 4))
    field_bits = int(grid.get("field_bits", 4))

    rows = []
    cell_index = 0
    for w in ws:
        for p in ps:
            for alpha in alphas:
                for n in ns:
                    for jam in jam_kinds:
                        rows.append(
                            _sweep_cell(
                                w, p, alpha, n, jam, trials, seed, cell_index,
                                w_x, message_bits, field_bits,
                                grid.get("p_x_weight"),
                            )
                        )
                        cell_index += 1
    return rows


def _sweep_cell(
    w, p, alpha, n, jam_kind, trials, seed, cell_index,
    w_x, message_bits, field_bits, p_x_weight,
) -> dict:
    row = {
        "w": w, "p": p, "alpha": alpha, "n": n, "R": float("nan"),
        "c_list": float("nan"), "verdict": "", "err_avg": float("nan"),
        "err_max_est": float("nan"), "ci_lo": float("nan"),
        "ci_hi": float("nan"), "status": "ok",
    }
    try:
        w_s = round(alpha * w_x)
        if abs(w_s - alpha * w_x) > 1e-9 or not 1 <= w_s <= w_x:
            raise ConfigError(f"alpha={alpha} does not give an integer w_s <= w_x")
        spec = WindowedAvcSpec(
            x_alphabet=Alphabet(2), s_alphabet=Alphabet(2), y_alphabet=Alphabet(2),
            channel=Channel.xor(),
            gamma=ConstraintSet.weight_cap(w), lam=ConstraintSet.weight_cap(p),
            w_x=w_x, w_s=w_s, n=n,
        )
        cres = list_capacity(spec.gamma, spec.lam, spec.channel)
        row["c_list"] = cres.value
        row["verdict"] = windowed_capacity_verdict(spec).status
        if trials > 0:
            px = p_x_weight if p_x_weight is not None else round(w / 3, 3)
            code = CodecParams(
                layout="thm1", n1=n, w_x=w_x, message_bits=message_bits,
                field_bits=field_bits, p_x=Distribution.bernoulli(px),
            )
            config = ExperimentConfig(
                spec=spec, code=code,
                jammer=JammerParams(kind=jam_kind),
                trials=trials,
                master_seed=int(
                    np.random.SeedSequence((seed, cell_index)).generate_state(1)[0]
                ),
            )
            codec, build_stats = build_codec_from_config(config)
            row["R"] = math.log2(codec.message_count) / codec.plan.n1
            stats = run_trials(config, keep_records=False, codec=codec,
                               build_stats=build_stats)
            row["err_avg"] = stats.err_avg
            row["err_max_est"] = stats.err_max_est
            row["ci_lo"] = stats.wilson_lo
            row["ci_hi"] = stats.wilson_hi
    except Exception as exc:  # per-cell failures land in the status column
        row["status"] = f"error: {exc}"
    return row


def format_csv(rows: list[dict], columns=SWEEP_COLUMNS) -> str:
    """Render rows as CSV with floats at 6 significant digits."""
    def fmt(v):
        if isinstance(v, float):
            return "" if math.isnan(v) else f"{v:.6g}"
        return str(v)

    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(row.get(c, "")) for c in columns))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON config loading


def _parse_constraints(entries, dim: int) -> ConstraintSet:
    return ConstraintSet(dim, [(e["coeffs"], e["bound"]) for e in entries])


def _parse_distribution(value) -> Distribution:
    if isinstance(value, dict):
        return Distribution.bernoulli(float(value["weight"]))
    return Distribution(value)


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from the JSON document layout.

    Top-level keys: alphabets {x, s, y}, channel (row-major |X|*|S| rows of
    |Y| probabilities), gamma, lambda (lists of {coeffs, bound}), windows
    {w_x, w_s}, code {...}, jammer {...}, trials, seed, criterion.
    """
    try:
        sizes = doc["alphabets"]
        nx, ns, ny = int(sizes["x"]), int(sizes["s"]), int(sizes["y"])
        table = np.asarray(doc["channel"], dtype=float).reshape(nx, ns, ny)
        channel = Channel(table)
        gamma = _parse_constraints(doc["gamma"], nx)
        lam = _parse_constraints(doc["lambda"], ns)
        wins = doc["windows"]
        code_doc = dict(doc["code"])
        layout = code_doc.pop("layout", "thm1")
        code_doc.pop("w_x", None)
        for key in ("p_x", "key_type", "guard_type", "t1", "t2"):
            if key in code_doc and code_doc[key] is not None:
                code_doc[key] = _parse_distribution(code_doc[key])
        code = CodecParams(layout=layout, w_x=int(wins["w_x"]), **code_doc)
        jam_doc = dict(doc.get("jammer", {"kind": "none"}))
        if jam_doc.get("p_s") is not None:
            jam_doc["p_s"] = _parse_distribution(jam_doc["p_s"])
        jammer = JammerParams(**jam_doc)
        trials = int(doc.get("trials", 1))
        seed = int(doc.get("seed", 0))
        criterion = doc.get("criterion", "average")

        # Total blocklength is known only after planning; build a provisional
        # plan to size the windowed-channel instance.
        probe = code
        n_total = doc.get("n")
        if n_total is None:
            from .codec import make_phase_plan_thm1, make_phase_plan_thm2

            if layout == "thm1":
                plan = make_phase_plan_thm1(
                    probe.n1, probe.w_x,
                    probe.key_len if probe.key_len is not None else 2 * probe.w_x,
                )
            else:
                plan = make_phase_plan_thm2(
                    probe.n1, probe.w_x, probe.alpha, probe.lam_frac,
                    probe.key_len if probe.key_len is not None else 2 * probe.w_x,
                )
            n_total = plan.total_length
        spec = WindowedAvcSpec(
            x_alphabet=Alphabet(nx), s_alphabet=Alphabet(ns), y_alphabet=Alphabet(ny),
            channel=channel, gamma=gamma, lam=lam,
            w_x=int(wins["w_x"]), w_s=int(wins["w_s"]), n=int(n_total),
        )
        return ExperimentConfig(
            spec=spec, code=code, jammer=jammer, trials=trials,
            master_seed=seed, error_criterion=criterion,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad experiment config: {exc}") from exc


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))
