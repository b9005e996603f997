"""Monte Carlo BER/BLER harness.

Every trial draws its codeword and noise from its own generator seeded by
``(seed, trial)``, so results do not depend on how trials are scheduled and
all SNR points see the same codewords and noise shapes (common random
numbers). Stopping is checked only at batch boundaries, which keeps a
parallel sweep identical to a serial one.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .channel import PRChannelSpec, parse_taps, snr_db_to_sigma2, transmit
from .code import SparseParityCheck, build_encoder, encode, load_alist
from .interior_point import DECODER_KINDS, ConfigurationError, DecoderParams, decode
from .joint import JointMPDParams, build_trellis, joint_decode
from .minsum import round_gamma

CSV_COLUMNS = (
    "snr_db", "trials", "bit_err_minsum", "bit_err_rounded", "block_err", "ber", "bler",
    "failures", "mean_inner_iters", "wall_sec", "blocks_per_sec",
)
ALL_DECODERS = (*DECODER_KINDS, "joint-mpd")
DEFAULT_CODE = "regular_204_102.alist"
# trial indices from here on are reserved for untimed warmup decodes
WARMUP_TRIAL = 1 << 62


def bundled_code_path(name: str = DEFAULT_CODE) -> Path:
    return Path(str(resources.files("ipdecode") / "data" / name))


def parse_snr_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive), a comma list, or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"SNR grid must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0.0 or stop < start:
            raise ConfigurationError("SNR grid needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


@dataclass(frozen=True)
class SimConfig:
    """One sweep: code, channel, SNR grid, decoder and stopping rule.

    A point stops once it has run at least ``trials`` trials and seen at
    least ``min_errors`` bit errors (min-sum scoring), or at ``max_trials``.
    ``max_trials`` defaults to ten times ``trials``.
    """

    code: str | Path = ""
    channel: str = "dicode"
    snr_db: tuple[float, ...] = (6.0,)
    decoder: str = "newton-cholesky"
    i_max: int = 5
    o_max: int = 5
    t0: float = 5.0
    alpha: float = 2.0
    kappa: float = 0.7
    lmax: int = 20
    omega: float = 0.8
    jacobi_iters: int = 30
    trials: int = 1000
    min_errors: int = 200
    max_trials: int | None = None
    seed: int = 0
    codewords: str = "random"
    out: str | Path | None = None
    trace: str | Path | None = None
    workers: int = 1
    batch: int = 100
    timing: bool = True

    def __post_init__(self):
        if not self.snr_db:
            raise ConfigurationError("SNR grid is empty")
        if self.decoder not in ALL_DECODERS:
            raise ConfigurationError(f"decoder must be one of {', '.join(ALL_DECODERS)}")
        if self.codewords not in ("zero", "random"):
            raise ConfigurationError("codewords must be 'zero' or 'random'")
        if self.trials < 1 or self.batch < 1 or self.workers < 1:
            raise ConfigurationError("trials, batch and workers must be >= 1")
        if self.min_errors < 0:
            raise ConfigurationError("min_errors must be >= 0")
        if self.max_trials is not None and self.max_trials < self.trials:
            raise ConfigurationError("max_trials must be >= trials")

    @property
    def trial_cap(self) -> int:
        return self.max_trials if self.max_trials is not None else 10 * self.trials

    @property
    def taps(self) -> tuple[float, ...]:
        return parse_taps(self.channel)

    def load_code(self) -> SparseParityCheck:
        return load_alist(self.code or bundled_code_path())

    def decoder_params(self) -> DecoderParams | JointMPDParams:
        if self.decoder == "joint-mpd":
            return JointMPDParams(kappa=self.kappa)
        return DecoderParams.for_decoder(
            self.decoder, self.i_max, self.o_max, t0=self.t0, alpha=self.alpha,
            minsum_kappa=self.kappa, minsum_lmax=self.lmax,
            omega=self.omega, jacobi_iters=self.jacobi_iters,
        )


@dataclass
class BERSummary:
    snr_db: float
    n: int
    trials: int = 0
    bit_err_minsum: int = 0
    bit_err_rounded: int = 0
    block_err: int = 0
    failures: int = 0
    inner_iters: int = 0
    wall_sec: float = 0.0
    trial_bit_errors: list[int] = field(default_factory=list, repr=False)

    @property
    def ber(self) -> float:
        return self.bit_err_minsum / (self.trials * self.n) if self.trials else 0.0

    @property
    def ber_rounded(self) -> float:
        return self.bit_err_rounded / (self.trials * self.n) if self.trials else 0.0

    @property
    def bler(self) -> float:
        return self.block_err / self.trials if self.trials else 0.0

    @property
    def mean_inner_iters(self) -> float:
        return self.inner_iters / self.trials if self.trials else 0.0

    @property
    def blocks_per_sec(self) -> float:
        return self.trials / self.wall_sec if self.wall_sec > 0.0 else 0.0

    def row(self, timing: bool = True) -> list[str]:
        wall = f"{self.wall_sec:.6f}" if timing else "nan"
        rate = f"{self.blocks_per_sec:.3f}" if timing else "nan"
        return [
            f"{self.snr_db:g}", str(self.trials), str(self.bit_err_minsum), str(self.bit_err_rounded),
            str(self.block_err), f"{self.ber:.6e}", f"{self.bler:.6e}", str(self.failures),
            f"{self.mean_inner_iters:.4f}", wall, rate,
        ]


# ---------------------------------------------------------------------------
# per-process trial context


class _Context:
    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.H = cfg.load_code()
        self.encoder = build_encoder(self.H) if cfg.codewords == "random" else None
        self.params = cfg.decoder_params()
        self.taps = cfg.taps
        self.trellis = None
        if cfg.decoder == "joint-mpd":
            self.trellis = build_trellis(PRChannelSpec(self.taps, 1.0))
        elif not self.H.row_regular or self.H.w_r < 3:
            raise ConfigurationError("interior point decoding needs a row-regular code with row weight >= 3")

    def spec(self, snr_db: float) -> PRChannelSpec:
        return PRChannelSpec(self.taps, snr_db_to_sigma2(self.taps, snr_db))

    def codeword(self, rng: np.random.Generator) -> np.ndarray:
        if self.encoder is None:
            return np.zeros(self.H.n, dtype=np.uint8)
        return encode(self.encoder, rng.integers(0, 2, self.encoder.k, dtype=np.uint8))

    def decode(self, spec: PRChannelSpec, r: np.ndarray):
        if self.trellis is not None:
            return joint_decode(self.H, spec, r, self.params, self.trellis)
        return decode(self.H, spec, r, self.params)

    def received(self, spec: PRChannelSpec, trial: int):
        rng = trial_rng(self.cfg.seed, trial)
        x = self.codeword(rng)
        return x, transmit(spec, x, rng)

    def run_trial(self, spec: PRChannelSpec, trial: int):
        x, r = self.received(spec, trial)
        out = self.decode(spec, r)
        err_ms = int(np.count_nonzero(out.tentative != x))
        if out.decoded:
            err_rd = err_ms
        else:
            err_rd = int(np.count_nonzero(round_gamma(out.final_point) != x))
        block = int(not out.decoded or err_ms > 0)
        return err_ms, err_rd, block, int(not out.decoded), out.iterations_used

    def trace_trial(self, spec: PRChannelSpec, trial: int) -> np.ndarray:
        _, r = self.received(spec, trial)
        params = replace(self.params, stop_on_codeword=False)
        return decode(self.H, spec, r, params).objective_trace


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


_WORKER: _Context | None = None


def _worker_init(cfg: SimConfig) -> None:
    global _WORKER
    _WORKER = _Context(cfg)


def _worker_chunk(args):
    snr_db, trials = args
    spec = _WORKER.spec(snr_db)
    return [_WORKER.run_trial(spec, t) for t in trials]


def _chunks(start: int, stop: int, parts: int):
    idx = list(range(start, stop))
    size = max(1, math.ceil(len(idx) / parts))
    return [idx[i : i + size] for i in range(0, len(idx), size)]


# ---------------------------------------------------------------------------
# sweeps


def run_sweep(cfg: SimConfig) -> list[BERSummary]:
    """Simulate every SNR point of ``cfg``; writes the CSV if ``cfg.out`` is set."""
    ctx = _Context(cfg)
    pool = ProcessPoolExecutor(cfg.workers, initializer=_worker_init, initargs=(cfg,)) if cfg.workers > 1 else None
    try:
        if pool is None:
            # warm the JIT outside the timed region
            ctx.run_trial(ctx.spec(cfg.snr_db[0]), WARMUP_TRIAL)
        summaries = [_run_point(ctx, snr, pool) for snr in cfg.snr_db]
    finally:
        if pool is not None:
            pool.shutdown()
    if cfg.out:
        write_csv(cfg.out, summaries, timing=cfg.timing)
    if cfg.trace:
        dump_objective_trace(cfg)
    return summaries


def _run_point(ctx: _Context, snr_db: float, pool) -> BERSummary:
    cfg = ctx.cfg
    spec = ctx.spec(snr_db)
    s = BERSummary(snr_db=snr_db, n=ctx.H.n)
    start = time.perf_counter()
    done = 0
    while done < cfg.trial_cap:
        stop = min(done + cfg.batch, cfg.trial_cap)
        if done < cfg.trials:
            stop = min(stop, cfg.trials)
        if pool is None:
            results = [ctx.run_trial(spec, t) for t in range(done, stop)]
        else:
            jobs = [(snr_db, chunk) for chunk in _chunks(done, stop, cfg.workers)]
            results = [res for part in pool.map(_worker_chunk, jobs) for res in part]
        for err_ms, err_rd, block, fail, iters in results:
            s.bit_err_minsum += err_ms
            s.bit_err_rounded += err_rd
            s.block_err += block
            s.failures += fail
            s.inner_iters += iters
            s.trial_bit_errors.append(err_ms)
        done = stop
        s.trials = done
        if done >= cfg.trials and s.bit_err_minsum >= cfg.min_errors:
            break
    s.wall_sec = time.perf_counter() - start
    return s


def write_csv(path: str | Path, summaries: list[BERSummary], timing: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in summaries:
            w.writerow(s.row(timing))


def read_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


# ---------------------------------------------------------------------------
# convergence traces and throughput


def collect_traces(cfg: SimConfig, snr_db: float | None = None, trials: int | None = None) -> np.ndarray:
    """Per-trial objective traces, shape (trials, i_max * o_max).

    Traces run every inner iteration: the min-sum exit is disabled so the
    optimizer's progress is recorded past the point where it would stop.
    """
    if cfg.decoder == "joint-mpd":
        raise ConfigurationError("joint MPD has no objective trace")
    ctx = _Context(cfg)
    spec = ctx.spec(cfg.snr_db[0] if snr_db is None else snr_db)
    trials = cfg.trials if trials is None else trials
    length = cfg.i_max * cfg.o_max
    out = np.empty((trials, length))
    for t in range(trials):
        out[t] = ctx.trace_trial(spec, t)
    return out


def dump_objective_trace(cfg: SimConfig, path: str | Path | None = None) -> np.ndarray:
    """Write the mean objective per inner iteration over ``cfg.trials`` trials.

    Columns are ``iteration, mean_f``; with more than one SNR point a leading
    ``snr_db`` column is added. Returns the mean traces, one row per SNR.
    """
    path = path or cfg.trace
    means = np.array([collect_traces(cfg, snr).mean(axis=0) for snr in cfg.snr_db])
    if path:
        multi = len(cfg.snr_db) > 1
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow((["snr_db"] if multi else []) + ["iteration", "mean_f"])
            for snr, mean in zip(cfg.snr_db, means):
                for it, v in enumerate(mean, start=1):
                    w.writerow(([f"{snr:g}"] if multi else []) + [it, f"{v:.10g}"])
    return means


def measure_throughput(cfg: SimConfig, trials: int | None = None, warmup: int = 20) -> float:
    """Blocks per second at ``cfg.snr_db[0]``, counting encoding, noise and decoding."""
    ctx = _Context(cfg)
    spec = ctx.spec(cfg.snr_db[0])
    trials = cfg.trials if trials is None else trials
    for t in range(warmup):
        ctx.run_trial(spec, WARMUP_TRIAL + t)
    start = time.perf_counter()
    for t in range(trials):
        ctx.run_trial(spec, t)
    return trials / (time.perf_counter() - start)


# ---------------------------------------------------------------------------
# config files


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out: dict[str, str] = {}
    known = {f.name for f in fields(SimConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        key = {"snr": "snr_db", "imax": "i_max", "omax": "o_max"}.get(key, key)
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def config_from_mapping(values: dict[str, object], base: SimConfig | None = None) -> SimConfig:
    """Coerce string values to SimConfig field types and apply them over ``base``."""
    base = base or SimConfig()
    kw: dict[str, object] = {}
    for key, value in values.items():
        if value is None:
            continue
        if isinstance(value, str):
            value = _coerce(key, value)
        kw[key] = value
    return replace(base, **kw)


def _coerce(key: str, value: str):
    if key == "snr_db":
        return parse_snr_grid(value)
    if key in ("i_max", "o_max", "lmax", "jacobi_iters", "trials", "min_errors", "seed", "workers", "batch"):
        return int(value)
    if key == "max_trials":
        return None if value.lower() in ("", "none") else int(value)
    if key in ("t0", "alpha", "kappa", "omega"):
        return float(value)
    if key == "timing":
        return value.lower() in ("1", "true", "yes", "on")
    return value
