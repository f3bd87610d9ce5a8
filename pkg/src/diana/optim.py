"""Distributed proximal SGD with quantized gradient differences.

One round: the server broadcasts the iterate; every worker draws a
stochastic gradient, quantizes the difference against its local memory
vector, and uplinks the quantized message; the server averages the decoded
messages, adds its own copy of the memory average, takes a heavy-ball
proximal step, and both sides advance their memories by the same fraction
of what was transmitted. The memoryless baseline quantizes gradients
directly and never touches memory.

Randomness is replayable: worker i at iteration k draws from a Philox
stream keyed by (seed, i, k, purpose), purpose 0 for gradient noise and 1
for quantization, and quantization consumes exactly one uniform per
coordinate. Two runs with equal seeds are bit-identical, on one thread or
many.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .prox import Regularizer
from .quantize import BlockLayout, PNorm, QuantizedVector, decode, quantize

DIVERGENCE_GUARD = 1e12

_MASK64 = (1 << 64) - 1
_NOISE, _QUANT = 0, 1


def _pack_key(worker_id: int, iteration: int, purpose: int) -> int:
    if not 0 <= worker_id < (1 << 24):
        raise ValueError("worker_id out of key range")
    if not 0 <= iteration < (1 << 39):
        raise ValueError("iteration out of key range")
    return (worker_id << 40) | (purpose << 39) | iteration


def make_stream(
    seed: int, worker_id: int, iteration: int, purpose: int
) -> np.random.Generator:
    """Fresh Philox generator for one (worker, iteration, purpose) slot."""
    key = ((int(seed) & _MASK64) << 64) | _pack_key(worker_id, iteration, purpose)
    return np.random.Generator(np.random.Philox(key=key))


class StreamFactory:
    """Serial fast path for make_stream: one Philox reused via state reset.

    Returns the same Generator object every call, so a stream must be used
    up before the next one is requested; worker tasks running concurrently
    must call make_stream instead (the draws are identical either way).
    """

    __slots__ = ("seed", "_ph", "_gen")

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._ph = np.random.Philox(key=0)
        self._gen = np.random.Generator(self._ph)

    def stream(self, worker_id: int, iteration: int, purpose: int) -> np.random.Generator:
        self._ph.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.zeros(4, np.uint64),
                "key": np.array(
                    [_pack_key(worker_id, iteration, purpose), self.seed],
                    np.uint64,
                ),
            },
            "buffer": np.zeros(4, np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen


@dataclass(frozen=True)
class ConstantStepsize:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("stepsize must be positive")

    def at(self, k: int) -> float:
        return self.gamma


@dataclass(frozen=True)
class DecreasingStepsize:
    """gamma_k = 2 / (mu k + theta)."""

    mu: float
    theta: float

    def __post_init__(self):
        if not (self.mu > 0 and self.theta > 0):
            raise ValueError("need mu > 0 and theta > 0")

    def at(self, k: int) -> float:
        return 2.0 / (self.mu * k + self.theta)


@dataclass(frozen=True)
class DianaConfig:
    """Static description of one optimizer configuration."""

    n: int
    layout: BlockLayout
    p: PNorm
    alpha: float
    stepsize: ConstantStepsize | DecreasingStepsize
    beta: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one worker")
        if self.alpha < 0:
            raise ValueError("memory rate must be >= 0")
        if not 0 <= self.beta < 1:
            raise ValueError("momentum must lie in [0, 1)")
        if self.stepsize.at(0) <= 0:
            raise ValueError("schedule must yield positive stepsizes")


@dataclass
class WorkerState:
    worker_id: int
    h: np.ndarray
    seed: int


@dataclass
class ServerState:
    x: np.ndarray
    h: np.ndarray
    v: np.ndarray
    k: int = 0


@dataclass
class StepTelemetry:
    gamma: float
    g_hat: np.ndarray
    messages: Optional[list[QuantizedVector]] = field(default=None, repr=False)


def init_states(
    problem, config: DianaConfig, seed: int, x0=None, h0=None
) -> tuple[ServerState, list[WorkerState]]:
    """Fresh server/worker states; memories default to zero."""
    if config.n != problem.n:
        raise ValueError(f"config.n = {config.n} but problem has {problem.n} workers")
    if config.layout.total_dim != problem.dim:
        raise ValueError(
            f"layout covers {config.layout.total_dim} coordinates, problem has {problem.dim}"
        )
    x = np.zeros(problem.dim) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    if h0 is None:
        h0 = [np.zeros(problem.dim) for _ in range(config.n)]
    workers = [
        WorkerState(i, np.asarray(h0[i], dtype=np.float64).copy(), seed)
        for i in range(config.n)
    ]
    h_server = sum(w.h for w in workers) / config.n
    return ServerState(x, h_server, np.zeros(problem.dim), 0), workers


def _worker_payload(problem, config, server_x, worker, k, factory):
    if factory is None:
        noise_rng = make_stream(worker.seed, worker.worker_id, k, _NOISE)
    else:
        noise_rng = factory.stream(worker.worker_id, k, _NOISE)
    g = problem.sample_grad(server_x, worker.worker_id, noise_rng)
    delta = g - worker.h
    if factory is None:
        quant_rng = make_stream(worker.seed, worker.worker_id, k, _QUANT)
    else:
        quant_rng = factory.stream(worker.worker_id, k, _QUANT)
    return quantize(delta, config.layout, config.p, quant_rng)


def _baseline_payload(problem, config, server_x, worker, k, factory):
    if factory is None:
        noise_rng = make_stream(worker.seed, worker.worker_id, k, _NOISE)
    else:
        noise_rng = factory.stream(worker.worker_id, k, _NOISE)
    g = problem.sample_grad(server_x, worker.worker_id, noise_rng)
    if factory is None:
        quant_rng = make_stream(worker.seed, worker.worker_id, k, _QUANT)
    else:
        quant_rng = factory.stream(worker.worker_id, k, _QUANT)
    return quantize(g, config.layout, config.p, quant_rng)


def _gather(problem, config, server_x, workers, k, factory, executor, payload_fn):
    # Reduction is a fixed ascending-worker_id sum whether or not the
    # payloads were computed concurrently.
    if executor is None:
        return [
            payload_fn(problem, config, server_x, w, k, factory) for w in workers
        ]
    futures = [
        executor.submit(payload_fn, problem, config, server_x, w, k, None)
        for w in workers
    ]
    return [f.result() for f in futures]


def diana_step(
    server: ServerState,
    workers: list[WorkerState],
    problem,
    config: DianaConfig,
    reg: Regularizer | None = None,
    factory: StreamFactory | None = None,
    executor: ThreadPoolExecutor | None = None,
    keep_messages: bool = False,
) -> tuple[ServerState, list[WorkerState], StepTelemetry]:
    """One synchronous round of the gradient-difference method."""
    reg = reg or Regularizer()
    k = server.k
    gamma = config.stepsize.at(k)
    messages = _gather(
        problem, config, server.x, workers, k, factory, executor, _worker_payload
    )
    decoded = [decode(q) for q in messages]
    delta_mean = decoded[0].copy()
    for d in decoded[1:]:
        delta_mean += d
    delta_mean /= config.n
    new_workers = [
        WorkerState(w.worker_id, w.h + config.alpha * d, w.seed)
        for w, d in zip(workers, decoded)
    ]
    g_hat = server.h + delta_mean
    v = config.beta * server.v + g_hat
    x = reg.prox(gamma, server.x - gamma * v)
    h_server = server.h + config.alpha * delta_mean
    telemetry = StepTelemetry(gamma, g_hat, messages if keep_messages else None)
    return ServerState(x, h_server, v, k + 1), new_workers, telemetry


def baseline_step(
    server: ServerState,
    workers: list[WorkerState],
    problem,
    config: DianaConfig,
    reg: Regularizer | None = None,
    factory: StreamFactory | None = None,
    executor: ThreadPoolExecutor | None = None,
    keep_messages: bool = False,
) -> tuple[ServerState, list[WorkerState], StepTelemetry]:
    """One round of the memoryless baseline: gradients quantized directly.

    Consumes randomness identically to diana_step, so the two coincide
    bit for bit when the memory rate is zero and memories start at zero.
    """
    reg = reg or Regularizer()
    k = server.k
    gamma = config.stepsize.at(k)
    messages = _gather(
        problem, config, server.x, workers, k, factory, executor, _baseline_payload
    )
    decoded = [decode(q) for q in messages]
    g_hat = decoded[0].copy()
    for d in decoded[1:]:
        g_hat += d
    g_hat /= config.n
    v = config.beta * server.v + g_hat
    x = reg.prox(gamma, server.x - gamma * v)
    telemetry = StepTelemetry(gamma, g_hat, messages if keep_messages else None)
    return ServerState(x, server.h, v, k + 1), workers, telemetry


def lyapunov(
    server: ServerState, workers: list[WorkerState], problem, c: float, gamma: float
) -> float:
    """||x - x*||^2 + (c gamma^2 / n) sum_i ||h_i - h_i*||^2."""
    if problem.x_star is None or problem.h_star is None:
        raise ValueError("problem carries no optimum metadata")
    r = server.x - problem.x_star
    total = float(np.dot(r, r))
    weight = c * gamma * gamma / len(workers)
    for w, h_star in zip(workers, problem.h_star):
        e = w.h - h_star
        total += weight * float(np.dot(e, e))
    return total


@dataclass
class RunRecord:
    """One telemetry row; lyapunov and nonconvex_gap are populated only
    when the problem has optimum metadata and a memory weight was given,
    wall_time only on the final row of a seed."""

    seed: int
    k: int
    objective: float
    grad_norm: Optional[float]
    lyapunov: Optional[float]
    nonconvex_gap: Optional[float]
    bits_up: int
    diverged: bool = False
    wall_time: Optional[float] = None


def _diverged(x: np.ndarray) -> bool:
    # A non-finite entry makes the dot product non-finite, so one reduction
    # covers both the guard radius and the finiteness check.
    sq = float(np.dot(x, x))
    return not (sq <= DIVERGENCE_GUARD * DIVERGENCE_GUARD)


def run(
    problem,
    config: DianaConfig,
    reg: Regularizer | None = None,
    iterations: int = 1000,
    seeds=(0,),
    method: str = "diana",
    x0=None,
    h0=None,
    record_every: int = 1,
    record_grad_norm: bool = True,
    lyapunov_c: Optional[float] = None,
    channel=None,
    cost_model=None,
    threads: Optional[int] = None,
) -> list[RunRecord]:
    """Run the method for each seed and return telemetry rows.

    Rows are emitted at iteration 0, every record_every-th iteration, and
    the final one, strictly increasing in k within a seed. Uplink bits are
    cumulative actual encoded sizes and are only counted when a simnet
    channel is passed (encoding costs time). If the iterate diverges
    (non-finite or norm beyond 1e12) the seed stops with a flagged row.
    """
    import time

    from . import simnet  # late import: simnet pulls in the wire codec

    if method not in ("diana", "baseline"):
        raise ValueError(f"unknown method {method!r}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    step = diana_step if method == "diana" else baseline_step
    reg = reg or Regularizer()
    track_bits = channel is not None
    cost_model = cost_model or simnet.CostModel()
    records: list[RunRecord] = []

    for seed in seeds:
        t0 = time.perf_counter()
        server, workers = init_states(problem, config, seed, x0=x0, h0=h0)
        factory = StreamFactory(seed)
        executor = ThreadPoolExecutor(threads) if threads and threads > 1 else None
        bits_up = 0
        diverged = False

        def emit(final: bool = False):
            gamma = config.stepsize.at(server.k)
            has_opt = problem.x_star is not None and problem.h_star is not None
            V = (
                lyapunov(server, workers, problem, lyapunov_c, gamma)
                if (lyapunov_c is not None and has_opt)
                else None
            )
            gap = None
            if lyapunov_c is not None and has_opt and problem.f_star is not None:
                mem = sum(
                    float(np.dot(w.h - hs, w.h - hs))
                    for w, hs in zip(workers, problem.h_star)
                ) / len(workers)
                gap = (
                    problem.f(server.x)
                    - problem.f_star
                    + lyapunov_c * problem.constants.L * gamma * gamma / 2.0 * mem
                )
            records.append(
                RunRecord(
                    seed=seed,
                    k=server.k,
                    objective=problem.f(server.x) + reg.value(server.x),
                    grad_norm=(
                        float(np.linalg.norm(problem.grad(server.x)))
                        if record_grad_norm
                        else None
                    ),
                    lyapunov=V,
                    nonconvex_gap=gap,
                    bits_up=bits_up,
                    diverged=diverged,
                    wall_time=time.perf_counter() - t0 if final else None,
                )
            )

        try:
            emit()
            for k in range(iterations):
                server, workers, tel = step(
                    server,
                    workers,
                    problem,
                    config,
                    reg,
                    factory=factory if executor is None else None,
                    executor=executor,
                    keep_messages=track_bits,
                )
                if track_bits:
                    _, gathered = simnet.round_trip(
                        channel,
                        k,
                        problem.dim,
                        [(w.worker_id, q) for w, q in zip(workers, tel.messages)],
                        cost_model,
                    )
                    bits_up += gathered
                if _diverged(server.x):
                    diverged = True
                    emit(final=True)
                    break
                if server.k % record_every == 0 or server.k == iterations:
                    emit(final=server.k == iterations)
        finally:
            if executor is not None:
                executor.shutdown()
    return records
