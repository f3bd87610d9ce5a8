"""Deterministic single-process stand-in for the parameter-server network.

Counts exact bit volumes per direction using the real wire encoding of
every uplinked message; nothing is approximated. Downlink broadcasts are
dense float vectors and are only counted when the cost model says so.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .quantize import QuantizedVector
from .wire import encode_wire


class ChannelError(RuntimeError):
    """Encoding failure inside a round, attributed to a worker."""


@dataclass(frozen=True)
class CostModel:
    """float_bits is the scale-header/broadcast float width (32 or 64);
    broadcasts are free unless count_broadcast is set."""

    float_bits: int = 32
    count_broadcast: bool = False

    def __post_init__(self):
        if self.float_bits not in (32, 64):
            raise ValueError("float_bits must be 32 or 64")


@dataclass
class Message:
    iteration: int
    worker_id: int
    direction: str  # "up" or "down"
    bits: int


@dataclass
class Channel:
    """Accumulated traffic log of one simulated run."""

    broadcast_bits: int = 0
    gather_bits: int = 0
    log: list[Message] = field(default_factory=list)

    def record_broadcast(self, iteration: int, bits: int) -> None:
        self.broadcast_bits += bits
        self.log.append(Message(iteration, -1, "down", bits))

    def record_gather(self, iteration: int, worker_id: int, bits: int) -> None:
        self.gather_bits += bits
        self.log.append(Message(iteration, worker_id, "up", bits))

    def rounds(self) -> dict[int, int]:
        """Uplink bits per iteration."""
        per: dict[int, int] = {}
        for m in self.log:
            if m.direction == "up":
                per[m.iteration] = per.get(m.iteration, 0) + m.bits
        return per

    def dump_jsonl(self, path) -> None:
        """One JSON object per message, in transmission order."""
        with open(path, "w") as fh:
            for m in self.log:
                fh.write(
                    json.dumps(
                        {
                            "k": m.iteration,
                            "worker": m.worker_id,
                            "direction": m.direction,
                            "bits": m.bits,
                        }
                    )
                    + "\n"
                )


def round_trip(
    channel: Channel,
    iteration: int,
    dim: int,
    payloads: list[tuple[int, QuantizedVector]],
    cost_model: CostModel | None = None,
) -> tuple[int, int]:
    """Account one synchronous round; returns (broadcast, gather) bit deltas.

    The broadcast costs dim * float_bits when counted. Every worker payload
    is actually encoded (ascending worker_id) and its exact bit length
    logged; an encoder failure is re-raised as ChannelError naming the
    worker.
    """
    cost_model = cost_model or CostModel()
    broadcast = 0
    if cost_model.count_broadcast:
        broadcast = dim * cost_model.float_bits
        channel.record_broadcast(iteration, broadcast)
    gathered = 0
    for worker_id, q in sorted(payloads, key=lambda t: t[0]):
        try:
            nbits = len(encode_wire(q, float_bits=cost_model.float_bits))
        except Exception as exc:
            raise ChannelError(f"worker {worker_id}: {exc}") from exc
        channel.record_gather(iteration, worker_id, nbits)
        gathered += nbits
    return broadcast, gathered


@dataclass
class CompressionReport:
    per_round: list[float]
    cumulative: float


def compression_ratio(channel: Channel, baseline_bits_per_round: int) -> CompressionReport:
    """Baseline-over-actual uplink ratio, per round and cumulative.

    baseline_bits_per_round is what the uncompressed system would uplink
    in one round (for n workers of dimension d at width b: n * d * b).
    """
    if baseline_bits_per_round <= 0:
        raise ValueError("baseline must be positive")
    rounds = channel.rounds()
    per = [
        baseline_bits_per_round / bits if bits else float("inf")
        for _, bits in sorted(rounds.items())
    ]
    total = sum(rounds.values())
    cumulative = (
        baseline_bits_per_round * len(rounds) / total if total else float("inf")
    )
    return CompressionReport(per, cumulative)
