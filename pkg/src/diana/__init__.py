"""Distributed optimization with quantized gradient differences.

Workers compress the difference between fresh stochastic gradients and a
running memory vector with randomized block p-norm quantization; the
server reassembles an unbiased gradient estimate from the compressed
messages alone. The package bundles the quantizer and its exact moment
formulas, a bit-exact wire codec, the optimizer (with heavy-ball momentum
and decreasing-stepsize variants plus a memoryless baseline), closed-form
convergence-rate calculators, reference problems, and a deterministic
simulated parameter server.
"""

from .optim import (
    ConstantStepsize,
    DecreasingStepsize,
    DianaConfig,
    RunRecord,
    ServerState,
    StepTelemetry,
    WorkerState,
    baseline_step,
    diana_step,
    init_states,
    lyapunov,
    run,
)
from .prox import Box, ElasticNet, L1, Regularizer, SquaredL2
from .quantize import (
    BlockLayout,
    QuantizedVector,
    comm_cost_bound,
    decode,
    expected_sparsity,
    norm_ratio_floor,
    quantization_variance,
    quantize,
)
from .theory import (
    ProblemConstants,
    TheoryBounds,
    decreasing_bound,
    momentum_admissibility,
    momentum_bound,
    nonconvex_bound,
    optimal_nodes,
    select_decreasing,
    select_strongly_convex,
    strongly_convex_bound,
    validate_params,
)
from .wire import Bitstream, PrecisionLossError, WireFormatError, decode_wire, encode_wire

__version__ = "0.1.0"

__all__ = [
    "BlockLayout",
    "Bitstream",
    "Box",
    "ConstantStepsize",
    "DecreasingStepsize",
    "DianaConfig",
    "ElasticNet",
    "L1",
    "PrecisionLossError",
    "ProblemConstants",
    "QuantizedVector",
    "Regularizer",
    "RunRecord",
    "ServerState",
    "SquaredL2",
    "StepTelemetry",
    "TheoryBounds",
    "WireFormatError",
    "WorkerState",
    "baseline_step",
    "comm_cost_bound",
    "decode",
    "decode_wire",
    "decreasing_bound",
    "diana_step",
    "encode_wire",
    "expected_sparsity",
    "init_states",
    "lyapunov",
    "momentum_admissibility",
    "momentum_bound",
    "nonconvex_bound",
    "norm_ratio_floor",
    "optimal_nodes",
    "quantization_variance",
    "quantize",
    "run",
    "select_decreasing",
    "select_strongly_convex",
    "strongly_convex_bound",
    "validate_params",
]
