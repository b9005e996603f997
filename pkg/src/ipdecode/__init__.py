"""Interior point decoding of LDPC codes over partial-response channels."""

from .channel import (
    PR_PRESETS,
    LinearVectorChannel,
    PRChannelSpec,
    objective,
    objective_gradient,
    objective_hessian_band,
    pr_to_linear,
    transmit,
)
from .code import (
    AlistError,
    Encoder,
    SparseParityCheck,
    build_encoder,
    check_parity,
    encode,
    load_alist,
    parse_alist,
    write_alist,
)
from .interior_point import (
    ConfigurationError,
    DecodeOutcome,
    DecoderParams,
    approx_gradient,
    approx_hessian,
    decode,
    initial_point,
    inner_loop_gradient,
    inner_loop_newton,
    line_search,
)
from .joint import JointMPDParams, PRTrellis, bcjr_extrinsic, build_trellis, joint_decode
from .minsum import minsum_decode, minsum_run, round_gamma
from .polytope import FeasibilityReport, barrier_value, feasibility, is_feasible
from .sim import BERSummary, SimConfig, bundled_code_path, dump_objective_trace, measure_throughput, run_sweep
from .solvers import BandedSymmetric, NotPositiveDefiniteError, SolverParams, cholesky_banded_solve, jacobi_ur_solve

__version__ = "0.1.0"
