"""Equilibria of n-player multilinear games via tensor complementarity.

The package reformulates a multilinear game (one order-n payoff tensor
per player, utilities multilinear in the mixed strategies) as a tensor
complementarity problem, solves it with a damped smoothing Newton
method, and maps solutions back to certified equilibrium profiles.
"""

from .tensor import (
    DenseTensor,
    bar_permute,
    contract_all,
    contract_except,
    mode_product,
    power_contract,
)
from .game import (
    EquilibriumValues,
    MixedProfile,
    MultilinearGame,
    SplitMix64,
    auto_shift,
    best_response_gap,
    payoff_gradient,
    pure_profile,
    random_game,
    renormalize,
    shift,
    uniform_profile,
    utility,
)
from .tcp import (
    MemoryBudgetError,
    TcpInstance,
    assemble_big_tensor,
    eval_F,
    jacobian_F,
    join_blocks,
    residual,
    split_blocks,
)
from .solver import (
    LineSearchError,
    SingularSystemError,
    SolveReport,
    SolverConfig,
    TraceRecord,
    eval_H,
    jacobian_H,
    line_search,
    newton_direction,
    phi,
    solve,
)
from .bridge import (
    CorrespondenceResult,
    NonpositiveValueError,
    ZeroBlockError,
    certify,
    equilibrium_values,
    nash_to_tcp,
    tcp_to_nash,
)
from .driver import GameSolveResult, solve_game
from .games import battle_of_the_sexes, three_player_sample

__version__ = "0.1.0"

__all__ = [
    "DenseTensor", "mode_product", "contract_all", "contract_except",
    "bar_permute", "power_contract",
    "MultilinearGame", "MixedProfile", "EquilibriumValues", "SplitMix64",
    "utility", "payoff_gradient", "shift", "auto_shift", "best_response_gap",
    "random_game", "uniform_profile", "pure_profile", "renormalize",
    "TcpInstance", "split_blocks", "join_blocks", "eval_F", "jacobian_F",
    "residual", "assemble_big_tensor", "MemoryBudgetError",
    "SolverConfig", "SolveReport", "TraceRecord", "phi", "eval_H",
    "jacobian_H", "newton_direction", "line_search", "solve",
    "LineSearchError", "SingularSystemError",
    "NonpositiveValueError", "ZeroBlockError", "CorrespondenceResult",
    "equilibrium_values", "nash_to_tcp", "tcp_to_nash", "certify",
    "GameSolveResult", "solve_game",
    "battle_of_the_sexes", "three_player_sample",
]
