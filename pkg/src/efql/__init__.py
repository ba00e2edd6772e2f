"""Fuzzy Q(lambda)-learning with fuzzified eligibility traces and segment replay.

Gaussian fuzzy partitions turn continuous state/action spaces into a compact
rule-pair table; TD credit flows through a clamped eligibility matrix and a
segment-based replay buffer that reconstructs traces inside each replayed
segment. A brute-force fuzzified Bellman operator verifies the contraction /
fixed-point behavior the learner relies on.
"""

from .agents import (
    AGENT_NAMES,
    AgentConfig,
    EnhancedFQLAgent,
    EpisodeLog,
    FuzzySARSAAgent,
    NStepFQLAgent,
    make_agent,
    run_episode,
)
from .config import ExperimentConfig, load_config
from .envs import (
    CartPoleEnv,
    CartPoleParams,
    ChainEnv,
    ChainMDP,
    cartpole_reset,
    cartpole_step,
    chain_step,
    default_chain,
)
from .fuzzy import (
    ActionPartition,
    DimensionPartition,
    PolicyDistribution,
    StatePartition,
    action_membership,
    build_action_partition,
    build_state_partition,
    defuzzify_action,
    fuzzy_value,
    greedy_indices,
    joint_state_membership,
    membership_1d,
    new_q_table,
    normalize_weights,
    policy_distribution,
    td_error_matrix,
)
from .kernels import BACKEND
from .metrics import RunSummary, compute_metrics
from .oracle import (
    FuzzifiedOperator,
    agent_vs_oracle,
    apply_operator,
    contraction_check,
    fixed_point,
    fixture_operator,
    make_operator,
)
from .replay import ReplayBuffer, Segment, Transition, replay_batch
from .traces import activation, apply_update, reset_traces, update_traces

__version__ = "0.1.0"
