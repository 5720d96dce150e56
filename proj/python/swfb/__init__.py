"""Rate regions and block-Markov simulation for two-way channels with switched feedforward."""

from ._core import (
    ConvergenceError,
    FeedforwardProfile,
    MacChannel,
    ResourceError,
    SchemeConfig,
    ValidationError,
    binary_adder,
    binary_xor,
    class_check,
    clopper_pearson,
    corollary_region,
    dsbs,
    example2,
    first_input_identity,
    ksp_sum_capacity,
    max_joint_mi,
    prop1_outer,
    prop2_inner,
    run_block_markov,
    run_no_feedback_baseline,
    theorem1_region,
    theorem1_threshold,
    two_way_sum_bounds,
)

__version__ = "0.1.0"
