"""Attention-driven dynamic translation gain and psychometric threshold analysis."""

__version__ = "0.1.0"

from .attention import FRAME_DT, AttentionParams, AttentionState, Pose, attention_step, gaze_angle
from .batch import (
    BatchResult,
    SyntheticResponder,
    TrialPlan,
    TrialRecord,
    batch_run,
    simulate_group,
    t1_statistics,
)
from .controller import (
    GainController,
    GainProfileMode,
    Phase,
    apply_translation_gain,
    controller_step,
    physical_from_virtual,
    scheduled_gain,
)
from .psychometrics import (
    PsyFit,
    PsyParams,
    ResponseDataset,
    aic,
    bootstrap_ci,
    chi_square_2x2,
    cumulative_normal,
    fit_psychometric,
    neg_log_likelihood,
    psychometric_value,
    sse,
    thresholds,
)
from .sequencing import DEFAULT_GAINS, shuffle_gains
from .sim import (
    GazeScript,
    Group,
    Scenario,
    TrialTrace,
    gaze_script_preset,
    glance,
    instant_focus,
    linear_turn,
    never_look,
    run_trial,
)
