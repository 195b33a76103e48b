from soarsim.control.dlnt import dlnt_tune, history_frame, load_gains, local_search_step, save_gains
from soarsim.control.dominance import (
    Dominance,
    DominanceClassifier,
    dominance_label,
    non_dominated,
    train_dominance_classifier,
)
from soarsim.control.episode import DoubletSpec, doublet_episode, tune_autopilot
from soarsim.control.models import (
    ActionRecord,
    ChannelGains,
    CommandSet,
    DlntConfig,
    FrameKind,
    PidGains,
    PidState,
    TuningResult,
    gain_box,
)
from soarsim.control.pid import Autopilot, pid_step, tracking_errors, turn_rate_command, wrap_angle

__all__ = [
    "ActionRecord",
    "Autopilot",
    "ChannelGains",
    "CommandSet",
    "DlntConfig",
    "Dominance",
    "DominanceClassifier",
    "DoubletSpec",
    "FrameKind",
    "PidGains",
    "PidState",
    "TuningResult",
    "dlnt_tune",
    "dominance_label",
    "doublet_episode",
    "gain_box",
    "history_frame",
    "load_gains",
    "local_search_step",
    "non_dominated",
    "pid_step",
    "save_gains",
    "tracking_errors",
    "train_dominance_classifier",
    "tune_autopilot",
    "turn_rate_command",
    "wrap_angle",
]
