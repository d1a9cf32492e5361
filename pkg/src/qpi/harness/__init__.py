"""Simulator, transcripts, exhaustive privacy accounting and the command line."""

from .privacy import (
    Check,
    PrivacyReport,
    binary_entropy,
    emit_report,
    enumeration_size,
    joint_cost_bound,
    mutual_information,
    privacy_report,
    publication_cost,
    tradeoff_check,
    user_privacy,
)
from .runner import MultiUserRun, Setup, StepError, run_multi_user, run_protocol, run_trials
from .transcript import PROTOCOL_IDS, Transcript, TranscriptError

__all__ = [
    "Check",
    "MultiUserRun",
    "PROTOCOL_IDS",
    "PrivacyReport",
    "Setup",
    "StepError",
    "Transcript",
    "TranscriptError",
    "binary_entropy",
    "emit_report",
    "enumeration_size",
    "joint_cost_bound",
    "mutual_information",
    "privacy_report",
    "publication_cost",
    "run_multi_user",
    "run_protocol",
    "run_trials",
    "tradeoff_check",
    "user_privacy",
]
