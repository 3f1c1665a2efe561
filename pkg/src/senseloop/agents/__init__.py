"""Two-agent analyze/refine pipeline with a pluggable model client."""

from .client import HttpModelClient, ModelClient, ModelConfig
from .mock import ARCHETYPES, mock_model
from .pipeline import (AnalysisResult, MethodKind, RefineResult, refine,
                       run_analysis, run_refinement)
from .planning import ACTIONS, PlannedEdit

__all__ = [
    "HttpModelClient", "ModelClient", "ModelConfig",
    "ARCHETYPES", "mock_model",
    "AnalysisResult", "MethodKind", "RefineResult", "refine",
    "run_analysis", "run_refinement",
    "ACTIONS", "PlannedEdit",
]
