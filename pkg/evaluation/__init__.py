"""Evaluation module - grasp validity, accuracy reports and threshold sweeps."""
from .report import EvalReport, evaluate
from .sweep import threshold_sweep

__all__ = ['EvalReport', 'evaluate', 'threshold_sweep']
