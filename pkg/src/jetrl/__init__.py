"""Deterministic 2D fighter-jet RL engine with DDQN training and
counterfactual decision analysis."""

__version__ = "0.1.0"
