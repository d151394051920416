from __future__ import annotations

# Import and register all solver strategies
from .base import SolverStrategy
from .factory import SolverFactory
from .penalty_bfgs import PenaltyBfgsSolver

# This ensures the built-in solver is registered with the factory
