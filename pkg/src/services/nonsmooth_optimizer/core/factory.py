from __future__ import annotations

from typing import Dict, List, Type

from .base import SolverStrategy


class SolverFactory:
    """Registry of solver strategies keyed by name.

    Strategies register at import time; a stronger backend can be added at
    runtime with :meth:`register` and selected through SolverOptions.solver.
    """

    _registry: Dict[str, Type[SolverStrategy]] = {}

    @classmethod
    def register(cls, strategy: Type[SolverStrategy]) -> Type[SolverStrategy]:
        """Register a strategy class; usable as a class decorator."""
        cls._registry[strategy.solver_name()] = strategy
        return strategy

    @classmethod
    def create(cls, name: str) -> SolverStrategy:
        """
        Raises:
            ValueError: If no strategy is registered under ``name``
        """
        if name not in cls._registry:
            raise ValueError(f"Solver '{name}' is not registered; available: {cls.available()}")
        return cls._registry[name]()

    @classmethod
    def is_registered(cls, name: str) -> bool:
        return name in cls._registry

    @classmethod
    def available(cls) -> List[str]:
        return sorted(cls._registry)
