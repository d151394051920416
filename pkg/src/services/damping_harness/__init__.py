"""
Damping Harness Service

Batch front end over the damping services:
- Offline-stage precomputation and caching
- One-shot QEP spectra
- Scaling and accuracy benchmarks against dense solvers
- Multi-start viscosity optimization with CSV/JSON artifacts
"""

__version__ = "1.0.0"
