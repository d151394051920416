"""
Frequency Objectives Service

Spectral abscissa, ellipse distance, semi-major-axis measure and barrier
functions, assembled into the two frequency-weighted damping models with
analytic gradients from eigenvalue perturbation theory.
"""
