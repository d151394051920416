"""
QEP Solver Service

Online eigensolver for lambda^2 M + lambda C(v) + K: sequential rank-one
peeling through DPR1 problems with warm-started shifts, selective
eigenvectors with inverse-iteration refinement, and dense oracles.
"""
