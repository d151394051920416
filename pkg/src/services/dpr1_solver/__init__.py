"""
DPR1 Solver Service

Eigenvalues and eigenvectors of diagonal-plus-rank-one matrices through the
complex symmetric form, modified Rayleigh quotient iteration with a dynamic
step size, and deflation of every converged eigenvalue.
"""
