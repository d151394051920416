"""
Modal Precompute Service

Offline stage of the damped eigensolver: simultaneous diagonalization of
(M, K), perfect shuffle, 2x2 block diagonalization and the low-rank factors
U, Z, with an on-disk cache.
"""
