from __future__ import annotations


class SensitivityError(ArithmeticError):
    """The eigenvalue derivative is undefined (x^T (2 lambda M + C) x vanishes)."""

    def __init__(self, lam: complex, denominator: complex):
        super().__init__(f"eigenvalue {lam} is not simple: derivative denominator {denominator:.3e}")
        self.lam = lam
        self.denominator = denominator
