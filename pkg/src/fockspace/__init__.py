"""Numerics for generalized Fock-Sobolev spaces.

Mittag-Leffler evaluation, Bergman kernels, weighted quadrature, norm
estimates, projections, covering lattices and an exact decision engine for
embedding and boundedness questions.
"""

__version__ = "0.1.0"
