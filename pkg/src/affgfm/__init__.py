"""Generalized Frobenius manifolds on orbit spaces of affine Weyl groups.

The pipeline runs root data -> lambda-Fourier invariants -> pencil generators
-> flat pencil (g, eta) -> flat coordinates -> potential F, with exact
arithmetic throughout and numeric periods as the one floating point stage.
"""

__version__ = "0.1.0"
