"""Exact intertwiners for mapping-class-invariant quantum torus representations.

Submodules:

- ``cyclotomic``: roots of unity and exact elements of Z[zeta_N]
- ``exactmat``: monomial and dense matrices over Z[zeta_N]
- ``quantum_torus``: theta basis, Chebyshev polynomials, SL(2, Z) action
- ``torus_rep``: the n-dimensional representations and invariant characters
- ``intertwiner``: intertwiner matrices, traces, Gauss sums, sweeps
- ``punctured_torus``: the once-punctured torus and its order-3 intertwiner
- ``harness`` / ``acceptance``: command line and acceptance suite
"""

__version__ = "0.1.0"
