"""Exact characteristic-p geometry toolkit: finite-field function fields,
sparse chart algebras, Laurent series, derivations and their p-th powers,
1-forms with Cartier calculus, Frobenius descent of models, planar curve
certificates, rank-2 intersection lattices, and local point lifting."""

__version__ = "0.1.0"
