"""slotworld: object-slot world models under distribution shift.

Grid and gravitational environments, a contrastively trained slot encoder
with a graph transition network, attribute-split generators for
out-of-distribution testing, latent ranking metrics, and factorization
diagnostics -- all on a small self-contained tensor/autodiff core.
"""

__version__ = "0.1.0"
