"""Ball walks on the Rado graph and seeded G(inf, p) realizations.

Exact kernels and stationary measures with truncation-error accounting,
total-variation mixing behavior in iterated-log scale of the start state,
and the spectral-gap machinery: Dirichlet-Cheeger constants on graphs and
Hardy inequalities on measured trees.
"""

__version__ = "0.1.0"
