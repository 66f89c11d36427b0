"""Exact numerics for Q-Fano threefolds of large Fano index.

Modules: ``basket`` (singularity baskets), ``rr`` (orbifold Riemann-Roch),
``candidates`` (enumeration and status table), ``links`` (Sarkisov-link
Diophantine analysis), ``wps`` (weighted projective models), ``cli``.
"""

__version__ = "0.1.0"
