"""Exact engines for EO strata, Dieudonne modules, Newton strata, DL-type
varieties, lattice Hecke models and incidence complexes of unitary Shimura
varieties at an inert prime, signature (1, n-1)."""

__version__ = "0.1.0"
