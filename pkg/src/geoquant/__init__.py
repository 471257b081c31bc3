"""Exact geometric quantization on flat phase spaces.

Polynomial observables on R^2n or C^n, Hamiltonian vector fields and
Poisson brackets, prequantum operators, polarizations, Bargmann-Fock
spectra with half-form correction, and Cech cohomology of finite nerves.
"""

__version__ = "0.1.0"
