"""Pseudo-spectral incompressible Navier-Stokes on the 3-torus, with
critical-space norm instrumentation, a mild-solution fixed-point harness,
and executable decay-bound verifiers."""

__version__ = "0.1.0"
