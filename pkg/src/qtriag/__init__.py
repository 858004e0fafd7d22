"""Verification workbench for a twisted quantum group of triangular matrices.

Subpackages:

* :mod:`qtriag.coeffs`    exact Gaussian-rational Laurent coefficients in s
* :mod:`qtriag.ncpoly`    noncommutative normal-ordering engine
* :mod:`qtriag.qgroup`    the deformed presentations and Hopf checks
* :mod:`qtriag.grouplab`  concrete groups, duals and bicharacters
* :mod:`qtriag.fintwist`  exact finite-model cocycle twisting
* :mod:`qtriag.spectra`   truncated operator models and spectra
* :mod:`qtriag.commands`  verification command registry (reports)
* :mod:`qtriag.service`   FastAPI wrapper
* :mod:`qtriag.cli`       thin command-line client
"""

__version__ = "0.1.0"
