"""Numerical laboratory for sharp functional inequalities on needle spaces.

Weighted half-lines stand in for the one-dimensional pieces produced by
localization: a density h on [0, sup) with a synthetic curvature-dimension
bound.  The package checks, at desk scale, that the quadratic and weighted
quotient inequalities hold with their sharp constants exactly on volume
cones, that the extremal families attain them, and that the slack
diagnostics expose every non-cone.

Modules:

* ``space``       densities, distortion coefficients, geometric certificates
* ``quadrature``  adaptive half-line integration with declared decay
* ``functionals`` quotient reports, extremal families, moment identities
* ``variational`` family scans, quotient minimization, the rigidity verdict
* ``needles``     ensembles of rays, disintegration, two-step aggregation
* ``corpus``      the fixed density corpus used by tests and scripts
* ``cli``         command-line front end (``needlelab`` entry point)
"""

__version__ = "0.1.0"

from . import corpus, functionals, needles, quadrature, space, variational

__all__ = [
    "__version__",
    "corpus",
    "functionals",
    "needles",
    "quadrature",
    "space",
    "variational",
]
