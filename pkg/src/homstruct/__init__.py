"""Homogeneous Riemannian structure tensors on S^2 x R and H^2 x R.

The package is organised bottom-up:

- ``matlie``     exact small-matrix Lie algebras, brackets and ``exp``
- ``reductive``  Lie subspaces from Ad(H)-invariance and origin structure tensors
- ``diffgeo``    chart geometry: Christoffel symbols, curvature, covariant derivatives
- ``models``     the concrete spaces, their isometry groups and closed-form structures
- ``verifier``   Ambrose-Singer residuals, origin cross-checks, isomorphism search
- ``cli``        the ``homstruct`` command line
"""

__version__ = "0.1.0"
