"""Numerical construction of the singly periodic genus-one helicoid.

The package solves the two period conditions that select the surface inside a
two-parameter family of Weierstrass data on rhombic tori, evaluates the
resulting immersion, emits watertight triangle meshes of the translational
fundamental domain, and verifies the geometric properties of the surface
(boundary decomposition, graph property of the half-plane patch, convexity of
the projected gluing curve, helicoidal asymptotics).

Module map
----------
``params``         closed-form parameter relations (rho, lambda) -> (Lambda, r, R, T)
``quadrature``     tanh-sinh quadrature engine with endpoint-safe evaluation
``period_solver``  the two period integrals and the nested root solve
``torus``          rhombic-torus chart: lattice, branch data, named paths, symmetries
``weierstrass``    Weierstrass forms, path/contour integration, period checks
``mesh``           patch meshing, fundamental-domain assembly, exporters
``verify``         verification report over all computable surface claims
``cli``            command-line front end (solve / periods / mesh / curves / verify)
"""

from __future__ import annotations

__version__ = "0.1.0"

from .params import SurfaceParams  # noqa: F401

__all__ = ["SurfaceParams", "__version__"]
