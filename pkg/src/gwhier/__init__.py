"""Exact symbolic/numeric engine for the hydrodynamic hierarchy of a
small resolution of the conifold singularity and its dispersive lattice
deformation.

The pipeline: a catalog of genus-zero prepotentials and their hierarchy
(genus0), a differential-polynomial ring (jets, with a fast dict engine in
dpoly), the jet-order-raising D-operator and one-loop quasi-triviality
(dispersive), perturbative flow solutions with the genus-1/2 extraction
and the string/dilaton/recursion checks (flows), special functions
(special), exact scalar arithmetic (scalars), and an independent
partition-sum oracle for the invariants (oracle).
"""

__version__ = "0.1.0"

from . import (dispersive, dpoly, flows, genus0, jets, oracle,  # noqa: F401
               scalars, special)

__all__ = ["dispersive", "dpoly", "flows", "genus0", "jets", "oracle",
           "scalars", "special", "__version__"]
