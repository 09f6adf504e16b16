"""Hot numeric kernels, bound to the numba or the numpy implementation.

The choice is made once at import time (see :mod:`aerocast._jit`). Both
implementations stay importable as ``kernels._numpy`` / ``kernels._numba``
for cross-checks and benchmarks.
"""

from .._jit import USE_NUMBA

if USE_NUMBA:
    from . import _numba as _impl
else:
    from . import _numpy as _impl

BACKEND = "numba" if USE_NUMBA else "numpy"

segment_sphere_roots = _impl.segment_sphere_roots
pairwise_distances = _impl.pairwise_distances
distance_matrix = _impl.distance_matrix
sticky_attachment = _impl.sticky_attachment
fifo_tree_transmit = _impl.fifo_tree_transmit
first_served_delivery = _impl.first_served_delivery

__all__ = [
    "BACKEND",
    "segment_sphere_roots",
    "pairwise_distances",
    "distance_matrix",
    "sticky_attachment",
    "fifo_tree_transmit",
    "first_served_delivery",
]
