"""Hot-loop kernels for the flow right-hand side.

Two interchangeable backends provide the same API:

  _speed   Cython extension, built at install time
  _ref     pure NumPy mirror

The compiled backend is used when available; set SPHEREFLOW_PURE=1 to force
the NumPy fallback.  Both expose

  circle_speed(u, h, fam, k, l, r, p, want_diag, out)
  axisym_speed(u, cot_t, n, h, fam, k, l, r, p, want_diag, out)

returning (max_adiff, max_cadv, max_speed, min_kappa, min_kappa_node, min_F,
max_kappa).  The speed v/F^p is written into out; with want_diag = 0 the
step-control maxima are skipped (returned as nan).  When min_kappa <= 0 the
speed array is not usable and min_kappa_node is a witness node.
"""

import os

from . import _ref

FAM_MEAN = 0
FAM_ROOT = 1
FAM_POWER = 2
FAM_QUOTIENT = 3

if os.environ.get("SPHEREFLOW_PURE"):
    _backend = _ref
else:
    try:
        from . import _speed as _backend
    except ImportError:
        _backend = _ref

BACKEND = "speed" if _backend.__name__.endswith("_speed") else "ref"

circle_speed = _backend.circle_speed
axisym_speed = _backend.axisym_speed
