"""Numerical laboratory for sharp space-time regularity of degenerate diffusion.

The compiled extension module carries the actual operations; this package
re-exports them.
"""

try:
    from pmelab._pmelab import *  # noqa: F401,F403  (wheel layout)
    from pmelab import _pmelab as _impl
except ImportError:  # build-tree layout: extension on PYTHONPATH
    from _pmelab import *  # noqa: F401,F403
    import _pmelab as _impl

__all__ = (
    "DomainError",
    "NumericalError",
    "averaging_exponents",
    "barenblatt_eval",
    "barenblatt_params",
    "barenblatt_sample",
    "barenblatt_support_radius",
    "barenblatt_threshold",
    "barenblatt_total_mass",
    "besov_space_norm",
    "l1_exponents",
    "l1_local_exponents",
    "power_local_exponents",
    "prescribed_p_exponents",
    "rho_exponents",
    "run_config",
    "scaling_admissible",
    "slobodeckii_seminorm",
    "sobolev_norm",
    "solve",
)

__version__ = "0.1.0"
