"""Kernel backend selection.

The compiled kernels are used when importable. Setting the environment
variable ``SASHADOW_BACKEND=python`` before import forces the pure-Python
fallback; ``SASHADOW_BACKEND=cython`` makes a missing extension an error.
"""
import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

_requested = os.environ.get("SASHADOW_BACKEND", "auto").lower()

if _requested == "python":
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        if _requested == "cython":
            raise
        log.info("compiled kernels unavailable, using the pure-Python fallback")
        kernels = _pykernels

BACKEND = kernels.NAME


def get_kernels(name=None):
    """Return a kernel module by name (``"python"``/``"cython"``), or the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
