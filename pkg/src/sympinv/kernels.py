"""Backend selection for the series kernels.

The compiled extension is used when it imported successfully and the
environment variable ``SYMPINV_PURE_PYTHON`` is not set to ``1``.  Both
backends are importable side by side (the benchmark compares them); this
module only decides which one the jet classes call.
"""

import os

from . import _kernels_py

_speedups = None
if os.environ.get("SYMPINV_PURE_PYTHON") != "1":
    try:
        from . import _speedups
    except ImportError:
        _speedups = None

if _speedups is not None:
    BACKEND = "compiled"
    mul1 = _speedups.mul1
    mul_table = _speedups.mul_table
else:
    BACKEND = "python"
    mul1 = _kernels_py.mul1
    mul_table = _kernels_py.mul_table


def backend_name():
    return BACKEND
