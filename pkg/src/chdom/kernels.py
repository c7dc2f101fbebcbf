"""Backend selection for the numeric kernels.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python ``_pykernels`` module.  Setting ``CHDOM_PURE_PYTHON=1`` forces the
fallback.  Both expose the same functions:

``normalize``, ``matmul_normalized``, ``chain_product``, ``charpoly3``,
``cubic_roots``, ``eigvals3``, ``gelfand_log``.
"""

import os

from . import _pykernels

if os.environ.get("CHDOM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
LN2 = _pykernels.LN2

normalize = _impl.normalize
matmul_normalized = _impl.matmul_normalized
chain_product = _impl.chain_product
charpoly3 = _impl.charpoly3
cubic_roots = _impl.cubic_roots
eigvals3 = _impl.eigvals3
gelfand_log = _impl.gelfand_log


def available_backends():
    """Map backend name -> kernel module for every backend importable here."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
