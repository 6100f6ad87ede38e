"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension ``_native`` (Cython) is preferred; if it is missing
(build skipped or failed) or the ``FERROCAL_PURE`` environment variable is
set to a non-empty value other than ``0``, the numpy implementation in
``_pure`` is used instead. Both backends produce bit-identical results.
"""

import os

if os.environ.get("FERROCAL_PURE", "0") not in ("", "0"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _native as _impl

        BACKEND = "native"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

protocol_sweep = _impl.protocol_sweep
monotone_keep_mask = _impl.monotone_keep_mask
