"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise, or when the
``LHVLAB_PURE_PYTHON`` environment variable is set to a non-empty value other
than ``0``, the numpy fallback is used. ``BACKEND`` names the active one.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
_forced = os.environ.get("LHVLAB_PURE_PYTHON", "") not in ("", "0")

if _compiled is not None and not _forced:
    _active: ModuleType = _compiled
    BACKEND = "compiled"
else:
    _active = _fallback
    BACKEND = "python"

tally_builtin = _active.tally_builtin
tally_values = _active.tally_values
dft_direct = _active.dft_direct


def available_backends() -> dict[str, ModuleType]:
    """Map of backend name to kernel module, for benchmarks and parity tests."""
    out = {"python": _fallback}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
