"""Stochastic integration engine with compiled and pure-Python backends.

The compiled kernel is preferred when its extension module imported cleanly;
otherwise the numpy reference implementation takes over with an identical
contract. BACKEND names the active choice ("compiled" or "python").
"""

from . import _reference
from .noise import trajectory_rng, wiener_increments

try:
    from . import _kernel as _active
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build environment
    _active = _reference
    BACKEND = "python"

sse_path = _active.sse_path
sme_path = _active.sme_path

__all__ = [
    "BACKEND",
    "sse_path",
    "sme_path",
    "trajectory_rng",
    "wiener_increments",
]
