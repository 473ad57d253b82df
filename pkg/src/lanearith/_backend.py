"""Pick the kernel backend once, at import.

``LANEARITH_BACKEND`` may be ``auto`` (default), ``compiled`` or ``pure``.
``LANEARITH_SIMD=0`` keeps the compiled backend on its portable C paths.
"""
import os

from . import _pure

_choice = os.environ.get("LANEARITH_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "pure"):
    raise ImportError(f"LANEARITH_BACKEND must be auto, compiled or pure, not {_choice!r}")

try:
    from . import _core as compiled
except ImportError:
    compiled = None

if _choice == "compiled" and compiled is None:
    raise ImportError("LANEARITH_BACKEND=compiled but the extension is not built")

pure = _pure
impl = pure if (_choice == "pure" or compiled is None) else compiled

if compiled is not None and os.environ.get("LANEARITH_SIMD", "1") == "0":
    compiled.set_simd(False)

NAME = impl.NAME


def available():
    """Names of the backends importable in this process."""
    names = ["pure"]
    if compiled is not None:
        names.insert(0, "compiled")
    return names


def get(name):
    if name == "compiled":
        if compiled is None:
            raise ValueError("compiled backend is not available")
        return compiled
    if name == "pure":
        return pure
    raise ValueError(f"unknown backend {name!r}")
