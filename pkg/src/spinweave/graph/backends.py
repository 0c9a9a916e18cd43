"""Kernel selection: compiled extension if present, pure Python otherwise.

The environment variable ``SPINWEAVE_GRAPH_BACKEND`` set to ``pure`` or
``compiled`` pins the choice; anything else (or unset) means automatic.
"""

from __future__ import annotations

import os

from ._pure import PureGraphKernel

ENV_VAR = "SPINWEAVE_GRAPH_BACKEND"


def _compiled_kernel():
    try:
        from . import _fastcore
    except ImportError:
        return None
    return _fastcore.FastGraphKernel


def available_backends() -> dict[str, type]:
    out = {"pure": PureGraphKernel}
    fast = _compiled_kernel()
    if fast is not None:
        out["compiled"] = fast
    return out


def select_backend(name: str | None = None) -> type:
    """Resolve a kernel class from an explicit name, the env var, or auto."""
    if name is None:
        name = os.environ.get(ENV_VAR, "") or "auto"
    name = name.strip().lower()
    backends = available_backends()
    if name == "auto":
        return backends.get("compiled", backends["pure"])
    try:
        return backends[name]
    except KeyError:
        raise ValueError(
            f"unknown graph backend {name!r}; have {sorted(backends)}"
        ) from None
