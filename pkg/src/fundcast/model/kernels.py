"""Kernel backend selection: compiled extension if built, numpy otherwise.

Set FUNDCAST_MLP_BACKEND to "python" or "compiled" to force a choice;
"compiled" raises if the extension is unavailable. Both backends are
deterministic given identical inputs.
"""

from __future__ import annotations

import os

from . import _mlp_numpy

_BACKENDS = {"python": _mlp_numpy}
try:
    from . import _mlp_kernel  # type: ignore[attr-defined]

    _BACKENDS["compiled"] = _mlp_kernel
except ImportError:
    _mlp_kernel = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str):
    if name not in _BACKENDS:
        raise ImportError(
            f"kernel backend {name!r} unavailable; built backends: {available_backends()}"
        )
    return _BACKENDS[name]


def active_backend() -> str:
    choice = os.environ.get("FUNDCAST_MLP_BACKEND", "auto")
    if choice == "auto":
        return "compiled" if "compiled" in _BACKENDS else "python"
    if choice not in _BACKENDS:
        raise ImportError(
            f"FUNDCAST_MLP_BACKEND={choice!r} but built backends are {available_backends()}"
        )
    return choice


def impl():
    return _BACKENDS[active_backend()]
