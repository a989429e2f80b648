"""Hot per-timestep kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernels`` takes over. Set
``SKYPLACE_BACKEND=python`` to force the fallback.
"""
import os
import types

from . import _pykernels

_FUNCS = ("link_gains", "network_step")


def _namespace(mod, name):
    ns = types.SimpleNamespace(name=name)
    for f in _FUNCS:
        setattr(ns, f, getattr(mod, f))
    return ns


PYTHON = _namespace(_pykernels, "python")

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
    CYTHON = None
else:
    CYTHON = _namespace(_ckernels, "cython")


def get_backend(name=None):
    """Return the kernel namespace ``name`` ('cython', 'python' or None for the default)."""
    if name is None:
        name = os.environ.get("SKYPLACE_BACKEND", "cython" if CYTHON is not None else "python")
    if name == "python":
        return PYTHON
    if name == "cython":
        if CYTHON is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return CYTHON
    raise ValueError(f"unknown kernel backend {name!r}")


DEFAULT = get_backend()
BACKEND = DEFAULT.name
link_gains = DEFAULT.link_gains
network_step = DEFAULT.network_step
