"""Python interface to the integer quadratic programming solver."""

try:
    from ._iqp import *  # noqa: F401,F403  (installed wheel layout)
    from ._iqp import __doc__ as _doc
except ImportError:  # pragma: no cover - in-build layout
    from _iqp import *  # noqa: F401,F403
    from _iqp import __doc__ as _doc

__doc__ = _doc
