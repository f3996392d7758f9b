"""Backend selection for the hot loop.

The compiled extension is used when importable; setting ``ROBINBC_PURE_PYTHON=1``
forces the pure-Python recurrence.
"""

import os

from . import _numerov_py

python_numerov = _numerov_py.numerov

try:
    from ._numerov import numerov as compiled_numerov
except ImportError:  # extension not built
    compiled_numerov = None

if compiled_numerov is not None and os.environ.get("ROBINBC_PURE_PYTHON", "") in ("", "0"):
    numerov = compiled_numerov
    BACKEND = "compiled"
else:
    numerov = python_numerov
    BACKEND = "python"
