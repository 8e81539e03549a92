"""Grid-path kernel selection.

Prefers the compiled Cython kernel and falls back to the pure-Python twin
when the extension is unavailable. Set TERRAGP_PURE_PYTHON=1 to force the
fallback (used by the benchmark and for debugging). Both implementations
return bit-identical results.
"""

import os

if os.environ.get("TERRAGP_PURE_PYTHON"):
    from ._gridpath_py import dijkstra_grid

    HAVE_COMPILED = False
else:
    try:
        from ._gridpath_c import dijkstra_grid

        HAVE_COMPILED = True
    except ImportError:
        from ._gridpath_py import dijkstra_grid

        HAVE_COMPILED = False

IMPLEMENTATION = "compiled" if HAVE_COMPILED else "pure-python"

__all__ = ["dijkstra_grid", "HAVE_COMPILED", "IMPLEMENTATION"]
