"""Python surface of the lattice action identity laboratory.

Everything is implemented in the compiled extension ``_actionlab``; this
package just re-exports it.  When the extension is installed inside the
package (wheel layout) it is imported relatively; during an in-tree build
it is found on ``PYTHONPATH`` as a top-level module.
"""

try:
    from ._actionlab import *  # noqa: F401,F403
    from ._actionlab import __version__  # noqa: F401
except ImportError:  # in-tree build: extension lives next to the build dir
    from _actionlab import *  # noqa: F401,F403
    from _actionlab import __version__  # noqa: F401
