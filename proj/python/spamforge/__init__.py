"""Python interface to the spam-forge simulation core."""

try:
    from ._spamforge import *  # noqa: F401,F403
    from ._spamforge import __doc__  # noqa: F401
except ImportError:  # development builds expose the module at top level
    from _spamforge import *  # noqa: F401,F403
