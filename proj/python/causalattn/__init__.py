try:
    from ._causalattn import *  # noqa: F401,F403
    from ._causalattn import __doc__  # noqa: F401
except ImportError:  # running against a build tree on PYTHONPATH
    from _causalattn import *  # noqa: F401,F403
    from _causalattn import __doc__  # noqa: F401
