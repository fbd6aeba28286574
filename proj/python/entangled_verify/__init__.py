from ._ev import *  # noqa: F401,F403
from ._ev import __doc__  # noqa: F401
