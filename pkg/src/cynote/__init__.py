"""cynote: append-only electronic laboratory notebook service.

Record store with gapless numbering and multi-hash tamper evidence, full
audit logging, account/password controls, and built-in primer, sequence,
and statistics analysis.
"""

from .config import Config
from .service import CynoteService

__version__ = "0.1.0"

__all__ = ["Config", "CynoteService", "__version__"]
