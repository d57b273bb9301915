# audit
from .logger import RunAuditor, get_auditor

__all__ = ["RunAuditor", "get_auditor"]
