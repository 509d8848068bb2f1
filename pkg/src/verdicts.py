"""
Verdict values
Outcomes of checks and certificates, with the witness that justifies them
"""

from typing import Any, Dict, Optional


YES = "yes"
NO = "no"
YES_GENERICALLY = "yes-generically"
VERIFIED = "verified"
REFUTED = "refuted"
UNKNOWN = "unknown"
PASS = "pass"
FAIL = "fail"

STATUSES = (YES, NO, YES_GENERICALLY, VERIFIED, REFUTED, UNKNOWN, PASS, FAIL)
AFFIRMATIVE = (YES, YES_GENERICALLY, VERIFIED, PASS)


class Verdict:
    """The result of a single check"""

    def __init__(
        self,
        status: str,
        witness: Optional[Dict[str, Any]] = None,
        detail: str = "",
    ):
        if status not in STATUSES:
            raise ValueError(f"unknown verdict status: {status}")
        self.status = status
        self.witness = witness or {}
        self.detail = detail

    @property
    def ok(self) -> bool:
        return self.status in AFFIRMATIVE

    def to_dict(self) -> Dict[str, Any]:
        """Convert verdict to dictionary"""
        result: Dict[str, Any] = {'status': self.status}
        if self.witness:
            result['witness'] = self.witness
        if self.detail:
            result['detail'] = self.detail
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            return self.status == other
        return (
            isinstance(other, Verdict)
            and (self.status, self.witness, self.detail) == (other.status, other.witness, other.detail)
        )

    def __hash__(self) -> int:
        return hash(self.status)

    def __repr__(self) -> str:
        return f"Verdict({self.status}{', ' + str(self.witness) if self.witness else ''})"
