"""
Verdict records shared by every decision procedure

A verdict is Realizable (with a certificate), NotRealizable (with one or
more witnesses naming the rule that fired) or Unknown.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from core.errors import InvariantViolation


SCHEMA_VERSION = "nrz-verdict/1"


class Status(str, Enum):
    REALIZABLE = "realizable"
    NOT_REALIZABLE = "not_realizable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Witness:
    """One rule evaluation: identifier, supporting data and the result it rests on"""
    rule: str
    data: Dict[str, Any]
    citation: str

    def to_dict(self) -> Dict[str, Any]:
        return {"rule": self.rule, "data": self.data, "citation": self.citation}


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one necessary condition"""
    rule: str
    passed: bool
    applicable: bool
    data: Dict[str, Any]
    citation: str

    @property
    def fired(self) -> bool:
        return self.applicable and not self.passed

    def to_witness(self) -> Witness:
        return Witness(self.rule, self.data, self.citation)


@dataclass
class Verdict:
    status: Status
    witnesses: List[Witness] = field(default_factory=list)
    certificate: Optional[Dict[str, Any]] = None
    input: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status == Status.REALIZABLE and self.certificate is None:
            raise InvariantViolation("Realizable verdict without certificate")
        if self.status == Status.NOT_REALIZABLE and not self.witnesses:
            raise InvariantViolation("NotRealizable verdict without witness")
        if self.status == Status.NOT_REALIZABLE and self.certificate is not None:
            raise InvariantViolation("NotRealizable verdict carrying a certificate")

    @classmethod
    def realizable(cls, certificate: Dict[str, Any], input: Dict[str, Any] = None,
                   witnesses: List[Witness] = None) -> "Verdict":
        return cls(Status.REALIZABLE, list(witnesses or []), certificate, dict(input or {}))

    @classmethod
    def not_realizable(cls, witnesses: List[Witness], input: Dict[str, Any] = None) -> "Verdict":
        return cls(Status.NOT_REALIZABLE, list(witnesses), None, dict(input or {}))

    @classmethod
    def unknown(cls, input: Dict[str, Any] = None, witnesses: List[Witness] = None) -> "Verdict":
        return cls(Status.UNKNOWN, list(witnesses or []), None, dict(input or {}))

    @property
    def rules(self) -> List[str]:
        return [w.rule for w in self.witnesses]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "input": self.input,
            "status": self.status.value,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "certificate": self.certificate,
        }
