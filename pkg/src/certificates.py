"""
Certificate values and their canonical JSON form.

A certificate is the only artifact that crosses runs: it carries the
homomorphism, the claim and every raw number needed to re-verify the claim
from scratch. JSON is canonical (sorted keys, integers only, schema version).
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from errors import GroupCohomologyError, UnsupportedInputError
from exact_linalg import IntMatrix
from group_model import GModule, GroupHom, GroupKind, GroupRingElement, GroupSpec, Word

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TOOLCHAIN = {"name": "grpcoho", "version": "0.1.0"}


class CertificateKind(Enum):
    CD_LOWER = "cd_lower"
    CD_UPPER = "cd_upper"
    CD_EXACT = "cd_exact"
    CD_INTERVAL = "cd_interval"
    CD_ZERO = "cd_zero"
    CAT_INFINITE = "cat_infinite"
    FACTORIZATION = "factorization"


@dataclass(frozen=True)
class Certificate:
    """Self-contained witness for one claim about a homomorphism."""

    kind: CertificateKind
    hom: GroupHom
    claims: Dict[str, Any]
    payload: Dict[str, Any]
    assumptions: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind.value,
            "hom": hom_to_dict(self.hom),
            "claims": self.claims,
            "payload": self.payload,
            "metadata": {"toolchain": dict(TOOLCHAIN), "assumptions": list(self.assumptions)},
        }
        _assert_exact(data, "certificate")
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Certificate":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise UnsupportedInputError(f"Unsupported certificate schema version {version}")
        _assert_exact(data, "certificate")
        try:
            return cls(
                kind=CertificateKind(data["kind"]),
                hom=hom_from_dict(data["hom"]),
                claims=data["claims"],
                payload=data["payload"],
                assumptions=tuple(data.get("metadata", {}).get("assumptions", [])),
            )
        except KeyError as e:
            raise UnsupportedInputError(f"Certificate is missing field {e}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise UnsupportedInputError(f"Certificate is not valid JSON: {e}")

    def summary(self) -> str:
        claims = ", ".join(f"{k}={v}" for k, v in sorted(self.claims.items()))
        return f"{self.kind.value} for {self.hom.describe()}: {claims}"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    """Itemized outcome of re-verifying a certificate."""

    kind: str
    checks: List[CheckResult] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(CheckResult(name, bool(passed), detail))
        if not passed:
            logger.warning(f"Check failed: {name} {detail}".rstrip())
        return bool(passed)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((c for c in self.checks if not c.passed), None)


def save_certificate(certificate: Certificate, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(certificate.to_json())
    logger.info(f"Wrote {certificate.kind.value} certificate to {path}")
    return path


def load_certificate(path: Path) -> Certificate:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Certificate file '{path}' not found")
    return Certificate.from_json(path.read_text())


def _assert_exact(obj: Any, where: str) -> None:
    if isinstance(obj, float):
        raise GroupCohomologyError(f"Floating point value in {where}")
    if isinstance(obj, dict):
        for key, value in obj.items():
            _assert_exact(value, f"{where}.{key}")
    elif isinstance(obj, (list, tuple)):
        for i, value in enumerate(obj):
            _assert_exact(value, f"{where}[{i}]")


# Serialization helpers shared by every engine that emits certificates.

def word_to_list(word: Word) -> List[List[int]]:
    return [[index, exponent] for index, exponent in word.letters]


def word_from_list(data: Sequence[Sequence[int]]) -> Word:
    return Word(tuple((int(i), int(e)) for i, e in data))


def group_to_dict(group: GroupSpec) -> Dict[str, Any]:
    data: Dict[str, Any] = {"kind": group.kind.value, "generators": list(group.generators)}
    if group.kind == GroupKind.CYCLIC:
        data["order"] = group.order
    if group.relators:
        data["relators"] = [word_to_list(r) for r in group.relators]
    return data


def group_from_dict(data: Dict[str, Any]) -> GroupSpec:
    kind = GroupKind(data["kind"])
    if kind == GroupKind.CYCLIC:
        return GroupSpec.cyclic(int(data["order"]), data["generators"][0])
    if kind == GroupKind.FREE:
        return GroupSpec.free(len(data["generators"]), data["generators"])
    return GroupSpec.finitely_presented(data["generators"], [word_from_list(r) for r in data.get("relators", [])])


def hom_to_dict(hom: GroupHom) -> Dict[str, Any]:
    return {
        "domain": group_to_dict(hom.domain),
        "codomain": group_to_dict(hom.codomain),
        "images": [word_to_list(w) for w in hom.images],
    }


def hom_from_dict(data: Dict[str, Any]) -> GroupHom:
    # Not re-validated here; verification re-checks what it needs.
    return GroupHom(
        group_from_dict(data["domain"]),
        group_from_dict(data["codomain"]),
        tuple(word_from_list(w) for w in data["images"]),
    )


def matrix_to_list(matrix: IntMatrix) -> Dict[str, Any]:
    return {"rows": matrix.rows, "cols": matrix.cols, "entries": list(matrix.entries)}


def matrix_from_list(data: Dict[str, Any]) -> IntMatrix:
    return IntMatrix(int(data["rows"]), int(data["cols"]), tuple(int(x) for x in data["entries"]))


def module_to_dict(module: GModule) -> Dict[str, Any]:
    return {
        "group": group_to_dict(module.group),
        "name": module.name,
        "relations": matrix_to_list(module.relations),
        "action": matrix_to_list(module.action),
    }


def module_from_dict(data: Dict[str, Any]) -> GModule:
    return GModule(
        group=group_from_dict(data["group"]),
        relations=matrix_from_list(data["relations"]),
        action=matrix_from_list(data["action"]),
        name=data.get("name", "M"),
    )


def ring_element_to_list(element: GroupRingElement) -> List[int]:
    return list(element.coefficients)


def ring_element_from_list(order: int, data: Sequence[int]) -> GroupRingElement:
    return GroupRingElement(order, tuple(int(x) for x in data))
