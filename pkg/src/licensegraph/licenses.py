"""License fields, license categories and the pairwise incompatibility matrix."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Union

NONE_LABEL = "None"

PERMISSIVE = frozenset(
    {
        "MIT",
        "Apache-2.0",
        "BSD-2-Clause",
        "BSD-3-Clause",
        "ISC",
        "Unlicense",
        "Zlib",
        "CC0-1.0",
        "0BSD",
        "WTFPL",
    }
)

# Known SPDX ids beyond the permissive table, used only to restore the
# canonical spelling of case-mangled values ("mit" -> "MIT").
_EXTRA_KNOWN = (
    "Apache-1.1",
    "Artistic-2.0",
    "BSL-1.0",
    "CC-BY-4.0",
    "CC-BY-SA-4.0",
    "CDDL-1.0",
    "CDDL-1.1",
    "EPL-1.0",
    "EPL-2.0",
    "EUPL-1.2",
    "MS-PL",
    "OFL-1.1",
    "PostgreSQL",
    "Python-2.0",
    "Ruby",
) + tuple(
    f"{family}-{version}{suffix}"
    for family, versions in (
        ("GPL", ("1.0", "2.0", "3.0")),
        ("LGPL", ("2.0", "2.1", "3.0")),
        ("AGPL", ("1.0", "3.0")),
    )
    for version in versions
    for suffix in ("", "-only", "-or-later", "+")
) + ("MPL-1.0", "MPL-1.1", "MPL-2.0")

_CANONICAL = {name.lower(): name for name in (*PERMISSIVE, *_EXTRA_KNOWN)}


class LicenseCategory(enum.Enum):
    PERMISSIVE = "permissive"
    WEAKLY_PROTECTIVE = "weakly-protective"
    STRONGLY_PROTECTIVE = "strongly-protective"
    UNKNOWN = "unknown"
    NO_LICENSE = "no-license"


@dataclass(frozen=True)
class LicenseExpr:
    """A package license field: a disjunction of SPDX ids.

    The empty tuple is the no-license marker; use :data:`NO_LICENSE`.
    """

    alternatives: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.alternatives)) != len(self.alternatives):
            raise ValueError(f"duplicate license ids in {self.alternatives!r}")

    @property
    def is_none(self) -> bool:
        return not self.alternatives

    @property
    def label(self) -> str:
        return ",".join(self.alternatives) if self.alternatives else NONE_LABEL

    def __iter__(self) -> Iterator[str]:
        return iter(self.alternatives)

    def __len__(self) -> int:
        return len(self.alternatives)

    def __str__(self) -> str:
        return self.label


NO_LICENSE = LicenseExpr()


def normalize_id(token: str) -> str:
    token = token.strip()
    return _CANONICAL.get(token.lower(), token)


def parse_license_field(raw: str | None) -> LicenseExpr:
    """Parse a comma separated license field.

    Never fails: empty fields and the dataset's ``None`` label give
    :data:`NO_LICENSE`, unrecognised tokens are kept verbatim.
    """
    if not raw:
        return NO_LICENSE
    seen: dict[str, None] = {}
    for token in raw.split(","):
        token = normalize_id(token)
        if token:
            seen.setdefault(token, None)
    if not seen or list(seen) == [NONE_LABEL]:
        return NO_LICENSE
    seen.pop(NONE_LABEL, None)
    return LicenseExpr(tuple(seen))


def classify(license_id: str) -> LicenseCategory:
    if license_id == NONE_LABEL:
        return LicenseCategory.NO_LICENSE
    if license_id in PERMISSIVE:
        return LicenseCategory.PERMISSIVE
    if license_id.startswith(("LGPL-", "MPL-")):
        return LicenseCategory.WEAKLY_PROTECTIVE
    if license_id.startswith(("GPL-", "AGPL-")):
        return LicenseCategory.STRONGLY_PROTECTIVE
    return LicenseCategory.UNKNOWN


def is_agpl_family(license_id: str) -> bool:
    return license_id.startswith("AGPL-")


class RulesError(ValueError):
    """Malformed rules document."""

    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class CompatibilityMatrix:
    """Directed incompatibility facts ``(dependency license, dependent license)``.

    A fact ``(D, P)`` says that a package licensed ``P`` may not depend on a
    package licensed ``D``.
    """

    facts: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for dep, dependent in self.facts:
            if NONE_LABEL in (dep, dependent) or not dep or not dependent:
                raise ValueError(f"invalid fact ({dep!r}, {dependent!r})")

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, pair: object) -> bool:
        return pair in self.facts

    @property
    def license_ids(self) -> frozenset[str]:
        return frozenset(x for pair in self.facts for x in pair)

    def without(self, fact: tuple[str, str]) -> CompatibilityMatrix:
        return CompatibilityMatrix(self.facts - {fact})


def parse_rules(lines: Iterable[str]) -> CompatibilityMatrix:
    facts: set[tuple[str, str]] = set()
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts[0] != "incompatible":
            raise RulesError(lineno, f"unknown directive {parts[0]!r}")
        if len(parts) != 3 or not parts[1] or not parts[2]:
            raise RulesError(lineno, f"expected 'incompatible,<dependency>,<dependent>', got {line!r}")
        if NONE_LABEL in parts[1:]:
            raise RulesError(lineno, "facts may not reference the no-license marker")
        facts.add((parts[1], parts[2]))
    return CompatibilityMatrix(frozenset(facts))


def default_rules_path() -> Path:
    return Path(str(resources.files("licensegraph") / "data" / "incompatibilities.rules"))


def load_matrix(source: Union[str, Path, None] = None) -> CompatibilityMatrix:
    """Load a rules file; ``None`` loads the bundled one."""
    path = default_rules_path() if source is None else Path(source)
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh)


def is_pair_incompatible(matrix: CompatibilityMatrix, dependency: str, dependent: str) -> bool:
    return (dependency, dependent) in matrix.facts


def is_expr_incompatible(
    matrix: CompatibilityMatrix, dependency: LicenseExpr, dependent: LicenseExpr
) -> bool:
    """True only if every (dependency, dependent) license combination is incompatible.

    A missing license on either side never counts as a violation.
    """
    if dependency.is_none or dependent.is_none:
        return False
    facts = matrix.facts
    return all((d, p) in facts for d in dependency for p in dependent)


def is_agpl_caused(
    matrix: CompatibilityMatrix, dependency: LicenseExpr, dependent: LicenseExpr
) -> bool:
    return any(is_agpl_family(d) for d in dependency) and is_expr_incompatible(
        matrix, dependency, dependent
    )


def normalization_report(
    exprs: Iterable[LicenseExpr], matrix: CompatibilityMatrix | None = None
) -> Counter[str]:
    """Count license ids that are neither classified nor mentioned by the matrix.

    Such ids can never take part in a violation; a large tally usually means
    free-form license values in the input.
    """
    known = matrix.license_ids if matrix is not None else frozenset()
    unknown: Counter[str] = Counter()
    for expr in exprs:
        for lic in expr:
            if lic not in known and classify(lic) is LicenseCategory.UNKNOWN:
                unknown[lic] += 1
    return unknown
