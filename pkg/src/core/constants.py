from enum import Enum, IntEnum

TOOL_NAME = "paracheck"
TOOL_VERSION = "0.1.0"
REPORT_SCHEMA_VERSION = 1


class ExitStatus(IntEnum):
    PASSED = 0
    FAILED = 1
    INCONCLUSIVE = 2
    INPUT_ERROR = 3


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


UNCHECKED_HYPOTHESES = [
    "Coefficients of the operators are assumed infinitely smooth on the closed "
    "cylinder and on the lateral boundary; smoothness is not verified.",
    "Parabolicity verdicts are sampled evidence at finitely many points, not proofs.",
]
