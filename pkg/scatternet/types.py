from dataclasses import dataclass, field
import os
from typing import Literal, TypedDict

from scatternet.core.exceptions import ScatternetConfigError


class CheckStatus:
    PASS = "PASS"
    FAIL = "FAIL"


class ExperimentStatus:
    PASSED = "PASSED"
    FAILED = "FAILED"
    # artifacts written, nothing asserted
    EMITTED = "EMITTED"


ExperimentStatusType = Literal["PASSED", "FAILED", "EMITTED"]


class CheckResult(TypedDict):
    """
    One line of a verification report.

    check_id (str): dotted id, `<module>.<property>`.
    status (str): PASS or FAIL.
    measured (float): value measured by the check.
    tolerance (float): bound the measured value is compared against.
    """

    check_id: str
    status: str
    measured: float
    tolerance: float


class ExperimentResult(TypedDict):
    experiment_id: str
    status: ExperimentStatusType
    output_dir: str
    artifacts: list[str]
    checks: list[CheckResult]


@dataclass
class ExperimentConfig:
    """Per-run parameters: experiment id, seed, output directory and typed `--param` values."""

    experiment_id: str
    seed: int
    output_dir: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seed is None or int(self.seed) != self.seed or self.seed < 0:
            raise ScatternetConfigError(f"Seed must be a non-negative integer, got {self.seed}")

    def get(self, name: str, default):
        value = self.params.get(name, default)
        if isinstance(default, bool):
            return bool(value)
        if isinstance(default, int) and not isinstance(value, int):
            raise ScatternetConfigError(f"Parameter {name} must be an integer, got {value!r}")
        if isinstance(default, float) and not isinstance(value, (int, float)):
            raise ScatternetConfigError(f"Parameter {name} must be a number, got {value!r}")
        if isinstance(default, float):
            return float(value)
        if isinstance(default, list) and not isinstance(value, list):
            return [float(value)]
        return value

    def path(self, file_name: str) -> str:
        return os.path.join(self.output_dir, file_name)
