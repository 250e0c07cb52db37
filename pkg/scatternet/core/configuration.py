from typing import Literal
import logging
import os

OUTPUT_ROOT_ENV = "SCATTERNET_OUT"
DEFAULT_OUTPUT_ROOT = "scatternet-out"


class ScatternetConfiguration:
    def __init__(
        self,
        output_root: str | None = None,
        seed: int = 0,
        parallel: bool = False,
        log_run_level: Literal["ERROR", "ALL", "NONE"] = "ERROR",
        logger: logging.Logger | None = None,
    ):
        self.output_root = output_root or os.environ.get(
            OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT
        )
        self.seed = seed
        self.parallel = parallel
        self.log_run_level = log_run_level
        self.logger = logger or logging.getLogger(__name__)

    def set_output_root(self, output_root: str):
        self.output_root = output_root

    def experiment_dir(self, experiment_id: str) -> str:
        return os.path.join(self.output_root, experiment_id)

    def __repr__(self):
        return (
            f"ScatternetConfiguration<output_root={self.output_root} seed={self.seed}>"
        )
