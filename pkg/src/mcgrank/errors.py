"""Exception hierarchy.

Every error carries the name of the module that raised it so the CLI can
print a single ``module: message`` diagnostic.
"""

from __future__ import annotations


class MCGError(Exception):
    module = "mcgrank"

    def __str__(self) -> str:
        return f"{self.module}: {super().__str__()}"


class TopologyError(MCGError, ValueError):
    module = "topology"


class KernelError(MCGError, ValueError):
    module = "kernels"


class RegionError(MCGError, ValueError):
    module = "regions"


class FormulaError(MCGError, ValueError):
    module = "formula"


class GraphError(MCGError, ValueError):
    module = "graphcore"


class BudgetError(MCGError, RuntimeError):
    """A configured size/complexity cap was exceeded."""

    def __init__(self, module: str, message: str):
        super().__init__(message)
        self.module = module
