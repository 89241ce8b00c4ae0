"""Runtime configuration shared by the engines."""

import os

DEFAULT_BUDGET = 10**7
BUDGET_ENV = "BRANCHLAB_BUDGET"


class BudgetExceeded(RuntimeError):
    """An enumeration would materialize more elements than the budget allows."""


def element_budget(budget=None):
    """Resolve an element budget: explicit value, then env var, then default."""
    if budget is not None:
        return int(budget)
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    return DEFAULT_BUDGET
