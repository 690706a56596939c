"""Exceptions shared across modules."""


class BudgetExceeded(RuntimeError):
    """A bounded search hit its element or evaluation cap."""

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeded budget of {cap}")
        self.what = what
        self.cap = cap
