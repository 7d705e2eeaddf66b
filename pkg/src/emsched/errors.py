"""Exception hierarchy shared by every module."""


class EmschedError(Exception):
    """Base class. ``kind`` is a short machine-readable tag."""

    kind = "error"


class InstanceError(EmschedError, ValueError):
    kind = "invalid-instance"


class ScheduleError(EmschedError, ValueError):
    kind = "invalid-schedule"


class BudgetUnachievable(EmschedError, ValueError):
    """Requested energy lies below the infimum of an energy function."""

    kind = "budget-unachievable"


class InfeasibleEnergy(EmschedError):
    """No finite duration vector meets the energy budget."""

    kind = "infeasible-energy"


class NonConvergence(EmschedError):
    kind = "non-convergence"


class BoundViolated(EmschedError):
    """A construction failed its approximation guarantee (an implementation bug)."""

    kind = "bound-violated"


class InstanceTooLarge(EmschedError, ValueError):
    kind = "instance-too-large"
