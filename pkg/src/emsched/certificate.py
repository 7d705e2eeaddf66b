from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundCertificate:
    """A makespan paired with a convex lower bound and the factor it must respect.

    The certificate holds when ``achieved <= factor * lower_bound + tolerance``.
    """

    algorithm: str
    lower_bound: float
    factor: float
    achieved: float
    tolerance: float = 1e-6

    @property
    def ratio(self) -> float:
        if self.lower_bound <= 0:
            return 1.0 if self.achieved <= self.tolerance else float("inf")
        return self.achieved / self.lower_bound

    @property
    def holds(self) -> bool:
        return self.achieved <= self.factor * self.lower_bound + self.tolerance

    def to_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "factor": self.factor,
            "achieved": self.achieved,
            "algorithm": self.algorithm,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def certificate_from_dict(obj: dict) -> BoundCertificate:
    return BoundCertificate(
        algorithm=str(obj["algorithm"]),
        lower_bound=float(obj["lower_bound"]),
        factor=float(obj["factor"]),
        achieved=float(obj["achieved"]),
    )
