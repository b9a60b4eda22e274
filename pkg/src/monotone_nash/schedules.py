"""Power-law schedules for step size, exploration noise, and regularization.

All sequences are indexed from t = 1: the power laws gamma(t) = t^-a,
sigma(t) = t^-b, epsilon(t) = t^-c are undefined at t = 0 and shifting
the index changes no asymptotics.  beta(t) = gamma(t) * sigma(t)^2 is the
effective step weight of the learner update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScheduleExponents:
    """Exponent triple (a, b, c) for step, exploration, and regularization."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"exponent {name} must be a positive finite number, got {value}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", float(self.c))


def as_exponents(value) -> ScheduleExponents:
    """Coerce a ScheduleExponents or (a, b, c) triple."""
    if isinstance(value, ScheduleExponents):
        return value
    a, b, c = value
    return ScheduleExponents(float(a), float(b), float(c))


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise ValueError("schedules are defined for t >= 1")
    return t


@dataclass(frozen=True)
class Schedule:
    """Evaluates the four schedule sequences at integer times t >= 1."""

    exponents: ScheduleExponents

    def gamma(self, t):
        return _check_t(t) ** -self.exponents.a

    def sigma(self, t):
        return _check_t(t) ** -self.exponents.b

    def epsilon(self, t):
        return _check_t(t) ** -self.exponents.c

    def beta(self, t):
        # kept as the literal product so beta == gamma * sigma**2 holds exactly
        return self.gamma(t) * self.sigma(t) ** 2


@dataclass(frozen=True)
class ConditionCheck:
    """One schedule admissibility condition, reduced to an exponent inequality."""

    key: str
    clause: str
    description: str
    inequality: str
    value: float
    passed: bool

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return f"({self.key}) {self.description}: needs {self.inequality} [value {self.value:.6g}] ... {verdict}"


@dataclass(frozen=True)
class ScheduleReport:
    exponents: ScheduleExponents
    checks: tuple[ConditionCheck, ...]

    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[ConditionCheck]:
        return [check for check in self.checks if not check.passed]

    def __str__(self):
        e = self.exponents
        lines = [f"schedule exponents a={e.a:.6g} b={e.b:.6g} c={e.c:.6g}"]
        lines += [str(check) for check in self.checks]
        lines.append("all conditions hold" if self.ok else "schedule is NOT admissible")
        return "\n".join(lines)


def validate_exponents(exponents) -> ScheduleReport:
    """Check the admissibility conditions for power-law schedules.

    Each condition on the infinite sums of beta, gamma^2, beta*sigma,
    beta*epsilon, and the relative regularization increments reduces, for
    power laws, to an inequality between the exponents.  A sum of t^-p
    diverges iff p <= 1, which fixes the strict/non-strict boundaries.
    """
    e = as_exponents(exponents)
    a, b, c = e.a, e.b, e.c
    checks = (
        ConditionCheck(
            key="a1",
            clause="a",
            description="total step weight diverges (sum of beta)",
            inequality="a + 2b <= 1",
            value=a + 2 * b,
            passed=a + 2 * b <= 1,
        ),
        ConditionCheck(
            key="a2",
            clause="a",
            description="regularization vanishes (epsilon -> 0)",
            inequality="c > 0",
            value=c,
            passed=c > 0,
        ),
        ConditionCheck(
            key="b",
            clause="b",
            description="relative regularization increments are summable",
            inequality="a + 2b + c < 1",
            value=a + 2 * b + c,
            passed=a + 2 * b + c < 1,
        ),
        ConditionCheck(
            key="c1",
            clause="c",
            description="squared step sizes are summable (sum of gamma^2)",
            inequality="a > 1/2",
            value=a,
            passed=a > 0.5,
        ),
        ConditionCheck(
            key="c2",
            clause="c",
            description="step-times-exploration is summable (sum of beta*sigma)",
            inequality="a + 3b > 1",
            value=a + 3 * b,
            passed=a + 3 * b > 1,
        ),
        ConditionCheck(
            key="d1",
            clause="d",
            description="exploration vanishes (sigma -> 0)",
            inequality="b > 0",
            value=b,
            passed=b > 0,
        ),
        ConditionCheck(
            key="d2",
            clause="d",
            description="regularized step weight diverges (sum of beta*epsilon)",
            inequality="a + 2b + c <= 1",
            value=a + 2 * b + c,
            passed=a + 2 * b + c <= 1,
        ),
    )
    return ScheduleReport(exponents=e, checks=checks)


#: Exponent triple used throughout as the default admissible schedule.
DEFAULT_EXPONENTS = ScheduleExponents(5.0 / 9.0, 5.0 / 27.0, 1.0 / 27.0)
