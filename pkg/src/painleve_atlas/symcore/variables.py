"""Global variable registry.

Every symbol used anywhere in the package is registered here once, at import
time.  The registration order is the variable order used by the canonical
(graded lexicographic) monomial ordering and by the gcd recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Variable", "var", "variables", "is_registered", "UnknownVariableError"]


class UnknownVariableError(KeyError):
    """Raised when a name outside the registered alphabet is requested."""


def _chart_alphabet() -> list[str]:
    names = ["x", "y", "z", "w", "u", "v", "t", "xi"]
    names += [f"q{i}" for i in range(1, 5)] + [f"p{i}" for i in range(1, 5)]
    # charts produced by the first two blowups
    for k in (1, 2):
        names += [f"q_{k}", f"p_{k}", f"Q_{k}", f"P_{k}"]
    # double cover and blowdown
    names += ["r", "s", "R", "S", "r_2", "s_2"]
    # the six paired blowups
    for k in range(3, 9):
        names += [f"z_{k}", f"w_{k}", f"Z_{k}", f"W_{k}"]
        names += [f"u_{k}", f"v_{k}", f"U_{k}", f"V_{k}"]
    return names


_NAMES: tuple[str, ...] = tuple(_chart_alphabet())
_INDEX: dict[str, int] = {name: i for i, name in enumerate(_NAMES)}


@dataclass(frozen=True)
class Variable:
    """A registered symbol.  Equality is by name."""

    name: str

    def __post_init__(self) -> None:
        if self.name not in _INDEX:
            raise UnknownVariableError(self.name)

    @property
    def index(self) -> int:
        return _INDEX[self.name]

    def __repr__(self) -> str:
        return f"Variable({self.name!r})"

    def __str__(self) -> str:
        return self.name


def var(name: str) -> Variable:
    return Variable(name)


def variables(spec: str) -> tuple[Variable, ...]:
    """``variables("x y t")`` -> ``(Variable('x'), Variable('y'), Variable('t'))``."""
    return tuple(Variable(n) for n in spec.replace(",", " ").split())


def is_registered(name: str) -> bool:
    return name in _INDEX


def name_of(index: int) -> str:
    return _NAMES[index]


def index_of(name: str) -> int:
    try:
        return _INDEX[name]
    except KeyError:
        raise UnknownVariableError(name) from None
