"""Variable contexts.

A Context fixes the ambient polynomial ring: an ordered tuple of state
variables followed by an ordered tuple of parameters. Exponent vectors are
tuples aligned with ``ctx.names``. Monomials are compared in graded
lexicographic order (total degree over all variables first, then lex with
earlier names ranking higher), which keeps leading terms stable under
parameter extension.
"""

from __future__ import annotations

from .errors import ContextMismatch, UnknownVariable


def _check_names(names):
    seen = set()
    for n in names:
        if not n.isidentifier():
            raise UnknownVariable(f"invalid variable name {n!r}")
        if n in seen:
            raise UnknownVariable(f"duplicate variable name {n!r}")
        seen.add(n)


class Context:
    """Immutable variable context: state variables plus parameters."""

    __slots__ = ("state_vars", "params", "names", "_index")

    def __init__(self, state_vars, params=()):
        state_vars = tuple(state_vars)
        params = tuple(params)
        _check_names(state_vars + params)
        object.__setattr__(self, "state_vars", state_vars)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "names", state_vars + params)
        object.__setattr__(
            self, "_index", {n: i for i, n in enumerate(state_vars + params)}
        )

    def __setattr__(self, *_):
        raise AttributeError("Context is immutable")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def nstate(self) -> int:
        return len(self.state_vars)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def is_param_index(self, i: int) -> bool:
        return i >= len(self.state_vars)

    def __eq__(self, other):
        return (
            isinstance(other, Context)
            and self.state_vars == other.state_vars
            and self.params == other.params
        )

    def __hash__(self):
        return hash((self.state_vars, self.params))

    def __repr__(self):
        return f"Context(state={list(self.state_vars)}, params={list(self.params)})"

    def same(self, other: "Context") -> None:
        """Raise ContextMismatch unless other is this exact context."""
        if self != other:
            raise ContextMismatch(f"context mismatch: {self} vs {other}")

    def extend(self, state_vars=(), params=()) -> "Context":
        """New context with extra variables appended; existing names keep meaning."""
        for n in tuple(state_vars) + tuple(params):
            if n in self._index:
                raise UnknownVariable(f"variable {n!r} already declared")
        return Context(self.state_vars + tuple(state_vars), self.params + tuple(params))

    # -- monomial helpers ---------------------------------------------------

    def zero_exponent(self):
        return (0,) * self.nvars

    def unit_exponent(self, name: str):
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return tuple(e)

    def state_degree(self, exponent) -> int:
        ns = len(self.state_vars)
        return sum(exponent[:ns])

    @staticmethod
    def monomial_key(exponent):
        """Sort key realizing graded lex order (higher key = larger monomial)."""
        return (sum(exponent), exponent)

    def monomials_up_to(self, degree: int, state_only: bool = True):
        """All exponent vectors of total degree <= degree, descending order.

        With state_only, parameters get exponent 0 and the degree counts state
        variables only. Deterministic: sorted by monomial_key, largest first.
        """
        nvars = self.nvars
        active = range(self.nstate) if state_only else range(nvars)
        out = []

        def rec(pos_list, budget, current):
            if not pos_list:
                out.append(tuple(current))
                return
            i = pos_list[0]
            rest = pos_list[1:]
            for d in range(budget + 1):
                current[i] = d
                rec(rest, budget - d, current)
            current[i] = 0

        rec(list(active), degree, [0] * nvars)
        out.sort(key=self.monomial_key, reverse=True)
        return out
