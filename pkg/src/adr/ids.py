"""Fresh identifier and display-name allocation.

Node, edge and forest-vertex identifiers are opaque integers drawn from a
monotone counter, so freshness is checkable: a newly issued id is strictly
greater than everything issued before it.  A tracked system owns its own
allocator (and serialises its state) so that replaying an event log
re-creates identical ids; ad-hoc construction uses the module-level session
allocator.
"""
from __future__ import annotations

import re


class IdGen:
    """Monotone integer id source."""

    def __init__(self, start: int = 0):
        self._next = start

    def fresh(self) -> int:
        value = self._next
        self._next += 1
        return value

    def observe(self, used: int) -> None:
        """Make sure future ids stay above an id seen in loaded data."""
        if used >= self._next:
            self._next = used + 1

    @property
    def state(self) -> int:
        return self._next

    def clone(self) -> "IdGen":
        return IdGen(self._next)


_STEM = re.compile(r"^([A-Za-z_]+?)(\d*)$")


class NameAllocator:
    """Sequential display names per alphabetic stem (f1, f2, u3, ...).

    Display names are presentation only; identity is always the integer id.
    """

    def __init__(self, counters: dict[str, int] | None = None):
        self._counters: dict[str, int] = dict(counters or {})

    def observe(self, name: str | None) -> None:
        if not name:
            return
        m = _STEM.match(name)
        if not m:
            return
        stem, digits = m.group(1), m.group(2)
        nxt = (int(digits) + 1) if digits else 1
        if nxt > self._counters.get(stem, 1):
            self._counters[stem] = nxt

    def fresh(self, hint: str | None) -> str:
        m = _STEM.match(hint) if hint else None
        stem = m.group(1) if m else "e"
        n = self._counters.get(stem, 1)
        self._counters[stem] = n + 1
        return f"{stem}{n}"

    @property
    def state(self) -> dict[str, int]:
        return dict(self._counters)

    def clone(self) -> "NameAllocator":
        return NameAllocator(self._counters)


class Allocator:
    """Bundle of an id source and a display-name source."""

    def __init__(self, ids: IdGen | None = None, names: NameAllocator | None = None):
        self.ids = ids if ids is not None else IdGen()
        self.names = names if names is not None else NameAllocator()

    def clone(self) -> "Allocator":
        return Allocator(self.ids.clone(), self.names.clone())


#: Default session-wide allocator used when the caller does not supply one.
session = Allocator()
