"""Finite groups given by multiplication tables."""

from __future__ import annotations

import itertools
from typing import Sequence

from .findings import CheckReport


class GroupError(ValueError):
    pass


class Group:
    """Finite group on named elements; ``table[a][b]`` is the product ``ab``.

    ``spec`` records a generator recipe (``symmetric:n``, ``cyclic:n``) so
    datasets can store the group compactly.
    """

    def __init__(self, elements: Sequence[str], table: dict[str, dict[str, str]], identity: str, spec: str | None = None):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise GroupError("duplicate group element names")
        self.table = {a: dict(row) for a, row in table.items()}
        self.identity = identity
        self.spec = spec
        self._inverse: dict[str, str] = {}
        for a in self.elements:
            for b in self.elements:
                if self.table.get(a, {}).get(b) == identity:
                    self._inverse[a] = b
                    break

    def mul(self, a: str, b: str) -> str:
        try:
            return self.table[a][b]
        except KeyError:
            raise GroupError(f"product {a}*{b} missing from table") from None

    def inv(self, a: str) -> str:
        try:
            return self._inverse[a]
        except KeyError:
            raise GroupError(f"{a} has no inverse") from None

    def order(self, a: str) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
            if n > len(self.elements):
                raise GroupError(f"{a} has no finite order in the table")
        return n

    def generated_subgroup(self, gens: Sequence[str]) -> frozenset[str]:
        found = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in found:
                    found.add(y)
                    frontier.append(y)
        return frozenset(found)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"Group({self.spec or len(self.elements)})"

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_spec(cls, spec: str) -> "Group":
        kind, _, n = spec.partition(":")
        try:
            n_int = int(n)
        except ValueError:
            raise GroupError(f"bad group spec {spec!r}") from None
        if kind == "symmetric":
            return cls.symmetric(n_int)
        if kind == "cyclic":
            return cls.cyclic(n_int)
        raise GroupError(f"unknown group family {kind!r}")

    @classmethod
    def cyclic(cls, n: int) -> "Group":
        if n < 1:
            raise GroupError("cyclic group order must be positive")
        names = ["e"] + [f"g^{k}" if k > 1 else "g" for k in range(1, n)]
        table = {names[a]: {names[b]: names[(a + b) % n] for b in range(n)} for a in range(n)}
        return cls(names, table, "e", spec=f"cyclic:{n}")

    @classmethod
    def symmetric(cls, n: int) -> "Group":
        if n < 1:
            raise GroupError("symmetric group degree must be positive")
        perms = list(itertools.permutations(range(n)))
        names = {p: permutation_name(p) for p in perms}
        table = {
            names[a]: {names[b]: names[compose(a, b)] for b in perms}
            for a in perms
        }
        return cls([names[p] for p in perms], table, names[tuple(range(n))], spec=f"symmetric:{n}")

    # -- checks ------------------------------------------------------------
    def validate(self) -> CheckReport:
        rep = CheckReport()
        els = self.elements
        if self.identity not in els:
            rep.fail("group-identity", f"identity {self.identity!r} not an element")
            return rep
        for a in els:
            for b in els:
                c = self.table.get(a, {}).get(b)
                if c not in els:
                    rep.fail("group-closure", f"{a}*{b} = {c!r}")
        if rep.failures:
            return rep
        for a in els:
            if self.mul(self.identity, a) != a or self.mul(a, self.identity) != a:
                rep.fail("group-identity", a)
            if a not in self._inverse or self.mul(self._inverse[a], a) != self.identity:
                rep.fail("group-inverse", a)
        for a, b, c in itertools.product(els, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                rep.fail("group-associativity", f"({a},{b},{c})")
                break
        return rep


def compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """``(ab)(i) = a(b(i))``."""
    return tuple(a[b[i]] for i in range(len(a)))


def cycles(perm: Sequence[int]) -> list[tuple[int, ...]]:
    """All cycles (fixed points included) ordered by smallest element, 0-based."""
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        j = perm[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        out.append(tuple(cyc))
    return out


def permutation_name(perm: Sequence[int]) -> str:
    parts = ["(" + "".join(str(i + 1) for i in c) + ")" for c in cycles(perm) if len(c) > 1]
    return "".join(parts) or "e"


def parse_permutation(name: str, n: int) -> tuple[int, ...]:
    perm = list(range(n))
    if name == "e":
        return tuple(perm)
    for chunk in name.strip("()").split(")("):
        pts = [int(ch) - 1 for ch in chunk]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)
