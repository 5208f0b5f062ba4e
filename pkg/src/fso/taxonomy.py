"""Service-type taxonomy with subsumption (subtype) reasoning.

Types are opaque names (bare identifiers or IRIs) arranged in an acyclic
subclass graph; multiple parents are allowed.  Subsumption is the
reflexive-transitive closure of the subclass edges: ``is_subtype(a, b)``
answers "does a count as a b".  Names that were never registered are
treated as isolated types, so they are subtypes of themselves and of
nothing else.
"""

from __future__ import annotations

from collections.abc import Iterable


class CycleError(Exception):
    """Adding this subclass edge would make the subclass graph cyclic."""


class TaxonomyParseError(Exception):
    """Malformed taxonomy file."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Taxonomy:
    """A DAG of service types under a subclass relation."""

    def __init__(self, edges: Iterable[tuple[str, str]] = ()):
        self.types: set[str] = set()
        self.subclass_edges: set[tuple[str, str]] = set()
        self._parents: dict[str, set[str]] = {}
        self._ancestor_cache: dict[str, frozenset[str]] = {}
        for child, parent in edges:
            self.add_subclass(child, parent)

    def add_type(self, name: str) -> "Taxonomy":
        self.types.add(name)
        self._parents.setdefault(name, set())
        return self

    def add_subclass(self, child: str, parent: str) -> "Taxonomy":
        """Record ``child`` as a subclass of ``parent``, registering both.

        Raises ValueError for a self-edge and CycleError if the edge would
        close a directed cycle.
        """
        if child == parent:
            raise ValueError(f"self-edge {child!r} subClassOf itself is not allowed")
        if self.is_subtype(parent, child):
            raise CycleError(f"edge {child!r} -> {parent!r} would create a cycle")
        self.add_type(child)
        self.add_type(parent)
        self.subclass_edges.add((child, parent))
        self._parents[child].add(parent)
        self._ancestor_cache.clear()
        return self

    def _ancestors(self, name: str) -> frozenset[str]:
        """All types reachable upward from ``name``, including itself."""
        cached = self._ancestor_cache.get(name)
        if cached is not None:
            return cached
        seen = {name}
        stack = [name]
        while stack:
            for parent in self._parents.get(stack.pop(), ()):
                if parent not in seen:
                    seen.add(parent)
                    stack.append(parent)
        result = frozenset(seen)
        self._ancestor_cache[name] = result
        return result

    def is_subtype(self, a: str, b: str) -> bool:
        """True iff ``a`` is subsumed by ``b`` (reflexive, transitive)."""
        return a == b or b in self._ancestors(a)

    def subtypes_of(self, b: str) -> set[str]:
        """Every registered type subsumed by ``b``, plus ``b`` itself."""
        found = {a for a in self.types if b in self._ancestors(a)}
        found.add(b)
        return found

    def __contains__(self, name: str) -> bool:
        return name in self.types

    def __repr__(self) -> str:
        return f"Taxonomy({len(self.types)} types, {len(self.subclass_edges)} edges)"


def parse_taxonomy(text: str) -> Taxonomy:
    """Parse a line-oriented taxonomy: ``<child> subClassOf <parent>``.

    Blank lines and lines starting with ``#`` are ignored.
    """
    tax = Taxonomy()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3 or fields[1] != "subClassOf":
            raise TaxonomyParseError(
                f"expected '<child> subClassOf <parent>', got {line!r}", lineno
            )
        child, _, parent = fields
        try:
            tax.add_subclass(child, parent)
        except ValueError as exc:
            raise TaxonomyParseError(str(exc), lineno) from exc
    return tax


def load_taxonomy(path) -> Taxonomy:
    with open(path, encoding="utf-8") as fh:
        return parse_taxonomy(fh.read())
