"""In-memory fact stores.

A :class:`DataStore` keeps every fact twice, under a PSO index
(predicate -> subject -> objects) and a POS index (predicate -> object ->
subjects).  A :class:`DataStoreBag` is a merge-free union of store handles
with a predicate -> stores index, so that lookups only touch the stores
that actually hold the predicate.
"""

from __future__ import annotations

from itertools import chain
from typing import Iterable, Iterator

_EMPTY = frozenset()


class DataStore:
    __slots__ = ("pso", "pos", "count", "mutations", "name")

    def __init__(self, facts: Iterable = (), name: str = ""):
        self.pso: dict = {}
        self.pos: dict = {}
        self.count = 0
        self.mutations = 0
        self.name = name
        for fact in facts:
            self.insert(fact)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<DataStore{label} facts={self.count}>"

    def __len__(self):
        return self.count

    def __iter__(self) -> Iterator[tuple]:
        for p, by_s in self.pso.items():
            for s, objs in by_s.items():
                for o in objs:
                    yield (p, s, o)

    def __contains__(self, fact) -> bool:
        p, s, o = fact
        by_s = self.pso.get(p)
        if by_s is None:
            return False
        objs = by_s.get(s)
        return objs is not None and o in objs

    def insert(self, fact) -> bool:
        p, s, o = fact
        by_s = self.pso.get(p)
        if by_s is None:
            by_s = self.pso[p] = {}
            self.pos[p] = {}
        objs = by_s.get(s)
        if objs is None:
            objs = by_s[s] = set()
        elif o in objs:
            return False
        objs.add(o)
        by_o = self.pos[p]
        subjs = by_o.get(o)
        if subjs is None:
            by_o[o] = {s}
        else:
            subjs.add(s)
        self.count += 1
        self.mutations += 1
        return True

    def delete(self, fact) -> bool:
        p, s, o = fact
        by_s = self.pso.get(p)
        if by_s is None:
            return False
        objs = by_s.get(s)
        if objs is None or o not in objs:
            return False
        objs.discard(o)
        if not objs:
            del by_s[s]
        by_o = self.pos[p]
        subjs = by_o[o]
        subjs.discard(s)
        if not subjs:
            del by_o[o]
        if not by_s:
            del self.pso[p]
            del self.pos[p]
        self.count -= 1
        self.mutations += 1
        return True

    def update(self, facts: Iterable) -> int:
        return sum(1 for f in facts if self.insert(f))

    def clear(self):
        if self.count:
            self.mutations += 1
        self.pso.clear()
        self.pos.clear()
        self.count = 0

    def copy(self, name: str = None) -> "DataStore":
        clone = DataStore(name=self.name if name is None else name)
        for p, by_s in self.pso.items():
            clone.pso[p] = {s: set(objs) for s, objs in by_s.items()}
            clone.pos[p] = {o: set(subjs) for o, subjs in self.pos[p].items()}
        clone.count = self.count
        return clone

    def predicates(self):
        return self.pso.keys()

    def facts(self) -> set:
        return set(self)

    def predicate_count(self, p) -> int:
        by_s = self.pso.get(p)
        if not by_s:
            return 0
        return sum(len(objs) for objs in by_s.values())

    def match(self, p, s=None, o=None) -> Iterator[tuple]:
        """Facts matching ``(p, s, o)``; ``None`` is a wildcard."""
        by_s = self.pso.get(p)
        if by_s is None:
            return
        if s is not None:
            objs = by_s.get(s)
            if objs is None:
                return
            if o is not None:
                if o in objs:
                    yield (p, s, o)
                return
            for obj in objs:
                yield (p, s, obj)
        elif o is not None:
            for subj in self.pos[p].get(o, _EMPTY):
                yield (p, subj, o)
        else:
            for subj, objs in by_s.items():
                for obj in objs:
                    yield (p, subj, obj)

    # accessors used by compiled joins
    def objects(self, p, s):
        by_s = self.pso.get(p)
        if by_s is None:
            return _EMPTY
        return by_s.get(s, _EMPTY)

    objects_iter = objects

    def subjects(self, p, o):
        by_o = self.pos.get(p)
        if by_o is None:
            return _EMPTY
        return by_o.get(o, _EMPTY)

    subjects_iter = subjects

    def pairs(self, p):
        by_s = self.pso.get(p)
        if by_s is None:
            return
        for s, objs in by_s.items():
            for o in objs:
                yield s, o

    pairs_iter = pairs

    def contains(self, p, s, o) -> bool:
        by_s = self.pso.get(p)
        if by_s is None:
            return False
        objs = by_s.get(s)
        return objs is not None and o in objs

    def exists(self, p, s=None, o=None) -> bool:
        by_s = self.pso.get(p)
        if by_s is None:
            return False
        if s is not None:
            objs = by_s.get(s)
            if objs is None:
                return False
            return True if o is None else o in objs
        if o is not None:
            return o in self.pos[p]
        return True

    def check_consistency(self) -> bool:
        """True when the two indexes hold the same facts and ``count`` matches."""
        forward = {(p, s, o) for p, by_s in self.pso.items() for s, objs in by_s.items()
                   for o in objs}
        backward = {(p, s, o) for p, by_o in self.pos.items() for o, subjs in by_o.items()
                    for s in subjs}
        no_empties = all(by_s and all(by_s.values()) for by_s in self.pso.values()) and all(
            by_o and all(by_o.values()) for by_o in self.pos.values())
        return forward == backward and len(forward) == self.count and no_empties


def ds_insert(ds: DataStore, fact) -> bool:
    return ds.insert(fact)


def ds_delete(ds: DataStore, fact) -> bool:
    return ds.delete(fact)


def ds_match(ds: DataStore, pattern) -> Iterator[tuple]:
    p, s, o = pattern
    return ds.match(p, s, o)


class DataStoreBag:
    """A set of DataStore handles that is queried as their union.

    Facts are never copied.  ``pds_index`` maps each predicate to the member
    stores holding at least one fact for it; it is rebuilt by
    :meth:`refresh_index` after members change.  ``probes`` counts member
    store accesses made by :meth:`match`.
    """

    __slots__ = ("stores", "pds_index", "probes", "name")

    def __init__(self, stores: Iterable[DataStore] = (), name: str = ""):
        self.stores: list = []
        self.pds_index: dict = {}
        self.probes = 0
        self.name = name
        for ds in stores:
            self.add_store(ds)

    def __repr__(self):
        return f"<DataStoreBag {self.name} stores={len(self.stores)}>"

    def __len__(self):
        return len(self.stores)

    def __contains__(self, ds) -> bool:
        return any(member is ds for member in self.stores)

    def add_store(self, ds: DataStore) -> None:
        if ds in self:
            return
        self.stores.append(ds)
        for p in ds.predicates():
            self.pds_index.setdefault(p, []).append(ds)

    def remove_store(self, ds: DataStore) -> None:
        self.stores = [m for m in self.stores if m is not ds]
        self.refresh_index()

    def refresh_index(self) -> None:
        index: dict = {}
        for ds in self.stores:
            for p in ds.predicates():
                index.setdefault(p, []).append(ds)
        self.pds_index = index

    def stores_for(self, p) -> list:
        return self.pds_index.get(p, [])

    def match(self, p, s=None, o=None) -> Iterator[tuple]:
        members = self.pds_index.get(p)
        if not members:
            return
        self.probes += len(members)
        if len(members) == 1:
            yield from members[0].match(p, s, o)
            return
        seen = set()
        for ds in members:
            for fact in ds.match(p, s, o):
                if fact not in seen:
                    seen.add(fact)
                    yield fact

    def __iter__(self):
        seen = set()
        for ds in self.stores:
            for fact in ds:
                if fact not in seen:
                    seen.add(fact)
                    yield fact

    def facts(self) -> set:
        out = set()
        for ds in self.stores:
            out.update(ds)
        return out

    def contains(self, p, s, o) -> bool:
        return any(ds.contains(p, s, o) for ds in self.pds_index.get(p, ()))

    def predicate_count(self, p) -> int:
        return sum(ds.predicate_count(p) for ds in self.pds_index.get(p, ()))


def dsb_add_store(dsb: DataStoreBag, ds: DataStore) -> None:
    dsb.add_store(ds)


def dsb_match(dsb: DataStoreBag, pattern) -> Iterator[tuple]:
    p, s, o = pattern
    return dsb.match(p, s, o)


def dsb_refresh_index(dsb: DataStoreBag) -> None:
    dsb.refresh_index()


class View:
    """Read accessor over several stores, used by compiled joins.

    Iteration variants may yield a value more than once when stores
    overlap; the deduplicating variants (``objects``/``subjects``/``pairs``)
    never do.
    """

    __slots__ = ("stores",)

    def __init__(self, stores):
        self.stores = [ds for ds in stores if ds is not None]

    def _holding(self, p):
        return [ds for ds in self.stores if p in ds.pso]

    def objects(self, p, s):
        sets = [ds.objects(p, s) for ds in self.stores]
        sets = [x for x in sets if x]
        if not sets:
            return _EMPTY
        if len(sets) == 1:
            return sets[0]
        return set().union(*sets)

    def objects_iter(self, p, s):
        sets = [x for x in (ds.objects(p, s) for ds in self.stores) if x]
        if len(sets) == 1:
            return sets[0]
        return chain.from_iterable(sets)

    def subjects(self, p, o):
        sets = [x for x in (ds.subjects(p, o) for ds in self.stores) if x]
        if not sets:
            return _EMPTY
        if len(sets) == 1:
            return sets[0]
        return set().union(*sets)

    def subjects_iter(self, p, o):
        sets = [x for x in (ds.subjects(p, o) for ds in self.stores) if x]
        if len(sets) == 1:
            return sets[0]
        return chain.from_iterable(sets)

    def pairs(self, p):
        holding = self._holding(p)
        if len(holding) == 1:
            return holding[0].pairs(p)
        seen = set()
        out = []
        for ds in holding:
            for pair in ds.pairs(p):
                if pair not in seen:
                    seen.add(pair)
                    out.append(pair)
        return out

    def pairs_iter(self, p):
        return chain.from_iterable(ds.pairs(p) for ds in self._holding(p))

    def contains(self, p, s, o) -> bool:
        for ds in self.stores:
            if ds.contains(p, s, o):
                return True
        return False

    def exists(self, p, s=None, o=None) -> bool:
        for ds in self.stores:
            if ds.exists(p, s, o):
                return True
        return False

    def count(self, p) -> int:
        return sum(ds.predicate_count(p) for ds in self.stores)
