"""Backtracking groupoid isomorphism search, independent of the library.

Works purely on the stored tables, so it can certify identifications such as
"this quotient is the two-element group" without trusting any construction
under test.  Sizes stay tiny in the suite, so plain backtracking is enough.
"""

from __future__ import annotations

from haarsys import Groupoid


def _profiles(G: Groupoid) -> dict[str, tuple]:
    rsize: dict[str, int] = {}
    ssize: dict[str, int] = {}
    for x in G.elements:
        rsize[G.range_map[x]] = rsize.get(G.range_map[x], 0) + 1
        ssize[G.source_map[x]] = ssize.get(G.source_map[x], 0) + 1
    return {
        x: (
            x in G.units,
            G.range_map[x] == G.source_map[x],
            G.inverse_map[x] == x,
            rsize.get(G.range_map[x], 0),
            ssize.get(G.source_map[x], 0),
        )
        for x in G.elements
    }


def _total_check(G: Groupoid, H: Groupoid, m: dict[str, str]) -> bool:
    for x in G.elements:
        if (m[x] in H.units) != (x in G.units):
            return False
        if H.range_map[m[x]] != m[G.range_map[x]]:
            return False
        if H.source_map[m[x]] != m[G.source_map[x]]:
            return False
        if H.inverse_map[m[x]] != m[G.inverse_map[x]]:
            return False
    if len(G.compose_map) != len(H.compose_map):
        return False
    for (x, y), z in G.compose_map.items():
        if H.compose_map.get((m[x], m[y])) != m[z]:
            return False
    return True


def find_isomorphism(G: Groupoid, H: Groupoid) -> dict[str, str] | None:
    """A structure-preserving bijection of arrows, or None."""
    if len(G.elements) != len(H.elements) or len(G.units) != len(H.units):
        return None
    gp = _profiles(G)
    hp = _profiles(H)
    if sorted(gp.values()) != sorted(hp.values()):
        return None
    order = sorted(G.elements, key=lambda x: (not (x in G.units), x))
    hels = sorted(H.elements)

    def consistent(mapping: dict[str, str], x: str, y: str) -> bool:
        for a, b in (
            (G.range_map[x], H.range_map[y]),
            (G.source_map[x], H.source_map[y]),
            (G.inverse_map[x], H.inverse_map[y]),
        ):
            if a == x and b != y:
                return False
            if a in mapping and mapping[a] != b:
                return False
        for z in mapping:
            for key, img in (((x, z), (y, mapping[z])), ((z, x), (mapping[z], y))):
                p = G.compose_map.get(key)
                q = H.compose_map.get(img)
                if (p is None) != (q is None):
                    return False
                if p is not None and p in mapping and mapping[p] != q:
                    return False
        p = G.compose_map.get((x, x))
        q = H.compose_map.get((y, y))
        if (p is None) != (q is None):
            return False
        if p == x and q != y:
            return False
        return True

    def extend(i: int, mapping: dict[str, str], used: set[str]) -> dict[str, str] | None:
        if i == len(order):
            return dict(mapping) if _total_check(G, H, mapping) else None
        x = order[i]
        for y in hels:
            if y in used or hp[y] != gp[x]:
                continue
            if not consistent(mapping, x, y):
                continue
            mapping[x] = y
            used.add(y)
            found = extend(i + 1, mapping, used)
            if found is not None:
                return found
            del mapping[x]
            used.discard(y)
        return None

    return extend(0, {}, set())


def isomorphic(G: Groupoid, H: Groupoid) -> bool:
    return find_isomorphism(G, H) is not None
