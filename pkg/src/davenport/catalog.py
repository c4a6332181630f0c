"""Named groups: built-in families, direct products and Cayley-table files.

Group ids are ``x``-separated factors, each one of ``C<n>`` (cyclic),
``D<2m>`` (dihedral of order 2m), ``Q<4m>`` (dicyclic of order 4m), ``S<k>``
(symmetric), ``A<k>`` (alternating) or ``F<pq>`` (the affine group
``Z_p : Z_q`` with ``q | p - 1``), e.g. ``C3xC3``, ``C2xD8`` or ``F21``.
"""
from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Optional

from .groups import (
    FiniteGroup,
    GroupError,
    direct_product,
    from_cayley_table,
    make_alternating,
    make_cyclic,
    make_dicyclic,
    make_dihedral,
    make_symmetric,
    from_permutation_generators,
)

log = logging.getLogger(__name__)

CATALOG_ENV = "DAVENPORT_CATALOG_DIR"
TABLE_SUFFIXES = (".json", ".txt", ".table")

DEFAULT_BUILTIN = (
    "cyclic 1..24; dihedral 2..12; dicyclic 2..6; symmetric 3..4; alternating 4; "
    "product C2xC2, C2xC4, C2xC2xC2, C3xC3, C2xC6, C2xC8, C4xC4, C2xC2xC4, "
    "C2xC2xC2xC2, C2xD8, C2xQ8, C3xC6, C3xD6, C2xC10, C2xD10, C2xC12, C2xC2xC6, "
    "C4xD6, C2xD12, C3xD8, C3xQ8, C2xA4, C2xC2xD6, C2xQ12, F20, F21"
)


class UnknownGroup(KeyError):
    def __str__(self):
        return f"unknown group id {self.args[0]!r}"


class CatalogSpecError(ValueError):
    pass


_FACTOR = re.compile(r"^([CDQSAF])(\d+)$")


def _affine_params(n: int) -> Optional[tuple[int, int]]:
    """``(p, q)`` with ``n = p*q``, ``p`` the largest prime factor and ``q | p - 1``."""
    m, p, f = n, None, 2
    while f * f <= m:
        while m % f == 0:
            p, m = f, m // f
        f += 1
    if m > 1:
        p = m
    if p is None or n == p:
        return None
    q = n // p
    return (p, q) if (p - 1) % q == 0 else None


def make_affine(n: int) -> FiniteGroup:
    pq = _affine_params(n)
    if pq is None:
        raise UnknownGroup(f"F{n}")
    p, q = pq
    # a unit of multiplicative order exactly q mod p
    a = next(x for x in range(2, p)
             if pow(x, q, p) == 1 and all(pow(x, k, p) != 1 for k in range(1, q)))
    shift = tuple((x + 1) % p for x in range(p))
    scale = tuple((a * x) % p for x in range(p))
    return from_permutation_generators([shift, scale], f"F{n}")


def _factor_order(kind: str, k: int) -> int:
    if kind in "CDQF":
        return k
    fact = 1
    for i in range(2, k + 1):
        fact *= i
    return fact if kind == "S" else max(1, fact // 2)


def _build_factor(kind: str, k: int) -> FiniteGroup:
    if kind == "C":
        return make_cyclic(k)
    if kind == "D":
        if k % 2 or k < 4:
            raise UnknownGroup(f"D{k}")
        return make_dihedral(k // 2)
    if kind == "Q":
        if k % 4 or k < 8:
            raise UnknownGroup(f"Q{k}")
        return make_dicyclic(k // 4)
    if kind == "S":
        return make_symmetric(k)
    if kind == "F":
        return make_affine(k)
    return make_alternating(k)


def parse_group_id(gid: str) -> list[tuple[str, int]]:
    factors = []
    for part in gid.split("x"):
        m = _FACTOR.match(part)
        if not m or int(m.group(2)) < 1:
            raise UnknownGroup(gid)
        kind, k = m.group(1), int(m.group(2))
        if (kind == "D" and (k % 2 or k < 4)) or (kind == "Q" and (k % 4 or k < 8)) \
                or (kind in "SA" and k > 6) or (kind == "F" and _affine_params(k) is None):
            raise UnknownGroup(gid)
        factors.append((kind, k))
    return factors


def build_group_id(gid: str) -> FiniteGroup:
    groups = [_build_factor(k, n) for k, n in parse_group_id(gid)]
    G = reduce(direct_product, groups)
    return FiniteGroup(G.table, gid)


@dataclass(frozen=True)
class GroupCatalogEntry:
    id: str
    order: int
    source: Optional[Path] = None
    params: tuple = field(default=())

    def build(self) -> FiniteGroup:
        if self.source is not None:
            return load_table_file(self.source, name=self.id)
        return build_group_id(self.id)


def parse_table_text(text: str) -> tuple[int, list[list[int]]]:
    """Read a Cayley-table document: JSON or ``n:`` / ``table:`` plain text."""
    text = text.strip()
    if text.startswith("{"):
        doc = json.loads(text)
        n = int(doc["n"])
        rows = [_parse_row(r) for r in doc["table"]]
    else:
        n = None
        rows = []
        in_table = False
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("n:"):
                n = int(line[2:].strip())
            elif line.startswith("table:"):
                in_table = True
                rest = line[6:].strip()
                if rest:
                    rows.append(_parse_row(rest))
            elif in_table:
                rows.append(_parse_row(line))
            else:
                raise ValueError(f"unexpected line {line!r}")
        if n is None:
            raise ValueError("missing field n")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"table is not {n}x{n}")
    return n, rows


def _parse_row(row) -> list[int]:
    if isinstance(row, str):
        return [int(x) for x in re.split(r"[,\s]+", row.strip()) if x]
    return [int(x) for x in row]


def load_table_file(path: Path, name: Optional[str] = None) -> FiniteGroup:
    _, rows = parse_table_text(Path(path).read_text())
    return from_cayley_table(rows, name=name or Path(path).stem)


def write_table_file(G: FiniteGroup, path: Path) -> None:
    doc = {"n": G.order, "table": [" ".join(map(str, row)) for row in G.table]}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def _expand_builtin(spec: str) -> list[str]:
    ids: list[str] = []
    for clause in filter(None, (c.strip() for c in spec.split(";"))):
        head, _, rest = clause.partition(" ")
        rest = rest.strip()
        if head == "product":
            ids.extend(x.strip() for x in rest.split(",") if x.strip())
            continue
        m = re.fullmatch(r"(\d+)(?:\.\.(\d+))?", rest)
        if not m:
            raise CatalogSpecError(f"bad range in {clause!r}")
        lo = int(m.group(1))
        hi = int(m.group(2) or lo)
        for k in range(lo, hi + 1):
            if head == "cyclic":
                ids.append(f"C{k}")
            elif head == "dihedral":
                ids.append(f"D{2 * k}")
            elif head == "dicyclic":
                ids.append(f"Q{4 * k}")
            elif head == "symmetric":
                ids.append(f"S{k}")
            elif head == "alternating":
                ids.append(f"A{k}")
            else:
                raise CatalogSpecError(f"unknown family {head!r}")
    return ids


def load_catalog(builtin: Optional[str] = DEFAULT_BUILTIN,
                 directory: Optional[os.PathLike | str] = None,
                 ) -> tuple[list[GroupCatalogEntry], list[str]]:
    """Expand a built-in catalog string and read every table file in ``directory``.

    Returns the entries (sorted by order, then id) and a list of warnings for
    files that failed validation.
    """
    entries: dict[str, GroupCatalogEntry] = {}
    warnings: list[str] = []
    for gid in _expand_builtin(builtin or ""):
        if gid in entries:
            continue
        factors = parse_group_id(gid)
        order = 1
        for kind, k in factors:
            order *= _factor_order(kind, k)
        entries[gid] = GroupCatalogEntry(gid, order, params=tuple(factors))

    if directory is None:
        directory = os.environ.get(CATALOG_ENV) or None
    if directory is not None:
        d = Path(directory)
        if not d.is_dir():
            raise OSError(f"catalog directory {d} is not readable")
        for path in sorted(d.iterdir()):
            if path.suffix not in TABLE_SUFFIXES:
                continue
            try:
                G = load_table_file(path)
            except (GroupError, ValueError, KeyError) as exc:
                msg = f"{path.name}: {type(exc).__name__}: {exc}"
                log.warning("skipping table file %s", msg)
                warnings.append(msg)
                continue
            if path.stem in entries:
                warnings.append(f"{path.name}: duplicate id {path.stem!r} ignored")
                continue
            entries[path.stem] = GroupCatalogEntry(path.stem, G.order, source=path)
    out = sorted(entries.values(), key=lambda e: (e.order, e.id))
    return out, warnings


def resolve_group(gid: str, directory: Optional[os.PathLike | str] = None) -> FiniteGroup:
    """Build a group from its id, falling back to a table file of that name."""
    try:
        return build_group_id(gid)
    except UnknownGroup:
        pass
    directory = directory or os.environ.get(CATALOG_ENV)
    if directory:
        for suffix in TABLE_SUFFIXES:
            path = Path(directory) / f"{gid}{suffix}"
            if path.exists():
                return load_table_file(path, name=gid)
    raise UnknownGroup(gid)
