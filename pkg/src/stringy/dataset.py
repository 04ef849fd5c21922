"""Self-contained JSON dataset files for quotient presentations.

Rationals are written as ``"p/q"`` strings.  Maps are stored column-wise as
``{source basis name: {target basis name: coefficient}}`` with zero entries
omitted.  Algebras are stored once and referenced by name from strata.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from .algebra import AlgebraError, GradedAlgebra, LinearMap, format_q, q
from .group import Group, GroupError
from .kclass import Flavor, KClass, Stratum
from .model import QuotientPresentation, Sector, TripleData

FORMAT = "stringy-dataset/1"


class DatasetError(ValueError):
    """Malformed dataset; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# -- serialization -----------------------------------------------------------

def _rat(c) -> str:
    return format_q(Fraction(c))


def _algebra_doc(alg: GradedAlgebra) -> dict:
    names = alg.basis
    products = []
    for (i, j), out in sorted(alg.products().items()):
        products.append([names[i], names[j], {names[k]: _rat(c) for k, c in sorted(out.items())}])
    doc: dict[str, Any] = {
        "basis": list(names),
        "degrees": [_rat(d) for d in alg.degrees],
        "products": products,
        "unit": names[alg.unit_index] if alg.unit_index is not None else None,
    }
    if alg.trace is not None:
        doc["trace"] = {n: _rat(t) for n, t in zip(names, alg.trace) if t}
    default_par = [int(d) % 2 if d.denominator == 1 else 0 for d in alg.degrees]
    if list(alg.parities) != default_par:
        doc["parities"] = list(alg.parities)
    if not alg.graded:
        doc["graded"] = False
    return doc


def _map_doc(f: LinearMap) -> dict:
    out = {}
    for s, name in enumerate(f.source.basis):
        col = {f.target.basis[t]: _rat(f.matrix[t][s]) for t in range(f.target.dim) if f.matrix[t][s]}
        if col:
            out[name] = col
    return out


def _class_doc(k: KClass) -> dict:
    return {n: _rat(c) for n, c in k.terms}


def _group_doc(G: Group):
    if G.spec:
        return G.spec
    return {
        "elements": list(G.elements),
        "identity": G.identity,
        "table": {a: {b: G.mul(a, b) for b in G.elements} for a in G.elements},
    }


def to_document(p: QuotientPresentation) -> dict:
    algebras: dict[str, dict] = {}
    alg_names: dict[int, str] = {}

    def alg_ref(alg: GradedAlgebra) -> str:
        key = id(alg)
        if key in alg_names:
            return alg_names[key]
        doc = _algebra_doc(alg)
        for name, existing in algebras.items():
            if existing == doc:
                alg_names[key] = name
                return name
        name = alg.name
        n = 2
        while name in algebras:
            name = f"{alg.name}#{n}"
            n += 1
        algebras[name] = doc
        alg_names[key] = name
        return name

    strata: dict[str, dict] = {}

    def stratum_ref(st: Stratum) -> str:
        if st.name not in strata:
            strata[st.name] = {
                "algebra": alg_ref(st.algebra),
                "lines": {n: el.to_mapping() for n, el in sorted(st.lines.items())},
            }
        return st.name

    sectors = {}
    for m in p.ordered_elements():
        sec = p.sector(m)
        doc: dict[str, Any] = {
            "stratum": stratum_ref(sec.stratum),
            "pullback": _map_doc(sec.pullback),
            "involution": _map_doc(sec.involution),
            "involution_lines": dict(sorted(sec.involution_lines.items())),
            "restriction": dict(sorted(sec.restriction.items())),
            "normal": _class_doc(sec.normal),
            "eigen": {str(k): _class_doc(w) for k, w in sorted(sec.eigen.items())},
        }
        if sec.pushforward is not None:
            doc["pushforward"] = _map_doc(sec.pushforward)
        if sec.section is not None:
            doc["section"] = _map_doc(sec.section)
        sectors[m] = doc

    triples = []
    for t in p.iter_triples():
        triples.append({
            "m1": t.m1,
            "m2": t.m2,
            "stratum": stratum_ref(t.stratum),
            "pullbacks": [_map_doc(f) for f in t.pullbacks],
            "restrictions": [dict(sorted(r.items())) for r in t.restrictions],
            "pushforward": _map_doc(t.pushforward),
            "normal": _class_doc(t.normal),
            "normal_m3": _class_doc(t.normal_m3),
        })

    doc = {
        "format": FORMAT,
        "id": p.name,
        "flavor": p.flavor.value,
        "truncation": p.truncation,
        "group": _group_doc(p.group),
        "algebras": algebras,
        "strata": strata,
        "sectors": sectors,
        "triples": triples,
    }
    if p.section_sets:
        doc["section_sets"] = {
            name: {m: _map_doc(f) for m, f in sorted(sset.items())} for name, sset in sorted(p.section_sets.items())
        }
    return doc


def serialize(p: QuotientPresentation) -> str:
    return json.dumps(to_document(p), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- parsing -----------------------------------------------------------------

def _need(doc: dict, key: str, path: str):
    if not isinstance(doc, dict):
        raise DatasetError(path, "expected an object")
    if key not in doc:
        raise DatasetError(f"{path}.{key}" if path else key, "missing field")
    return doc[key]


def _rational(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise DatasetError(path, f"expected an exact rational (int or \"p/q\" string), got {value!r}")
    try:
        return q(value)
    except (ValueError, ZeroDivisionError):
        raise DatasetError(path, f"bad rational {value!r}") from None


def _parse_algebra(name: str, doc: dict, path: str) -> GradedAlgebra:
    basis = _need(doc, "basis", path)
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise DatasetError(f"{path}.basis", "expected a list of names")
    index = {b: i for i, b in enumerate(basis)}

    def idx(n, where):
        if n not in index:
            raise DatasetError(where, f"unknown basis element {n!r}")
        return index[n]

    degrees = [_rational(d, f"{path}.degrees[{i}]") for i, d in enumerate(_need(doc, "degrees", path))]
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for n, entry in enumerate(_need(doc, "products", path)):
        where = f"{path}.products[{n}]"
        if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], dict)):
            raise DatasetError(where, "expected [left, right, {basis: coefficient}]")
        i, j = idx(entry[0], where), idx(entry[1], where)
        products[(i, j)] = {idx(k, where): _rational(c, f"{where}.{k}") for k, c in entry[2].items()}
    unit = doc.get("unit")
    unit_index = None if unit is None else idx(unit, f"{path}.unit")
    trace = None
    if "trace" in doc:
        tr = doc["trace"]
        trace = [Fraction(0)] * len(basis)
        for k, c in tr.items():
            trace[idx(k, f"{path}.trace")] = _rational(c, f"{path}.trace.{k}")
    try:
        return GradedAlgebra(name, basis, degrees, products, unit_index, trace, bool(doc.get("graded", True)), doc.get("parities"))
    except AlgebraError as exc:
        raise DatasetError(path, str(exc)) from None


def _parse_map(doc, source: GradedAlgebra, target: GradedAlgebra, path: str, name: str = "") -> LinearMap:
    if not isinstance(doc, dict):
        raise DatasetError(path, "expected a map {source: {target: coefficient}}")
    matrix = [[Fraction(0)] * source.dim for _ in range(target.dim)]
    for s_name, col in doc.items():
        if s_name not in source.basis:
            raise DatasetError(path, f"source {source.name} has no basis element {s_name!r}")
        if not isinstance(col, dict):
            raise DatasetError(f"{path}.{s_name}", "expected {target: coefficient}")
        s = source.index(s_name)
        for t_name, c in col.items():
            if t_name not in target.basis:
                raise DatasetError(f"{path}.{s_name}", f"target {target.name} has no basis element {t_name!r}")
            matrix[target.index(t_name)][s] = _rational(c, f"{path}.{s_name}.{t_name}")
    return LinearMap(source, target, matrix, name)


def _parse_class(doc, stratum: Stratum, path: str) -> KClass:
    if not isinstance(doc, dict):
        raise DatasetError(path, "expected {line: coefficient}")
    for n in doc:
        if n not in stratum.lines:
            raise DatasetError(path, f"stratum {stratum.name} has no line generator {n!r}")
    return KClass(stratum.name, {n: _rational(c, f"{path}.{n}") for n, c in doc.items()})


def _parse_table(doc, path: str) -> dict[str, str]:
    if not isinstance(doc, dict) or not all(isinstance(v, str) for v in doc.values()):
        raise DatasetError(path, "expected {line: line}")
    return dict(doc)


def _parse_group(doc, path: str) -> Group:
    if isinstance(doc, str):
        try:
            return Group.from_spec(doc)
        except GroupError as exc:
            raise DatasetError(path, str(exc)) from None
    elements = _need(doc, "elements", path)
    identity = _need(doc, "identity", path)
    table = _need(doc, "table", path)
    try:
        return Group(elements, table, identity)
    except GroupError as exc:
        raise DatasetError(path, str(exc)) from None


def from_document(doc: dict) -> QuotientPresentation:
    if not isinstance(doc, dict):
        raise DatasetError("", "top level must be an object")
    fmt = _need(doc, "format", "")
    if fmt != FORMAT:
        raise DatasetError("format", f"unsupported format {fmt!r}, expected {FORMAT!r}")
    try:
        flavor = Flavor(_need(doc, "flavor", ""))
    except ValueError:
        raise DatasetError("flavor", "expected CH or K") from None
    truncation = doc.get("truncation")
    if truncation is not None and (not isinstance(truncation, int) or truncation < 0):
        raise DatasetError("truncation", "expected a nonnegative integer or null")
    G = _parse_group(_need(doc, "group", ""), "group")

    algebras = {n: _parse_algebra(n, a, f"algebras.{n}") for n, a in _need(doc, "algebras", "").items()}
    strata: dict[str, Stratum] = {}
    for n, s in _need(doc, "strata", "").items():
        path = f"strata.{n}"
        aname = _need(s, "algebra", path)
        if aname not in algebras:
            raise DatasetError(f"{path}.algebra", f"unknown algebra {aname!r}")
        alg = algebras[aname]
        lines = {}
        for ln, el in s.get("lines", {}).items():
            try:
                lines[ln] = alg.element({k: _rational(c, f"{path}.lines.{ln}.{k}") for k, c in el.items()})
            except AlgebraError as exc:
                raise DatasetError(f"{path}.lines.{ln}", str(exc)) from None
        strata[n] = Stratum(n, alg, lines)

    def stratum(name, path):
        if name not in strata:
            raise DatasetError(path, f"unknown stratum {name!r}")
        return strata[name]

    sec_docs = _need(doc, "sectors", "")
    for m in sec_docs:
        if m not in G.elements:
            raise DatasetError(f"sectors.{m}", "not a group element")
    sec_strata = {m: stratum(_need(s, "stratum", f"sectors.{m}"), f"sectors.{m}.stratum") for m, s in sec_docs.items()}
    if G.identity not in sec_strata:
        raise DatasetError("sectors", f"missing the identity sector {G.identity!r}")
    X = sec_strata[G.identity]

    sectors: dict[str, Sector] = {}
    for m, s in sec_docs.items():
        path = f"sectors.{m}"
        st = sec_strata[m]
        try:
            inv_st = sec_strata[G.inv(m)]
        except (KeyError, GroupError):
            raise DatasetError(path, f"no sector for the inverse of {m}") from None
        eigen = {}
        for k, w in s.get("eigen", {}).items():
            try:
                kk = int(k)
            except ValueError:
                raise DatasetError(f"{path}.eigen", f"character index {k!r} is not an integer") from None
            eigen[kk] = _parse_class(w, st, f"{path}.eigen.{k}")
        sectors[m] = Sector(
            m,
            st,
            _parse_map(_need(s, "pullback", path), X.algebra, st.algebra, f"{path}.pullback", f"i_{m}^*"),
            _parse_map(_need(s, "involution", path), inv_st.algebra, st.algebra, f"{path}.involution", f"∨_{m}^*"),
            _parse_class(_need(s, "normal", path), st, f"{path}.normal"),
            eigen,
            _parse_table(_need(s, "restriction", path), f"{path}.restriction"),
            _parse_table(_need(s, "involution_lines", path), f"{path}.involution_lines"),
            _parse_map(s["pushforward"], st.algebra, X.algebra, f"{path}.pushforward", f"i_{m}*") if "pushforward" in s else None,
            _parse_map(s["section"], st.algebra, X.algebra, f"{path}.section", f"i_{m}s") if "section" in s else None,
        )

    triples: dict[tuple[str, str], TripleData] = {}
    duplicates = []
    for n, t in enumerate(_need(doc, "triples", "")):
        path = f"triples[{n}]"
        m1, m2 = _need(t, "m1", path), _need(t, "m2", path)
        label = f"triple ({m1},{m2})"
        for m in (m1, m2):
            if m not in sectors:
                raise DatasetError(path, f"{label}: no sector {m!r}")
        try:
            m3 = G.inv(G.mul(m1, m2))
        except GroupError as exc:
            raise DatasetError(path, f"{label}: {exc}") from None
        if m3 not in sectors:
            raise DatasetError(path, f"{label}: no sector {m3!r}")
        st = stratum(_need(t, "stratum", path), f"{path}.stratum")
        pulls = _need(t, "pullbacks", path)
        tables = _need(t, "restrictions", path)
        if not (isinstance(pulls, list) and len(pulls) == 3 and isinstance(tables, list) and len(tables) == 3):
            raise DatasetError(path, f"{label}: pullbacks and restrictions need three entries each")
        if "pushforward" not in t:
            raise DatasetError(f"{path}.pushforward", f"{label}: missing the pushforward ě_3*")
        maps = tuple(
            _parse_map(pulls[k], sectors[mk].algebra, st.algebra, f"{path}.pullbacks[{k}]", f"e_{k + 1}^*")
            for k, mk in enumerate((m1, m2, m3))
        )
        data = TripleData(
            m1, m2, m3, st, maps,  # type: ignore[arg-type]
            tuple(_parse_table(tables[k], f"{path}.restrictions[{k}]") for k in range(3)),  # type: ignore[arg-type]
            _parse_map(t["pushforward"], st.algebra, sectors[G.inv(m3)].algebra, f"{path}.pushforward", "ě_3*"),
            _parse_class(_need(t, "normal", path), st, f"{path}.normal"),
            _parse_class(_need(t, "normal_m3", path), st, f"{path}.normal_m3"),
        )
        if (m1, m2) in triples:
            duplicates.append((m1, m2))
        triples[(m1, m2)] = data

    section_sets = {}
    for name, sset in doc.get("section_sets", {}).items():
        section_sets[name] = {
            m: _parse_map(f, sectors[m].algebra, X.algebra, f"section_sets.{name}.{m}", f"i_{m}s")
            for m, f in sset.items()
            if m in sectors or _bad_sector(f"section_sets.{name}", m)
        }

    return QuotientPresentation(
        str(doc.get("id", "dataset")), flavor, G, sectors, triples, truncation, section_sets, duplicates
    )


def _bad_sector(path: str, m: str) -> bool:
    raise DatasetError(path, f"no sector {m!r}")


def parse_dataset(text: str) -> QuotientPresentation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return from_document(doc)


def load(path: str | Path) -> QuotientPresentation:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(str(path), exc.strerror or str(exc)) from None
    return parse_dataset(text)


def shipped_path(name: str) -> Path:
    return Path(str(resources.files("stringy") / "data" / f"{name}.json"))


def load_shipped(name: str) -> QuotientPresentation:
    return load(shipped_path(name))
