"""JSON forms of polynomials, series and the structure types.

Coefficients are stored as numerator/denominator strings so that a round
trip is exact for integers of any size.
"""

from __future__ import annotations

from .exactalg.poly import MultiPoly
from .exactalg.rational import QQ, to_text
from .exactalg.series import TruncSeries
from .frobform import FrobeniusData, PreSaitoData, PrimitiveFormSection


def _term(exp, c) -> dict:
    c = QQ(c)
    return {"exp": list(exp), "num": str(c.numerator), "den": str(c.denominator)}


def _coeff(t: dict):
    return QQ(int(t["num"]), int(t.get("den", 1)))


def _sorted(terms):
    return sorted(terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))


def poly_to_json(p: MultiPoly) -> dict:
    return {"vars": list(p.vars), "terms": [_term(e, c) for e, c in _sorted(p.terms)], "text": p.to_text()}


def poly_from_json(obj: dict) -> MultiPoly:
    return MultiPoly(obj["vars"], {tuple(t["exp"]): _coeff(t) for t in obj["terms"]})


def series_to_json(s: TruncSeries) -> dict:
    return {"nvars": s.nvars, "order": s.order, "terms": [_term(e, c) for e, c in _sorted(s.terms)]}


def series_from_json(obj: dict) -> TruncSeries:
    return TruncSeries(obj["nvars"], obj["order"], {tuple(t["exp"]): _coeff(t) for t in obj["terms"]})


def _map(obj, fn):
    if isinstance(obj, list):
        return [_map(x, fn) for x in obj]
    return fn(obj)


def series_tree_to_json(obj):
    """Nested lists of series (vectors, matrices, 3-tensors)."""
    return _map(obj, series_to_json)


def series_tree_from_json(obj):
    if isinstance(obj, list):
        return [series_tree_from_json(x) for x in obj]
    return series_from_json(obj)


def series_tree_text(obj, names):
    return _map(obj, lambda s: s.to_text(names))


def frobenius_to_json(F: FrobeniusData) -> dict:
    return {
        "type": "frobenius",
        "names": list(F.names),
        "C": series_tree_to_json(F.C),
        "g": series_tree_to_json(F.g),
        "unit": series_tree_to_json(F.unit),
        "euler": series_tree_to_json(F.euler),
        "charge": None if F.charge is None else to_text(QQ(F.charge)),
        "flat_coords": F.flat_coords,
        "convention": F.convention,
    }


def frobenius_from_json(obj: dict) -> FrobeniusData:
    charge = obj.get("charge")
    return FrobeniusData(
        tuple(obj["names"]),
        series_tree_from_json(obj["C"]),
        series_tree_from_json(obj["g"]),
        series_tree_from_json(obj["unit"]),
        series_tree_from_json(obj["euler"]),
        None if charge is None else QQ(charge),
        bool(obj.get("flat_coords", False)),
        obj.get("convention", "unit-normalized"),
    )


def presaito_to_json(P: PreSaitoData) -> dict:
    return {
        "type": "presaito",
        "names": list(P.names),
        "rank": P.rank,
        "A": series_tree_to_json(P.A),
        "Phi": series_tree_to_json(P.Phi),
        "R0": series_tree_to_json(P.R0),
        "g": series_tree_to_json(P.g),
        "Rinf": None if P.Rinf is None else series_tree_to_json(P.Rinf),
    }


def presaito_from_json(obj: dict) -> PreSaitoData:
    return PreSaitoData(
        tuple(obj["names"]),
        int(obj["rank"]),
        series_tree_from_json(obj["A"]),
        series_tree_from_json(obj["Phi"]),
        series_tree_from_json(obj["R0"]),
        series_tree_from_json(obj["g"]),
        None if obj.get("Rinf") is None else series_tree_from_json(obj["Rinf"]),
    )


def section_to_json(w: PrimitiveFormSection) -> dict:
    return {"type": "section", "omega": series_tree_to_json(w.omega)}


def section_from_json(obj: dict) -> PrimitiveFormSection:
    return PrimitiveFormSection(series_tree_from_json(obj["omega"]))
