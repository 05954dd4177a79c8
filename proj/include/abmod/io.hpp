#pragma once

#include <json.hpp>

#include "forms.hpp"
#include "parser.hpp"
#include "saito.hpp"
#include "structure.hpp"

namespace abmod {

/// JSON serialization for every object named in the file-format contract.
/// All schemas carry "format": 1; series are coefficient lists of canonical
/// scalar strings plus an explicit precision.
namespace io {

using nlohmann::json;

inline json to_json(const BSeries& s) {
    json coeffs = json::array();
    for (int k = 0; k < s.precision(); ++k) coeffs.push_back(s.coeff(k).str());
    return json{{"coeffs", coeffs}, {"precision", s.precision()}};
}

inline BSeries series_from_json(const json& j) {
    if (!j.contains("coeffs") || !j.contains("precision")) throw Error("series JSON needs coeffs and precision");
    int prec = j["precision"].get<int>();
    BSeries s(prec);
    int k = 0;
    for (const auto& c : j["coeffs"]) {
        auto v = Scalar::parse(c.get<std::string>());
        if (!v) throw Error("bad scalar literal in series: " + c.get<std::string>());
        s.set_coeff(k++, *v);
    }
    return s;
}

inline json to_json(const BMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline BMatrix matrix_from_json(const json& j, int precision) {
    int rows = static_cast<int>(j.size());
    int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
    BMatrix m(rows, cols, precision);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw Error("ragged matrix JSON");
        for (int c = 0; c < cols; ++c) m.at(i, c) = series_from_json(j[i][c]).truncated(precision);
    }
    return m;
}

inline json to_json(const ABModule& e) {
    return json{{"format", 1},
                {"rank", e.rank()},
                {"precision", e.precision()},
                {"labels", e.labels()},
                {"a_matrix", to_json(e.a_matrix())}};
}

inline ABModule module_from_json(const json& j) {
    if (!j.contains("a_matrix") || !j.contains("precision")) throw Error("module JSON needs a_matrix and precision");
    int prec = j["precision"].get<int>();
    BMatrix a = matrix_from_json(j["a_matrix"], prec);
    std::vector<std::string> labels;
    if (j.contains("labels"))
        for (const auto& l : j["labels"]) labels.push_back(l.get<std::string>());
    ABModule e(a, labels);
    if (j.contains("rank") && j["rank"].get<int>() != e.rank()) throw Error("module JSON rank mismatch");
    return e;
}

inline json to_json(const ABMorphism& f) {
    return json{{"format", 1},
                {"domain", to_json(f.domain())},
                {"codomain", to_json(f.codomain())},
                {"matrix", to_json(f.matrix())}};
}

inline ABMorphism morphism_from_json(const json& j) {
    ABModule dom = module_from_json(j.at("domain"));
    ABModule cod = module_from_json(j.at("codomain"));
    int prec = std::min(dom.precision(), cod.precision());
    if (j.at("matrix").size() > 0 && j.at("matrix")[0].size() > 0)
        prec = std::min(prec, j.at("matrix")[0][0].at("precision").get<int>());
    return ABMorphism(dom, cod, matrix_from_json(j.at("matrix"), prec));
}

inline json to_json(const SesquilinearForm& h) {
    json out{{"format", 1}, {"module", to_json(h.module)}, {"pairing", to_json(h.pairing)}};
    out["kind"] = to_string(hermitian_type(h));
    return out;
}

inline SesquilinearForm form_from_json(const json& j) {
    ABModule e = module_from_json(j.at("module"));
    int prec = e.precision();
    return SesquilinearForm{e, matrix_from_json(j.at("pairing"), prec)};
}

inline json to_json(const PairingFamily& p) {
    return json{{"format", 1},
                {"delta", p.delta.str()},
                {"normalization", p.normalization.str()},
                {"module", to_json(p.module)},
                {"S", to_json(p.s)}};
}

inline PairingFamily family_from_json(const json& j) {
    auto delta = Scalar::parse(j.at("delta").get<std::string>());
    auto norm = Scalar::parse(j.at("normalization").get<std::string>());
    if (!delta || !norm) throw Error("bad delta/normalization in family JSON");
    ABModule e = module_from_json(j.at("module"));
    BMatrix s = matrix_from_json(j.at("S"), j.at("S")[0][0].at("precision").get<int>());
    return make_family(e, *delta, *norm, s);
}

// --- report objects (CLI output only; no parsers needed) ---

inline json to_json(const ValidationReport& r) {
    return json{{"ok", r.ok}, {"effective_precision", r.effective_precision}, {"failures", r.failures}};
}

inline json to_json(const HomBasis& h) {
    json basis = json::array();
    for (const auto& m : h.morphisms) basis.push_back(to_json(m.matrix()));
    return json{{"dim", h.dim}, {"stable", h.stable}, {"basis", basis}};
}

inline const char* to_string(IsoVerdict v) {
    switch (v) {
        case IsoVerdict::yes: return "yes";
        case IsoVerdict::no: return "no";
        default: return "inconclusive";
    }
}

inline json to_json(const IsoResult& r) {
    json out{{"verdict", to_string(r.verdict)}, {"hom_dim", r.hom_dim}};
    if (r.witness) out["witness"] = to_json(r.witness->matrix());
    return out;
}

inline json to_json(const DecompositionReport& r) {
    json factors = json::array();
    for (const auto& [mod, mult] : r.factors)
        factors.push_back(json{{"module", to_json(mod)}, {"multiplicity", mult}});
    return json{{"factors", factors},
                {"parts", r.parts.size()},
                {"witness", to_json(r.witness)},
                {"certified", r.certified},
                {"inconclusive", r.inconclusive},
                {"effective_precision", r.effective_precision},
                {"note", r.note}};
}

inline const char* to_string(Regularity r) {
    switch (r) {
        case Regularity::regular: return "regular";
        case Regularity::not_regular: return "not_regular";
        default: return "inconclusive";
    }
}

inline json to_json(const RegularityReport& r) {
    json out{{"verdict", to_string(r.verdict)}, {"steps", r.steps}, {"offset", r.offset}, {"note", r.note}};
    if (r.saturation) {
        out["saturation"] = to_json(*r.saturation);
        out["saturation_precision"] = r.saturation_precision;
    }
    return out;
}

inline json to_json(const CompositionSeries& c) {
    json exps = json::array();
    for (const auto& x : c.exponents) exps.push_back(x.str());
    return json{{"exponents", exps}, {"complete", c.complete}, {"note", c.note}};
}

inline json to_json(const ExponentReport& r) {
    json classes = json::array();
    for (const auto& c : r.classes) {
        json exps = json::array();
        for (const auto& x : c.exponents) exps.push_back(x.str());
        classes.push_back(json{{"class_min", c.class_min.str()}, {"exponents", exps}});
    }
    return json{{"classes", classes}, {"complete", r.complete}};
}

inline json to_json(const FormVerdict& v) {
    json out{{"kind", to_string(v.kind)}, {"space_dim", v.space_dim}, {"certain", v.certain}};
    if (v.hermitian_witness) out["hermitian_witness"] = to_json(*v.hermitian_witness);
    if (v.antihermitian_witness) out["antihermitian_witness"] = to_json(*v.antihermitian_witness);
    return out;
}

inline json to_json(const ClassificationReport& r) {
    json sa = json::array();
    for (const auto& f : r.self_adjoint)
        sa.push_back(json{{"module", to_json(f.module)},
                          {"multiplicity", f.multiplicity},
                          {"verdict", to_json(f.verdict)}});
    json pa = json::array();
    for (const auto& p : r.paired)
        pa.push_back(json{{"module", to_json(p.module)},
                          {"adjoint_partner", to_json(p.adjoint_partner)},
                          {"multiplicity", p.multiplicity}});
    return json{{"self_adjoint", sa},
                {"paired", pa},
                {"multiplicities_consistent", r.multiplicities_consistent},
                {"certified", r.certified},
                {"inconclusive", r.inconclusive},
                {"note", r.note}};
}

inline json to_json(const AxiomReport& r) {
    return json{{"pass", r.pass}, {"first_failure", r.first_failure}, {"detail", r.detail}};
}

inline json to_json(const SymmetrizationReport& r) {
    return json{{"symmetrized", to_json(r.symmetrized.matrix())},
                {"family", to_json(r.family)},
                {"fixed_point", r.fixed_point},
                {"delta0_unchanged", r.delta0_unchanged},
                {"axiom_i", to_json(r.axiom_i)},
                {"axiom_ii", to_json(r.axiom_ii)},
                {"axiom_iii_partial", to_json(r.axiom_iii)},
                {"axiom_iv", to_json(r.axiom_iv)},
                {"all_pass", r.all_pass}};
}

} // namespace io

} // namespace abmod
