// Command-line front end: parses module definitions (relation scripts and
// JSON), runs the library pipelines, and emits human-readable or JSON
// reports.
//
// Exit codes: 0 success / mathematical "yes" or "pass"; 1 mathematical "no"
// or "fail"; 2 usage or input errors; 3 inconclusive.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "abmod/io.hpp"

using namespace abmod;
using nlohmann::json;

namespace {

struct Options {
    int precision = 12;
    unsigned long seed = 1;
    int trials = 32;
    int threads = 1;
    bool as_json = false;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw Error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ABModule load_module(const std::string& path, const Options& opt) {
    std::string text = slurp(path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        ABModule e = io::module_from_json(json::parse(text));
        return ABModule(e.a_matrix().truncated(opt.precision), e.labels());
    }
    return parser::parse_module(text, opt.precision);
}

void emit(const Options& opt, const std::string& command, const json& result, const std::string& human,
          int effective_precision, double ms) {
    if (opt.as_json) {
        json rep{{"format", 1},
                 {"command", command},
                 {"result", result},
                 {"flags", {{"precision", opt.precision}, {"seed", opt.seed}, {"trials", opt.trials}}},
                 {"effective_precision", effective_precision},
                 {"timing_ms", ms}};
        std::cout << rep.dump(2) << "\n";
    } else {
        std::cout << human;
        std::cerr << "[" << command << " took " << ms << " ms]\n";
    }
}

std::string module_summary(const ABModule& e) {
    std::ostringstream os;
    os << "rank " << e.rank() << ", precision " << e.precision() << "\n";
    os << parser::render_relations(e);
    return os.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
};

int run_unary_functor(const std::string& cmd, const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    ABModule out;
    if (cmd == "dual")
        out = dual(e);
    else if (cmd == "adjoint")
        out = adjoint(e);
    else
        out = conjugate(e);
    emit(opt, cmd, io::to_json(out), module_summary(out), out.precision(), t.ms());
    return 0;
}

int run_binary_functor(const std::string& cmd, const std::string& p1, const std::string& p2,
                       const Options& opt) {
    Timer t;
    ABModule e = load_module(p1, opt), f = load_module(p2, opt);
    ABModule out = cmd == "tensor" ? tensor(e, f) : direct_sum(e, f);
    emit(opt, cmd, io::to_json(out), module_summary(out), out.precision(), t.ms());
    return 0;
}

int run_validate(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    ValidationReport rep = validate(e);
    std::ostringstream os;
    os << (rep.ok ? "pass" : "fail") << " (effective precision " << rep.effective_precision << ")\n";
    for (const auto& f : rep.failures) os << "  " << f << "\n";
    emit(opt, "validate", io::to_json(rep), os.str(), rep.effective_precision, t.ms());
    return rep.ok ? 0 : 1;
}

int run_show(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    emit(opt, "show", io::to_json(e), module_summary(e), e.precision(), t.ms());
    return 0;
}

int run_homs(const std::string& p1, const std::string& p2, const Options& opt) {
    Timer t;
    ABModule e = load_module(p1, opt), f = load_module(p2, opt);
    HomBasis h = solve_hom(e, f);
    std::ostringstream os;
    os << "dim " << h.dim << (h.stable ? " (stable)" : " (not certified stable)") << "\n";
    for (const auto& m : h.morphisms) os << m.matrix().str() << "\n";
    emit(opt, "homs", io::to_json(h), os.str(), e.precision() - 1, t.ms());
    return 0;
}

int run_isomorphic(const std::string& p1, const std::string& p2, const Options& opt) {
    Timer t;
    ABModule e = load_module(p1, opt), f = load_module(p2, opt);
    IsoResult r = are_isomorphic(e, f, opt.trials, opt.seed);
    std::ostringstream os;
    os << io::to_string(r.verdict) << " (hom dim " << r.hom_dim << ")\n";
    emit(opt, "isomorphic", io::to_json(r), os.str(), e.precision() - 1, t.ms());
    if (r.verdict == IsoVerdict::yes) return 0;
    if (r.verdict == IsoVerdict::no) return 1;
    return 3;
}

int run_decompose(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    DecompositionReport rep = krull_schmidt(e, opt.trials, opt.seed);
    std::ostringstream os;
    os << rep.factors.size() << " factor class(es), " << rep.parts.size() << " indecomposable part(s)"
       << (rep.certified ? ", certified" : "") << (rep.inconclusive ? ", INCONCLUSIVE" : "") << "\n";
    for (const auto& [mod, mult] : rep.factors) {
        os << "-- multiplicity " << mult << ", rank " << mod.rank() << ":\n";
        os << parser::render_relations(mod);
    }
    if (!rep.note.empty()) os << "note: " << rep.note << "\n";
    emit(opt, "decompose", io::to_json(rep), os.str(), rep.effective_precision, t.ms());
    return rep.inconclusive ? 3 : 0;
}

int run_comp_series(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    CompositionSeries cs = composition_series(e);
    std::ostringstream os;
    os << "exponents: ";
    std::vector<Scalar> sorted = cs.exponents;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) os << (i ? ", " : "") << sorted[i].str();
    os << (cs.complete ? "" : "  [incomplete: " + cs.note + "]") << "\n";
    emit(opt, "comp-series", io::to_json(cs), os.str(), e.precision(), t.ms());
    return cs.complete ? 0 : 3;
}

int run_regular(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    RegularityReport rep = is_regular(e);
    std::ostringstream os;
    os << io::to_string(rep.verdict) << " (steps " << rep.steps << ", lattice offset " << rep.offset << ")\n";
    if (rep.saturation) {
        os << "saturation at precision " << rep.saturation_precision << ":\n";
        os << parser::render_relations(*rep.saturation);
    }
    if (!rep.note.empty()) os << "note: " << rep.note << "\n";
    emit(opt, "regular", io::to_json(rep), os.str(), rep.saturation ? rep.saturation_precision : e.precision(),
         t.ms());
    if (rep.verdict == Regularity::regular) return 0;
    if (rep.verdict == Regularity::not_regular) return 1;
    return 3;
}

int run_forms(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    std::vector<BMatrix> space = formdetail::pairing_space(e);
    auto [plus, minus] = formdetail::eigen_split(space);
    std::ostringstream os;
    os << "compatible pairing space: dim " << space.size() << " (hermitian part " << plus.size()
       << ", antihermitian part " << minus.size() << ")\n";
    json basis = json::array();
    for (const auto& p : space) basis.push_back(io::to_json(p));
    json result{{"dim", space.size()},
                {"hermitian_dim", plus.size()},
                {"antihermitian_dim", minus.size()},
                {"pairings", basis}};
    emit(opt, "forms", result, os.str(), e.precision() - 1, t.ms());
    return 0;
}

int run_hermitianize(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    try {
        FormVerdict v = hermitianize(e, opt.trials, opt.seed);
        std::ostringstream os;
        os << "verdict: " << to_string(v.kind) << " (pairing space dim " << v.space_dim << ")\n";
        emit(opt, "hermitianize", io::to_json(v), os.str(), e.precision() - 1, t.ms());
        if (!v.certain) return 3;
        return 0;
    } catch (const NotSelfAdjoint&) {
        json result{{"kind", "not self-adjoint"}};
        emit(opt, "hermitianize", result, "verdict: not self-adjoint (no nondegenerate sesquilinear form)\n",
             e.precision() - 1, t.ms());
        return 1;
    }
}

int run_classify(const std::string& path, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    ClassificationReport rep = classify_self_adjoint(e, opt.trials, opt.seed);
    std::ostringstream os;
    os << rep.self_adjoint.size() << " self-adjoint factor class(es), " << rep.paired.size()
       << " adjoint pair(s)" << (rep.multiplicities_consistent ? "" : ", MULTIPLICITY MISMATCH") << "\n";
    for (const auto& f : rep.self_adjoint) {
        os << "-- self-adjoint, multiplicity " << f.multiplicity << ", verdict " << to_string(f.verdict.kind)
           << ":\n"
           << parser::render_relations(f.module);
    }
    for (const auto& p : rep.paired) {
        os << "-- paired with its adjoint, multiplicity " << p.multiplicity << ":\n"
           << parser::render_relations(p.module);
    }
    if (!rep.note.empty()) os << "note: " << rep.note << "\n";
    emit(opt, "classify", io::to_json(rep), os.str(), e.precision() - 1, t.ms());
    return rep.inconclusive ? 3 : 0;
}

int run_saito_extract(const std::string& path, const std::string& delta_str,
                      const std::string& norm_str, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    auto delta = Scalar::parse(delta_str);
    if (!delta) throw Error("bad --delta value");
    std::optional<Scalar> norm;
    if (!norm_str.empty()) {
        norm = Scalar::parse(norm_str);
        if (!norm) throw Error("bad --normalization value");
    }
    auto duality = find_delta_duality(e, *delta, opt.trials, opt.seed);
    if (!duality) {
        emit(opt, "saito-extract", json{{"found", false}},
             "no duality isomorphism onto the delta-dual found\n", e.precision() - 1, t.ms());
        return 1;
    }
    PairingFamily fam = extract_pairings(*duality, *delta, norm);
    std::string human = "duality isomorphism found; family with delta " + delta->str() +
                        ", normalization " + fam.normalization.str() + "\n" +
                        json(io::to_json(fam)).dump(2) + "\n";
    emit(opt, "saito-extract", io::to_json(fam), human, e.precision() - 1, t.ms());
    return 0;
}

int run_saito_check(const std::string& path, const Options& opt) {
    Timer t;
    PairingFamily fam = io::family_from_json(json::parse(slurp(path)));
    AxiomReport ri, rii, riii, riv;
    if (opt.threads > 1) {
        auto fi = std::async(std::launch::async, [&] { return check_axiom_i(fam); });
        auto fii = std::async(std::launch::async, [&] { return check_axiom_ii(fam); });
        auto fiii = std::async(std::launch::async, [&] { return check_axiom_iii_partial(fam); });
        auto fiv = std::async(std::launch::async, [&] { return check_axiom_iv(fam); });
        ri = fi.get();
        rii = fii.get();
        riii = fiii.get();
        riv = fiv.get();
    } else {
        ri = check_axiom_i(fam);
        rii = check_axiom_ii(fam);
        riii = check_axiom_iii_partial(fam);
        riv = check_axiom_iv(fam);
    }
    auto line = [](const char* name, const AxiomReport& r) {
        std::string s = std::string(name) + ": " + (r.pass ? "pass" : "FAIL");
        if (!r.pass) s += " (first failure at level " + std::to_string(r.first_failure) + ")";
        if (!r.detail.empty()) s += " -- " + r.detail;
        return s + "\n";
    };
    std::ostringstream os;
    os << line("i", ri) << line("ii", rii) << line("iii-partial", riii) << line("iv", riv);
    json result{{"axiom_i", io::to_json(ri)},
                {"axiom_ii", io::to_json(rii)},
                {"axiom_iii_partial", io::to_json(riii)},
                {"axiom_iv", io::to_json(riv)}};
    emit(opt, "saito-check", result, os.str(), fam.s.precision(), t.ms());
    return (ri.pass && rii.pass && riii.pass && riv.pass) ? 0 : 1;
}

int run_saito_symmetrize(const std::string& path, const std::string& delta_str, const Options& opt) {
    Timer t;
    ABModule e = load_module(path, opt);
    auto delta = Scalar::parse(delta_str);
    if (!delta) throw Error("bad --delta value");
    auto duality = find_delta_duality(e, *delta, opt.trials, opt.seed);
    if (!duality) {
        emit(opt, "saito-symmetrize", json{{"found", false}},
             "no duality isomorphism onto the delta-dual found\n", e.precision() - 1, t.ms());
        return 1;
    }
    try {
        SymmetrizationReport rep = symmetrize_delta(*duality, *delta);
        std::ostringstream os;
        os << "symmetrized duality" << (rep.fixed_point ? " (already symmetric)" : "") << "\n";
        os << "i: " << (rep.axiom_i.pass ? "pass" : "FAIL") << ", ii: " << (rep.axiom_ii.pass ? "pass" : "FAIL")
           << ", iii-partial: " << (rep.axiom_iii.pass ? "pass" : "FAIL")
           << ", iv: " << (rep.axiom_iv.pass ? "pass" : "FAIL") << "\n";
        emit(opt, "saito-symmetrize", io::to_json(rep), os.str(), e.precision() - 1, t.ms());
        return rep.all_pass ? 0 : 1;
    } catch (const DegenerateSymmetrization& ex) {
        emit(opt, "saito-symmetrize", json{{"error", "degenerate symmetrization"}},
             std::string("degenerate symmetrization: ") + ex.what() + "\n", e.precision() - 1, t.ms());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact calculator for (a,b)-modules: duality, decomposition, hermitian forms, "
                 "higher residue pairings"};
    app.require_subcommand(1);

    Options opt;
    std::string file1, file2, delta_str, norm_str;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--precision", opt.precision, "working precision N (series mod b^N)")
            ->check(CLI::Range(2, 64));
        cmd->add_option("--seed", opt.seed, "seed for randomized searches");
        cmd->add_option("--trials", opt.trials, "trials for randomized identity tests");
        cmd->add_option("--threads", opt.threads, "opt-in parallelism for independent checks");
        cmd->add_flag("--json", opt.as_json, "emit a JSON report");
    };
    auto one_file = [&](CLI::App* cmd) {
        cmd->add_option("file", file1, "module file (.ab or .json)")->required();
        add_common(cmd);
    };
    auto two_files = [&](CLI::App* cmd) {
        cmd->add_option("file1", file1, "first module file")->required();
        cmd->add_option("file2", file2, "second module file")->required();
        add_common(cmd);
    };

    one_file(app.add_subcommand("validate", "check the commutation relation on the presentation"));
    one_file(app.add_subcommand("show", "parse and display a module"));
    one_file(app.add_subcommand("dual", "dual module"));
    one_file(app.add_subcommand("adjoint", "adjoint module"));
    one_file(app.add_subcommand("conjugate", "conjugate module"));
    two_files(app.add_subcommand("tensor", "tensor product"));
    two_files(app.add_subcommand("sum", "direct sum"));
    two_files(app.add_subcommand("homs", "basis of the morphism space"));
    one_file(app.add_subcommand("endos", "basis of the endomorphism space"));
    two_files(app.add_subcommand("isomorphic", "decide isomorphism"));
    one_file(app.add_subcommand("decompose", "Krull-Schmidt decomposition"));
    one_file(app.add_subcommand("comp-series", "composition series exponents"));
    one_file(app.add_subcommand("regular", "regularity and simple-pole saturation"));
    one_file(app.add_subcommand("forms", "compatible sesquilinear pairing space"));
    one_file(app.add_subcommand("hermitianize", "existence of hermitian/antihermitian forms"));
    one_file(app.add_subcommand("classify", "classification of the self-adjoint decomposition"));
    auto* sx = app.add_subcommand("saito-extract", "extract a higher-residue pairing family");
    one_file(sx);
    sx->add_option("--delta", delta_str, "duality weight (n+1 in the geometric setting)")->required();
    sx->add_option("--normalization", norm_str, "normalization (default delta! when integral)");
    auto* sc = app.add_subcommand("saito-check", "check the higher-residue-pairing axioms on a family JSON");
    sc->add_option("file", file1, "family .json file")->required();
    add_common(sc);
    auto* ss = app.add_subcommand("saito-symmetrize", "symmetrize a duality isomorphism");
    one_file(ss);
    ss->add_option("--delta", delta_str, "duality weight")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        std::string cmd = app.get_subcommands()[0]->get_name();
        if (cmd == "validate") return run_validate(file1, opt);
        if (cmd == "show") return run_show(file1, opt);
        if (cmd == "dual" || cmd == "adjoint" || cmd == "conjugate")
            return run_unary_functor(cmd, file1, opt);
        if (cmd == "tensor" || cmd == "sum") return run_binary_functor(cmd, file1, file2, opt);
        if (cmd == "homs") return run_homs(file1, file2, opt);
        if (cmd == "endos") return run_homs(file1, file1, opt);
        if (cmd == "isomorphic") return run_isomorphic(file1, file2, opt);
        if (cmd == "decompose") return run_decompose(file1, opt);
        if (cmd == "comp-series") return run_comp_series(file1, opt);
        if (cmd == "regular") return run_regular(file1, opt);
        if (cmd == "forms") return run_forms(file1, opt);
        if (cmd == "hermitianize") return run_hermitianize(file1, opt);
        if (cmd == "classify") return run_classify(file1, opt);
        if (cmd == "saito-extract") return run_saito_extract(file1, delta_str, norm_str, opt);
        if (cmd == "saito-check") return run_saito_check(file1, opt);
        if (cmd == "saito-symmetrize") return run_saito_symmetrize(file1, delta_str, opt);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
