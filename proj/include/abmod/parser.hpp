#pragma once

#include <map>
#include <string>
#include <vector>

#include "module.hpp"

namespace abmod {

/// Parser for the relation script language (.ab files):
///
///   # comment
///   precision 12
///   lambda = 1
///   mu = 1/3
///   module E
///     a e1 = lambda*b*e1
///     a e2 = mu*b*e2 + e1
///     a e3 = -mu*b*e3 + e1
///     a e4 = -lambda*b*e4 + e2 - e3
///   end
///
/// Right-hand sides are sums of terms; a term is a product of scalar
/// literals (integers, fractions, i), named scalars, powers of b ("b",
/// "b^2"), one optional parenthesized polynomial in b, and exactly one basis
/// symbol. Coefficients must be Gaussian-rational: an unresolved identifier
/// next to a basis symbol is NonRationalCoefficient, a lone one is
/// UndeclaredSymbol.
namespace parser {

struct Token {
    enum Kind { ident, number, punct, end_of_line } kind;
    std::string text;
    int line, col;
};

namespace detail {

inline std::vector<std::vector<Token>> tokenize(const std::string& text) {
    std::vector<std::vector<Token>> lines;
    std::vector<Token> cur;
    int line = 1, col = 1;
    size_t i = 0;
    auto flush = [&]() {
        if (!cur.empty()) lines.push_back(std::move(cur));
        cur.clear();
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            flush();
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
            continue;
        }
        int start_col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string t;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                t += text[i++];
                ++col;
            }
            cur.push_back({Token::ident, t, line, start_col});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string t;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                t += text[i++];
                ++col;
            }
            if (i < text.size() && text[i] == '.')
                throw ParseError("decimal literals are not Gaussian rationals, use fractions", line, col);
            cur.push_back({Token::number, t, line, start_col});
            continue;
        }
        if (std::string("=+-*/^()").find(c) != std::string::npos) {
            cur.push_back({Token::punct, std::string(1, c), line, start_col});
            ++i;
            ++col;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    flush();
    return lines;
}

/// Cursor over one line of tokens.
struct Cursor {
    const std::vector<Token>* toks;
    size_t pos = 0;

    bool done() const { return pos >= toks->size(); }
    const Token& peek() const {
        static Token eol{Token::end_of_line, "", 0, 0};
        return done() ? eol : (*toks)[pos];
    }
    Token take() {
        Token t = peek();
        if (!done()) ++pos;
        return t;
    }
    bool accept(const std::string& p) {
        if (!done() && peek().kind == Token::punct && peek().text == p) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(const std::string& p, const char* what) {
        if (!accept(p)) throw ParseError(std::string("expected '") + p + "' " + what, peek().line, peek().col);
    }
    int line() const { return toks->empty() ? 0 : (*toks)[0].line; }
};

inline bool is_reserved(const std::string& s) {
    return s == "precision" || s == "module" || s == "end" || s == "a" || s == "b" || s == "i";
}

/// A polynomial in b with Scalar coefficients, lowest degree first.
using BPoly = std::vector<Scalar>;

inline BPoly poly_scalar(const Scalar& c) { return {c}; }

inline BPoly poly_mul(const BPoly& a, const BPoly& b) {
    BPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline BPoly poly_add(BPoly a, const BPoly& b, bool subtract) {
    if (a.size() < b.size()) a.resize(b.size());
    for (size_t i = 0; i < b.size(); ++i) a[i] = subtract ? a[i] - b[i] : a[i] + b[i];
    return a;
}

struct ScriptContext {
    std::map<std::string, Scalar> scalars;
};

// rational literal or i or named scalar or b^k; basis symbols handled by the
// caller. Returns nullopt when the next token is not a scalar-ish factor.
inline std::optional<BPoly> parse_scalar_factor(Cursor& cur, const ScriptContext& ctx,
                                                const std::vector<std::string>* basis,
                                                bool* saw_unresolved, std::string* unresolved_name) {
    const Token& t = cur.peek();
    if (t.kind == Token::number) {
        cur.take();
        mpq_class num(t.text);
        if (cur.accept("/")) {
            const Token& d = cur.peek();
            if (d.kind != Token::number) throw ParseError("expected a denominator", d.line, d.col);
            cur.take();
            mpq_class den(d.text);
            if (sgn(den) == 0) throw ParseError("zero denominator", d.line, d.col);
            num /= den;
        }
        num.canonicalize();
        return poly_scalar(Scalar(num));
    }
    if (t.kind == Token::ident) {
        if (t.text == "i") {
            cur.take();
            return poly_scalar(Scalar::i());
        }
        if (t.text == "b") {
            cur.take();
            long k = 1;
            if (cur.accept("^")) {
                const Token& p = cur.peek();
                if (p.kind != Token::number) throw ParseError("expected an exponent after '^'", p.line, p.col);
                cur.take();
                k = std::stol(p.text);
            }
            BPoly r(static_cast<size_t>(k) + 1);
            r[static_cast<size_t>(k)] = Scalar(1);
            return r;
        }
        auto it = ctx.scalars.find(t.text);
        if (it != ctx.scalars.end()) {
            cur.take();
            return poly_scalar(it->second);
        }
        if (basis && std::find(basis->begin(), basis->end(), t.text) != basis->end())
            return std::nullopt; // a basis symbol, not a scalar factor
        // unresolved identifier: defer the diagnosis to the term level
        if (saw_unresolved) {
            *saw_unresolved = true;
            *unresolved_name = t.text;
            cur.take();
            return poly_scalar(Scalar(1));
        }
        throw NonRationalCoefficient(t.text, t.line, t.col);
    }
    return std::nullopt;
}

/// Sum of scalar-polynomial terms, no basis symbols (used inside parentheses
/// and for top-level scalar declarations when allow_b is false).
inline BPoly parse_poly_sum(Cursor& cur, const ScriptContext& ctx, bool allow_b) {
    BPoly total;
    bool first = true;
    while (true) {
        bool neg = false;
        if (cur.accept("-"))
            neg = true;
        else if (cur.accept("+")) {
        } else if (!first) {
            break;
        }
        BPoly term = poly_scalar(Scalar(1));
        bool any = false;
        while (true) {
            const Token& t = cur.peek();
            if (t.kind == Token::ident && !allow_b && t.text == "b")
                throw ParseError("b is not allowed in a scalar declaration", t.line, t.col);
            auto f = parse_scalar_factor(cur, ctx, nullptr, nullptr, nullptr);
            if (!f) {
                if (!any) throw ParseError("expected a term", t.line, t.col);
                break;
            }
            term = poly_mul(term, *f);
            any = true;
            if (!cur.accept("*")) break;
        }
        if (neg) term = poly_mul(term, poly_scalar(Scalar(-1)));
        total = poly_add(total, term, false);
        first = false;
        if (cur.done() || (cur.peek().kind == Token::punct && cur.peek().text == ")")) break;
        if (cur.peek().kind != Token::punct ||
            (cur.peek().text != "+" && cur.peek().text != "-"))
            break;
    }
    return total;
}

} // namespace detail

struct ParsedModule {
    std::string name;
    ABModule module;
};

struct ParsedScript {
    int precision = 12;
    std::map<std::string, Scalar> scalars;
    std::vector<ParsedModule> modules;
};

/// Parses a full relation script. When force_precision >= 0 it overrides the
/// script's precision directive (scripts are polynomial presentations, exact
/// at any precision). validate() is run on every module.
inline ParsedScript parse_script(const std::string& text, int force_precision = -1) {
    using namespace detail;
    ParsedScript out;
    if (force_precision >= 0) out.precision = force_precision;
    ScriptContext ctx;
    auto lines = tokenize(text);

    size_t li = 0;
    while (li < lines.size()) {
        Cursor cur{&lines[li]};
        const Token& head = cur.peek();
        if (head.kind == Token::ident && head.text == "precision") {
            cur.take();
            const Token& n = cur.peek();
            if (n.kind != Token::number) throw ParseError("expected a number after 'precision'", n.line, n.col);
            cur.take();
            if (force_precision < 0) out.precision = std::stoi(n.text);
            ++li;
            continue;
        }
        if (head.kind == Token::ident && head.text == "module") {
            cur.take();
            const Token& name = cur.peek();
            if (name.kind != Token::ident) throw ParseError("expected a module name", name.line, name.col);
            cur.take();
            // first pass: collect the basis symbols from the block's lines
            std::vector<std::string> basis;
            size_t block_start = li + 1;
            size_t bi = block_start;
            for (; bi < lines.size(); ++bi) {
                Cursor c2{&lines[bi]};
                const Token& h2 = c2.peek();
                if (h2.kind == Token::ident && h2.text == "end") break;
                if (h2.kind != Token::ident || h2.text != "a")
                    throw ParseError("expected a relation 'a <symbol> = ...' or 'end'", h2.line, h2.col);
                c2.take();
                const Token& sym = c2.peek();
                if (sym.kind != Token::ident || is_reserved(sym.text))
                    throw ParseError("expected a basis symbol after 'a'", sym.line, sym.col);
                if (ctx.scalars.count(sym.text))
                    throw ParseError("symbol '" + sym.text + "' is already a scalar", sym.line, sym.col);
                if (std::find(basis.begin(), basis.end(), sym.text) != basis.end())
                    throw ParseError("duplicate relation for '" + sym.text + "'", sym.line, sym.col);
                basis.push_back(sym.text);
            }
            if (bi >= lines.size()) throw ParseError("missing 'end' for module block", name.line, name.col);

            int n = static_cast<int>(basis.size());
            int prec = out.precision;
            BMatrix a(n, n, prec);

            // second pass: parse the right-hand sides
            for (size_t ri = block_start; ri < bi; ++ri) {
                Cursor c2{&lines[ri]};
                c2.take(); // 'a'
                Token sym = c2.take();
                int colj = static_cast<int>(std::find(basis.begin(), basis.end(), sym.text) - basis.begin());
                c2.expect("=", "in relation");

                // rhs: sum of terms; "0" allowed
                if (c2.peek().kind == Token::number && c2.peek().text == "0" && c2.pos + 1 == c2.toks->size()) {
                    continue;
                }
                bool first = true;
                while (!c2.done()) {
                    bool neg = false;
                    if (c2.accept("-"))
                        neg = true;
                    else if (c2.accept("+")) {
                    } else if (!first) {
                        throw ParseError("expected '+' or '-' between terms", c2.peek().line, c2.peek().col);
                    }
                    first = false;

                    BPoly coeff = poly_scalar(neg ? Scalar(-1) : Scalar(1));
                    int basis_idx = -1;
                    bool unresolved = false;
                    std::string unresolved_name;
                    while (!c2.done()) {
                        const Token& t = c2.peek();
                        if (t.kind == Token::punct && t.text == "(") {
                            c2.take();
                            coeff = poly_mul(coeff, parse_poly_sum(c2, ctx, true));
                            c2.expect(")", "to close the coefficient");
                        } else if (t.kind == Token::ident &&
                                   std::find(basis.begin(), basis.end(), t.text) != basis.end()) {
                            if (basis_idx >= 0)
                                throw ParseError("two basis symbols in one term", t.line, t.col);
                            basis_idx = static_cast<int>(
                                std::find(basis.begin(), basis.end(), t.text) - basis.begin());
                            c2.take();
                        } else {
                            auto f = parse_scalar_factor(c2, ctx, &basis, &unresolved, &unresolved_name);
                            if (!f) throw ParseError("expected a factor", t.line, t.col);
                            coeff = poly_mul(coeff, *f);
                        }
                        if (!c2.accept("*")) break;
                    }
                    if (basis_idx < 0) {
                        if (unresolved) throw UndeclaredSymbol(unresolved_name, sym.line, sym.col);
                        throw ParseError("term has no basis symbol", sym.line, sym.col);
                    }
                    if (unresolved)
                        throw NonRationalCoefficient(unresolved_name, sym.line, sym.col);
                    // accumulate the polynomial into A[basis_idx][colj]
                    BSeries add(prec);
                    for (size_t k = 0; k < coeff.size() && k < static_cast<size_t>(prec); ++k)
                        add.set_coeff(static_cast<int>(k), coeff[k]);
                    a.at(basis_idx, colj) = a.at(basis_idx, colj) + add;
                }
            }
            ABModule mod(a, basis);
            ValidationReport rep = validate(mod);
            if (!rep.ok) throw Error("parsed module fails validation");
            out.modules.push_back({name.text, std::move(mod)});
            li = bi + 1;
            continue;
        }
        if (head.kind == Token::ident && !is_reserved(head.text)) {
            // scalar declaration IDENT = scalarExpr
            Token name = cur.take();
            cur.expect("=", "in scalar declaration");
            BPoly v = parse_poly_sum(cur, ctx, false);
            if (!cur.done()) throw ParseError("trailing tokens after scalar declaration", cur.peek().line, cur.peek().col);
            if (v.size() > 1) throw ParseError("scalar declaration must not involve b", name.line, name.col);
            ctx.scalars[name.text] = v.empty() ? Scalar(0) : v[0];
            out.scalars[name.text] = ctx.scalars[name.text];
            ++li;
            continue;
        }
        throw ParseError("expected 'precision', 'module', or a scalar declaration", head.line, head.col);
    }
    return out;
}

/// Parses a script expected to define exactly one module.
inline ABModule parse_module(const std::string& text, int force_precision = -1) {
    ParsedScript s = parse_script(text, force_precision);
    if (s.modules.empty()) throw Error("script defines no module");
    if (s.modules.size() > 1) throw Error("script defines more than one module");
    return s.modules[0].module;
}

/// Parse-safe versions of the module's labels (functor-generated names carry
/// characters outside the identifier grammar).
inline std::vector<std::string> safe_labels(const ABModule& e) {
    std::vector<std::string> out;
    for (int j = 0; j < e.rank(); ++j) {
        std::string raw = e.labels()[static_cast<size_t>(j)];
        std::string s;
        for (char c : raw) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
        if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) s = "e" + s;
        if (detail::is_reserved(s)) s += "_";
        while (std::find(out.begin(), out.end(), s) != out.end()) s += "_" + std::to_string(j);
        out.push_back(s);
    }
    return out;
}

/// Renders a module back into relation-script lines ("a e1 = ...");
/// parse_module of the result reproduces the presentation.
inline std::string render_relations(const ABModule& e0) {
    ABModule e = e0.with_labels(safe_labels(e0));
    std::string out;
    for (int j = 0; j < e.rank(); ++j) {
        std::string rhs;
        for (int i = 0; i < e.rank(); ++i) {
            const BSeries& c = e.a_matrix().at(i, j);
            for (int k = 0; k < c.precision(); ++k) {
                Scalar v = c.coeff(k);
                if (v.is_zero()) continue;
                std::string vs = v.str();
                // pure negative values flip across the sign; composite ones
                // keep their parentheses
                bool pure_negative = vs[0] == '-' && vs.find('+', 1) == std::string::npos &&
                                     vs.find('-', 1) == std::string::npos;
                std::string op = rhs.empty() ? (pure_negative ? "-" : "")
                                             : (pure_negative ? " - " : " + ");
                Scalar mag = pure_negative ? -v : v;
                std::string ms = mag.str();
                bool composite = ms.find('+') != std::string::npos || ms.find('-', 1) != std::string::npos ||
                                 ms[0] == '-';
                std::vector<std::string> factors;
                if (!mag.is_one()) factors.push_back(composite ? "(" + ms + ")" : ms);
                if (k == 1) factors.push_back("b");
                if (k > 1) factors.push_back("b^" + std::to_string(k));
                factors.push_back(e.labels()[static_cast<size_t>(i)]);
                std::string term;
                for (size_t f = 0; f < factors.size(); ++f) term += (f ? "*" : "") + factors[f];
                rhs += op + term;
            }
        }
        out += "a " + e.labels()[static_cast<size_t>(j)] + " = " + (rhs.empty() ? "0" : rhs) + "\n";
    }
    return out;
}

} // namespace parser

} // namespace abmod
