#include "spex/Formula.h"

#include "spex/Error.h"

#include <cctype>
#include <functional>

namespace spex {

bool VarLess::operator()(std::string const & lhs, std::string const & rhs) const {
    std::size_t i = 0;
    std::size_t j = 0;
    auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (i < lhs.size() and j < rhs.size()) {
        if (digit(lhs[i]) and digit(rhs[j])) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < lhs.size() and digit(lhs[ie])) { ++ie; }
            while (je < rhs.size() and digit(rhs[je])) { ++je; }
            std::size_t is = i;
            std::size_t js = j;
            while (is + 1 < ie and lhs[is] == '0') { ++is; }
            while (js + 1 < je and rhs[js] == '0') { ++js; }
            if (ie - is != je - js) { return ie - is < je - js; }
            if (int c = lhs.compare(is, ie - is, rhs, js, je - js); c != 0) { return c < 0; }
            if (ie - i != je - j) { return ie - i < je - j; }
            i = ie;
            j = je;
        } else {
            if (lhs[i] != rhs[j]) { return lhs[i] < rhs[j]; }
            ++i;
            ++j;
        }
    }
    return lhs.size() - i < rhs.size() - j;
}

LinearTerm::LinearTerm(std::initializer_list<std::pair<std::string const, Rational>> init) {
    for (auto const & [var, coefficient] : init) { add(var, coefficient); }
}

LinearTerm LinearTerm::variable(std::string name, Rational coefficient) {
    LinearTerm t;
    t.add(name, coefficient);
    return t;
}

void LinearTerm::add(std::string const & var, Rational const & coefficient) {
    if (coefficient == 0) { return; }
    auto [it, inserted] = coeffs.try_emplace(var, coefficient);
    if (not inserted) {
        it->second += coefficient;
        if (it->second == 0) { coeffs.erase(it); }
    }
}

void LinearTerm::addScaled(LinearTerm const & other, Rational const & factor) {
    if (factor == 0) { return; }
    for (auto const & [var, coefficient] : other.coeffs) { add(var, coefficient * factor); }
}

Rational LinearTerm::coefficient(std::string const & var) const {
    auto it = coeffs.find(var);
    return it == coeffs.end() ? Rational(0) : it->second;
}

LinearTerm LinearTerm::scaled(Rational const & factor) const {
    LinearTerm result;
    if (factor == 0) { return result; }
    for (auto const & [var, coefficient] : coeffs) { result.coeffs.emplace(var, coefficient * factor); }
    return result;
}

Rational LinearTerm::evaluate(Assignment const & values) const {
    Rational sum = 0;
    for (auto const & [var, coefficient] : coeffs) {
        auto it = values.find(var);
        if (it == values.end()) { throw UnknownNameError("no value for variable '" + var + "'"); }
        sum += coefficient * it->second;
    }
    return sum;
}

std::string_view toString(Relation r) {
    switch (r) {
        case Relation::Le: return "<=";
        case Relation::Lt: return "<";
        case Relation::Eq: return "=";
        case Relation::Ge: return ">=";
        case Relation::Gt: return ">";
    }
    return "?";
}

bool holds(Relation r, Rational const & lhs, Rational const & rhs) {
    switch (r) {
        case Relation::Le: return lhs <= rhs;
        case Relation::Lt: return lhs < rhs;
        case Relation::Eq: return lhs == rhs;
        case Relation::Ge: return lhs >= rhs;
        case Relation::Gt: return lhs > rhs;
    }
    return false;
}

bool isStrict(Relation r) {
    return r == Relation::Lt or r == Relation::Gt;
}

Atom Atom::canonical() const {
    if (term.empty()) { return *this; }
    mpz_class denLcm = 1;
    for (auto const & [var, c] : term) { mpz_lcm(denLcm.get_mpz_t(), denLcm.get_mpz_t(), c.get_den_mpz_t()); }
    mpz_class numGcd = 0;
    for (auto const & [var, c] : term) {
        mpz_class scaledNum = c.get_num() * (denLcm / c.get_den());
        mpz_gcd(numGcd.get_mpz_t(), numGcd.get_mpz_t(), scaledNum.get_mpz_t());
    }
    Rational factor(denLcm, numGcd);
    factor.canonicalize();
    if (rel == Relation::Eq and term.begin()->second < 0) { factor = -factor; }
    return Atom{term.scaled(factor), rel, constant * factor};
}

bool Atom::operator==(Atom const & other) const {
    if (rel != other.rel) { return false; }
    auto a = canonical();
    auto b = other.canonical();
    return a.term == b.term and a.constant == b.constant;
}

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
    static auto const node = std::make_shared<Node const>(Node{Kind::True, {}, {}, {}});
    return Formula(node);
}

Formula Formula::bottom() {
    static auto const node = std::make_shared<Node const>(Node{Kind::False, {}, {}, {}});
    return Formula(node);
}

Formula Formula::atom(Atom a) {
    if (a.term.empty()) { return holds(a.rel, Rational(0), a.constant) ? top() : bottom(); }
    return Formula(std::make_shared<Node const>(Node{Kind::Atom, std::move(a), {}, {}}));
}

Formula Formula::atom(LinearTerm term, Relation rel, Rational constant) {
    return atom(Atom{std::move(term), rel, std::move(constant)});
}

Formula Formula::conj(std::vector<Formula> children) {
    std::vector<Formula> flat;
    flat.reserve(children.size());
    for (auto & child : children) {
        if (child.isTrue()) { continue; }
        if (child.isFalse()) { return bottom(); }
        if (child.isAnd() and child.label().empty()) {
            flat.insert(flat.end(), child.children().begin(), child.children().end());
        } else {
            flat.push_back(std::move(child));
        }
    }
    if (flat.empty()) { return top(); }
    if (flat.size() == 1) { return flat.front(); }
    return Formula(std::make_shared<Node const>(Node{Kind::And, {}, std::move(flat), {}}));
}

Formula Formula::disj(std::vector<Formula> children) {
    std::vector<Formula> flat;
    flat.reserve(children.size());
    for (auto & child : children) {
        if (child.isFalse()) { continue; }
        if (child.isTrue()) { return top(); }
        if (child.isOr() and child.label().empty()) {
            flat.insert(flat.end(), child.children().begin(), child.children().end());
        } else {
            flat.push_back(std::move(child));
        }
    }
    if (flat.empty()) { return bottom(); }
    if (flat.size() == 1) { return flat.front(); }
    return Formula(std::make_shared<Node const>(Node{Kind::Or, {}, std::move(flat), {}}));
}

Formula Formula::withLabel(std::string newLabel) const {
    if (isTrue() or isFalse()) {
        return Formula(std::make_shared<Node const>(Node{kind(), {}, {}, std::move(newLabel)}));
    }
    return Formula(std::make_shared<Node const>(Node{kind(), node->atom, node->children, std::move(newLabel)}));
}

bool Formula::operator==(Formula const & other) const {
    if (node == other.node) { return true; }
    if (kind() != other.kind()) { return false; }
    switch (kind()) {
        case Kind::True:
        case Kind::False: return true;
        case Kind::Atom: return getAtom() == other.getAtom();
        case Kind::And:
        case Kind::Or: return children() == other.children();
    }
    return false;
}

bool eval(Formula const & f, Assignment const & values) {
    switch (f.kind()) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::Atom: return f.getAtom().holdsAt(values);
        case Formula::Kind::And:
            for (auto const & child : f.children()) {
                if (not eval(child, values)) { return false; }
            }
            return true;
        case Formula::Kind::Or:
            for (auto const & child : f.children()) {
                if (eval(child, values)) { return true; }
            }
            return false;
    }
    return false;
}

bool eval(Formula const & f, std::span<Rational const> point, std::span<std::string const> names) {
    if (point.size() != names.size()) { throw DimensionError("point and name list differ in length"); }
    Assignment values;
    for (std::size_t i = 0; i < names.size(); ++i) { values.emplace(names[i], point[i]); }
    return eval(f, values);
}

Formula substitute(Formula const & f, Assignment const & values) {
    if (values.empty()) { return f; }
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False: return f;
        case Formula::Kind::Atom: {
            auto const & a = f.getAtom();
            bool touched = false;
            LinearTerm term;
            Rational constant = a.constant;
            for (auto const & [var, c] : a.term) {
                if (auto it = values.find(var); it != values.end()) {
                    constant -= c * it->second;
                    touched = true;
                } else {
                    term.add(var, c);
                }
            }
            if (not touched) { return f; }
            auto result = Formula::atom(std::move(term), a.rel, std::move(constant));
            return f.label().empty() or result.isTrue() or result.isFalse() ? result : result.withLabel(f.label());
        }
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::vector<Formula> children;
            children.reserve(f.children().size());
            for (auto const & child : f.children()) { children.push_back(substitute(child, values)); }
            auto result = f.isAnd() ? Formula::conj(std::move(children)) : Formula::disj(std::move(children));
            if (not f.label().empty() and result.kind() == f.kind()) { return result.withLabel(f.label()); }
            return result;
        }
    }
    return f;
}

Formula negate(Formula const & f) {
    switch (f.kind()) {
        case Formula::Kind::True: return Formula::bottom();
        case Formula::Kind::False: return Formula::top();
        case Formula::Kind::Atom: {
            auto const & a = f.getAtom();
            switch (a.rel) {
                case Relation::Le: return Formula::atom(a.term, Relation::Gt, a.constant);
                case Relation::Lt: return Formula::atom(a.term, Relation::Ge, a.constant);
                case Relation::Ge: return Formula::atom(a.term, Relation::Lt, a.constant);
                case Relation::Gt: return Formula::atom(a.term, Relation::Le, a.constant);
                case Relation::Eq:
                    return Formula::disj({Formula::atom(a.term, Relation::Lt, a.constant),
                                          Formula::atom(a.term, Relation::Gt, a.constant)});
            }
            return f;
        }
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::vector<Formula> children;
            children.reserve(f.children().size());
            for (auto const & child : f.children()) { children.push_back(negate(child)); }
            return f.isAnd() ? Formula::disj(std::move(children)) : Formula::conj(std::move(children));
        }
    }
    return f;
}

std::size_t countTerms(Formula const & f) {
    if (f.isAtom()) { return 1; }
    std::size_t total = 0;
    for (auto const & child : f.children()) { total += countTerms(child); }
    return total;
}

namespace {
void collectVariables(Formula const & f, VarSet & out) {
    if (f.isAtom()) {
        for (auto const & [var, c] : f.getAtom().term) { out.insert(var); }
        return;
    }
    for (auto const & child : f.children()) { collectVariables(child, out); }
}
} // namespace

VarSet variables(Formula const & f) {
    VarSet result;
    collectVariables(f, result);
    return result;
}

std::vector<Formula> conjuncts(Formula const & f) {
    if (f.isTrue()) { return {}; }
    if (f.isAnd()) { return f.children(); }
    return {f};
}

namespace {
void print(Formula const & f, std::string & out) {
    switch (f.kind()) {
        case Formula::Kind::True: out += "true"; return;
        case Formula::Kind::False: out += "false"; return;
        case Formula::Kind::Atom: {
            auto a = f.getAtom().canonical();
            out += '(';
            out += toString(a.rel);
            out += ' ';
            auto item = [&out](std::string const & var, Rational const & c) {
                if (c == 1) {
                    out += var;
                } else {
                    out += "(* " + toString(c) + " " + var + ")";
                }
            };
            if (a.term.size() == 1) {
                item(a.term.begin()->first, a.term.begin()->second);
            } else {
                out += "(+";
                for (auto const & [var, c] : a.term) {
                    out += ' ';
                    item(var, c);
                }
                out += ')';
            }
            out += ' ';
            out += toString(a.constant);
            out += ')';
            return;
        }
        case Formula::Kind::And:
        case Formula::Kind::Or:
            out += f.isAnd() ? "(and" : "(or";
            for (auto const & child : f.children()) {
                out += ' ';
                print(child, out);
            }
            out += ')';
            return;
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : src{text} {}

    Formula parseAll() {
        auto f = formula();
        skipSpace();
        if (pos != src.size()) { throw ParseError("trailing input", pos); }
        return f;
    }

private:
    void skipSpace() {
        while (pos < src.size() and std::isspace(static_cast<unsigned char>(src[pos]))) { ++pos; }
    }

    bool peek(char c) {
        skipSpace();
        return pos < src.size() and src[pos] == c;
    }

    void expect(char c) {
        skipSpace();
        if (pos >= src.size()) { throw ParseError(std::string("unexpected end of input, expected '") + c + "'", pos); }
        if (src[pos] != c) { throw ParseError(std::string("expected '") + c + "'", pos); }
        ++pos;
    }

    std::string symbol() {
        skipSpace();
        std::size_t start = pos;
        while (pos < src.size() and not std::isspace(static_cast<unsigned char>(src[pos])) and src[pos] != '('
               and src[pos] != ')') {
            ++pos;
        }
        if (start == pos) {
            if (pos >= src.size()) { throw ParseError("unexpected end of input", pos); }
            throw ParseError("expected a symbol", pos);
        }
        return std::string(src.substr(start, pos - start));
    }

    Rational rational() {
        skipSpace();
        std::size_t start = pos;
        auto text = symbol();
        try {
            return parseRational(text);
        } catch (ParseError const &) {
            throw ParseError("invalid rational '" + text + "'", start);
        }
    }

    static bool isVariableName(std::string const & s) {
        return not s.empty() and (std::isalpha(static_cast<unsigned char>(s[0])) or s[0] == '_');
    }

    std::string variable() {
        skipSpace();
        std::size_t start = pos;
        auto name = symbol();
        if (not isVariableName(name)) { throw ParseError("expected a variable, got '" + name + "'", start); }
        return name;
    }

    void item(LinearTerm & term) {
        if (peek('(')) {
            expect('(');
            skipSpace();
            std::size_t start = pos;
            if (symbol() != "*") { throw ParseError("expected '*'", start); }
            auto c = rational();
            auto v = variable();
            expect(')');
            term.add(v, c);
        } else {
            term.add(variable(), 1);
        }
    }

    LinearTerm sum() {
        LinearTerm term;
        if (peek('(')) {
            std::size_t save = pos;
            expect('(');
            skipSpace();
            if (pos < src.size() and src[pos] == '+') {
                ++pos;
                while (not peek(')')) {
                    if (pos >= src.size()) { throw ParseError("unexpected end of input in sum", pos); }
                    item(term);
                }
                expect(')');
                return term;
            }
            pos = save;
        }
        item(term);
        return term;
    }

    Formula formula() {
        skipSpace();
        if (pos >= src.size()) { throw ParseError("unexpected end of input", pos); }
        if (src[pos] != '(') {
            std::size_t start = pos;
            auto s = symbol();
            if (s == "true") { return Formula::top(); }
            if (s == "false") { return Formula::bottom(); }
            throw ParseError("unexpected symbol '" + s + "'", start);
        }
        expect('(');
        std::size_t start = pos;
        auto head = symbol();
        if (head == "and" or head == "or") {
            std::vector<Formula> children;
            while (not peek(')')) {
                if (pos >= src.size()) { throw ParseError("unexpected end of input", pos); }
                children.push_back(formula());
            }
            expect(')');
            return head == "and" ? Formula::conj(std::move(children)) : Formula::disj(std::move(children));
        }
        Relation rel;
        if (head == "<=") {
            rel = Relation::Le;
        } else if (head == "<") {
            rel = Relation::Lt;
        } else if (head == "=") {
            rel = Relation::Eq;
        } else if (head == ">=") {
            rel = Relation::Ge;
        } else if (head == ">") {
            rel = Relation::Gt;
        } else {
            throw ParseError("unknown operator '" + head + "'", start);
        }
        auto term = sum();
        auto constant = rational();
        expect(')');
        return Formula::atom(std::move(term), rel, std::move(constant));
    }

    std::string_view src;
    std::size_t pos = 0;
};
} // namespace

std::string toString(Formula const & f) {
    std::string out;
    print(f, out);
    return out;
}

Formula parseFormula(std::string_view text) {
    return Parser(text).parseAll();
}

} // namespace spex
