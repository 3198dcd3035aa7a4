#include "spex/Simplex.h"

#include "spex/Error.h"

#include <algorithm>
#include <cassert>
#include <unordered_map>

namespace spex {

std::strong_ordering DeltaRational::operator<=>(DeltaRational const & other) const {
    if (int c = cmp(real, other.real); c != 0) { return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater; }
    int c = cmp(delta, other.delta);
    if (c == 0) { return std::strong_ordering::equal; }
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

DeltaRational & DeltaRational::operator+=(DeltaRational const & o) {
    real += o.real;
    delta += o.delta;
    return *this;
}

int orientation(Relation r) {
    return (r == Relation::Ge or r == Relation::Gt) ? -1 : 1;
}

namespace {

using Var = std::size_t;
using Row = std::vector<std::pair<Var, Rational>>; // sorted by variable

struct Bound {
    DeltaRational value;
    AtomId atom;
    /// Multiplier on the atom per unit multiplier on this bound.
    Rational toAtom;
};

struct VarState {
    DeltaRational value;
    std::optional<Bound> lower;
    std::optional<Bound> upper;
    std::optional<std::size_t> row; // set iff basic
};

struct TrailEntry {
    Var var;
    bool upper;
    std::optional<Bound> previous;
};

struct BoundUse {
    Bound const * bound;
    Rational weight; // non-negative
    bool upper;
};

Rational const * findCoefficient(Row const & row, Var v) {
    auto it = std::lower_bound(row.begin(), row.end(), v, [](auto const & e, Var x) { return e.first < x; });
    if (it == row.end() or it->first != v) { return nullptr; }
    return &it->second;
}

/// row += factor * other, skipping `skip`.
void addScaledRow(Row & row, Row const & other, Rational const & factor, Var skip) {
    Row merged;
    merged.reserve(row.size() + other.size());
    auto a = row.begin();
    auto b = other.begin();
    while (a != row.end() or b != other.end()) {
        if (b != other.end() and b->first == skip) {
            ++b;
            continue;
        }
        if (b == other.end() or (a != row.end() and a->first < b->first)) {
            merged.push_back(std::move(*a));
            ++a;
        } else if (a == row.end() or b->first < a->first) {
            merged.emplace_back(b->first, b->second * factor);
            ++b;
        } else {
            Rational sum = a->second + b->second * factor;
            if (sum != 0) { merged.emplace_back(a->first, std::move(sum)); }
            ++a;
            ++b;
        }
    }
    row = std::move(merged);
}

} // namespace

struct Simplex::Impl {
    std::vector<VarState> vars;
    std::vector<std::string> originalNames; // index < originalNames.size() only for original vars
    std::vector<bool> isOriginal;
    std::unordered_map<std::string, Var> byName;
    std::unordered_map<std::string, Var> slackByKey;
    std::vector<Row> rows;
    std::vector<Var> rowBasic;
    std::vector<TrailEntry> trail;
    std::vector<std::size_t> marks;
    std::unordered_map<AtomId, std::pair<Relation, Rational>> assertedAtoms;
    std::size_t checks = 0;
    std::size_t pivots = 0;

    Var originalVar(std::string const & name) {
        if (auto it = byName.find(name); it != byName.end()) { return it->second; }
        Var v = vars.size();
        vars.emplace_back();
        isOriginal.push_back(true);
        byName.emplace(name, v);
        originalNames.resize(vars.size());
        originalNames[v] = name;
        return v;
    }

    /// term = alpha * d_v, with d_v having leading coefficient 1.
    std::pair<Var, Rational> resolve(LinearTerm const & term) {
        Rational alpha = term.begin()->second;
        if (term.size() == 1) { return {originalVar(term.begin()->first), alpha}; }
        std::string key;
        for (auto const & [name, c] : term) {
            key += name;
            key += ':';
            key += toString(c / alpha);
            key += ';';
        }
        if (auto it = slackByKey.find(key); it != slackByKey.end()) { return {it->second, alpha}; }

        Row row;
        std::map<Var, Rational> dense;
        for (auto const & [name, c] : term) {
            Var v = originalVar(name);
            Rational coefficient = c / alpha;
            if (vars[v].row) {
                for (auto const & [nb, a] : rows[*vars[v].row]) { dense[nb] += a * coefficient; }
            } else {
                dense[v] += coefficient;
            }
        }
        Var slack = vars.size();
        vars.emplace_back();
        isOriginal.push_back(false);
        DeltaRational value;
        for (auto & [v, a] : dense) {
            if (a == 0) { continue; }
            value += vars[v].value * a;
            row.emplace_back(v, std::move(a));
        }
        vars[slack].value = value;
        vars[slack].row = rows.size();
        rows.push_back(std::move(row));
        rowBasic.push_back(slack);
        slackByKey.emplace(std::move(key), slack);
        return {slack, alpha};
    }

    void update(Var v, DeltaRational const & target) {
        DeltaRational diff = target - vars[v].value;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (auto const * a = findCoefficient(rows[r], v)) { vars[rowBasic[r]].value += diff * *a; }
        }
        vars[v].value = target;
    }

    void pivotAndUpdate(Var basic, Var entering, DeltaRational const & target) {
        std::size_t const r = *vars[basic].row;
        Rational const a = *findCoefficient(rows[r], entering);
        DeltaRational theta = (target - vars[basic].value) * (Rational(1) / a);
        vars[basic].value = target;
        vars[entering].value += theta;
        for (std::size_t other = 0; other < rows.size(); ++other) {
            if (other == r) { continue; }
            if (auto const * c = findCoefficient(rows[other], entering)) { vars[rowBasic[other]].value += theta * *c; }
        }
        pivot(basic, entering);
    }

    void pivot(Var basic, Var entering) {
        ++pivots;
        std::size_t const r = *vars[basic].row;
        Row & pivotRow = rows[r];
        Rational const a = *findCoefficient(pivotRow, entering);
        // entering = (basic - sum_{j != e} a_j x_j) / a
        Row fresh;
        fresh.reserve(pivotRow.size());
        Rational const inv = Rational(1) / a;
        for (auto const & [v, c] : pivotRow) {
            if (v == entering) { continue; }
            fresh.emplace_back(v, -c * inv);
        }
        auto pos = std::lower_bound(fresh.begin(), fresh.end(), basic, [](auto const & e, Var x) { return e.first < x; });
        fresh.insert(pos, {basic, inv});
        pivotRow = std::move(fresh);
        vars[basic].row.reset();
        vars[entering].row = r;
        rowBasic[r] = entering;
        for (std::size_t other = 0; other < rows.size(); ++other) {
            if (other == r) { continue; }
            Rational const * c = findCoefficient(rows[other], entering);
            if (not c) { continue; }
            Rational factor = *c;
            addScaledRow(rows[other], rows[r], factor, static_cast<Var>(-1));
            // remove the entering column that addScaledRow left untouched
            auto & row = rows[other];
            auto it = std::lower_bound(row.begin(), row.end(), entering, [](auto const & e, Var x) { return e.first < x; });
            if (it != row.end() and it->first == entering) { row.erase(it); }
        }
    }

    FarkasCertificate explain(std::vector<BoundUse> const & uses) const {
        FarkasCertificate cert;
        for (auto const & use : uses) {
            Rational lambda = use.weight * use.bound->toAtom;
            if (not use.upper) { lambda = -lambda; }
            auto [it, inserted] = cert.multipliers.try_emplace(use.bound->atom, lambda);
            if (not inserted) { it->second += lambda; }
        }
        std::erase_if(cert.multipliers, [](auto const & e) { return e.second == 0; });
        cert.combinedConstant = 0;
        for (auto const & [id, lambda] : cert.multipliers) {
            auto const & [rel, constant] = assertedAtoms.at(id);
            cert.combinedConstant += lambda * orientation(rel) * constant;
            if (isStrict(rel) and lambda > 0) { cert.strict = true; }
        }
        return cert;
    }

    void setBound(Var v, bool upper, Bound bound) {
        auto & slot = upper ? vars[v].upper : vars[v].lower;
        trail.push_back({v, upper, slot});
        slot = std::move(bound);
    }
};

Simplex::Simplex() : impl{std::make_unique<Impl>()} {}
Simplex::~Simplex() = default;

void Simplex::registerVariables(VarSet const & vars) {
    for (auto const & name : vars) { impl->originalVar(name); }
}

void Simplex::registerTerm(LinearTerm const & term) {
    if (not term.empty()) { impl->resolve(term); }
}

std::optional<FarkasCertificate> Simplex::assertAtom(AtomId id, Atom const & atom) {
    impl->assertedAtoms.insert_or_assign(id, std::make_pair(atom.rel, atom.constant));
    if (atom.term.empty()) {
        if (holds(atom.rel, Rational(0), atom.constant)) { return std::nullopt; }
        FarkasCertificate cert;
        Rational lambda = 1;
        if (atom.rel == Relation::Eq and atom.constant > 0) { lambda = -1; }
        cert.multipliers.emplace(id, lambda);
        cert.combinedConstant = lambda * orientation(atom.rel) * atom.constant;
        cert.strict = isStrict(atom.rel);
        return cert;
    }
    auto [v, alpha] = impl->resolve(atom.term);
    Rational const value = atom.constant / alpha;
    Rational const toAtom = Rational(1) / (alpha * orientation(atom.rel));

    Relation rel = atom.rel;
    if (alpha < 0) {
        switch (rel) {
            case Relation::Le: rel = Relation::Ge; break;
            case Relation::Lt: rel = Relation::Gt; break;
            case Relation::Ge: rel = Relation::Le; break;
            case Relation::Gt: rel = Relation::Lt; break;
            case Relation::Eq: break;
        }
    }
    std::optional<DeltaRational> upper;
    std::optional<DeltaRational> lower;
    switch (rel) {
        case Relation::Le: upper = DeltaRational(value); break;
        case Relation::Lt: upper = DeltaRational(value, -1); break;
        case Relation::Ge: lower = DeltaRational(value); break;
        case Relation::Gt: lower = DeltaRational(value, 1); break;
        case Relation::Eq: upper = lower = DeltaRational(value); break;
    }

    auto & state = impl->vars[v];
    if (upper and (not state.upper or *upper < state.upper->value)) {
        Bound b{*upper, id, toAtom};
        if (state.lower and state.lower->value > b.value) {
            return impl->explain({{&b, 1, true}, {&*state.lower, 1, false}});
        }
        impl->setBound(v, true, b);
        if (not state.row and state.value > b.value) { impl->update(v, b.value); }
    }
    if (lower and (not state.lower or *lower > state.lower->value)) {
        Bound b{*lower, id, toAtom};
        if (state.upper and state.upper->value < b.value) {
            return impl->explain({{&*state.upper, 1, true}, {&b, 1, false}});
        }
        impl->setBound(v, false, b);
        if (not state.row and state.value < b.value) { impl->update(v, b.value); }
    }
    return std::nullopt;
}

std::optional<FarkasCertificate> Simplex::check() {
    ++impl->checks;
    auto & vars = impl->vars;
    while (true) {
        // Bland: the smallest violating basic variable leaves.
        std::optional<Var> leaving;
        for (Var v = 0; v < vars.size(); ++v) {
            auto const & s = vars[v];
            if (not s.row) { continue; }
            if ((s.lower and s.value < s.lower->value) or (s.upper and s.value > s.upper->value)) {
                leaving = v;
                break;
            }
        }
        if (not leaving) { return std::nullopt; }
        Var const b = *leaving;
        Row const & row = impl->rows[*vars[b].row];
        bool const increase = vars[b].lower and vars[b].value < vars[b].lower->value;

        std::optional<Var> entering;
        for (auto const & [j, a] : row) {
            auto const & s = vars[j];
            bool const canRaise = not s.upper or s.value < s.upper->value;
            bool const canLower = not s.lower or s.value > s.lower->value;
            bool const positive = a > 0;
            if (increase ? (positive ? canRaise : canLower) : (positive ? canLower : canRaise)) {
                entering = j;
                break;
            }
        }
        if (not entering) {
            std::vector<BoundUse> uses;
            if (increase) {
                uses.push_back({&*vars[b].lower, 1, false});
                for (auto const & [j, a] : row) {
                    if (a > 0) {
                        uses.push_back({&*vars[j].upper, a, true});
                    } else {
                        uses.push_back({&*vars[j].lower, -a, false});
                    }
                }
            } else {
                uses.push_back({&*vars[b].upper, 1, true});
                for (auto const & [j, a] : row) {
                    if (a > 0) {
                        uses.push_back({&*vars[j].lower, a, false});
                    } else {
                        uses.push_back({&*vars[j].upper, -a, true});
                    }
                }
            }
            return impl->explain(uses);
        }
        DeltaRational target = increase ? vars[b].lower->value : vars[b].upper->value;
        impl->pivotAndUpdate(b, *entering, target);
    }
}

void Simplex::push() {
    impl->marks.push_back(impl->trail.size());
}

void Simplex::pop() {
    assert(not impl->marks.empty());
    std::size_t const mark = impl->marks.back();
    impl->marks.pop_back();
    while (impl->trail.size() > mark) {
        auto & entry = impl->trail.back();
        auto & slot = entry.upper ? impl->vars[entry.var].upper : impl->vars[entry.var].lower;
        slot = std::move(entry.previous);
        impl->trail.pop_back();
    }
}

Assignment Simplex::model() const {
    auto const & vars = impl->vars;
    auto fits = [&](Rational const & d) {
        for (auto const & s : vars) {
            Rational x = s.value.instantiate(d);
            if (s.lower and x < s.lower->value.instantiate(d)) { return false; }
            if (s.upper and x > s.upper->value.instantiate(d)) { return false; }
        }
        return true;
    };
    Rational d = 1;
    bool found = false;
    for (int k = 0; k <= 64; ++k) {
        if (fits(d)) {
            found = true;
            break;
        }
        d /= 2;
    }
    if (not found) {
        // The delta parts are consistent, so a small enough positive value exists; compute it exactly.
        Rational limit = 1;
        auto tighten = [&](DeltaRational const & low, DeltaRational const & high) {
            if (low.delta > high.delta and high.real > low.real) {
                Rational candidate = (high.real - low.real) / (low.delta - high.delta);
                if (candidate < limit) { limit = candidate; }
            }
        };
        for (auto const & s : vars) {
            if (s.lower) { tighten(s.lower->value, s.value); }
            if (s.upper) { tighten(s.value, s.upper->value); }
        }
        d = limit / 2;
        if (not fits(d)) { throw Error("internal error: no admissible infinitesimal for the model"); }
    }
    Assignment result;
    for (Var v = 0; v < vars.size(); ++v) {
        if (impl->isOriginal[v]) { result.emplace(impl->originalNames[v], vars[v].value.instantiate(d)); }
    }
    return result;
}

std::size_t Simplex::checkCount() const {
    return impl->checks;
}

std::size_t Simplex::pivotCount() const {
    return impl->pivots;
}

LpResult lpCheck(std::span<LabeledAtom const> atoms) {
    Simplex simplex;
    VarSet names;
    for (auto const & a : atoms) {
        for (auto const & [var, c] : a.atom.term) { names.insert(var); }
    }
    simplex.registerVariables(names);
    LpResult result;
    for (auto const & a : atoms) {
        if (auto conflict = simplex.assertAtom(a.id, a.atom)) {
            result.certificate = std::move(*conflict);
            return result;
        }
    }
    if (auto conflict = simplex.check()) {
        result.certificate = std::move(*conflict);
        return result;
    }
    result.feasible = true;
    result.model = simplex.model();
    for (auto const & name : names) { result.model.try_emplace(name, 0); }
    return result;
}

bool certify(FarkasCertificate const & certificate, std::span<LabeledAtom const> atoms) {
    std::map<AtomId, Atom const *> byId;
    for (auto const & a : atoms) { byId.emplace(a.id, &a.atom); }
    LinearTerm sum;
    Rational constant = 0;
    bool strict = false;
    for (auto const & [id, lambda] : certificate.multipliers) {
        auto it = byId.find(id);
        if (it == byId.end()) { return false; }
        Atom const & atom = *it->second;
        if (atom.rel != Relation::Eq and lambda < 0) { return false; }
        Rational const weight = lambda * orientation(atom.rel);
        sum.addScaled(atom.term, weight);
        constant += weight * atom.constant;
        if (isStrict(atom.rel) and lambda > 0) { strict = true; }
    }
    if (not sum.empty()) { return false; }
    if (constant != certificate.combinedConstant or strict != certificate.strict) { return false; }
    return constant < 0 or (constant == 0 and strict);
}

} // namespace spex
