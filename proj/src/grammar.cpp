#include "qpow/grammar.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qpow/errors.hpp"

namespace qpow {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw std::invalid_argument("grammar line " + std::to_string(line) + ": " + what);
}

}  // namespace

Grammar parse_grammar(const std::string& text) {
    Grammar g;
    bool have_terminals = false, have_nonterminals = false, have_start = false, have_track = false;
    std::vector<std::pair<std::size_t, std::string>> rule_lines;

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::vector<std::string> toks = split_ws(raw);
        if (toks.empty()) continue;

        if (toks[0] == "terminals:") {
            if (have_terminals) parse_fail(lineno, "repeated 'terminals:' header");
            g.terminals.assign(toks.begin() + 1, toks.end());
            if (g.terminals.empty()) parse_fail(lineno, "no terminals listed");
            have_terminals = true;
        } else if (toks[0] == "nonterminals:") {
            if (have_nonterminals) parse_fail(lineno, "repeated 'nonterminals:' header");
            g.nonterminals.assign(toks.begin() + 1, toks.end());
            if (g.nonterminals.empty()) parse_fail(lineno, "no nonterminals listed");
            have_nonterminals = true;
        } else if (toks[0] == "start:") {
            if (have_start) parse_fail(lineno, "repeated 'start:' header");
            if (toks.size() != 2) parse_fail(lineno, "'start:' takes exactly one symbol");
            g.start = toks[1];
            have_start = true;
        } else if (toks[0] == "track:") {
            if (have_track) parse_fail(lineno, "repeated 'track:' header");
            g.tracked.assign(toks.begin() + 1, toks.end());
            if (g.tracked.empty()) parse_fail(lineno, "no tracked terminals listed");
            have_track = true;
        } else {
            std::string joined;
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (i) joined += ' ';
                joined += toks[i];
            }
            rule_lines.emplace_back(lineno, joined);
        }
    }

    if (!have_terminals) throw std::invalid_argument("grammar: missing 'terminals:' header");
    if (!have_nonterminals) throw std::invalid_argument("grammar: missing 'nonterminals:' header");
    if (!have_start) throw std::invalid_argument("grammar: missing 'start:' header");
    if (!have_track) throw std::invalid_argument("grammar: missing 'track:' header");

    const std::set<std::string> term_set(g.terminals.begin(), g.terminals.end());
    const std::set<std::string> nt_set(g.nonterminals.begin(), g.nonterminals.end());
    if (term_set.size() != g.terminals.size())
        throw std::invalid_argument("grammar: duplicate terminal name");
    if (nt_set.size() != g.nonterminals.size())
        throw std::invalid_argument("grammar: duplicate nonterminal name");
    for (const std::string& t : g.terminals)
        if (nt_set.count(t))
            throw std::invalid_argument("grammar: symbol '" + t +
                                        "' is both a terminal and a nonterminal");
    if (!nt_set.count(g.start))
        throw std::invalid_argument("grammar: start symbol '" + g.start +
                                    "' is not a declared nonterminal");
    std::set<std::string> tracked_seen;
    for (const std::string& t : g.tracked) {
        if (!term_set.count(t))
            throw std::invalid_argument("grammar: tracked symbol '" + t +
                                        "' is not a declared terminal");
        if (!tracked_seen.insert(t).second)
            throw std::invalid_argument("grammar: tracked symbol '" + t + "' repeated");
    }

    std::set<std::string> rule_texts;
    for (const auto& [line, text_line] : rule_lines) {
        const std::vector<std::string> toks = split_ws(text_line);
        if (toks.size() < 3 || toks[1] != "->")
            parse_fail(line, "expected a header or a rule of the form 'A -> symbols...'");
        GrammarRule rule;
        rule.lhs = toks[0];
        if (!nt_set.count(rule.lhs))
            parse_fail(line, "rule left-hand side '" + rule.lhs + "' is not a nonterminal");
        bool has_terminal = false;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            const std::string& sym = toks[i];
            if (term_set.count(sym))
                has_terminal = true;
            else if (!nt_set.count(sym))
                parse_fail(line, "undeclared symbol '" + sym + "'");
            rule.rhs.push_back(sym);
        }
        if (rule.rhs.empty()) parse_fail(line, "empty right-hand side");
        if (!has_terminal)
            parse_fail(line, "rule produces no terminal; the length recursion would not terminate");
        if (!rule_texts.insert(text_line).second)
            g.warnings.push_back("line " + std::to_string(line) + ": duplicate rule '" +
                                 text_line + "'");
        g.rules.push_back(std::move(rule));
    }

    bool start_has_rule = false;
    for (const GrammarRule& r : g.rules) start_has_rule |= r.lhs == g.start;
    if (!start_has_rule)
        throw std::invalid_argument("grammar: start symbol '" + g.start + "' has no rule");
    return g;
}

namespace {

CountSlice convolve_slices(const CountSlice& a, const CountSlice& b) {
    CountSlice out;
    for (const auto& [xa, wa] : a)
        for (const auto& [xb, wb] : b) {
            std::vector<int> x(xa.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = xa[i] + xb[i];
            out[std::move(x)] += wa * wb;
        }
    return out;
}

void add_into(CountSlice& dst, const CountSlice& src) {
    for (const auto& [x, w] : src) dst[x] += w;
}

const CountSlice& empty_slice() {
    static const CountSlice empty;
    return empty;
}

}  // namespace

GrammarCounter::GrammarCounter(Grammar g, int length_cap)
    : grammar_(std::move(g)), length_cap_(length_cap) {
    if (length_cap_ < 1) throw std::invalid_argument("GrammarCounter: length cap must be >= 1");
    if (grammar_.tracked.empty())
        throw std::invalid_argument("GrammarCounter: no tracked terminals");
    if (grammar_.tracked.size() > 3)
        throw capacity_error("GrammarCounter: more than 3 tracked terminals");

    // same semantic checks as parse_grammar, for programmatically built grammars
    const std::set<std::string> term_set(grammar_.terminals.begin(), grammar_.terminals.end());
    for (int i = 0; i < static_cast<int>(grammar_.nonterminals.size()); ++i) {
        const std::string& name = grammar_.nonterminals[i];
        if (term_set.count(name))
            throw std::invalid_argument("GrammarCounter: symbol '" + name +
                                        "' is both a terminal and a nonterminal");
        if (!nt_index_.emplace(name, i).second)
            throw std::invalid_argument("GrammarCounter: duplicate nonterminal '" + name + "'");
    }
    if (!nt_index_.count(grammar_.start))
        throw std::invalid_argument("GrammarCounter: start symbol is not a nonterminal");
    std::map<std::string, int> tracked_index;
    for (int i = 0; i < static_cast<int>(grammar_.tracked.size()); ++i) {
        const std::string& t = grammar_.tracked[i];
        if (!term_set.count(t))
            throw std::invalid_argument("GrammarCounter: tracked symbol '" + t +
                                        "' is not a terminal");
        if (!tracked_index.emplace(t, i).second)
            throw std::invalid_argument("GrammarCounter: tracked symbol '" + t + "' repeated");
    }

    const int dims = static_cast<int>(grammar_.tracked.size());
    rules_of_.resize(grammar_.nonterminals.size());
    for (std::size_t r = 0; r < grammar_.rules.size(); ++r) {
        const GrammarRule& rule = grammar_.rules[r];
        const auto lhs_it = nt_index_.find(rule.lhs);
        if (lhs_it == nt_index_.end())
            throw std::invalid_argument("GrammarCounter: rule left-hand side '" + rule.lhs +
                                        "' is not a nonterminal");
        if (rule.rhs.empty())
            throw std::invalid_argument("GrammarCounter: empty right-hand side");
        std::vector<Item> items;
        bool has_terminal = false;
        for (const std::string& sym : rule.rhs) {
            Item item;
            if (const auto nt = nt_index_.find(sym); nt != nt_index_.end()) {
                item.is_terminal = false;
                item.index = nt->second;
            } else if (term_set.count(sym)) {
                item.is_terminal = true;
                has_terminal = true;
                item.delta.assign(dims, 0);
                if (const auto tr = tracked_index.find(sym); tr != tracked_index.end())
                    item.delta[tr->second] = 1;
            } else {
                throw std::invalid_argument("GrammarCounter: undeclared symbol '" + sym + "'");
            }
            items.push_back(std::move(item));
        }
        if (!has_terminal)
            throw std::invalid_argument("GrammarCounter: rule for '" + rule.lhs +
                                        "' produces no terminal");
        rules_of_[lhs_it->second].push_back(r);
        items_.push_back(std::move(items));
    }

    tables_.assign(grammar_.nonterminals.size(), std::vector<CountSlice>(1));   // index 0 unused
    suffix_.resize(items_.size());
    for (std::size_t r = 0; r < items_.size(); ++r)
        if (items_[r].size() >= 2)
            suffix_[r].assign(items_[r].size(), std::vector<CountSlice>(1));
}

void GrammarCounter::extend(int n) {
    for (int len = computed_ + 1; len <= n; ++len) {
        // Suffix tables for items 0..k-2 reference only lengths < len, so
        // they can be filled before this level's nonterminal totals.
        for (std::size_t r = 0; r < items_.size(); ++r) {
            const std::vector<Item>& items = items_[r];
            if (items.size() < 2) continue;
            for (std::size_t head = items.size() - 2;; --head) {
                const Item& item = items[head];
                const std::vector<CountSlice>& rest_levels = suffix_[r][head + 1];
                auto rest_at = [&](int l) -> const CountSlice& {
                    return l >= 1 && l < static_cast<int>(rest_levels.size()) ? rest_levels[l]
                                                                              : empty_slice();
                };
                CountSlice result;
                if (item.is_terminal) {
                    for (const auto& [x, w] : rest_at(len - 1)) {
                        std::vector<int> shifted(x.size());
                        for (std::size_t d = 0; d < x.size(); ++d)
                            shifted[d] = x[d] + item.delta[d];
                        result[std::move(shifted)] += w;
                    }
                } else {
                    for (int l1 = 1; l1 <= len - 1; ++l1) {
                        const CountSlice& left = tables_[item.index][l1];
                        const CountSlice& rest = rest_at(len - l1);
                        if (left.empty() || rest.empty()) continue;
                        add_into(result, convolve_slices(left, rest));
                    }
                }
                suffix_[r][head].push_back(std::move(result));
                if (head == 0) break;
            }
        }
        // nonterminal totals at this length
        for (std::size_t a = 0; a < tables_.size(); ++a) {
            CountSlice total;
            for (std::size_t r : rules_of_[a]) {
                if (items_[r].size() == 1) {
                    const Item& only = items_[r][0];
                    if (only.is_terminal && len == 1) total[only.delta] += 1;
                } else {
                    add_into(total, suffix_[r][0][len]);
                }
            }
            tables_[a].push_back(std::move(total));
        }
        // last-item slices, available from the next level on
        for (std::size_t r = 0; r < items_.size(); ++r) {
            if (items_[r].size() < 2) continue;
            const Item& last = items_[r].back();
            CountSlice slice;
            if (last.is_terminal) {
                if (len == 1) slice[last.delta] = 1;
            } else {
                slice = tables_[last.index][len];
            }
            suffix_[r].back().push_back(std::move(slice));
        }
        computed_ = len;
    }
}

const CountSlice& GrammarCounter::counts(const std::string& nonterminal, int n) {
    const auto it = nt_index_.find(nonterminal);
    if (it == nt_index_.end())
        throw std::invalid_argument("GrammarCounter: unknown nonterminal '" + nonterminal + "'");
    if (n < 1) throw std::invalid_argument("GrammarCounter: length must be >= 1");
    if (n > length_cap_)
        throw capacity_error("GrammarCounter: length " + std::to_string(n) +
                             " exceeds the cap of " + std::to_string(length_cap_));
    extend(n);
    return tables_[it->second][n];
}

CountSlice count_words(const Grammar& g, int n, int length_cap) {
    GrammarCounter counter(g, length_cap);
    return counter.start_counts(n);
}

LatticeDistribution grammar_distribution(GrammarCounter& counter, int n) {
    const CountSlice& slice = counter.start_counts(n);
    if (slice.empty())
        throw std::domain_error("grammar_distribution: the language has no words of length " +
                                std::to_string(n));
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    atoms.reserve(slice.size());
    for (const auto& [x, w] : slice) {
        std::vector<mpq_class> pt(x.begin(), x.end());
        atoms.emplace_back(std::move(pt), w);
    }
    return LatticeDistribution(static_cast<int>(counter.grammar().tracked.size()),
                               std::move(atoms));
}

LatticeDistribution grammar_distribution(const Grammar& g, int n, int length_cap) {
    GrammarCounter counter(g, length_cap);
    return grammar_distribution(counter, n);
}

QuasiPowerFamily grammar_family(const Grammar& g, int length_cap) {
    auto counter = std::make_shared<GrammarCounter>(g, length_cap);
    QuasiPowerFamily fam;
    fam.name = "grammar";
    fam.dim = static_cast<int>(g.tracked.size());
    fam.generator = [counter](long n) {
        return grammar_distribution(*counter, static_cast<int>(n));
    };
    fam.phi = [](long n) { return static_cast<double>(n); };
    fam.kappa = [](long) { return std::numeric_limits<double>::infinity(); };
    return fam;
}

}
