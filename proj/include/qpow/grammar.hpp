#pragma once

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qpow/distribution.hpp"
#include "qpow/quasi_power.hpp"

namespace qpow {

struct GrammarRule {
    std::string lhs;
    std::vector<std::string> rhs;
};

// Context-free grammar with every rule producing at least one terminal, so
// derivation length strictly grows and the counting recursion terminates.
// tracked lists the terminals whose occurrence counts form the coordinate
// axes of the resulting distributions.
struct Grammar {
    std::vector<std::string> terminals;
    std::vector<std::string> nonterminals;
    std::string start;
    std::vector<std::string> tracked;
    std::vector<GrammarRule> rules;
    std::vector<std::string> warnings;   // non-fatal findings (duplicate rules)
};

// Text format: `terminals: a b c`, `nonterminals: S T`, `start: S`,
// `track: a b` in any order, then one rule per line `S -> a S b S`.
// `#` starts a comment. Errors carry 1-based line numbers.
Grammar parse_grammar(const std::string& text);

// tracked-count vector -> number of leftmost derivations
using CountSlice = std::map<std::vector<int>, mpz_class>;

// Level-by-level dynamic program over derivation length. Rules are walked as
// suffix chains (equivalent to binarizing the right-hand sides), and suffix
// tables are cached so repeated queries share work.
class GrammarCounter {
public:
    explicit GrammarCounter(Grammar g, int length_cap = 40);

    // Derivation counts for words of length n from the given nonterminal,
    // keyed by tracked-terminal count vector. Extends tables on demand.
    const CountSlice& counts(const std::string& nonterminal, int n);
    const CountSlice& start_counts(int n) { return counts(grammar_.start, n); }

    const Grammar& grammar() const { return grammar_; }
    int length_cap() const { return length_cap_; }

private:
    struct Item {
        bool is_terminal = false;
        int index = 0;                // nonterminal index when !is_terminal
        std::vector<int> delta;      // tracked contribution when is_terminal
    };

    void extend(int n);

    Grammar grammar_;
    int length_cap_;
    int computed_ = 0;
    std::map<std::string, int> nt_index_;
    std::vector<std::vector<Item>> items_;                  // per rule
    std::vector<std::vector<std::size_t>> rules_of_;        // per nonterminal
    std::vector<std::vector<CountSlice>> tables_;           // [nt][length]
    // [rule][item][length]: counts of the rhs suffix starting at item;
    // empty outer vector for single-item rules (handled directly)
    std::vector<std::vector<std::vector<CountSlice>>> suffix_;
};

// Slice of the count table at (start symbol, n). Convenience wrapper that
// builds a fresh counter; use GrammarCounter directly for sweeps.
CountSlice count_words(const Grammar& g, int n, int length_cap = 40);

// Distribution of tracked-terminal counts over words of length n, weighted
// by exact derivation counts.
LatticeDistribution grammar_distribution(const Grammar& g, int n, int length_cap = 40);
LatticeDistribution grammar_distribution(GrammarCounter& counter, int n);

// Quasi-power family indexed by word length; phi_n = n, no closed-form
// cumulant data (exact-moments standardization applies).
QuasiPowerFamily grammar_family(const Grammar& g, int length_cap = 40);

}  // namespace qpow
