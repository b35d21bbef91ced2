#pragma once

#include <string>
#include <vector>

#include "rsqd/tree.hpp"

namespace rsqd {

/// (k_1..k_n) with k_1+..+k_m >= m for m < n and k_1+..+k_n = n.
using BlochSequence = std::vector<int>;

enum class DyckStep { Up, Down };
using DyckPath = std::vector<DyckStep>;

/// Blocks of a partition of {1..n}; each block sorted, blocks ordered by
/// their smallest element.
using NonCrossingPartition = std::vector<std::vector<int>>;

enum class BracketToken { Star, Vertex, Open, Close };

/// Sign kept apart from the token string: R -> '*', V -> 'o',
/// <0| -> '<', |0> -> '>'.
struct Bracketing {
    int sign = 1;
    std::vector<BracketToken> tokens;

    /// ASCII rendering with an explicit leading sign, e.g. "-*<o>*o>".
    std::string str() const;
    /// Unicode rendering as in the usual pictorial notation, e.g. "−∗⟨o⟩∗o⟩".
    std::string unicode() const;

    friend bool operator==(const Bracketing&, const Bracketing&) = default;
};

bool is_valid_bloch(const BlochSequence& b);
bool is_valid_dyck(const DyckPath& p);
bool is_valid_partition(const NonCrossingPartition& p, int n);
bool is_non_crossing(const NonCrossingPartition& p);

BlochSequence tree_to_bloch(const Tree& t);
Tree bloch_to_tree(const BlochSequence& b);

DyckPath bloch_to_dyck(const BlochSequence& b);
BlochSequence dyck_to_bloch(const DyckPath& p);

NonCrossingPartition tree_to_partition(const Tree& t);

Bracketing tree_to_bracketing(const Tree& t);

/// One factor of S^(k1) V S^(k2) V ... S^(kn) V P, where S^(0) = -P and
/// S^(k) = R^k.
struct WordToken {
    enum class Kind { ResolventPower, NegativeP, V, P };
    Kind kind;
    int power = 0; // only for ResolventPower

    friend bool operator==(const WordToken&, const WordToken&) = default;
};

std::vector<WordToken> bloch_to_operator_word(const BlochSequence& b);

/// Compact rendering: "-R^2VPVP", "RVRVP".
std::string word_to_string(const std::vector<WordToken>& word);

// Formatting helpers shared by the CLI and tests.
std::string bloch_to_string(const BlochSequence& b);   // "(3001)" or "(1,10)" if any k > 9
std::string dyck_to_string(const DyckPath& p);         // "UUDD"
DyckPath dyck_from_string(const std::string& s);
std::string partition_to_string(const NonCrossingPartition& p); // "|13|2|"

} // namespace rsqd
