#include "rsqd/bijections.hpp"

#include <algorithm>
#include <numeric>

#include "rsqd/errors.hpp"

namespace rsqd {

namespace {

void require_inner(const Tree& t, const char* op) {
    if (t.is_leaf()) throw ValidationError(std::string(op) + " requires a tree with at least one inner vertex");
}

void require_bloch(const BlochSequence& b) {
    if (!is_valid_bloch(b)) throw ValidationError("invalid Bloch sequence " + bloch_to_string(b));
}

// K(k1,k2,..,kn) = (k1+1,k2,..,kn,0)
BlochSequence apply_k(BlochSequence b) {
    b.front() += 1;
    b.push_back(0);
    return b;
}

void normalize(NonCrossingPartition& p) {
    for (auto& block : p) std::sort(block.begin(), block.end());
    std::sort(p.begin(), p.end());
}

} // namespace

bool is_valid_bloch(const BlochSequence& b) {
    const int n = static_cast<int>(b.size());
    if (n == 0) return false;
    int sum = 0;
    for (int m = 1; m <= n; ++m) {
        if (b[m - 1] < 0) return false;
        sum += b[m - 1];
        if (m < n && sum < m) return false;
    }
    return sum == n;
}

bool is_valid_dyck(const DyckPath& p) {
    if (p.empty() || p.size() % 2 != 0) return false;
    long height = 0;
    for (DyckStep s : p) {
        height += s == DyckStep::Up ? 1 : -1;
        if (height < 0) return false;
    }
    return height == 0;
}

bool is_non_crossing(const NonCrossingPartition& p) {
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = 0; b < p.size(); ++b) {
            if (a == b) continue;
            // a1 < x < a2 < y with a1,a2 in A and x,y in B
            for (int a1 : p[a])
                for (int a2 : p[a])
                    for (int x : p[b])
                        for (int y : p[b])
                            if (a1 < x && x < a2 && a2 < y) return false;
        }
    }
    return true;
}

bool is_valid_partition(const NonCrossingPartition& p, int n) {
    std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& block : p) {
        if (block.empty()) return false;
        for (int x : block) {
            if (x < 1 || x > n || seen[x]++) return false;
        }
    }
    return std::all_of(seen.begin() + 1, seen.end(), [](int c) { return c == 1; }) && is_non_crossing(p);
}

BlochSequence tree_to_bloch(const Tree& t) {
    require_inner(t, "tree_to_bloch");
    const Tree& s = t.left();
    const Tree& u = t.right();
    if (s.is_leaf() && u.is_leaf()) return {1};
    if (u.is_leaf()) return apply_k(tree_to_bloch(s));
    BlochSequence head = s.is_leaf() ? BlochSequence{1} : apply_k(tree_to_bloch(s));
    const BlochSequence tail = tree_to_bloch(u);
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

namespace {

// Inverse of tree_to_bloch on b[pos..pos+len).
Tree bloch_segment_to_tree(const BlochSequence& b, std::size_t pos, std::size_t len) {
    if (len == 1) return graft(Tree::leaf(), Tree::leaf()); // (1)
    if (b[pos] == 1) {
        // (1).phi(u), or the K image of a sequence starting with 0 (impossible).
        return graft(Tree::leaf(), bloch_segment_to_tree(b, pos + 1, len - 1));
    }
    // b = K(b1).b2 with b1 of length m: the prefix K(b1) has length m+1 and
    // sum m+1, and K(b1) ends in 0. Pick the unique split where the prefix
    // (with its first entry lowered by one, last 0 dropped) is a valid Bloch
    // sequence and the remainder is valid or empty.
    for (std::size_t m = 1; m + 1 <= len; ++m) {
        if (b[pos + m] != 0) continue;
        BlochSequence b1(b.begin() + static_cast<long>(pos), b.begin() + static_cast<long>(pos + m));
        b1.front() -= 1;
        if (!is_valid_bloch(b1)) continue;
        const std::size_t rest = len - (m + 1);
        if (rest == 0) return graft(bloch_segment_to_tree(b1, 0, m), Tree::leaf());
        BlochSequence b2(b.begin() + static_cast<long>(pos + m + 1), b.begin() + static_cast<long>(pos + len));
        if (!is_valid_bloch(b2)) continue;
        return graft(bloch_segment_to_tree(b1, 0, m), bloch_segment_to_tree(b, pos + m + 1, rest));
    }
    throw ValidationError("no tree for Bloch sequence " + bloch_to_string(b));
}

} // namespace

Tree bloch_to_tree(const BlochSequence& b) {
    require_bloch(b);
    return bloch_segment_to_tree(b, 0, b.size());
}

DyckPath bloch_to_dyck(const BlochSequence& b) {
    require_bloch(b);
    DyckPath p;
    p.reserve(2 * b.size());
    for (int k : b) {
        p.insert(p.end(), static_cast<std::size_t>(k), DyckStep::Up);
        p.push_back(DyckStep::Down);
    }
    return p;
}

BlochSequence dyck_to_bloch(const DyckPath& p) {
    if (!is_valid_dyck(p)) throw ValidationError("invalid Dyck path " + dyck_to_string(p));
    BlochSequence b;
    int ups = 0;
    for (DyckStep s : p) {
        if (s == DyckStep::Up) {
            ++ups;
        } else {
            b.push_back(ups);
            ups = 0;
        }
    }
    return b;
}

NonCrossingPartition tree_to_partition(const Tree& t) {
    require_inner(t, "tree_to_partition");
    const Tree& t1 = t.left();
    const Tree& t2 = t.right();
    NonCrossingPartition p;
    if (t1.is_leaf()) {
        p.push_back({1});
        if (!t2.is_leaf()) {
            for (auto block : tree_to_partition(t2)) {
                for (int& x : block) x += 1;
                p.push_back(std::move(block));
            }
        }
    } else {
        p = tree_to_partition(t1);
        const int joint = static_cast<int>(t1.order()) + 1;
        auto it = std::find_if(p.begin(), p.end(), [](const auto& block) {
            return std::find(block.begin(), block.end(), 1) != block.end();
        });
        it->push_back(joint);
        if (!t2.is_leaf()) {
            for (auto block : tree_to_partition(t2)) {
                for (int& x : block) x += joint;
                p.push_back(std::move(block));
            }
        }
    }
    normalize(p);
    return p;
}

Bracketing tree_to_bracketing(const Tree& t) {
    require_inner(t, "tree_to_bracketing");
    using T = BracketToken;
    const Tree& t1 = t.left();
    const Tree& t2 = t.right();
    Bracketing b;
    if (t1.is_leaf() && t2.is_leaf()) {
        b.tokens = {T::Star, T::Vertex, T::Close};
    } else if (t1.is_leaf()) {
        const Bracketing rest = tree_to_bracketing(t2);
        b.sign = rest.sign;
        b.tokens = {T::Star, T::Vertex};
        b.tokens.insert(b.tokens.end(), rest.tokens.begin(), rest.tokens.end());
    } else if (t2.is_leaf()) {
        const Bracketing rest = tree_to_bracketing(t1);
        b.sign = -rest.sign;
        b.tokens = {T::Star, T::Open, T::Vertex, T::Close};
        b.tokens.insert(b.tokens.end(), rest.tokens.begin(), rest.tokens.end());
    } else {
        const Bracketing inner = tree_to_bracketing(t2);
        const Bracketing outer = tree_to_bracketing(t1);
        b.sign = -inner.sign * outer.sign;
        b.tokens = {T::Star, T::Open, T::Vertex};
        b.tokens.insert(b.tokens.end(), inner.tokens.begin(), inner.tokens.end());
        b.tokens.insert(b.tokens.end(), outer.tokens.begin(), outer.tokens.end());
    }
    return b;
}

std::string Bracketing::str() const {
    std::string s(1, sign < 0 ? '-' : '+');
    for (BracketToken tok : tokens) {
        switch (tok) {
        case BracketToken::Star: s += '*'; break;
        case BracketToken::Vertex: s += 'o'; break;
        case BracketToken::Open: s += '<'; break;
        case BracketToken::Close: s += '>'; break;
        }
    }
    return s;
}

std::string Bracketing::unicode() const {
    std::string s = sign < 0 ? "−" : "+";
    for (BracketToken tok : tokens) {
        switch (tok) {
        case BracketToken::Star: s += "∗"; break;
        case BracketToken::Vertex: s += 'o'; break;
        case BracketToken::Open: s += "⟨"; break;
        case BracketToken::Close: s += "⟩"; break;
        }
    }
    return s;
}

std::vector<WordToken> bloch_to_operator_word(const BlochSequence& b) {
    require_bloch(b);
    std::vector<WordToken> word;
    word.reserve(2 * b.size() + 1);
    for (int k : b) {
        if (k == 0) word.push_back({WordToken::Kind::NegativeP, 0});
        else word.push_back({WordToken::Kind::ResolventPower, k});
        word.push_back({WordToken::Kind::V, 0});
    }
    word.push_back({WordToken::Kind::P, 0});
    return word;
}

std::string word_to_string(const std::vector<WordToken>& word) {
    int sign = 1;
    std::string body;
    for (const auto& tok : word) {
        switch (tok.kind) {
        case WordToken::Kind::ResolventPower:
            body += "R";
            if (tok.power > 1) body += "^" + std::to_string(tok.power);
            break;
        case WordToken::Kind::NegativeP:
            sign = -sign;
            body += "P";
            break;
        case WordToken::Kind::V: body += "V"; break;
        case WordToken::Kind::P: body += "P"; break;
        }
    }
    return (sign < 0 ? "-" : "") + body;
}

std::string bloch_to_string(const BlochSequence& b) {
    const bool wide = std::any_of(b.begin(), b.end(), [](int k) { return k > 9 || k < 0; });
    std::string s = "(";
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (wide && i > 0) s += ',';
        s += std::to_string(b[i]);
    }
    return s + ")";
}

std::string dyck_to_string(const DyckPath& p) {
    std::string s;
    for (DyckStep st : p) s += st == DyckStep::Up ? 'U' : 'D';
    return s;
}

DyckPath dyck_from_string(const std::string& s) {
    DyckPath p;
    for (char c : s) {
        if (c == 'U') p.push_back(DyckStep::Up);
        else if (c == 'D') p.push_back(DyckStep::Down);
        else if (c != ' ') throw ValidationError("invalid Dyck step '" + std::string(1, c) + "'");
    }
    return p;
}

std::string partition_to_string(const NonCrossingPartition& p) {
    std::string s = "|";
    for (const auto& block : p) {
        for (int x : block) s += std::to_string(x);
        s += '|';
    }
    return s;
}

} // namespace rsqd
