#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rsqd {

/// Planar binary tree. A default-constructed Tree is the bare root "|";
/// every other tree is a grafting t1 v t2 of two smaller trees.
///
/// Trees are immutable values that share structure: copying is a
/// reference-count bump, and subtrees returned by left()/right() are the
/// same nodes that were grafted. Node identity (id()) is therefore a valid
/// memoization key for any computation that recurses over subtrees.
class Tree {
public:
    Tree() = default;

    static Tree leaf() { return {}; }
    static Tree graft(Tree left, Tree right);

    bool is_leaf() const noexcept { return node_ == nullptr; }
    std::size_t order() const noexcept;
    std::size_t leaf_count() const noexcept { return order() + 1; }

    /// Children of a non-leaf tree. Throws ValidationError on the bare root.
    const Tree& left() const;
    const Tree& right() const;
    std::pair<Tree, Tree> decompose() const;

    /// Stable address of the root node, nullptr for the bare root.
    const void* id() const noexcept { return node_.get(); }

    friend bool operator==(const Tree& a, const Tree& b);
    friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }

private:
    struct Node;
    explicit Tree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

struct Tree::Node {
    Tree left;
    Tree right;
    std::size_t order;
};

inline Tree graft(Tree t1, Tree t2) { return Tree::graft(std::move(t1), std::move(t2)); }

/// Balanced-parenthesis code: "" for |, "(" + encode(a) + ")" + encode(b)
/// for a v b.
std::string encode(const Tree& t);
Tree parse(std::string_view code);

/// Canonical ordering by code, for sorted containers.
struct TreeLess {
    bool operator()(const Tree& a, const Tree& b) const { return encode(a) < encode(b); }
};

enum class TreeFilter { All, RightNormalized };

inline constexpr std::size_t kDefaultEnumerationCap = 12;

/// All trees of order n, ordered by left-subtree order ascending and then
/// recursively. Throws ValidationError if n exceeds cap.
std::vector<Tree> enumerate(std::size_t n, TreeFilter filter = TreeFilter::All,
                            std::size_t cap = kDefaultEnumerationCap);

/// Orders 0..n in one pass; trees of higher orders share their subtree
/// nodes with the lower-order entries.
std::vector<std::vector<Tree>> enumerate_up_to(std::size_t n, TreeFilter filter = TreeFilter::All,
                                               std::size_t cap = kDefaultEnumerationCap);

/// No subtree of the form t1 v | with t1 != |. Y itself qualifies.
bool is_right_normalized(const Tree& t);

enum class Orientation { Left, Right };

/// Leaf orientations, leaves numbered 1..n+1 from left to right
/// (stored 0-based). Requires |t| >= 1.
std::vector<Orientation> leaf_orientations(const Tree& t);

/// Number of right-oriented leaves; the direct term carries (-1)^(d-1).
std::size_t right_leaf_count(const Tree& t);

/// Leftmost and rightmost leaf index (1-based) of the subtree hanging
/// from an inner vertex.
struct SubtreeSpan {
    std::size_t l;
    std::size_t r;
    friend bool operator==(const SubtreeSpan&, const SubtreeSpan&) = default;
};

/// One span per inner vertex, in preorder (root first). Requires |t| >= 1.
std::vector<SubtreeSpan> subtree_spans(const Tree& t);

/// t_0 = t, t_{k+1} = t_k v |.
Tree left_comb_graft(Tree t, std::size_t n);

struct CombFactorization {
    Tree base;
    std::size_t n;
};

/// Unique (base, n) with base = | or base != v v |, and
/// left_comb_graft(base, n) == t.
CombFactorization comb_factorize(const Tree& t);

/// Unique (v_1..v_k) with t = ((..(| v v_1) v ..) v v_{k-1}) v v_k.
/// Requires |t| >= 1.
std::vector<Tree> lk_decompose(const Tree& t);
Tree lk_compose(const std::vector<Tree>& parts);

/// Inner vertex addressed by its path from the root ("" is the root,
/// "L" its left child, "LR" the right child of that, ...).
struct NumberedVertex {
    std::string path;
    int number;
};

/// Vertex numbering: root gets 1, the right subtree is numbered from 2,
/// the left subtree after the right one. Requires |t| >= 1.
std::vector<NumberedVertex> number_vertices(const Tree& t);

/// Vertex numbers grouped by chains of left-child edges, each block
/// sorted, blocks ordered by their smallest element.
std::vector<std::vector<int>> left_line_sets(const Tree& t);

} // namespace rsqd
