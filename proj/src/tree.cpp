#include "rsqd/tree.hpp"

#include <algorithm>
#include <map>

#include "rsqd/errors.hpp"

namespace rsqd {

Tree Tree::graft(Tree left, Tree right) {
    const std::size_t order = left.order() + right.order() + 1;
    return Tree(std::make_shared<const Node>(Node{std::move(left), std::move(right), order}));
}

std::size_t Tree::order() const noexcept { return node_ ? node_->order : 0; }

const Tree& Tree::left() const {
    if (!node_) throw ValidationError("the bare root has no left subtree");
    return node_->left;
}

const Tree& Tree::right() const {
    if (!node_) throw ValidationError("the bare root has no right subtree");
    return node_->right;
}

std::pair<Tree, Tree> Tree::decompose() const { return {left(), right()}; }

bool operator==(const Tree& a, const Tree& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.node_->order != b.node_->order) return false;
    return a.node_->left == b.node_->left && a.node_->right == b.node_->right;
}

namespace {

void encode_into(const Tree& t, std::string& out) {
    if (t.is_leaf()) return;
    out.push_back('(');
    encode_into(t.left(), out);
    out.push_back(')');
    encode_into(t.right(), out);
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Tree run() {
        Tree t = sequence();
        if (pos_ != s_.size()) fail("unmatched ')'");
        return t;
    }

private:
    // code := "" | "(" code ")" code
    Tree sequence() {
        if (pos_ >= s_.size() || s_[pos_] == ')') return Tree::leaf();
        if (s_[pos_] != '(') fail("unexpected character");
        ++pos_;
        Tree left = sequence();
        if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
        ++pos_;
        Tree right = sequence();
        return graft(std::move(left), std::move(right));
    }

    [[noreturn]] void fail(const char* what) const {
        throw ValidationError("malformed tree code \"" + std::string(s_) + "\" at position " +
                              std::to_string(pos_) + ": " + what);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

void require_inner(const Tree& t, const char* op) {
    if (t.is_leaf()) throw ValidationError(std::string(op) + " requires a tree with at least one inner vertex");
}

} // namespace

std::string encode(const Tree& t) {
    std::string out;
    out.reserve(2 * t.order());
    encode_into(t, out);
    return out;
}

Tree parse(std::string_view code) { return Parser(code).run(); }

bool is_right_normalized(const Tree& t) {
    if (t.is_leaf()) return true;
    const Tree& l = t.left();
    const Tree& r = t.right();
    if (r.is_leaf()) return l.is_leaf();
    return is_right_normalized(l) && is_right_normalized(r);
}

std::vector<std::vector<Tree>> enumerate_up_to(std::size_t n, TreeFilter filter, std::size_t cap) {
    if (n > cap) {
        throw ValidationError("enumeration order " + std::to_string(n) + " exceeds cap " +
                              std::to_string(cap));
    }
    const bool rn = filter == TreeFilter::RightNormalized;
    std::vector<std::vector<Tree>> by_order(n + 1);
    by_order[0].push_back(Tree::leaf());
    for (std::size_t m = 1; m <= n; ++m) {
        auto& out = by_order[m];
        for (std::size_t k = 0; k < m; ++k) {
            for (const Tree& t1 : by_order[k]) {
                for (const Tree& t2 : by_order[m - 1 - k]) {
                    // Right-normalized trees never end in "v |" except Y itself.
                    if (rn && t2.is_leaf() && !t1.is_leaf()) continue;
                    out.push_back(graft(t1, t2));
                }
            }
        }
    }
    return by_order;
}

std::vector<Tree> enumerate(std::size_t n, TreeFilter filter, std::size_t cap) {
    return std::move(enumerate_up_to(n, filter, cap)[n]);
}

std::vector<Orientation> leaf_orientations(const Tree& t) {
    require_inner(t, "leaf_orientations");
    std::vector<Orientation> out;
    out.reserve(t.leaf_count());
    auto walk = [&](auto&& self, const Tree& s, Orientation side) -> void {
        if (s.is_leaf()) {
            out.push_back(side);
            return;
        }
        self(self, s.left(), Orientation::Left);
        self(self, s.right(), Orientation::Right);
    };
    walk(walk, t.left(), Orientation::Left);
    walk(walk, t.right(), Orientation::Right);
    return out;
}

std::size_t right_leaf_count(const Tree& t) {
    const auto o = leaf_orientations(t);
    return static_cast<std::size_t>(std::count(o.begin(), o.end(), Orientation::Right));
}

std::vector<SubtreeSpan> subtree_spans(const Tree& t) {
    require_inner(t, "subtree_spans");
    std::vector<SubtreeSpan> out;
    out.reserve(t.order());
    auto walk = [&](auto&& self, const Tree& s, std::size_t first_leaf) -> void {
        if (s.is_leaf()) return;
        out.push_back({first_leaf, first_leaf + s.order()});
        self(self, s.left(), first_leaf);
        self(self, s.right(), first_leaf + s.left().order() + 1);
    };
    walk(walk, t, 1);
    return out;
}

Tree left_comb_graft(Tree t, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) t = graft(std::move(t), Tree::leaf());
    return t;
}

CombFactorization comb_factorize(const Tree& t) {
    Tree base = t;
    std::size_t n = 0;
    while (!base.is_leaf() && base.right().is_leaf()) {
        base = Tree(base.left());
        ++n;
    }
    return {std::move(base), n};
}

std::vector<Tree> lk_decompose(const Tree& t) {
    require_inner(t, "lk_decompose");
    std::vector<Tree> parts;
    Tree cur = t;
    while (!cur.is_leaf()) {
        parts.push_back(cur.right());
        cur = Tree(cur.left());
    }
    std::reverse(parts.begin(), parts.end());
    return parts;
}

Tree lk_compose(const std::vector<Tree>& parts) {
    Tree t;
    for (const Tree& v : parts) t = graft(std::move(t), v);
    return t;
}

std::vector<NumberedVertex> number_vertices(const Tree& t) {
    require_inner(t, "number_vertices");
    std::vector<NumberedVertex> out;
    out.reserve(t.order());
    auto walk = [&](auto&& self, const Tree& s, const std::string& path, int offset) -> void {
        if (s.is_leaf()) return;
        out.push_back({path, offset + 1});
        self(self, s.right(), path + "R", offset + 1);
        self(self, s.left(), path + "L", offset + 1 + static_cast<int>(s.right().order()));
    };
    walk(walk, t, "", 0);
    std::sort(out.begin(), out.end(),
              [](const NumberedVertex& a, const NumberedVertex& b) { return a.number < b.number; });
    return out;
}

std::vector<std::vector<int>> left_line_sets(const Tree& t) {
    const auto numbered = number_vertices(t);
    std::map<std::string, int> number_of;
    for (const auto& v : numbered) number_of[v.path] = v.number;

    std::vector<std::vector<int>> blocks;
    for (const auto& v : numbered) {
        // A left line starts at a vertex that is not itself a left child.
        if (!v.path.empty() && v.path.back() == 'L') continue;
        std::vector<int> block;
        for (std::string p = v.path; number_of.count(p); p += 'L') block.push_back(number_of[p]);
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    std::sort(blocks.begin(), blocks.end());
    return blocks;
}

} // namespace rsqd
