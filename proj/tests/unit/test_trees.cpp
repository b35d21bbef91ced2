#include <algorithm>
#include <set>
#include <string>

#include "doctest.h"

#include "oracles.hpp"
#include "rsqd/errors.hpp"
#include "rsqd/tree.hpp"
#include "tables.hpp"

using namespace rsqd;
using rsqd::testing::catalan;
using rsqd::testing::motzkin;

namespace {

const Tree kLeaf;
const Tree kY = graft(kLeaf, kLeaf);
const Tree kDeuxun = graft(kY, kLeaf);
const Tree kDeuxdeux = graft(kLeaf, kY);

Tree named(const std::string& name) {
    for (const auto& row : rsqd::testing::reference_tables())
        if (row.name == name) return row.tree;
    FAIL("no such tree " << name);
    return {};
}

} // namespace

TEST_CASE("graft builds the small trees") {
    CHECK(kY.order() == 1);
    CHECK(kY.leaf_count() == 2);
    CHECK(kDeuxdeux.order() == 2);
    CHECK(encode(kDeuxdeux) == "()()");
    CHECK(encode(kDeuxun) == "(())");
    CHECK(graft(kY, kY) == named("troistrois"));
    auto [l, r] = graft(kDeuxun, kY).decompose();
    CHECK(l == kDeuxun);
    CHECK(r == kY);
}

TEST_CASE("bare root has no children") {
    CHECK(kLeaf.is_leaf());
    CHECK(kLeaf.order() == 0);
    CHECK_THROWS_AS(kLeaf.left(), ValidationError);
    CHECK_THROWS_AS(kLeaf.decompose(), ValidationError);
}

TEST_CASE("encode and parse") {
    CHECK(encode(kLeaf).empty());
    CHECK(encode(kY) == "()");
    for (std::size_t n = 0; n <= 8; ++n)
        for (const auto& t : enumerate(n)) CHECK(parse(encode(t)) == t);
    CHECK_THROWS_AS(parse("("), ValidationError);
    CHECK_THROWS_AS(parse(")("), ValidationError);
    CHECK_THROWS_AS(parse("()x"), ValidationError);
}

TEST_CASE("enumeration counts") {
    for (int n = 0; n <= 10; ++n) {
        auto trees = enumerate(static_cast<std::size_t>(n));
        CHECK(trees.size() == catalan(n));
        std::set<std::string> codes;
        for (const auto& t : trees) {
            CHECK(t.order() == static_cast<std::size_t>(n));
            codes.insert(encode(t));
        }
        CHECK(codes.size() == trees.size());
    }
    for (int n = 1; n <= 7; ++n)
        CHECK(enumerate(static_cast<std::size_t>(n), TreeFilter::RightNormalized).size() == motzkin(n - 1));
    CHECK(enumerate(0).size() == 1);
    CHECK(enumerate(0)[0].is_leaf());
}

TEST_CASE("enumeration cap") {
    CHECK_THROWS_AS(enumerate(13), ValidationError);
    CHECK(enumerate(3, TreeFilter::All, 3).size() == 5);
    CHECK_THROWS_AS(enumerate(4, TreeFilter::All, 3), ValidationError);
}

TEST_CASE("enumeration follows the Catalan recurrence in order") {
    for (std::size_t n = 1; n <= 7; ++n) {
        std::vector<Tree> expected;
        for (std::size_t k = 0; k < n; ++k)
            for (const auto& a : enumerate(k))
                for (const auto& b : enumerate(n - 1 - k)) expected.push_back(graft(a, b));
        CHECK(enumerate(n) == expected);
    }
}

TEST_CASE("enumerate_up_to matches enumerate") {
    auto all = enumerate_up_to(6);
    REQUIRE(all.size() == 7);
    for (std::size_t n = 0; n <= 6; ++n) CHECK(all[n] == enumerate(n));
    auto rn = enumerate_up_to(5, TreeFilter::RightNormalized);
    for (std::size_t n = 1; n <= 5; ++n) CHECK(rn[n] == enumerate(n, TreeFilter::RightNormalized));
}

TEST_CASE("right-normalized trees") {
    CHECK(is_right_normalized(kY));
    CHECK(is_right_normalized(kDeuxdeux));
    CHECK_FALSE(is_right_normalized(kDeuxun));
    CHECK(is_right_normalized(named("troistrois")));
    CHECK_FALSE(is_right_normalized(named("troisquatre")));
    for (const auto& t : enumerate(4, TreeFilter::RightNormalized)) CHECK(is_right_normalized(t));
}

TEST_CASE("leaf orientations") {
    using O = Orientation;
    CHECK(leaf_orientations(kY) == std::vector<O>{O::Left, O::Right});
    const Tree fig = named("quatresix");
    CHECK(leaf_orientations(fig) == std::vector<O>{O::Left, O::Right, O::Right, O::Left, O::Right});
    CHECK(leaf_orientations(named("troisun")) == std::vector<O>{O::Left, O::Right, O::Right, O::Right});
    CHECK_THROWS_AS(leaf_orientations(kLeaf), ValidationError);
    for (std::size_t n = 1; n <= 7; ++n)
        for (const auto& t : enumerate(n)) {
            auto o = leaf_orientations(t);
            REQUIRE(o.size() == n + 1);
            CHECK(o.front() == O::Left);
            CHECK(o.back() == O::Right);
        }
}

TEST_CASE("subtree spans") {
    CHECK(subtree_spans(kY) == std::vector<SubtreeSpan>{{1, 2}});
    auto fig = subtree_spans(named("quatresix"));
    std::vector<SubtreeSpan> expected{{1, 5}, {1, 3}, {1, 2}, {4, 5}};
    CHECK(fig == expected);
    CHECK(subtree_spans(named("troiscinq")) == std::vector<SubtreeSpan>{{1, 4}, {2, 4}, {3, 4}});

    for (std::size_t n = 1; n <= 8; ++n)
        for (const auto& t : enumerate(n)) {
            auto spans = subtree_spans(t);
            REQUIRE(spans.size() == n);
            CHECK(spans[0] == SubtreeSpan{1, n + 1});
            for (const auto& a : spans) {
                CHECK(a.l >= 1);
                CHECK(a.l < a.r);
                CHECK(a.r <= n + 1);
                for (const auto& b : spans) {
                    bool nested = (a.l <= b.l && b.r <= a.r) || (b.l <= a.l && a.r <= b.r);
                    bool disjoint = a.r <= b.l || b.r <= a.l;
                    CHECK((nested || disjoint));
                }
            }
        }
}

TEST_CASE("left combs") {
    CHECK(left_comb_graft(kDeuxdeux, 0) == kDeuxdeux);
    CHECK(left_comb_graft(kDeuxdeux, 1) == named("troisdeux"));
    CHECK(left_comb_graft(kDeuxdeux, 2) == named("quatredeux"));

    auto f = comb_factorize(named("quatredeux"));
    CHECK(f.base == kDeuxdeux);
    CHECK(f.n == 2);
    f = comb_factorize(kY);
    CHECK(f.base.is_leaf());
    CHECK(f.n == 1);
    f = comb_factorize(named("troiscinq"));
    CHECK(f.base == named("troiscinq"));
    CHECK(f.n == 0);

    for (std::size_t n = 0; n <= 8; ++n)
        for (const auto& t : enumerate(n)) {
            auto fac = comb_factorize(t);
            CHECK(left_comb_graft(fac.base, fac.n) == t);
            if (!fac.base.is_leaf()) CHECK_FALSE(fac.base.right().is_leaf());
        }
}

TEST_CASE("lk decomposition") {
    CHECK(lk_decompose(kY) == std::vector<Tree>{kLeaf});
    CHECK(lk_decompose(kDeuxun) == std::vector<Tree>{kLeaf, kLeaf});
    CHECK(lk_decompose(kDeuxdeux) == std::vector<Tree>{kY});
    CHECK_THROWS_AS(lk_decompose(kLeaf), ValidationError);
    for (std::size_t n = 1; n <= 8; ++n)
        for (const auto& t : enumerate(n)) {
            auto parts = lk_decompose(t);
            std::size_t total = 0;
            for (const auto& v : parts) total += v.order() + 1;
            CHECK(total == n);
            CHECK(lk_compose(parts) == t);
        }
}

TEST_CASE("vertex numbering") {
    auto y = number_vertices(kY);
    REQUIRE(y.size() == 1);
    CHECK(y[0].path.empty());
    CHECK(y[0].number == 1);

    auto d = number_vertices(kDeuxun);
    REQUIRE(d.size() == 2);
    for (const auto& v : d) CHECK(v.number == (v.path.empty() ? 1 : 2));

    CHECK(left_line_sets(named("quatredouze")) == std::vector<std::vector<int>>{{1}, {2, 4}, {3}});

    for (std::size_t n = 1; n <= 7; ++n)
        for (const auto& t : enumerate(n)) {
            std::vector<int> numbers;
            for (const auto& v : number_vertices(t)) numbers.push_back(v.number);
            std::sort(numbers.begin(), numbers.end());
            for (std::size_t i = 0; i < n; ++i) CHECK(numbers[i] == static_cast<int>(i + 1));
        }
}
