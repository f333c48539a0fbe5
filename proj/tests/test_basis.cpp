#include <doctest.h>

#include <vector>

#include "cavityw/basis.hpp"
#include "cavityw/errors.hpp"

using namespace cavityw;

TEST_CASE("qutrit plus cavity, unrestricted") {
    auto b = build_basis({{ModeKind::Qutrit, 3, "q"}, {ModeKind::Cavity, 2, "c"}});
    CHECK(b->dimension() == 6);
    CHECK_FALSE(b->restricted());
    // lexicographic, first mode most significant
    CHECK(b->occupation(1)[0] == 0);
    CHECK(b->occupation(1)[1] == 1);
    CHECK(b->occupation(2)[0] == 1);
    CHECK(b->occupation(5)[0] == 2);
    CHECK(b->weight(5) == 3);
}

TEST_CASE("transfer device dimensions") {
    TransferLayout layout;
    CHECK(build_transfer_basis(layout, 1)->dimension() == 14);
    CHECK(build_transfer_basis(layout, 0)->dimension() == 1);
    const auto full = build_transfer_basis(layout, std::nullopt);
    CHECK(full->dimension() == 139968);
    CHECK(full->mode_count() == 13);
}

TEST_CASE("declared mode order") {
    TransferLayout layout;
    const auto modes = layout.modes();
    std::vector<std::string> labels;
    for (const auto& m : modes) labels.push_back(m.label);
    CHECK(labels == std::vector<std::string>{"q1", "q2", "q3", "q1'", "q2'", "q3'", "qA", "c1", "c2", "c3", "c1'",
                                             "c2'", "c3'"});
    CHECK(modes[6].kind == ModeKind::Qutrit);
    CHECK(modes[7].kind == ModeKind::Cavity);
    CHECK(modes[7].levels == 2);
}

TEST_CASE("index round trip on every state") {
    TransferLayout layout;
    layout.n = 1;
    for (auto emax : {std::optional<int>{}, std::optional<int>{1}, std::optional<int>{2}}) {
        const auto b = build_transfer_basis(layout, emax);
        for (std::size_t i = 0; i < b->dimension(); ++i) {
            const auto idx = b->index_of(b->occupation(i));
            REQUIRE(idx.has_value());
            CHECK(*idx == i);
            if (emax) CHECK(b->weight(i) <= *emax);
        }
    }
}

TEST_CASE("sector excludes heavier states") {
    TransferLayout layout;
    const auto b = build_transfer_basis(layout, 1);
    std::vector<std::uint8_t> occ(b->mode_count(), 0);
    occ[0] = 2;
    CHECK_FALSE(b->index_of(occ).has_value());
    occ[0] = 1;
    CHECK(b->index_of(occ).has_value());
    occ[7] = 1;
    CHECK_FALSE(b->index_of(occ).has_value());
    std::vector<std::uint8_t> bad(b->mode_count(), 0);
    bad[7] = 2;  // beyond the cavity truncation
    CHECK_FALSE(b->index_of(bad).has_value());
}

TEST_CASE("index_with and lookups") {
    TransferLayout layout;
    const auto b = build_transfer_basis(layout, 1);
    const std::pair<std::string, int> q2[] = {{"q2", 1}};
    const auto i = b->index_with(q2);
    REQUIRE(i.has_value());
    CHECK(b->occupation(*i)[1] == 1);
    CHECK(b->weight(*i) == 1);
    const std::pair<std::string, int> two[] = {{"q2", 1}, {"c1", 1}};
    CHECK_FALSE(b->index_with(two).has_value());
    CHECK(b->mode_index("qA") == 6);
    CHECK(b->has_mode("c3'"));
    CHECK_THROWS_AS(b->mode_index("q9"), LookupError);
    CHECK_THROWS_AS(b->occupation(14), LookupError);
}

TEST_CASE("basis validation") {
    CHECK_THROWS_AS(build_basis({}), ConfigError);
    CHECK_THROWS_AS(build_basis({{ModeKind::Qutrit, 3, "q"}, {ModeKind::Cavity, 2, "q"}}), ConfigError);
    CHECK_THROWS_AS(build_basis({{ModeKind::Qutrit, 1, "q"}}), ConfigError);
    CHECK_THROWS_AS(build_basis({{ModeKind::Qutrit, 3, ""}}), ConfigError);
    CHECK_THROWS_AS(build_basis({{ModeKind::Qutrit, 3, "q"}}, -1), ConfigError);
    TransferLayout layout;
    layout.n = 0;
    CHECK_THROWS_AS(build_transfer_basis(layout), ConfigError);
}

TEST_CASE("same_as compares modes and sector") {
    TransferLayout layout;
    const auto a = build_transfer_basis(layout, 1);
    const auto b = build_transfer_basis(layout, 1);
    const auto c = build_transfer_basis(layout, 2);
    CHECK(a->same_as(*b));
    CHECK_FALSE(a->same_as(*c));
}

TEST_CASE("site labels") {
    CHECK(TransferLayout::site_suffix(3, 0) == "1");
    CHECK(TransferLayout::site_suffix(3, 4) == "2'");
    TransferLayout layout;
    CHECK(layout.qutrit(5) == "q3'");
    CHECK(layout.cavity(2) == "c3");
    CHECK(TransferLayout::coupler() == "qA");
}
