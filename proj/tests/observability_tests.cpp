#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "bcn/observability.hpp"
#include "test_support.hpp"

using namespace bcn;

TEST_CASE("closure rows of the three-state reference system") {
    const ObservabilityMatrix o = obs_rows(fixtures::mixed3());
    REQUIRE(o.rows.size() == 4);
    CHECK(o.rows[0].word.empty());
    CHECK(o.rows[0].row == std::vector<int>{2, 1, 1, 1, 1, 1, 1, 2});
    CHECK(o.rows[1].word == std::vector<int>{1});
    CHECK(o.rows[1].row == std::vector<int>{1, 2, 1, 2, 2, 1, 2, 1});
    CHECK(o.rows[2].word == std::vector<int>{2});
    CHECK(o.rows[2].row == std::vector<int>{1, 1, 1, 1, 1, 1, 1, 1});
    CHECK(o.rows[3].word == std::vector<int>{1, 2});
    CHECK(o.rows[3].row == std::vector<int>{2, 2, 2, 2, 2, 2, 2, 2});
    CHECK(o.closure_depth == 2);
}

TEST_CASE("closure rows of the autonomous two-state system") {
    const ObservabilityMatrix o = obs_rows(fixtures::autonomous2());
    REQUIRE(o.rows.size() == 2);
    CHECK(o.rows[0].row == std::vector<int>{1, 1, 1, 2});
    CHECK(o.rows[1].row == std::vector<int>{1, 1, 1, 1});
    CHECK(o.rows[1].word == std::vector<int>{1});
}

TEST_CASE("closure rows of the register cascade") {
    const ObservabilityMatrix o = obs_rows(fixtures::shift_register(3));
    std::set<std::vector<int>> rows;
    for (const auto& r : o.rows) rows.insert(r.row);
    const std::set<std::vector<int>> expected{{1, 1, 1, 1, 2, 2, 2, 2}, {1, 1, 2, 2, 1, 1, 2, 2},
                                              {1, 2, 1, 2, 1, 2, 1, 2}, {1, 1, 1, 1, 1, 1, 1, 1},
                                              {2, 2, 2, 2, 2, 2, 2, 2}};
    CHECK(rows == expected);
    CHECK(o.rows.size() == 5);
    CHECK(o.closure_depth == 3);
}

TEST_CASE("closure rows are distinct, start from H and are multiplicatively closed") {
    testgen::Rng rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        // keep the closure bounded: the row count explodes on random wide
        // systems (it is finite, not small), so n=4 draws use p=1
        const bool big = trial % 5 == 0;
        const BCN b = big ? testgen::random_bcn(4, trial % 3, 1, rng)
                          : testgen::random_bcn(1 + trial % 3, trial % 3, 1 + trial % 2, rng);
        const ObservabilityMatrix o = obs_rows(b);
        REQUIRE(!o.rows.empty());
        CHECK(o.rows.front().word.empty());
        CHECK(o.rows.front().row == b.H.delta());

        std::set<std::vector<int>> seen;
        for (const auto& r : o.rows) CHECK(seen.insert(r.row).second);

        // fixpoint: right-multiplying any stored row by any block stays inside
        const auto ljs = blocks(b);
        for (const auto& r : o.rows)
            for (const auto& lj : ljs) {
                std::vector<int> prod(r.row.size());
                for (int q = 1; q <= o.width; ++q)
                    prod[static_cast<std::size_t>(q - 1)] =
                        r.row[static_cast<std::size_t>(lj.col(q) - 1)];
                CHECK(seen.count(prod) == 1);
            }

        // words are ordered by (length, lexicographic) with the empty word first
        for (std::size_t i = 1; i < o.rows.size(); ++i) {
            const auto& a = o.rows[i - 1].word;
            const auto& bw = o.rows[i].word;
            CHECK((a.size() < bw.size() || (a.size() == bw.size() && a <= bw)));
        }
    }
}

TEST_CASE("indistinguishability partition fixed values") {
    CHECK(obs_partition(fixtures::mixed3()) == Partition(8, {{1, 8}, {2, 4, 5, 7}, {3, 6}}));
    CHECK(obs_partition(fixtures::autonomous2()) == Partition(4, {{1, 2, 3}, {4}}));
    CHECK(obs_partition(fixtures::shift_register(3)) == Partition::singletons(8));
}

TEST_CASE("indistinguishability partition equals both row-based routes") {
    testgen::Rng rng(67);
    for (int trial = 0; trial < 60; ++trial) {
        const bool big = trial % 5 == 0;
        const BCN b = big ? testgen::random_bcn(4, trial % 3, 1, rng)
                          : testgen::random_bcn(1 + trial % 3, trial % 3, 1 + trial % 2, rng);
        const ObservabilityMatrix o = obs_rows(b);
        // route 1: greatest common refinement of the per-row partitions
        std::vector<Partition> per_row;
        for (const auto& r : o.rows) per_row.push_back(Partition::from_labels(r.row));
        const Partition via_gcr = gcr(per_row);
        // route 2: classes of equal matrix columns
        std::vector<int> labels(static_cast<std::size_t>(o.width));
        std::map<std::vector<int>, int> ids;
        std::vector<int> column(o.rows.size());
        for (int q = 1; q <= o.width; ++q) {
            for (std::size_t r = 0; r < o.rows.size(); ++r)
                column[r] = o.rows[r].row[static_cast<std::size_t>(q - 1)];
            auto [it, fresh] = ids.emplace(column, static_cast<int>(ids.size()) + 1);
            (void)fresh;
            labels[static_cast<std::size_t>(q - 1)] = it->second;
        }
        const Partition via_columns = Partition::from_labels(labels);
        CHECK(obs_partition(b) == via_gcr);
        CHECK(obs_partition(b) == via_columns);
    }
}

TEST_CASE("indistinguishability classes are forward-closed") {
    testgen::Rng rng(71);
    for (int trial = 0; trial < 60; ++trial) {
        const BCN b = testgen::random_bcn(1 + trial % 4, trial % 3, 1 + trial % 2, rng);
        const Partition c = obs_partition(b);
        for (const auto& lj : blocks(b))
            for (const auto& blk : c.blocks()) {
                const std::vector<int> succ = out_neighborhood(lj, blk);
                const int target = c.block_of(succ.front());
                for (int v : succ) CHECK(c.block_of(v) == target);
            }
    }
}

TEST_CASE("column-distinctness flag and parity obstruction") {
    CHECK(is_observable_columns(fixtures::shift_register(3)));
    CHECK(is_observable_columns(fixtures::shift_register(4)));
    CHECK_FALSE(is_observable_columns(fixtures::mixed3()));
    CHECK_FALSE(is_observable_columns(fixtures::autonomous2()));

    CHECK(undecomposable_by_parity(Partition(4, {{1, 2, 3}, {4}})));
    CHECK_FALSE(undecomposable_by_parity(Partition(8, {{1, 8}, {2, 4, 5, 7}, {3, 6}})));
    CHECK(undecomposable_by_parity(Partition::singletons(4)));
}
