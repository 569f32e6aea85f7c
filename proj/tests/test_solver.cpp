#include "common.hpp"
#include "oracle/mailbox.hpp"

#include <chessprob/composition.hpp>
#include <chessprob/solver.hpp>

#include <gtest/gtest.h>

using namespace chessprob;

namespace {

constexpr const char* kUnderpromotionFen = "1BK5/8/2kP4/8/2P3p1/2N5/8/8 w - - 0 1";
constexpr const char* kCheckingKeyFen = "8/8/1k1K4/8/1n6/8/8/1Q6 w - - 0 1";

std::vector<std::string> oracle_keys(const Position& p, int n) {
    return oracle::mate_keys(oracle::Board::from_fen(p.fen()), n);
}

// Walks every line of the tree: Black nodes list all legal replies, leaves are mate.
void check_tree(const Position& p, const Continuation& c, int budget) {
    ASSERT_GE(budget, 1);
    const Position q = p.after(c.move);
    if (c.mates) {
        EXPECT_TRUE(is_checkmate(q)) << q.fen();
        EXPECT_TRUE(c.defenses.empty());
        return;
    }
    std::vector<Move> replies;
    for (const Defense& d : c.defenses)
        replies.push_back(d.move);
    EXPECT_EQ(testutil::uci_list(replies), testutil::uci_list(legal_moves(q).to_vector())) << q.fen();
    for (const Defense& d : c.defenses) {
        ASSERT_FALSE(d.continuations.empty()) << "defense " << d.san << " escapes";
        for (const Continuation& next : d.continuations)
            check_tree(q.after(d.move), next, budget - 1);
    }
}

} // namespace

TEST(Solver, RookMateInOne) {
    const auto p = Position::from_fen("7k/8/6K1/8/8/8/8/R7 w - - 0 1");
    MateSolver s;
    const auto tree = s.forced_mate_in(p, Stipulation::mate_in(1));
    ASSERT_TRUE(tree);
    EXPECT_TRUE(tree->key.mates);
    EXPECT_EQ(testutil::uci_list(s.find_all_keys(p, Stipulation{1})), oracle_keys(p, 1));
    EXPECT_EQ(s.shortest_forced_mate(p, Stipulation{3}), 1);
}

TEST(Solver, LoneKingsNeverMate) {
    const auto p = Position::from_fen("8/8/8/3k4/8/8/8/K7 w - - 0 1");
    MateSolver s;
    for (int n = 1; n <= 4; ++n) {
        EXPECT_FALSE(s.forced_mate_in(p, Stipulation::mate_in(n)));
        EXPECT_TRUE(s.find_all_keys(p, Stipulation{n}).empty());
    }
    EXPECT_FALSE(s.shortest_forced_mate(p, Stipulation{3}));
}

TEST(Solver, StipulationRange) {
    EXPECT_THROW(Stipulation::mate_in(0), std::invalid_argument);
    EXPECT_THROW(Stipulation::mate_in(5), std::invalid_argument);
}

TEST(Solver, CuratedThreeMoversMatchOracle) {
    for (const char* fen : {kUnderpromotionFen, kCheckingKeyFen}) {
        const auto p = Position::from_fen(fen);
        MateSolver s;
        const auto keys = s.find_all_keys(p, Stipulation{3});
        EXPECT_EQ(testutil::uci_list(keys), oracle_keys(p, 3)) << fen;
        EXPECT_EQ(keys.size(), 1u);
        EXPECT_EQ(s.shortest_forced_mate(p, Stipulation{3}), 3);
        EXPECT_TRUE(oracle_keys(p, 2).empty());
    }
}

TEST(Solver, TreeReplaysToMate) {
    for (const char* fen : {kUnderpromotionFen, kCheckingKeyFen}) {
        const auto c = solve_composition(Position::from_fen(fen), Stipulation{3});
        ASSERT_TRUE(c.solved());
        check_tree(c.position, c.tree->key, 3);
        // The main line is a legal sequence ending in mate, at most 2n - 1 plies.
        Position q = c.position;
        for (const Move& m : c.main_line)
            q = q.after(m);
        EXPECT_TRUE(is_checkmate(q));
        EXPECT_LE(c.main_line.size(), 5u);
        EXPECT_EQ(mate_distance(c.tree->key), 3);
    }
    EXPECT_EQ(solve_composition(Position::from_fen(kUnderpromotionFen), Stipulation{3}).main_line_san(),
              "1. Na4 g3 2. d7 g2 3. d8=N#");
    EXPECT_EQ(solve_composition(Position::from_fen(kCheckingKeyFen), Stipulation{3}).main_line_san(),
              "1. Qxb4+ Ka6 2. Kc6 Ka7 3. Qb7#");
}

TEST(Solver, RandomPositionsMatchOracleAndAreMonotone) {
    Rng rng = make_stream({2024});
    MateSolver cached, uncached(SolverOptions{false});
    int with_keys = 0;
    for (int i = 0; i < 300; ++i) {
        const auto p = testutil::random_small_position(rng, 7);
        const auto keys = cached.find_all_keys(p, Stipulation{2});
        EXPECT_EQ(testutil::uci_list(keys), oracle_keys(p, 2)) << p.fen();
        EXPECT_EQ(testutil::uci_list(uncached.find_all_keys(p, Stipulation{2})), testutil::uci_list(keys));
        with_keys += !keys.empty();
        for (int n = 1; n < 3; ++n)
            if (cached.mates_within(p, n))
                EXPECT_TRUE(cached.mates_within(p, n + 1)) << p.fen();
    }
    EXPECT_GT(with_keys, 10);
}

TEST(Solver, CacheDoesNotChangeTrees) {
    const auto p = Position::from_fen(kUnderpromotionFen);
    MateSolver a, b(SolverOptions{false});
    const auto ca = solve_composition(p, Stipulation{3}, a);
    const auto cb = solve_composition(p, Stipulation{3}, b);
    EXPECT_EQ(tree_size(ca.tree->key), tree_size(cb.tree->key));
    EXPECT_EQ(ca.main_line_san(), cb.main_line_san());
}

TEST(Solver, RejectsNonKey) {
    const auto p = Position::from_fen(kUnderpromotionFen);
    MateSolver s;
    EXPECT_THROW(s.solution_tree(p, Move{C8, D8}, Stipulation{3}), std::invalid_argument);
}

TEST(Composition, BlackToMoveOrUnsolved) {
    EXPECT_FALSE(solve_composition(Position::from_fen("8/8/8/3k4/8/8/8/K7 b - - 0 1"), Stipulation{3}).solved());
    EXPECT_FALSE(solve_composition(Position::from_fen("8/8/8/3k4/8/8/8/K7 w - - 0 1"), Stipulation{3}).solved());
}
