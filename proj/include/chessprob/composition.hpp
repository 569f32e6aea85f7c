// composition.hpp
// A problem position bundled with its stipulation and solved solution.

#pragma once

#include "board.hpp"
#include "san.hpp"
#include "solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chessprob {

struct Composition {
    Position position;
    Stipulation stipulation;
    std::vector<Move> keys;            // SAN-sorted
    std::optional<SolutionTree> tree;  // rooted at keys.front()
    std::vector<Move> main_line;
    std::optional<int> shortest_mate;

    bool solved() const { return !keys.empty() && tree.has_value(); }
    std::string main_line_san() const { return render_line(position, main_line); }
};

// Runs the solver and fills in keys, tree and main line. An unsolvable
// position yields a Composition with no keys.
inline Composition solve_composition(const Position& p, Stipulation stip, MateSolver& solver) {
    Composition c{p, stip, {}, std::nullopt, {}, std::nullopt};
    if (p.side_to_move() != Color::White)
        return c;
    c.shortest_mate = solver.shortest_forced_mate(p, stip);
    if (!c.shortest_mate)
        return c;
    c.keys = solver.find_all_keys(p, stip);
    c.tree = solver.solution_tree(p, c.keys.front(), stip);
    c.main_line = main_line(*c.tree);
    return c;
}

inline Composition solve_composition(const Position& p, Stipulation stip) {
    MateSolver solver;
    return solve_composition(p, stip, solver);
}

} // namespace chessprob
