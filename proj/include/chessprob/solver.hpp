// solver.hpp
// Directmate solver: exhaustive depth-limited AND-OR search deciding forced
// mate in N, enumerating every key, and extracting the full solution tree.

#pragma once

#include "board.hpp"
#include "san.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace chessprob {

struct Stipulation {
    int moves = 3;

    static Stipulation mate_in(int n) {
        if (n < 1 || n > 4)
            throw std::invalid_argument("stipulation must be mate in 1..4, got " + std::to_string(n));
        return Stipulation{n};
    }
    bool operator==(const Stipulation&) const = default;
};

struct Defense;

// A White move that keeps a forced mate within the remaining budget.
// `defenses` lists every legal Black reply; it is empty iff the move mates.
struct Continuation {
    Move move;
    std::string san;
    bool mates = false;
    std::vector<Defense> defenses;
};

// A Black reply together with every White continuation that still mates in time.
struct Defense {
    Move move;
    std::string san;
    std::vector<Continuation> continuations;
};

struct SolutionTree {
    Position root;
    Stipulation stipulation;
    Continuation key;
};

struct SolverOptions {
    bool use_cache = true;
};

class MateSolver {
public:
    explicit MateSolver(SolverOptions options = {}) : options_(options) {}

    // Side to move forces mate in at most n moves.
    bool mates_within(const Position& p, int n) { return attacker_wins(p, n); }

    // First moves after which mate follows within n moves in total, SAN-sorted.
    std::vector<Move> find_all_keys(const Position& p, Stipulation stip) {
        std::vector<Move> keys;
        for (const Move& m : legal_moves(p))
            if (defender_loses(p.after(m), stip.moves))
                keys.push_back(m);
        sort_by_san(p, keys);
        return keys;
    }

    std::optional<int> shortest_forced_mate(const Position& p, Stipulation cap) {
        for (int k = 1; k <= cap.moves; ++k)
            if (attacker_wins(p, k))
                return k;
        return std::nullopt;
    }

    // Tree rooted at the SAN-first key, or nullopt when there is no forced mate.
    std::optional<SolutionTree> forced_mate_in(const Position& p, Stipulation stip) {
        const auto keys = find_all_keys(p, stip);
        if (keys.empty())
            return std::nullopt;
        return solution_tree(p, keys.front(), stip);
    }

    // Tree for a given key; the key must force mate within the stipulation.
    SolutionTree solution_tree(const Position& p, const Move& key, Stipulation stip) {
        auto legal = find_legal(p, key);
        if (!legal || !defender_loses(p.after(*legal), stip.moves))
            throw std::invalid_argument("move " + uci(key) + " does not force mate in " + std::to_string(stip.moves));
        return SolutionTree{p, stip, build_continuation(p, *legal, stip.moves)};
    }

    // Defender to move in `q`; the attacker has `k` moves counting the one just played.
    bool defender_loses(const Position& q, int k) {
        ++nodes_;
        const MoveList replies = legal_moves(q);
        if (replies.empty())
            return q.in_check();
        if (k <= 1)
            return false;
        Move& killer = killers_[k];
        for (const Move& r : replies)
            if (r == killer && !attacker_wins(q.after(r), k - 1))
                return false;
        for (const Move& r : replies) {
            if (r == killer)
                continue;
            if (!attacker_wins(q.after(r), k - 1)) {
                killer = r;
                return false;
            }
        }
        return true;
    }

    void clear_cache() { cache_.clear(); }
    std::uint64_t nodes() const { return nodes_; }

private:
    struct Bounds {
        std::uint8_t min_win = 0xFF; // mate known within this many moves
        std::uint8_t max_loss = 0;   // known no mate within this many moves
    };

    bool attacker_wins(const Position& p, int k) {
        if (k <= 0)
            return false;
        if (k == 1)
            return mate_in_one(p);
        ++nodes_;
        if (options_.use_cache) {
            auto it = cache_.find(p.hash());
            if (it != cache_.end()) {
                if (k >= it->second.min_win)
                    return true;
                if (k <= it->second.max_loss)
                    return false;
            }
        }
        MoveList moves = legal_moves(p);
        // Checks first, then captures; ordering only affects speed.
        std::stable_partition(moves.begin(), moves.end(), [](const Move& m) { return m.is_check(); });
        bool win = false;
        for (const Move& m : moves)
            if (defender_loses(p.after(m), k)) {
                win = true;
                break;
            }
        if (options_.use_cache) {
            Bounds& b = cache_[p.hash()];
            if (win)
                b.min_win = std::min<std::uint8_t>(b.min_win, static_cast<std::uint8_t>(k));
            else
                b.max_loss = std::max<std::uint8_t>(b.max_loss, static_cast<std::uint8_t>(k));
        }
        return win;
    }

    bool mate_in_one(const Position& p) {
        ++nodes_;
        MoveList pseudo;
        detail::pseudo_legal_moves(p, pseudo);
        const Color us = p.side_to_move(), them = ~us;
        const Square their_king = p.king_square(them);
        for (const Move& m : pseudo) {
            const Position next = p.after(m);
            if (!next.is_attacked(their_king, us) || next.in_check(us))
                continue;
            if (!has_legal_move(next))
                return true;
        }
        return false;
    }

    Continuation build_continuation(const Position& p, const Move& m, int k) {
        Continuation c{m, to_san(p, m), false, {}};
        const Position q = p.after(m);
        const MoveList replies = legal_moves(q);
        if (replies.empty()) {
            c.mates = true;
            return c;
        }
        for (const Move& r : replies) {
            const Position after_reply = q.after(r);
            Defense d{r, to_san(q, r), {}};
            for (const Move& m2 : legal_moves(after_reply))
                if (defender_loses(after_reply.after(m2), k - 1))
                    d.continuations.push_back(build_continuation(after_reply, m2, k - 1));
            std::sort(d.continuations.begin(), d.continuations.end(),
                      [](const Continuation& a, const Continuation& b) { return a.san < b.san; });
            c.defenses.push_back(std::move(d));
        }
        std::sort(c.defenses.begin(), c.defenses.end(),
                  [](const Defense& a, const Defense& b) { return a.san < b.san; });
        return c;
    }

    static void sort_by_san(const Position& p, std::vector<Move>& moves) {
        std::vector<std::pair<std::string, Move>> keyed;
        keyed.reserve(moves.size());
        for (const Move& m : moves)
            keyed.emplace_back(to_san(p, m), m);
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < moves.size(); ++i)
            moves[i] = keyed[i].second;
    }

    SolverOptions options_;
    std::unordered_map<std::uint64_t, Bounds> cache_;
    std::array<Move, 8> killers_{};
    std::uint64_t nodes_ = 0;
};

// ---------------------------------------------------------------------------
// Tree queries

// Moves until mate when both sides play the tree optimally
// (White shortest, Black longest resistance).
inline int mate_distance(const Continuation& c) {
    if (c.mates)
        return 1;
    int worst = 0;
    for (const Defense& d : c.defenses) {
        int best = 1 << 20;
        for (const Continuation& next : d.continuations)
            best = std::min(best, mate_distance(next));
        worst = std::max(worst, best);
    }
    return 1 + worst;
}

// Main line: Black picks the most stubborn defense, White the quickest mate;
// ties go to the SAN-first move.
inline std::vector<Move> main_line(const SolutionTree& tree) {
    std::vector<Move> line;
    const Continuation* c = &tree.key;
    while (true) {
        line.push_back(c->move);
        if (c->mates || c->defenses.empty())
            break;
        const Defense* pick = nullptr;
        int pick_len = -1;
        for (const Defense& d : c->defenses) {
            int best = 1 << 20;
            for (const Continuation& next : d.continuations)
                best = std::min(best, mate_distance(next));
            if (best > pick_len) {
                pick_len = best;
                pick = &d;
            }
        }
        line.push_back(pick->move);
        const Continuation* next = nullptr;
        int next_len = 1 << 20;
        for (const Continuation& cand : pick->continuations) {
            const int len = mate_distance(cand);
            if (len < next_len) {
                next_len = len;
                next = &cand;
            }
        }
        c = next;
    }
    return line;
}

inline std::size_t tree_size(const Continuation& c) {
    std::size_t n = 1;
    for (const Defense& d : c.defenses)
        for (const Continuation& next : d.continuations)
            n += tree_size(next);
    return n;
}

} // namespace chessprob
