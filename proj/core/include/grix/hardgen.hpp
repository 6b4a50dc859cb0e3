#pragma once

#include <random>

#include "grix/grammar.hpp"

namespace grix {

// T(i) as a membership vector over [0, B); all blocks have the same B.
using block_sets = std::vector<std::vector<bool>>;

// Binary string of length B^N whose bit at sum S(i) B^i is 1 iff some S(i) lies in T(i).
// Terminal 0 is '0', terminal 1 is '1'.
grammar vy_grammar(const block_sets& t, flavor kind = flavor::rlslg);

struct hard_instance {
    grammar g;
    std::uint32_t p = 0, q = 0, b = 0;
    u64 part_length = 0;  // B^P
    block_sets t;

    // the Q positions probed by a choice S : [PQ] -> [B]
    std::vector<u64> probes(const std::vector<std::uint32_t>& s) const;
};

// Q concatenated parts, part q built from blocks [qP, qP + P).
hard_instance blsd_grammar(const block_sets& t, std::uint32_t p, std::uint32_t q, flavor kind = flavor::rlslg);

// Answer bit of each part: does S(qP + k) lie in T(qP + k) for some k < P.
std::vector<bool> blsd_eval(const block_sets& t, const std::vector<std::uint32_t>& s, std::uint32_t p, std::uint32_t q);

// Appends zeros up to n_target using doubling variables for the binary digits
// of the missing length.
grammar pad_grammar(const grammar& g, u64 n_target, sym_t zero = 0);

struct hard_params {
    std::uint32_t b = 0, p = 0, q = 0;
    u64 n_prime = 0;  // Q B^P
    u64 g_prime = 0;  // 5PQB
};

// Block size, blocks per part and part count for length n and size g at word
// size w; throws RegimeViolation naming the inequality that fails.
hard_params pick_params(u64 n, u64 g, unsigned w, double epsilon);

// Random sets with each element present independently; density < 0 picks the
// value that makes every probe bit a fair coin.
block_sets random_blocks(std::size_t count, std::uint32_t b, std::mt19937_64& rng, double density = -1,
                         std::uint32_t p = 1);

// pick_params, random blocks and padding to length n.
hard_instance generate_hard(u64 n, u64 g, unsigned w, double epsilon, std::uint64_t seed,
                            flavor kind = flavor::rlslg);

}  // namespace grix
