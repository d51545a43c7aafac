#pragma once

#include <utility>

#include "mindet/grid.hpp"

namespace mindet {

enum class BumpKind { standard_bump, cosine_power_bump };

// smooth compactly supported generator: support (center - half_width,
// center + half_width), exact zeros outside, grid-normalized so the
// quadrature of |f|^2 equals 1
struct BumpSpec {
    double center = 0.0;
    double half_width = 1.0;
    BumpKind kind = BumpKind::standard_bump;
    int power = 12;                   // cosine_power_bump exponent, >= 4
    cplx amplitude_phase = cplx(1.0); // unit modulus
};

GridFunction make_bump(const BumpSpec& spec, const Grid& grid);

struct DisjointPairSpec {
    BumpSpec left;
    BumpSpec right;
    double norm_split = 0.5; // fraction of the combined L2 mass on the left
};

// (f1, f2) with hard-zero disjoint supports, |f1|^2 integrating to
// norm_split and |f2|^2 to 1 - norm_split
std::pair<GridFunction, GridFunction>
make_disjoint_pair(const DisjointPairSpec& spec, const Grid& grid);

} // namespace mindet
