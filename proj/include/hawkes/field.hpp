#pragma once

// Unit-rate Poisson random measure on time x threshold x mark, the driving
// noise of the thinning construction. The threshold axis is cut into strips of
// width W and time into blocks of length B; each (strip, block) cell is an
// independent Poisson process of rate W regenerated on demand from a stream
// keyed by (seed, strip, block).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hawkes/marks.hpp"

namespace hawkes {

struct FieldPoint {
    double t = 0.0;
    double theta = 0.0;
    double mark = 0.0;

    friend bool operator==(const FieldPoint&, const FieldPoint&) = default;
};

struct FieldGeometry {
    double strip_width = 1.0;
    double block_length = 8.0;
};

class PoissonField {
public:
    PoissonField(std::uint64_t seed, MarkDistribution marks, FieldGeometry geometry = {});

    // Field for replica r of a run with the given master seed.
    static PoissonField for_replica(std::uint64_t master_seed, std::uint64_t replica, MarkDistribution marks,
                                    FieldGeometry geometry = {});

    std::uint64_t seed() const { return seed_; }
    const FieldGeometry& geometry() const { return geometry_; }
    const MarkDistribution& marks() const { return marks_; }

    // Points of cell (strip, block), sorted by time. Deterministic in
    // (seed, strip, block) and, for spliced fields, the suffix seed.
    std::vector<FieldPoint> cell(std::size_t strip, std::int64_t block) const;

    // Points of strips [strip_lo, strip_hi) in the block with t > after (or
    // t >= after when inclusive), merged and sorted by time. Extra points are
    // not included.
    std::vector<FieldPoint> strip_points(std::int64_t block, std::size_t strip_lo, std::size_t strip_hi,
                                         double after, bool inclusive) const;

    // Points added by with_point, sorted by time.
    const std::vector<FieldPoint>& extra_points() const { return extra_; }

    // The shift epsilon^+: the same configuration plus one atom.
    PoissonField with_point(const FieldPoint& p) const;

    // Same configuration on [0, u); points with t >= u come from an independent
    // configuration keyed by suffix_seed.
    PoissonField with_suffix(double u, std::uint64_t suffix_seed) const;

private:
    std::vector<FieldPoint> generate(std::uint64_t seed, std::size_t strip, std::int64_t block) const;

    std::uint64_t seed_;
    MarkDistribution marks_;
    FieldGeometry geometry_;
    std::vector<FieldPoint> extra_;
    struct Splice {
        double u;
        std::uint64_t seed;
    };
    std::optional<Splice> splice_;
};

}  // namespace hawkes
