#include "hawkes/field.hpp"

#include <algorithm>
#include <cmath>

#include "hawkes/error.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

bool by_time(const FieldPoint& a, const FieldPoint& b) { return a.t < b.t; }

}  // namespace

PoissonField::PoissonField(std::uint64_t seed, MarkDistribution marks, FieldGeometry geometry)
    : seed_(seed), marks_(std::move(marks)), geometry_(geometry) {
    if (!(geometry_.strip_width > 0.0) || !(geometry_.block_length > 0.0)) {
        throw DomainError("field strip width and block length must be positive");
    }
}

PoissonField PoissonField::for_replica(std::uint64_t master_seed, std::uint64_t replica, MarkDistribution marks,
                                       FieldGeometry geometry) {
    return PoissonField(mix_key({master_seed, replica, 0x7265706cULL}), std::move(marks), geometry);
}

std::vector<FieldPoint> PoissonField::generate(std::uint64_t seed, std::size_t strip, std::int64_t block) const {
    Xoshiro256 rng(mix_key({seed, std::uint64_t(strip), std::uint64_t(block)}));
    const double w = geometry_.strip_width;
    const double t0 = geometry_.block_length * double(block);
    const double t1 = geometry_.block_length * double(block + 1);
    const double theta0 = w * double(strip);
    std::vector<FieldPoint> out;
    out.reserve(std::size_t(w * geometry_.block_length * 1.5) + 4);
    double t = t0;
    for (;;) {
        t += rng.exponential(w);
        if (t >= t1) break;
        FieldPoint p;
        p.t = t;
        p.theta = theta0 + w * rng.uniform();
        p.mark = sample_mark(marks_, rng);
        out.push_back(p);
    }
    return out;
}

std::vector<FieldPoint> PoissonField::cell(std::size_t strip, std::int64_t block) const {
    if (!splice_) return generate(seed_, strip, block);
    const double t0 = geometry_.block_length * double(block);
    const double t1 = geometry_.block_length * double(block + 1);
    if (t1 <= splice_->u) return generate(seed_, strip, block);
    if (t0 >= splice_->u) return generate(splice_->seed, strip, block);
    std::vector<FieldPoint> out;
    for (const auto& p : generate(seed_, strip, block)) {
        if (p.t < splice_->u) out.push_back(p);
    }
    for (const auto& p : generate(splice_->seed, strip, block)) {
        if (p.t >= splice_->u) out.push_back(p);
    }
    return out;
}

std::vector<FieldPoint> PoissonField::strip_points(std::int64_t block, std::size_t strip_lo, std::size_t strip_hi,
                                                   double after, bool inclusive) const {
    std::vector<FieldPoint> out;
    for (std::size_t s = strip_lo; s < strip_hi; ++s) {
        for (const auto& p : cell(s, block)) {
            if (p.t > after || (inclusive && p.t == after)) out.push_back(p);
        }
    }
    std::stable_sort(out.begin(), out.end(), by_time);
    return out;
}

PoissonField PoissonField::with_point(const FieldPoint& p) const {
    if (!(p.t >= 0.0) || !(p.theta >= 0.0)) throw DomainError("added field point needs t >= 0 and theta >= 0");
    PoissonField out = *this;
    auto pos = std::upper_bound(out.extra_.begin(), out.extra_.end(), p, by_time);
    out.extra_.insert(pos, p);
    return out;
}

PoissonField PoissonField::with_suffix(double u, std::uint64_t suffix_seed) const {
    PoissonField out = *this;
    out.splice_ = Splice{u, suffix_seed};
    return out;
}

}  // namespace hawkes
