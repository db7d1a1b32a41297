#ifndef CSC_GRF_HPP
#define CSC_GRF_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "csc/field.hpp"

namespace csc {

struct GrfComponent {
    double range = 8.0;   // correlation range, grid-point distance units
    double weight = 1.0;  // fraction of the total variance carried
};

// Specification of a Gaussian random field with squared-exponential covariance
//   cov(x_i, x_j) = variance * sum_c weight_c * exp(-|x_i - x_j|^2 / range_c^2).
struct GrfSpec {
    int nx = 1028;
    int ny = 1028;
    std::vector<GrfComponent> components = {GrfComponent{}};
    double variance = 1.0;
    double mean = 0.0;
    std::uint64_t seed = 0;
    std::string field_id;  // derived from the parameters when empty

    std::string describe() const;
};

// Throws validation_error naming the violated invariant.
void validate_grf_spec(const GrfSpec& spec);

// Samples one realization by FFT circulant embedding on a grid padded to at
// least twice each dimension. Multi-range specs are the sum of independent
// single-range fields carrying weight_c * variance each. Deterministic for a
// fixed seed within this implementation.
Field2D generate_grf(const GrfSpec& spec);

// Deterministic standard-normal stream: mt19937_64 (whose raw output is fixed
// by the standard) driving an explicit Box-Muller transform, so the sampled
// values do not depend on the C++ library's normal_distribution.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
    double next();
    void fill(std::span<double> out);

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// splitmix64 mix; used to derive independent per-component seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace csc

#endif
