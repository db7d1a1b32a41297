#include "csc/grf.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "csc/errors.hpp"
#include "csc/fft.hpp"

namespace csc {

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller. Uniforms mapped to (0,1] so log() stays finite.
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
    const double u2 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

void NormalStream::fill(std::span<double> out) {
    for (double& v : out) v = next();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string GrfSpec::describe() const {
    std::ostringstream os;
    os << "grf(nx=" << nx << ",ny=" << ny << ",components=[";
    for (size_t c = 0; c < components.size(); ++c) {
        if (c) os << ";";
        os << "a=" << components[c].range << ",w=" << components[c].weight;
    }
    os << "],variance=" << variance << ",mean=" << mean << ",seed=" << seed << ")";
    return os.str();
}

void validate_grf_spec(const GrfSpec& spec) {
    if (spec.nx < 2 || spec.ny < 2) {
        throw validation_error("grf spec: nx and ny must both be >= 2");
    }
    if (spec.components.empty()) {
        throw validation_error("grf spec: at least one correlation component is required");
    }
    double weight_sum = 0.0;
    for (const auto& c : spec.components) {
        if (!(c.range > 0.0) || !std::isfinite(c.range)) {
            throw validation_error("grf spec: every component range must be > 0");
        }
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            throw validation_error("grf spec: every component weight must be > 0");
        }
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        throw validation_error("grf spec: component weights must sum to 1 within 1e-12, got " +
                               std::to_string(weight_sum));
    }
    if (!(spec.variance >= 0.0) || !std::isfinite(spec.variance)) {
        throw validation_error("grf spec: variance must be >= 0");
    }
    if (!std::isfinite(spec.mean)) {
        throw validation_error("grf spec: mean must be finite");
    }
}

namespace {

// Adds one single-range realization with point variance `var` into `acc`.
// Circulant embedding: the squared-exponential covariance is wrapped onto a
// torus padded to >= 2x each dimension; its FFT gives the circulant
// eigenvalues. Tiny negative eigenvalues (wrap-around kink) are clipped to
// zero and the spectrum rescaled to keep the total variance; clipping beyond
// 0.1% of the spectral mass aborts.
void add_single_range(std::vector<double>& acc, int nx, int ny, double range, double var,
                      std::uint64_t seed) {
    const size_t mx = next_pow2(static_cast<size_t>(2) * nx);
    const size_t my = next_pow2(static_cast<size_t>(2) * ny);
    const double inv_a2 = 1.0 / (range * range);

    std::vector<std::complex<double>> spec(mx * my);
    for (size_t iy = 0; iy < my; ++iy) {
        const double dy = static_cast<double>(std::min(iy, my - iy));
        for (size_t ix = 0; ix < mx; ++ix) {
            const double dx = static_cast<double>(std::min(ix, mx - ix));
            spec[iy * mx + ix] = var * std::exp(-(dx * dx + dy * dy) * inv_a2);
        }
    }
    fft2_pow2(spec.data(), mx, my, false);

    double positive_mass = 0.0, negative_mass = 0.0;
    for (const auto& z : spec) {
        const double lam = z.real();
        if (lam >= 0.0) {
            positive_mass += lam;
        } else {
            negative_mass -= lam;
        }
    }
    const double total_mass = positive_mass + negative_mass;
    if (total_mass > 0.0 && negative_mass > 1e-3 * total_mass) {
        throw degenerate_field_error(
            "circulant embedding is not positive definite: clipped " +
            std::to_string(100.0 * negative_mass / total_mass) +
            "% of spectral mass (limit 0.1%); range " + std::to_string(range) +
            " is too large for a " + std::to_string(nx) + "x" + std::to_string(ny) + " grid");
    }
    const double rescale = positive_mass > 0.0 ? (positive_mass - negative_mass) / positive_mass : 0.0;

    NormalStream normals(seed);
    const double norm = 1.0 / std::sqrt(static_cast<double>(mx * my));
    for (auto& z : spec) {
        const double lam = std::max(z.real(), 0.0) * rescale;
        const double amp = std::sqrt(lam) * norm;
        const double re = normals.next();
        const double im = normals.next();
        z = std::complex<double>(amp * re, amp * im);
    }
    fft2_pow2(spec.data(), mx, my, false);

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            acc[static_cast<size_t>(iy) * nx + ix] += spec[static_cast<size_t>(iy) * mx + ix].real();
        }
    }
}

}  // namespace

Field2D generate_grf(const GrfSpec& spec) {
    validate_grf_spec(spec);

    Field2D field;
    field.nx = spec.nx;
    field.ny = spec.ny;
    field.values.assign(static_cast<size_t>(spec.nx) * spec.ny, 0.0);
    field.provenance = spec.describe();
    if (!spec.field_id.empty()) {
        field.field_id = spec.field_id;
    } else {
        std::ostringstream id;
        id << "grf";
        for (const auto& c : spec.components) id << "_a" << c.range;
        id << "_s" << spec.seed;
        field.field_id = id.str();
    }

    if (spec.variance > 0.0) {
        for (size_t c = 0; c < spec.components.size(); ++c) {
            add_single_range(field.values, spec.nx, spec.ny, spec.components[c].range,
                             spec.components[c].weight * spec.variance, mix_seed(spec.seed, c));
        }
    }
    if (spec.mean != 0.0) {
        for (double& v : field.values) v += spec.mean;
    }
    return field;
}

}  // namespace csc
