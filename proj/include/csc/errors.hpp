#ifndef CSC_ERRORS_HPP
#define CSC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csc {

// Base class for all toolkit errors. Subcommands map these to nonzero
// exit codes with the message on stderr.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// An input object violates one of its stated invariants.
struct validation_error : error {
    using error::error;
};

// A flag or function parameter is out of its allowed range.
struct parameter_error : error {
    using error::error;
};

// An input field/record is unusable (too small, wrong shape, ...).
struct input_error : error {
    using error::error;
};

// A file does not match the declared layout (size, dtype, ...).
struct format_error : error {
    using error::error;
};

// A slice or element index is out of range.
struct index_error : error {
    using error::error;
};

// The data admits no meaningful estimate (e.g. constant field variogram).
struct degenerate_field_error : error {
    using error::error;
};

// Too few bins/points to fit the requested model.
struct insufficient_data_error : error {
    using error::error;
};

// A compressed payload is corrupt or truncated.
struct integrity_error : error {
    using error::error;
};

// A blob was produced by an incompatible codec version.
struct version_error : error {
    using error::error;
};

// An external codec process failed or violated its contract.
struct external_codec_error : error {
    using error::error;
};

// A CSV/JSON document is missing expected columns or keys.
struct schema_error : error {
    using error::error;
};

// A regression input lies outside the model domain (x <= 0).
struct domain_error : error {
    using error::error;
};

// The regression design matrix is rank deficient (all x equal).
struct rank_deficiency_error : error {
    using error::error;
};

}  // namespace csc

#endif
