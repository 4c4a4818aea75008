#pragma once

#include <stdexcept>
#include <string>

namespace scalekit {

/// Stable error tags carried by every toolkit exception. The CLI prints the
/// tag on a single diagnostic line; tests match on it.
enum class Err {
    missing_file,
    malformed_header,
    malformed_data,
    length_mismatch,
    io_failure,
    dim_mismatch,
    non_cubic_grid,
    shape_mismatch,
    bad_params,
    negative_input,
    scale_too_large,
    bad_channel,
    negative_factor,
    insufficient_channels,
    model_failure,
    model_timeout,
    bad_output,
    all_masked,
    empty_support,
    missing_truth,
};

const char* err_tag(Err code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& message)
        : std::runtime_error(std::string(err_tag(code)) + ": " + message), code_(code) {}

    Err code() const noexcept { return code_; }
    const char* tag() const noexcept { return err_tag(code_); }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
    throw Error(code, message);
}

inline const char* err_tag(Err code) noexcept {
    switch (code) {
        case Err::missing_file: return "MISSING_FILE";
        case Err::malformed_header: return "MALFORMED_HEADER";
        case Err::malformed_data: return "MALFORMED_DATA";
        case Err::length_mismatch: return "LENGTH_MISMATCH";
        case Err::io_failure: return "IO_FAILURE";
        case Err::dim_mismatch: return "DIM_MISMATCH";
        case Err::non_cubic_grid: return "NON_CUBIC_GRID";
        case Err::shape_mismatch: return "SHAPE_MISMATCH";
        case Err::bad_params: return "BAD_PARAMS";
        case Err::negative_input: return "NEGATIVE_INPUT";
        case Err::scale_too_large: return "SCALE_TOO_LARGE";
        case Err::bad_channel: return "BAD_CHANNEL";
        case Err::negative_factor: return "NEGATIVE_FACTOR";
        case Err::insufficient_channels: return "INSUFFICIENT_CHANNELS";
        case Err::model_failure: return "MODEL_FAILURE";
        case Err::model_timeout: return "MODEL_TIMEOUT";
        case Err::bad_output: return "BAD_OUTPUT";
        case Err::all_masked: return "ALL_MASKED";
        case Err::empty_support: return "EMPTY_SUPPORT";
        case Err::missing_truth: return "MISSING_TRUTH";
    }
    return "UNKNOWN";
}

}  // namespace scalekit
