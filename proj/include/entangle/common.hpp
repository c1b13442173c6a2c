#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace entangle {

/// Actor identifiers are opaque strings taken verbatim from the input log.
using Actor = std::string;

/// Base class for errors surfaced to tool users.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable, malformed, or semantically invalid input data.
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Canonical floating-point rendering: 12 significant digits, locale-free.
/// Every float written to an output file goes through this (or round_sig12)
/// so that reruns are byte-identical.
inline std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

/// Round a value to what format_sig12 would print. Used before handing
/// doubles to the JSON serializer.
inline double round_sig12(double v) {
    return std::strtod(format_sig12(v).c_str(), nullptr);
}

} // namespace entangle
