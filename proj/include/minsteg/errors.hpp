#pragma once

#include <stdexcept>
#include <string>

namespace minsteg {

// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input while reading a template (bad header, bad magic, truncation).
class ParseError : public Error {
    using Error::Error;
};

// A field value outside its legal range (theta >= 360, coordinate beyond 16 bits).
class RangeError : public Error {
    using Error::Error;
};

// Ascending-x storage order violated.
class OrderError : public Error {
    using Error::Error;
};

// Payload does not fit the available capacity, or a length frame is inconsistent.
class CapacityError : public Error {
    using Error::Error;
};

// Embedding could not produce an in-range element value.
class EmbedError : public Error {
    using Error::Error;
};

// A library call was made with arguments violating its preconditions.
class ArgumentError : public Error {
    using Error::Error;
};

// Filesystem-level failure.
class IoError : public Error {
    using Error::Error;
};

}  // namespace minsteg
