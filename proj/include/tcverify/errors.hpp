#pragma once

#include <stdexcept>
#include <string>

namespace tcverify {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or mistyped input file; message names the file, row and column.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Zero-length observed motion segment (obs_prev == obs_now).
class DegenerateSegment : public Error {
public:
    using Error::Error;
};

/// Antipodal cancellation in a spherical mean.
class DegenerateMean : public Error {
public:
    using Error::Error;
};

/// No storms survived ingestion filters.
class EmptyStore : public Error {
public:
    using Error::Error;
};

/// No (basin, lead) cell received a sample.
class EmptyClimatology : public Error {
public:
    using Error::Error;
};

/// Climatology has no cell for a requested (basin, lead).
class MissingCell : public Error {
public:
    using Error::Error;
};

/// MatchResult references a candidate id absent from the forecast set.
class UnknownCandidate : public Error {
public:
    using Error::Error;
};

/// Requested baseline model is not present in the results.
class UnknownBaseline : public Error {
public:
    using Error::Error;
};

/// Verification key set is empty.
class NoKeys : public Error {
public:
    using Error::Error;
};

/// Filesystem failure while reading or writing.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace tcverify
