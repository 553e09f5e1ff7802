#pragma once

#include <stdexcept>
#include <string>

namespace joinagg {

/** Base class of every error raised by the engine. */
class Error : public std::runtime_error
{
    public:
    using std::runtime_error::runtime_error;
};

/// Malformed, unsupported or semantically invalid query (parse, resolve, plan).
class QueryError : public Error
{
    public:
    using Error::Error;
};

/// Reading or writing data files failed, or their content is malformed.
class IoError : public Error
{
    public:
    using Error::Error;
};

/// A broken internal invariant. Never expected on valid input.
class InternalError : public Error
{
    public:
    using Error::Error;
};

}
