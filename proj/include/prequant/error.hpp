#ifndef PREQUANT_ERROR_HPP
#define PREQUANT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace prequant
{

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (character vs. homology, sector vs. character, ...).
class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

/// Input violates a structural invariant (bad endpoint, bad generator, ...).
class ValidationError : public Error
{
public:
    using Error::Error;
};

class ConnectivityError : public Error
{
public:
    using Error::Error;
};

class NotALoopError : public Error
{
public:
    using Error::Error;
};

class CompositionError : public Error
{
public:
    using Error::Error;
};

/// A path step left the chart it was supposed to be evaluated in.
class ChartEscapeError : public Error
{
public:
    using Error::Error;
};

/// Some edge of a path is contained in no chart.
class AtlasCoverageError : public Error
{
public:
    using Error::Error;
};

class AtlasConsistencyError : public Error
{
public:
    using Error::Error;
};

/// A connection that should be flat has a face with nonzero signed sum.
class CurvatureError : public Error
{
public:
    using Error::Error;
};

/// An exact computation would exceed its resource guard.
class SizeError : public Error
{
public:
    using Error::Error;
};

/// The space has the wrong topology for the requested operation.
class TopologyError : public Error
{
public:
    using Error::Error;
};

} // namespace prequant

#endif
