#pragma once

#include <stdexcept>
#include <string>

namespace bbbd {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raster / codec errors.
class LengthMismatch : public Error { public: using Error::Error; };
class ExtentMismatch : public Error { public: using Error::Error; };
class DegeneratePolygon : public Error { public: using Error::Error; };

// Detector errors.
class DuplicateId : public Error { public: using Error::Error; };

// Evaluation errors.
class DimensionMismatch : public Error { public: using Error::Error; };

// Scene file errors. SchemaError and ValidationError messages carry a
// JSON-path prefix ("$.instances[3].mask: ...") locating the offending field.
class ParseError : public Error { public: using Error::Error; };
class SchemaError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };

// COCOA adapter errors.
class UnsupportedEncoding : public Error { public: using Error::Error; };
class MissingField : public Error { public: using Error::Error; };

// Synthetic generator errors.
class InfeasibleConstraints : public Error { public: using Error::Error; };

// CLI errors.
class MissingGroundTruth : public Error { public: using Error::Error; };

} // namespace bbbd
