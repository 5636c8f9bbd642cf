#pragma once
#include <stdexcept>
#include <string>

namespace aword {

// Failure category drives the CLI exit code: usage 2, data 3, numeric 4.
enum class ErrorCategory { usage, data, numeric };

struct Error : std::runtime_error {
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category(cat) {}
    ErrorCategory category;
};

#define AWORD_ERROR(Name, Cat)                                        \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg)                         \
            : Error(ErrorCategory::Cat, std::string(#Name ": ") + msg) {} \
    }

// features
AWORD_ERROR(InsufficientData, data);
AWORD_ERROR(DimTooLarge, usage);
AWORD_ERROR(DimMismatch, data);
AWORD_ERROR(InsufficientComponents, data);
AWORD_ERROR(ShapeMismatch, data);
AWORD_ERROR(EmptyStats, data);
// codebook
AWORD_ERROR(TooFewSamples, data);
// encoding
AWORD_ERROR(KTooLarge, usage);
AWORD_ERROR(NonFiniteInput, numeric);
AWORD_ERROR(InconsistentDim, data);
AWORD_ERROR(UnknownWordId, data);
// nn
AWORD_ERROR(WindowTooLarge, usage);
AWORD_ERROR(EmptyMask, data);
AWORD_ERROR(InvalidRate, usage);
// models
AWORD_ERROR(BadConfig, usage);
AWORD_ERROR(EmptyDataset, data);
AWORD_ERROR(LabelOutOfRange, data);
AWORD_ERROR(NotStochastic, data);
// cli / io
AWORD_ERROR(UsageError, usage);
AWORD_ERROR(DataError, data);
AWORD_ERROR(NumericError, numeric);
AWORD_ERROR(IoError, data);

#undef AWORD_ERROR

} // namespace aword
