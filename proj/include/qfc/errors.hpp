#pragma once

#include <stdexcept>
#include <string>

namespace qfc {

/// Base of every error raised by the library. The CLI maps the category to an
/// exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { Computation, Config, Io };

  explicit Error(const std::string& what, Category category = Category::Computation)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define QFC_DEFINE_ERROR(Name, Cat)                                           \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(what, Category::Cat) {}    \
  }

QFC_DEFINE_ERROR(RangeError, Computation);
QFC_DEFINE_ERROR(InvalidArgument, Computation);
QFC_DEFINE_ERROR(DegenerateError, Computation);
QFC_DEFINE_ERROR(ResolutionError, Computation);
QFC_DEFINE_ERROR(TruncationError, Computation);
QFC_DEFINE_ERROR(NumericalStabilityError, Computation);
QFC_DEFINE_ERROR(UnphysicalError, Computation);
QFC_DEFINE_ERROR(ArchitectureViolation, Computation);
QFC_DEFINE_ERROR(NoConversionPeakError, Computation);
QFC_DEFINE_ERROR(NotFoundError, Computation);
QFC_DEFINE_ERROR(InfeasibleError, Computation);
QFC_DEFINE_ERROR(ConfigError, Config);
QFC_DEFINE_ERROR(FormatError, Io);
QFC_DEFINE_ERROR(IoError, Io);

#undef QFC_DEFINE_ERROR

}  // namespace qfc
