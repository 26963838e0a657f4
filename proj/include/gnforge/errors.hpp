#pragma once

#include <stdexcept>
#include <string>

namespace gnforge {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GNFORGE_ERROR(Name)                                                    \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(#Name, what) {}            \
  }

GNFORGE_ERROR(InvalidInput);
GNFORGE_ERROR(UnsupportedDerivative);
GNFORGE_ERROR(UnsupportedFamily);
GNFORGE_ERROR(DomainExceeded);
GNFORGE_ERROR(NonIntegrable);
GNFORGE_ERROR(UnsupportedIndex);
GNFORGE_ERROR(IndexViolation);
GNFORGE_ERROR(KernelTooWide);
GNFORGE_ERROR(QuadratureUnderresolved);
GNFORGE_ERROR(ZeroSequence);
GNFORGE_ERROR(MonotonicityViolated);
GNFORGE_ERROR(TailDivergent);
GNFORGE_ERROR(NotBijective);
GNFORGE_ERROR(AdmissibilityViolation);
GNFORGE_ERROR(ConfigError);

#undef GNFORGE_ERROR

}  // namespace gnforge
