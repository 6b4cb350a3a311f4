#ifndef HFIM_ERRORS_HPP
#define HFIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hfim {

enum class errc {
  domain_error,        // argument outside the documented domain
  overflow,            // result not representable in double
  non_convergence,     // series or iteration hit its term/iteration cap
  precision_loss,      // cancellation would leave fewer digits than requested
  dimension_mismatch,
  invalid_argument,
  quadrature_failure,
  backend_disagreement,
  parse_error,
  io_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw Error(code, what);
}

} // namespace hfim

#endif
