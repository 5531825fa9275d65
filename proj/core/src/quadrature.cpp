#include "subwalk/quadrature.hpp"

#include <sstream>

#include "subwalk/error.hpp"

namespace subwalk {

std::string describe_panel(const Panel& p) {
  std::ostringstream os;
  os.precision(6);
  os << "[" << p.a << ", " << p.b << "] value=" << p.value << " err=" << p.error;
  return os.str();
}

void throw_quadrature_failure(const char* what, const QuadratureResult& r) {
  std::ostringstream os;
  os.precision(6);
  os << what << ": quadrature did not converge after " << r.panels
     << " panels (estimate " << r.value << " +/- " << r.error
     << "); worst panel " << describe_panel(r.worst);
  fail(ErrorKind::numeric, os.str());
}

}  // namespace subwalk
