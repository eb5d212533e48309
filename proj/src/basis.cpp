#include "qe/basis.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qe {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

std::string format_angle(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

std::array<Complex, 2> PolarizationBasis::ket(Outcome which) const {
  const bool first = which == Outcome::first;
  switch (kind_) {
    case Kind::hv:
      return first ? std::array<Complex, 2>{1.0, 0.0}
                   : std::array<Complex, 2>{0.0, 1.0};
    case Kind::diagonal:
      return first ? std::array<Complex, 2>{kInvSqrt2, kInvSqrt2}
                   : std::array<Complex, 2>{kInvSqrt2, -kInvSqrt2};
    case Kind::circular:
      return first ? std::array<Complex, 2>{kInvSqrt2, Complex(0.0, kInvSqrt2)}
                   : std::array<Complex, 2>{kInvSqrt2,
                                            Complex(0.0, -kInvSqrt2)};
    case Kind::linear: {
      const double c = std::cos(angle_);
      const double s = std::sin(angle_);
      return first ? std::array<Complex, 2>{c, s}
                   : std::array<Complex, 2>{-s, c};
    }
  }
  throw contract_error("unknown basis kind");
}

bool PolarizationBasis::equivalent_to(const PolarizationBasis& other,
                                      double tol) const {
  for (Outcome which : {Outcome::first, Outcome::second}) {
    const auto e = ket(which);
    const auto f = other.ket(which);
    const Complex overlap = std::conj(e[0]) * f[0] + std::conj(e[1]) * f[1];
    if (std::abs(std::norm(overlap) - 1.0) > tol) return false;
  }
  return true;
}

std::string PolarizationBasis::label() const {
  switch (kind_) {
    case Kind::hv:
      return "HV";
    case Kind::diagonal:
      return "DIAG";
    case Kind::circular:
      return "CIRC";
    case Kind::linear:
      return "LIN:" + format_angle(angle_);
  }
  throw contract_error("unknown basis kind");
}

PolarizationBasis PolarizationBasis::parse(const std::string& text) {
  if (text == "HV") return hv();
  if (text == "DIAG") return diagonal();
  if (text == "CIRC") return circular();
  if (text.rfind("LIN:", 0) == 0) {
    const std::string body = text.substr(4);
    char* end = nullptr;
    const double angle = std::strtod(body.c_str(), &end);
    if (end == body.c_str() || *end != '\0')
      throw config_error("bad linear-basis angle: '" + text + "'");
    return linear(angle);
  }
  throw config_error("unknown basis label: '" + text + "'");
}

std::string outcome_label(Outcome which) {
  return which == Outcome::first ? "first" : "second";
}

Outcome parse_outcome(const std::string& text) {
  if (text == "first") return Outcome::first;
  if (text == "second") return Outcome::second;
  throw config_error("unknown outcome label: '" + text + "'");
}

}  // namespace qe
