#include "rkhsdiag/symbol.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "rkhsdiag/errors.hpp"

namespace rkhsdiag {

namespace {

double parse_number(std::string_view s, std::string_view whole) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
    throw Error(Errc::invalid_symbol, "cannot parse number '" + std::string(s) + "' in symbol '" +
                                          std::string(whole) + "'");
  return v;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

SymbolSpec SymbolSpec::constant(double c) {
  if (!std::isfinite(c)) throw Error(Errc::invalid_symbol, "constant symbol must be finite");
  SymbolSpec s;
  s.family_ = SymbolFamily::constant;
  s.params_ = {c};
  return s;
}

SymbolSpec SymbolSpec::indicator(double a, double b) {
  if (std::isnan(a) || std::isnan(b) || !(a < b))
    throw Error(Errc::invalid_symbol, "indicator requires a < b");
  SymbolSpec s;
  s.family_ = SymbolFamily::indicator;
  s.params_ = {a, b};
  return s;
}

SymbolSpec SymbolSpec::expdecay(double alpha) {
  if (!std::isfinite(alpha)) throw Error(Errc::invalid_symbol, "expdecay rate must be finite");
  SymbolSpec s;
  s.family_ = SymbolFamily::expdecay;
  s.params_ = {alpha};
  return s;
}

SymbolSpec SymbolSpec::power(double p) {
  if (!std::isfinite(p)) throw Error(Errc::invalid_symbol, "power exponent must be finite");
  SymbolSpec s;
  s.family_ = SymbolFamily::power;
  s.params_ = {p};
  return s;
}

SymbolSpec SymbolSpec::callback(std::function<cplx(const Point&)> fn, std::string label,
                                bool real_valued) {
  if (!fn) throw Error(Errc::invalid_symbol, "empty callback");
  SymbolSpec s;
  s.family_ = SymbolFamily::callback;
  s.fn_ = std::move(fn);
  s.label_ = std::move(label);
  s.real_ = real_valued;
  return s;
}

cplx SymbolSpec::operator()(const Point& v) const {
  const double t = v[0];
  switch (family_) {
    case SymbolFamily::constant: return params_[0];
    case SymbolFamily::indicator: return (t > params_[0] && t < params_[1]) ? 1.0 : 0.0;
    case SymbolFamily::expdecay: return std::exp(-params_[0] * t);
    case SymbolFamily::power: return params_[0] == 0.0 ? 1.0 : std::pow(t, params_[0]);
    case SymbolFamily::callback: return fn_(v);
  }
  return 0.0;
}

std::vector<double> SymbolSpec::breakpoints() const {
  std::vector<double> out;
  if (family_ == SymbolFamily::indicator)
    for (double e : params_)
      if (std::isfinite(e)) out.push_back(e);
  return out;
}

std::string SymbolSpec::to_string() const {
  switch (family_) {
    case SymbolFamily::constant: return "const:" + fmt(params_[0]);
    case SymbolFamily::indicator: return "indicator:" + fmt(params_[0]) + "," + fmt(params_[1]);
    case SymbolFamily::expdecay: return "expdecay:" + fmt(params_[0]);
    case SymbolFamily::power: return "power:" + fmt(params_[0]);
    case SymbolFamily::callback: return label_;
  }
  return {};
}

void SymbolSpec::check_bounded(double lower, double upper) const {
  const bool lower_finite = std::isfinite(lower);
  const bool upper_finite = std::isfinite(upper);
  bool ok = true;
  switch (family_) {
    case SymbolFamily::constant:
    case SymbolFamily::indicator:
    case SymbolFamily::callback: break;
    case SymbolFamily::expdecay: {
      const double a = params_[0];
      ok = (a == 0.0) || (a > 0.0 && lower_finite) || (a < 0.0 && upper_finite);
      break;
    }
    case SymbolFamily::power: {
      const double p = params_[0];
      // v^p must be bounded and real on [lower, upper].
      const bool finite_box = lower_finite && upper_finite;
      ok = (p == 0.0) || (p > 0.0 && finite_box && (lower >= 0.0 || p == std::round(p))) ||
           (p < 0.0 && finite_box && lower > 0.0);
      break;
    }
  }
  if (!ok)
    throw Error(Errc::invalid_symbol, "symbol " + to_string() + " is unbounded on the domain (" +
                                          fmt(lower) + ", " + fmt(upper) + ")");
}

SymbolSpec parse_symbol(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(Errc::invalid_symbol, "symbol '" + std::string(text) + "' lacks ':'");
  const std::string_view family = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  if (family == "indicator") {
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos || rest.find(',', comma + 1) != std::string_view::npos)
      throw Error(Errc::invalid_symbol, "indicator expects two bounds: '" + std::string(text) + "'");
    return SymbolSpec::indicator(parse_number(rest.substr(0, comma), text),
                                 parse_number(rest.substr(comma + 1), text));
  }
  if (rest.find(',') != std::string_view::npos)
    throw Error(Errc::invalid_symbol, "too many parameters in '" + std::string(text) + "'");
  const double x = parse_number(rest, text);
  if (family == "const") return SymbolSpec::constant(x);
  if (family == "expdecay") return SymbolSpec::expdecay(x);
  if (family == "power") return SymbolSpec::power(x);
  throw Error(Errc::invalid_symbol, "unknown symbol family '" + std::string(family) + "'");
}

}  // namespace rkhsdiag
