#include "ballet/core/acquisition.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

#include "ballet/errors.hpp"

namespace ballet {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

void validate(const AcquisitionSpec& spec) {
  if (!(spec.beta_sqrt_acq >= 0.0)) {
    throw InputError("beta_sqrt_acq must be >= 0");
  }
  const auto bad = [&](const char* why) {
    throw InputError("acquisition " + std::string(to_string(spec.family)) +
                     ":" + std::string(to_string(spec.scope)) + ": " + why);
  };
  switch (spec.family) {
    case Family::ICI:
      if (spec.scope != Scope::Intersect) bad("ICI is defined on Intersect");
      break;
    case Family::RCI:
    case Family::RTS:
      if (spec.scope != Scope::Roi) bad("RCI/RTS are defined on ROI");
      break;
    case Family::TS:
    case Family::EI:
      if (spec.scope == Scope::Intersect) bad("no intersection form");
      break;
    case Family::UCB:
    case Family::CIWidth:
      break;
  }
}

AcquisitionSpec canonical(const AcquisitionSpec& spec) {
  AcquisitionSpec out = spec;
  switch (spec.family) {
    case Family::ICI:
      out.family = Family::CIWidth;
      out.scope = Scope::Intersect;
      break;
    case Family::RCI:
      out.family = Family::CIWidth;
      out.scope = Scope::Roi;
      break;
    case Family::RTS:
      out.family = Family::TS;
      out.scope = Scope::Roi;
      break;
    default:
      break;
  }
  return out;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::ICI: return "ICI";
    case Family::RCI: return "RCI";
    case Family::RTS: return "RTS";
    case Family::UCB: return "UCB";
    case Family::TS: return "TS";
    case Family::EI: return "EI";
    case Family::CIWidth: return "CIWidth";
  }
  return "?";
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::Global: return "Global";
    case Scope::Roi: return "ROI";
    case Scope::Intersect: return "Intersect";
  }
  return "?";
}

std::string method_name(const AcquisitionSpec& spec) {
  switch (spec.family) {
    case Family::ICI:
    case Family::RCI:
    case Family::RTS:
      return std::string(to_string(spec.family));
    default:
      return std::string(to_string(spec.family)) + ":" +
             std::string(to_string(spec.scope));
  }
}

AcquisitionSpec parse_method(std::string_view text) {
  const std::string full = upper(text);
  const auto colon = full.find(':');
  const std::string fam = full.substr(0, colon);
  AcquisitionSpec spec;
  if (fam == "ICI") {
    spec.family = Family::ICI;
    spec.scope = Scope::Intersect;
  } else if (fam == "RCI" || fam == "RTS") {
    spec.family = fam == "RCI" ? Family::RCI : Family::RTS;
    spec.scope = Scope::Roi;
  } else if (fam == "UCB" || fam == "TS" || fam == "EI" || fam == "CIWIDTH") {
    spec.family = fam == "UCB"  ? Family::UCB
                  : fam == "TS" ? Family::TS
                  : fam == "EI" ? Family::EI
                                : Family::CIWidth;
    spec.scope = Scope::Global;
  } else {
    throw InputError("unknown acquisition family '" + std::string(text) + "'");
  }
  if (colon != std::string::npos) {
    const std::string sc = full.substr(colon + 1);
    if (sc == "GLOBAL") {
      spec.scope = Scope::Global;
    } else if (sc == "ROI") {
      spec.scope = Scope::Roi;
    } else if (sc == "INTERSECT") {
      spec.scope = Scope::Intersect;
    } else {
      throw InputError("unknown acquisition scope in '" + std::string(text) +
                       "'");
    }
  }
  validate(spec);
  return spec;
}

std::vector<Scope> allowed_scopes(Family f) {
  switch (f) {
    case Family::ICI: return {Scope::Intersect};
    case Family::RCI:
    case Family::RTS: return {Scope::Roi};
    case Family::TS:
    case Family::EI: return {Scope::Global, Scope::Roi};
    case Family::UCB:
    case Family::CIWidth: return {Scope::Global, Scope::Roi, Scope::Intersect};
  }
  return {};
}

double expected_improvement(double mean, double std, double best) {
  if (!(std > 0.0)) return 0.0;
  const double z = (mean - best) / std;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return (mean - best) * cdf + std * pdf;
}

Index select_next(std::span<const double> scores,
                  std::span<const Index> eligible) {
  if (scores.empty() || scores.size() != eligible.size()) {
    throw InputError("select_next: need matching nonempty scores");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] ||
        (scores[i] == scores[best] && eligible[i] < eligible[best])) {
      best = i;
    }
  }
  return eligible[best];
}

}  // namespace ballet
