#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ballet/core/pool.hpp"

namespace ballet {

enum class Family { ICI, RCI, RTS, UCB, TS, EI, CIWidth };

/// Which model(s) an acquisition reads and where it may select.
///   Global:    global GP, whole pool
///   Roi:       ROI GP, ROI only
///   Intersect: intersection of both GPs' intervals, ROI only
enum class Scope { Global, Roi, Intersect };

inline constexpr std::array<Family, 7> kAllFamilies = {
    Family::ICI, Family::RCI, Family::RTS,    Family::UCB,
    Family::TS,  Family::EI,  Family::CIWidth};

struct AcquisitionSpec {
  Family family = Family::ICI;
  Scope scope = Scope::Intersect;
  /// beta^{1/2} for UCB and the interval widths. EI and TS ignore it.
  double beta_sqrt_acq = std::sqrt(2.0);
};

/// Throws InputError for contradictory family/scope pairs: ICI needs
/// Intersect, RCI and RTS need Roi, TS and EI have no Intersect form.
void validate(const AcquisitionSpec& spec);

/// ICI -> (CIWidth, Intersect), RCI -> (CIWidth, Roi), RTS -> (TS, Roi).
AcquisitionSpec canonical(const AcquisitionSpec& spec);

std::string_view to_string(Family f);
std::string_view to_string(Scope s);

/// "ICI", "RCI", "RTS", or "<FAMILY>:<SCOPE>" such as "UCB:ROI".
std::string method_name(const AcquisitionSpec& spec);

/// Inverse of method_name. A bare family name takes its default scope:
/// Intersect for ICI, ROI for RCI/RTS, Global for the rest.
AcquisitionSpec parse_method(std::string_view text);

/// Scopes accepted by each family, for listings.
std::vector<Scope> allowed_scopes(Family f);

/// Closed-form expected improvement over `best`; 0 when std is 0.
double expected_improvement(double mean, double std, double best);

/// argmax over scores; ties go to the lowest pool index.
Index select_next(std::span<const double> scores,
                  std::span<const Index> eligible);

}  // namespace ballet
