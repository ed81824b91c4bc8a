#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fwbt/reduction.hpp"
#include "fwbt/statespace.hpp"

namespace fwbt::io {

class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// {"domain":"ct"|"dt","dt":T,"A":[[..]],"B":..,"C":..,"D":..}, rows as nested arrays.
std::string model_to_json(const StateSpaceModel& model, int indent = -1);
StateSpaceModel model_from_json(const std::string& text);

/// Plant with optional weights. A bare model document is read as a plant
/// without weights; otherwise the keys are "plant", "input_weight" and
/// "output_weight".
struct WeightedModel {
  StateSpaceModel plant;
  std::optional<StateSpaceModel> input_weight;
  std::optional<StateSpaceModel> output_weight;
};

std::string weighted_to_json(const WeightedModel& model, int indent = -1);
WeightedModel weighted_from_json(const std::string& text);

/// Sigma, bound/error tables, iterations, warnings and every reduced model.
/// The balanced realization is stored too; gramians are not.
std::string report_to_json(const ReductionReport& report, int indent = -1);
ReductionReport report_from_json(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fwbt::io
