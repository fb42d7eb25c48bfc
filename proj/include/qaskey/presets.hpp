#ifndef QASKEY_PRESETS_HPP
#define QASKEY_PRESETS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qaskey/lattice.hpp"

namespace qaskey {

struct PresetArgument {
  std::string name;
  std::string constraint;
  /// Present for optional trailing arguments.
  std::optional<std::string> default_value;
};

struct PresetDescriptor {
  std::string name;
  std::vector<PresetArgument> args;
  /// Expression for the last node index of a finite family, empty otherwise.
  std::string finite_n;
  std::string citation;

  [[nodiscard]] std::size_t required_args() const;
};

const std::vector<PresetDescriptor>& list_presets();

/// Throws UnknownPreset.
const PresetDescriptor& find_preset(std::string_view name);

template <RealScalar Real>
struct PresetFamily {
  FamilyParameters<Real> params;
  std::optional<std::size_t> finite_n;
};

/// Throws UnknownPreset, InvalidArgument on a wrong argument count and
/// ConstraintViolation when an argument is outside its admissible range.
template <RealScalar Real>
PresetFamily<Real> instantiate(std::string_view name, const std::vector<Real>& args,
                               const QContext<Real>& ctx);

}  // namespace qaskey

#endif  // QASKEY_PRESETS_HPP
