#pragma once
// Cohort files, series validation and time-delay embedding.

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdagait {

enum class Group { kCO, kIPD, kVaP };
enum class State { kOff, kOn, kNone };
enum class Variable { kLiftOffAngle, kMaxHC, kMaxTESW, kMinTC, kMaxTLSW, kStrikeAngle };

inline constexpr std::array<Variable, 6> kAllVariables = {
    Variable::kLiftOffAngle, Variable::kMaxHC,   Variable::kMaxTESW,
    Variable::kMinTC,        Variable::kMaxTLSW, Variable::kStrikeAngle};

std::string_view to_string(Group group);
std::string_view to_string(State state);
std::string_view to_string(Variable variable);

// Parsers accept the canonical names above (case-insensitive); they return
// nullopt on unknown input.
std::optional<Group> parse_group(std::string_view text);
std::optional<State> parse_state(std::string_view text);
std::optional<Variable> parse_variable(std::string_view text);

struct GaitSeries {
  std::string subject_id;
  Group group = Group::kCO;
  State state = State::kNone;
  Variable variable = Variable::kMinTC;
  std::vector<double> values;

  bool operator==(const GaitSeries&) const = default;
};

/// Throws ValidationError if `series` breaks a GaitSeries invariant.
void validate_series(const GaitSeries& series);

/// A validated collection of series. Construction enforces the cohort
/// invariants, so every instance is consistent.
class GaitDataset {
 public:
  GaitDataset() = default;
  explicit GaitDataset(std::vector<GaitSeries> series);

  const std::vector<GaitSeries>& series() const { return series_; }
  const std::map<std::string, Group>& subjects() const { return subjects_; }

  /// Subject ids of one group in sorted order.
  std::vector<std::string> subjects_in(Group group) const;
  std::map<Group, std::size_t> group_counts() const;

  const GaitSeries* find(std::string_view subject_id, Variable variable,
                         State state) const;

  bool operator==(const GaitDataset& other) const { return series_ == other.series_; }

 private:
  std::vector<GaitSeries> series_;
  std::map<std::string, Group> subjects_;
};

/// Reads a dataset in wide form (`subject_id,group,state,variable,v1..vL`)
/// or long form (`subject_id,group,state,variable,value`, one row per
/// sample, series assembled in row order).
GaitDataset parse_dataset(std::istream& in);
GaitDataset load_dataset(const std::filesystem::path& path);

/// Writes wide form; `parse_dataset(write_dataset(ds)) == ds`.
void write_dataset(std::ostream& out, const GaitDataset& dataset);
void save_dataset(const std::filesystem::path& path, const GaitDataset& dataset);

struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;  // row-major, size() * dim entries

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(coords).subspan(i * dim, dim);
  }
};

struct EmbeddingParams {
  std::size_t dim = 2;
  std::size_t delay = 1;
};

/// Point i is (x_i, x_{i+delay}, ..., x_{i+(dim-1)delay}). Throws TooShort
/// when fewer than two points would result.
PointCloud takens_embed(std::span<const double> values, EmbeddingParams params = {});
PointCloud takens_embed(const GaitSeries& series, EmbeddingParams params = {});

/// Z-score copy of `values` (population std). Constant input maps to zeros.
std::vector<double> standardize(std::span<const double> values);

}  // namespace tdagait
