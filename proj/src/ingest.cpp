#include "tdagait/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "tdagait/error.hpp"

namespace tdagait {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t line_no) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": not a number: '" + std::string(cell) + "'");
  }
  return value;
}

struct RowKey {
  std::string subject_id;
  Group group;
  State state;
  Variable variable;
};

RowKey parse_key(const std::vector<std::string_view>& cells, std::size_t line_no) {
  const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
  if (cells[0].empty()) throw Error(ErrorCode::kParse, where() + "empty subject_id");
  const auto group = parse_group(cells[1]);
  if (!group) throw Error(ErrorCode::kParse, where() + "unknown group '" + std::string(cells[1]) + "'");
  const auto state = parse_state(cells[2]);
  if (!state) throw Error(ErrorCode::kParse, where() + "unknown state '" + std::string(cells[2]) + "'");
  const auto variable = parse_variable(cells[3]);
  if (!variable) {
    throw Error(ErrorCode::kParse, where() + "unknown variable '" + std::string(cells[3]) + "'");
  }
  return {std::string(cells[0]), *group, *state, *variable};
}

constexpr std::array<std::string_view, 4> kKeyColumns = {"subject_id", "group", "state",
                                                         "variable"};

}  // namespace

std::string_view to_string(Group group) {
  switch (group) {
    case Group::kCO: return "CO";
    case Group::kIPD: return "IPD";
    case Group::kVaP: return "VaP";
  }
  return "?";
}

std::string_view to_string(State state) {
  switch (state) {
    case State::kOff: return "Off";
    case State::kOn: return "On";
    case State::kNone: return "None";
  }
  return "?";
}

std::string_view to_string(Variable variable) {
  switch (variable) {
    case Variable::kLiftOffAngle: return "LiftOffAngle";
    case Variable::kMaxHC: return "MaxHC";
    case Variable::kMaxTESW: return "MaxTESW";
    case Variable::kMinTC: return "MinTC";
    case Variable::kMaxTLSW: return "MaxTLSW";
    case Variable::kStrikeAngle: return "StrikeAngle";
  }
  return "?";
}

std::optional<Group> parse_group(std::string_view text) {
  for (Group g : {Group::kCO, Group::kIPD, Group::kVaP}) {
    if (iequals(text, to_string(g))) return g;
  }
  return std::nullopt;
}

std::optional<State> parse_state(std::string_view text) {
  if (text.empty()) return State::kNone;
  for (State s : {State::kOff, State::kOn, State::kNone}) {
    if (iequals(text, to_string(s))) return s;
  }
  return std::nullopt;
}

std::optional<Variable> parse_variable(std::string_view text) {
  for (Variable v : kAllVariables) {
    if (iequals(text, to_string(v))) return v;
  }
  return std::nullopt;
}

void validate_series(const GaitSeries& s) {
  const std::string who = s.subject_id + "/" + std::string(to_string(s.variable)) + "/" +
                          std::string(to_string(s.state));
  if (s.values.size() < 4) {
    throw Error(ErrorCode::kValidation,
                who + ": series has " + std::to_string(s.values.size()) + " samples, need >= 4");
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kValidation, who + ": non-finite sample");
  }
  if ((s.group == Group::kCO) != (s.state == State::kNone)) {
    throw Error(ErrorCode::kValidation,
                who + ": state None is required for CO and forbidden for patients");
  }
}

GaitDataset::GaitDataset(std::vector<GaitSeries> series) : series_(std::move(series)) {
  std::set<std::tuple<std::string, Variable, State>> seen;
  for (const GaitSeries& s : series_) {
    validate_series(s);
    if (!seen.emplace(s.subject_id, s.variable, s.state).second) {
      throw Error(ErrorCode::kValidation, "duplicate series for " + s.subject_id + "/" +
                                              std::string(to_string(s.variable)) + "/" +
                                              std::string(to_string(s.state)));
    }
    const auto [it, inserted] = subjects_.emplace(s.subject_id, s.group);
    if (!inserted && it->second != s.group) {
      throw Error(ErrorCode::kValidation, "subject " + s.subject_id + " listed as both " +
                                              std::string(to_string(it->second)) + " and " +
                                              std::string(to_string(s.group)));
    }
  }
}

std::vector<std::string> GaitDataset::subjects_in(Group group) const {
  std::vector<std::string> out;
  for (const auto& [id, g] : subjects_) {
    if (g == group) out.push_back(id);
  }
  return out;
}

std::map<Group, std::size_t> GaitDataset::group_counts() const {
  std::map<Group, std::size_t> counts;
  for (const auto& [id, g] : subjects_) ++counts[g];
  return counts;
}

const GaitSeries* GaitDataset::find(std::string_view subject_id, Variable variable,
                                    State state) const {
  for (const GaitSeries& s : series_) {
    if (s.subject_id == subject_id && s.variable == variable && s.state == state) return &s;
  }
  return nullptr;
}

GaitDataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw Error(ErrorCode::kParse, "empty dataset file");
  header = split_row(header_line);
  while (!header.empty() && header.back().empty()) header.pop_back();
  if (header.size() < 5) throw Error(ErrorCode::kParse, "header needs at least 5 columns");
  for (std::size_t i = 0; i < kKeyColumns.size(); ++i) {
    if (!iequals(header[i], kKeyColumns[i])) {
      throw Error(ErrorCode::kParse, "header column " + std::to_string(i + 1) + " must be '" +
                                         std::string(kKeyColumns[i]) + "'");
    }
  }
  const bool long_form = header.size() == 5 && iequals(header[4], "value");

  std::vector<GaitSeries> series;
  // Long form: (subject, variable, state) -> index into `series`.
  std::map<std::tuple<std::string, Variable, State>, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    while (!cells.empty() && cells.back().empty()) cells.pop_back();
    if (cells.size() < 5) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": too few cells");
    }
    RowKey key = parse_key(cells, line_no);
    if (long_form) {
      if (cells.size() != 5) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 5 cells");
      }
      const double v = parse_number(cells[4], line_no);
      const auto k = std::make_tuple(key.subject_id, key.variable, key.state);
      auto it = index.find(k);
      if (it == index.end()) {
        it = index.emplace(k, series.size()).first;
        series.push_back({key.subject_id, key.group, key.state, key.variable, {}});
      } else if (series[it->second].group != key.group) {
        throw Error(ErrorCode::kValidation,
                    "subject " + key.subject_id + " has inconsistent groups");
      }
      series[it->second].values.push_back(v);
    } else {
      GaitSeries s{key.subject_id, key.group, key.state, key.variable, {}};
      for (std::size_t c = 4; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          throw Error(ErrorCode::kParse,
                      "line " + std::to_string(line_no) + ": gap inside series values");
        }
        s.values.push_back(parse_number(cells[c], line_no));
      }
      series.push_back(std::move(s));
    }
  }
  if (series.empty()) throw Error(ErrorCode::kParse, "dataset has a header but no rows");
  return GaitDataset(std::move(series));
}

GaitDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const GaitDataset& dataset) {
  std::size_t max_len = 0;
  for (const auto& s : dataset.series()) max_len = std::max(max_len, s.values.size());
  out << "subject_id,group,state,variable";
  for (std::size_t i = 1; i <= max_len; ++i) out << ",v" << i;
  out << '\n';
  char buf[64];
  for (const auto& s : dataset.series()) {
    out << s.subject_id << ',' << to_string(s.group) << ',' << to_string(s.state) << ','
        << to_string(s.variable);
    for (double v : s.values) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    for (std::size_t i = s.values.size(); i < max_len; ++i) out << ',';
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const GaitDataset& dataset) {
  std::ostringstream buffer;
  write_dataset(buffer, dataset);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << buffer.str();
}

PointCloud takens_embed(std::span<const double> values, EmbeddingParams params) {
  if (params.dim == 0 || params.delay == 0) {
    throw Error(ErrorCode::kConfig, "embedding dimension and delay must be positive");
  }
  const std::size_t span = (params.dim - 1) * params.delay;
  if (values.size() < span + 2) {
    throw Error(ErrorCode::kTooShort,
                "series of length " + std::to_string(values.size()) +
                    " yields fewer than 2 points for dim=" + std::to_string(params.dim) +
                    ", delay=" + std::to_string(params.delay));
  }
  const std::size_t count = values.size() - span;
  PointCloud cloud;
  cloud.dim = params.dim;
  cloud.coords.reserve(count * params.dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < params.dim; ++k) {
      cloud.coords.push_back(values[i + k * params.delay]);
    }
  }
  return cloud;
}

PointCloud takens_embed(const GaitSeries& series, EmbeddingParams params) {
  return takens_embed(series.values, params);
}

std::vector<double> standardize(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (values.empty()) return out;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(values.size()));
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

}  // namespace tdagait
