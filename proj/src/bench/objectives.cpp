#include "ballet/bench/objectives.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

namespace ballet::bench {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() &&
         std::isfinite(out);
}

}  // namespace

std::string objective_name(const ObjectiveSpec& spec) {
  switch (spec.kind) {
    case ObjectiveKind::Toy1D: return "toy1d";
    case ObjectiveKind::HdboSum: return "hdbo";
    case ObjectiveKind::Tabular: return "tabular";
  }
  return "?";
}

double toy1d_eval(double x) {
  if (!(std::abs(x) <= 1.0)) {
    throw InputError("toy1d_eval: x must lie in [-1, 1]");
  }
  const double x2 = x * x;
  return std::sin(64.0 * x2 * x2) - (x - 0.2) * (x - 0.2);
}

double hdbo_eval(const gp::Vector& x) {
  if (x.size() != 200) {
    throw InputError("hdbo_eval: expected 200 dimensions, got " +
                     std::to_string(x.size()));
  }
  return x.array().exp().sum();
}

Index default_pool_size(const ObjectiveSpec& spec) {
  switch (spec.kind) {
    case ObjectiveKind::Toy1D: return 1000;
    case ObjectiveKind::HdboSum: return 2000;
    case ObjectiveKind::Tabular: return 0;
  }
  return 0;
}

CandidatePool generate_pool(const ObjectiveSpec& spec, Index pool_size,
                            gp::Rng& rng) {
  if (spec.kind == ObjectiveKind::Tabular) return load_pool_csv(spec.path);
  if (pool_size < 1) throw InputError("generate_pool: pool_size must be >= 1");

  if (spec.kind == ObjectiveKind::Toy1D) {
    gp::Matrix x(pool_size, 1);
    gp::Vector y(pool_size);
    for (Index i = 0; i < pool_size; ++i) {
      x(i, 0) = pool_size == 1 ? 0.0
                               : -1.0 + 2.0 * static_cast<double>(i) /
                                            static_cast<double>(pool_size - 1);
      y[i] = toy1d_eval(x(i, 0));
    }
    return make_pool(std::move(x), std::move(y), "toy1d");
  }

  if (spec.dim != 200) throw InputError("hdbo objective is 200-dimensional");
  std::normal_distribution<double> normal(0.0, 1.0);
  gp::Matrix x(pool_size, spec.dim);
  for (Index i = 0; i < pool_size; ++i) {
    for (Index k = 0; k < spec.dim; ++k) x(i, k) = normal(rng);
  }
  gp::Vector y(pool_size);
  for (Index i = 0; i < pool_size; ++i) y[i] = hdbo_eval(x.row(i).transpose());
  return make_pool(std::move(x), std::move(y), "hdbo");
}

CandidatePool load_pool_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PoolFormatError("cannot open pool file '" + path + "'", 0, 0);

  std::string line;
  std::size_t row = 0;
  std::size_t columns = 0;
  bool have_header = false;
  std::size_t header_row = 0;
  std::vector<double> values;
  std::size_t n_rows = 0;

  while (std::getline(in, line)) {
    ++row;
    std::string_view view = line;
    if (row == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto cells = split(view);
    if (!have_header) {
      have_header = true;
      header_row = row;
      columns = cells.size();
      if (columns < 2) {
        throw PoolFormatError(path + ": need at least one feature column and "
                              "a label column", row, 0);
      }
      continue;
    }
    if (cells.size() != columns) {
      std::ostringstream msg;
      msg << path << ": row " << row << " has " << cells.size()
          << " columns, header has " << columns;
      throw PoolFormatError(msg.str(), row, 0);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        std::ostringstream msg;
        msg << path << ": non-numeric cell '" << cells[c] << "' at row " << row
            << ", column " << c + 1;
        throw PoolFormatError(msg.str(), row, c + 1);
      }
      values.push_back(v);
    }
    ++n_rows;
  }
  if (!have_header) throw PoolFormatError(path + ": empty file", 0, 0);
  if (n_rows == 0) {
    throw PoolFormatError(path + ": header only (row " +
                              std::to_string(header_row) +
                              "), the pool is empty",
                          header_row, 0);
  }

  const Index n = static_cast<Index>(n_rows);
  const Index d = static_cast<Index>(columns - 1);
  gp::Matrix features(n, d);
  gp::Vector labels(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      features(i, k) = values[static_cast<std::size_t>(i) * columns +
                              static_cast<std::size_t>(k)];
    }
    labels[i] = values[static_cast<std::size_t>(i) * columns +
                       static_cast<std::size_t>(d)];
  }
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  return make_pool(std::move(features), std::move(labels), std::move(name));
}

}  // namespace ballet::bench
