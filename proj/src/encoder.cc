#include "disambig/encoder.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "disambig/errors.h"
#include "disambig/kernels.h"
#include "disambig/text.h"

namespace disambig {

WordVectorTable::WordVectorTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvariantError("word vector dimension must be positive");
}

void WordVectorTable::add(std::string_view token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw InvariantError("vector for '" + std::string(token) + "' has " +
                         std::to_string(vector.size()) + " components, expected " +
                         std::to_string(dim_));
  }
  if (!std::all_of(vector.begin(), vector.end(), [](double v) { return std::isfinite(v); })) {
    throw InvariantError("non-finite component in vector for '" + std::string(token) + "'");
  }
  auto it = index_.find(token);
  if (it == index_.end()) {
    index_.emplace(std::string(token), data_.size() / dim_);
    data_.insert(data_.end(), vector.begin(), vector.end());
  } else {
    std::copy(vector.begin(), vector.end(), data_.begin() + it->second * dim_);
  }
}

std::span<const double> WordVectorTable::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dim_, dim_};
}

std::vector<std::string> WordVectorTable::tokens() const {
  std::vector<std::string> out;
  out.reserve(index_.size());
  for (const auto& [token, _] : index_) out.push_back(token);
  return out;
}

bool WordVectorTable::operator==(const WordVectorTable& other) const {
  if (dim_ != other.dim_ || index_.size() != other.index_.size()) return false;
  for (const auto& [token, _] : index_) {
    auto a = find(token);
    auto b = other.find(token);
    if (b.empty() || !std::equal(a.begin(), a.end(), b.begin())) return false;
  }
  return true;
}

WordVectorTable parse_word_vectors(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<double> values;
    std::string field;
    while (ss >> field) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ParseError(source_name, line_no, "bad number '" + field + "'");
      }
    }
    if (rows.empty() && dim == 0 && values.size() == 1 &&
        token.find_first_not_of("0123456789") == std::string::npos) {
      continue;  // "count dim" header
    }
    if (values.empty()) throw ParseError(source_name, line_no, "token without vector");
    if (dim == 0) dim = values.size();
    if (values.size() != dim) {
      throw ParseError(source_name, line_no,
                       "inconsistent dimension " + std::to_string(values.size()) + ", expected " +
                           std::to_string(dim));
    }
    rows.emplace_back(std::move(token), std::move(values));
  }
  if (rows.empty()) throw ParseError(source_name, 0, "empty word vector table");
  WordVectorTable table(dim);
  for (const auto& [token, values] : rows) {
    try {
      table.add(token, values);
    } catch (const InvariantError& e) {
      throw ParseError(source_name, 0, e.what());
    }
  }
  return table;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_word_vectors(in, path.string());
}

void save_word_vectors(const WordVectorTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& token : table.tokens()) {
    out << token;
    for (double v : table.find(token)) out << ' ' << v;
    out << '\n';
  }
}

bool SentenceVector::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](double v) { return v == 0.0; });
}

SentenceVector embed(std::string_view text, const WordVectorTable& table) {
  if (normalize_whitespace(text).empty()) throw PreconditionError("embed: empty text");
  SentenceVector out;
  out.components.assign(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& token : tokenize(text)) {
    auto vec = table.find(token);
    if (vec.empty()) continue;
    kernels::axpy(1.0, vec, out.components);
    ++hits;
  }
  if (hits == 0) {
    out.out_of_vocabulary = true;
    return out;
  }
  kernels::scale(out.components, 1.0 / static_cast<double>(hits));
  return out;
}

double cosine(const SentenceVector& a, const SentenceVector& b) {
  if (a.components.size() != b.components.size()) {
    throw PreconditionError("cosine: dimension mismatch");
  }
  const double na = kernels::squared_norm(a.components);
  const double nb = kernels::squared_norm(b.components);
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): self-similarity is exactly 1.
  const double c = kernels::dot(a.components, b.components) / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

MeanPoolingEncoder::MeanPoolingEncoder(std::shared_ptr<const WordVectorTable> table)
    : table_(std::move(table)) {
  if (!table_ || table_->empty()) throw InvariantError("encoder needs a non-empty vector table");
}

}  // namespace disambig
