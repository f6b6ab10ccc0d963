#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace disambig {

// token -> dense vector, all of one dimension. Vectors live in one contiguous
// buffer so pooling can run on spans.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim);

  // Replaces an existing entry. Throws InvariantError on dimension mismatch
  // or non-finite components.
  void add(std::string_view token, std::span<const double> vector);
  // nullptr-equivalent empty span when the token is unknown.
  std::span<const double> find(std::string_view token) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }
  // Tokens in lexicographic order.
  std::vector<std::string> tokens() const;

  bool operator==(const WordVectorTable& other) const;

 private:
  std::size_t dim_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<double> data_;
};

// Text layout: "token v1 v2 ... vd" per line. A leading "count dim" header
// line is accepted and skipped.
WordVectorTable load_word_vectors(const std::filesystem::path& path);
WordVectorTable parse_word_vectors(std::istream& in, const std::string& source_name);
void save_word_vectors(const WordVectorTable& table, const std::filesystem::path& path);

struct SentenceVector {
  std::vector<double> components;
  // Set when no token of the input was in vocabulary; components are zero.
  bool out_of_vocabulary = false;

  bool is_zero() const;
};

// Mean of the in-vocabulary token vectors (tokens lowercased, split on
// non-alphanumeric runs). Throws PreconditionError on empty text.
SentenceVector embed(std::string_view text, const WordVectorTable& table);

// Standard cosine clamped to [-1, 1]; 0 if either vector is zero.
double cosine(const SentenceVector& a, const SentenceVector& b);

class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual SentenceVector encode(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;

  double similarity(std::string_view a, std::string_view b) const {
    return cosine(encode(a), encode(b));
  }
};

class MeanPoolingEncoder final : public SentenceEncoder {
 public:
  explicit MeanPoolingEncoder(std::shared_ptr<const WordVectorTable> table);

  SentenceVector encode(std::string_view text) const override { return embed(text, *table_); }
  std::size_t dimension() const override { return table_->dim(); }
  const WordVectorTable& table() const { return *table_; }

 private:
  std::shared_ptr<const WordVectorTable> table_;
};

}  // namespace disambig
