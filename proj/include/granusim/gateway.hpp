#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "granusim/error.hpp"
#include "granusim/linalg.hpp"
#include "granusim/similarity.hpp"

namespace granusim {

struct EmbeddingRecord {
  std::string doc_id;
  std::string model;  // free-form tag, e.g. "rt-cls", "lf-cls", "st-rt"
  DenseVector vector;
};

/// Imported contextual embeddings, one dimension per model tag. Lookups of
/// absent ids throw; there is no zero-vector fallback.
class EmbeddingStore {
 public:
  /// Throws DataError on a dimension mismatch, duplicate (doc_id, model),
  /// empty vector or non-finite entry.
  void add(EmbeddingRecord record);

  const DenseVector& lookup(const std::string& model, const std::string& doc_id) const;
  bool contains(const std::string& model, const std::string& doc_id) const;
  std::vector<std::string> models() const;
  std::size_t dimension(const std::string& model) const;
  std::size_t size(const std::string& model) const;

  /// All records ordered by model tag, then doc id.
  std::vector<EmbeddingRecord> records() const;

  /// Cosine provider over one model's vectors, tagged "contextual:<model>".
  DenseEmbeddingTable table(const std::string& model) const;

 private:
  struct ModelVectors {
    std::size_t dimension = 0;
    std::map<std::string, DenseVector> vectors;
  };
  const ModelVectors& model_vectors(const std::string& model) const;

  std::map<std::string, ModelVectors> models_;
};

// One JSON object per line: {"doc_id": ..., "model": ..., "vector": [...]},
// vector entries written with 17 significant digits.
EmbeddingStore read_embeddings(std::istream& in);
EmbeddingStore import_embeddings(const std::filesystem::path& path);
void write_embedding_records(std::ostream& out, const std::vector<EmbeddingRecord>& records);
void export_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);

/// The service answered, but not in the agreed format.
class ProtocolError : public RemoteError {
 public:
  explicit ProtocolError(const std::string& what) : RemoteError("protocol error: " + what) {}
};

/// The service reported a failure through {"error": ...}.
class ServiceError : public RemoteError {
 public:
  ServiceError(int status, const std::string& message)
      : RemoteError("embedding service error (status " + std::to_string(status) + "): " + message),
        status_(status),
        message_(message) {}
  int status() const { return status_; }
  const std::string& message() const { return message_; }

 private:
  int status_;
  std::string message_;
};

struct GatewayOptions {
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_retries = 3;
  std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
  /// When set, every response must declare this dimension.
  std::optional<std::size_t> expected_dimension;
};

/// Builds the POST /embed request body.
std::string make_embed_request(const std::string& model, const std::vector<std::string>& texts);

/// Strict parser for a 200 response: an object with a string "model" equal
/// to the requested tag, an integer "dimension" >= 1 and "vectors" holding
/// exactly `expected_count` arrays of that many finite numbers.
std::vector<DenseVector> parse_embed_response(const std::string& body, const std::string& model,
                                              std::size_t expected_count);

/// Strict parser for an error response body: {"error": string}.
std::string parse_error_response(const std::string& body);

/// Embeds `texts` through the service at `endpoint` (e.g.
/// "http://127.0.0.1:8080"), in batches, preserving input order. Transport
/// failures are retried with exponential backoff; service and protocol
/// errors are not.
std::vector<DenseVector> request_embeddings(const std::string& endpoint, const std::string& model,
                                            const std::vector<std::string>& texts,
                                            const GatewayOptions& options = {});

}  // namespace granusim
