#include "granusim/gateway.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "granusim/io.hpp"
#include "granusim/log.hpp"

namespace granusim {

using nlohmann::json;

void EmbeddingStore::add(EmbeddingRecord record) {
  if (record.vector.size() == 0) throw DataError("empty vector for document '" + record.doc_id + "'");
  if (!record.vector.allFinite()) throw DataError("non-finite vector for document '" + record.doc_id + "'");
  auto& mv = models_[record.model];
  const auto dim = static_cast<std::size_t>(record.vector.size());
  if (mv.vectors.empty()) {
    mv.dimension = dim;
  } else if (mv.dimension != dim) {
    throw DataError("dimension mismatch for document '" + record.doc_id + "' under model '" + record.model +
                    "' (expected " + std::to_string(mv.dimension) + ", got " + std::to_string(dim) + ")");
  }
  if (!mv.vectors.emplace(record.doc_id, std::move(record.vector)).second) {
    throw DataError("duplicate embedding for document '" + record.doc_id + "' under model '" + record.model + "'");
  }
}

const EmbeddingStore::ModelVectors& EmbeddingStore::model_vectors(const std::string& model) const {
  auto it = models_.find(model);
  if (it == models_.end()) throw DataError("no embeddings for model '" + model + "'");
  return it->second;
}

const DenseVector& EmbeddingStore::lookup(const std::string& model, const std::string& doc_id) const {
  const auto& mv = model_vectors(model);
  auto it = mv.vectors.find(doc_id);
  if (it == mv.vectors.end()) {
    throw DataError("no '" + model + "' embedding for document '" + doc_id + "'");
  }
  return it->second;
}

bool EmbeddingStore::contains(const std::string& model, const std::string& doc_id) const {
  auto it = models_.find(model);
  return it != models_.end() && it->second.vectors.contains(doc_id);
}

std::vector<std::string> EmbeddingStore::models() const {
  std::vector<std::string> out;
  for (const auto& [model, mv] : models_) out.push_back(model);
  return out;
}

std::size_t EmbeddingStore::dimension(const std::string& model) const { return model_vectors(model).dimension; }

std::size_t EmbeddingStore::size(const std::string& model) const { return model_vectors(model).vectors.size(); }

std::vector<EmbeddingRecord> EmbeddingStore::records() const {
  std::vector<EmbeddingRecord> out;
  for (const auto& [model, mv] : models_) {
    for (const auto& [id, vec] : mv.vectors) out.push_back({id, model, vec});
  }
  return out;
}

DenseEmbeddingTable EmbeddingStore::table(const std::string& model) const {
  return DenseEmbeddingTable("contextual:" + model, model_vectors(model).vectors);
}

EmbeddingStore read_embeddings(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "malformed record (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(where + "record is not an object");
    for (const char* key : {"doc_id", "model"}) {
      if (!obj.contains(key) || !obj[key].is_string()) throw DataError(where + "missing string field '" + key + "'");
    }
    if (!obj.contains("vector") || !obj["vector"].is_array()) throw DataError(where + "missing array field 'vector'");
    const auto& arr = obj["vector"];
    EmbeddingRecord rec{obj["doc_id"].get<std::string>(), obj["model"].get<std::string>(),
                        DenseVector(static_cast<Eigen::Index>(arr.size()))};
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) throw DataError(where + "non-numeric vector entry");
      rec.vector[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    try {
      store.add(std::move(rec));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return store;
}

EmbeddingStore import_embeddings(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_embeddings(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_embedding_records(std::ostream& out, const std::vector<EmbeddingRecord>& records) {
  for (const auto& r : records) {
    out << "{\"doc_id\":" << json(r.doc_id).dump() << ",\"model\":" << json(r.model).dump() << ",\"vector\":[";
    for (Eigen::Index i = 0; i < r.vector.size(); ++i) {
      if (i > 0) out << ',';
      out << format_real(r.vector[i]);
    }
    out << "]}\n";
  }
}

void export_embeddings(const std::filesystem::path& path, const EmbeddingStore& store) {
  std::ostringstream out;
  write_embedding_records(out, store.records());
  write_file(path, out.str());
}

std::string make_embed_request(const std::string& model, const std::vector<std::string>& texts) {
  json body = {{"model", model}, {"texts", texts}};
  return body.dump();
}

std::vector<DenseVector> parse_embed_response(const std::string& body, const std::string& model,
                                              std::size_t expected_count) {
  json obj;
  try {
    obj = json::parse(body);
  } catch (const json::parse_error&) {
    throw ProtocolError("response body is not valid JSON");
  }
  if (!obj.is_object()) throw ProtocolError("response is not a JSON object");
  if (!obj.contains("model") || !obj["model"].is_string()) throw ProtocolError("response lacks string 'model'");
  if (obj["model"].get<std::string>() != model) {
    throw ProtocolError("response model '" + obj["model"].get<std::string>() + "' differs from requested '" + model + "'");
  }
  if (!obj.contains("dimension") || !obj["dimension"].is_number_integer() || obj["dimension"].get<long long>() < 1) {
    throw ProtocolError("response lacks a positive integer 'dimension'");
  }
  const auto dim = static_cast<std::size_t>(obj["dimension"].get<long long>());
  if (!obj.contains("vectors") || !obj["vectors"].is_array()) throw ProtocolError("response lacks array 'vectors'");
  const auto& vectors = obj["vectors"];
  if (vectors.size() != expected_count) {
    throw ProtocolError("expected " + std::to_string(expected_count) + " vectors, got " +
                        std::to_string(vectors.size()));
  }
  std::vector<DenseVector> out;
  out.reserve(expected_count);
  for (const auto& v : vectors) {
    if (!v.is_array()) throw ProtocolError("vector entry is not an array");
    if (v.size() != dim) {
      throw ProtocolError("vector of length " + std::to_string(v.size()) + " under declared dimension " +
                          std::to_string(dim));
    }
    DenseVector vec(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      if (!v[i].is_number()) throw ProtocolError("non-numeric vector component");
      const double x = v[i].get<double>();
      if (!std::isfinite(x)) throw ProtocolError("non-finite vector component");
      vec[static_cast<Eigen::Index>(i)] = x;
    }
    out.push_back(std::move(vec));
  }
  return out;
}

std::string parse_error_response(const std::string& body) {
  json obj;
  try {
    obj = json::parse(body);
  } catch (const json::parse_error&) {
    throw ProtocolError("error body is not valid JSON");
  }
  if (!obj.is_object() || !obj.contains("error") || !obj["error"].is_string()) {
    throw ProtocolError("error body lacks string 'error'");
  }
  return obj["error"].get<std::string>();
}

std::vector<DenseVector> request_embeddings(const std::string& endpoint, const std::string& model,
                                            const std::vector<std::string>& texts, const GatewayOptions& options) {
  if (texts.empty()) return {};
  if (options.batch_size < 1) throw UsageError("batch size must be at least 1");
  const std::string address = endpoint.find("://") == std::string::npos ? "http://" + endpoint : endpoint;
  httplib::Client client(address);
  if (!client.is_valid()) throw UsageError("invalid embedding service endpoint '" + endpoint + "'");
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  std::vector<DenseVector> out;
  out.reserve(texts.size());
  std::optional<std::size_t> dimension = options.expected_dimension;
  for (std::size_t start = 0; start < texts.size(); start += options.batch_size) {
    const std::size_t end = std::min(texts.size(), start + options.batch_size);
    const std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                         texts.begin() + static_cast<std::ptrdiff_t>(end));
    const std::string body = make_embed_request(model, batch);

    httplib::Result res;
    auto delay = options.backoff;
    for (std::size_t attempt = 0;; ++attempt) {
      res = client.Post("/embed", body, "application/json");
      if (res) break;
      if (attempt >= options.max_retries) {
        throw RemoteError("transport failure contacting " + address + " (" + httplib::to_string(res.error()) +
                          ") after " + std::to_string(attempt + 1) + " attempts");
      }
      log_warning("embedding request failed (" + httplib::to_string(res.error()) + "); retrying");
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    if (res->status != 200) throw ServiceError(res->status, parse_error_response(res->body));

    auto vectors = parse_embed_response(res->body, model, batch.size());
    const auto dim = static_cast<std::size_t>(vectors.front().size());
    if (dimension && *dimension != dim) {
      throw ProtocolError("response dimension " + std::to_string(dim) + " differs from declared " +
                          std::to_string(*dimension));
    }
    dimension = dim;
    for (auto& v : vectors) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace granusim
