#pragma once
// Retrieval and generation metrics: Recall@k, MRR, graph edit distance at
// rank 1, Tanimoto over fingerprints, and the embedding modality gap.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glmr/mces.hpp"
#include "glmr/smiles.hpp"

namespace glmr::eval {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WidthMismatch : EvalError {
  using EvalError::EvalError;
};

struct QueryResult {
  std::string identifier;
  std::vector<std::string> ranking;  // candidate canonical SMILES, best first
  std::string truth;                 // ground-truth canonical SMILES
  // 1-based rank of the truth within `ranking`, absent when not retrieved
  std::optional<int> rank_of_truth;
};

// fills rank_of_truth from ranking/truth
void assign_ranks(std::vector<QueryResult>& results);

double recall_at_k(const std::vector<QueryResult>& results, int k);  // percent
double mrr(const std::vector<QueryResult>& results);                 // percent

struct McesAt1 {
  double mean = 0.0;
  std::size_t scored = 0;
  std::size_t parse_failures = 0;
};
// mean mces_exact distance between each query's top-1 candidate and its truth;
// unparseable pairs are counted and excluded from the mean
McesAt1 mces_at_1(const std::vector<QueryResult>& results,
                  std::uint64_t node_budget = 1000000);

double modality_gap(const std::vector<double>& e_t, const std::vector<double>& e_m);

double tanimoto(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);
double tanimoto(const smiles::Fingerprint& a, const smiles::Fingerprint& b);

struct Histogram {
  double lo = 0.0, hi = 2.0;
  std::vector<std::uint64_t> bins;  // 100 fixed bins over [lo, hi]
  std::vector<double> values;       // raw values, input order
};
Histogram gap_histogram(const std::vector<double>& gaps);

struct EvalReport {
  std::map<int, double> recall_at;  // k in {1,5,20} -> percent
  double mrr = 0.0;                 // percent
  double mces_at_1 = 0.0;           // mean distance over scored pairs
  std::size_t query_count = 0;
  std::size_t mces_scored = 0;
  std::size_t mces_parse_failures = 0;
  std::vector<QueryResult> queries;
};

EvalReport evaluate(std::vector<QueryResult> results, bool with_mces = true,
                    std::uint64_t node_budget = 1000000);

std::string report_to_json(const EvalReport& r);
std::string queries_to_jsonl(const std::vector<QueryResult>& results);
std::string report_to_table(const EvalReport& r);  // aligned plain text

}  // namespace glmr::eval
