#include "glmr/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "glmr/index.hpp"
#include "json.hpp"

namespace glmr::eval {

void assign_ranks(std::vector<QueryResult>& results) {
  for (QueryResult& q : results) {
    q.rank_of_truth.reset();
    for (std::size_t i = 0; i < q.ranking.size(); ++i) {
      if (q.ranking[i] == q.truth) {
        q.rank_of_truth = static_cast<int>(i) + 1;
        break;
      }
    }
  }
}

double recall_at_k(const std::vector<QueryResult>& results, int k) {
  if (results.empty()) return 0.0;
  std::size_t hits = 0;
  for (const QueryResult& q : results)
    if (q.rank_of_truth && *q.rank_of_truth <= k) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

double mrr(const std::vector<QueryResult>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const QueryResult& q : results)
    if (q.rank_of_truth) sum += 1.0 / static_cast<double>(*q.rank_of_truth);
  return 100.0 * sum / static_cast<double>(results.size());
}

McesAt1 mces_at_1(const std::vector<QueryResult>& results, std::uint64_t node_budget) {
  McesAt1 out;
  double sum = 0.0;
  for (const QueryResult& q : results) {
    if (q.ranking.empty()) {
      ++out.parse_failures;
      continue;
    }
    try {
      smiles::MolGraph top = smiles::parse(q.ranking.front());
      smiles::MolGraph truth = smiles::parse(q.truth);
      sum += mces::mces_exact(top, truth, node_budget).distance;
      ++out.scored;
    } catch (const smiles::SmilesError&) {
      ++out.parse_failures;
    }
  }
  if (out.scored > 0) out.mean = sum / static_cast<double>(out.scored);
  return out;
}

double modality_gap(const std::vector<double>& e_t, const std::vector<double>& e_m) {
  return 1.0 - index::cosine(e_t, e_m);
}

double tanimoto(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) throw WidthMismatch("fingerprint widths differ");
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool x = a[i] != 0, y = b[i] != 0;
    both += x && y;
    either += x || y;
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

double tanimoto(const smiles::Fingerprint& a, const smiles::Fingerprint& b) {
  if (a.width != b.width) throw WidthMismatch("fingerprint widths differ");
  std::size_t both = 0, either = 0;
  for (std::size_t w = 0; w < a.bits.size(); ++w) {
    both += static_cast<std::size_t>(__builtin_popcountll(a.bits[w] & b.bits[w]));
    either += static_cast<std::size_t>(__builtin_popcountll(a.bits[w] | b.bits[w]));
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

Histogram gap_histogram(const std::vector<double>& gaps) {
  Histogram h;
  h.bins.assign(100, 0);
  h.values = gaps;
  for (double g : gaps) {
    double t = (g - h.lo) / (h.hi - h.lo) * 100.0;
    int b = static_cast<int>(t);
    if (b < 0) b = 0;
    if (b > 99) b = 99;
    h.bins[b] += 1;
  }
  return h;
}

EvalReport evaluate(std::vector<QueryResult> results, bool with_mces,
                    std::uint64_t node_budget) {
  assign_ranks(results);
  EvalReport r;
  r.query_count = results.size();
  for (int k : {1, 5, 20}) r.recall_at[k] = recall_at_k(results, k);
  r.mrr = mrr(results);
  if (with_mces) {
    McesAt1 m = mces_at_1(results, node_budget);
    r.mces_at_1 = m.mean;
    r.mces_scored = m.scored;
    r.mces_parse_failures = m.parse_failures;
  }
  r.queries = std::move(results);
  return r;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json j;
  for (const auto& [k, v] : r.recall_at) j["recall_at"][std::to_string(k)] = v;
  j["mrr"] = r.mrr;
  j["mces_at_1"] = r.mces_at_1;
  j["query_count"] = r.query_count;
  j["mces_scored"] = r.mces_scored;
  j["mces_parse_failures"] = r.mces_parse_failures;
  return j.dump(2) + "\n";
}

std::string queries_to_jsonl(const std::vector<QueryResult>& results) {
  std::string out;
  for (const QueryResult& q : results) {
    nlohmann::json j;
    j["identifier"] = q.identifier;
    j["ranking"] = q.ranking;
    j["truth"] = q.truth;
    if (q.rank_of_truth)
      j["rank_of_truth"] = *q.rank_of_truth;
    else
      j["rank_of_truth"] = nullptr;
    out += j.dump() + "\n";
  }
  return out;
}

std::string report_to_table(const EvalReport& r) {
  char buf[256];
  std::ostringstream os;
  os << "queries  recall@1  recall@5  recall@20  mrr      mces@1\n";
  std::snprintf(buf, sizeof buf, "%-8zu %-9.2f %-9.2f %-10.2f %-8.2f %.3f\n",
                r.query_count, r.recall_at.count(1) ? r.recall_at.at(1) : 0.0,
                r.recall_at.count(5) ? r.recall_at.at(5) : 0.0,
                r.recall_at.count(20) ? r.recall_at.at(20) : 0.0, r.mrr, r.mces_at_1);
  os << buf;
  return os.str();
}

}  // namespace glmr::eval
