// Command-line front end: ingestion, two-stage training, library building,
// retrieval and evaluation. Exit codes: 0 ok, 2 usage, 3 data, 4 model
// mismatch.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "glmr/align.hpp"
#include "glmr/checkpoint.hpp"
#include "glmr/encoders.hpp"
#include "glmr/eval.hpp"
#include "glmr/genret.hpp"
#include "glmr/index.hpp"
#include "glmr/mces.hpp"
#include "glmr/runconfig.hpp"
#include "glmr/smiles.hpp"
#include "glmr/spectra.hpp"
#include "glmr/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace glmr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitModelMismatch = 4;

struct Model {
  cli::RunConfig rc;
  smiles::Vocabulary vocab = smiles::Vocabulary::standard();
  ModelParams params;
  encoders::MolecularEncoder mol;
  encoders::SpectralEncoder spec;
  genret::FusionParams fusion;
  genret::DecoderParams decoder;
};

// Builds the parameter tree for a config; `with_stage2` adds fusion+decoder.
Model make_model(const cli::RunConfig& rc, bool with_stage2) {
  Model m;
  m.rc = rc;
  m.rc.model.vocab_size = m.vocab.size();
  m.rc.model.validate();
  Rng rng(m.rc.seed);
  m.mol = encoders::make_molecular_encoder(m.params, m.rc.model, rng);
  m.spec = encoders::make_spectral_encoder(m.params, m.rc.model, rng);
  if (with_stage2) {
    m.fusion = genret::make_fusion(m.params, m.rc.model, m.rc.gen.k, rng);
    m.decoder = genret::make_decoder(m.params, m.rc.model, rng);
  }
  return m;
}

spectra::Spectrum renormalized(const spectra::Spectrum& s, std::size_t max_peaks) {
  spectra::Spectrum out = spectra::normalize_intensities(s.peaks, max_peaks);
  out.metadata = s.metadata;
  return out;
}

std::vector<spectra::DatasetRow> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cli::ConfigError("cannot open: " + path);
  spectra::TableResult t = spectra::parse_dataset_table(in);
  for (const spectra::ParseIssue& issue : t.issues)
    std::cerr << path << ":" << issue.line << ": " << issue.message << "\n";
  return t.rows;
}

std::vector<int> target_tokens(const std::string& canonical, const smiles::Vocabulary& v) {
  return smiles::encode_string(canonical, v);
}

void write_manifest(const std::string& out_dir,
                    const std::map<std::string, std::string>& inputs,
                    const cli::RunConfig& rc) {
  cli::atomic_write(out_dir + "/manifest.json", cli::manifest_json(inputs, rc));
}

// ---- ingest ----

int cmd_ingest(const std::string& mgf, const std::string& tsv,
               const std::string& train_smiles, const std::string& out_dir,
               const cli::RunConfig& rc) {
  struct Pending {
    spectra::Spectrum spectrum;  // raw peaks
    std::string smiles_text;
  };
  std::vector<Pending> pending;
  if (!mgf.empty()) {
    std::ifstream in(mgf);
    if (!in) throw cli::ConfigError("cannot open: " + mgf);
    spectra::MgfResult r = spectra::parse_mgf(in);
    for (const spectra::ParseIssue& issue : r.issues)
      std::cerr << mgf << ":" << issue.line << ": " << issue.message << "\n";
    for (spectra::Spectrum& s : r.spectra)
      pending.push_back({std::move(s), std::string()});
  } else {
    for (spectra::DatasetRow& row : read_table(tsv))
      pending.push_back({std::move(row.spectrum), row.smiles});
  }

  std::set<std::string> train_set;
  if (!train_smiles.empty()) {
    std::ifstream in(train_smiles);
    if (!in) throw cli::ConfigError("cannot open: " + train_smiles);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        train_set.insert(smiles::canonical_smiles(line));
      } catch (const smiles::SmilesError& e) {
        std::cerr << "train-smiles: skipping unparseable entry: " << e.what() << "\n";
      }
    }
  }

  std::size_t read = pending.size(), parse_drops = 0, empty_drops = 0, dup_drops = 0;
  std::vector<spectra::DatasetRow> rows;
  std::size_t auto_id = 0;
  for (Pending& p : pending) {
    std::string smi = p.smiles_text.empty() ? p.spectrum.metadata.smiles : p.smiles_text;
    spectra::MoleculeRecord rec;
    try {
      rec = spectra::make_record(smi);
    } catch (const smiles::SmilesError&) {
      ++parse_drops;
      continue;
    }
    spectra::DatasetRow row;
    try {
      row.spectrum = renormalized(p.spectrum, rc.model.max_peaks);
    } catch (const spectra::SpectraError&) {
      ++empty_drops;
      continue;
    }
    if (train_set.count(rec.canonical_smiles)) {
      ++dup_drops;
      continue;
    }
    if (row.spectrum.metadata.identifier.empty())
      row.spectrum.metadata.identifier = "spec" + std::to_string(auto_id);
    ++auto_id;
    row.spectrum.metadata.smiles = rec.canonical_smiles;
    row.smiles = rec.canonical_smiles;
    row.formula = smiles::formula_string(rec.formula);
    row.parent_mass = rec.parent_mass;
    rows.push_back(std::move(row));
  }

  std::cout << "read " << read << " kept " << rows.size() << " dropped_parse "
            << parse_drops << " dropped_empty " << empty_drops << " dropped_duplicate "
            << dup_drops << "\n";
  if (rows.empty()) {
    std::cerr << "no usable records\n";
    return kExitData;
  }
  fs::create_directories(out_dir);
  std::ostringstream table;
  spectra::write_dataset_table(table, rows);
  cli::atomic_write(out_dir + "/dataset.tsv", table.str());
  std::map<std::string, std::string> inputs;
  if (!mgf.empty()) inputs["mgf"] = mgf;
  if (!tsv.empty()) inputs["tsv"] = tsv;
  if (!train_smiles.empty()) inputs["train_smiles"] = train_smiles;
  write_manifest(out_dir, inputs, rc);
  return kExitOk;
}

// ---- train-align ----

int cmd_train_align(const std::string& data, const std::string& out_dir,
                    const cli::RunConfig& rc) {
  Model m = make_model(rc, false);
  std::vector<align::TrainPair> pairs;
  for (const spectra::DatasetRow& row : read_table(data)) {
    align::TrainPair p;
    p.mol_tokens = target_tokens(smiles::canonical_smiles(row.smiles), m.vocab);
    p.spectrum = renormalized(row.spectrum, m.rc.model.max_peaks);
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) {
    std::cerr << "no training pairs\n";
    return kExitData;
  }
  align::AlignResult res =
      align::train_align(pairs, m.rc.contrastive, m.rc.opt, m.params, m.mol, m.spec,
                         m.rc.model);
  fs::create_directories(out_dir);
  checkpoint::save(out_dir + "/checkpoint.bin", m.params, m.rc.seed,
                   cli::config_to_json(m.rc));
  std::ostringstream csv;
  align::write_loss_csv(csv, res.curve);
  cli::atomic_write(out_dir + "/loss.csv", csv.str());
  cli::atomic_write(out_dir + "/config.json", cli::config_to_json(m.rc) + "\n");
  write_manifest(out_dir, {{"data", data}}, m.rc);
  return kExitOk;
}

// ---- build-library ----

int cmd_build_library(const std::string& data, const std::string& ckpt,
                      const std::string& out_dir, const cli::RunConfig& rc) {
  Model m = make_model(rc, false);
  checkpoint::load_into(ckpt, m.params);
  std::vector<spectra::MoleculeRecord> records;
  std::set<std::string> seen;
  for (const spectra::DatasetRow& row : read_table(data)) {
    spectra::MoleculeRecord rec = spectra::make_record(row.smiles);
    if (seen.insert(rec.canonical_smiles).second) records.push_back(std::move(rec));
  }
  if (records.empty()) {
    std::cerr << "no library molecules\n";
    return kExitData;
  }
  index::RetrievalLibrary lib =
      index::build_library(records, m.mol, m.rc.model, m.params, m.vocab);
  fs::create_directories(out_dir);
  index::save_library(out_dir + "/library", lib);
  write_manifest(out_dir, {{"data", data}, {"checkpoint", ckpt}}, m.rc);
  std::cout << "library molecules " << lib.records.size() << "\n";
  return kExitOk;
}

// ---- train-gen ----

int cmd_train_gen(const std::string& data, const std::string& library,
                  const std::string& stage1, const std::string& out_dir,
                  const cli::RunConfig& rc) {
  Model m = make_model(rc, true);
  checkpoint::load_into(stage1, m.params);
  index::RetrievalLibrary lib = index::load_library(library);
  if (lib.gamma_checksum != m.params.checksum(encoders::kMolGroup)) {
    std::cerr << "library was built from a different molecular-encoder state\n";
    return kExitModelMismatch;
  }
  std::vector<genret::GenPair> pairs;
  for (const spectra::DatasetRow& row : read_table(data)) {
    genret::GenPair p;
    p.mol_tokens = target_tokens(smiles::canonical_smiles(row.smiles), m.vocab);
    p.spectrum = renormalized(row.spectrum, m.rc.model.max_peaks);
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) {
    std::cerr << "no training pairs\n";
    return kExitData;
  }
  genret::GenResult res =
      genret::train_gen(pairs, lib, m.rc.gen, m.rc.opt, m.params, m.mol, m.spec,
                        m.fusion, m.decoder, m.rc.model, m.vocab);
  fs::create_directories(out_dir);
  checkpoint::save(out_dir + "/checkpoint.bin", m.params, m.rc.seed,
                   cli::config_to_json(m.rc));
  std::ostringstream csv;
  csv << "step,nll\n";
  for (std::size_t i = 0; i < res.step_nll.size(); ++i)
    csv << i << ',' << res.step_nll[i] << '\n';
  cli::atomic_write(out_dir + "/loss.csv", csv.str());
  cli::atomic_write(out_dir + "/config.json", cli::config_to_json(m.rc) + "\n");
  write_manifest(out_dir, {{"data", data}, {"stage1", stage1}}, m.rc);
  return kExitOk;
}

// ---- retrieve ----

int cmd_retrieve(const std::string& spectra_path, const std::string& library,
                 const std::string& ckpt, const std::string& mode, bool generative,
                 bool pre_retrieval, const std::string& out_dir,
                 const cli::RunConfig& rc) {
  Model m = make_model(rc, true);
  try {
    checkpoint::load_into(ckpt, m.params);
  } catch (const checkpoint::CheckpointError& e) {
    std::cerr << e.what() << "\n";
    return kExitModelMismatch;
  }
  index::RetrievalLibrary lib = index::load_library(library);
  if (lib.gamma_checksum != m.params.checksum(encoders::kMolGroup)) {
    std::cerr << "library/checkpoint molecular-encoder mismatch\n";
    return kExitModelMismatch;
  }

  std::vector<std::vector<int>> lib_tokens;
  if (generative)
    for (const spectra::MoleculeRecord& rec : lib.records)
      lib_tokens.push_back(target_tokens(rec.canonical_smiles, m.vocab));

  Rng rng(m.rc.seed);
  std::vector<genret::RetrievalRecord> out_records;
  std::size_t skipped = 0;
  for (const spectra::DatasetRow& row : read_table(spectra_path)) {
    spectra::Spectrum s;
    try {
      s = renormalized(row.spectrum, m.rc.model.max_peaks);
    } catch (const spectra::SpectraError& e) {
      std::cerr << row.spectrum.metadata.identifier << ": " << e.what() << "\n";
      ++skipped;
      continue;
    }
    encoders::Encoded spec = encoders::encode_spectrum(s, m.spec, m.rc.model);

    std::vector<std::size_t> candidates;
    if (mode == "weight") {
      candidates = index::filter_by_weight(lib, row.parent_mass, m.rc.index.mass_tolerance);
    } else if (mode == "formula") {
      auto it = lib.formula_index.find(row.formula);
      if (it != lib.formula_index.end()) candidates = it->second;
    } else {
      candidates.resize(lib.records.size());
      std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    }
    if (candidates.empty()) {
      std::cerr << row.spectrum.metadata.identifier << ": empty candidate set\n";
      ++skipped;
      continue;
    }

    index::RankedList fusion_candidates;
    if (pre_retrieval) {
      fusion_candidates =
          index::pre_retrieve(spec.embedding->val, lib, candidates, m.rc.index.k);
    } else {
      // ablation arm: fuse against a random top-K instead of pre-retrieval
      std::vector<std::size_t> shuffled = candidates;
      for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.integer(i)]);
      for (std::size_t i = 0; i < shuffled.size() && i < m.rc.index.k; ++i)
        fusion_candidates.push_back({shuffled[i], 0.0});
    }

    genret::RetrievalRecord rec;
    rec.identifier = row.spectrum.metadata.identifier;
    if (!generative) {
      for (const index::RankedEntry& e : fusion_candidates)
        rec.ranking.push_back({lib.records[e.record_id].canonical_smiles, e.score});
    } else {
      std::vector<TensorPtr> cand_hidden;
      for (const index::RankedEntry& e : fusion_candidates)
        cand_hidden.push_back(
            encoders::encode_molecule(lib_tokens[e.record_id], m.mol, m.rc.model).hidden);
      TensorPtr memory = genret::cross_fuse(spec.hidden, cand_hidden, m.fusion);
      std::vector<genret::Beam> beams =
          genret::beam_generate(genret::make_decoder_step(memory, m.decoder),
                                smiles::Vocabulary::kBos, smiles::Vocabulary::kEos,
                                m.rc.beam);
      // with pre-retrieval off, the generated molecule reranks the whole
      // filtered candidate set
      index::RankedList rerank_pool = fusion_candidates;
      if (!pre_retrieval) {
        rerank_pool.clear();
        for (std::size_t id : candidates) rerank_pool.push_back({id, 0.0});
      }
      genret::RerankResult rr =
          genret::rerank(beams, rerank_pool, lib, m.mol, m.rc.model, m.vocab);
      rec.generated_smiles = rr.generated_smiles;
      rec.fallback_used = rr.fallback_used;
      for (const genret::Beam& b : beams)
        rec.beams.push_back({smiles::decode_ids(b.tokens, m.vocab), b.logprob});
      for (const index::RankedEntry& e : rr.ranking)
        rec.ranking.push_back({lib.records[e.record_id].canonical_smiles, e.score});
    }
    out_records.push_back(std::move(rec));
  }

  if (out_records.empty()) {
    std::cerr << "no queries succeeded (" << skipped << " skipped)\n";
    return kExitData;
  }
  fs::create_directories(out_dir);
  cli::atomic_write(out_dir + "/results.jsonl", genret::retrieval_to_jsonl(out_records));
  write_manifest(out_dir, {{"spectra", spectra_path}, {"checkpoint", ckpt}}, m.rc);
  return kExitOk;
}

// ---- eval ----

int cmd_eval(const std::string& results, const std::string& truth,
             const std::string& out_dir, bool with_mces, const cli::RunConfig& rc) {
  std::map<std::string, std::string> truth_by_id;
  for (const spectra::DatasetRow& row : read_table(truth))
    truth_by_id[row.spectrum.metadata.identifier] = smiles::canonical_smiles(row.smiles);

  std::ifstream in(results);
  if (!in) throw cli::ConfigError("cannot open: " + results);
  std::vector<eval::QueryResult> queries;
  std::string line;
  std::size_t lineno = 0, bad = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      eval::QueryResult q;
      q.identifier = j.at("identifier").get<std::string>();
      for (const auto& r : j.at("ranking"))
        q.ranking.push_back(r.at("canonical_smiles").get<std::string>());
      auto it = truth_by_id.find(q.identifier);
      if (it == truth_by_id.end()) {
        std::cerr << results << ":" << lineno << ": no ground truth for '"
                  << q.identifier << "'\n";
        ++bad;
        continue;
      }
      q.truth = it->second;
      queries.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      std::cerr << results << ":" << lineno << ": " << e.what() << "\n";
      ++bad;
    }
  }
  if (queries.empty()) {
    std::cerr << "no evaluable results\n";
    return kExitData;
  }
  eval::EvalReport report = eval::evaluate(std::move(queries), with_mces);
  fs::create_directories(out_dir);
  cli::atomic_write(out_dir + "/report.json", eval::report_to_json(report));
  cli::atomic_write(out_dir + "/queries.jsonl", eval::queries_to_jsonl(report.queries));
  std::cout << eval::report_to_table(report);
  write_manifest(out_dir, {{"results", results}, {"truth", truth}}, rc);
  return kExitOk;
}

// ---- mces ----

int cmd_mces(const std::string& pairs, const std::string& out_dir,
             const cli::RunConfig& rc) {
  std::ifstream in(pairs);
  if (!in) throw cli::ConfigError("cannot open: " + pairs);
  std::ostringstream out;
  out << "distance\tcommon_edges\toptimal\tnodes_expanded\n";
  std::string line;
  std::size_t lineno = 0, ok = 0, failed = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find("smiles_a") != std::string::npos) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      std::cerr << pairs << ":" << lineno << ": expected two tab-separated columns\n";
      ++failed;
      out << "NA\tNA\tNA\tNA\n";
      continue;
    }
    try {
      smiles::MolGraph a = smiles::parse(line.substr(0, tab));
      smiles::MolGraph b = smiles::parse(line.substr(tab + 1));
      mces::MCESResult r = mces::mces_exact(a, b);
      out << r.distance << '\t' << r.common_edge_count << '\t' << (r.optimal ? 1 : 0)
          << '\t' << r.nodes_expanded << '\n';
      ++ok;
    } catch (const smiles::SmilesError& e) {
      std::cerr << pairs << ":" << lineno << ": " << e.what() << "\n";
      ++failed;
      out << "NA\tNA\tNA\tNA\n";
    }
  }
  if (ok == 0) {
    std::cerr << "no pairs scored\n";
    return kExitData;
  }
  fs::create_directories(out_dir);
  cli::atomic_write(out_dir + "/distances.tsv", out.str());
  write_manifest(out_dir, {{"pairs", pairs}}, rc);
  return kExitOk;
}

// ---- synth (fixture generator) ----

int cmd_synth(std::size_t count, std::uint64_t seed, const std::string& out_dir,
              const cli::RunConfig& rc) {
  std::vector<synth::SynthPair> made = synth::make_dataset(count, seed);
  std::vector<spectra::DatasetRow> rows;
  for (std::size_t i = 0; i < made.size(); ++i) {
    spectra::DatasetRow row;
    row.spectrum = made[i].spectrum;
    row.spectrum.metadata.identifier = "synth" + std::to_string(i);
    row.smiles = made[i].record.canonical_smiles;
    row.formula = smiles::formula_string(made[i].record.formula);
    row.parent_mass = made[i].record.parent_mass;
    rows.push_back(std::move(row));
  }
  fs::create_directories(out_dir);
  std::ostringstream table;
  spectra::write_dataset_table(table, rows);
  cli::atomic_write(out_dir + "/dataset.tsv", table.str());
  write_manifest(out_dir, {}, rc);
  std::cout << "molecules " << rows.size() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum-to-molecule retrieval pipeline"};
  app.require_subcommand(1);

  std::string config_path, mgf, tsv, train_smiles, data, library, stage1, ckpt;
  std::string spectra_path, results, truth, pairs, out_dir, mode = "weight";
  std::string generative = "on", pre = "on", mces_flag = "on";
  std::size_t k = 0;
  std::size_t synth_count = 100;
  std::uint64_t synth_seed = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    cmd->add_option("--out", out_dir, "output directory")->required();
  };

  CLI::App* ing = app.add_subcommand("ingest", "parse, canonicalize and dedup records");
  ing->add_option("--mgf", mgf, "MGF input");
  ing->add_option("--tsv", tsv, "dataset table input");
  ing->add_option("--train-smiles", train_smiles, "SMILES list to dedup against");
  add_common(ing);

  CLI::App* ta = app.add_subcommand("train-align", "stage-1 contrastive training");
  ta->add_option("--data", data, "dataset table")->required();
  add_common(ta);

  CLI::App* bl = app.add_subcommand("build-library", "embed a molecule library");
  bl->add_option("--data", data, "dataset table")->required();
  bl->add_option("--checkpoint", ckpt, "stage-1 checkpoint")->required();
  add_common(bl);

  CLI::App* tg = app.add_subcommand("train-gen", "stage-2 generative training");
  tg->add_option("--data", data, "dataset table")->required();
  tg->add_option("--library", library, "library path prefix")->required();
  tg->add_option("--stage1", stage1, "stage-1 checkpoint")->required();
  add_common(tg);

  CLI::App* rt = app.add_subcommand("retrieve", "two-stage retrieval");
  rt->add_option("--spectra", spectra_path, "query dataset table")->required();
  rt->add_option("--library", library, "library path prefix")->required();
  rt->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  rt->add_option("--mode", mode, "candidate filter: weight|formula|none");
  rt->add_option("--k", k, "pre-retrieval depth (default 40)");
  rt->add_option("--generative", generative, "on|off: stage-2 re-ranking");
  rt->add_option("--pre-retrieval", pre, "on|off: stage-1 candidate selection");
  add_common(rt);

  CLI::App* ev = app.add_subcommand("eval", "score retrieval results");
  ev->add_option("--results", results, "results.jsonl")->required();
  ev->add_option("--truth", truth, "dataset table with ground truth")->required();
  ev->add_option("--mces", mces_flag, "on|off: include the graph-distance metric");
  add_common(ev);

  CLI::App* mc = app.add_subcommand("mces", "batch graph distances");
  mc->add_option("--pairs", pairs, "TSV of smiles_a<TAB>smiles_b")->required();
  add_common(mc);

  CLI::App* sy = app.add_subcommand("synth", "write a synthetic dataset table");
  sy->add_option("--count", synth_count, "number of molecules");
  sy->add_option("--seed", synth_seed, "generator seed");
  add_common(sy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    cli::RunConfig rc = cli::reference_defaults();
    if (!config_path.empty()) rc = cli::parse_config_file(config_path, rc);
    if (rt->parsed() && k > 0) {
      rc.index.k = k;
      rc.gen.k = k;
    }
    auto on = [](const std::string& v, const char* flag) {
      if (v == "on") return true;
      if (v == "off") return false;
      throw cli::ConfigError(std::string(flag) + " must be on or off");
    };
    if (ing->parsed()) {
      if (mgf.empty() == tsv.empty())
        throw cli::ConfigError("ingest needs exactly one of --mgf / --tsv");
      return cmd_ingest(mgf, tsv, train_smiles, out_dir, rc);
    }
    if (ta->parsed()) return cmd_train_align(data, out_dir, rc);
    if (bl->parsed()) return cmd_build_library(data, ckpt, out_dir, rc);
    if (tg->parsed()) return cmd_train_gen(data, library, stage1, out_dir, rc);
    if (rt->parsed())
      return cmd_retrieve(spectra_path, library, ckpt, mode,
                          on(generative, "--generative"), on(pre, "--pre-retrieval"),
                          out_dir, rc);
    if (ev->parsed()) return cmd_eval(results, truth, out_dir, on(mces_flag, "--mces"), rc);
    if (mc->parsed()) return cmd_mces(pairs, out_dir, rc);
    if (sy->parsed()) return cmd_synth(synth_count, synth_seed, out_dir, rc);
    return kExitUsage;
  } catch (const cli::UnknownKey& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const checkpoint::CheckpointError& e) {
    std::cerr << e.what() << "\n";
    return kExitModelMismatch;
  } catch (const index::ChecksumMismatch& e) {
    std::cerr << e.what() << "\n";
    return kExitModelMismatch;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
}
