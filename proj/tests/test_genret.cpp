#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "glmr/genret.hpp"

using namespace glmr;
using namespace glmr::genret;

namespace {

encoders::ModelConfig tiny_config() {
  encoders::ModelConfig c;
  c.d = 16;
  c.mol_layers = 1;
  c.spec_layers = 1;
  c.dec_layers = 1;
  c.heads = 2;
  c.max_mol_tokens = 32;
  c.max_peaks = 8;
  c.vocab_size = 12;
  return c;
}

}  // namespace

TEST_CASE("cross_fuse shapes and validation") {
  encoders::ModelConfig cfg = tiny_config();
  ModelParams params;
  Rng rng(3);
  FusionParams fusion = make_fusion(params, cfg, 4, rng);

  auto spec = make_tensor(5, cfg.d);
  init_normal(*spec, rng, 0.5);
  std::vector<TensorPtr> cands;
  for (int i = 0; i < 3; ++i) {
    auto c = make_tensor(4 + i, cfg.d);
    init_normal(*c, rng, 0.5);
    cands.push_back(c);
  }
  TensorPtr fused = cross_fuse(spec, cands, fusion);
  CHECK(fused->rows == 5);  // one output row per spectrum row
  CHECK(fused->cols == cfg.d);
  for (double v : fused->val) CHECK(std::isfinite(v));

  // candidate width mismatch
  std::vector<TensorPtr> bad = {make_tensor(2, cfg.d + 1)};
  CHECK_THROWS_AS(cross_fuse(spec, bad, fusion), WidthMismatch);
  // more candidates than learned rank embeddings
  std::vector<TensorPtr> too_many(5, cands[0]);
  CHECK_THROWS_AS(cross_fuse(spec, too_many, fusion), GenretError);
  // empty candidate list
  CHECK_THROWS_AS(cross_fuse(spec, {}, fusion), GenretError);
}

TEST_CASE("candidate rank changes the fused output") {
  encoders::ModelConfig cfg = tiny_config();
  ModelParams params;
  Rng rng(3);
  FusionParams fusion = make_fusion(params, cfg, 4, rng);
  auto spec = make_tensor(2, cfg.d);
  init_normal(*spec, rng, 0.5);
  auto a = make_tensor(3, cfg.d);
  auto b = make_tensor(3, cfg.d);
  init_normal(*a, rng, 0.5);
  init_normal(*b, rng, 0.5);

  TensorPtr ab = cross_fuse(spec, {a, b}, fusion);
  TensorPtr ba = cross_fuse(spec, {b, a}, fusion);
  double diff = 0;
  for (std::size_t i = 0; i < ab->val.size(); ++i)
    diff = std::max(diff, std::abs(ab->val[i] - ba->val[i]));
  CHECK(diff > 1e-8);  // rank embeddings make order matter
}

TEST_CASE("teacher-forced NLL equals ln V for uniform logits") {
  encoders::ModelConfig cfg = tiny_config();
  ModelParams params;
  Rng rng(5);
  DecoderParams dec = make_decoder(params, cfg, rng);
  // zero every decoder parameter: logits become identically zero -> uniform
  for (auto& group : params.groups)
    for (auto& p : group.params)
      std::fill(p.value->val.begin(), p.value->val.end(), 0.0);
  // keep layer-norm gains at one so the forward pass stays well-defined
  for (auto& group : params.groups)
    for (auto& p : group.params)
      if (p.name.find("gain") != std::string::npos)
        std::fill(p.value->val.begin(), p.value->val.end(), 1.0);

  auto memory = make_tensor(3, cfg.d);
  std::vector<int> target = {smiles::Vocabulary::kBos, 5, 7, smiles::Vocabulary::kEos};
  TensorPtr nll = teacher_forced_nll(memory, target, dec, 32);
  CHECK(nll->val[0] ==
        doctest::Approx(std::log(static_cast<double>(cfg.vocab_size))).epsilon(1e-9));

  CHECK_THROWS_AS(
      teacher_forced_nll(memory, std::vector<int>(40, 5), dec, 32), SequenceTooLong);
}

TEST_CASE("beam search width 1 equals greedy decoding") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    int vocab = 4 + static_cast<int>(rng.integer(5));
    std::uint64_t table_seed = rng.raw();
    // deterministic random step function keyed on the prefix
    StepFn step = [vocab, table_seed](const std::vector<int>& prefix) {
      std::uint64_t h = table_seed;
      for (int t : prefix) h = h * 1099511628211ULL + static_cast<std::uint64_t>(t) + 1;
      Rng local(h);
      std::vector<double> logits(static_cast<std::size_t>(vocab));
      for (double& x : logits) x = local.uniform(-3.0, 0.0);
      double m = *std::max_element(logits.begin(), logits.end());
      double z = 0;
      for (double x : logits) z += std::exp(x - m);
      for (double& x : logits) x = x - m - std::log(z);
      return logits;
    };
    BeamConfig one{1, 8};
    std::vector<Beam> beams = beam_generate(step, 1, 2, one);
    REQUIRE(beams.size() == 1);

    // greedy reference
    std::vector<int> greedy = {1};
    double greedy_lp = 0;
    while (greedy.back() != 2 && greedy.size() < 8) {
      std::vector<double> lp = step(greedy);
      std::size_t best = 0;
      for (std::size_t i = 1; i < lp.size(); ++i)
        if (lp[i] > lp[best]) best = i;
      greedy_lp += lp[best];
      greedy.push_back(static_cast<int>(best));
    }
    CHECK(beams[0].tokens == greedy);
    CHECK(beams[0].logprob == doctest::Approx(greedy_lp).epsilon(1e-12));
  }
}

TEST_CASE("two-step stub matches exhaustive enumeration") {
  // vocabulary {0..3}, EOS = 2, fixed log-probability tables
  std::map<std::vector<int>, std::vector<double>> table = {
      {{1}, {-2.0, -0.3, -3.0, -1.9}},
      {{1, 0}, {-0.5, -1.5, -2.5, -3.5}},
      {{1, 1}, {-1.2, -0.8, -1.6, -2.4}},
      {{1, 3}, {-0.9, -1.1, -0.7, -2.2}},
  };
  StepFn step = [&table](const std::vector<int>& prefix) { return table.at(prefix); };
  BeamConfig cfg{3, 3};  // at most BOS + 2 generated tokens
  std::vector<Beam> beams = beam_generate(step, 1, 2, cfg);
  REQUIRE(beams.size() == 3);

  // exhaustive: all sequences of length <= 2 that end by EOS or truncation
  std::vector<Beam> all;
  for (int t1 = 0; t1 < 4; ++t1) {
    double lp1 = table[{1}][static_cast<std::size_t>(t1)];
    if (t1 == 2) {
      all.push_back({{1, 2}, lp1});
      continue;
    }
    for (int t2 = 0; t2 < 4; ++t2)
      all.push_back({{1, t1, t2}, lp1 + table[{1, t1}][static_cast<std::size_t>(t2)]});
  }
  std::sort(all.begin(), all.end(), [](const Beam& a, const Beam& b) {
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    return a.tokens < b.tokens;
  });
  // width-3 beam search is exact here: the step-1 pool keeps 3 of 4 prefixes,
  // and the dropped prefix (logprob -3.0) cannot beat the kept ones
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(beams[i].tokens == all[i].tokens);
    CHECK(beams[i].logprob == doctest::Approx(all[i].logprob).epsilon(1e-12));
  }
  // beams are sorted by logprob descending
  for (std::size_t i = 1; i < beams.size(); ++i)
    CHECK(beams[i].logprob <= beams[i - 1].logprob);
}

TEST_CASE("rerank orders candidates by similarity to the generated molecule") {
  encoders::ModelConfig cfg = tiny_config();
  smiles::Vocabulary vocab = smiles::Vocabulary::standard();
  cfg.vocab_size = vocab.id_to_token.size();
  ModelParams params;
  Rng rng(23);
  auto mol_enc = encoders::make_molecular_encoder(params, cfg, rng);

  std::vector<spectra::MoleculeRecord> recs = {
      spectra::make_record("CCO"), spectra::make_record("CCC"),
      spectra::make_record("CCN")};
  index::RetrievalLibrary lib = index::build_library(recs, mol_enc, cfg, params, vocab);

  index::RankedList pre = {{1, 0.9}, {0, 0.8}, {2, 0.7}};

  // a beam that parses to the first library molecule must rank it first
  Beam exact;
  for (int id : smiles::encode_string("CCO", vocab)) exact.tokens.push_back(id);
  exact.tokens.insert(exact.tokens.begin(), smiles::Vocabulary::kBos);
  exact.tokens.push_back(smiles::Vocabulary::kEos);
  RerankResult r = rerank({exact}, pre, lib, mol_enc, cfg, vocab);
  CHECK(!r.fallback_used);
  CHECK(r.generated_smiles == recs[0].canonical_smiles);
  REQUIRE(r.ranking.size() == 3);
  CHECK(r.ranking[0].record_id == 0);  // identical molecule: cosine 1
  CHECK(r.ranking[0].score == doctest::Approx(1.0).epsilon(1e-9));
  // same id set, permuted
  std::vector<std::size_t> ids;
  for (const auto& e : r.ranking) ids.push_back(e.record_id);
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<std::size_t>{0, 1, 2});

  // unparseable beams fall back to the input order
  Beam junk;
  junk.tokens = {smiles::Vocabulary::kBos, smiles::Vocabulary::kEos};
  RerankResult fb = rerank({junk}, pre, lib, mol_enc, cfg, vocab);
  CHECK(fb.fallback_used);
  REQUIRE(fb.ranking.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(fb.ranking[i].record_id == pre[i].record_id);
    CHECK(fb.ranking[i].score == doctest::Approx(pre[i].score));
  }

  // the first parseable beam wins, not the highest-scoring junk beam
  RerankResult mix = rerank({junk, exact}, pre, lib, mol_enc, cfg, vocab);
  CHECK(!mix.fallback_used);
  CHECK(mix.generated_smiles == recs[0].canonical_smiles);
}

TEST_CASE("stage-2 training updates only fusion and decoder groups") {
  encoders::ModelConfig cfg = tiny_config();
  smiles::Vocabulary vocab = smiles::Vocabulary::standard();
  cfg.vocab_size = vocab.id_to_token.size();
  ModelParams params;
  Rng rng(31);
  auto mol_enc = encoders::make_molecular_encoder(params, cfg, rng);
  auto spec_enc = encoders::make_spectral_encoder(params, cfg, rng);
  FusionParams fusion = make_fusion(params, cfg, 4, rng);
  DecoderParams decoder = make_decoder(params, cfg, rng);

  std::vector<std::string> train_smiles = {"CCO", "CCC", "CCN", "CO"};
  std::vector<spectra::MoleculeRecord> recs;
  std::vector<GenPair> data;
  for (const auto& s : train_smiles) {
    auto rec = spectra::make_record(s);
    recs.push_back(rec);
    GenPair p;
    p.mol_tokens = smiles::encode_string(rec.canonical_smiles, vocab);
    p.spectrum = spectra::synth_fragment_spectrum(rec, cfg.max_peaks);
    data.push_back(p);
  }
  index::RetrievalLibrary lib = index::build_library(recs, mol_enc, cfg, params, vocab);

  std::uint64_t gamma = params.checksum(encoders::kMolGroup);
  std::uint64_t eta = params.checksum(encoders::kSpecGroup);
  std::uint64_t fusion_before = params.checksum(encoders::kFusionGroup);
  std::uint64_t dec_before = params.checksum(encoders::kDecoderGroup);

  GenConfig gc;
  gc.epochs = 2;
  gc.k = 3;
  gc.seed = 7;
  gc.max_length = 32;
  OptimizerConfig opt;
  GenResult r = train_gen(data, lib, gc, opt, params, mol_enc, spec_enc, fusion, decoder,
                          cfg, vocab);

  CHECK(r.step_nll.size() == data.size() * gc.epochs);
  CHECK(r.epoch_nll.size() == gc.epochs);
  for (double v : r.step_nll) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK(params.checksum(encoders::kMolGroup) == gamma);
  CHECK(params.checksum(encoders::kSpecGroup) == eta);
  CHECK(params.checksum(encoders::kFusionGroup) != fusion_before);
  CHECK(params.checksum(encoders::kDecoderGroup) != dec_before);
}

TEST_CASE("retrieval records serialize to one JSON object per line") {
  RetrievalRecord rec;
  rec.identifier = "q1";
  rec.generated_smiles = "CCO";
  rec.beams = {{"CCO", -0.5}};
  rec.ranking = {{"CCO", 0.99}, {"CCC", 0.42}};
  std::string text = retrieval_to_jsonl({rec, rec});
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"identifier\":\"q1\"") != std::string::npos);
  CHECK(text.find("\"generated_smiles\":\"CCO\"") != std::string::npos);
  CHECK(text.find("\"fallback_used\":false") != std::string::npos);
}
