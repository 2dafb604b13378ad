#include "glmr/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace glmr::spectra {

MoleculeRecord make_record(const std::string& smiles_text) {
  MoleculeRecord r;
  r.smiles = smiles_text;
  r.graph = smiles::parse(smiles_text);
  r.canonical_smiles = smiles::canonicalize(r.graph);
  r.formula = smiles::molecular_formula(r.graph);
  r.parent_mass = smiles::monoisotopic_mass(r.graph);
  return r;
}

Spectrum normalize_intensities(const std::vector<Peak>& raw, std::size_t max_peaks) {
  if (raw.empty()) throw EmptySpectrum("no peaks");
  for (const Peak& p : raw) {
    if (p.intensity <= 0.0) throw NonPositiveIntensity("non-positive intensity");
    if (p.mz <= 0.0) throw SpectraError("non-positive m/z");
  }
  std::vector<Peak> peaks = raw;
  // merge exact-duplicate mz, keeping the larger intensity
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return a.mz < b.mz;
  });
  std::vector<Peak> merged;
  for (const Peak& p : peaks) {
    if (!merged.empty() && merged.back().mz == p.mz)
      merged.back().intensity = std::max(merged.back().intensity, p.intensity);
    else
      merged.push_back(p);
  }
  if (merged.size() > max_peaks) {
    std::stable_sort(merged.begin(), merged.end(), [](const Peak& a, const Peak& b) {
      return a.intensity > b.intensity;
    });
    merged.resize(max_peaks);
    std::sort(merged.begin(), merged.end(), [](const Peak& a, const Peak& b) {
      return a.mz < b.mz;
    });
  }
  double max_i = 0.0;
  for (const Peak& p : merged) max_i = std::max(max_i, p.intensity);
  Spectrum s;
  s.peaks = merged;
  for (Peak& p : s.peaks) p.intensity /= max_i;
  return s;
}

bool is_normalized(const Spectrum& s) {
  if (s.peaks.empty()) return false;
  double mx = 0.0;
  for (const Peak& p : s.peaks) {
    if (p.intensity <= 0.0 || p.intensity > 1.0 + 1e-12) return false;
    mx = std::max(mx, p.intensity);
  }
  return std::abs(mx - 1.0) < 1e-9;
}

// ---- MGF ----

MgfResult parse_mgf(std::istream& in) {
  MgfResult result;
  std::string line;
  std::size_t lineno = 0;
  bool in_block = false;
  std::size_t block_start = 0;
  bool block_bad = false;
  std::vector<Peak> peaks;
  SpectrumMetadata meta;

  auto fail_block = [&](const std::string& msg, std::size_t at) {
    if (!block_bad) result.issues.push_back({at, msg});
    block_bad = true;
  };
  auto flush_block = [&](std::size_t at) {
    if (!block_bad) {
      if (peaks.empty()) {
        result.issues.push_back({at, "block has no peaks"});
      } else {
        try {
          Spectrum s = normalize_intensities(peaks);
          s.metadata = meta;
          result.spectra.push_back(std::move(s));
        } catch (const SpectraError& e) {
          result.issues.push_back({at, e.what()});
        }
      }
    }
    in_block = false;
    block_bad = false;
    peaks.clear();
    meta = SpectrumMetadata{};
  };

  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!in_block) {
      if (line == "BEGIN IONS") {
        in_block = true;
        block_start = lineno;
      } else {
        result.issues.push_back({lineno, "content outside BEGIN IONS/END IONS"});
      }
      continue;
    }
    if (line == "END IONS") {
      flush_block(block_start);
      continue;
    }
    if (line == "BEGIN IONS") {
      fail_block("BEGIN IONS inside an open block", lineno);
      flush_block(block_start);
      in_block = true;
      block_start = lineno;
      continue;
    }
    auto eq = line.find('=');
    if (eq != std::string::npos && line.find_first_of(" \t") > eq) {
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      if (key == "TITLE") meta.identifier = value;
      else if (key == "PEPMASS") meta.precursor_mz = std::atof(value.c_str());
      else if (key == "SMILES") meta.smiles = value;
      else if (key == "ADDUCT") meta.adduct = value;
      else if (key == "INSTRUMENT") meta.instrument_type = value;
      else if (key == "COLLISION_ENERGY") meta.collision_energy = std::atof(value.c_str());
      // other KEY=VALUE pairs (CHARGE, ...) are accepted and ignored
      continue;
    }
    // peak line: "mz intensity"
    std::istringstream ps(line);
    double mz, intensity;
    if (ps >> mz >> intensity) {
      peaks.push_back({mz, intensity});
    } else {
      fail_block("malformed line in block: " + line, lineno);
    }
  }
  if (in_block) {
    fail_block("missing END IONS", block_start);
    flush_block(block_start);
  }
  return result;
}

// ---- dataset table ----

const std::vector<std::string> kTableColumns = {
    "identifier",     "mzs",         "intensities",     "smiles",
    "formula",        "precursor_formula", "parent_mass", "precursor_mz",
    "adduct",         "instrument_type",   "collision_energy"};

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_array(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const std::string& item : split(s, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw SpectraError("bad numeric array item: " + item);
    out.push_back(v);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TableResult parse_dataset_table(std::istream& in) {
  TableResult result;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw SpectraError("empty dataset table");
  ++lineno;
  while (!line.empty() && (line.back() == '\r')) line.pop_back();
  std::vector<std::string> header = split(line, '\t');
  if (header != kTableColumns)
    throw SpectraError("dataset table header does not match the expected schema");
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != kTableColumns.size()) {
      result.issues.push_back({lineno, "column count mismatch"});
      continue;
    }
    try {
      std::vector<double> mzs = parse_array(cols[1]);
      std::vector<double> ints = parse_array(cols[2]);
      if (mzs.size() != ints.size())
        throw SpectraError("array length mismatch for identifier " + cols[0]);
      std::vector<Peak> peaks;
      peaks.reserve(mzs.size());
      for (std::size_t i = 0; i < mzs.size(); ++i) peaks.push_back({mzs[i], ints[i]});
      DatasetRow row;
      row.spectrum = normalize_intensities(peaks);
      row.spectrum.metadata.identifier = cols[0];
      row.spectrum.metadata.smiles = cols[3];
      row.spectrum.metadata.precursor_formula = cols[5];
      row.spectrum.metadata.precursor_mz = cols[7].empty() ? 0.0 : std::stod(cols[7]);
      row.spectrum.metadata.adduct = cols[8];
      row.spectrum.metadata.instrument_type = cols[9];
      row.spectrum.metadata.collision_energy = cols[10].empty() ? 0.0 : std::stod(cols[10]);
      row.smiles = cols[3];
      row.formula = cols[4];
      row.parent_mass = cols[6].empty() ? 0.0 : std::stod(cols[6]);
      result.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      result.issues.push_back({lineno, e.what()});
    }
  }
  return result;
}

void write_dataset_table(std::ostream& out, const std::vector<DatasetRow>& rows) {
  for (std::size_t i = 0; i < kTableColumns.size(); ++i) {
    if (i) out << '\t';
    out << kTableColumns[i];
  }
  out << '\n';
  for (const DatasetRow& r : rows) {
    std::string mzs, ints;
    for (std::size_t i = 0; i < r.spectrum.peaks.size(); ++i) {
      if (i) {
        mzs += ',';
        ints += ',';
      }
      mzs += fmt_double(r.spectrum.peaks[i].mz);
      ints += fmt_double(r.spectrum.peaks[i].intensity);
    }
    const SpectrumMetadata& m = r.spectrum.metadata;
    out << m.identifier << '\t' << mzs << '\t' << ints << '\t' << r.smiles << '\t'
        << r.formula << '\t' << m.precursor_formula << '\t' << fmt_double(r.parent_mass)
        << '\t' << fmt_double(m.precursor_mz) << '\t' << m.adduct << '\t'
        << m.instrument_type << '\t' << fmt_double(m.collision_energy) << '\n';
  }
}

std::vector<MoleculeRecord> dedup_against(const std::set<std::string>& training_canonical,
                                          const std::vector<MoleculeRecord>& candidates) {
  std::vector<MoleculeRecord> kept;
  for (const MoleculeRecord& r : candidates)
    if (!training_canonical.count(r.canonical_smiles)) kept.push_back(r);
  return kept;
}

Spectrum perturb_spectrum(const Spectrum& s, std::uint64_t seed, double strength) {
  Spectrum out = s;
  Rng rng(seed);
  double mx = 0.0;
  for (Peak& p : out.peaks) {
    p.intensity *= rng.uniform(1.0 - strength, 1.0 + strength);
    mx = std::max(mx, p.intensity);
  }
  for (Peak& p : out.peaks) p.intensity /= mx;
  return out;
}

namespace {

// Connected component membership after removing bond `skip`.
std::vector<int> components_without(const smiles::MolGraph& g, std::size_t skip) {
  std::vector<int> comp(g.atoms.size(), -1);
  int c = 0;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (comp[i] != -1) continue;
    std::vector<std::size_t> todo{i};
    comp[i] = c;
    while (!todo.empty()) {
      std::size_t u = todo.back();
      todo.pop_back();
      for (std::size_t bi = 0; bi < g.bonds.size(); ++bi) {
        if (bi == skip) continue;
        const smiles::Bond& b = g.bonds[bi];
        if (b.a != u && b.b != u) continue;
        std::size_t v = b.a == u ? b.b : b.a;
        if (comp[v] == -1) {
          comp[v] = c;
          todo.push_back(v);
        }
      }
    }
    ++c;
  }
  return comp;
}

}  // namespace

Spectrum synth_fragment_spectrum(const MoleculeRecord& m, std::size_t max_peaks) {
  const smiles::MolGraph& g = m.graph;
  std::vector<Peak> raw;
  for (std::size_t bi = 0; bi < g.bonds.size(); ++bi) {
    if (g.bonds[bi].order != smiles::BondOrder::Single) continue;
    std::vector<int> comp = components_without(g, bi);
    int n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
    if (n_comp < 2) continue;  // ring bond, removal does not split
    // two fragments: mass and atom count of each
    double mass[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    int ca = comp[g.bonds[bi].a], cb = comp[g.bonds[bi].b];
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
      int side = comp[i] == ca ? 0 : (comp[i] == cb ? 1 : -1);
      if (side < 0) continue;  // other pre-existing components ignored
      mass[side] += smiles::element_mass(g.atoms[i].element) +
                    g.atoms[i].h_count * smiles::element_mass("H");
      count[side] += 1;
    }
    for (int side = 0; side < 2; ++side)
      if (count[side] > 0) raw.push_back({mass[side], static_cast<double>(count[side])});
  }
  raw.push_back({m.parent_mass, static_cast<double>(g.atoms.size()) + 1.0});
  // dedupe within 1e-4 Da, keeping the strongest peak
  std::sort(raw.begin(), raw.end(), [](const Peak& a, const Peak& b) { return a.mz < b.mz; });
  std::vector<Peak> dedup;
  for (const Peak& p : raw) {
    if (!dedup.empty() && p.mz - dedup.back().mz < 1e-4)
      dedup.back().intensity = std::max(dedup.back().intensity, p.intensity);
    else
      dedup.push_back(p);
  }
  Spectrum s = normalize_intensities(dedup, max_peaks);
  s.metadata.smiles = m.canonical_smiles;
  s.metadata.precursor_mz = m.parent_mass;
  return s;
}

}  // namespace glmr::spectra
