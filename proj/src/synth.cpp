#include "exrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "exrec/embedding.hpp"
#include "exrec/errors.hpp"
#include "exrec/rng.hpp"
#include "exrec/text.hpp"

namespace exrec {

namespace {

constexpr const char* kVocabStems[] = {
    "solve",    "equation", "fraction", "angle",    "triangle", "sum",
    "prime",    "graph",    "area",     "perimeter", "ratio",   "percent",
    "divide",   "multiply", "remainder", "decimal",  "integer", "slope",
    "line",     "circle",   "radius",   "square",    "root",    "factor",
    "expand",   "simplify", "evaluate", "compare",   "order",   "round",
    "estimate", "measure",  "volume",   "length",    "width",   "height",
    "speed",    "distance", "time",     "average",   "median",  "mode",
    "range",    "table",    "chart",    "pattern",   "sequence", "series",
    "interval", "segment",  "vertex",   "edge",      "polygon", "parallel",
    "symmetry", "rotation", "translate", "reflect",  "scale",   "unit",
    "digit",    "count",    "group",    "share",
};
constexpr size_t kVocabStemCount = sizeof(kVocabStems) / sizeof(kVocabStems[0]);
constexpr uint32_t kVocabNumbered = 320;
constexpr uint32_t kWordsPerText = 10;

std::string vocab_word(uint32_t index) {
  if (index < kVocabStemCount) return kVocabStems[index];
  return "w" + std::to_string(index - kVocabStemCount);
}

uint32_t vocab_size() {
  return static_cast<uint32_t>(kVocabStemCount) + kVocabNumbered;
}

std::string padded(const char* prefix, uint32_t value, uint32_t width) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s%0*u", prefix, width, value);
  return buffer;
}

uint32_t id_width(uint32_t count) {
  uint32_t width = 1;
  while (count >= 10) {
    count /= 10;
    ++width;
  }
  return width;
}

// k distinct values from [0, n) via partial Fisher-Yates.
std::vector<uint32_t> sample_distinct(uint32_t n, uint32_t k, Rng& rng) {
  std::vector<uint32_t> pool(n);
  for (uint32_t i = 0; i < n; ++i) pool[i] = i;
  for (uint32_t i = 0; i < k; ++i) {
    uint32_t j = i + static_cast<uint32_t>(rng.bounded(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  }
  return out;
}

struct Exercise {
  std::vector<uint32_t> kc_ranks;       // sorted ascending
  std::vector<uint32_t> materials;      // sorted ascending
  std::vector<std::string> tokens;
};

}  // namespace

void validate(const SynthConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(Errc::infeasible_config, what);
  };
  if (config.kc_count == 0 || config.exercise_count == 0 ||
      config.material_count == 0 || config.exercises_per_material == 0 ||
      config.kcs_per_exercise == 0 || config.query_size == 0) {
    fail("all counts must be positive");
  }
  if (config.exercise_count < config.exercises_per_material) {
    fail("exercises_per_material (" +
         std::to_string(config.exercises_per_material) +
         ") exceeds exercise_count (" +
         std::to_string(config.exercise_count) + ")");
  }
  if (!(config.near_duplicate_fraction >= 0.0) ||
      !(config.near_duplicate_fraction < 1.0) ||
      !(config.out_of_scope_distractor_fraction >= 0.0) ||
      !(config.out_of_scope_distractor_fraction < 1.0)) {
    fail("fractions must lie in [0, 1)");
  }
  if (config.query_size >= config.exercises_per_material) {
    fail("query_size must be smaller than exercises_per_material");
  }
  const uint32_t span = std::max(config.kcs_per_exercise, 3u);
  if (config.kc_count < span) {
    fail("kc_count must be at least max(kcs_per_exercise, 3)");
  }
  const uint32_t blocks = config.kc_count / span;
  const auto n_dup = static_cast<uint32_t>(std::llround(
      config.near_duplicate_fraction * config.exercise_count));
  const auto n_dis = static_cast<uint32_t>(std::llround(
      config.out_of_scope_distractor_fraction * config.exercise_count));
  if (n_dup + n_dis >= config.exercise_count) {
    fail("fractions leave no base exercises");
  }
  const uint32_t n_base = config.exercise_count - n_dup - n_dis;
  if (n_base / config.material_count < config.exercises_per_material) {
    fail("not enough base exercises for " +
         std::to_string(config.material_count) + " bundles of " +
         std::to_string(config.exercises_per_material));
  }
  if (n_dis > 0 && blocks < 2) {
    fail("distractors need at least two KC blocks");
  }
}

void synth_dataset(const SynthConfig& config,
                   const std::filesystem::path& out_dir,
                   bool write_embeddings) {
  validate(config);
  std::filesystem::create_directories(out_dir);

  const uint32_t span = std::max(config.kcs_per_exercise, 3u);
  const uint32_t blocks = config.kc_count / span;
  const auto n_dup = static_cast<uint32_t>(std::llround(
      config.near_duplicate_fraction * config.exercise_count));
  const auto n_dis = static_cast<uint32_t>(std::llround(
      config.out_of_scope_distractor_fraction * config.exercise_count));
  const uint32_t n_base = config.exercise_count - n_dup - n_dis;

  const uint32_t kc_width = id_width(config.kc_count);
  const uint32_t ex_width = id_width(config.exercise_count);
  const uint32_t mat_width = id_width(config.material_count);
  auto kc_id = [&](uint32_t rank) { return padded("kc", rank, kc_width); };
  auto ex_id = [&](uint32_t index) { return padded("ex", index, ex_width); };
  auto mat_id = [&](uint32_t index) { return padded("m", index, mat_width); };

  auto block_of_material = [&](uint32_t m) {
    return static_cast<uint32_t>(static_cast<uint64_t>(m) * blocks /
                                 config.material_count);
  };
  auto window_start = [&](uint32_t block) { return block * span; };

  Rng rng_kcs(derive_seed(config.seed, 1));
  Rng rng_words(derive_seed(config.seed, 2));
  Rng rng_twins(derive_seed(config.seed, 3));
  Rng rng_distractors(derive_seed(config.seed, 4));
  Rng rng_cases(derive_seed(config.seed, 5));

  std::vector<Exercise> exercises(config.exercise_count);

  auto make_tokens = [&](uint32_t index, std::span<const uint32_t> kc_ranks) {
    std::vector<std::string> tokens;
    tokens.reserve(config.kcs_per_exercise + 1 + kWordsPerText);
    for (uint32_t i = 0; i < config.kcs_per_exercise && i < kc_ranks.size();
         ++i) {
      tokens.push_back(kc_id(kc_ranks[i]));
    }
    tokens.push_back("x" + std::to_string(index));
    for (uint32_t w : sample_distinct(vocab_size(), kWordsPerText, rng_words)) {
      tokens.push_back(vocab_word(w));
    }
    return tokens;
  };

  // Base exercises: home material by round-robin, KCs inside its window.
  for (uint32_t j = 0; j < n_base; ++j) {
    const uint32_t home = j % config.material_count;
    const uint32_t start = window_start(block_of_material(home));
    Exercise& exercise = exercises[j];
    exercise.kc_ranks = sample_distinct(span, config.kcs_per_exercise, rng_kcs);
    for (uint32_t& rank : exercise.kc_ranks) rank += start;
    std::sort(exercise.kc_ranks.begin(), exercise.kc_ranks.end());
    exercise.tokens = make_tokens(j, exercise.kc_ranks);
  }

  // Bundles: the first exercises_per_material home exercises of each
  // material. Extra home exercises stay KC-linked only.
  std::vector<std::vector<uint32_t>> bundles(config.material_count);
  for (uint32_t j = 0; j < n_base; ++j) {
    const uint32_t home = j % config.material_count;
    if (bundles[home].size() < config.exercises_per_material) {
      bundles[home].push_back(j);
      exercises[j].materials.push_back(home);
    }
  }

  // Near-duplicate twins: same KCs and materials as the base, token
  // stream copied with one sampled word replaced by a twin-unique token.
  for (uint32_t t = 0; t < n_dup; ++t) {
    const uint32_t index = n_base + t;
    const uint32_t base = static_cast<uint32_t>(rng_twins.bounded(n_base));
    Exercise& twin = exercises[index];
    twin.kc_ranks = exercises[base].kc_ranks;
    twin.materials = exercises[base].materials;
    twin.tokens = exercises[base].tokens;
    const size_t word_base = twin.tokens.size() - kWordsPerText;
    const size_t position =
        word_base + static_cast<size_t>(rng_twins.bounded(kWordsPerText));
    twin.tokens[position] = "d" + std::to_string(t);
    for (uint32_t material : twin.materials) {
      bundles[material].push_back(index);
    }
  }

  // Distractors: every KC of an early material's window plus one KC from
  // the last block; no material links.
  std::vector<uint32_t> early_materials;
  for (uint32_t m = 0; m < config.material_count; ++m) {
    if (block_of_material(m) < std::max(1u, blocks / 2)) {
      early_materials.push_back(m);
    }
  }
  for (uint32_t d = 0; d < n_dis; ++d) {
    const uint32_t index = n_base + n_dup + d;
    const uint32_t target =
        early_materials[d % early_materials.size()];
    const uint32_t start = window_start(block_of_material(target));
    Exercise& distractor = exercises[index];
    for (uint32_t k = 0; k < span; ++k) distractor.kc_ranks.push_back(start + k);
    const uint32_t late_start = window_start(blocks - 1);
    distractor.kc_ranks.push_back(
        late_start + static_cast<uint32_t>(rng_distractors.bounded(span)));
    distractor.tokens = make_tokens(index, distractor.kc_ranks);
  }

  // graph.tsv
  {
    std::ofstream out = open_out(out_dir / "graph.tsv");
    for (uint32_t j = 0; j < config.exercise_count; ++j) {
      for (uint32_t rank : exercises[j].kc_ranks) {
        out << "E1\t" << kc_id(rank) << '\t' << ex_id(j) << '\n';
      }
    }
    for (uint32_t m = 0; m < config.material_count; ++m) {
      for (uint32_t j : bundles[m]) {
        out << "E2\t" << ex_id(j) << '\t' << mat_id(m) << '\n';
      }
    }
  }

  // corpus.tsv
  {
    std::ofstream out = open_out(out_dir / "corpus.tsv");
    for (uint32_t j = 0; j < config.exercise_count; ++j) {
      out << ex_id(j) << '\t';
      const auto& tokens = exercises[j].tokens;
      for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out << ' ';
        out << tokens[i];
      }
      out << '\n';
    }
  }

  // syllabus.txt
  {
    std::ofstream out = open_out(out_dir / "syllabus.txt");
    for (uint32_t rank = 0; rank < config.kc_count; ++rank) {
      out << kc_id(rank) << '\n';
    }
  }

  // cases.tsv: one per material; query sampled from the bundle, progress
  // cutoff at the material's window end.
  {
    std::ofstream out = open_out(out_dir / "cases.tsv");
    for (uint32_t m = 0; m < config.material_count; ++m) {
      const auto& bundle = bundles[m];
      const uint32_t cutoff =
          window_start(block_of_material(m)) + span - 1;
      std::vector<uint32_t> picks = sample_distinct(
          static_cast<uint32_t>(bundle.size()), config.query_size, rng_cases);
      std::sort(picks.begin(), picks.end());
      out << mat_id(m) << '\t' << kc_id(cutoff) << '\t';
      for (size_t i = 0; i < picks.size(); ++i) {
        if (i > 0) out << ',';
        out << ex_id(bundle[picks[i]]);
      }
      out << '\n';
    }
  }

  // embeddings.tsv: builtin embeddings of the corpus texts.
  if (write_embeddings) {
    std::ofstream out = open_out(out_dir / "embeddings.tsv");
    out << "DIM\t" << kBuiltinEmbeddingDim << '\n';
    char buffer[32];
    for (uint32_t j = 0; j < config.exercise_count; ++j) {
      std::vector<double> vec =
          embed_tokens(exercises[j].tokens, kBuiltinEmbeddingDim);
      out << ex_id(j) << '\t';
      for (uint32_t i = 0; i < kBuiltinEmbeddingDim; ++i) {
        std::snprintf(buffer, sizeof(buffer), "%.9g", vec[i]);
        if (i > 0) out << ',';
        out << buffer;
      }
      out << '\n';
    }
  }
}

}  // namespace exrec
