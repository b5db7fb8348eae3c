#include "gazkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gazkit/gaz_embedding.hpp"
#include "gazkit/tagger.hpp"

namespace gazkit {

double GradCheckReport::max_relative_error() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.max_relative_error);
  return m;
}

double relative_error(double analytic, double numeric, double floor) {
  double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

constexpr std::size_t kTypes = 6;

TokenMatchSet random_matches(Rng& rng, std::size_t count, std::size_t n_types) {
  TokenMatchSet set;
  while (set.matches.size() < count) {
    TokenMatch m{static_cast<TypeId>(uniform_index(rng, n_types)), static_cast<SpanTag>(uniform_index(rng, kSpanTagCount))};
    if (std::find(set.matches.begin(), set.matches.end(), m) == set.matches.end()) set.matches.push_back(m);
  }
  return set;
}

template <class Loss>
BlockError check_entries(const std::string& name, Matrix& value, const Matrix& analytic,
                         const std::vector<std::size_t>& rows, Loss&& loss, double step) {
  BlockError err{name, 0.0, 0};
  for (std::size_t r : rows)
    for (std::size_t c = 0; c < value.cols(); ++c) {
      double saved = value(r, c);
      value(r, c) = saved + step;
      double up = loss();
      value(r, c) = saved - step;
      double down = loss();
      value(r, c) = saved;
      double numeric = (up - down) / (2 * step);
      err.max_relative_error = std::max(err.max_relative_error, relative_error(analytic(r, c), numeric));
      ++err.entries_checked;
    }
  return err;
}

std::vector<std::size_t> all_rows(const Matrix& m) {
  std::vector<std::size_t> rows(m.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return rows;
}

}  // namespace

GradCheckReport check_gaz_embedding_gradients(std::uint64_t seed, std::size_t dim, std::size_t matches,
                                              bool span_encoding, bool self_attention, double step) {
  Rng rng(seed);
  GazEmbeddingParams params = GazEmbeddingParams::init(kTypes, dim, rng);
  TokenMatchSet set = random_matches(rng, matches, kTypes);
  std::vector<double> probe(dim);
  for (double& v : probe) v = uniform(rng, -1.0, 1.0);
  GazEmbeddingOptions options{span_encoding, self_attention};

  auto loss = [&] {
    auto g = forward_token(set, params, options);
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += probe[k] * g[k];
    return s;
  };

  GazForwardCache cache;
  forward_token(set, params, options, &cache);
  GazGradients grads(dim);
  backward_token(probe, cache, params, grads);

  Matrix dG(kTypes, dim), dS(kSpanTagCount, dim);
  std::vector<std::size_t> g_rows, s_rows;
  for (auto& [row, g] : grads.type_rows) {
    g_rows.push_back(row);
    std::copy(g.begin(), g.end(), dG.row(row).begin());
  }
  for (auto& [row, g] : grads.span_rows) {
    s_rows.push_back(row);
    std::copy(g.begin(), g.end(), dS.row(row).begin());
  }

  GradCheckReport report;
  report.blocks.push_back(check_entries("G", params.type_embeddings, dG, g_rows, loss, step));
  report.blocks.push_back(check_entries("S", params.span_embeddings, dS, s_rows, loss, step));
  report.blocks.push_back(check_entries("W", params.ff_weight, grads.ff_weight, all_rows(params.ff_weight), loss, step));
  report.blocks.push_back(check_entries("b", params.ff_bias, grads.ff_bias, all_rows(params.ff_bias), loss, step));
  return report;
}

GradCheckReport check_tagger_gradients(std::uint64_t seed, double step) {
  Rng rng(seed);
  const std::size_t n_types = 3, gaz_dim = 4;
  TaggerDims dims{5, 3, gaz_dim, 3, LabelScheme({"LOC", "PER"}).size()};
  TaggerModel model = TaggerModel::init(dims, rng);
  for (double& v : model.transitions.values()) v = uniform(rng, -0.5, 0.5);
  for (double& v : model.output_bias.values()) v = uniform(rng, -0.5, 0.5);
  GazEmbeddingParams gaz = GazEmbeddingParams::init(n_types, gaz_dim, rng);

  TaggerInput input;
  for (std::size_t t = 0; t < 3; ++t) {
    input.word_ids.push_back(static_cast<std::uint32_t>(uniform_index(rng, dims.vocab)));
    input.matches.push_back(random_matches(rng, 1 + uniform_index(rng, 3), n_types));
    input.gold.push_back(static_cast<LabelId>(uniform_index(rng, dims.labels)));
  }
  TaggerOptions options;

  TaggerModel grads = TaggerModel::zeros_like(model);
  GazGradients gaz_grads(gaz_dim);
  tagger_loss(model, gaz, input, options, nullptr, &grads, &gaz_grads);

  auto loss = [&] { return tagger_loss(model, gaz, input, options, nullptr, nullptr, nullptr); };

  GradCheckReport report;
  auto params = model.blocks();
  auto analytic = grads.blocks();
  for (std::size_t i = 0; i < params.size(); ++i)
    report.blocks.push_back(
        check_entries(params[i].first, *params[i].second, *analytic[i].second, all_rows(*params[i].second), loss, step));

  Matrix dG(n_types, gaz_dim), dS(kSpanTagCount, gaz_dim);
  std::vector<std::size_t> g_rows, s_rows;
  for (auto& [row, g] : gaz_grads.type_rows) {
    g_rows.push_back(row);
    std::copy(g.begin(), g.end(), dG.row(row).begin());
  }
  for (auto& [row, g] : gaz_grads.span_rows) {
    s_rows.push_back(row);
    std::copy(g.begin(), g.end(), dS.row(row).begin());
  }
  report.blocks.push_back(check_entries("gaz.G", gaz.type_embeddings, dG, g_rows, loss, step));
  report.blocks.push_back(check_entries("gaz.S", gaz.span_embeddings, dS, s_rows, loss, step));
  report.blocks.push_back(check_entries("gaz.W", gaz.ff_weight, gaz_grads.ff_weight, all_rows(gaz.ff_weight), loss, step));
  report.blocks.push_back(check_entries("gaz.b", gaz.ff_bias, gaz_grads.ff_bias, all_rows(gaz.ff_bias), loss, step));
  return report;
}

}  // namespace gazkit
