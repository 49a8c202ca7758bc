#include "syngcn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "syngcn/common.hpp"

namespace syngcn {

double cosine(const float* u, const float* v, size_t dim) {
  const double nu = std::sqrt(squared_norm(u, dim));
  const double nv = std::sqrt(squared_norm(v, dim));
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = dot(u, v, dim) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

double cosine(const std::vector<float>& u, const std::vector<float>& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine: dimension mismatch");
  return cosine(u.data(), v.data(), u.size());
}

namespace {

// Average-tie ranks, 1-based.
std::vector<double> tie_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(const std::vector<double>& gold,
                const std::vector<double>& pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("spearman: length mismatch");
  if (gold.size() < 2)
    throw std::invalid_argument("spearman: need at least two pairs");
  return pearson(tie_ranks(gold), tie_ranks(pred));
}

SimilarityDataset load_similarity_dataset(std::istream& in) {
  SimilarityDataset ds;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string w1, w2, score, extra;
    if (!std::getline(row, w1, '\t') || !std::getline(row, w2, '\t') ||
        !std::getline(row, score, '\t') || w1.empty() || w2.empty() ||
        score.empty() || std::getline(row, extra, '\t'))
      throw DataError("similarity line " + std::to_string(line_no) +
                      ": expected word1<TAB>word2<TAB>score");
    size_t used = 0;
    double gold = 0.0;
    try {
      gold = std::stod(score, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != score.size() || !std::isfinite(gold))
      throw DataError("similarity line " + std::to_string(line_no) +
                      ": bad score '" + score + "'");
    ds.rows.push_back({std::move(w1), std::move(w2), gold});
  }
  return ds;
}

SimilarityDataset load_similarity_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open similarity dataset: " + path);
  return load_similarity_dataset(in);
}

SimilarityResult eval_similarity(const MatrixF& embeddings,
                                 const Vocabulary& vocab,
                                 const SimilarityDataset& dataset) {
  require_shape(embeddings, vocab.size(), embeddings.cols(),
                "eval_similarity embeddings");
  SimilarityResult res;
  std::vector<double> gold, pred;
  for (const SimilarityRow& row : dataset.rows) {
    const auto a = vocab.find(row.word1);
    const auto b = vocab.find(row.word2);
    if (!a || !b) {
      ++res.rows_skipped;
      continue;
    }
    gold.push_back(row.gold);
    pred.push_back(
        cosine(embeddings.row(*a), embeddings.row(*b), embeddings.cols()));
  }
  res.rows_used = gold.size();
  const size_t total = res.rows_used + res.rows_skipped;
  res.coverage = total ? static_cast<double>(res.rows_used) /
                             static_cast<double>(total)
                       : 0.0;
  res.rho = res.rows_used >= 2
                ? spearman(gold, pred)
                : std::numeric_limits<double>::quiet_NaN();
  return res;
}

std::vector<AnalogyQuad> load_analogy_dataset(std::istream& in) {
  std::vector<AnalogyQuad> quads;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line[0] == ':') continue;
    std::istringstream row(line);
    AnalogyQuad q;
    std::string extra;
    if (!(row >> q.a >> q.b >> q.c >> q.d) || (row >> extra))
      throw DataError("analogy line " + std::to_string(line_no) +
                      ": expected four words");
    quads.push_back(std::move(q));
  }
  return quads;
}

std::vector<AnalogyQuad> load_analogy_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open analogy dataset: " + path);
  return load_analogy_dataset(in);
}

AnalogyResult eval_analogy(const MatrixF& embeddings, const Vocabulary& vocab,
                           const std::vector<AnalogyQuad>& quads,
                           AnalogyMethod method) {
  const size_t dim = embeddings.cols();
  require_shape(embeddings, vocab.size(), dim, "eval_analogy embeddings");
  std::vector<double> norms(vocab.size());
  for (uint32_t i = 0; i < vocab.size(); ++i)
    norms[i] = std::sqrt(squared_norm(embeddings.row(i), dim));

  auto cos_rows = [&](uint32_t x, uint32_t y) {
    if (norms[x] == 0.0 || norms[y] == 0.0) return 0.0;
    return std::clamp(
        dot(embeddings.row(x), embeddings.row(y), dim) / (norms[x] * norms[y]),
        -1.0, 1.0);
  };

  AnalogyResult res;
  size_t correct = 0;
  std::vector<float> target(dim);
  for (const AnalogyQuad& q : quads) {
    const auto a = vocab.find(q.a), b = vocab.find(q.b), c = vocab.find(q.c),
               d = vocab.find(q.d);
    if (!a || !b || !c || !d) {
      ++res.quads_skipped;
      continue;
    }
    ++res.quads_used;
    uint32_t best = std::numeric_limits<uint32_t>::max();
    double best_score = -std::numeric_limits<double>::infinity();
    if (method == AnalogyMethod::CosAdd) {
      for (size_t j = 0; j < dim; ++j)
        target[j] = embeddings(*b, j) - embeddings(*a, j) + embeddings(*c, j);
      const double tn = std::sqrt(squared_norm(target.data(), dim));
      for (uint32_t x = 0; x < vocab.size(); ++x) {
        if (x == *a || x == *b || x == *c) continue;
        double score = 0.0;
        if (tn != 0.0 && norms[x] != 0.0)
          score = dot(embeddings.row(x), target.data(), dim) /
                  (norms[x] * tn);
        if (score > best_score) {
          best_score = score;
          best = x;
        }
      }
    } else {
      // Shifted cosines keep every factor positive.
      constexpr double kEps = 1e-3;
      for (uint32_t x = 0; x < vocab.size(); ++x) {
        if (x == *a || x == *b || x == *c) continue;
        const double sb = (cos_rows(x, *b) + 1.0) / 2.0;
        const double sa = (cos_rows(x, *a) + 1.0) / 2.0;
        const double sc = (cos_rows(x, *c) + 1.0) / 2.0;
        const double score = sb * sc / (sa + kEps);
        if (score > best_score) {
          best_score = score;
          best = x;
        }
      }
    }
    if (best == *d) ++correct;
  }
  res.accuracy = res.quads_used ? static_cast<double>(correct) /
                                      static_cast<double>(res.quads_used)
                                : 0.0;
  return res;
}

std::vector<Neighbor> nearest_neighbors(const MatrixF& embeddings,
                                        const Vocabulary& vocab,
                                        const std::string& word, size_t k) {
  const size_t dim = embeddings.cols();
  require_shape(embeddings, vocab.size(), dim, "nearest_neighbors embeddings");
  const auto q = vocab.find(word);
  if (!q) throw DataError("word not in vocabulary: " + word);
  std::vector<Neighbor> all;
  all.reserve(vocab.size() > 0 ? vocab.size() - 1 : 0);
  for (uint32_t x = 0; x < vocab.size(); ++x) {
    if (x == *q) continue;
    all.push_back(
        {x, vocab.word(x), cosine(embeddings.row(*q), embeddings.row(x), dim)});
  }
  const size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + take, all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.id < b.id;
                    });
  all.resize(take);
  return all;
}

}  // namespace syngcn
