#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace verity::oracle {

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Bm25::Bm25(const std::vector<std::string>& texts, double k1_, double b_) : k1(k1_), b(b_) {
  for (const auto& t : texts) docs.push_back(tokens(t));
}

double Bm25::avgdl() const {
  if (docs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& d : docs) total += static_cast<double>(d.size());
  return total / static_cast<double>(docs.size());
}

std::size_t Bm25::df(const std::string& term) const {
  std::size_t n = 0;
  for (const auto& d : docs) {
    if (std::find(d.begin(), d.end(), term) != d.end()) ++n;
  }
  return n;
}

double Bm25::score(const std::string& query, std::size_t doc) const {
  const double n = static_cast<double>(docs.size());
  const double avg = avgdl();
  const auto& d = docs.at(doc);
  const double len = static_cast<double>(d.size());
  double total = 0.0;
  for (const auto& term : tokens(query)) {
    const double tf = static_cast<double>(std::count(d.begin(), d.end(), term));
    if (tf == 0.0) continue;
    const double dfv = static_cast<double>(df(term));
    const double idf = std::log(1.0 + (n - dfv + 0.5) / (dfv + 0.5));
    total += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
  }
  return total;
}

std::vector<std::size_t> Bm25::ranking(const std::string& query) const {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const double s = score(query, i);
    if (s > 0.0) scored.emplace_back(s, i);
  }
  // Selection sort keeps this obviously correct rather than fast.
  std::vector<std::size_t> out;
  while (!scored.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scored.size(); ++i) {
      const bool higher = scored[i].first > scored[best].first;
      const bool tie_lower_id = scored[i].first == scored[best].first && scored[i].second < scored[best].second;
      if (higher || tie_lower_id) best = i;
    }
    out.push_back(scored[best].second);
    scored.erase(scored.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

std::vector<std::size_t> select(const std::vector<double>& paragraph_scores, std::size_t per_entity,
                                std::size_t summary) {
  std::vector<std::size_t> out;
  const std::size_t n = paragraph_scores.size();
  const std::size_t head = std::min(summary, n);
  for (std::size_t i = 0; i < head; ++i) out.push_back(i);
  std::vector<std::size_t> rest;
  for (std::size_t i = head; i < n; ++i) {
    if (paragraph_scores[i] > 0.0) rest.push_back(i);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t c) { return paragraph_scores[a] > paragraph_scores[c]; });
  const std::size_t budget = per_entity - summary;
  for (std::size_t i = 0; i < rest.size() && i < budget; ++i) out.push_back(rest[i]);
  return out;
}

namespace {

std::vector<long double> classify(const std::vector<double>& params, std::size_t d, std::size_t h,
                                  const std::vector<double>& v) {
  const std::size_t b1 = h * d;
  const std::size_t w2 = b1 + h;
  const std::size_t b2 = w2 + 2 * h;
  std::vector<long double> logits{params[b2], params[b2 + 1]};
  for (std::size_t j = 0; j < h; ++j) {
    long double a = params[b1 + j];
    for (std::size_t i = 0; i < d; ++i) a += static_cast<long double>(params[j * d + i]) * v[i];
    const long double hidden = std::tanh(a);
    for (std::size_t k = 0; k < 2; ++k) logits[k] += static_cast<long double>(params[w2 + k * h + j]) * hidden;
  }
  const long double e0 = std::exp(logits[0]);
  const long double e1 = std::exp(logits[1]);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace

JudgeOutput judge_forward(const std::vector<double>& params, std::size_t d, std::size_t h,
                          const std::vector<double>& v1, const std::vector<double>& v2) {
  const auto p1 = classify(params, d, h, v1);
  const auto p2 = classify(params, d, h, v2);
  const long double z1 = params[params.size() - 2];
  const long double z2 = params[params.size() - 1];
  const long double w1 = std::exp(z1) / (std::exp(z1) + std::exp(z2));
  const long double w2 = std::exp(z2) / (std::exp(z1) + std::exp(z2));
  JudgeOutput out;
  out.w1 = static_cast<double>(w1);
  out.w2 = static_cast<double>(w2);
  for (std::size_t k = 0; k < 2; ++k) {
    out.p1.push_back(static_cast<double>(p1[k]));
    out.p2.push_back(static_cast<double>(p2[k]));
    out.fused.push_back(static_cast<double>(w1 * p1[k] + w2 * p2[k]));
  }
  return out;
}

double judge_loss(const std::vector<double>& params, std::size_t d, std::size_t h, const std::vector<double>& v1,
                  const std::vector<double>& v2, std::size_t gold) {
  return -std::log(judge_forward(params, d, h, v1, v2).fused[gold]);
}

std::vector<double> judge_numeric_gradient(std::vector<double> params, std::size_t d, std::size_t h,
                                           const std::vector<double>& v1, const std::vector<double>& v2,
                                           std::size_t gold, double step) {
  std::vector<double> grad(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + step;
    const double up = judge_loss(params, d, h, v1, v2, gold);
    params[p] = saved - step;
    const double down = judge_loss(params, d, h, v1, v2, gold);
    params[p] = saved;
    grad[p] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace verity::oracle
