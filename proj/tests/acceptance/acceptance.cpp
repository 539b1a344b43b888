// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "fixture_world.hpp"
#include "oracles.hpp"
#include "verity/judge.hpp"
#include "verity/metrics.hpp"
#include "verity/mixing.hpp"
#include "verity/pipeline.hpp"
#include "verity/reasoning.hpp"
#include "verity/report.hpp"
#include "verity/retrieval.hpp"
#include "verity/text.hpp"

using namespace verity;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_double(double v, int precision = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

const test::World& world() {
  static const test::World w = test::load_world();
  return w;
}

// ---------------------------------------------------------------------------

Outcome bm25_oracle() {
  Outcome o;
  const auto start = Clock::now();
  const auto& w = world();
  const auto paragraphs = w.store.all_paragraphs();
  std::vector<std::string> texts;
  for (const auto& p : paragraphs) texts.push_back(p.text);
  const oracle::Bm25 ref(texts, 0.9, 0.4);

  double worst = 0.0;
  std::size_t scores = 0;
  for (const auto& c : w.claims) {
    const auto q = tokenize(c.claim.text);
    for (ParagraphId pid = 0; pid < paragraphs.size(); ++pid) {
      worst = std::max(worst, std::abs(w.index.score(q, pid) - ref.score(c.claim.text, pid)));
      ++scores;
    }
    const auto hits = w.index.top_k(c.claim.text, paragraphs.size());
    const auto expected = ref.ranking(c.claim.text);
    if (hits.size() != expected.size()) {
      o.fail("ranking length differs for " + c.claim.id);
      continue;
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i].pid != expected[i]) o.fail("ranking differs for " + c.claim.id);
    }
  }
  const double elapsed = seconds_since(start);
  if (worst > 1e-9) o.fail("max score error " + fmt_double(worst));
  if (elapsed >= 1.0) o.fail("runtime " + fmt_double(elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(paragraphs.size()) + " paragraphs x " + std::to_string(w.claims.size()) +
               " queries, max error " + fmt_double(worst) + ", " + fmt_double(elapsed) + " s";
  }
  return o;
}

// ---------------------------------------------------------------------------

Page random_page(std::mt19937_64& rng, const std::string& title, std::size_t n, const std::vector<std::string>& vocab) {
  Page page;
  page.title = title;
  page.display_title = title;
  page.url = "https://wiki.example.org/" + title;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + rng() % 8;
    std::string text;
    for (std::size_t t = 0; t < len; ++t) text += (t ? " " : "") + vocab[rng() % vocab.size()];
    page.paragraphs.push_back({title, static_cast<std::uint32_t>(i), text});
  }
  return page;
}

Outcome evidence_selection() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const std::vector<std::string> vocab{"river", "lake", "film", "director", "academy", "prize", "harbor",
                                       "winter", "north", "city", "festival", "keeper", "orbit", "salt"};
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  for (; cases < 500; ++cases) {
    const std::size_t n = 1 + rng() % 10;
    const std::size_t m = 2 + rng() % 5;
    const auto page = random_page(rng, "target", n, vocab);
    const auto other = random_page(rng, "other", 1 + rng() % 6, vocab);
    std::vector<Paragraph> all = other.paragraphs;
    all.insert(all.end(), page.paragraphs.begin(), page.paragraphs.end());
    const auto index = Bm25Index::build(all);

    std::string claim;
    for (std::size_t t = 0, len = 1 + rng() % 5; t < len; ++t) claim += (t ? " " : "") + vocab[rng() % vocab.size()];

    std::vector<std::string> texts(all.size());
    for (const auto& p : all) texts[*index.id_of({p.page_title, p.index})] = p.text;
    const oracle::Bm25 ref(texts, 0.9, 0.4);
    std::vector<double> scores;
    for (const auto& p : page.paragraphs) scores.push_back(ref.score(claim, *index.id_of({p.page_title, p.index})));
    const auto expected = oracle::select(scores, m, 2);

    const auto block = select_evidence(page, claim, SelectionParams{m, 2}, index);
    std::vector<std::size_t> got;
    for (const auto& p : block.paragraphs) got.push_back(p.ref.paragraph_index);
    if (got != expected) ++mismatches;
  }
  if (mismatches > 0) o.fail(std::to_string(mismatches) + " of " + std::to_string(cases) + " cases differ");
  if (o.pass) o.detail = std::to_string(cases) + " random pages, 0 mismatches";
  return o;
}

// ---------------------------------------------------------------------------

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(d);
  for (double& x : v) x = n(rng);
  return v;
}

JudgeModel random_judge(std::mt19937_64& rng, std::size_t d, std::size_t h) {
  JudgeModel m(d, h);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& p : m.parameters()) p = u(rng);
  std::uniform_real_distribution<double> z(-8.0, 8.0);
  m.fusion_logits()[0] = z(rng);
  m.fusion_logits()[1] = z(rng);
  return m;
}

bool valid_distribution(const Probabilities& p) {
  return p[0] >= 0.0 && p[1] >= 0.0 && std::abs(p[0] + p[1] - 1.0) <= 1e-9;
}

Outcome judge_math() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(77);

  double worst_fused = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng() % 12;
    const std::size_t h = 1 + rng() % 6;
    const auto m = random_judge(rng, d, h);
    const auto v1 = gaussian(rng, d);
    const auto v2 = gaussian(rng, d);
    const auto out = m.forward(v1, v2);
    if (!valid_distribution(out.first) || !valid_distribution(out.second) || !valid_distribution(out.fused)) {
      o.fail("invalid probability vector");
    }
    const auto ref = oracle::judge_forward({m.parameters().begin(), m.parameters().end()}, d, h, v1, v2);
    for (std::size_t k = 0; k < 2; ++k) worst_fused = std::max(worst_fused, std::abs(out.fused[k] - ref.fused[k]));
  }
  if (worst_fused > 1e-12) o.fail("fused error " + fmt_double(worst_fused));

  std::size_t weight_failures = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const auto m = random_judge(rng, 3, 2);
    JudgeModel copy = m;
    std::uniform_real_distribution<double> wide(-100.0, 100.0);
    copy.fusion_logits()[0] = wide(rng);
    copy.fusion_logits()[1] = wide(rng);
    for (const JudgeModel* model : {&m, static_cast<const JudgeModel*>(&copy)}) {
      const auto w = model->weights();
      if (!(w.first + w.second == 1.0 && w.first > 0.0 && w.first < 1.0 && w.second > 0.0 && w.second < 1.0)) {
        ++weight_failures;
      }
    }
  }
  if (weight_failures > 0) o.fail(std::to_string(weight_failures) + " weight draws violate w1 + w2 = 1");

  double worst_grad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 3 + rng() % 6;
    const std::size_t h = 2 + rng() % 4;
    auto m = random_judge(rng, d, h);
    m.fusion_logits()[0] = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    const EncodedExample ex{gaussian(rng, d), gaussian(rng, d), trial % 2 ? Stance::True : Stance::False};
    worst_grad = std::max(worst_grad, gradient_check(m, ex));

    std::vector<double> analytic(m.parameter_count(), 0.0);
    m.accumulate_gradient(ex.first, ex.second, ex.gold, analytic);
    const auto numeric = oracle::judge_numeric_gradient({m.parameters().begin(), m.parameters().end()}, d, h,
                                                        ex.first, ex.second, label_index(ex.gold), 1e-5);
    for (std::size_t p = 0; p < numeric.size(); ++p) {
      const double denom = std::max({std::abs(analytic[p]), std::abs(numeric[p]), 1e-6});
      worst_grad = std::max(worst_grad, std::abs(analytic[p] - numeric[p]) / denom);
    }
  }
  if (worst_grad >= 1e-4) o.fail("gradient relative error " + fmt_double(worst_grad));

  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) o.fail("runtime " + fmt_double(elapsed) + " s");
  if (o.pass) {
    o.detail = "fused error " + fmt_double(worst_fused) + ", 2000 weight draws exact, gradient error " +
               fmt_double(worst_grad) + ", " + fmt_double(elapsed) + " s";
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome trainability() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<EncodedExample> data;
  for (int i = 0; i < 8; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    const double mag = 0.5 + 0.25 * (i / 2);
    data.push_back({{sign * mag, 0.3 * (i % 3) - 0.3, 0.1 * i - 0.4, 0.2},
                    {sign * mag * 0.8, 0.1, -0.2, 0.05 * i},
                    sign > 0 ? Stance::True : Stance::False});
  }
  auto model = JudgeModel::initialize(4, 8, 1);
  const auto result = train_encoded(model, data, TrainConfig{200, 8, 0.5, 3});

  std::size_t correct = 0;
  for (const auto& ex : data) correct += decide(model.forward(ex.first, ex.second).fused) == ex.gold;
  if (correct != data.size()) o.fail("train accuracy " + std::to_string(correct) + "/8");
  for (std::size_t e = 1; e < 5; ++e) {
    if (!(result.epoch_loss[e] < result.epoch_loss[e - 1])) o.fail("loss rose at epoch " + std::to_string(e + 1));
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 5.0) o.fail("runtime " + fmt_double(elapsed) + " s");
  if (o.pass) {
    o.detail = "8/8 after 200 epochs, loss " + fmt_double(result.epoch_loss.front(), 4) + " -> " +
               fmt_double(result.epoch_loss.back(), 4) + ", " + fmt_double(elapsed) + " s";
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome explanation_rule() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const HashingProvider provider(16);
  for (int i = 0; i < 1000; ++i) {
    RationalePair pair;
    pair.r_true.text = "support " + std::to_string(i);
    pair.r_false.text = "refute " + std::to_string(i);
    pair.y_llm = rng() % 2 ? Stance::True : Stance::False;
    Verdict v;
    if (i % 2 == 0) {
      const double p = u(rng);
      v = make_verdict({p, 1.0 - p}, pair, {});
    } else {
      const auto m = random_judge(rng, 16, 3);
      v = predict(m, Claim{"c", "claim " + std::to_string(i)}, pair, provider, {});
    }
    const Stance argmax = v.p_ver[kTrueLabel] > v.p_ver[kFalseLabel] ? Stance::True : Stance::False;
    if (v.label != argmax) o.fail("label is not the argmax on draw " + std::to_string(i));
    if (v.explanation != (argmax == Stance::True ? pair.r_true.text : pair.r_false.text)) {
      o.fail("explanation mismatch on draw " + std::to_string(i));
    }
  }
  RationalePair pair;
  pair.r_true.text = "t";
  pair.r_false.text = "f";
  const auto tie = make_verdict({0.5, 0.5}, pair, {});
  if (tie.label != Stance::False || tie.explanation != "f") o.fail("tie does not resolve to false");
  if (o.pass) o.detail = "1000 verdicts, tie -> false";
  return o;
}

// ---------------------------------------------------------------------------

std::string jsonl(const RunReport& r) {
  std::ostringstream out;
  write_report_jsonl(out, r);
  return out.str();
}

Outcome end_to_end() {
  Outcome o;
  const auto& w = world();
  const auto rt = test::keyword_runtime();
  RunConfig config;
  config.seed = 0;
  const auto first = run_pipeline(w.claims, config, rt.deps(w));
  const auto second = run_pipeline(w.claims, config, rt.deps(w));
  if (jsonl(first) != jsonl(second)) o.fail("reports differ between runs");

  const auto& s = first.summary;
  if (s.failed != 0) o.fail(std::to_string(s.failed) + " claims failed");
  if (s.accuracy != 17.0 / 20.0) o.fail("accuracy " + fmt_double(s.accuracy, 6) + " != 17/20");
  if (s.evidence.evidence_ratio != 32.0 / 34.0) {
    o.fail("evidence_ratio " + fmt_double(s.evidence.evidence_ratio, 6) + " != 32/34");
  }
  if (s.evidence.claim_ratio != 19.0 / 20.0) o.fail("claim_ratio " + fmt_double(s.evidence.claim_ratio, 6) + " != 19/20");
  if (o.pass) o.detail = "byte-identical reports, accuracy 17/20, evidence 32/34, claims 19/20";
  return o;
}

Outcome ablation_flags() {
  Outcome o;
  const auto& w = world();
  const auto rt = test::keyword_runtime();

  RunConfig no_slm;
  no_slm.flags.slm_judge = false;
  const auto report = run_pipeline(w.claims, no_slm, rt.deps(w));
  for (const auto& r : report.records) {
    const auto& entry = test::transcript_for(w, r.claim.id);
    const Stance recorded = parse_judgment(entry.judgment).value_or(Stance::False);
    if (!r.ok || r.verdict.label != recorded) o.fail("w/o-SLM label differs from y_llm for " + r.claim.id);
  }

  RunConfig gold;
  gold.setting = Setting::Gold;
  const auto before = w.index.query_count();
  const auto gold_report = run_pipeline(w.claims, gold, rt.deps(w));
  const auto touched = w.index.query_count() - before;
  if (touched != 0) o.fail("gold run issued " + std::to_string(touched) + " index queries");
  if (gold_report.summary.failed != 0) o.fail("gold run had failures");
  if (o.pass) o.detail = "w/o-SLM labels = recorded y_llm on 20 claims, gold-run index queries = 0";
  return o;
}

// ---------------------------------------------------------------------------

struct MetricCase {
  std::vector<std::vector<EvidenceRef>> retrieved;
  std::vector<std::vector<EvidenceRef>> gold;
  std::size_t hits;
  std::size_t total;
  std::size_t claims_hit;
  std::size_t claims;
};

Outcome metric_arithmetic() {
  Outcome o;
  const EvidenceRef a0{"a", 0}, a1{"a", 1}, a2{"a", 2}, b0{"b", 0}, b1{"b", 1}, b2{"b", 2}, c0{"c", 0}, c1{"c", 1},
      c2{"c", 2}, d0{"d", 0}, d1{"d", 1}, d2{"d", 2}, d3{"d", 3}, x0{"x", 0};
  const std::vector<MetricCase> cases{
      {{{a1}, {}}, {{a0, a1}, {b0, b1}}, 1, 4, 1, 2},
      {{{a0, a1, x0}, {b1, b0}}, {{a0, a1}, {b0, b1}}, 4, 4, 2, 2},
      {{{a0}, {b0}}, {{}, {}}, 0, 0, 0, 0},
      {{{}, {a0}}, {{a0}, {}}, 0, 1, 0, 1},
      {{{a0}, {x0}}, {{a0}, {}}, 1, 1, 1, 1},
      {{{{"lake morrow", 0}}}, {{{"Lake_Morrow", 0}}}, 1, 1, 1, 1},
      {{{a0, a0, a0}}, {{a0, a1, a2}}, 1, 3, 1, 1},
      {{{a0}}, {{a0, a0, a1}}, 1, 2, 1, 1},
      {{{a0}, {b2}, {d0}}, {{a0}, {b0, b1, b2}, {c0}}, 2, 5, 2, 3},
      {{{a0}, {x0}, {c0, c1, c2}, {d1, d3}}, {{a0}, {b0, b1}, {c0, c1, c2}, {d0, d1, d2, d3}}, 6, 10, 3, 4},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto q = evidence_quality(c.retrieved, c.gold);
    const double er = c.total ? static_cast<double>(c.hits) / static_cast<double>(c.total) : 0.0;
    const double cr = c.claims ? static_cast<double>(c.claims_hit) / static_cast<double>(c.claims) : 0.0;
    if (q.evidence_ratio != er || q.claim_ratio != cr || q.gold_hits != c.hits || q.gold_total != c.total ||
        q.claims != c.claims) {
      o.fail("configuration " + std::to_string(i + 1) + " gives (" + fmt_double(q.evidence_ratio, 6) + ", " +
             fmt_double(q.claim_ratio, 6) + ")");
    }
  }
  if (o.pass) o.detail = std::to_string(cases.size()) + " configurations exact";
  return o;
}

// ---------------------------------------------------------------------------

Outcome data_mixing() {
  Outcome o;
  const auto make_pool = [](char tag, std::size_t n) {
    std::vector<JudgeExample> pool;
    for (std::size_t i = 0; i < n; ++i) pool.push_back(JudgeExample{Claim{tag + std::to_string(i), "c"}, {}, {}});
    return pool;
  };
  const auto open = make_pool('o', 100);
  const auto gold = make_pool('g', 100);
  const std::vector<std::pair<double, double>> grid{{100, 0}, {95, 5}, {90, 10}, {85, 15}, {80, 20}, {75, 25}};
  std::string summary;
  for (const auto& [wo, wg] : grid) {
    const auto mix = mix_training_data(gold, open, MixRatio{wo, wg}, 31);
    const auto again = mix_training_data(gold, open, MixRatio{wo, wg}, 31);
    std::size_t n_gold = 0;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < mix.size(); ++i) {
      n_gold += mix[i].claim.id.front() == 'g';
      ids.insert(mix[i].claim.id);
      if (mix[i].claim.id != again[i].claim.id) o.fail("not deterministic at " + fmt_double(wo) + ":" + fmt_double(wg));
    }
    const double want_gold = static_cast<double>(mix.size()) * wg / (wo + wg);
    const std::string label = fmt_double(wo) + ":" + fmt_double(wg);
    if (std::abs(static_cast<double>(n_gold) - want_gold) > 1.0) {
      o.fail(label + " drew " + std::to_string(n_gold) + " gold of " + std::to_string(mix.size()));
    }
    if (ids.size() != mix.size()) o.fail(label + " repeats an example");
    if (mix.size() != open.size()) o.fail(label + " drew " + std::to_string(mix.size()) + " examples");
    summary += (summary.empty() ? "" : ", ") + label + "=" + std::to_string(mix.size() - n_gold) + "+" +
               std::to_string(n_gold);
  }
  if (o.pass) o.detail = summary;
  return o;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"bm25-oracle-equivalence", bm25_oracle},
      {"evidence-selection-contract", evidence_selection},
      {"judge-math", judge_math},
      {"judge-trainability", trainability},
      {"verdict-explanation-rule", explanation_rule},
      {"end-to-end-determinism", end_to_end},
      {"ablation-flags", ablation_flags},
      {"metric-arithmetic", metric_arithmetic},
      {"data-mixing", data_mixing},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    failures += outcome.pass ? 0 : 1;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str());
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
