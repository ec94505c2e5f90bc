// Copyright 2026 The WACSE Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails. Arguments select criteria by number; none runs
// them all.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alignment.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "objectives.hpp"
#include "oracles.hpp"
#include "run_config.hpp"
#include "test_helpers.hpp"
#include "trainer.hpp"

namespace {

using namespace wacse;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct SmallData {
  std::vector<ParallelPair> pairs;
  Tokenizer tokenizer;
  std::vector<PairExample> examples;

  SmallData(double fertility, uint64_t seed)
      : pairs(Flatten(GenerateCorpus(testing_util::SmallCorpusConfig(0.3, fertility), seed))),
        tokenizer(Tokenizer::Build(pairs, 4)),
        examples(testing_util::MakeExamples(pairs, tokenizer)) {}
};

// ---- 1: loss oracles ----

Outcome LossOracles() {
  const auto start = Clock::now();
  // No fertility keeps both sides at <= 6 words.
  const SmallData d(0.0, 11);
  Encoder enc(testing_util::TinyEncoderConfig(d.tokenizer.vocab_size()), 5);
  Rng rng(17);
  ObjectiveConfig cfg;
  cfg.awp_mode = AwpMode::kExact;
  double worst_tr = 0.0, worst_awp = 0.0, worst_wtr = 0.0;
  size_t max_len = 0;
  const int batches = 120;
  for (int b = 0; b < batches; ++b) {
    const int n = 2 + static_cast<int>(rng.Below(3));
    std::vector<PairExample> batch;
    for (int i = 0; i < n; ++i) batch.push_back(d.examples[rng.Below(d.examples.size())]);
    for (const auto& ex : batch) {
      max_len = std::max({max_len, static_cast<size_t>(ex.src.word_count()),
                          static_cast<size_t>(ex.tgt.word_count())});
    }
    const BatchLosses got = ComputeBatchLoss(enc, batch, cfg).losses;
    oracle::Mat xs, ys;
    for (const auto& ex : batch) {
      xs.push_back(oracle::ToMat(enc.Encode(ex.src).tokens)[0]);
      ys.push_back(oracle::ToMat(enc.Encode(ex.tgt).tokens)[0]);
    }
    worst_tr = std::max(worst_tr, std::abs(got.tr - oracle::TrLoss(xs, ys)));
    worst_awp = std::max(worst_awp, std::abs(got.awp - oracle::AwpLossExact(enc, batch)));
    worst_wtr = std::max(worst_wtr, std::abs(got.wtr - oracle::WtrLoss(enc, batch)));
  }
  const double secs = Seconds(start);
  const bool ok = worst_tr <= 1e-6 && worst_awp <= 1e-6 && worst_wtr <= 1e-6 &&
                  max_len <= 6 && secs < 60.0;
  return {ok, std::to_string(batches) + " batches, N<=4, len<=" + std::to_string(max_len) +
                  ", max |diff| tr=" + Fmt(worst_tr) + " awp=" + Fmt(worst_awp) +
                  " wtr=" + Fmt(worst_wtr) + " (tol 1e-6), " + Fmt(secs) + "s"};
}

// ---- 2: closed forms ----

Outcome ClosedForms() {
  double worst_tr = 0.0;
  for (int n : {2, 3, 4, 16}) {
    const ag::Matrix same = ag::Matrix::Constant(n, 8, 0.37);
    worst_tr = std::max(worst_tr, std::abs(TrLoss(ag::Constant(same), ag::Constant(same)).scalar() -
                                           std::log(static_cast<double>(n))));
  }

  // Single-word targets: only the X->Y direction is kept.
  const Tokenizer tok({"l0_a", "l0_b", "l0_c", "l1_x", "l1_y"}, 8);
  std::vector<PairExample> batch;
  const std::vector<std::vector<std::string>> sources = {{"l0_a", "l0_b"}, {"l0_c"}, {"l0_b", "l0_c", "l0_a"}};
  const std::vector<std::string> targets = {"l1_x", "l1_y", "l1_x"};
  for (size_t i = 0; i < sources.size(); ++i) {
    ParallelPair p;
    p.src = {0, sources[i]};
    p.tgt = {1, {targets[i]}};
    for (int j = 0; j < static_cast<int>(sources[i].size()); ++j) p.gold_links.push_back({j, 0, 1.0});
    PairExample ex = MakeExample(p, WordAlign(p, GoldProvider{}), tok, 8);
    ex.backward.links.clear();
    batch.push_back(std::move(ex));
  }
  const Encoder enc(testing_util::TinyEncoderConfig(tok.vocab_size()), 3);
  std::vector<Tokenized> inputs;
  for (const auto& ex : batch) inputs.push_back(ex.src);
  for (const auto& ex : batch) inputs.push_back(ex.tgt);
  const auto out = enc.Forward(inputs);
  const std::vector<int> so(out.offsets.begin(), out.offsets.begin() + 3);
  const std::vector<int> to(out.offsets.begin() + 3, out.offsets.end());
  const double wtr = WtrLoss(out.hidden, batch, so, to).scalar();

  // Zero output embeddings and bias give uniform logits.
  const SmallData d(0.2, 4);
  Encoder zero(testing_util::TinyEncoderConfig(d.tokenizer.vocab_size()), 8);
  zero.parameter("embeddings.token").mutable_value().setZero();
  zero.parameter("mlm.bias").mutable_value().setZero();
  const std::vector<PairExample> awp_batch(d.examples.begin(), d.examples.begin() + 4);
  int predicted = 0;
  for (const auto& ex : awp_batch) {
    for (const auto& m : BuildAwpInputs(ex, AwpMode::kExact)) predicted += static_cast<int>(m.targets.size());
  }
  const double per_token =
      AwpLoss(zero, awp_batch, AwpMode::kExact).scalar() * 2.0 * 4.0 / predicted;
  const double awp_diff = std::abs(per_token - std::log(d.tokenizer.vocab_size()));

  const bool ok = worst_tr <= 1e-6 && std::abs(wtr) <= 1e-6 && awp_diff <= 1e-3;
  return {ok, "TR-ln N max diff " + Fmt(worst_tr) + ", single-word WTR " + Fmt(wtr) +
                  ", AWP per token - ln V " + Fmt(awp_diff) + " (V=" +
                  std::to_string(d.tokenizer.vocab_size()) + ")"};
}

// ---- 3: gradients ----

Outcome Gradients() {
  const auto start = Clock::now();
  const SmallData d(0.3, 6);
  EncoderConfig ec = testing_util::TinyEncoderConfig(d.tokenizer.vocab_size(), true);
  Encoder enc(ec, 21);
  const std::vector<PairExample> batch(d.examples.begin() + 3, d.examples.begin() + 6);
  ObjectiveConfig cfg;
  cfg.awp_mode = AwpMode::kExact;
  enc.ZeroGrad();
  ag::Backward(ComputeBatchLoss(enc, batch, cfg).total);
  auto loss = [&] {
    ag::NoGradGuard no_grad;
    return ComputeBatchLoss(enc, batch, cfg, false).total.scalar();
  };
  double worst = 0.0;
  std::string worst_name;
  int tensors = 0, zero_tensors = 0;
  bool ok = true;
  for (const auto& p : enc.parameters()) {
    ag::Var& v = enc.parameter(p.name);
    const ag::Matrix analytic = v.grad();
    const ag::Matrix numeric = testing_util::NumericGrad(loss, v);
    ++tensors;
    if (analytic.norm() < 1e-12) {
      // The attention key bias cancels inside the softmax.
      ++zero_tensors;
      ok = ok && numeric.norm() < 1e-7;
      continue;
    }
    const double err = testing_util::RelativeError(analytic, numeric);
    if (err > worst) {
      worst = err;
      worst_name = p.name;
    }
  }
  const double secs = Seconds(start);
  ok = ok && worst < 1e-4 && secs < 300.0;
  return {ok, std::to_string(tensors) + " tensors (dim 8, 2 layers), max relative error " +
                  Fmt(worst) + " at " + worst_name + ", " + std::to_string(zero_tensors) +
                  " exactly-zero gradients confirmed numerically, " + Fmt(secs) + "s"};
}

// ---- 4: IBM Model 1 ----

Outcome AlignmentRecovery() {
  CorpusConfig c;
  c.languages = {{1, 60, 500}};
  const auto pairs = Flatten(GenerateCorpus(c, 8));
  const Ibm1Model fwd = TrainIbm1(pairs, 20);
  const Ibm1Model bwd = TrainIbm1(pairs, 20, true);
  bool monotone = fwd.log_likelihood.size() == 20;
  for (const auto* m : {&fwd, &bwd}) {
    for (size_t i = 1; i < m->log_likelihood.size(); ++i) {
      monotone = monotone && m->log_likelihood[i] >= m->log_likelihood[i - 1];
    }
  }
  const Ibm1Provider provider{fwd.table, bwd.table};
  size_t gold = 0, hit = 0;
  for (const auto& p : pairs) {
    const auto dicts = WordAlign(p, provider, kDefaultAlignmentThreshold);
    for (const auto& l : p.gold_links) {
      ++gold;
      const auto t = dicts.forward.Lookup(l.src);
      hit += t && t->index == l.tgt;
    }
  }
  const double recovery = static_cast<double>(hit) / static_cast<double>(gold);
  return {recovery >= 0.95 && monotone,
          "500 pairs, 20 iterations, recovered " + std::to_string(hit) + "/" +
              std::to_string(gold) + " = " + Fmt(recovery) +
              " after threshold 0.9, log-likelihood non-decreasing: " +
              (monotone ? "yes" : "no")};
}

// ---- 5 and 6: desk ablation ----

struct DeskRun {
  double low_retrieval = 0.0;
  double low_cosine = 0.0;
  double seconds = 0.0;
};

struct DeskResults {
  bool ran = false;
  std::string error;
  LangPair low{};
  double low_share = 0.0;
  std::vector<DeskRun> tr, wacse;
  double total_seconds = 0.0;
};

DeskResults& Desk() {
  static DeskResults results;
  if (results.ran) return results;
  results.ran = true;
  try {
    const auto start = Clock::now();
    const RunConfig rc = LoadRunConfig(WACSE_SOURCE_DIR "/configs/desk.json");
    const auto split = SplitCorpus(Flatten(GenerateCorpus(rc.corpus, rc.corpus_seed)),
                                   rc.dev_fraction);
    const Corpus train = GroupByLanguagePair(split.train);
    const Corpus dev = GroupByLanguagePair(split.dev);
    size_t total = 0, fewest = SIZE_MAX;
    for (const auto& [langs, pairs] : train) {
      total += pairs.size();
      if (pairs.size() < fewest) {
        fewest = pairs.size();
        results.low = langs;
      }
    }
    results.low_share = static_cast<double>(fewest) / static_cast<double>(total);
    const AlignmentProvider provider = MakeProvider(rc, split.train);
    for (uint64_t seed : {42u, 0u}) {
      for (bool full : {false, true}) {
        const auto run_start = Clock::now();
        TrainConfig tc = rc.train;
        tc.seed = seed;
        tc.weights = full ? LossWeights{0.8, 0.1, 0.1} : LossWeights{1.0, 0.0, 0.0};
        const TrainResult r = Train(tc, rc.encoder, rc.split_chars, train, dev, provider);
        EvalOptions eo = rc.eval;
        eo.sts = false;
        const EvalReport report = Evaluate(r.model, dev, eo);
        DeskRun run{report.retrieval.at(results.low).mean,
                    report.aligned_cosine_by_pair.at(results.low).mean, Seconds(run_start)};
        (full ? results.wacse : results.tr).push_back(run);
        std::cout << "  desk seed=" << seed << (full ? " WACSE" : " TR-only")
                  << " best_step=" << r.best_step << " low retrieval=" << Fmt(run.low_retrieval)
                  << " low aligned cosine=" << Fmt(run.low_cosine) << " " << Fmt(run.seconds)
                  << "s" << std::endl;
      }
    }
    results.total_seconds = Seconds(start);
  } catch (const std::exception& e) {
    results.error = e.what();
  }
  return results;
}

double Mean(const std::vector<DeskRun>& runs, double DeskRun::*field) {
  double s = 0.0;
  for (const auto& r : runs) s += r.*field;
  return s / static_cast<double>(runs.size());
}

Outcome AblationDirection() {
  const DeskResults& d = Desk();
  if (!d.error.empty()) return {false, "desk run failed: " + d.error};
  const double tr = Mean(d.tr, &DeskRun::low_retrieval);
  const double wa = Mean(d.wacse, &DeskRun::low_retrieval);
  const bool ok = wa - tr >= 0.01 && d.low_share <= 0.05 && d.total_seconds < 1800.0;
  return {ok, "low-resource pair " + std::to_string(d.low.first) + "-" +
                  std::to_string(d.low.second) + " (" + Fmt(100.0 * d.low_share) +
                  "% of training pairs), mean dev retrieval over seeds 42,0: WACSE " +
                  Fmt(wa) + " vs TR-only " + Fmt(tr) + " (diff " + Fmt(wa - tr) +
                  ", need >= 0.01), 4 runs in " + Fmt(d.total_seconds) + "s"};
}

Outcome AlignedCosine() {
  const DeskResults& d = Desk();
  if (!d.error.empty()) return {false, "desk run failed: " + d.error};
  const double tr = Mean(d.tr, &DeskRun::low_cosine);
  const double wa = Mean(d.wacse, &DeskRun::low_cosine);
  bool each = true;
  for (size_t i = 0; i < d.tr.size(); ++i) each = each && d.wacse[i].low_cosine > d.tr[i].low_cosine;
  return {wa > tr, "low-resource aligned word cosine, mean over seeds: WACSE " + Fmt(wa) +
                       " vs TR-only " + Fmt(tr) + "; higher for every seed: " +
                       (each ? "yes" : "no")};
}

// ---- 7: metric oracles ----

Outcome MetricOracles() {
  Rng rng(31);
  int checks = 0;
  int retrieval_bad = 0, cand_bad = 0, sweep_bad = 0;
  double worst_rho = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.Below(48));
    const ag::Matrix x = testing_util::RandomMatrix(rng, n, 6);
    const ag::Matrix y = x + testing_util::RandomMatrix(rng, n, 6);
    const RetrievalResult got = RetrievalAccuracy(x, y);
    const oracle::Retrieval want = oracle::RetrievalAccuracy(oracle::ToMat(x), oracle::ToMat(y));
    retrieval_bad += !(got.forward == want.forward && got.backward == want.backward);

    // Mining: b's first half are noisy copies of a's rows offset by n/4.
    ag::Matrix b = testing_util::RandomMatrix(rng, n, 6);
    IndexPairs gold;
    const int shared = std::max(2, n / 2), offset = n - shared;
    for (int i = 0; i < shared; ++i) {
      b.row(i) = x.row(offset + i) + 0.8 * testing_util::RandomMatrix(rng, 1, 6);
      gold.insert({offset + i, i});
    }
    const auto cands = ScoreCandidates(x, b, 4, MiningMode::kMargin);
    const auto ocands = oracle::Candidates(oracle::Margin(oracle::ToMat(x), oracle::ToMat(b), 4));
    std::set<std::pair<int, int>> got_set, want_set;
    for (const auto& c : cands) got_set.insert({c.a, c.b});
    for (const auto& c : ocands) want_set.insert({c.a, c.b});
    cand_bad += got_set != want_set;
    const ThresholdChoice choice = BestThreshold(cands, gold);
    const oracle::Sweep sweep = oracle::ThresholdSweep(ocands, gold);
    sweep_bad += !(choice.prf.precision == sweep.prf.p && choice.prf.recall == sweep.prf.r &&
                   choice.prf.f1 == sweep.prf.f);

    std::vector<double> s(n), t(n);
    for (int i = 0; i < n; ++i) {
      s[i] = std::round(rng.Normal() * 2.0);
      t[i] = s[i] + rng.Normal();
    }
    try {
      worst_rho = std::max(worst_rho, std::abs(SpearmanRho(s, t) - oracle::Spearman(s, t)));
    } catch (const Error&) {
      // constant input; the oracle is undefined there too
    }
    ++checks;
  }
  std::vector<double> up = {0.1, 0.5, 2.0, 7.0, 30.0}, mono = {1, 2, 3, 4, 5};
  const double rho_mono = SpearmanRho(up, mono);
  const bool ok = retrieval_bad == 0 && cand_bad == 0 && sweep_bad == 0 &&
                  worst_rho <= 1e-9 && rho_mono == 1.0;
  return {ok, std::to_string(checks) + " random inputs of size 3..50: mismatches retrieval " +
                  std::to_string(retrieval_bad) + ", candidates " + std::to_string(cand_bad) +
                  ", threshold sweep " + std::to_string(sweep_bad) +
                  ", max |rho diff| " + Fmt(worst_rho) +
                  ", monotone pair rho = " + Fmt(rho_mono)};
}

// ---- 8: determinism ----

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Determinism() {
  testing_util::TempDir dir;
  const std::string base = std::string(WACSE_CLI) + " train --quiet --config " +
                           WACSE_SOURCE_DIR "/configs/smoke.json --seed 7 --out ";
  const std::string a = (dir.path() / "a").string(), b = (dir.path() / "b").string();
  if (std::system((base + a).c_str()) != 0 || std::system((base + b).c_str()) != 0) {
    return {false, "cli train failed"};
  }
  const std::string la = Slurp(a + "/metrics.tsv"), lb = Slurp(b + "/metrics.tsv");
  const bool same = !la.empty() && la == lb;
  return {same, "two `wacse train` runs, " + std::to_string(la.size()) +
                    " bytes of metrics.tsv, byte-identical: " + (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"loss oracles", LossOracles},
      {"closed forms", ClosedForms},
      {"gradient check", Gradients},
      {"IBM Model 1 recovery", AlignmentRecovery},
      {"ablation direction", AblationDirection},
      {"aligned word cosine", AlignedCosine},
      {"metric oracles", MetricOracles},
      {"determinism", Determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " ("
              << criteria[i].first << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
