// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check recomputes its expectation independently of the
// library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "phishbowl/bowl_analyzer.hpp"
#include "phishbowl/email_model.hpp"
#include "phishbowl/ensemble.hpp"
#include "phishbowl/errors.hpp"
#include "phishbowl/eval.hpp"
#include "phishbowl/ocr_extract.hpp"
#include "phishbowl/phish_bowl.hpp"
#include "phishbowl/platform.hpp"
#include "phishbowl/service.hpp"
#include "phishbowl/trends.hpp"

using namespace phishbowl;
using json = nlohmann::json;

namespace {

// Collects the first few mismatches of a criterion.
class Failures {
 public:
  template <typename... Parts>
  void add(const Parts&... parts) {
    ++count_;
    if (count_ > 3) return;
    std::ostringstream ss;
    (ss << ... << parts);
    if (!text_.empty()) text_ += "; ";
    text_ += ss.str();
  }
  void require(bool ok, const std::string& what) {
    if (!ok) add(what);
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    return count_ > 3 ? text_ + " (+" + std::to_string(count_ - 3) + " more)" : text_;
  }

 private:
  int count_ = 0;
  std::string text_;
};

struct Criterion {
  const char* name;
  double limit_seconds;  // 0: untimed
  std::function<void(Failures&)> run;
};

// ---------------------------------------------------------------- metrics

void check_metrics(Failures& f) {
  auto row = [&](ConfusionCounts c, const char* acc, const char* prec, const char* rec) {
    const auto m = metrics(c);
    const std::string got[] = {format_percent(m.accuracy), format_percent(m.precision),
                               format_percent(m.recall)};
    const std::string want[] = {acc, prec, rec};
    for (int i = 0; i < 3; ++i) {
      if (got[i] != want[i]) f.add("(", c.tp, ",", c.fp, ",", c.tn, ",", c.fn, ") gave ", got[i],
                                   " for ", want[i]);
    }
  };
  row({1991, 8, 2040, 57}, "98.41%", "99.60%", "97.22%");
  row({2048, 2048, 0, 0}, "50.00%", "50.00%", "100.00%");
}

// ---------------------------------------------------------------- weights

void check_weights(Failures& f) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> k_dist(1, 12);
  std::uniform_real_distribution<double> d_dist(0.0, 4.0);
  std::bernoulli_distribution coin(0.5), sometimes_zero(0.1);
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = k_dist(rng);
    std::vector<double> d(k);
    std::vector<Label> labels(k);
    for (int i = 0; i < k; ++i) {
      d[i] = sometimes_zero(rng) ? 0.0 : d_dist(rng);
      labels[i] = coin(rng) ? Label::Phishing : Label::Benign;
    }
    const auto w = reciprocal_weights(d, 1e-8);
    if (w.size() != d.size()) {
      f.add("trial ", trial, ": ", w.size(), " weights for ", d.size(), " distances");
      continue;
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) f.add("trial ", trial, ": weights sum to ", sum);
    const double l_raw = weighted_label(w, labels);
    if (!(l_raw >= 0.0 && l_raw <= 1.0)) f.add("trial ", trial, ": l_raw ", l_raw);

    // Independent evaluation of the weight formula.
    double norm = 0.0;
    for (double di : d) norm += 1.0 / (di + 1e-8);
    for (int i = 0; i < k; ++i) {
      const double expect = (1.0 / (d[i] + 1e-8)) / norm;
      if (std::abs(w[i] - expect) > 1e-12) f.add("trial ", trial, ": w", i, " = ", w[i]);
    }
  }

  // A single exact duplicate among ordinary neighbors.
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = k_dist(rng);
    std::vector<double> d(k);
    // Distinct emails sit at least 0.25 apart; much closer neighbors would
    // legitimately share more than 1e-6 of the weight.
    for (auto& di : d) di = 0.25 + d_dist(rng);
    const int dup = static_cast<int>(rng() % k);
    d[dup] = 0.0;
    const auto w = reciprocal_weights(d, 1e-8);
    if (w[dup] < 1 - 1e-6) f.add("duplicate weight ", w[dup], " with k=", k);
  }
}

// ---------------------------------------------------------------- decay

void check_decay(Failures& f) {
  f.require(distance_confidence(0.0, 0.5) == 1.0, "l_conf(0) is not exactly 1");
  f.require(distance_confidence(0.0, 1.0) == 1.0, "l_conf(0) at lambda 1 is not exactly 1");
  const double e1 = distance_confidence(2.0, 0.5);
  if (std::abs(e1 - std::exp(-1.0)) > 1e-12) f.add("lambda 0.5, d0 2 gave ", e1);
  for (double lambda : {0.1, 0.5, 1.0, 2.0}) {
    double prev = distance_confidence(0.0, lambda);
    for (int i = 1; i <= 400; ++i) {
      const double d0 = i * 0.05;
      const double c = distance_confidence(d0, lambda);
      if (!(c < prev)) f.add("not decreasing at lambda ", lambda, ", d0 ", d0);
      if (c <= 0.0) f.add("non-positive confidence at d0 ", d0);
      prev = c;
    }
  }
}

// ---------------------------------------------------------------- ensemble

void check_ensemble(Failures& f) {
  auto near = [&](double got, double want, const char* what) {
    if (std::abs(got - want) > 1e-12) f.add(what, " gave ", got, " not ", want);
  };
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double raw = u(rng), gpt = u(rng);
    near(combine(raw, 0.0, gpt).l_ensemble, gpt, "c = 0");
  }
  near(combine(1, 1, 1).l_ensemble, 1.0, "(1,1,1)");
  near(combine(1, 1, 0).l_ensemble, 0.8, "(1,1,0)");

  for (int i = 0; i < 10000; ++i) {
    const double raw = u(rng), conf = u(rng), gpt = u(rng);
    const double l = combine(raw, conf, gpt).l_ensemble;
    if (!(l >= 0.0 && l <= 1.0)) f.add("(", raw, ",", conf, ",", gpt, ") left the unit range: ", l);
    const double w = 0.8 * std::sqrt(conf);
    near(l, raw * conf * w + gpt * (1 - w), "random triple");
  }
}

// ---------------------------------------------------------------- k-NN

void check_knn(Failures& f) {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> n_dist(1, 1000);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::bernoulli_distribution repeat(0.05);
  constexpr std::size_t kDim = 256, kK = 12;
  for (int store = 0; store < 100; ++store) {
    PhishBowl bowl(kDim);
    const std::size_t n = n_dist(rng);
    std::vector<std::vector<double>> vectors;
    std::vector<std::string> ids;
    std::vector<BowlRecord> batch;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(kDim);
      // Occasional repeats exercise tie-breaking.
      if (!vectors.empty() && repeat(rng)) {
        v = vectors[rng() % vectors.size()];
      } else {
        for (auto& x : v) x = coord(rng);
      }
      vectors.push_back(v);
      BowlRecord r;
      r.text = "record " + std::to_string(i);
      r.label = (i % 2) ? Label::Phishing : Label::Benign;
      r.vector = v;
      ids.push_back(bowl.add_record(std::move(r)));
    }
    for (int q = 0; q < 3; ++q) {
      std::vector<double> query(kDim);
      if (q == 0) {
        query = vectors[rng() % n];
      } else {
        for (auto& x : query) x = coord(rng);
      }
      std::vector<std::pair<double, std::size_t>> scan;
      for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < kDim; ++j) {
          const double diff = vectors[i][j] - query[j];
          d += diff * diff;
        }
        scan.emplace_back(d, i);
      }
      std::sort(scan.begin(), scan.end());
      scan.resize(std::min(kK, n));

      const auto got = bowl.nearest(query, kK);
      if (got.size() != scan.size()) {
        f.add("store ", store, ": ", got.size(), " neighbors, expected ", scan.size());
        continue;
      }
      for (std::size_t i = 0; i < scan.size(); ++i) {
        if (got[i].id != ids[scan[i].second] || got[i].distance != scan[i].first) {
          f.add("store ", store, " query ", q, " rank ", i, ": ", got[i].id, "@", got[i].distance,
                " vs ", ids[scan[i].second], "@", scan[i].first);
          break;
        }
      }
    }
  }
}

// ---------------------------------------------------------------- phish-only

void check_phish_only(Failures& f) {
  ExperimentSpec spec;
  spec.corpus = synthetic_corpus();
  spec.balance = Balance::PhishOnly;
  spec.train_size = 1000;
  spec.test_size = 200;
  spec.lambda = std::nullopt;
  const auto off = run_experiment(spec);
  f.require(off.bowl_size == 1000, "bowl is not the requested size");
  f.require(off.counts.total() == 200, "test split is not 200 emails");
  if (off.counts.tn != 0 || off.counts.fn != 0) {
    f.add("decay off predicted ", off.counts.tn + off.counts.fn, " negatives");
  }
  f.require(off.counts.tp == 100 && off.counts.fp == 100, "test split is not balanced");

  spec.lambda = 1.0;
  const auto on = run_experiment(spec);
  if (on.counts.tn + on.counts.fn == 0) f.add("lambda 1.0 predicted no negatives");
}

// ---------------------------------------------------------------- trends

void check_trend_calibration(Failures& f) {
  constexpr std::int64_t kDay = 86'400'000;
  struct Case {
    double p, k;
    int days;
  };
  auto calibrated = [](double p, double k, int days) {
    double s = 0.0;
    for (int i = 0; i < days; ++i) s += p * std::pow(k, i);
    return s;
  };
  for (const Case c : {Case{20, 0.5, 3}, Case{10, 0.8, 5}, Case{25, 0.3, 2}}) {
    const double t = calibrate_threshold(c.p, c.k, c.days);
    if (std::abs(t - calibrated(c.p, c.k, c.days)) > 1e-9) f.add("calibrate gave ", t);
    if (c.p == 20 && std::abs(t - 35.0) > 1e-9) f.add("(20, 0.5, 3) calibrated to ", t);

    TrendConfig cfg;
    cfg.k_alert = c.k;
    cfg.t_alert = t;
    TrendTracker tracker(cfg);
    const Vector campaign{1, 0}, background{0, 1};
    const int daily = 100;
    std::int64_t day = 0;
    for (; day < cfg.daily_window_days; ++day) {
      for (int i = 0; i < daily; ++i) {
        tracker.add_observation({background, 0.0, from_millis(day * kDay), "", "warm-up"});
      }
    }
    const int phish = static_cast<int>(c.p * daily / 100);
    int alerts = 0, alert_day = -1;
    double score = 0.0;
    for (int d = 1; d <= c.days; ++d, ++day) {
      for (int i = 0; i < daily; ++i) {
        const bool in_campaign = i < phish;
        const auto r = tracker.add_observation({in_campaign ? campaign : background,
                                                in_campaign ? 1.0 : 0.0,
                                                from_millis(day * kDay), "", "mail"});
        if (in_campaign) score = r.score;
        if (r.alert) {
          ++alerts;
          alert_day = d;
        }
      }
    }
    if (std::abs(score - t) > 1e-9) f.add("(", c.p, ",", c.k, ",", c.days, ") reached ", score);
    if (alerts != 1 || alert_day != c.days) {
      f.add("(", c.p, ",", c.k, ",", c.days, ") fired ", alerts, " alerts, last on day ",
            alert_day);
    }
  }
}

// ---------------------------------------------------------------- service

void check_lazy_learning(Failures& f) {
  auto platform = Platform::from_config(PlatformConfig{});
  httplib::Server server;
  register_routes(server, *platform);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);
  const json email{{"sender", "Security Team <security@micros0ft-support.example>"},
                   {"subject", "Unusual sign-in activity"},
                   {"body", "We detected a sign-in from an unknown device. Confirm your "
                            "password at the link below or your mailbox will be suspended."}};

  auto post = [&](const char* path) -> json {
    auto res = client.Post(path, email.dump(), "application/json");
    if (!res) {
      f.add(path, ": no response");
      return {};
    }
    if (res->status != 200) f.add(path, ": status ", res->status, " ", res->body);
    return json::parse(res->body, nullptr, false);
  };

  const json cold = post("/api/classify");
  if (cold.is_object()) {
    f.require(cold["classification"]["mode"] == "gpt_only", "empty bowl did not fall back");
  }
  const json submitted = post("/api/submit");
  const json warm = post("/api/classify");
  if (submitted.is_object() && warm.is_object() && warm["bowl"].is_object()) {
    const auto& bowl = warm["bowl"];
    if (bowl["d0"] != 0.0) f.add("d0 = ", bowl["d0"].dump());
    if (bowl["l_conf"] != 1.0) f.add("l_conf = ", bowl["l_conf"].dump());
    f.require(bowl["neighbors"][0]["id"] == submitted["id"], "nearest is not the submission");
    f.require(warm["classification"]["mode"] == "ensemble", "bowl was not consulted");
  } else {
    f.add("no bowl score after submit");
  }
  f.require(platform->bowl().size() == 1, "classification changed the bowl");

  server.stop();
  thread.join();
}

// ---------------------------------------------------------------- OCR

class WordTable {
 public:
  WordTable() {
    tsv_ = "level\tpage_num\tblock_num\tpar_num\tline_num\tword_num\tleft\ttop\twidth\theight\tconf\ttext\n";
  }
  WordTable& line(int top, int height, const std::string& text) {
    ++line_;
    std::istringstream words(text);
    int n = 0, left = 10;
    for (std::string w; words >> w;) {
      const int width = static_cast<int>(w.size()) * height / 2;
      char row[256];
      std::snprintf(row, sizeof row, "5\t1\t1\t1\t%d\t%d\t%d\t%d\t%d\t%d\t96\t", line_, ++n, left,
                    top, width, height);
      tsv_ += row + w + "\n";
      left += width + 5;
    }
    return *this;
  }
  const std::string& tsv() const { return tsv_; }

 private:
  std::string tsv_;
  int line_ = 0;
};

void expect_email(Failures& f, const char* fixture, const WordTable& t,
                  const std::optional<std::string>& sender,
                  const std::optional<std::string>& subject, const std::string& body) {
  const auto e = extract_email(parse_word_table(t.tsv()));
  auto show = [](const std::optional<std::string>& s) { return s ? "'" + *s + "'" : "none"; };
  if (e.sender != sender) f.add(fixture, ": sender ", show(e.sender));
  if (e.subject != subject) f.add(fixture, ": subject ", show(e.subject));
  if (e.body != body) f.add(fixture, ": body '", e.body, "'");
}

void check_ocr(Failures& f) {
  WordTable cutoff;
  int top = 0;
  for (const char* h : {"From: billing@pay.example", "To: you@home.example", "Sender: billing",
                        "Subject: Account notice", "From: relay one", "To: relay two",
                        "From: relay three", "To: relay four", "From: relay five",
                        "Sender: relay six"}) {
    cutoff.line(top += 30, 20, h);
  }
  cutoff.line(top += 30, 20, "Dear customer,").line(top += 30, 20, "your invoice is overdue.");
  expect_email(f, "header cutoff", cutoff, "billing@pay.example", "Account notice",
               "Dear customer,\nyour invoice is overdue.");

  WordTable greeting;
  greeting.line(10, 20, "From: alice@corp.example")
      .line(40, 26, "Quarterly numbers")
      .line(80, 20, "Hi team,")
      .line(110, 20, "please review the attached sheet.")
      .line(140, 20, "Thanks Alice");
  expect_email(f, "greeting", greeting, "alice@corp.example", "Quarterly numbers",
               "Hi team,\nplease review the attached sheet.\nThanks Alice");

  WordTable logo;
  logo.line(0, 60, "PAYPAL")
      .line(80, 28, "Your account is limited")
      .line(120, 20, "support@paypa1-secure.example")
      .line(150, 20, "Hello user,")
      .line(180, 20, "we noticed unusual activity.")
      .line(210, 20, "Verify now at the link below.")
      .line(240, 20, "Regards");
  expect_email(f, "height and logo", logo, "support@paypa1-secure.example",
               "Your account is limited",
               "Hello user,\nwe noticed unusual activity.\nVerify now at the link below.\nRegards");
}

// ---------------------------------------------------------------- truncation

void check_truncation(Failures& f) {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> body_len(1, 4000), meta_len(1, 150), limit_dist(8, 1200);
  std::uniform_int_distribution<int> letter('a', 'z');
  std::bernoulli_distribution coin(0.5);
  const char* wide[] = {"é", "ß", "€", "中", "😀"};
  auto text = [&](int n) {
    std::string s = "x";
    for (int i = 1; i < n; ++i) {
      const auto r = rng() % 20;
      if (r == 0) s += ' ';
      else if (r == 1) s += wide[rng() % 5];
      else s += static_cast<char>(letter(rng));
    }
    return s;
  };
  // Scalar count and the token estimate, computed without the library.
  auto tokens = [](const std::string& s) {
    std::size_t scalars = 0;
    for (unsigned char c : s) scalars += (c & 0xC0) != 0x80;
    return (scalars * 2815 + 9999) / 10000;
  };
  auto ends_with = [](const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
  };

  for (int trial = 0; trial < 1000; ++trial) {
    LabeledEmail e;
    e.content.body = text(body_len(rng));
    if (coin(rng)) e.label = coin(rng) ? Label::Phishing : Label::Benign;
    if (coin(rng)) e.content.sender = text(meta_len(rng));
    if (coin(rng)) e.content.subject = text(meta_len(rng));
    const int limit = limit_dist(rng);

    const std::string label_line = !e.label                      ? "This is a email:\n"
                                   : *e.label == Label::Phishing ? "This is a phishing email:\n"
                                                                 : "This is a benign email:\n";
    const std::string sender_line = e.content.sender ? "From: " + *e.content.sender + "\n" : "";
    const std::string subject_line = e.content.subject ? "To: " + *e.content.subject + "\n" : "";
    const std::string full = label_line + sender_line + subject_line + e.content.body;

    for (auto strategy : {Truncation::NoTruncation, Truncation::End, Truncation::Content,
                          Truncation::ContentEnd}) {
      ConverterConfig cfg;
      cfg.strategy = strategy;
      cfg.token_limit = limit;
      std::string out;
      try {
        out = email_to_text(e, cfg);
      } catch (const TokenLimitError&) {
        if (strategy != Truncation::Content || tokens(e.content.body) <= std::size_t(limit)) {
          f.add("trial ", trial, " ", to_string(strategy), ": refused at limit ", limit);
        }
        continue;
      }
      if (strategy == Truncation::NoTruncation) {
        if (out != full) f.add("trial ", trial, ": none altered the text");
        continue;
      }
      if (tokens(out) > std::size_t(limit)) {
        f.add("trial ", trial, " ", to_string(strategy), ": ", tokens(out), " tokens > ", limit);
      }
      if (strategy == Truncation::End) {
        if (full.compare(0, out.size(), out) != 0) f.add("trial ", trial, ": end is not a prefix");
        continue;
      }
      // Priority: body > label > sender > subject. A part may only appear
      // when every higher-priority part is present in full.
      const bool body_whole = ends_with(out, e.content.body);
      const bool has_label = out.rfind(label_line, 0) == 0;
      const bool has_sender = !sender_line.empty() && out.find(sender_line) != std::string::npos;
      const bool has_subject = !subject_line.empty() && out.find(subject_line) != std::string::npos;
      bool ok = true;
      if (strategy == Truncation::Content) ok = ok && body_whole;
      if (has_label && strategy == Truncation::Content) ok = ok && body_whole;
      if (has_sender) ok = ok && has_label && body_whole;
      if (has_subject) ok = ok && has_label && body_whole && (sender_line.empty() || has_sender);
      if (!body_whole && strategy == Truncation::ContentEnd) {
        // The body was cut, so nothing below the label may survive.
        ok = ok && !has_sender && !has_subject;
      }
      if (!ok) f.add("trial ", trial, " ", to_string(strategy), ": priority order violated");
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metrics on the reference confusion counts", 1.0, check_metrics},
      {"neighbor weights over 10,000 random sets", 10.0, check_weights},
      {"confidence decay", 0.0, check_decay},
      {"ensemble identities and range", 0.0, check_ensemble},
      {"exact k-NN matches brute force on 100 stores", 30.0, check_knn},
      {"phish-only bowl degeneracy", 0.0, check_phish_only},
      {"trend threshold calibration", 0.0, check_trend_calibration},
      {"lazy learning through the service", 0.0, check_lazy_learning},
      {"OCR extraction fixtures", 0.0, check_ocr},
      {"truncation over 1,000 random emails", 0.0, check_truncation},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Failures f;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(f);
    } catch (const std::exception& e) {
      f.add("threw: ", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
      f.add("took ", seconds, " s, limit ", c.limit_seconds, " s");
    }
    std::printf("%s  %-48s %8.3f s%s%s\n", f.ok() ? "PASS" : "FAIL", c.name, seconds,
                f.ok() ? "" : "  ", f.summary().c_str());
    failed += !f.ok();
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
