#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "critball/asympt.hpp"
#include "critball/bubble/lemmas.hpp"
#include "critball/cli/table.hpp"
#include "critball/greenfn.hpp"
#include "critball/io/config.hpp"
#include "critball/io/records.hpp"
#include "critball/solver.hpp"

namespace critball::cli {

using io::json;

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_numerical = 2, exit_verification = 3 };

struct Options {
  std::string config;    // config path; empty means the built-in defaults
  std::string out;       // records path for sweep, output stem for reports, JSON path for solve
  std::string records;   // records input for verify/report; defaults to the config's output path
  std::optional<double> eps;
  bool resume = false;
  unsigned workers = 1;
  std::vector<std::string> overrides;  // KEY=VAL
  std::string format = "text";         // stdout: text or json
};

namespace detail {

inline io::RunConfig load(const Options& o) {
  io::RunConfig c = o.config.empty() ? io::RunConfig{} : io::load_config(o.config);
  for (const auto& kv : o.overrides) io::apply_override(c, kv);
  return c;
}

inline std::string stem(std::string s) {
  for (const char* ext : {".json", ".csv", ".txt"}) {
    const std::string e = ext;
    if (s.size() > e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) return s.substr(0, s.size() - e.size());
  }
  return s;
}

inline void write_file(const std::string& path, const std::string& content) {
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ValidationError("--out", "cannot write '" + path + "'");
  f << content;
}

/// Writes stem.json, stem.csv and stem.txt.
inline void write_report(const std::string& stem_path, const json& j, const Table& t) {
  const auto s = stem(stem_path);
  write_file(s + ".json", j.dump(2) + "\n");
  write_file(s + ".csv", t.csv());
  write_file(s + ".txt", t.text());
}

inline void show(const Options& o, std::ostream& out, const json& j, const Table& t) {
  if (o.format == "json")
    out << j.dump(2) << "\n";
  else
    out << t.text();
}

inline json to_json(const asympt::LawEntry& e) {
  return {{"name", e.name},     {"value", e.value}, {"target", e.infinite ? json("inf") : json(e.target)},
          {"error", e.error},   {"slope", e.slope}, {"residual", e.residual},
          {"infinite", e.infinite}, {"poor_fit", e.poor_fit}, {"pass", e.pass}, {"verdict", e.verdict}};
}

inline json to_json(const asympt::TrendEntry& e) {
  return {{"name", e.name}, {"values", e.values}, {"statistic", e.statistic}, {"pass", e.pass}, {"verdict", e.verdict}};
}

}  // namespace detail

// ------------------------------------------------------------------ greens / critical / qv

inline int cmd_critical(const Options& o, std::ostream& out) {
  const auto c = detail::load(o);
  const auto root = greenfn::critical_a_root(c.R);
  const json j{{"R", c.R}, {"a_star", root.root}, {"iterations", root.iterations}};
  Table t{{"quantity", "value"}, {}};
  t.add({"R", num(c.R)});
  t.add({"a_star", num(root.root)});
  detail::show(o, out, j, t);
  if (!o.out.empty()) detail::write_report(o.out, j, t);
  return exit_ok;
}

inline int cmd_qv(const Options& o, std::ostream& out) {
  const auto c = detail::load(o);
  const auto a = c.a.build(c.R), V = c.V.build(c.R);
  const auto G = greenfn::ga_center(a, c.R);
  const double qv = greenfn::qv_center(V, G, c.tolerances.quad);
  const json j{{"R", c.R}, {"a", io::to_json(c.a)}, {"V", io::to_json(c.V)}, {"phi_a0", G.phi_a0()}, {"qv", qv}};
  Table t{{"quantity", "value"}, {}};
  t.add({"phi_a(0)", num(G.phi_a0())});
  t.add({"Q_V(0)", num(qv)});
  detail::show(o, out, j, t);
  if (!o.out.empty()) detail::write_report(o.out, j, t);
  return exit_ok;
}

inline int cmd_greens(const Options& o, std::ostream& out) {
  const auto c = detail::load(o);
  const auto a = c.a.build(c.R), V = c.V.build(c.R);
  const auto G = greenfn::ga_center(a, c.R);
  json j{{"R", c.R},
         {"a", io::to_json(c.a)},
         {"V", io::to_json(c.V)},
         {"a_star", greenfn::critical_a(c.R)},
         {"phi_a0", G.phi_a0()},
         {"qv", greenfn::qv_center(V, G, c.tolerances.quad)}};
  Table t{{"rho", "phi_a"}, {}};
  if (a.is_constant() && a.constant_value() <= 0.0) {
    const double ac = a.constant_value();
    const greenfn::HelmholtzSeries series(ac, c.R, 1e-15, c.lmax);
    json profile = json::array();
    for (int i = 0; i <= 19; ++i) {
      const double rho = 0.95 * c.R * i / 19.0;
      const double phi = series.phi(rho);
      profile.push_back({{"rho", rho}, {"phi", phi}});
      t.add({num(rho), num(phi)});
    }
    j["profile"] = profile;
    const auto h = greenfn::phia_hessian(ac, c.R);
    j["hessian"] = {{"series", h.series},
                    {"finite_difference", h.finite_difference},
                    {"fd_halved", h.fd_halved},
                    {"gradient_at_center", h.gradient_at_center},
                    {"agreement", h.agreement},
                    {"positive_definite", h.positive_definite}};
    const auto n = greenfn::na_scan(ac, c.R);
    j["criticality"] = {{"phi_at_center", n.phi_at_center}, {"phi_min", n.phi_min},   {"N_a", n.N_a},
                        {"a_on_Na", n.a_on_Na},             {"hessian", n.hessian},   {"criticality", n.criticality},
                        {"negativity", n.negativity},       {"nondegeneracy", n.nondegeneracy}};
  } else {
    j["profile"] = nullptr;
    j["note"] = "profile, Hessian and N_a scan need a constant coefficient a <= 0; centre values only";
  }
  if (o.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << fmt::format("a_star  {}\nphi_a0  {}\nqv      {}\n", num(j["a_star"].get<double>()), num(j["phi_a0"].get<double>()),
                      num(j["qv"].get<double>()));
    if (!t.rows.empty()) out << "\n" << t.text();
  }
  if (!o.out.empty()) detail::write_report(o.out, j, t);
  return exit_ok;
}

// ------------------------------------------------------------------ solve / sweep

namespace detail {

/// Solves one rung and serialises it; library errors become failure lines.
inline std::string rung_line(const io::RunConfig& c, const asympt::AsymptoticContext& ctx, const std::string& hash,
                             double eps, std::optional<double> seed) {
  try {
    const auto sol = solver::solve_profile(c.problem(eps), seed);
    return io::ok_line(asympt::make_record(sol, ctx, c.probes), hash);
  } catch (const Error& e) {
    return io::failure_line(eps, e, hash);
  }
}

}  // namespace detail

inline int cmd_solve(const Options& o, std::ostream& out) {
  const auto c = detail::load(o);
  if (!o.eps) throw ValidationError("--eps", "solve needs --eps");
  const auto cfg = c.problem(*o.eps);
  const auto sol = solver::solve_profile(cfg);
  const auto ctx = asympt::make_context(cfg);
  const auto rec = asympt::make_record(sol, ctx, c.probes);
  const json j{{"record", io::to_json(rec)}, {"provenance", io::provenance(io::config_hash(c))}};
  Table t{{"quantity", "value"}, {}};
  for (const auto& [k, v] : j["record"].items()) t.add({k, num(v.get<double>())});
  detail::show(o, out, j, t);
  if (!o.out.empty()) detail::write_file(o.out, j.dump(2) + "\n");
  return exit_ok;
}

inline Table rung_table(const std::vector<io::ResultLine>& lines) {
  Table t{{"eps", "status", "M", "lambda", "eps*lambda", "alpha", "beta", "gamma", "farfield", "sup_w_ratio"}, {}};
  for (const auto& l : lines) {
    if (!l.ok) {
      t.add({num(l.eps), "failed: " + l.error_kind, "", "", "", "", "", "", "", ""});
      continue;
    }
    const auto& r = *l.record;
    t.add({num(r.eps), "ok", num(r.M), num(r.lambda), num(r.eps_lambda), num(r.alpha), num(r.beta), num(r.gamma),
           num(r.farfield_error), num(r.sup_w_ratio)});
  }
  return t;
}

/// Solves every rung of the ladder and writes one JSON line per rung, in
/// ladder order, through a single appender. With resume, successful lines of
/// the same config already in the file are kept verbatim.
inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = detail::load(o);
  if (o.workers < 1) throw ValidationError("--workers", "must be at least 1");
  const std::string path = o.out.empty() ? c.output.records : o.out;
  const std::string hash = io::config_hash(c);
  const auto& ladder = c.eps_ladder;
  const std::size_t n = ladder.size();

  std::vector<std::optional<std::string>> lines(n);
  std::vector<std::optional<double>> heights(n);
  if (o.resume && std::filesystem::exists(path)) {
    const auto f = io::read_records(path);
    for (int bad : f.malformed) err << "resume: skipping malformed line " << bad << " of " << path << "\n";
    for (const auto& l : f.lines) {
      if (!l.ok || l.config_hash != hash) continue;
      for (std::size_t i = 0; i < n; ++i)
        if (ladder[i] == l.eps) {
          lines[i] = l.text;
          heights[i] = l.record->M;
        }
    }
  }

  const auto ctx = asympt::make_context(c.problem(ladder.front()));
  c.problem(ladder.back()).validate();

  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw ValidationError("--out", "cannot write '" + path + "'");
  auto append = [&](const std::string& s) { file << s << "\n" << std::flush; };

  if (o.workers == 1) {
    std::optional<double> prev_M, prev_eps;
    for (std::size_t i = 0; i < n; ++i) {
      if (!lines[i]) {
        std::optional<double> seed;
        if (prev_M) seed = *prev_M * std::sqrt(*prev_eps / ladder[i]);
        lines[i] = detail::rung_line(c, ctx, hash, ladder[i], seed);
        const auto l = io::parse_line(*lines[i]);
        if (l.ok) heights[i] = l.record->M;
      }
      append(*lines[i]);
      if (heights[i]) {
        prev_M = heights[i];
        prev_eps = ladder[i];
      }
    }
  } else {
    // Rungs are independent: the bracket lattice makes each result
    // independent of the seed. The main thread appends in ladder order.
    std::mutex m;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        bool todo;
        {
          std::lock_guard lk(m);
          todo = !lines[i];
        }
        if (!todo) continue;
        auto s = detail::rung_line(c, ctx, hash, ladder[i], std::nullopt);
        {
          std::lock_guard lk(m);
          lines[i] = std::move(s);
        }
        cv.notify_all();
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(o.workers, n); ++w) pool.emplace_back(work);
    for (std::size_t i = 0; i < n; ++i) {
      std::unique_lock lk(m);
      cv.wait(lk, [&] { return lines[i].has_value(); });
      const std::string s = *lines[i];
      lk.unlock();
      append(s);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<io::ResultLine> parsed;
  bool failed = false;
  for (const auto& s : lines) {
    parsed.push_back(io::parse_line(*s));
    failed = failed || !parsed.back().ok;
  }
  const auto t = rung_table(parsed);
  if (o.format == "json") {
    for (const auto& s : lines) out << *s << "\n";
  } else {
    out << t.text();
  }
  return failed ? exit_numerical : exit_ok;
}

// ------------------------------------------------------------------ verify / report

inline std::vector<asympt::SweepRecord> load_records(const Options& o, const io::RunConfig& c, std::ostream& err) {
  const std::string path = o.records.empty() ? c.output.records : o.records;
  const auto f = io::read_records(path);
  for (int bad : f.malformed) err << "warning: skipping malformed line " << bad << " of " << path << "\n";
  return io::records_for(f, io::config_hash(c));
}

inline Table report_table(const asympt::TheoremReport& rep) {
  Table t{{"check", "value", "target", "error", "verdict"}, {}};
  auto law = [&](const asympt::LawEntry& e) {
    t.add({e.name, num(e.value), e.infinite ? "inf" : num(e.target), num(e.error), e.pass ? "pass" : "FAIL: " + e.verdict});
  };
  auto trend = [&](const asympt::TrendEntry& e, const std::string& target) {
    t.add({e.name, num(e.statistic), target, "", e.pass ? "pass (" + e.verdict + ")" : "FAIL: " + e.verdict});
  };
  law(rep.rate);
  if (rep.alpha)
    law(*rep.alpha);
  else
    t.add({"alpha slope (alpha-1)/eps", "", "", "", "skipped: coefficient not critical"});
  law(rep.beta);
  law(rep.gamma);
  t.add({"farfield error at smallest eps", num(rep.farfield_last), "", "", rep.farfield_pass ? "pass" : "FAIL"});
  trend(rep.farfield_trend, "decreasing");
  trend(rep.grad_w_bound, "max/median");
  trend(rep.grad_r_bound, "max/median");
  trend(rep.sup_w, "decreasing");
  t.add({"max energy/Pohozaev residual", num(rep.max_identity_residual), "", "", ""});
  t.add({"max Green-representation residual", num(rep.max_greens_residual), "", "", ""});
  t.add({"max Sobolev quotient", num(rep.max_quotient), num(sobolev_constant), "", ""});
  trend(rep.quotient_trend, "increasing");
  t.add({"solver identities", "", "", "", rep.identities_pass ? "pass" : "FAIL"});
  for (const auto& s : rep.symmetry_notes) t.add({s, "", "", "", "by symmetry"});
  t.add({"overall", "", "", "", rep.pass ? "pass" : "FAIL"});
  return t;
}

inline json report_json(const asympt::TheoremReport& rep, const std::vector<asympt::SweepRecord>& recs,
                        const std::string& hash) {
  json records = json::array();
  for (const auto& r : recs) records.push_back(io::to_json(r));
  json j{{"provenance", io::provenance(hash)},
         {"rungs", rep.rungs},
         {"trusted_rungs", rep.trusted_rungs},
         {"records", records},
         {"rate", detail::to_json(rep.rate)},
         {"alpha", rep.alpha ? detail::to_json(*rep.alpha) : json(nullptr)},
         {"alpha_note", rep.alpha_note},
         {"beta", detail::to_json(rep.beta)},
         {"gamma", detail::to_json(rep.gamma)},
         {"farfield", {{"trend", detail::to_json(rep.farfield_trend)}, {"last", rep.farfield_last}, {"pass", rep.farfield_pass}}},
         {"grad_w_bound", detail::to_json(rep.grad_w_bound)},
         {"grad_r_bound", detail::to_json(rep.grad_r_bound)},
         {"sup_w", detail::to_json(rep.sup_w)},
         {"identities",
          {{"max_identity_residual", rep.max_identity_residual},
           {"max_greens_residual", rep.max_greens_residual},
           {"max_quotient", rep.max_quotient},
           {"quotient_trend", detail::to_json(rep.quotient_trend)},
           {"pass", rep.identities_pass}}},
         {"symmetry", rep.symmetry_notes},
         {"pass", rep.pass}};
  return j;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = detail::load(o);
  const auto recs = load_records(o, c, err);
  const auto ctx = asympt::make_context(c.problem(c.eps_ladder.front()));
  const auto rep = asympt::build_report(recs, ctx, io::verify_tolerances(c));
  const auto t = report_table(rep);
  const auto j = report_json(rep, recs, io::config_hash(c));
  detail::show(o, out, j, t);
  detail::write_report(o.out.empty() ? c.output.report : o.out, j, t);
  return rep.pass ? exit_ok : exit_verification;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = detail::load(o);
  const std::string path = o.records.empty() ? c.output.records : o.records;
  const auto f = io::read_records(path);
  for (int bad : f.malformed) err << "warning: skipping malformed line " << bad << " of " << path << "\n";
  (void)io::records_for(f, io::config_hash(c));
  const auto t = rung_table(f.lines);
  json rows = json::array();
  for (const auto& l : f.lines) rows.push_back(json::parse(l.text));
  detail::show(o, out, rows, t);
  if (!o.out.empty()) detail::write_report(o.out, rows, t);
  return exit_ok;
}

// ------------------------------------------------------------------ bubbletest

inline int cmd_bubbletest(const Options& o, std::ostream& out) {
  const auto c = detail::load(o);
  const auto& bt = c.bubbletest;
  const auto ladder = bubble::log_ladder(bt.lambda_min, bt.lambda_max, bt.points);
  Table t{{"suite", "item", "computed", "target", "error", "verdict"}, {}};
  json j{{"R", c.R}, {"ladder", ladder}, {"tolerance", bt.tolerance}};
  bool pass = true;

  json b3 = json::array();
  for (const auto& spec : bt.a_values) {
    const double a = spec.build(c.R).constant_value();
    const auto rep = bubble::lemma_b3_suite(a, c.R, ladder, 0.3, bt.tolerance);
    const std::string suite = fmt::format("B3 a={}", num(a));
    json fits = json::array();
    for (const auto& f : rep.fits) {
      json checks = json::array();
      for (const auto& ch : f.checks) {
        t.add({suite, f.name + " " + ch.term, num(ch.fitted), num(ch.target), num(ch.error), yes(ch.pass)});
        checks.push_back({{"term", ch.term}, {"fitted", ch.fitted}, {"target", ch.target}, {"error", ch.error}, {"pass", ch.pass}});
      }
      t.add({suite, f.name + " order", num(f.observed_order), num(f.nominal_order), "", yes(f.order_ok)});
      fits.push_back({{"name", f.name},
                      {"values", f.values},
                      {"coefficients", f.coefficients},
                      {"condition", f.condition},
                      {"observed_order", f.observed_order},
                      {"nominal_order", f.nominal_order},
                      {"order_ok", f.order_ok},
                      {"checks", checks},
                      {"pass", f.pass}});
    }
    b3.push_back({{"a", a}, {"phi", rep.phi}, {"rho", rep.rho}, {"dphi_rho", rep.dphi_rho}, {"fits", fits}, {"pass", rep.pass}});
    pass = pass && rep.pass;
  }
  j["b3"] = b3;

  json consts = json::array();
  for (const auto& k : bubble::bubble_constants(c.R, ladder, bt.tolerance)) {
    t.add({"constants", k.name, num(k.computed), num(k.target), num(k.error), yes(k.pass)});
    consts.push_back({{"name", k.name}, {"computed", k.computed}, {"target", k.target}, {"error", k.error}, {"pass", k.pass}});
    pass = pass && k.pass;
  }
  j["constants"] = consts;

  json lq = json::array();
  for (double q : {2.0, 3.0, 4.0, 6.0}) {
    const auto rep = bubble::lemma_b1_check(q, ladder, c.R);
    t.add({"L^q norms", fmt::format("q={} max/min ratio", num(q)), num(rep.ratio_max / rep.ratio_min), "<= 3", "",
           yes(rep.bounded)});
    lq.push_back({{"q", q}, {"ratio_min", rep.ratio_min}, {"ratio_max", rep.ratio_max}, {"bounded", rep.bounded}});
    pass = pass && rep.bounded;
  }
  j["lq"] = lq;
  j["pass"] = pass;
  detail::show(o, out, j, t);
  if (!o.out.empty()) detail::write_report(o.out, j, t);
  return pass ? exit_ok : exit_verification;
}

// ------------------------------------------------------------------ dispatch

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"greens", "critical", "qv", "solve", "sweep", "verify", "bubbletest", "report"};
  return names;
}

/// Runs a command and maps failures onto exit codes: 1 for invalid input,
/// 2 for numerical failures, 3 for verification failures or too little data.
inline int run(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.format != "text" && o.format != "json") throw ValidationError("--format", "must be 'text' or 'json'");
    if (command == "greens") return cmd_greens(o, out);
    if (command == "critical") return cmd_critical(o, out);
    if (command == "qv") return cmd_qv(o, out);
    if (command == "solve") return cmd_solve(o, out);
    if (command == "sweep") return cmd_sweep(o, out, err);
    if (command == "verify") return cmd_verify(o, out, err);
    if (command == "bubbletest") return cmd_bubbletest(o, out);
    if (command == "report") return cmd_report(o, out, err);
    throw ValidationError("command", "unknown command '" + command + "'");
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const InsufficientDataError& e) {
    err << "insufficient data: " << e.what() << "\n";
    return exit_verification;
  } catch (const Error& e) {
    err << "numerical failure (" << io::error_kind(e) << "): " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

}  // namespace critball::cli
