#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "nilext/io.hpp"
#include "nilext/nonext.hpp"

namespace nilext::cli {

using io::json;

inline constexpr const char* kSchema = "nilext-report/1";

enum ExitCode { kOk = 0, kPrecondition = 2, kBudget = 3, kIdentity = 4 };

struct RunOptions {
  std::uint64_t seed = 1;
  Int budget = 1'000'000;
  double tolerance = 1e-9;
  bool timing = false;
};

struct RunReport {
  json doc;
  int exit_code = kOk;
};

// 64-bit FNV-1a of the canonical input dump.
inline std::string digest(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

/// Runs `body` and wraps its outputs in a report. Library errors become exit
/// codes: precondition 2, budget (and the 64-bit denominator cap) 3, failed
/// identity 4. The failing identity is named in "error".
inline RunReport run_command(const std::string& command, const json& inputs, const RunOptions& opt,
                             const std::function<json()>& body) {
  RunReport r;
  r.doc = {{"schema", kSchema},
           {"command", command},
           {"options", {{"seed", opt.seed}, {"budget", opt.budget}, {"tolerance", opt.tolerance}}},
           {"inputs", inputs},
           {"inputs_digest", digest(inputs)}};
  auto t0 = std::chrono::steady_clock::now();
  std::string status = "ok";
  try {
    r.doc["outputs"] = body();
  } catch (const IdentityViolation& e) {
    r.exit_code = kIdentity;
    status = "identity-violation";
    r.doc["error"] = e.what();
  } catch (const BudgetError& e) {
    r.exit_code = kBudget;
    status = "budget";
    r.doc["error"] = e.what();
  } catch (const OverflowError& e) {
    r.exit_code = kBudget;
    status = "budget";
    r.doc["error"] = std::string("denominator cap: ") + e.what();
  } catch (const PreconditionError& e) {
    r.exit_code = kPrecondition;
    status = "precondition";
    r.doc["error"] = e.what();
  } catch (const io::json::exception& e) {
    r.exit_code = kPrecondition;
    status = "precondition";
    r.doc["error"] = std::string("malformed input: ") + e.what();
  }
  r.doc["status"] = status;
  if (opt.timing) {
    auto dt = std::chrono::steady_clock::now() - t0;
    r.doc["timing_ms"] = std::chrono::duration<double, std::milli>(dt).count();
  }
  return r;
}

namespace detail {

inline void require_within_budget(Int size, const RunOptions& opt, const std::string& what) {
  if (size > opt.budget)
    throw BudgetError(what + " needs " + std::to_string(size) + " evaluations, budget " + std::to_string(opt.budget));
}

inline json ladder_json(const Ladder& L) {
  json steps = json::array();
  for (const auto& s : L.steps) {
    json j = {{"kind", to_string(s.kind)}, {"p", s.p}, {"group", io::to_json(s.group)}};
    if (s.kind == StepKind::NonSplit) j["d"] = s.d;
    steps.push_back(j);
  }
  return steps;
}

inline json history_json(const std::vector<Complexity>& h) {
  json a = json::array();
  for (const auto& c : h) a.push_back(io::to_json(c));
  return a;
}

inline std::vector<Int> vec_or_zero(const json& inputs, const char* key, std::size_t n) {
  if (!inputs.contains(key) || inputs.at(key).is_null()) return std::vector<Int>(n, 0);
  auto v = inputs.at(key).get<std::vector<Int>>();
  require(v.size() == n, std::string(key) + " has the wrong rank");
  return v;
}

// Random function with values uniform in the unit disk.
inline GroupFunction random_function(const FinAbGroup& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GroupFunction f(g);
  for (auto& z : f.values) z = std::polar(std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
  return f;
}

// Pointwise agreement of N on emb(sub) with R on sub.
struct Agreement {
  Int checked = 0;
  Int agree = 0;
  std::optional<std::vector<Int>> first_mismatch;
};

inline Agreement compare_on_subgroup(const Nilsequence& N, const Nilsequence& R, const SubgroupEmbedding& emb) {
  Agreement a;
  emb.sub.for_each_element([&](const std::vector<Int>& y) {
    ++a.checked;
    auto v = N.point(emb.amb.add(N.shift, emb.apply(y)));
    auto w = R.point(emb.sub.add(R.shift, y));
    if (v && w && *v == *w) ++a.agree;
    else if (!a.first_mismatch) a.first_mismatch = y;
  });
  return a;
}

inline json agreement_json(const Agreement& a) {
  json j = {{"checked", a.checked}, {"agree", a.agree}};
  if (a.first_mismatch) j["first_mismatch"] = *a.first_mismatch;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// nonext

/// The non-extendable quadratic phase on Z_{p^2} x Z_p: polynomial-form
/// extension (expected infeasible with a certificate when k = 2) and the
/// linear-form extension (expected to agree on the subgroup).
inline RunReport cmd_nonext(Int p, int k, const RunOptions& opt = {}) {
  json inputs = {{"p", p}, {"k", k}};
  return run_command("nonext", inputs, opt, [&]() -> json {
    require(p >= 2 && is_prime(p), "p must be prime");
    require(p <= 13, "p must be at most 13");
    NonextInstance in = make_nonext(p, k);
    NonextDeduction D = deduce_nonext(in);
    json poly = {{"pure_y_coefficients_vanish", D.pure_y_vanish},
                 {"p_times_cross_coefficient_vanishes", D.p_cross_vanishes},
                 {"infeasible_without_x_periodicity", D.infeasible_without_x_period},
                 {"x_periodicity_redundant", D.x_period_redundant}};
    const auto* cert = std::get_if<InfeasibilityCertificate>(&D.result);
    poly["outcome"] = cert ? "infeasible" : "feasible";
    if (cert) poly["certificate"] = io::to_json(*cert);
    else poly["extension"] = io::to_json(std::get<PolyMap>(D.result));

    NonextLinearExtension L = nonext_linear_extension(in);
    json lin = {{"outcome", L.ok() ? "agrees" : "disagrees"},
                {"subgroup_points", L.subgroup_size},
                {"agreements", L.agreements},
                {"outside_points", L.outside},
                {"ladder", detail::ladder_json(L.ladder)},
                {"complexity", io::to_json(L.extended.complexity())}};

    const bool asserted = k == 2;
    if (asserted) {
      check_identity(cert != nullptr, "nonext: degree-2 extension unexpectedly feasible");
      check_identity(cert->verify(), "nonext: infeasibility certificate does not verify");
    }
    check_identity(L.ok(), "nonext: linear-form extension disagrees with g on Z_0");
    return {{"polynomial_form", poly}, {"linear_form", lin}, {"asserted", asserted}};
  });
}

// ---------------------------------------------------------------------------
// gowers

/// All norm methods on f, cross-checked against the recursive one. The naive
/// sum is skipped (and reported so) above the budget.
inline RunReport cmd_gowers(const json& inputs, const GroupFunction& f, int d, const RunOptions& opt = {}) {
  return run_command("gowers", inputs, opt, [&]() -> json {
    require(d >= 1, "d must be >= 1");
    f.require_one_bounded();
    json norms;
    double ref = gowers_norm(f, d, GowersMethod::Recursive);
    norms["recursive"] = ref;
    auto cross = [&](const char* name, double v) {
      norms[name] = v;
      check_identity(std::abs(v - ref) <= opt.tolerance, std::string("gowers: ") + name + " disagrees with recursive");
    };
    cross("pure_recursive", gowers_norm(f, d, GowersMethod::PureRecursive));
    if (naive_gowers_terms(f.group, d) <= opt.budget) cross("naive", gowers_norm(f, d, GowersMethod::Naive));
    else norms["naive"] = "skipped: over budget";
    if (d == 2) cross("fourier", gowers_u2_fourier(f));
    return {{"d", d}, {"group", io::to_json(f.group)}, {"norms", norms}};
  });
}

// ---------------------------------------------------------------------------
// linearize

inline RunReport cmd_linearize(const json& inputs, const RunOptions& opt = {}) {
  return run_command("linearize", inputs, opt, [&]() -> json {
    Nilsequence N = io::parse_nilsequence(io::detail::field(inputs, "nilsequence"));
    require(!N.is_linear(), "input is already in linear form");
    detail::require_within_budget(N.domain.order(), opt, "exhaustive linearization check");
    Nilsequence L = linearize(N);
    Int agree = 0;
    N.domain.for_each_element([&](const std::vector<Int>& z) {
      auto v = L.point(z);
      check_identity(v && *v == *N.point(z), "linearize: orbit_eval differs from eval");
      ++agree;
    });
    return {{"nilsequence", io::to_json(L)}, {"checked_points", agree}};
  });
}

// ---------------------------------------------------------------------------
// extend

inline RunReport cmd_extend(const json& inputs, const RunOptions& opt = {}) {
  return run_command("extend", inputs, opt, [&]() -> json {
    Nilsequence N0 = io::parse_nilsequence(io::detail::field(inputs, "nilsequence"));
    SubgroupEmbedding emb = io::parse_embedding(io::detail::field(inputs, "embedding"));
    detail::require_within_budget(emb.amb.order(), opt, "exhaustive extension check");
    Ladder L = build_ladder(emb);
    verify_ladder(L, emb);
    LadderExtension ext = extend_along_ladder(N0, L);
    auto a = detail::compare_on_subgroup(ext.result, N0, emb);
    check_identity(a.agree == a.checked, "extend: extension disagrees with N0 on Z_0");
    Int outside = 0;
    emb.amb.for_each_element([&](const std::vector<Int>& x) { outside += !ext.result.point(x); });
    return {{"ladder", detail::ladder_json(L)},
            {"nilsequence", io::to_json(ext.result)},
            {"history", detail::history_json(ext.history)},
            {"subgroup_agreement", detail::agreement_json(a)},
            {"outside_points", outside}};
  });
}

// ---------------------------------------------------------------------------
// assemble

inline json correlation_outputs(const Assembly& a, bool emit_nilsequence) {
  json j = {{"report", io::to_json(a.report)}, {"history", detail::history_json(a.history)}};
  if (emit_nilsequence) j["nilsequence"] = io::to_json(a.nilsequence);
  return j;
}

/// inputs: "function", "embedding", "nilsequence" (N0 on Z_0), optional
/// "t0" and "eps0" (default: the measured subgroup correlation).
inline RunReport cmd_assemble(const json& inputs, const RunOptions& opt = {}) {
  return run_command("assemble", inputs, opt, [&]() -> json {
    GroupFunction f = io::parse_function(io::detail::field(inputs, "function"));
    SubgroupEmbedding emb = io::parse_embedding(io::detail::field(inputs, "embedding"));
    Nilsequence N0 = io::parse_nilsequence(io::detail::field(inputs, "nilsequence"));
    auto t0 = detail::vec_or_zero(inputs, "t0", emb.amb.rank());
    double eps0 = inputs.contains("eps0") ? inputs.at("eps0").get<double>()
                                          : std::abs(subgroup_correlation(f, emb, t0, N0));
    Assembly a = assemble_full_nilsequence(f, emb, t0, N0, eps0);
    return correlation_outputs(a, true);
  });
}

// ---------------------------------------------------------------------------
// pipeline

/// The p-prime non-extendable example as a pipeline configuration.
inline json nonext_pipeline_config(Int p, double noise = 0.0) {
  NonextInstance in = make_nonext(p);
  return {{"embedding", io::to_json(in.emb)}, {"poly", io::to_json(in.g)}, {"t0", {1, 1}}, {"noise", noise}};
}

/// inputs: "embedding", "poly" (torus-valued on Z_0), optional "t0",
/// "noise" (Gaussian amplitude per component, then clipped to the unit
/// disk), "eps0".
inline RunReport cmd_pipeline(const json& inputs, const RunOptions& opt = {}, bool emit_nilsequence = false) {
  return run_command("pipeline", inputs, opt, [&]() -> json {
    SubgroupEmbedding emb = io::parse_embedding(io::detail::field(inputs, "embedding"));
    PolyMap phi = io::parse_polymap(io::detail::field(inputs, "poly"));
    auto t0 = detail::vec_or_zero(inputs, "t0", emb.amb.rank());
    double noise = inputs.contains("noise") ? inputs.at("noise").get<double>() : 0.0;
    require(noise >= 0, "noise must be nonnegative");
    Nilsequence N0 = make_nilsequence(emb.sub, phi);
    const FinAbGroup& Z = emb.amb;

    GroupFunction f(Z);
    emb.sub.for_each_element([&](const std::vector<Int>& y) {
      f[static_cast<std::size_t>(Z.index_of(Z.add(t0, emb.apply(y))))] = N0.value(y);
    });
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    if (noise > 0)
      for (auto& z : f.values) {
        z += noise * Complex(nd(rng), nd(rng));
        if (std::abs(z) > 1) z /= std::abs(z);
      }

    const int k = phi.degree_bound();
    double measured = std::abs(subgroup_correlation(f, emb, t0, N0));
    double eps0 = inputs.contains("eps0") ? inputs.at("eps0").get<double>() : measured;
    Assembly a = assemble_full_nilsequence(f, emb, t0, N0, eps0);
    a.report.delta = gowers_norm(f, k + 1);
    if (noise == 0)
      check_identity(std::abs(a.report.epsilon - a.report.bound) <= opt.tolerance,
                     "pipeline: zero-noise epsilon differs from epsilon_0 |Z_0| / |Z|");
    json out = correlation_outputs(a, emit_nilsequence);
    out["expected_epsilon"] = measured / static_cast<double>(emb.index());
    return out;
  });
}

// ---------------------------------------------------------------------------
// verify

/// inputs: "nilsequence"; optional "reference" (a nilsequence on Z_0) with
/// "embedding" (default: identity on the same domain). Checks the orbit's
/// internal identities, then exact agreement with the reference.
inline RunReport cmd_verify(const json& inputs, const RunOptions& opt = {}) {
  return run_command("verify", inputs, opt, [&]() -> json {
    Nilsequence N = io::parse_nilsequence(io::detail::field(inputs, "nilsequence"));
    json out = {{"form", N.is_linear() ? "linear" : "polynomial"}, {"complexity", io::to_json(N.complexity())}};
    if (N.is_linear()) {
      check_identity(N.linear().generators_commute(), "verify: generators do not commute");
      check_identity(N.linear().periods_in_lattice(), "verify: h_i^{n_i} is not in the lattice");
    }
    out["validated"] = true;
    if (inputs.contains("reference")) {
      Nilsequence R = io::parse_nilsequence(inputs.at("reference"));
      SubgroupEmbedding emb = inputs.contains("embedding")
                                  ? io::parse_embedding(inputs.at("embedding"))
                                  : SubgroupEmbedding{R.domain, R.domain, IntMatrix::identity(R.domain.rank())};
      require(emb.sub == R.domain && emb.amb == N.domain, "embedding does not connect the two domains");
      detail::require_within_budget(emb.sub.order(), opt, "exhaustive agreement check");
      auto a = detail::compare_on_subgroup(N, R, emb);
      out["agreement"] = detail::agreement_json(a);
      check_identity(a.agree == a.checked, "verify: nilsequence disagrees with the reference");
    }
    return out;
  });
}

}  // namespace nilext::cli
