/* Copyright 2026 The qrcert Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "qrcert/cli/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <ostream>
#include <random>
#include <string>

#include "qrcert/cli/matrix_io.hpp"
#include "qrcert/cli/report.hpp"
#include "qrcert/errors.hpp"
#include "qrcert/lll_cert.hpp"
#include "qrcert/oracle.hpp"
#include "qrcert/r_bound.hpp"

namespace qrcert::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Timings {
  Json stages = Json::object();
  bool verbose = false;
  std::ostream* err = nullptr;

  template <class F>
  decltype(auto) stage(const char* name, F&& f) {
    const auto t0 = Clock::now();
    struct Record {
      Timings& t;
      const char* name;
      Clock::time_point t0;
      ~Record() {
        const double s = seconds_since(t0);
        t.stages[name] = s;
        if (t.verbose) *t.err << "[time] " << name << ": " << format_double(s) << " s\n";
      }
    } record{*this, name, t0};
    return f();
  }
};

void emit(std::ostream& out, Json report, const Timings& timings, const std::string& format) {
  report["timings"] = timings.stages;
  if (format == "json")
    out << report.dump(2) << '\n';
  else
    out << render_text(report);
}

int bound_r(const std::string& input, const std::string& rtilde_path, const std::string& format,
            Timings& timings, std::ostream& out) {
  const MatrixFile a = timings.stage("read", [&] { return read_matrix_file(input); });
  if (a.rows() != a.cols()) throw ShapeError("bound-r: the input matrix must be square");
  const IntervalMatrix enc = a.enclosure();

  UpperTriangularMatrix r;
  if (!rtilde_path.empty()) {
    const MatrixFile rf = read_matrix_file(rtilde_path);
    if (rf.rows() != a.rows() || rf.cols() != a.cols())
      throw ShapeError("bound-r: R~ and A have different shapes");
    r = normalize_diagonal_sign(UpperTriangularMatrix::from_matrix(rf.nearest()));
  } else {
    r = timings.stage("mgs", [&] { return mgs_qr(a.nearest()); });
  }
  const RBoundReport report = timings.stage("bound", [&] { return bound_r_error(enc, r); });
  emit(out, bound_report(r, report), timings, format);
  return report.status == RBoundStatus::Finite ? kExitOk : kExitNegative;
}

int certify(const std::string& input, const std::string& delta, const std::string& eta,
            const std::string& format, Timings& timings, std::ostream& out) {
  const MatrixFile a = timings.stage("read", [&] { return read_matrix_file(input); });
  if (!a.integer_mode) throw InputError("certify: the basis file must contain integers");
  const LLLParams params = LLLParams::from_decimal(delta, eta);
  const CertificateVerdict v = timings.stage("certify", [&] { return certify_lll(a.ints, params); });
  emit(out, certificate_report(v), timings, format);
  return v.outcome == Outcome::Reduced ? kExitOk : kExitNegative;
}

struct FixtureOptions {
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  double cond = 1e3;
  unsigned bits = 100;
  long scale = 1;
  std::string delta = "3/4";
  std::string eta = "1/2";
  std::string out;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
  if (!f) throw InputError("write failed for '" + path + "'");
}

int gen_fixtures(const FixtureOptions& o, std::ostream& out) {
  Json meta;
  meta["kind"] = o.kind;
  meta["n"] = o.n;
  meta["seed"] = o.seed;
  std::string body;
  std::mt19937_64 rng(o.seed);

  auto record_verdict = [&](const BigIntMatrix& b) {
    const mpq_class d = parse_exact_decimal(o.delta), e = parse_exact_decimal(o.eta);
    meta["delta"] = o.delta;
    meta["eta"] = o.eta;
    meta["exact_reduced"] = oracle::exact_is_reduced(b, d, e);
  };

  if (o.kind == "randsvd") {
    const FloatMatrix a = oracle::gen_test_matrix(o.n, o.cond, o.seed);
    meta["target_cond"] = o.cond;
    if (o.n <= 50) meta["cond2"] = number(oracle::cond2_diagnostic(a));
    body = serialize(a);
  } else if (o.kind == "knapsack-reduced") {
    const BigIntMatrix basis = oracle::knapsack_basis(o.n, o.bits, rng);
    const BigIntMatrix reduced = oracle::exact_lll_reduce(
        basis, parse_exact_decimal(o.delta), parse_exact_decimal(o.eta));
    meta["bits"] = o.bits;
    record_verdict(reduced);
    body = serialize(reduced);
  } else if (o.kind == "orthogonal") {
    const BigIntMatrix a = oracle::scaled_signed_permutation(o.n, o.scale, rng);
    meta["scale"] = o.scale;
    record_verdict(a);
    body = serialize(a);
  } else if (o.kind == "pascal") {
    body = serialize(oracle::pascal(o.n));
  } else {
    throw InputError("unknown fixture kind '" + o.kind + "'");
  }

  write_file(o.out, body);
  write_file(o.out + ".meta.json", meta.dump(2) + "\n");
  out << o.out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified R-factor error bounds and LLL-reducedness certificates", "qrcert"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print stage timings to stderr");

  std::string input, rtilde, format = "text";
  bool use_mgs = false;

  auto* bound = app.add_subcommand("bound-r", "Certified componentwise bound on |R~ - R|");
  bound->add_option("matrix", input, "Matrix file A")->required();
  auto* rt = bound->add_option("--rtilde", rtilde, "Approximate R factor to bound");
  auto* mg = bound->add_flag("--mgs", use_mgs, "Compute R~ by modified Gram-Schmidt (default)");
  rt->excludes(mg);
  bound->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  std::string delta, eta;
  auto* cert = app.add_subcommand("certify", "Certify that the columns form an LLL-reduced basis");
  cert->add_option("basis", input, "Integer matrix file, basis vectors as columns")->required();
  cert->add_option("--delta", delta, "Lovasz parameter (decimal or fraction)")->required();
  cert->add_option("--eta", eta, "Size-reduction parameter (decimal or fraction)")->required();
  cert->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  FixtureOptions fx;
  auto* gen = app.add_subcommand("gen-fixtures", "Write a deterministic test matrix and metadata");
  gen->add_option("--kind", fx.kind)
      ->required()
      ->check(CLI::IsMember({"randsvd", "knapsack-reduced", "orthogonal", "pascal"}));
  gen->add_option("--n", fx.n)->required()->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  gen->add_option("--seed", fx.seed);
  gen->add_option("--cond", fx.cond, "Target condition number (randsvd)");
  gen->add_option("--bits", fx.bits, "Weight size in bits (knapsack-reduced)")
      ->check(CLI::Range(1u, 100000u));
  gen->add_option("--scale", fx.scale, "Entry magnitude (orthogonal)")->check(CLI::Range(1L, 1L << 40));
  gen->add_option("--delta", fx.delta);
  gen->add_option("--eta", fx.eta);
  gen->add_option("--out", fx.out, "Output matrix path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Timings timings{Json::object(), verbose, &err};
  try {
    if (*bound) return bound_r(input, rtilde, format, timings, out);
    if (*cert) return certify(input, delta, eta, format, timings, out);
    return gen_fixtures(fx, out);
  } catch (const std::exception& e) {
    err << "qrcert: error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace qrcert::cli
