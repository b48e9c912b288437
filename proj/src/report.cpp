#include "spfim/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "spfim/errors.hpp"

namespace spfim {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("report: cannot parse number '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("report: cannot parse integer '" + s + "'");
  }
  return v;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

double from_num(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

json matrix_json(const SymmetricMatrix& m) {
  json packed = json::array();
  for (double v : m.packed()) packed.push_back(num(v));
  return json{{"dim", m.dim()}, {"packed", packed}};
}

SymmetricMatrix matrix_from_json(const json& j) {
  std::vector<double> packed;
  for (const auto& v : j.at("packed")) packed.push_back(from_num(v));
  const auto dim = j.at("dim").get<std::size_t>();
  SymmetricMatrix m(dim);
  std::copy(packed.begin(), packed.end(), m.packed_mut().begin());
  return m;
}

std::string metadata_line(const ExperimentReport& r) {
  return "# spfim " + experiment_kind_name(r.kind) + " seed=" + std::to_string(r.seed) +
         " generated=" + r.timestamp + "\n";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string stem_of(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace

double variance_ratio(double independent, double standard) {
  if (standard > 0.0) return independent / standard;
  if (independent == 0.0) return 1.0;
  return std::numeric_limits<double>::infinity();
}

double ExperimentReport::seconds(std::size_t n, Method m) const {
  for (const auto& t : timing)
    if (t.n == n && t.method == m) return t.seconds;
  return 0.0;
}

double ExperimentReport::time_ratio_standard_over_independent(std::size_t n) const {
  const double indep = seconds(n, Method::IndependentPerturbation);
  return indep > 0.0 ? seconds(n, Method::Standard) / indep : 0.0;
}

double ExperimentReport::error_ratio_independent_over_standard() const {
  double s = 0.0, i = 0.0;
  for (const auto& a : accuracy) (a.method == Method::Standard ? s : i) = a.mean_error;
  return variance_ratio(i, s);
}

std::string to_json(const ExperimentReport& r) {
  json j;
  j["kind"] = experiment_kind_name(r.kind);
  j["seed"] = r.seed;
  j["timestamp"] = r.timestamp;
  j["config"] = r.config;
  j["parameter_names"] = r.parameter_names;
  j["warnings"] = r.warnings;

  json variance = json::array();
  for (const auto& v : r.variance) {
    variance.push_back({{"n", v.n}, {"entry", v.entry}, {"method", method_name(v.method)},
                        {"variance", num(v.variance)}, {"std_error", num(v.std_error)},
                        {"ratio", num(v.ratio)}});
  }
  j["variance"] = variance;

  json slopes = json::array();
  for (const auto& s : r.slopes) slopes.push_back({{"entry", s.entry}, {"slope", num(s.slope)}});
  j["slopes"] = slopes;

  json timing = json::array();
  for (const auto& t : r.timing) {
    timing.push_back({{"n", t.n}, {"method", method_name(t.method)}, {"seconds", num(t.seconds)},
                      {"replicates", t.replicates}});
  }
  j["timing"] = timing;
  json ratios = json::object();
  for (const auto& t : r.timing) {
    ratios[std::to_string(t.n)] = num(r.time_ratio_standard_over_independent(t.n));
  }
  j["time_ratio_standard_over_independent"] = ratios;

  j["truth"] = r.truth ? matrix_json(*r.truth) : json(nullptr);
  json accuracy = json::array();
  for (const auto& a : r.accuracy) {
    json errors = json::array();
    for (double e : a.errors) errors.push_back(num(e));
    accuracy.push_back({{"method", method_name(a.method)}, {"mean_error", num(a.mean_error)},
                        {"seconds", num(a.seconds)}, {"errors", errors},
                        {"typical", a.typical.dim() ? matrix_json(a.typical) : json(nullptr)},
                        {"typical_rank", a.typical_rank}});
  }
  j["accuracy"] = accuracy;
  if (!r.accuracy.empty()) {
    j["error_ratio_independent_over_standard"] = num(r.error_ratio_independent_over_standard());
  }

  json tradeoff = json::array();
  for (const auto& t : r.tradeoff) {
    tradeoff.push_back({{"M", t.M}, {"N", t.N}, {"method", method_name(t.method)},
                        {"entry", t.entry}, {"variance", num(t.variance)},
                        {"std_error", num(t.std_error)}});
  }
  j["tradeoff"] = tradeoff;
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  ExperimentReport r;
  try {
    const json j = json::parse(text);
    r.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.parameter_names = j.at("parameter_names").get<std::vector<std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& v : j.at("variance")) {
      r.variance.push_back({v.at("n").get<std::size_t>(), v.at("entry").get<std::size_t>(),
                            parse_method(v.at("method").get<std::string>()),
                            from_num(v.at("variance")), from_num(v.at("std_error")),
                            from_num(v.at("ratio"))});
    }
    for (const auto& s : j.at("slopes")) {
      r.slopes.push_back({s.at("entry").get<std::size_t>(), from_num(s.at("slope"))});
    }
    for (const auto& t : j.at("timing")) {
      r.timing.push_back({t.at("n").get<std::size_t>(),
                          parse_method(t.at("method").get<std::string>()),
                          from_num(t.at("seconds")), t.at("replicates").get<std::size_t>()});
    }
    if (!j.at("truth").is_null()) r.truth = matrix_from_json(j.at("truth"));
    for (const auto& a : j.at("accuracy")) {
      AccuracyRow row;
      row.method = parse_method(a.at("method").get<std::string>());
      row.mean_error = from_num(a.at("mean_error"));
      row.seconds = from_num(a.at("seconds"));
      for (const auto& e : a.at("errors")) row.errors.push_back(from_num(e));
      if (!a.at("typical").is_null()) row.typical = matrix_from_json(a.at("typical"));
      row.typical_rank = a.at("typical_rank").get<std::size_t>();
      r.accuracy.push_back(std::move(row));
    }
    for (const auto& t : j.at("tradeoff")) {
      r.tradeoff.push_back({t.at("M").get<std::size_t>(), t.at("N").get<std::size_t>(),
                            parse_method(t.at("method").get<std::string>()),
                            t.at("entry").get<std::size_t>(), from_num(t.at("variance")),
                            from_num(t.at("std_error"))});
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report JSON: ") + e.what());
  }
  return r;
}

std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << metadata_line(r);
  const std::string seed = std::to_string(r.seed);
  switch (r.kind) {
    case ExperimentKind::VarianceRatio:
      os << "entry,method,variance,ratio,n,seed\n";
      for (const auto& v : r.variance) {
        os << v.entry << ',' << method_name(v.method) << ',' << fmt(v.variance) << ','
           << fmt(v.ratio) << ',' << v.n << ',' << seed << '\n';
      }
      break;
    case ExperimentKind::Timing:
      os << "n,method,seconds,replicates,time_ratio_standard_over_independent,seed\n";
      for (const auto& t : r.timing) {
        os << t.n << ',' << method_name(t.method) << ',' << fmt(t.seconds) << ',' << t.replicates
           << ',' << fmt(r.time_ratio_standard_over_independent(t.n)) << ',' << seed << '\n';
      }
      break;
    case ExperimentKind::Accuracy:
      os << "method,mean_relative_error,error_ratio_independent_over_standard,seconds,"
            "typical_rank,seed\n";
      for (const auto& a : r.accuracy) {
        os << method_name(a.method) << ',' << fmt(a.mean_error) << ','
           << fmt(r.error_ratio_independent_over_standard()) << ',' << fmt(a.seconds) << ','
           << a.typical_rank << ',' << seed << '\n';
      }
      break;
    case ExperimentKind::MNTradeoff:
      os << "M,N,method,entry,variance,std_error,seed\n";
      for (const auto& t : r.tradeoff) {
        os << t.M << ',' << t.N << ',' << method_name(t.method) << ',' << t.entry << ','
           << fmt(t.variance) << ',' << fmt(t.std_error) << ',' << seed << '\n';
      }
      break;
  }
  return os.str();
}

std::string curves_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << metadata_line(r);
  os << "n,entry,ratio,reference_3.5_over_n,reference_13_over_n\n";
  for (const auto& v : r.variance) {
    if (v.method != Method::Standard) continue;
    const double n = static_cast<double>(v.n);
    os << v.n << ',' << v.entry << ',' << fmt(v.ratio) << ',' << fmt(kReferenceLow / n) << ','
       << fmt(kReferenceHigh / n) << '\n';
  }
  return os.str();
}

ExperimentReport report_from_csv(ExperimentKind kind, const std::string& text) {
  ExperimentReport r;
  r.kind = kind;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find(" seed=");
      const auto gen = line.find(" generated=");
      if (pos != std::string::npos && gen != std::string::npos) {
        r.seed = parse_u64(line.substr(pos + 6, gen - pos - 6));
        r.timestamp = line.substr(gen + 11);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    switch (kind) {
      case ExperimentKind::VarianceRatio:
        if (f.size() != 6) throw ValidationError("variance CSV: expected 6 fields");
        r.variance.push_back({parse_u64(f[4]), parse_u64(f[0]), parse_method(f[1]),
                              parse_double(f[2]), 0.0, parse_double(f[3])});
        break;
      case ExperimentKind::Timing:
        if (f.size() != 6) throw ValidationError("timing CSV: expected 6 fields");
        r.timing.push_back({parse_u64(f[0]), parse_method(f[1]), parse_double(f[2]),
                            parse_u64(f[3])});
        break;
      case ExperimentKind::Accuracy: {
        if (f.size() != 6) throw ValidationError("accuracy CSV: expected 6 fields");
        AccuracyRow a;
        a.method = parse_method(f[0]);
        a.mean_error = parse_double(f[1]);
        a.seconds = parse_double(f[3]);
        a.typical_rank = parse_u64(f[4]);
        r.accuracy.push_back(std::move(a));
        break;
      }
      case ExperimentKind::MNTradeoff:
        if (f.size() != 7) throw ValidationError("trade-off CSV: expected 7 fields");
        r.tradeoff.push_back({parse_u64(f[0]), parse_u64(f[1]), parse_method(f[2]),
                              parse_u64(f[3]), parse_double(f[4]), parse_double(f[5])});
        break;
    }
  }
  return r;
}

std::vector<std::string> write_report(const ExperimentReport& r, const std::string& path,
                                      OutputFormat format) {
  std::vector<std::string> written;
  if (format == OutputFormat::Json) {
    write_file(path, to_json(r));
    written.push_back(path);
    return written;
  }
  write_file(path, to_csv(r));
  written.push_back(path);
  const std::string stem = stem_of(path);
  if (r.kind == ExperimentKind::VarianceRatio) {
    write_file(stem + "_curves.csv", curves_csv(r));
    written.push_back(stem + "_curves.csv");
  }
  if (r.kind == ExperimentKind::Accuracy) {
    std::ostringstream errors;
    errors << metadata_line(r) << "method,replicate,relative_error\n";
    for (const auto& a : r.accuracy)
      for (std::size_t i = 0; i < a.errors.size(); ++i)
        errors << method_name(a.method) << ',' << i + 1 << ',' << fmt(a.errors[i]) << '\n';
    write_file(stem + "_errors.csv", errors.str());
    written.push_back(stem + "_errors.csv");

    std::ostringstream mats;
    mats << metadata_line(r) << "matrix,row,col,value\n";
    auto dump = [&](const std::string& name, const SymmetricMatrix& m) {
      for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t k = 0; k < m.dim(); ++k)
          mats << name << ',' << i + 1 << ',' << k + 1 << ',' << fmt(m(i, k)) << '\n';
    };
    if (r.truth) dump("truth", *r.truth);
    for (const auto& a : r.accuracy)
      if (a.typical.dim()) dump("typical_" + method_name(a.method), a.typical);
    write_file(stem + "_matrices.csv", mats.str());
    written.push_back(stem + "_matrices.csv");
  }
  return written;
}

std::string format_summary(const ExperimentReport& r) {
  std::ostringstream os;
  os << std::setprecision(4);
  os << "experiment: " << experiment_kind_name(r.kind) << "  seed: " << r.seed << "\n";
  auto param = [&](std::size_t entry) {
    return entry >= 1 && entry <= r.parameter_names.size() ? r.parameter_names[entry - 1]
                                                           : std::string("?");
  };
  switch (r.kind) {
    case ExperimentKind::VarianceRatio: {
      os << std::left << std::setw(6) << "n" << std::setw(6) << "j" << std::setw(10) << "param"
         << std::setw(14) << "var(indep)" << std::setw(14) << "var(std)" << "ratio\n";
      for (const auto& v : r.variance) {
        if (v.method != Method::IndependentPerturbation) continue;
        double basic = 0.0;
        for (const auto& w : r.variance)
          if (w.n == v.n && w.entry == v.entry && w.method == Method::Standard) basic = w.variance;
        os << std::setw(6) << v.n << std::setw(6) << v.entry << std::setw(10) << param(v.entry)
           << std::setw(14) << v.variance << std::setw(14) << basic << v.ratio << "\n";
      }
      for (const auto& s : r.slopes) {
        os << "slope of log(ratio) vs log(n), j=" << s.entry << ": " << s.slope << "\n";
      }
      break;
    }
    case ExperimentKind::Timing: {
      os << std::left << std::setw(8) << "n" << std::setw(14) << "indep (s)" << std::setw(14)
         << "standard (s)" << "standard/indep\n";
      for (const auto& t : r.timing) {
        if (t.method != Method::Standard) continue;
        os << std::setw(8) << t.n << std::setw(14) << r.seconds(t.n, Method::IndependentPerturbation)
           << std::setw(14) << t.seconds << r.time_ratio_standard_over_independent(t.n) << "\n";
      }
      break;
    }
    case ExperimentKind::Accuracy: {
      os << std::left << std::setw(14) << "method" << std::setw(16) << "mean rel. err"
         << "seconds\n";
      for (const auto& a : r.accuracy) {
        os << std::setw(14) << method_name(a.method) << std::setw(16) << a.mean_error << a.seconds
           << "\n";
      }
      os << "error ratio (indep/standard): " << r.error_ratio_independent_over_standard() << "\n";
      break;
    }
    case ExperimentKind::MNTradeoff: {
      os << std::left << std::setw(6) << "M" << std::setw(6) << "N" << std::setw(14) << "method"
         << std::setw(6) << "j" << std::setw(14) << "variance" << "std.err\n";
      for (const auto& t : r.tradeoff) {
        os << std::setw(6) << t.M << std::setw(6) << t.N << std::setw(14) << method_name(t.method)
           << std::setw(6) << t.entry << std::setw(14) << t.variance << t.std_error << "\n";
      }
      break;
    }
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace spfim
