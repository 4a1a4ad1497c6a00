#include "groupcover/grouped_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "groupcover/numerics.hpp"

namespace groupcover {

namespace {

std::string strip(std::string s) {
  const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(strip(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(strip(cur));
  return fields;
}

double parse_real(const std::string& field, long line_no, const char* what) {
  const std::string s = strip(field);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse " << what << " from '" << field << "'";
    throw DataError(msg.str());
  }
  return value;
}

long parse_count(const std::string& field, long line_no, const char* what) {
  const std::string s = strip(field);
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse " << what << " from '" << field << "'";
    throw DataError(msg.str());
  }
  return value;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

double noise_variance_of(const GroupSummary& s) { return s.noise_variance(); }

// Marginal normal log likelihood at (phi, tau2) given means z_i and noise
// variances v_i.
double marginal_loglik(const std::vector<double>& means, const std::vector<double>& vs,
                       double phi, double tau2) {
  double ll = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double var = tau2 + vs[i];
    const double d = means[i] - phi;
    ll += -0.5 * std::log(var) - 0.5 * d * d / var;
  }
  return ll;
}

double profile_phi(const std::vector<double>& means, const std::vector<double>& vs, double tau2) {
  double wsum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double w = 1.0 / (tau2 + vs[i]);
    wsum += w;
    acc += w * means[i];
  }
  return acc / wsum;
}

}  // namespace

std::vector<GroupObservations> ingest_raw(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: expected header 'group,value'");
  {
    auto header = split_csv_line(line);
    if (header.size() != 2 || header[0] != "group" || header[1] != "value") {
      throw DataError("bad header: expected 'group,value', got '" + strip(line) + "'");
    }
  }

  std::vector<GroupObservations> groups;
  std::unordered_map<std::string, std::size_t> index;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 2 fields, got " << fields.size();
      throw DataError(msg.str());
    }
    if (fields[0].empty()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": empty group id";
      throw DataError(msg.str());
    }
    const double value = parse_real(fields[1], line_no, "value");
    auto [it, inserted] = index.try_emplace(fields[0], groups.size());
    if (inserted) groups.push_back(GroupObservations{fields[0], {}});
    groups[it->second].values.push_back(value);
  }
  if (groups.empty()) throw DataError("no data rows found");
  return groups;
}

std::vector<GroupObservations> ingest_raw_file(const std::string& path) {
  auto in = open_or_throw(path);
  return ingest_raw(in);
}

std::vector<GroupSummary> read_aggregated(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: expected header 'group,n,mean,sd'");
  {
    auto header = split_csv_line(line);
    if (header.size() != 4 || header[0] != "group" || header[1] != "n" || header[2] != "mean" ||
        header[3] != "sd") {
      throw DataError("bad header: expected 'group,n,mean,sd', got '" + strip(line) + "'");
    }
  }

  std::vector<GroupSummary> summaries;
  std::unordered_map<std::string, bool> seen;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 4 fields, got " << fields.size();
      throw DataError(msg.str());
    }
    GroupSummary s;
    s.id = fields[0];
    if (s.id.empty()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": empty group id";
      throw DataError(msg.str());
    }
    if (!seen.emplace(s.id, true).second) {
      std::ostringstream msg;
      msg << "line " << line_no << ": duplicate group id '" << s.id << "'";
      throw DataError(msg.str());
    }
    s.n = parse_count(fields[1], line_no, "n");
    if (s.n < 1) {
      std::ostringstream msg;
      msg << "line " << line_no << ": n must be >= 1";
      throw DataError(msg.str());
    }
    s.mean = parse_real(fields[2], line_no, "mean");
    const double sd = parse_real(fields[3], line_no, "sd");
    if (sd < 0.0) {
      std::ostringstream msg;
      msg << "line " << line_no << ": sd must be nonnegative";
      throw DataError(msg.str());
    }
    s.sd = sd;
    summaries.push_back(std::move(s));
  }
  if (summaries.empty()) throw DataError("no data rows found");
  return summaries;
}

std::vector<GroupSummary> read_aggregated_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_aggregated(in);
}

void write_aggregated(std::ostream& out, const std::vector<GroupSummary>& summaries) {
  out << "group,n,mean,sd\n";
  char buf[64];
  for (const auto& s : summaries) {
    out << s.id << ',' << s.n << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", s.mean);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", s.sd ? *s.sd : 0.0);
    out << buf << '\n';
  }
}

std::vector<GroupSummary> summarize(const std::vector<GroupObservations>& groups, long min_n) {
  if (min_n < 1) throw DomainError("summarize: min_n must be >= 1");
  std::vector<GroupSummary> out;
  for (const auto& g : groups) {
    if (g.values.empty()) throw DataError("group " + g.id + ": no observations");
    const long n = static_cast<long>(g.values.size());
    if (n < min_n) continue;
    GroupSummary s;
    s.id = g.id;
    s.n = n;
    double acc = 0.0;
    for (double v : g.values) acc += v;
    s.mean = acc / static_cast<double>(n);
    if (n >= 2) {
      double ss = 0.0;
      for (double v : g.values) {
        const double d = v - s.mean;
        ss += d * d;
      }
      s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    std::ostringstream msg;
    msg << "summarize: no group has at least " << min_n << " observations";
    throw DataError(msg.str());
  }
  return out;
}

HyperParams mom_estimate(const std::vector<GroupSummary>& summaries) {
  const std::size_t k = summaries.size();
  if (k < 2) throw DataError("mom_estimate: need at least 2 groups");
  double mean_acc = 0.0;
  double v_acc = 0.0;
  for (const auto& s : summaries) {
    mean_acc += s.mean;
    v_acc += noise_variance_of(s);
  }
  const double phi = mean_acc / static_cast<double>(k);
  double ss = 0.0;
  for (const auto& s : summaries) {
    const double d = s.mean - phi;
    ss += d * d;
  }
  const double var_means = ss / static_cast<double>(k - 1);
  const double tau2 = std::max(0.0, var_means - v_acc / static_cast<double>(k));
  return HyperParams{phi, tau2};
}

HyperParams mle_estimate(const std::vector<GroupSummary>& summaries) {
  const std::size_t k = summaries.size();
  if (k < 2) throw DataError("mle_estimate: need at least 2 groups");
  std::vector<double> means(k), vs(k);
  for (std::size_t i = 0; i < k; ++i) {
    means[i] = summaries[i].mean;
    vs[i] = noise_variance_of(summaries[i]);
  }

  // Profile the marginal likelihood over tau2. The grid is logarithmic in
  // (tau2 + v_bar) units from essentially zero up to well past the spread of
  // the means, then golden refinement tightens the winner.
  double v_bar = 0.0;
  for (double v : vs) v_bar += v;
  v_bar /= static_cast<double>(k);
  const HyperParams mom = mom_estimate(summaries);
  const double scale = std::max({mom.tau2, v_bar, 1e-12});
  const double lo = std::log(scale * 1e-8);
  const double hi = std::log(scale * 1e3);

  auto neg_profile = [&](double log_tau2) {
    const double tau2 = std::exp(log_tau2);
    const double phi = profile_phi(means, vs, tau2);
    return -marginal_loglik(means, vs, phi, tau2);
  };
  const MinimizeResult res = minimize_scalar(neg_profile, lo, hi, 81);
  double tau2 = std::exp(res.argmin);

  // A boundary solution means the likelihood keeps rising as tau2 -> 0:
  // report exactly zero, consistent with the truncated moment estimator.
  if (res.argmin <= lo + 1e-9 ||
      -neg_profile(std::log(scale * 1e-12)) >= -res.min_value - 1e-12) {
    const double ll_zero = marginal_loglik(means, vs, profile_phi(means, vs, 0.0), 0.0);
    if (ll_zero >= -res.min_value - 1e-9) tau2 = 0.0;
  }
  const double phi = profile_phi(means, vs, tau2);
  return HyperParams{phi, tau2};
}

HyperParams estimate(const std::vector<GroupSummary>& summaries, Estimator estimator) {
  return estimator == Estimator::mom ? mom_estimate(summaries) : mle_estimate(summaries);
}

HyperParams loo_hyperparams(const std::vector<GroupSummary>& summaries, std::size_t index,
                            Estimator estimator) {
  if (summaries.size() < 3) throw DataError("loo_hyperparams: need at least 3 groups");
  if (index >= summaries.size()) throw DataError("loo_hyperparams: group index out of range");
  std::vector<GroupSummary> rest;
  rest.reserve(summaries.size() - 1);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    if (i != index) rest.push_back(summaries[i]);
  }
  return estimate(rest, estimator);
}

}  // namespace groupcover
