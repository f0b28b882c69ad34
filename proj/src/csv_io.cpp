#include "pcmean/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace pcm {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& tok, int line_no, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse " + what +
                          " value '" + tok + "'");
  return v;
}

std::int64_t parse_count(const std::string& tok, int line_no) {
  std::int64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v < 0)
    throw ValidationError("line " + std::to_string(line_no) +
                          ": count must be a nonnegative integer, got '" + tok + "'");
  return v;
}

struct Row {
  double time;
  std::int64_t count;
  Eigen::VectorXd z;
};

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

Dataset parse_csv(std::istream& in, bool increments) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "subject_id" || header[1] != "time" ||
      header[2] != "count")
    throw ValidationError("CSV header must be subject_id,time,count,z1,...,zd");
  const int d = static_cast<int>(header.size()) - 3;
  for (int j = 0; j < d; ++j)
    if (header[3 + j] != "z" + std::to_string(j + 1))
      throw ValidationError("CSV header must be subject_id,time,count,z1,...,zd");

  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> groups;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> tok = split_csv_line(line);
    if (static_cast<int>(tok.size()) != d + 3)
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(d + 3) + " fields, got " +
                            std::to_string(tok.size()));
    Row row;
    row.time = parse_double(tok[1], line_no, "time");
    row.count = parse_count(tok[2], line_no);
    row.z.resize(d);
    for (int j = 0; j < d; ++j) row.z[j] = parse_double(tok[3 + j], line_no, "covariate");
    auto [it, inserted] = groups.try_emplace(tok[0]);
    if (inserted) order.push_back(tok[0]);
    it->second.push_back(std::move(row));
  }
  if (order.empty()) throw std::invalid_argument("CSV contains no data rows");

  std::vector<Subject> subjects;
  subjects.reserve(order.size());
  for (const std::string& id : order) {
    std::vector<Row>& rows = groups[id];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    for (const Row& r : rows)
      if (r.z != rows.front().z)
        throw ValidationError("subject " + id + ": covariates change across rows");
    if (increments) {
      std::int64_t cum = 0;
      for (Row& r : rows) {
        cum += r.count;
        r.count = cum;
      }
    }
    for (std::size_t j = 1; j < rows.size(); ++j)
      if (rows[j].count < rows[j - 1].count)
        throw ValidationError("subject " + id +
                              ": counts must be cumulative (nondecreasing in time)");
    std::vector<double> times;
    std::vector<std::int64_t> counts;
    for (const Row& r : rows) {
      if (!times.empty() && r.time == times.back())
        counts.back() = std::max(counts.back(), r.count);
      else {
        times.push_back(r.time);
        counts.push_back(r.count);
      }
    }
    subjects.emplace_back(id, rows.front().z, std::move(times), std::move(counts));
  }
  return Dataset(std::move(subjects));
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "subject_id,time,count";
  for (int j = 1; j <= data.d(); ++j) out << ",z" << j;
  out << "\n";
  for (const Subject& s : data.subjects())
    for (int j = 0; j < s.k(); ++j) {
      out << s.id << "," << fmt("%.17g", s.times[j]) << "," << s.counts[j];
      for (int c = 0; c < data.d(); ++c) out << "," << fmt("%.17g", s.z[c]);
      out << "\n";
    }
}

std::string write_fit(const FitResult& result, const BootstrapResult* boot) {
  for (std::size_t l = 1; l < result.lambda.values.size(); ++l)
    if (result.lambda.values[l] < result.lambda.values[l - 1] ||
        result.lambda.jumps[l] <= result.lambda.jumps[l - 1])
      throw std::logic_error("fit report: step table is not nondecreasing");

  std::ostringstream out;
  out << "converged " << (result.converged ? "true" : "false") << "\n";
  out << "outer_iters " << result.outer_iters << "\n";
  out << "loglik " << fmt("%.9g", result.loglik) << "\n";
  out << "d " << result.beta.size() << "\n";
  for (Eigen::Index j = 0; j < result.beta.size(); ++j) {
    out << "coef " << (j + 1) << " estimate " << fmt("%.9g", result.beta[j]);
    if (boot) {
      out << " se " << fmt("%.9g", boot->se[j]);
      if (boot->se[j] > 0.0) {
        const WaldRow row =
            wald_test(result.beta.segment(j, 1), boot->se.segment(j, 1)).front();
        out << " zstat " << fmt("%.9g", row.zstat) << " pvalue " << fmt("%.9g", row.pvalue);
      }
    }
    out << "\n";
  }
  if (boot) {
    out << "bootstrap_replicates " << boot->replicates.rows() << "\n";
    out << "bootstrap_failed " << boot->failed << "\n";
  }
  out << "lambda_points " << result.lambda.jumps.size() << "\n";
  for (std::size_t l = 0; l < result.lambda.jumps.size(); ++l)
    out << "lambda " << fmt("%.9g", result.lambda.jumps[l]) << " "
        << fmt("%.9g", result.lambda.values[l]) << "\n";
  return out.str();
}

}  // namespace pcm
