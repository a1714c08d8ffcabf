#include "hyperfix/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hyperfix {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trace_to_csv(const IterationTrace& trace) {
  std::string out = "iter,eps,residual,step";
  const std::size_t dim = trace.points.empty() ? 0 : trace.points[0].dim();
  for (std::size_t k = 0; k < dim; ++k) out += ",coord_" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    out += std::to_string(trace.iterations[i]);
    out += ',';
    if (!trace.eps_schedule.empty()) out += format_double(trace.eps_schedule[i]);
    out += ',';
    out += format_double(trace.residuals[i]);
    out += ',';
    if (!std::isnan(trace.steps[i])) out += format_double(trace.steps[i]);
    for (double c : trace.points[i].coords) {
      out += ',';
      out += format_double(c);
    }
    out += '\n';
  }
  return out;
}

std::string psi_table_to_csv(const PsiFunction& psi, std::size_t grid_size) {
  std::string out = "t,psi\n";
  for (std::size_t i = 0; i <= grid_size; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid_size);
    out += format_double(t);
    out += ',';
    out += format_double(psi(t));
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.c_str();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc()) throw Error("bad number '" + text + "' in " + where);
  return value;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

PsiFunction load_psi_table(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != "t,psi")
    throw Error(path + ": expected header 't,psi' on line 1");
  std::vector<double> values;
  const std::size_t m = lines.size() - 2;  // header + M+1 rows
  if (lines.size() < 4)
    throw Error(path + ": psi table needs at least 3 grid rows");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 2)
      throw Error(path + ": row " + std::to_string(i + 1) +
                  " does not have 2 columns");
    const double t = parse_double(cols[0], path);
    const double expected =
        static_cast<double>(i - 1) / static_cast<double>(m);
    if (std::fabs(t - expected) > 1e-9)
      throw Error(path + ": row " + std::to_string(i + 1) +
                  " has t=" + cols[0] + ", expected uniform ascending grid");
    values.push_back(parse_double(cols[1], path));
  }
  try {
    return PsiFunction::tabulated(std::move(values));
  } catch (const NotInPsiClass& e) {
    throw Error(path + ": row " + std::to_string(e.grid_index() + 2) + ": " +
                e.what());
  }
}

PsiFunction parse_psi_spec(const std::string& spec) {
  if (spec == "max") return PsiFunction::max_norm();
  if (spec.rfind("lp:", 0) == 0)
    return PsiFunction::lp(parse_double(spec.substr(3), "psi spec"));
  throw Error("unknown psi spec '" + spec + "' (use lp:<p> or max)");
}

double parse_p(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return kInfiniteP;
  return parse_double(text, "ambient exponent");
}

namespace {

std::string p_to_string(double p) {
  return p == kInfiniteP ? "inf" : format_double(p);
}

std::string psi_spec_of(const PsiFunction& psi) {
  switch (psi.kind()) {
    case PsiFunction::Kind::Lp:
      return "lp:" + format_double(psi.p());
    case PsiFunction::Kind::Max:
      return "max";
    case PsiFunction::Kind::Tabulated:
      throw Error("tabulated psi cannot be written to a sample sidecar");
  }
  return "";
}

}  // namespace

std::string sample_to_csv(const SequenceSample& s) {
  std::string out;
  if (s.is_direct_sum()) {
    const auto& w0 = s.sum_points()[0];
    out += "# dims " + std::to_string(w0.x.dim()) + " " +
           std::to_string(w0.y.dim()) + " psi " + psi_spec_of(w0.psi) +
           " px " + p_to_string(w0.x.p) + " py " + p_to_string(w0.y.p) + "\n";
    out += "idx";
    for (std::size_t j = 0; j < w0.x.dim(); ++j)
      out += ",x_" + std::to_string(j);
    for (std::size_t j = 0; j < w0.y.dim(); ++j)
      out += ",y_" + std::to_string(j);
    out += "\n";
  } else {
    const double p = s.plain_points()[0].p;
    if (p != 2.0) out += "# p " + p_to_string(p) + "\n";
    out += "idx";
    for (std::size_t j = 0; j < s.coord_dim(); ++j)
      out += ",coord_" + std::to_string(j);
    out += "\n";
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(i);
    for (std::size_t j = 0; j < s.coord_dim(); ++j) {
      out += ',';
      out += format_double(s.coord(i, j));
    }
    out += '\n';
  }
  return out;
}

SequenceSample load_sample(const std::string& path, std::size_t tail_window) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw Error(path + ": empty sample file");

  std::size_t row = 0;
  std::size_t dx = 0, dy = 0;
  double px = 2.0, py = 2.0;
  double plain_p = 2.0;
  std::optional<PsiFunction> psi;

  if (lines[0].rfind("# p ", 0) == 0) {
    plain_p = parse_p(lines[0].substr(4));
    row = 1;
  } else if (lines[0].rfind("# dims", 0) == 0) {
    std::istringstream ss(lines[0].substr(1));
    std::string word;
    ss >> word >> dx >> dy;
    if (!ss || dx == 0 || dy == 0)
      throw Error(path + ": bad sidecar line, expected '# dims dx dy psi <spec>'");
    while (ss >> word) {
      std::string value;
      if (!(ss >> value))
        throw Error(path + ": sidecar key '" + word + "' has no value");
      if (word == "psi")
        psi = parse_psi_spec(value);
      else if (word == "px")
        px = parse_p(value);
      else if (word == "py")
        py = parse_p(value);
      else
        throw Error(path + ": unknown sidecar key '" + word + "'");
    }
    if (!psi) throw Error(path + ": sidecar is missing the psi spec");
    row = 1;
  }

  if (row >= lines.size()) throw Error(path + ": missing header row");
  const auto header = split(lines[row], ',');
  if (header.empty() || header[0] != "idx")
    throw Error(path + ": header must start with 'idx'");
  const std::size_t ncols = header.size() - 1;
  if (psi && ncols != dx + dy)
    throw Error(path + ": header has " + std::to_string(ncols) +
                " coordinate columns, sidecar declares " +
                std::to_string(dx + dy));
  if (ncols == 0) throw Error(path + ": no coordinate columns");
  ++row;

  std::vector<std::vector<double>> rows;
  for (; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const auto cols = split(lines[row], ',');
    if (cols.size() != ncols + 1)
      throw Error(path + ": row " + std::to_string(row + 1) +
                  " has wrong column count");
    std::vector<double> coords(ncols);
    for (std::size_t j = 0; j < ncols; ++j)
      coords[j] = parse_double(cols[j + 1], path);
    rows.push_back(std::move(coords));
  }

  if (psi) {
    std::vector<DirectSumPoint> pts;
    pts.reserve(rows.size());
    for (auto& coords : rows) {
      pts.push_back(DirectSumPoint{
          SpacePoint{{coords.begin(), coords.begin() + static_cast<long>(dx)},
                     px},
          SpacePoint{{coords.begin() + static_cast<long>(dx), coords.end()},
                     py},
          *psi});
    }
    return SequenceSample(std::move(pts), tail_window);
  }
  std::vector<SpacePoint> pts;
  pts.reserve(rows.size());
  for (auto& coords : rows)
    pts.push_back(SpacePoint{std::move(coords), plain_p});
  return SequenceSample(std::move(pts), tail_window);
}

}  // namespace hyperfix
