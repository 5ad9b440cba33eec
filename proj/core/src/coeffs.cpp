#include "fastact/coeffs.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fastact/error.hpp"

namespace fastact {
namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " coefficients are empty");
  for (double x : v)
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + " coefficients must be finite");
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError("field '" + std::string(field) + "': bad number '" + std::string(tok) + "'");
  return v;
}

std::vector<double> parse_list(std::string_view rest, std::string_view field) {
  std::vector<double> out;
  for (auto tok : split_ws(rest)) out.push_back(parse_double(tok, field));
  if (out.empty()) throw ParseError("field '" + std::string(field) + "' has no values");
  return out;
}

FitReport parse_report(std::string_view rest) {
  static constexpr std::array<std::string_view, 4> keys = {
      "max_abs_error", "mean_abs_error", "residual_norm", "condition_estimate"};
  std::map<std::string_view, double> kv;
  for (auto tok : split_ws(rest)) {
    auto eq = tok.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("field 'fit_report': expected key=value, got '" + std::string(tok) + "'");
    kv[tok.substr(0, eq)] = parse_double(tok.substr(eq + 1), tok.substr(0, eq));
  }
  for (auto k : keys)
    if (!kv.contains(k)) throw ParseError("field 'fit_report': missing '" + std::string(k) + "'");
  return {kv["max_abs_error"], kv["mean_abs_error"], kv["residual_norm"],
          kv["condition_estimate"]};
}

}  // namespace

void validate(const PolyCoeffs& c) { require_finite(c.a, "polynomial"); }

void validate(const RationalCoeffs& c) {
  require_finite(c.num, "numerator");
  require_finite(c.den, "denominator");
  if (c.den.front() != 1.0) throw ConfigError("denominator must be normalized with b0 = 1");
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_coeffs(const CoeffFile& file) {
  std::ostringstream out;
  out << "fastact-coeffs " << kCoeffFormatVersion << ' ' << file.name << '\n';
  if (file.range)
    out << "range: " << format_double(file.range->first) << ' '
        << format_double(file.range->second) << '\n';
  if (auto* p = std::get_if<PolyCoeffs>(&file.data)) {
    out << "poly: " << join(p->a) << '\n';
  } else if (auto* r = std::get_if<RationalCoeffs>(&file.data)) {
    out << "num: " << join(r->num) << '\n';
    out << "den: " << join(r->den) << '\n';
    out << "pole_free: " << (r->pole_free ? "true" : "false") << '\n';
  } else {
    const auto& t = std::get<TableCoeffs>(file.data);
    out << "max_exp: " << format_double(t.max_exp) << '\n';
    out << "table: " << join(t.values) << '\n';
  }
  if (file.report) {
    const auto& r = *file.report;
    out << "fit_report: max_abs_error=" << format_double(r.max_abs_error)
        << " mean_abs_error=" << format_double(r.mean_abs_error)
        << " residual_norm=" << format_double(r.residual_norm)
        << " condition_estimate=" << format_double(r.condition_estimate) << '\n';
  } else {
    out << "fit_report: none\n";
  }
  return out.str();
}

ImportResult parse_coeffs(std::string_view text) {
  std::map<std::string, std::string_view> fields;
  std::optional<std::string> name;

  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    if (first) {
      first = false;
      auto toks = split_ws(line);
      if (toks.size() != 3 || toks[0] != "fastact-coeffs")
        throw ParseError("field 'header': expected 'fastact-coeffs <version> <name>'");
      int version = 0;
      auto [p, ec] = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), version);
      if (ec != std::errc{} || p != toks[1].data() + toks[1].size())
        throw ParseError("field 'header': bad version '" + std::string(toks[1]) + "'");
      if (version != kCoeffFormatVersion)
        throw ParseError("version mismatch: file has " + std::to_string(version) +
                         ", expected " + std::to_string(kCoeffFormatVersion));
      name = std::string(toks[2]);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("malformed line '" + std::string(line) + "'");
    std::string key(line.substr(0, colon));
    if (fields.contains(key)) throw ParseError("field '" + key + "' appears twice");
    fields[key] = line.substr(colon + 1);
  }
  if (!name) throw ParseError("field 'header' is missing");

  ImportResult result;
  result.file.name = *name;

  if (auto it = fields.find("range"); it != fields.end()) {
    auto v = parse_list(it->second, "range");
    if (v.size() != 2 || !(v[0] < v[1])) throw ParseError("field 'range': expected lo < hi");
    result.file.range = std::pair{v[0], v[1]};
  }

  if (fields.contains("poly")) {
    result.file.data = PolyCoeffs{parse_list(fields["poly"], "poly")};
  } else if (fields.contains("num") || fields.contains("den")) {
    if (!fields.contains("num")) throw ParseError("field 'num' is missing");
    if (!fields.contains("den")) throw ParseError("field 'den' is missing");
    RationalCoeffs r{parse_list(fields["num"], "num"), parse_list(fields["den"], "den"), false};
    if (auto it = fields.find("pole_free"); it != fields.end()) {
      auto toks = split_ws(it->second);
      if (toks.size() != 1 || (toks[0] != "true" && toks[0] != "false"))
        throw ParseError("field 'pole_free': expected true or false");
      r.pole_free = toks[0] == "true";
    }
    if (r.den.front() == 0.0) throw ParseError("field 'den': leading coefficient is zero");
    if (r.den.front() != 1.0) {
      const double b0 = r.den.front();
      for (double& v : r.num) v /= b0;
      for (double& v : r.den) v /= b0;
      r.den.front() = 1.0;
      result.warnings.push_back("den[0] was " + format_double(b0) +
                                "; coefficients normalized so that den[0] = 1");
    }
    result.file.data = std::move(r);
  } else if (fields.contains("table")) {
    if (!fields.contains("max_exp")) throw ParseError("field 'max_exp' is missing");
    auto me = parse_list(fields["max_exp"], "max_exp");
    if (me.size() != 1) throw ParseError("field 'max_exp': expected one value");
    result.file.data = TableCoeffs{me[0], parse_list(fields["table"], "table")};
  } else {
    throw ParseError("field 'poly' (or 'num'/'den') is missing");
  }

  auto rep = fields.find("fit_report");
  if (rep == fields.end()) throw ParseError("field 'fit_report' is missing");
  auto toks = split_ws(rep->second);
  if (!(toks.size() == 1 && toks[0] == "none")) result.file.report = parse_report(rep->second);

  return result;
}

void export_coeffs(const CoeffFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << format_coeffs(file);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

ImportResult import_coeffs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_coeffs(ss.str());
}

}  // namespace fastact
